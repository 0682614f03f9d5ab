use rayon::prelude::*;

use crate::corepoly::{poly_roots, Cx};
use crate::error::{invalid, precondition, Result};

/// Solvability of g(ζ) = α near e^{iθ0}, per target α.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeReport {
    pub theta0: f64,
    pub window: f64,
    pub degree: usize,
    pub targets: Vec<Cx>,
    /// Roots of g − α in U with |ζ − e^{iθ0}| < window.
    pub roots: Vec<Vec<Cx>>,
    /// Distance from e^{iθ0} to the nearest root of g − α in U (∞ if none).
    pub nearest: Vec<f64>,
}

impl RangeReport {
    pub fn hits(&self, i: usize) -> usize {
        self.roots[i].len()
    }

    pub fn total_hits(&self) -> usize {
        self.roots.iter().map(Vec::len).sum()
    }

    /// Fraction of targets attained in the window.
    pub fn attained_fraction(&self) -> f64 {
        self.roots.iter().filter(|r| !r.is_empty()).count() as f64 / self.targets.len().max(1) as f64
    }
}

/// m × m grid of targets centred at `center` with half-width `half`.
pub fn target_grid(center: Cx, half: f64, m: usize) -> Vec<Cx> {
    let s = |l: usize| if m == 1 { 0.0 } else { 2.0 * l as f64 / (m - 1) as f64 - 1.0 };
    (0..m)
        .flat_map(|i| (0..m).map(move |j| center + Cx::new(s(i) * half, s(j) * half)))
        .collect()
}

/// # Errors
/// A constant polynomial, window ≤ 0, or a root-finding failure.
pub fn range_density(g: &[Cx], theta0: f64, window: f64, targets: &[Cx]) -> Result<RangeReport> {
    let mut g = g.to_vec();
    while g.len() > 1 && g.last().is_some_and(|c| *c == Cx::new(0.0, 0.0)) {
        g.pop();
    }
    if g.len() < 2 {
        return Err(precondition("range_density", "g must be a nonconstant polynomial"));
    }
    if !(window > 0.0) {
        return Err(invalid(format!("window radius {window} must be positive")));
    }
    let e = Cx::from_polar(1.0, theta0);
    let per: Vec<(Vec<Cx>, f64)> = targets
        .par_iter()
        .map(|a| {
            let mut c = g.clone();
            c[0] -= a;
            let roots = poly_roots(&c)?;
            let inside: Vec<Cx> = roots.iter().copied().filter(|z| z.norm() < 1.0).collect();
            let nearest = inside.iter().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min);
            let hits = inside.into_iter().filter(|z| (z - e).norm() < window).collect();
            Ok((hits, nearest))
        })
        .collect::<Result<_>>()?;
    let (roots, nearest) = per.into_iter().unzip();
    Ok(RangeReport {
        theta0,
        window,
        degree: g.len() - 1,
        targets: targets.to_vec(),
        roots,
        nearest,
    })
}
