use std::f64::consts::TAU;

use rayon::prelude::*;

use super::nevanlinna::ScalarFn;
use crate::corepoly::Cx;
use crate::error::{invalid, Result};

/// Chordal distance on the Riemann sphere; infinite or NaN-free values
/// with non-finite modulus count as ∞.
pub fn chordal(a: Cx, b: Cx) -> f64 {
    let fa = a.is_finite();
    let fb = b.is_finite();
    match (fa, fb) {
        (true, true) => 2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt()),
        (true, false) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
        (false, true) => 2.0 / (1.0 + b.norm_sqr()).sqrt(),
        (false, false) => 0.0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionRecord {
    pub theta: f64,
    pub values: Vec<Cx>,
    /// Chordal distance of the last two radial values.
    pub last_step: f64,
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FatouScan {
    pub ladder: Vec<f64>,
    pub tol: f64,
    pub directions: Vec<DirectionRecord>,
    pub fraction: f64,
}

/// Radial values along `ladder` in the directions θ_k = 2π(k + ½)/n; a
/// direction is stabilized when its last two values are within `tol` in
/// the chordal metric.
///
/// # Errors
/// No directions, fewer than two radii, or radii not increasing in [0, 1).
pub fn fatou_scan(f: ScalarFn<'_>, n_dir: usize, ladder: &[f64], tol: f64) -> Result<FatouScan> {
    if n_dir == 0 || ladder.len() < 2 {
        return Err(invalid("need directions and at least two radii"));
    }
    if ladder.windows(2).any(|w| !(w[0] < w[1])) || !(ladder[0] >= 0.0) || !(ladder[ladder.len() - 1] < 1.0) {
        return Err(invalid("ladder must increase inside [0, 1)"));
    }
    let directions: Vec<DirectionRecord> = (0..n_dir)
        .into_par_iter()
        .map(|k| {
            let theta = TAU * (k as f64 + 0.5) / n_dir as f64;
            let values: Vec<Cx> = ladder.iter().map(|r| f(Cx::from_polar(*r, theta))).collect();
            let m = values.len();
            let last_step = chordal(values[m - 2], values[m - 1]);
            DirectionRecord {
                theta,
                values,
                last_step,
                stabilized: last_step < tol,
            }
        })
        .collect();
    let fraction = directions.iter().filter(|d| d.stabilized).count() as f64 / n_dir as f64;
    Ok(FatouScan {
        ladder: ladder.to_vec(),
        tol,
        directions,
        fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ladder() -> Vec<f64> {
        (4..=30).map(|j| 1.0 - 2f64.powi(-j)).collect()
    }

    #[test]
    fn identity_stabilizes() {
        let id = |z: Cx| z;
        let s = fatou_scan(&id, 32, &ladder(), 1e-6).unwrap();
        assert_eq!(s.fraction, 1.0);
    }

    #[test]
    fn singular_inner_factor() {
        let f = |z: Cx| ((Cx::new(1.0, 0.0) + z) / (Cx::new(1.0, 0.0) - z)).exp();
        let s = fatou_scan(&f, 64, &ladder(), 1e-3).unwrap();
        assert!(s.fraction >= 0.95, "{}", s.fraction);
        let d = &s.directions[16];
        let v = d.values.last().unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn infinite_tolerance() {
        let f = |z: Cx| Cx::new(1.0, 0.0) / (Cx::new(1.0, 0.0) - z * z);
        assert_eq!(fatou_scan(&f, 8, &ladder(), f64::INFINITY).unwrap().fraction, 1.0);
    }

    #[test]
    fn chordal_metric() {
        let inf = Cx::new(f64::INFINITY, 0.0);
        assert_eq!(chordal(inf, inf), 0.0);
        assert!((chordal(Cx::new(0.0, 0.0), inf) - 2.0).abs() < 1e-15);
        assert!((chordal(Cx::new(1.0, 0.0), Cx::new(-1.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bad_ladder() {
        let id = |z: Cx| z;
        assert!(fatou_scan(&id, 4, &[0.5], 1e-3).is_err());
        assert!(fatou_scan(&id, 4, &[0.5, 1.0], 1e-3).is_err());
    }
}
