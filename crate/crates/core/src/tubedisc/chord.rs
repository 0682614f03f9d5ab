use std::f64::consts::PI;

use rayon::prelude::*;

use super::model::rho_max;
use crate::corepoly::fourier::node;
use crate::corepoly::{Cx, PolyMap, C2};
use crate::error::{invalid, precondition, Error, Result};
use crate::liftengine::{push_boundary, BaseMap, Condition, LiftCertificate, PushOptions};

/// Settings for [`disc_through_point_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChordOptions {
    /// Chord offset η = eta_factor·(C₁ − ρ(z)), capped to keep the chord
    /// above C₀.
    pub eta_factor: f64,
    /// Fixed Taylor order of the disc; None picks it from the tolerance.
    pub order: Option<usize>,
    /// Fixed ratio gap/σ of the boundary profile; None picks it.
    pub kappa: Option<f64>,
    pub verify_radii: usize,
}

impl Default for ChordOptions {
    fn default() -> Self {
        ChordOptions {
            eta_factor: 0.05,
            order: None,
            kappa: None,
            verify_radii: 8,
        }
    }
}

/// Triangle cut from {ρ ≤ C₁} + iy by a chord through (a translate of) z,
/// and the disc through z whose boundary lies over its two legs.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordTriangle {
    pub base: C2,
    pub c0: f64,
    pub c1: f64,
    /// True when x₂ > x₁ and the chord rule is mirrored.
    pub mirrored: bool,
    /// Chord normal (1, δ) or (δ, 1).
    pub normal: [f64; 2],
    pub eta: f64,
    /// ρ at the diagonal crossing of the translated chord.
    pub chord_value: f64,
    pub corner: [f64; 2],
    /// Chord endpoint on {x₂ = C₁}.
    pub p: [f64; 2],
    /// Chord endpoint on {x₁ = C₁}.
    pub q: [f64; 2],
    /// Real linear part (diagonal: −ℓ₁, −ℓ₂) of the affine map from the
    /// model triangle co(k).
    pub linear: [[f64; 2]; 2],
    /// corner + iy.
    pub translation: C2,
    /// Model preimage of Re z.
    pub model_center: [f64; 2],
    /// ε for which γ_ε passes through the model preimage.
    pub eps: f64,
    pub kappa: f64,
    pub sigma: f64,
    /// λ(z, ·) with λ(z, 0) = z.
    pub disc: PolyMap,
    pub certificate: LiftCertificate,
}

impl ChordTriangle {
    /// λ(z, ·) − z, with a zero constant term.
    pub fn centered(&self) -> PolyMap {
        let mut c = self.disc.coeffs().to_vec();
        c[0] = C2::ZERO;
        PolyMap::new(c).expect("finite coefficients")
    }

    /// Natural Taylor order for this triangle at tolerance `tol`.
    pub fn order(&self) -> usize {
        self.disc.degree()
    }
}

/// # Errors
/// See [`disc_through_point_with`].
pub fn disc_through_point(z: &C2, c0: f64, c1: f64, tol: f64) -> Result<ChordTriangle> {
    disc_through_point_with(z, c0, c1, tol, &ChordOptions::default())
}

/// Holomorphic polynomial disc λ(z, ·) with λ(z, 0) = z, ρ_max within `tol`
/// of C₁ on |w| = 1 and ρ_max > C₀ on Ū.
///
/// # Errors
/// C₀ < ρ_max(z) < C₁ violated, bad options, or a failed certificate.
pub fn disc_through_point_with(z: &C2, c0: f64, c1: f64, tol: f64, opts: &ChordOptions) -> Result<ChordTriangle> {
    let rho = rho_max(z);
    if !z.is_finite() || !(c0 < rho && rho < c1) {
        return Err(precondition(
            "disc_through_point",
            format!("needs C0 < ρ(z) < C1, got {c0} < {rho} < {c1}"),
        ));
    }
    if !(tol > 0.0) || !(opts.eta_factor > 0.0) || opts.verify_radii < 2 {
        return Err(invalid("tolerance, offset factor and radii must be positive"));
    }
    let x = z.re();
    let y = z.im();
    let mirrored = x[1] > x[0];
    let (hi, lo) = if mirrored { (x[1], x[0]) } else { (x[0], x[1]) };
    let m = 0.5 * (rho + c0);
    let delta = if lo >= m { 1.0 } else { ((hi - m) / (m - lo)).min(1.0) };
    let n = if mirrored { [delta, 1.0] } else { [1.0, delta] };
    let nn = n[0].hypot(n[1]);
    let nsum = n[0] + n[1];
    let nx = n[0] * x[0] + n[1] * x[1];
    let v = nx / nsum;
    let eta = (opts.eta_factor * (c1 - rho)).min(0.5 * (v - c0) * nsum / nn);
    let s0 = nx - eta * nn;
    let chord_value = s0 / nsum;
    let p = [(s0 - n[1] * c1) / n[0], c1];
    let q = [c1, (s0 - n[0] * c1) / n[1]];
    let l1 = c1 - p[0];
    let l2 = c1 - q[1];
    let t = [(c1 - x[0]) / l1, (c1 - x[1]) / l2];
    if !(l1 > 0.0 && l2 > 0.0 && t[0] > 0.0 && t[1] > 0.0 && t[0] + t[1] < 1.0) || !(chord_value > c0) {
        return Err(Error::Numerical(format!(
            "degenerate chord triangle at z = {z:?}: ℓ = ({l1}, {l2}), t = {t:?}"
        )));
    }
    let eps = (1.0 - t[0] - t[1]) / (1.0 - t[0] * t[0] - t[1] * t[1]);

    let lmax = l1.max(l2);
    let gap = 0.5 * PI * (1.0 - t[0] - t[1]);
    let kappa = opts
        .kappa
        .unwrap_or_else(|| (2.0 * (2.0 * lmax / tol).max(std::f64::consts::E).ln()).sqrt());
    let sigma = gap / kappa;
    let order = opts.order.unwrap_or_else(|| natural_order(sigma, tol / (4.0 * lmax)));
    let arcs = [
        (gap, gap + 2.0 * PI * t[0]),
        (2.0 * PI * t[0] + 3.0 * gap, 2.0 * PI * (t[0] + t[1]) + 3.0 * gap),
    ];
    let f1 = profile_series(t[0], arcs[0], sigma, order);
    let f2 = profile_series(t[1], arcs[1], sigma, order);
    let mut coeffs: Vec<C2> = (0..=order).map(|k| C2::new(f1[k] * -l1, f2[k] * -l2)).collect();
    coeffs[0] = *z;
    let disc = PolyMap::new(coeffs)?;

    let nodes = (8 * (order + 1)).next_power_of_two().max(256);
    let mut cert = LiftCertificate {
        grid_nodes: vec![nodes],
        grid_radii: opts.verify_radii,
        ..Default::default()
    };
    let top = disc.sample_circle(1.0, nodes);
    let dev = top.iter().map(|w| (rho_max(w) - c1).abs()).fold(0.0, f64::max);
    cert.push(Condition::below("|ρ(λ) − C1| on |w| = 1", dev, tol));
    let mut low = f64::INFINITY;
    for l in 0..opts.verify_radii {
        let s = l as f64 / (opts.verify_radii - 1) as f64;
        for w in disc.sample_circle(s, nodes) {
            low = low.min(rho_max(&w));
        }
    }
    cert.push(Condition::above("ρ(λ) on Ū", low, c0));
    cert.push(Condition::below("|λ(0) − z|", (disc.eval(Cx::new(0.0, 0.0)) - *z).norm(), tol));
    cert.set_param("eps", eps);
    cert.set_param("order", order as f64);
    if !cert.pass() {
        return Err(Error::Certification(format!("disc through {z:?}: {cert}")));
    }
    Ok(ChordTriangle {
        base: *z,
        c0,
        c1,
        mirrored,
        normal: n,
        eta,
        chord_value,
        corner: [c1, c1],
        p,
        q,
        linear: [[-l1, 0.0], [0.0, -l2]],
        translation: C2::new(Cx::new(c1, y[0]), Cx::new(c1, y[1])),
        model_center: t,
        eps,
        kappa,
        sigma,
        disc,
        certificate: cert,
    })
}

/// Smallest N with Σ_{k>N} 2e^{−k²σ²/2}/(πk) ≤ tol.
fn natural_order(sigma: f64, tol: f64) -> usize {
    let term = |k: usize| 2.0 * (-((k * k) as f64) * sigma * sigma / 2.0).exp() / (PI * k as f64);
    let mut n = 1usize;
    loop {
        let mut tail = 0.0;
        let mut k = n + 1;
        loop {
            let t = term(k);
            tail += t;
            if t < 1e-3 * tol.min(1.0) * 1e-3 || k > n + 100_000 {
                break;
            }
            k += 1;
        }
        if tail <= tol || n > 1 << 16 {
            return n;
        }
        n = (n as f64 * 1.25).ceil() as usize;
    }
}

/// Taylor coefficients of the holomorphic F with Re F on T equal to the
/// indicator of `arc` smoothed by a wrapped Gaussian of width σ, and F(0) real.
fn profile_series(mean: f64, arc: (f64, f64), sigma: f64, order: usize) -> Vec<Cx> {
    let mut c = vec![Cx::new(mean, 0.0)];
    for k in 1..=order {
        let kf = k as f64;
        let e = (Cx::from_polar(1.0, -kf * arc.0) - Cx::from_polar(1.0, -kf * arc.1)) / Cx::new(0.0, 2.0 * PI * kf);
        c.push(e * (2.0 * (-kf * kf * sigma * sigma / 2.0).exp()));
    }
    c
}

/// Settings for [`lift_step_tube_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct TubeOptions {
    pub chord: ChordOptions,
    pub push: PushOptions,
    /// Disc tolerance as a fraction of the push band.
    pub disc_share: f64,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions {
            chord: ChordOptions::default(),
            push: PushOptions::default(),
            disc_share: 0.25,
        }
    }
}

/// # Errors
/// See [`lift_step_tube_with`].
pub fn lift_step_tube(g0: &PolyMap, c0: f64, c1: f64, eps: f64, r: f64) -> Result<(PolyMap, LiftCertificate)> {
    lift_step_tube_with(g0, c0, c1, eps, r, &TubeOptions::default())
}

/// Lift for ρ_max: (i) |ρ(g) − C₁| < ε on T, (ii) ρ(g) > C₀ on r ≤ |ζ| ≤ 1,
/// (iii) |g − g0| < ε on |ζ| ≤ r, pushing with the discs through g0(ζ).
///
/// # Errors
/// C₀ < ρ(g0) < C₁ violated on the annulus grid (hypothesis "band"), a
/// node disc failure, or any push failure.
pub fn lift_step_tube_with(
    g0: &PolyMap,
    c0: f64,
    c1: f64,
    eps: f64,
    r: f64,
    opts: &TubeOptions,
) -> Result<(PolyMap, LiftCertificate)> {
    if !(eps > 0.0) || !(c0 < c1) || !(r > 0.0 && r < 1.0) || !(opts.disc_share > 0.0 && opts.disc_share < 1.0) {
        return Err(invalid(format!("bad tube lift parameters C0 = {c0}, C1 = {c1}, ε = {eps}, r = {r}")));
    }
    let ap = &opts.push.approx;
    let n = 2 * ap.verify_nodes;
    let m = 2 * ap.verify_radii - 1;
    for l in 0..m {
        let t = r + (1.0 - r) * l as f64 / (m - 1) as f64;
        for (k, w) in g0.sample_circle(t, n).iter().enumerate() {
            let v = rho_max(w);
            if !(c0 < v && v < c1) {
                return Err(Error::Hypothesis {
                    which: "band",
                    detail: format!("ρ(g0) = {v} at ζ = {} outside ({c0}, {c1})", node(k, n) * t),
                });
            }
        }
    }
    let band = opts.push.band.unwrap_or(eps / 4.0);
    let tol = opts.disc_share * band;
    let probes: Vec<ChordTriangle> = (0..n)
        .into_par_iter()
        .map(|k| disc_through_point_with(&g0.eval(node(k, n)), c0, c1, tol, &opts.chord))
        .collect::<Result<_>>()?;
    let order = probes.iter().map(ChordTriangle::order).max().unwrap_or(1);
    let kappa = probes.iter().map(|t| t.kappa).fold(0.0, f64::max);
    let fixed = ChordOptions {
        order: Some(opts.chord.order.unwrap_or(order)),
        kappa: Some(opts.chord.kappa.unwrap_or(kappa)),
        ..opts.chord.clone()
    };
    let family = |zeta: Cx| -> Result<PolyMap> {
        Ok(disc_through_point_with(&g0.eval(zeta), c0, c1, tol, &fixed)?.centered())
    };
    let mut push = opts.push.clone();
    push.band = Some(band);
    let (g, mut cert) = push_boundary(&BaseMap::Poly(g0.clone()), &family, &rho_max, c0, c1, eps, r, &push)?;
    cert.set_param("disc_order", fixed.order.unwrap_or(order) as f64);
    cert.set_param("kappa", fixed.kappa.unwrap_or(kappa));
    cert.set_param("disc_tol", tol);
    Ok((g, cert))
}
