use std::f64::consts::PI;

use rayon::prelude::*;

use crate::corepoly::{Cx, PlanarDomain, C2};
use crate::error::{invalid, precondition, Result};
use crate::liftengine::{Condition, LiftCertificate};

/// max(Re z₁, Re z₂).
pub fn rho_max(z: &C2) -> f64 {
    z.z1.re.max(z.z2.re)
}

/// F_ε(x₁, x₂) = x₁ + x₂ − ε(x₁² + x₂²) − 1 + ε; γ_ε is its zero set in co(k).
pub fn model_f(eps: f64, x1: f64, x2: f64) -> f64 {
    x1 + x2 - eps * (x1 * x1 + x2 * x2) - 1.0 + eps
}

/// G_ε(x₁, y₁, x₂): the real equation left after eliminating y₂.
pub fn model_g(eps: f64, x1: f64, y1: f64, x2: f64) -> f64 {
    let q = (1.0 - 2.0 * eps * x1) / (1.0 - 2.0 * eps * x2);
    x1 + x2 - eps * (x1 * x1 + x2 * x2) + eps * y1 * y1 * (1.0 + q * q) - 1.0 + eps
}

/// ∂G_ε/∂x₂.
pub fn model_g_dx2(eps: f64, x1: f64, y1: f64, x2: f64) -> f64 {
    let a = 1.0 - 2.0 * eps * x1;
    let b = 1.0 - 2.0 * eps * x2;
    1.0 - 2.0 * eps * x2 + 4.0 * eps * eps * y1 * y1 * a * a / (b * b * b)
}

/// y₂ = −y₁(1 − 2εx₁)/(1 − 2εx₂).
pub fn model_y2(eps: f64, x1: f64, y1: f64, x2: f64) -> f64 {
    -y1 * (1.0 - 2.0 * eps * x1) / (1.0 - 2.0 * eps * x2)
}

/// Residuals of the two real equations cutting out Γ_ε, as a max norm.
pub fn model_residual(eps: f64, z: &C2) -> f64 {
    let (x1, y1, x2, y2) = (z.z1.re, z.z1.im, z.z2.re, z.z2.im);
    let r1 = x1 + x2 - eps * (x1 * x1 + x2 * x2) + eps * (y1 * y1 + y2 * y2) - 1.0 + eps;
    let r2 = (1.0 - 2.0 * eps * x1) * y1 + (1.0 - 2.0 * eps * x2) * y2;
    r1.abs().max(r2.abs())
}

/// a_ε with 2εa² = 1 − ε.
pub fn a_eps(eps: f64) -> f64 {
    ((1.0 - eps) / (2.0 * eps)).sqrt()
}

/// h_ε(x₁): the graph γ_ε = {x₂ = h_ε(x₁)}, from the quadratic in x₂.
pub fn h_eps(eps: f64, x1: f64) -> f64 {
    let c = 1.0 - eps - x1 + eps * x1 * x1;
    2.0 * c / (1.0 + (1.0 - 4.0 * eps * c).sqrt())
}

/// z₂ = f_ε(z₁): the holomorphic branch of z₁ + z₂ − ε(z₁² + z₂²) = 1 − ε
/// with f_ε(1) = 0.
pub fn graph_eps(eps: f64, z1: Cx) -> Cx {
    let c = Cx::new(1.0 - eps, 0.0) - z1 + z1 * z1 * eps;
    c * 2.0 / (Cx::new(1.0, 0.0) + (Cx::new(1.0, 0.0) - c * (4.0 * eps)).sqrt())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid(format!("ε = {eps} outside (0, 1/2)")));
    }
    Ok(())
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f(lo) ≤ 0 ≤ f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// x₁ = g_ε(y₁) on σ_ε for |y₁| ≤ a_ε.
///
/// # Errors
/// ε outside (0, 1/2) or |y₁| > a_ε.
pub fn sigma_eps(eps: f64, y1: f64) -> Result<f64> {
    check_eps(eps)?;
    let a = a_eps(eps);
    if y1.abs() > a * (1.0 + 1e-15) {
        return Err(invalid(format!("|y₁| = {} exceeds a_ε = {a}", y1.abs())));
    }
    if y1.abs() >= a {
        return Ok(0.0);
    }
    Ok(bisect(0.0, 1.0, |x| model_g(eps, x, y1, 0.0)))
}

/// ξ_ε(x₁, y₁): the root x₂ ∈ [0, 1] of G_ε(x₁, y₁, ·) for x₁ + iy₁ ∈ D̄_ε.
///
/// # Errors
/// ∂G_ε/∂x₂ not positive at the bracket ends (ε inadmissible), or no sign
/// change on [0, 1].
pub fn xi_eps(eps: f64, x1: f64, y1: f64) -> Result<f64> {
    check_eps(eps)?;
    for x2 in [0.0, 1.0] {
        if !(model_g_dx2(eps, x1, y1, x2) > 0.0) {
            return Err(precondition(
                "model_disc",
                format!("ε = {eps} inadmissible: ∂G/∂x₂ ≤ 0 at ({x1}, {y1}, {x2})"),
            ));
        }
    }
    let g0 = model_g(eps, x1, y1, 0.0);
    let g1 = model_g(eps, x1, y1, 1.0);
    if g0 >= 0.0 {
        if g0 <= 1e-13 {
            return Ok(0.0);
        }
        return Err(precondition("model_disc", format!("no root on [0, 1] at ({x1}, {y1}): G(0) = {g0}")));
    }
    if g1 < 0.0 {
        if g1 >= -1e-13 {
            return Ok(1.0);
        }
        return Err(precondition("model_disc", format!("no root on [0, 1] at ({x1}, {y1}): G(1) = {g1}")));
    }
    Ok(bisect(0.0, 1.0, |x2| model_g(eps, x1, y1, x2)))
}

/// The point of Γ_ε over z₁ = x₁ + iy₁ ∈ D̄_ε.
///
/// # Errors
/// See [`xi_eps`].
pub fn model_point(eps: f64, z1: Cx) -> Result<C2> {
    let x2 = xi_eps(eps, z1.re, z1.im)?;
    Ok(C2::new(z1, Cx::new(x2, model_y2(eps, z1.re, z1.im, x2))))
}

/// Distance from a real point to k = [0,1]×{0} ∪ {0}×[0,1].
pub fn dist_to_k(x: [f64; 2]) -> f64 {
    let leg = |a: f64, b: f64| (a - a.clamp(0.0, 1.0)).hypot(b);
    leg(x[0], x[1]).min(leg(x[1], x[0]))
}

/// Sample counts for [`model_disc`].
#[derive(Clone, Debug, PartialEq)]
pub struct ModelOptions {
    pub boundary_samples: usize,
    /// Interior samples as rings × rays.
    pub rings: usize,
    pub rays: usize,
    pub curve_samples: usize,
    /// Vertices per side of the polygon for D_ε.
    pub domain_vertices: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            boundary_samples: 512,
            rings: 16,
            rays: 32,
            curve_samples: 257,
            domain_vertices: 512,
        }
    }
}

/// The disc Γ_ε as a graph over D_ε, with its certification checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelDisc {
    pub eps: f64,
    pub a_eps: f64,
    /// (x₁, h_ε(x₁)) on [0, 1].
    pub curve: Vec<(f64, f64)>,
    pub domain: PlanarDomain,
    /// Points of bΓ_ε over bD_ε.
    pub boundary: Vec<C2>,
    /// Points of Γ_ε over interior points of D_ε.
    pub interior: Vec<C2>,
    pub certificate: LiftCertificate,
}

impl ModelDisc {
    pub fn max_residual(&self) -> f64 {
        self.boundary
            .iter()
            .chain(&self.interior)
            .map(|z| model_residual(self.eps, z))
            .fold(0.0, f64::max)
    }
}

/// # Errors
/// See [`model_disc_with`].
pub fn model_disc(eps: f64) -> Result<ModelDisc> {
    model_disc_with(eps, &ModelOptions::default())
}

/// Traces σ_ε and D_ε, solves ξ_ε on boundary and interior samples, and
/// certifies the graph residual, boundary containment in K_ε, the real
/// trace and holomorphy of the graph.
///
/// # Errors
/// ε outside (0, 1/2), too few samples, or a failed root solve.
pub fn model_disc_with(eps: f64, opts: &ModelOptions) -> Result<ModelDisc> {
    check_eps(eps)?;
    if opts.boundary_samples < 4 || opts.rings < 1 || opts.rays < 3 || opts.curve_samples < 2 || opts.domain_vertices < 3 {
        return Err(invalid("too few model samples"));
    }
    let a = a_eps(eps);
    let curve: Vec<(f64, f64)> = (0..opts.curve_samples)
        .map(|k| {
            let x1 = k as f64 / (opts.curve_samples - 1) as f64;
            (x1, h_eps(eps, x1))
        })
        .collect();

    // Positively oriented: up along σ_ε, then down the segment x₁ = 0.
    let nv = opts.domain_vertices;
    let mut poly = Vec::with_capacity(2 * nv);
    for k in 0..nv {
        let y1 = -a * (PI * k as f64 / nv as f64).cos();
        poly.push(Cx::new(sigma_eps(eps, y1)?, y1));
    }
    for k in 0..nv {
        let y1 = a * (1.0 - 2.0 * k as f64 / nv as f64);
        poly.push(Cx::new(0.0, y1));
    }
    let center = Cx::new(0.5 * sigma_eps(eps, 0.0)?, 0.0);
    let domain = PlanarDomain::new(poly, center)?;

    let nb = opts.boundary_samples;
    let half = nb / 2;
    let mut bpts = Vec::with_capacity(nb);
    for k in 0..half {
        let y1 = -a * (PI * (k as f64 + 0.5) / half as f64).cos();
        bpts.push(Cx::new(sigma_eps(eps, y1)?, y1));
    }
    for k in 0..nb - half {
        let y1 = a * (1.0 - 2.0 * (k as f64 + 0.5) / (nb - half) as f64);
        bpts.push(Cx::new(0.0, y1));
    }
    let boundary = bpts
        .par_iter()
        .map(|z1| model_point(eps, *z1))
        .collect::<Result<Vec<_>>>()?;

    let xmax = sigma_eps(eps, 0.0)?;
    let mut ipts = Vec::with_capacity(opts.rings * opts.rays);
    for i in 0..opts.rings {
        let s = (i as f64 + 0.5) / opts.rings as f64;
        for j in 0..opts.rays {
            let t = (j as f64 + 0.5) / opts.rays as f64;
            let y1 = a * (2.0 * t - 1.0) * 0.999;
            let x1 = s * sigma_eps(eps, y1)?;
            ipts.push(Cx::new(x1, y1));
        }
    }
    let interior = ipts
        .par_iter()
        .map(|z1| model_point(eps, *z1))
        .collect::<Result<Vec<_>>>()?;

    let mut cert = LiftCertificate {
        grid_nodes: vec![nb, opts.rings * opts.rays],
        grid_radii: opts.rings,
        ..Default::default()
    };
    let res = boundary
        .iter()
        .chain(&interior)
        .map(|z| model_residual(eps, z))
        .fold(0.0, f64::max);
    cert.push(Condition::below("graph residual", res, 1e-9));
    let on_k = boundary.iter().map(|z| dist_to_k(z.re())).fold(0.0, f64::max);
    cert.push(Condition::below("boundary x-part distance to k", on_k, 1e-8));
    let ymax = boundary
        .iter()
        .map(|z| z.z1.im * z.z1.im + z.z2.im * z.z2.im)
        .fold(0.0, f64::max);
    cert.push(Condition::below("boundary |y|² − 1/ε", ymax - 1.0 / eps, 1e-8));
    let mut trace = 0.0f64;
    for &(x1, h) in &curve {
        let xi = xi_eps(eps, x1.min(xmax), 0.0)?;
        trace = trace.max((xi - h).abs());
    }
    cert.push(Condition::below("real trace vs γ_ε", trace, 1e-9));
    let holo = boundary
        .iter()
        .chain(&interior)
        .map(|z| (z.z2 - graph_eps(eps, z.z1)).norm())
        .fold(0.0, f64::max);
    cert.push(Condition::below("graph vs holomorphic branch", holo, 1e-9));
    cert.set_param("eps", eps);
    cert.set_param("a_eps", a);
    Ok(ModelDisc {
        eps,
        a_eps: a,
        curve,
        domain,
        boundary,
        interior,
        certificate: cert,
    })
}

/// Largest ε on the grid ε_j = j·step < 1/2 whose model disc certifies.
pub fn largest_admissible_eps(step: f64, opts: &ModelOptions) -> Option<f64> {
    if !(step > 0.0 && step < 0.5) {
        return None;
    }
    let n = (0.5 / step).ceil() as usize;
    (1..n)
        .rev()
        .map(|j| j as f64 * step)
        .filter(|e| *e < 0.5)
        .find(|e| model_disc_with(*e, opts).map_or(false, |m| m.certificate.pass()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_max_values() {
        let z = C2::new(Cx::new(0.3, 2.0), Cx::new(-1.0, 0.0));
        assert_eq!(rho_max(&z), 0.3);
        assert_eq!(rho_max(&C2::ZERO), 0.0);
        assert_eq!(rho_max(&z.swap()), rho_max(&z));
    }

    #[test]
    fn xi_endpoints() {
        for eps in [0.01, 0.1, 0.3] {
            assert!(xi_eps(eps, 1.0, 0.0).unwrap().abs() < 1e-10);
            assert!((xi_eps(eps, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn h_eps_increases_to_the_hypotenuse() {
        let h = h_eps(0.01, 0.5);
        assert!(h > 0.49 && h < 0.5);
        assert!(h_eps(0.001, 0.5) > h);
        assert!(h_eps(0.1, 0.5) < h);
        assert!(model_f(0.01, 0.5, h).abs() < 1e-15);
    }

    #[test]
    fn a_eps_solves_its_equation() {
        let a = a_eps(0.1);
        assert!((model_g(0.1, 0.0, a, 0.0)).abs() < 1e-14);
        assert!((2.0 * 0.1 * a * a - 1.0 + 0.1).abs() < 1e-14);
    }

    #[test]
    fn model_disc_certifies() {
        let m = model_disc(0.1).unwrap();
        assert!(m.certificate.pass(), "{}", m.certificate);
        assert_eq!(m.boundary.len(), 512);
        assert_eq!(m.interior.len(), 512);
        assert!(m.max_residual() <= 1e-9);
    }

    #[test]
    fn dist_to_k_cases() {
        assert_eq!(dist_to_k([0.5, 0.0]), 0.0);
        assert_eq!(dist_to_k([0.0, 0.7]), 0.0);
        assert!((dist_to_k([0.5, 0.5]) - 0.5).abs() < 1e-15);
        assert!((dist_to_k([1.5, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bad_eps_rejected() {
        assert!(model_disc(0.5).is_err());
        assert!(model_disc(0.0).is_err());
        assert!(xi_eps(0.1, 1.5, 0.0).is_err());
    }
}
