use super::approx::{approx_disc_family_with, check_grid_options, radius_ladder, ApproxOptions};
use super::cert::{Condition, LiftCertificate};
use super::family::{CachedFamily, DiscFamily};
use crate::corepoly::fourier::{dft_coeffs, node};
use crate::corepoly::{BoundaryGrid, Cx, PolyMap, C2};
use crate::error::{invalid, precondition, Error, Result};

/// The map whose boundary is pushed: a polynomial, or boundary samples of
/// a map holomorphic in U (values at the n nodes of T).
#[derive(Clone, Debug, PartialEq)]
pub enum BaseMap {
    Poly(PolyMap),
    Sampled(BoundaryGrid<C2>),
}

impl BaseMap {
    /// Polynomial g̃0 and a bound for sup_Ū |g̃0 − g0| (relative to the
    /// trigonometric interpolant for sampled maps). Polynomials are kept.
    ///
    /// # Errors
    /// Samples not on the unit circle, or a negative-frequency part larger
    /// than `tol` (the samples are not boundary values of a holomorphic map).
    pub fn polynomial(&self, tol: f64) -> Result<(PolyMap, f64)> {
        match self {
            BaseMap::Poly(p) => Ok((p.clone(), 0.0)),
            BaseMap::Sampled(g) => {
                if g.radius() != 1.0 {
                    return Err(invalid("sampled base map must be given on the unit circle"));
                }
                let n = g.n_theta();
                let a = dft_coeffs(&g.values().iter().map(|v| v.z1).collect::<Vec<_>>());
                let b = dft_coeffs(&g.values().iter().map(|v| v.z2).collect::<Vec<_>>());
                let c: Vec<C2> = a.into_iter().zip(b).map(|(x, y)| C2::new(x, y)).collect();
                let half = n / 2;
                let neg: f64 = c[half..].iter().map(|v| v.norm()).sum();
                if neg > tol {
                    return Err(Error::Hypothesis {
                        which: "holomorphic base map",
                        detail: format!("negative-frequency mass {neg:.3e} exceeds {tol:.3e}"),
                    });
                }
                let mut deg = half.saturating_sub(1);
                let mut tail = 0.0;
                while deg > 0 && neg + tail + c[deg].norm() <= tol {
                    tail += c[deg].norm();
                    deg -= 1;
                }
                Ok((PolyMap::new(c[..=deg].to_vec())?, neg + tail))
            }
        }
    }
}

impl From<PolyMap> for BaseMap {
    fn from(p: PolyMap) -> Self {
        BaseMap::Poly(p)
    }
}

/// Grids and tolerances for [`push_boundary_levels`].
#[derive(Clone, Debug, PartialEq)]
pub struct PushOptions {
    /// Declared band for |ρ(g0 + λ) − C1| on T × T; None means ε/4.
    pub band: Option<f64>,
    /// Nodes on |w| = 1 for the hypothesis checks.
    pub w_nodes: usize,
    /// Radii in 0 ≤ |w| ≤ 1 for hypothesis (b).
    pub w_radii: usize,
    /// Halvings of the approximation tolerance tried before giving up.
    pub retries: usize,
    pub approx: ApproxOptions,
}

impl Default for PushOptions {
    fn default() -> Self {
        PushOptions {
            band: None,
            w_nodes: 64,
            w_radii: 8,
            retries: 4,
            approx: ApproxOptions::default(),
        }
    }
}

/// Level function on T (target) or Ū (floor).
pub type LevelFn<'a> = &'a (dyn Fn(Cx) -> f64 + Sync);
/// Target function ρ.
pub type RhoFn<'a> = &'a (dyn Fn(&C2) -> f64 + Sync);

/// Constant levels C0 < C1.
///
/// # Errors
/// See [`push_boundary_levels`].
#[allow(clippy::too_many_arguments)]
pub fn push_boundary(
    g0: &BaseMap,
    family: &dyn DiscFamily,
    rho: RhoFn<'_>,
    c0: f64,
    c1: f64,
    eps: f64,
    r: f64,
    opts: &PushOptions,
) -> Result<(PolyMap, LiftCertificate)> {
    if !(c0 < c1) {
        return Err(precondition("push_boundary", format!("needs C0 < C1, got {c0} ≥ {c1}")));
    }
    let mut out = push_boundary_levels(g0, family, rho, &|_| c1, &|_| c0, eps, r, opts)?;
    out.1.set_param("C0", c0);
    out.1.set_param("C1", c1);
    Ok(out)
}

/// g = g̃0 + h with h from the disc family approximation. Hypotheses
/// (a) |ρ(g0(ζ) + λ(ζ, w)) − C1(ζ)| ≤ band on T × T, (b) ρ(g0(ζ) + λ(ζ, w))
/// > C0(ζ) on T × Ū, (c) ρ(g0) > C0 on r ≤ |ζ| ≤ 1 are checked first; the
/// certificate covers (i) |ρ(g) − C1| < ε on T, (ii) ρ(g) > C0 on
/// r ≤ |ζ| ≤ 1, (iii) |g − g0| < ε on |ζ| ≤ r.
///
/// # Errors
/// Bad parameters, a failed hypothesis ([`Error::Hypothesis`]), or a
/// family failure. A map whose conclusions fail is returned with a failing
/// certificate.
#[allow(clippy::too_many_arguments)]
pub fn push_boundary_levels(
    g0: &BaseMap,
    family: &dyn DiscFamily,
    rho: RhoFn<'_>,
    target: LevelFn<'_>,
    floor: LevelFn<'_>,
    eps: f64,
    r: f64,
    opts: &PushOptions,
) -> Result<(PolyMap, LiftCertificate)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(precondition("push_boundary", format!("needs ε > 0, got {eps}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(precondition("push_boundary", format!("needs 0 < r < 1, got {r}")));
    }
    let band = opts.band.unwrap_or(eps / 4.0);
    if !(band >= 0.0 && band < eps) {
        return Err(precondition("push_boundary", format!("band {band} must lie in [0, ε)")));
    }
    if opts.w_nodes < 2 || opts.w_radii < 1 {
        return Err(precondition("push_boundary", "hypothesis grids too small"));
    }
    check_grid_options(&opts.approx)?;
    let (g0t, g0_err) = g0.polynomial(eps / 2.0)?;
    let cache = CachedFamily::new(family);
    let mut cert = LiftCertificate {
        grid_nodes: vec![opts.approx.verify_nodes, 2 * opts.approx.verify_nodes],
        grid_radii: opts.approx.verify_radii,
        ..Default::default()
    };
    for c in check_hypotheses(&g0t, &cache, rho, target, floor, band, r, opts)? {
        cert.push(c);
    }
    let mut eps_h = (eps / 2.0).min(eps - g0_err);
    let mut best: Option<(PolyMap, LiftCertificate)> = None;
    for attempt in 0..=opts.retries {
        let (h, hcert) = approx_disc_family_with(&cache, eps_h, r, &opts.approx)?;
        let g = &g0t + &h;
        let mut c = cert.clone();
        for cond in conclusions(&g, &h, g0_err, rho, target, floor, eps, r, &opts.approx) {
            c.push(cond);
        }
        c.params = hcert.params.clone();
        c.set_param("eps", eps);
        c.set_param("r", r);
        c.set_param("band", band);
        c.set_param("eps_h", eps_h);
        c.set_param("g0_error", g0_err);
        c.set_param("degree", g.degree() as f64);
        c.notes.extend(hcert.notes.iter().cloned());
        c.notes.extend(hcert.conditions.iter().map(|x| format!("approx {x}")));
        if c.pass() {
            return Ok((g, c));
        }
        c.notes.push(format!("attempt {attempt} with ε_h = {eps_h:.3e} failed"));
        let budget_hit = !hcert.pass();
        best = Some((g, c));
        if budget_hit {
            break;
        }
        eps_h /= 2.0;
    }
    Ok(best.expect("at least one attempt"))
}

#[allow(clippy::too_many_arguments)]
fn check_hypotheses(
    g0: &PolyMap,
    cache: &CachedFamily<'_>,
    rho: RhoFn<'_>,
    target: LevelFn<'_>,
    floor: LevelFn<'_>,
    band: f64,
    r: f64,
    opts: &PushOptions,
) -> Result<Vec<Condition>> {
    let n = opts.approx.verify_nodes;
    let discs = cache.discs_on(n)?;
    let base = g0.sample_circle(1.0, n);
    let wn = opts.w_nodes;
    let mut worst_a: (f64, usize) = (0.0, 0);
    let mut worst_b: (f64, usize) = (f64::INFINITY, 0);
    for (i, d) in discs.iter().enumerate() {
        let zeta = node(i, n);
        let c1 = target(zeta);
        let c0 = floor(zeta);
        for v in d.sample_circle(1.0, wn) {
            let e = (rho(&(base[i] + v)) - c1).abs();
            if !(e <= worst_a.0) {
                worst_a = (e, i);
            }
        }
        for l in 0..=opts.w_radii {
            let s = l as f64 / opts.w_radii as f64;
            let vals = if l == 0 { vec![C2::ZERO] } else { d.sample_circle(s, wn) };
            for v in vals {
                let m = rho(&(base[i] + v)) - c0;
                if !(m >= worst_b.0) {
                    worst_b = (m, i);
                }
            }
        }
    }
    let a = Condition::below("(a) |ρ(g0 + λ) − C1| on T × T", worst_a.0, band + f64::EPSILON * (1.0 + band));
    if !a.pass {
        return Err(Error::Hypothesis {
            which: "(a)",
            detail: format!("|ρ(g0 + λ) − C1| = {:.3e} > band {band:.3e} at ζ = {}", worst_a.0, node(worst_a.1, n)),
        });
    }
    let b = Condition::above("(b) ρ(g0 + λ) − C0 on T × Ū", worst_b.0, 0.0);
    if !b.pass {
        return Err(Error::Hypothesis {
            which: "(b)",
            detail: format!("ρ(g0 + λ) − C0 = {:.3e} at ζ = {}", worst_b.0, node(worst_b.1, n)),
        });
    }
    let mut worst_c: (f64, Cx) = (f64::INFINITY, Cx::new(1.0, 0.0));
    for t in radius_ladder(r, opts.approx.verify_radii) {
        for (i, v) in g0.sample_circle(t, n).iter().enumerate() {
            let z = node(i, n) * t;
            let m = rho(v) - floor(z);
            if !(m >= worst_c.0) {
                worst_c = (m, z);
            }
        }
    }
    let c = Condition::above("(c) ρ(g0) − C0 on r ≤ |ζ| ≤ 1", worst_c.0, 0.0);
    if !c.pass {
        return Err(Error::Hypothesis {
            which: "(c)",
            detail: format!("ρ(g0) − C0 = {:.3e} at ζ = {}", worst_c.0, worst_c.1),
        });
    }
    Ok(vec![a, b, c])
}

#[allow(clippy::too_many_arguments)]
fn conclusions(
    g: &PolyMap,
    h: &PolyMap,
    g0_err: f64,
    rho: RhoFn<'_>,
    target: LevelFn<'_>,
    floor: LevelFn<'_>,
    eps: f64,
    r: f64,
    opts: &ApproxOptions,
) -> Vec<Condition> {
    let n = 2 * opts.verify_nodes;
    let on_t = g.sample_circle(1.0, n);
    let dev = on_t
        .iter()
        .enumerate()
        .map(|(i, v)| (rho(v) - target(node(i, n))).abs())
        .fold(0.0, f64::max);
    let mut low = f64::INFINITY;
    for t in radius_ladder(r, 2 * opts.verify_radii - 1) {
        for (i, v) in g.sample_circle(t, n).iter().enumerate() {
            low = low.min(rho(v) - floor(node(i, n) * t));
        }
    }
    vec![
        Condition::below("(i) |ρ(g) − C1| on T", dev, eps),
        Condition::above("(ii) ρ(g) − C0 on r ≤ |ζ| ≤ 1", low, 0.0),
        Condition::below("(iii) sup |g − g0| on |ζ| ≤ r", g0_err + h.majorant(r), eps),
    ]
}
