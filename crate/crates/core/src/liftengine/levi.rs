use std::f64::consts::PI;

use super::approx::radius_ladder;
use super::cert::{Condition, LiftCertificate};
use super::family::DiscFamily;
use super::push::{push_boundary_levels, BaseMap, PushOptions};
use crate::corepoly::fourier::{circle_values, node};
use crate::corepoly::{riemann_map, taylor_truncate, BoundaryGrid, Cx, PolyMap, C2};
use crate::error::{precondition, Error, Result};
use crate::levigeom::{
    levi_chart, lifting_radius_with, rho_cone, sublevel_component_with, ConeFunction, LeviChart, RadiusOptions,
    SublevelOptions,
};

/// Settings for the Levi-disc lift.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviOptions {
    /// C(ζ) must not exceed this fraction of the node's critical threshold.
    pub threshold_margin: f64,
    /// Relative boundary tolerance of the conformal parametrizations.
    pub riemann_tol: f64,
    /// Rays traced per sublevel component.
    pub rays: usize,
    /// Initial samples on |w| = 1 for the Taylor data of each disc.
    pub disc_samples: usize,
    pub push: PushOptions,
}

impl Default for LeviOptions {
    fn default() -> Self {
        LeviOptions {
            threshold_margin: 0.95,
            riemann_tol: 1e-7,
            rays: 256,
            disc_samples: 256,
            push: PushOptions::default(),
        }
    }
}

/// Canonical disc λ : Ū → B(z; C) ⊂ Λ_z with λ(0) = 0 and λ'(0) a positive
/// multiple of the tangent (h(z₂), −h(z₁)), as a Taylor polynomial in w.
///
/// # Errors
/// Sublevel tracing or conformal certification failure, including
/// [`Error::AboveThreshold`] when C is not below the critical threshold.
pub fn levi_disc(chart: &LeviChart, level: f64, threshold: Option<f64>, opts: &LeviOptions) -> Result<PolyMap> {
    let dom = sublevel_component_with(
        chart,
        level,
        &SublevelOptions {
            rays: opts.rays,
            threshold,
        },
    )?;
    let phi = riemann_map(&dom, opts.riemann_tol)?;
    let mut pc = phi.coeffs().to_vec();
    pc[0] = chart.u0();
    let mut n = opts.disc_samples.max(16);
    loop {
        let us = circle_values(&pc, 1.0, n);
        let mut vals = Vec::with_capacity(n);
        for u in us {
            vals.push(chart.w(u).ok_or_else(|| {
                Error::Numerical("conformal parametrization leaves the quadric chart".into())
            })?);
        }
        let grid = BoundaryGrid::new(1.0, vals)?;
        let order = n / 2 - 1;
        let a = taylor_truncate(&[grid], order, 1e-6 * (1.0 + chart.base().norm()))?.remove(0);
        let scale = a[0].norm();
        let top: f64 = a[order * 3 / 4..].iter().map(|c| c.norm()).sum();
        if top > 1e-13 * scale && n < 1 << 14 {
            n *= 2;
            continue;
        }
        let rot = -(a[0].hdot(&chart.tangent())).arg();
        let mut coeffs = vec![C2::ZERO];
        for (k, c) in a.iter().enumerate() {
            coeffs.push(*c * Cx::from_polar(1.0, rot * (k + 1) as f64));
        }
        while coeffs.len() > 2 && coeffs.last().map_or(false, |c| c.norm() <= 1e-16 * scale) {
            coeffs.pop();
        }
        return PolyMap::new(coeffs);
    }
}

/// The discs λ_ζ = canonical Levi disc of ρ_c at g0(ζ) with level C(ζ).
pub struct LeviFamily<'a> {
    pub g0: &'a PolyMap,
    pub c: f64,
    pub level: &'a (dyn Fn(Cx) -> f64 + Sync),
    pub opts: &'a LeviOptions,
}

impl DiscFamily for LeviFamily<'_> {
    fn disc(&self, zeta: Cx) -> Result<PolyMap> {
        let z = self.g0.eval(zeta);
        let chart = levi_chart(self.c, z)?;
        let level = (self.level)(zeta);
        let threshold = crate::levigeom::critical_system_solve_in(
            self.c,
            z,
            &[crate::levigeom::ChartKind::Default, crate::levigeom::ChartKind::Swapped],
        )?
        .threshold();
        if level > self.opts.threshold_margin * threshold {
            return Err(Error::AboveThreshold { level, threshold });
        }
        levi_disc(&chart, level, Some(threshold), self.opts)
    }
}

/// Levi-disc lift of ρ_c: (i) |ρ(g) − ρ(g0) − C| < ε on T, (ii) ρ(g) >
/// ρ(g0) − ε on Ū, (iii) |g − g0| < ε on |ζ| ≤ r.
///
/// # Errors
/// See [`lift_step_levi_with`].
pub fn lift_step_levi(
    g0: &PolyMap,
    c: f64,
    level: &(dyn Fn(Cx) -> f64 + Sync),
    eps: f64,
    r: f64,
) -> Result<(PolyMap, LiftCertificate)> {
    lift_step_levi_with(g0, c, level, eps, r, &LeviOptions::default())
}

/// # Errors
/// c ≥ 1, C(ζ) ≤ 0 at a grid node, ρ_c with a critical point on g0(T),
/// a level above a node's threshold, or any push failure.
pub fn lift_step_levi_with(
    g0: &PolyMap,
    c: f64,
    level: &(dyn Fn(Cx) -> f64 + Sync),
    eps: f64,
    r: f64,
    opts: &LeviOptions,
) -> Result<(PolyMap, LiftCertificate)> {
    let cone = ConeFunction::new(c)?;
    cone.require_strong("lift_step_levi")?;
    let n = 2 * opts.push.approx.verify_nodes;
    if let Some(k) = (0..n).find(|&k| !(level(node(k, n)) > 0.0)) {
        return Err(precondition(
            "lift_step_levi",
            format!("C must be positive on T; C({}) = {}", node(k, n), level(node(k, n))),
        ));
    }
    check_no_critical_point(g0, c, n)?;
    let family = LeviFamily {
        g0,
        c,
        level,
        opts,
    };
    let rho = move |z: &C2| rho_cone(c, z);
    let target = |zeta: Cx| rho_cone(c, &g0.eval(zeta)) + level(zeta);
    let floor = |zeta: Cx| rho_cone(c, &g0.eval(zeta)) - eps;
    let (g, mut cert) = push_boundary_levels(
        &BaseMap::Poly(g0.clone()),
        &family,
        &rho,
        &target,
        &floor,
        eps,
        r,
        &opts.push,
    )?;
    let mut low = f64::INFINITY;
    let m = 2 * opts.push.approx.verify_radii - 1;
    for l in 0..m {
        let t = r * l as f64 / (m - 1) as f64;
        let gv = g.sample_circle(t, n);
        let gv0 = g0.sample_circle(t, n);
        for (a, b) in gv.iter().zip(&gv0) {
            low = low.min(rho_cone(c, a) - rho_cone(c, b) + eps);
        }
    }
    cert.push(Condition::above("(ii) ρ(g) − ρ(g0) + ε on |ζ| ≤ r", low, 0.0));
    cert.set_param("c", c);
    cert.set_param("threshold_margin", opts.threshold_margin);
    Ok((g, cert))
}

/// Sound check that h(g0(ζ)) ≠ 0 on T from grid values and a Lipschitz bound.
fn check_no_critical_point(g0: &PolyMap, c: f64, n: usize) -> Result<()> {
    let cone = ConeFunction::new(c)?;
    let vals = g0.sample_circle(1.0, n);
    let (k, min_h) = vals
        .iter()
        .map(|v| cone.h(v).norm())
        .enumerate()
        .fold((0, f64::INFINITY), |a, (k, v)| if v < a.1 { (k, v) } else { a });
    let lip = c.abs().max(1.0) * g0.derivative().majorant(1.0) * PI / n as f64;
    if !(min_h > lip) {
        return Err(precondition(
            "lift_step_levi",
            format!(
                "ρ_c may have a critical point on g0(T): |h(g0)| = {min_h:.3e} near ζ = {} (modulus of continuity {lip:.3e})",
                node(k, n)
            ),
        ));
    }
    Ok(())
}

/// Settings for the cone lift.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeOptions {
    /// Lifting radius a(c); None calibrates it.
    pub a: Option<f64>,
    pub radius: RadiusOptions,
    pub levi: LeviOptions,
}

impl Default for ConeOptions {
    fn default() -> Self {
        ConeOptions {
            a: None,
            radius: RadiusOptions::default(),
            levi: LeviOptions::default(),
        }
    }
}

/// Cone lift with C(ζ) = a·ρ_c(h(ζ)): (i) m(g) ≥ (1 + a)m(h) − ε, (ii)
/// ρ_c(g) > ρ_c(h) − ε on Ū, (iii) |g − h| < ε on |ζ| ≤ r.
///
/// # Errors
/// See [`lift_step_cone_with`].
pub fn lift_step_cone(h: &PolyMap, c: f64, eps: f64, r: f64) -> Result<(PolyMap, LiftCertificate)> {
    lift_step_cone_with(h, c, eps, r, &ConeOptions::default())
}

/// Minimum of ρ_c∘f over the n nodes of T.
pub fn boundary_min(f: &PolyMap, c: f64, n: usize) -> f64 {
    f.sample_circle(1.0, n)
        .iter()
        .map(|v| rho_cone(c, v))
        .fold(f64::INFINITY, f64::min)
}

/// # Errors
/// m(h) ≤ 0, c ≥ 1, a non-positive a, or any delegate error.
pub fn lift_step_cone_with(
    h: &PolyMap,
    c: f64,
    eps: f64,
    r: f64,
    opts: &ConeOptions,
) -> Result<(PolyMap, LiftCertificate)> {
    ConeFunction::new(c)?.require_strong("lift_step_cone")?;
    let n = 2 * opts.levi.push.approx.verify_nodes;
    let m_h = boundary_min(h, c, n);
    if !(m_h > 0.0) {
        return Err(precondition("lift_step_cone", format!("needs m(h) > 0, got {m_h}")));
    }
    let a = match opts.a {
        Some(a) => a,
        None => lifting_radius_with(c, &opts.radius)?.value,
    };
    if !(a > 0.0) || !a.is_finite() {
        return Err(precondition("lift_step_cone", format!("lifting radius {a} must be positive")));
    }
    let level = move |zeta: Cx| a * rho_cone(c, &h.eval(zeta));
    let (g, mut cert) = lift_step_levi_with(h, c, &level, eps, r, &opts.levi)?;
    let m_g = boundary_min(&g, c, n);
    cert.push(Condition::above("cone (i) m(g) vs (1 + a)m(h) − ε", m_g, (1.0 + a) * m_h - eps));
    let mut low = f64::INFINITY;
    let rl = opts.levi.push.approx.verify_radii;
    let inner: Vec<f64> = (0..rl).map(|l| r * l as f64 / (rl - 1) as f64).collect();
    for t in inner.into_iter().chain(radius_ladder(r, 2 * rl - 1)) {
        let gv = g.sample_circle(t, n);
        let hv = h.sample_circle(t, n);
        for (x, y) in gv.iter().zip(&hv) {
            low = low.min(rho_cone(c, x) - rho_cone(c, y) + eps);
        }
    }
    cert.push(Condition::above("cone (ii) ρ(g) − ρ(h) + ε on Ū", low, 0.0));
    cert.push(Condition::below("cone (iii) sup |g − h| on |ζ| ≤ r", (&g - h).majorant(r), eps));
    cert.set_param("a", a);
    cert.set_param("m_h", m_h);
    cert.set_param("m_g", m_g);
    Ok((g, cert))
}
