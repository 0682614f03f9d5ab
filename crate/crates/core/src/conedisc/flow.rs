use rayon::prelude::*;

use crate::corepoly::{BoundaryGrid, Cx, C2};
use crate::error::{invalid, Error, Result};
use crate::levigeom::{rho_cone, ConeFunction};

/// Time-t gradient flow of ρ_c: x ↦ x·e^{2t}, y ↦ y·e^{−2ct}.
pub fn flow(c: f64, z: &C2, t: f64) -> C2 {
    let gx = (2.0 * t).exp();
    let gy = (-2.0 * c * t).exp();
    let f = |w: Cx| Cx::new(w.re * gx, w.im * gy);
    C2::new(f(z.z1), f(z.z2))
}

/// Smootherstep profile: 0 on [0, r], 1 at 1, C² in between.
pub fn bump_profile(t: f64, r: f64) -> f64 {
    if t <= r {
        return 0.0;
    }
    let x = ((t - r) / (1.0 - r)).min(1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

/// Settings for [`cross_critical_level`].
#[derive(Clone, Debug, PartialEq)]
pub struct CrossOptions {
    /// Smallest admissible |Re f0| on the boundary grid.
    pub clearance: f64,
    /// Relative overshoot of the level reached at each boundary node.
    pub overshoot: f64,
}

impl Default for CrossOptions {
    fn default() -> Self {
        CrossOptions {
            clearance: 1e-6,
            overshoot: 1e-6,
        }
    }
}

/// Flow schedule a(ζ) = τ(θ)·s(|ζ|) and the non-holomorphic defect it causes.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowParams {
    pub c: f64,
    pub inner_radius: f64,
    /// Flow time τ_k at each boundary node.
    pub node_times: Vec<f64>,
    /// a(ζ) on the polar grid, one row per radius.
    pub schedule: Vec<Vec<f64>>,
    /// Max of the centered-difference ∂̄ of f1 over interior rings.
    pub defect_norm: f64,
    /// Same quantity for f0 (discretization floor).
    pub base_defect: f64,
    /// min ρ_c(f1) over the boundary nodes.
    pub boundary_min: f64,
}

impl FlowParams {
    /// a at radius t on node k.
    pub fn schedule_at(&self, t: f64, k: usize) -> f64 {
        self.node_times[k] * bump_profile(t, self.inner_radius)
    }
}

fn check_polar(f: &[BoundaryGrid<C2>]) -> Result<usize> {
    let last = f.last().ok_or_else(|| invalid("empty polar grid"))?;
    if last.radius() != 1.0 {
        return Err(invalid(format!("outermost ring has radius {}, need 1", last.radius())));
    }
    let n = last.n_theta();
    if f.iter().any(|g| g.n_theta() != n) {
        return Err(invalid("rings with different node counts"));
    }
    if f.windows(2).any(|w| !(w[0].radius() < w[1].radius())) || !(f[0].radius() >= 0.0) {
        return Err(invalid("ring radii must increase from a nonnegative value"));
    }
    if f.iter().flat_map(|g| g.values()).any(|v| !v.is_finite()) {
        return Err(invalid("non-finite sample"));
    }
    Ok(n)
}

/// f1(ζ) = flow(c, f0(ζ), τ_k·s(|ζ|)) on a polar grid; rings with
/// |ζ| ≤ r are copied unchanged.
///
/// # Errors
/// Malformed grid, one time per boundary node required, r outside [0, 1).
pub fn apply_schedule(
    f0: &[BoundaryGrid<C2>],
    c: f64,
    node_times: &[f64],
    r: f64,
) -> Result<Vec<BoundaryGrid<C2>>> {
    let n = check_polar(f0)?;
    if node_times.len() != n || node_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(invalid("need one finite nonnegative flow time per node"));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(invalid(format!("inner radius {r} outside [0, 1)")));
    }
    f0.iter()
        .map(|ring| {
            let t = ring.radius();
            if t <= r {
                return Ok(ring.clone());
            }
            let s = bump_profile(t, r);
            let vals = ring
                .values()
                .iter()
                .zip(node_times)
                .map(|(z, tau)| flow(c, z, tau * s))
                .collect();
            BoundaryGrid::new(t, vals)
        })
        .collect()
}

/// Centered-difference ∂̄ of a polar grid, max over rings with two neighbours.
pub fn dbar_defect(f: &[BoundaryGrid<C2>]) -> f64 {
    let mut worst = 0.0f64;
    for l in 1..f.len().saturating_sub(1) {
        let (a, b, c) = (&f[l - 1], &f[l], &f[l + 1]);
        let t = b.radius();
        if t <= 0.0 {
            continue;
        }
        let (h0, h1) = (t - a.radius(), c.radius() - t);
        let n = b.n_theta();
        let dth = 2.0 * std::f64::consts::PI / n as f64;
        for k in 0..n {
            let fr = (c.values()[k] - b.values()[k]) * (h0 / (h1 * (h0 + h1)))
                + (b.values()[k] - a.values()[k]) * (h1 / (h0 * (h0 + h1)));
            let fth = (b.values()[(k + 1) % n] - b.values()[(k + n - 1) % n]) / (2.0 * dth);
            let e = b.node(k) / t;
            let d = (fr + fth * Cx::new(0.0, 1.0 / t)) * (e * 0.5);
            worst = worst.max(d.norm());
        }
    }
    worst
}

/// Pushes the boundary of a sampled disc across the level M′ along the
/// gradient flow of ρ_c, leaving |ζ| ≤ r untouched.
///
/// # Errors
/// A boundary node within the clearance of {Re z = 0} (reported as
/// hypothesis "clearance"), M′ ≤ 0, r outside [0, 1), or a malformed grid.
pub fn cross_critical_level(
    f0: &[BoundaryGrid<C2>],
    c: f64,
    target: f64,
    r: f64,
    opts: &CrossOptions,
) -> Result<(Vec<BoundaryGrid<C2>>, FlowParams)> {
    ConeFunction::new(c)?;
    check_polar(f0)?;
    if !(target > 0.0) || !target.is_finite() {
        return Err(invalid(format!("target level {target} must be positive")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(invalid(format!("inner radius {r} outside [0, 1)")));
    }
    let boundary = f0.last().expect("checked");
    for (k, z) in boundary.values().iter().enumerate() {
        let x = z.re();
        let d = x[0].hypot(x[1]);
        if !(d > opts.clearance) {
            return Err(Error::Hypothesis {
                which: "clearance",
                detail: format!(
                    "|Re f0| = {d:.3e} at node {k} (ζ = {}) meets the stable manifold",
                    boundary.node(k)
                ),
            });
        }
    }
    let goal = target * (1.0 + opts.overshoot);
    let times: Vec<f64> = boundary.values().par_iter().map(|z| crossing_time(c, z, goal)).collect();
    let f1 = apply_schedule(f0, c, &times, r)?;
    let schedule = f0
        .iter()
        .map(|g| times.iter().map(|tau| tau * bump_profile(g.radius(), r)).collect())
        .collect();
    let boundary_min = f1
        .last()
        .expect("checked")
        .values()
        .iter()
        .map(|z| rho_cone(c, z))
        .fold(f64::INFINITY, f64::min);
    let params = FlowParams {
        c,
        inner_radius: r,
        node_times: times,
        schedule,
        defect_norm: dbar_defect(&f1),
        base_defect: dbar_defect(f0),
        boundary_min,
    };
    Ok((f1, params))
}

/// Smallest t ≥ 0 (to bisection accuracy, rounded up) with ρ_c(flow(z, t)) ≥ goal.
fn crossing_time(c: f64, z: &C2, goal: f64) -> f64 {
    let rho = |t: f64| rho_cone(c, &flow(c, z, t));
    if rho(0.0) >= goal {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while rho(hi) < goal {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(mid) >= goal {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
