use std::f64::consts::{PI, TAU};
use std::fmt;

use super::chord::{lift_step_tube_with, TubeOptions};
use super::exp::{exponentiate, ExpDisc};
use super::model::rho_max;
use crate::conedisc::Stage;
use crate::corepoly::fourier::dft_coeffs;
use crate::corepoly::{deflate, poly_roots, Cx, PolyMap, C2};
use crate::error::{invalid, precondition, Error, Result};
use crate::liftengine::{Condition, LiftCertificate};

/// Components with the zeros inside |ζ| < r divided out.
#[derive(Clone, Debug, PartialEq)]
pub struct Factored {
    pub map: PolyMap,
    /// Removed roots of each component.
    pub roots: [Vec<Cx>; 2],
    /// min |h̃_j| over the verification grid of Ū.
    pub min_modulus: [f64; 2],
}

impl Factored {
    /// h(ζ) = ∏(ζ − z_i) · h̃(ζ), componentwise.
    pub fn restore(&self, zeta: Cx, w: C2) -> C2 {
        let p = |j: usize| self.roots[j].iter().fold(Cx::new(1.0, 0.0), |a, z| a * (zeta - z));
        C2::new(p(0) * w.z1, p(1) * w.z2)
    }
}

/// Divides out the roots of each component inside |ζ| < r.
///
/// # Errors
/// An identically zero component, a root with r ≤ |ζ| ≤ 1, or a deflated
/// component whose minimum modulus on Ū is not clear of zero.
pub fn factor_zeros(h: &PolyMap, r: f64) -> Result<Factored> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(invalid(format!("inner radius {r} outside (0, 1]")));
    }
    let mut comps: [Vec<Cx>; 2] = [h.component(0), h.component(1)];
    let mut roots: [Vec<Cx>; 2] = [Vec::new(), Vec::new()];
    for j in 0..2 {
        let c = &mut comps[j];
        while c.len() > 1 && c.last().is_some_and(|v| *v == Cx::new(0.0, 0.0)) {
            c.pop();
        }
        if c.iter().all(|v| *v == Cx::new(0.0, 0.0)) {
            return Err(precondition("factor_zeros", format!("component {} is identically zero", j + 1)));
        }
        if c.len() == 1 {
            continue;
        }
        for z in poly_roots(c)? {
            let m = z.norm();
            if m >= r * (1.0 - 1e-9) && m <= 1.0 + 1e-9 {
                return Err(precondition(
                    "factor_zeros",
                    format!("component {} vanishes at {z} on the annulus {r} ≤ |ζ| ≤ 1", j + 1),
                ));
            }
            if m < r {
                roots[j].push(z);
            }
        }
        roots[j].sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
        for z in &roots[j] {
            *c = deflate(c, *z).0;
        }
    }
    let map = PolyMap::from_components(&comps[0], &comps[1])?;
    let n = (4 * (map.degree() + 1)).next_power_of_two().max(64);
    let mut low = [f64::INFINITY; 2];
    for l in 0..=16 {
        for w in map.sample_circle(l as f64 / 16.0, n) {
            low[0] = low[0].min(w.z1.norm());
            low[1] = low[1].min(w.z2.norm());
        }
    }
    for j in 0..2 {
        let scale = comps[j].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(low[j] > 1e-9 * scale) {
            return Err(Error::Certification(format!(
                "deflated component {} has modulus {} on Ū",
                j + 1,
                low[j]
            )));
        }
    }
    Ok(Factored {
        map,
        roots,
        min_modulus: low,
    })
}

/// Holomorphic log of a map without zeros on Ū, as a Taylor polynomial
/// with |e^{g} − h| / |h| ≤ tol on T. The branch is fixed by the principal
/// argument at node 0 and continued by unwrapping along the circle.
///
/// # Errors
/// A zero on T, nonzero winding, or no converged expansion up to 2^20 nodes.
pub fn log_map(h: &PolyMap, tol: f64) -> Result<(PolyMap, f64)> {
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut n = (4 * (h.degree() + 1)).next_power_of_two().max(256);
    loop {
        let samples = h.sample_circle(1.0, n);
        let mut comps = Vec::with_capacity(2);
        for j in 0..2 {
            let vals: Vec<Cx> = samples.iter().map(|w| w.get(j)).collect();
            comps.push(unwrapped_log(&vals)?);
        }
        let c0 = dft_coeffs(&comps[0]);
        let c1 = dft_coeffs(&comps[1]);
        let half = n / 2;
        let tail = |c: &[Cx]| c[half / 2..n].iter().map(|v| v.norm()).sum::<f64>();
        if tail(&c0) + tail(&c1) <= 0.1 * tol || n >= 1 << 20 {
            let g = PolyMap::from_components(&c0[..half / 2], &c1[..half / 2])?.trimmed(1e-3 * tol);
            let check = 2 * n;
            let mut err = 0.0f64;
            for (w, v) in g.sample_circle(1.0, check).iter().zip(h.sample_circle(1.0, check)) {
                for j in 0..2 {
                    err = err.max((w.get(j).exp() - v.get(j)).norm() / v.get(j).norm());
                }
            }
            if err > tol {
                return Err(Error::Numerical(format!("log expansion error {err:.3e} above {tol:.3e} at {n} nodes")));
            }
            return Ok((g, err));
        }
        n *= 2;
    }
}

fn unwrapped_log(vals: &[Cx]) -> Result<Vec<Cx>> {
    let mut out = Vec::with_capacity(vals.len());
    let mut prev = 0.0;
    for (k, v) in vals.iter().enumerate() {
        if !(v.norm() > 0.0) {
            return Err(precondition("log_map", format!("zero on T at node {k}")));
        }
        let a = v.arg();
        let t = if k == 0 { a } else { a + TAU * ((prev - a) / TAU).round() };
        if k > 0 && (t - prev).abs() > 0.5 * PI {
            return Err(Error::Numerical(format!("argument jump {} at node {k}; refine the grid", t - prev)));
        }
        prev = t;
        out.push(Cx::new(v.norm().ln(), t));
    }
    let close = out[0].im - prev;
    let wind = (close / TAU).round();
    if wind != 0.0 {
        return Err(precondition("log_map", format!("winding number {} on T", -wind)));
    }
    Ok(out)
}

/// Settings for [`build_axis_avoiding_disc_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct AxisOptions {
    pub tube: TubeOptions,
    /// Largest i tried in 1 − r_k = (1 − r_{k−1})·2^{−i}.
    pub ladder_max: u32,
    pub annulus_radii: usize,
    pub scale_grids: bool,
    /// Relative accuracy of the logarithm g₁.
    pub log_tol: f64,
    /// Radii of the exponentiated grid.
    pub exp_radii: usize,
}

impl Default for AxisOptions {
    fn default() -> Self {
        AxisOptions {
            tube: TubeOptions::default(),
            ladder_max: 40,
            annulus_radii: 8,
            scale_grids: true,
            log_tol: 1e-12,
            exp_radii: 16,
        }
    }
}

/// Stages g_1 = log h̃, g_2, ..., g_K for ρ_max with M_k = M_{k−1} + 1.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSequence {
    pub m0: f64,
    pub m1: f64,
    /// ε_1, ε_2, ...
    pub eps: Vec<f64>,
    pub r1: f64,
    pub stages: Vec<Stage>,
    pub telescoping: LiftCertificate,
}

impl AxisSequence {
    /// M_k, k ≥ 0.
    pub fn level(&self, k: usize) -> f64 {
        axis_level(self.m1, k)
    }

    pub fn tolerance(&self, k: usize) -> f64 {
        self.eps[k - 1]
    }

    pub fn stage(&self, k: usize) -> Option<&Stage> {
        k.checked_sub(1).and_then(|i| self.stages.get(i))
    }

    pub fn last_map(&self) -> Option<&PolyMap> {
        self.stages.last().map(|s| &s.map)
    }

    pub fn pass(&self) -> bool {
        !self.stages.is_empty() && self.stages.iter().all(|s| s.certificate.pass()) && self.telescoping.pass()
    }
}

/// M_k = M₁ + (k − 1).
pub fn axis_level(m1: f64, k: usize) -> f64 {
    m1 + (k as f64 - 1.0)
}

/// A proper holomorphic disc in (C*)² given as e^{g_K} times the removed
/// zero factors.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisAvoidingDisc {
    pub factored: Factored,
    /// sup_T |e^{g₁} − h̃| / |h̃|.
    pub log_error: f64,
    pub sequence: AxisSequence,
    pub exp_disc: ExpDisc,
}

impl AxisAvoidingDisc {
    /// Final map f(ζ) = ∏(ζ − z_i) · e^{g_K(ζ)}.
    pub fn eval(&self, zeta: Cx) -> C2 {
        self.factored.restore(zeta, self.exp_disc.eval(zeta))
    }
}

/// A run stopped at `stage`; `partial` holds the stages certified before it.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBuildError {
    pub stage: usize,
    pub error: Error,
    pub partial: AxisSequence,
    pub certificate: Option<LiftCertificate>,
}

impl fmt::Display for AxisBuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "stage {} failed after {} certified stages: {}",
            self.stage,
            self.partial.stages.len(),
            self.error
        )
    }
}

impl std::error::Error for AxisBuildError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// # Errors
/// See [`build_axis_avoiding_disc_with`].
pub fn build_axis_avoiding_disc(
    h: &PolyMap,
    r: f64,
    eps: &[f64],
    k: usize,
) -> std::result::Result<AxisAvoidingDisc, AxisBuildError> {
    build_axis_avoiding_disc_with(h, r, eps, k, &AxisOptions::default())
}

/// K stages for ρ_max starting from the log of h with its inner zeros
/// removed. Stage j lifts g_{j−1} between C₀ = M_{j−2} and C₁ = M_j − ε_{j−1}
/// with tolerance ε_{j−1} and inner radius r_{j−1}.
///
/// # Errors
/// Bad parameters or preprocessing failures (stage 0 or 1), or the first
/// failing stage with the certified prefix.
pub fn build_axis_avoiding_disc_with(
    h: &PolyMap,
    r: f64,
    eps: &[f64],
    k: usize,
    opts: &AxisOptions,
) -> std::result::Result<AxisAvoidingDisc, AxisBuildError> {
    let mut seq = AxisSequence {
        m0: f64::NAN,
        m1: f64::NAN,
        eps: eps.to_vec(),
        r1: r,
        stages: Vec::new(),
        telescoping: LiftCertificate::default(),
    };
    let fail = |seq: &AxisSequence, stage, error, certificate| AxisBuildError {
        stage,
        error,
        partial: seq.clone(),
        certificate,
    };
    if let Err(e) = validate(r, eps, k, opts) {
        return Err(fail(&seq, 0, e, None));
    }
    let factored = match factor_zeros(h, r) {
        Ok(f) => f,
        Err(e) => return Err(fail(&seq, 0, e, None)),
    };
    let (g1, log_error) = match log_map(&factored.map, opts.log_tol) {
        Ok(x) => x,
        Err(e) => return Err(fail(&seq, 1, e, None)),
    };

    let base_nodes = 2 * opts.tube.push.approx.verify_nodes;
    let m = opts.annulus_radii;
    let nodes0 = base_nodes.max((2 * (g1.degree() + 1)).next_power_of_two());
    let (lo, hi) = annulus_range(&g1, r, nodes0, m);
    seq.m0 = lo - 0.5;
    seq.m1 = hi + 0.5;
    let mut cert = LiftCertificate {
        grid_nodes: vec![nodes0],
        grid_radii: m,
        ..Default::default()
    };
    cert.push(Condition::above("(a_1) ρ(g_1) − M_0 on r_1 ≤ |ζ| ≤ 1", lo - seq.m0, 0.0));
    cert.push(Condition::above("(a_1) M_1 − ρ(g_1) on r_1 ≤ |ζ| ≤ 1", seq.m1 - hi, 0.0));
    cert.set_param("log_error", log_error);
    cert.set_param("M_0", seq.m0);
    cert.set_param("M_1", seq.m1);
    cert.set_param("r_1", r);
    seq.stages.push(Stage {
        map: g1,
        r,
        level: seq.m1,
        eps: eps[0],
        certificate: cert,
    });

    for j in 2..=k {
        let prev = seq.stages.last().expect("stage 1 present").clone();
        let mut tube = opts.tube.clone();
        if opts.scale_grids {
            let need = (2 * (prev.map.degree() + 1)).next_power_of_two();
            let ap = &mut tube.push.approx;
            ap.verify_nodes = ap.verify_nodes.max(need);
            ap.max_nodes = ap.max_nodes.max(4 * need);
        }
        let nodes = 2 * tube.push.approx.verify_nodes;
        let e_prev = seq.tolerance(j - 1);
        let c0 = seq.level(j - 2);
        let level = seq.level(j);
        let c1 = level - e_prev;
        let (g, mut cert) = match lift_step_tube_with(&prev.map, c0, c1, e_prev, prev.r, &tube) {
            Ok(x) => x,
            Err(e) => return Err(fail(&seq, j, e, None)),
        };
        let below = seq.level(j - 1);
        let chosen = (2..=opts.ladder_max)
            .map(|i| 1.0 - (1.0 - prev.r) * 2f64.powi(-(i as i32)))
            .take_while(|t| *t < 1.0)
            .map(|t| (t, annulus_range(&g, t, nodes, m)))
            .find(|(_, (lo, hi))| *lo > below && *hi < level);
        let (rj, (lo, hi)) = chosen.unwrap_or_else(|| {
            let t = 1.0 - (1.0 - prev.r) * 0.25;
            (f64::NAN, annulus_range(&g, t, nodes, m))
        });
        cert.push(Condition::above(
            format!("(a_{j}) ρ(g_{j}) − M_{} on r_{j} ≤ |ζ| ≤ 1", j - 1),
            lo - below,
            0.0,
        ));
        cert.push(Condition::above(format!("(a_{j}) M_{j} − ρ(g_{j}) on r_{j} ≤ |ζ| ≤ 1"), level - hi, 0.0));
        cert.push(Condition::above(
            format!("(b_{j}) ρ(g_{j}) − M_{} on r_{} ≤ |ζ| ≤ 1", j - 2, j - 1),
            annulus_range(&g, prev.r, nodes, m).0 - c0,
            0.0,
        ));
        cert.push(Condition::below(
            format!("(c_{j}) sup |g_{j} − g_{}| on |ζ| ≤ r_{}", j - 1, j - 1),
            (&g - &prev.map).majorant(prev.r),
            e_prev,
        ));
        cert.push(Condition::below(
            format!("1 − r_{j} vs (1 − r_{})/2", j - 1),
            1.0 - rj,
            0.5 * (1.0 - prev.r),
        ));
        cert.set_param(&format!("r_{j}"), rj);
        cert.set_param(&format!("M_{j}"), level);
        if !cert.pass() {
            let names: Vec<String> = cert.failures().map(|c| c.name.clone()).collect();
            let e = Error::Certification(format!("stage {j}: {}", names.join("; ")));
            return Err(fail(&seq, j, e, Some(cert)));
        }
        seq.stages.push(Stage {
            map: g,
            r: rj,
            level,
            eps: eps.get(j - 1).copied().unwrap_or(0.0),
            certificate: cert,
        });
    }

    seq.telescoping = telescoping(&seq, opts);
    if !seq.telescoping.pass() {
        let e = Error::Certification("telescoping bounds".into());
        let t = seq.telescoping.clone();
        return Err(fail(&seq, k, e, Some(t)));
    }
    let g = seq.last_map().expect("nonempty").clone();
    let n = (2 * (g.degree() + 1)).next_power_of_two().max(base_nodes);
    let radii: Vec<f64> = (0..opts.exp_radii).map(|l| l as f64 / (opts.exp_radii - 1) as f64).collect();
    let exp_disc = match exponentiate(&g, &radii, n) {
        Ok(e) => e,
        Err(e) => return Err(fail(&seq, k, e, None)),
    };
    Ok(AxisAvoidingDisc {
        factored,
        log_error,
        sequence: seq,
        exp_disc,
    })
}

fn validate(r: f64, eps: &[f64], k: usize, opts: &AxisOptions) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("r = {r} outside (0, 1)")));
    }
    if k == 0 {
        return Err(invalid("need at least one stage"));
    }
    if eps.len() < k.max(1) - 1 || eps.is_empty() {
        return Err(invalid(format!("need ε_1 .. ε_{} for {k} stages, got {}", k.max(2) - 1, eps.len())));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(invalid("every ε_k must be positive"));
    }
    let total: f64 = eps.iter().sum();
    if !(total < 1.0) {
        return Err(invalid(format!("Σ ε_k = {total} must be below 1")));
    }
    if opts.annulus_radii < 2 || opts.exp_radii < 2 || opts.ladder_max < 2 || opts.ladder_max > 52 {
        return Err(invalid("annulus and exponent grids need two radii, the ladder 2..=52 steps"));
    }
    Ok(())
}

/// (min, max) of ρ_max(f) over `m` radii spanning [t, 1].
fn annulus_range(f: &PolyMap, t: f64, n: usize, m: usize) -> (f64, f64) {
    band_range(f, t, 1.0, n, m)
}

fn band_range(f: &PolyMap, lo: f64, hi: f64, n: usize, m: usize) -> (f64, f64) {
    (0..m)
        .map(|l| lo + (hi - lo) * l as f64 / (m - 1) as f64)
        .flat_map(|s| f.sample_circle(s, n))
        .map(|z| rho_max(&z))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

fn telescoping(seq: &AxisSequence, opts: &AxisOptions) -> LiftCertificate {
    let kk = seq.stages.len();
    let g = &seq.stages[kk - 1].map;
    let n = (2 * (g.degree() + 1))
        .next_power_of_two()
        .max(2 * opts.tube.push.approx.verify_nodes);
    let m = opts.annulus_radii;
    let mut cert = LiftCertificate {
        grid_nodes: vec![n],
        grid_radii: m,
        ..Default::default()
    };
    let mut tail = 0.0;
    for k in (1..kk).rev() {
        tail += seq.tolerance(k);
        let st = &seq.stages[k - 1];
        cert.push(Condition::below(
            format!("sup |g_{kk} − g_{k}| on |ζ| ≤ r_{k}"),
            (g - &st.map).majorant(st.r),
            tail,
        ));
    }
    let total: f64 = seq.eps.iter().sum();
    cert.push(Condition::below("Σ ε_k", total, 1.0));
    for k in 2..=kk {
        let lo = seq.stages[k - 2].r;
        let hi = seq.stages[k - 1].r;
        let (low, _) = band_range(g, lo, hi, n, m);
        cert.push(Condition::above(
            format!("ρ(g_{kk}) − M_{} + 1 on r_{} ≤ |ζ| ≤ r_{k}", k - 2, k - 1),
            low - seq.level(k - 2) + 1.0,
            0.0,
        ));
    }
    let (low, _) = annulus_range(g, seq.stages[kk - 1].r, n, m);
    cert.push(Condition::above(
        format!("ρ(g_{kk}) − M_{} on r_{kk} ≤ |ζ| ≤ 1", kk - 1),
        low - seq.level(kk - 1),
        0.0,
    ));
    cert
}
