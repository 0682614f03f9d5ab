use std::fmt;

use crate::corepoly::PolyMap;
use crate::error::{invalid, precondition, Error};
use crate::levigeom::{lifting_radius_with, rho_cone, ConeFunction};
use crate::liftengine::{boundary_min, lift_step_cone_with, Condition, ConeOptions, LiftCertificate};

/// One stage g_k with its annulus radius, level and tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub map: PolyMap,
    pub r: f64,
    /// M_k
    pub level: f64,
    /// ε_k
    pub eps: f64,
    /// Lift conditions plus (a_k), (b_k), (c_k).
    pub certificate: LiftCertificate,
}

/// Certified stages g_1 = h, g_2, ..., g_K.
#[derive(Clone, Debug, PartialEq)]
pub struct StageSequence {
    pub c: f64,
    pub m1: f64,
    pub eps: f64,
    pub r1: f64,
    pub a: f64,
    pub stages: Vec<Stage>,
    /// Telescoping bounds re-checked on the final map.
    pub telescoping: LiftCertificate,
}

impl StageSequence {
    /// M_k = (1 + a)^{k−1} M₁.
    pub fn level(&self, k: usize) -> f64 {
        stage_level(self.m1, self.a, k)
    }

    /// ε_k = ε / 2^{k−1}.
    pub fn tolerance(&self, k: usize) -> f64 {
        stage_tolerance(self.eps, k)
    }

    /// Stage k (1-based).
    pub fn stage(&self, k: usize) -> Option<&Stage> {
        k.checked_sub(1).and_then(|i| self.stages.get(i))
    }

    pub fn last_map(&self) -> Option<&PolyMap> {
        self.stages.last().map(|s| &s.map)
    }

    /// Every stage certificate and the telescoping certificate pass.
    pub fn pass(&self) -> bool {
        !self.stages.is_empty() && self.stages.iter().all(|s| s.certificate.pass()) && self.telescoping.pass()
    }
}

pub fn stage_level(m1: f64, a: f64, k: usize) -> f64 {
    (1.0 + a).powi(k as i32 - 1) * m1
}

pub fn stage_tolerance(eps: f64, k: usize) -> f64 {
    eps / 2f64.powi(k as i32 - 1)
}

/// Settings for [`build_proper_cone_disc_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct BuildOptions {
    /// Lift settings; `cone.a = None` calibrates a(c) once.
    pub cone: ConeOptions,
    /// Largest j tried on the ladder 1 − 2^{−j}.
    pub ladder_max: u32,
    /// Radii per annulus check.
    pub annulus_radii: usize,
    /// Grow the lift grids with the degree of the previous stage.
    pub scale_grids: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            cone: ConeOptions::default(),
            ladder_max: 40,
            annulus_radii: 8,
            scale_grids: true,
        }
    }
}

/// A run stopped at `stage`; `partial` holds the stages certified before it.
#[derive(Clone, Debug)]
pub struct BuildError {
    pub stage: usize,
    pub error: Error,
    pub partial: StageSequence,
    /// The failing certificate, when one was produced.
    pub certificate: Option<LiftCertificate>,
}

impl fmt::Display for BuildError {
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

impl std::error::Error for BuildError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// # Errors
/// See [`build_proper_cone_disc_with`].
pub fn build_proper_cone_disc(
    h: &PolyMap,
    c: f64,
    m: f64,
    eps: f64,
    r1: f64,
    k: usize,
) -> Result<StageSequence, BuildError> {
    build_proper_cone_disc_with(h, c, m, eps, r1, k, &BuildOptions::default())
}

/// Builds K stages of the inductive exhaustion by cone lifts, choosing each
/// r_k on the ladder 1 − 2^{−j}, then re-checks the telescoping bounds.
///
/// Stage k is lifted with tolerance ε_k, so |g_k − g_{k−1}| < ε_k and the
/// increments after g_1 sum to less than ε.
///
/// # Errors
/// Bad parameters (stage 0), ρ_c(h) ≤ M on T, or the first stage whose
/// lift, radius choice or certificate fails.
pub fn build_proper_cone_disc_with(
    h: &PolyMap,
    c: f64,
    m: f64,
    eps: f64,
    r1: f64,
    k: usize,
    opts: &BuildOptions,
) -> Result<StageSequence, BuildError> {
    let mut seq = StageSequence {
        c,
        m1: m,
        eps,
        r1,
        a: f64::NAN,
        stages: Vec::new(),
        telescoping: LiftCertificate::default(),
    };
    let fail = |seq: &StageSequence, stage, error, certificate| BuildError {
        stage,
        error,
        partial: seq.clone(),
        certificate,
    };
    let bad = validate(c, m, eps, r1, k, opts).err();
    if let Some(e) = bad {
        return Err(fail(&seq, 0, e, None));
    }
    seq.a = match opts.cone.a {
        Some(a) => a,
        None => match lifting_radius_with(c, &opts.cone.radius) {
            Ok(l) => l.value,
            Err(e) => return Err(fail(&seq, 0, e, None)),
        },
    };
    let base_nodes = 2 * opts.cone.levi.push.approx.verify_nodes;

    let m_h = boundary_min(h, c, base_nodes);
    if !(m_h > m) {
        let e = precondition("build_proper_cone_disc", format!("min ρ_c(h) on T is {m_h}, need > M = {m}"));
        return Err(fail(&seq, 1, e, None));
    }
    let mut cert = LiftCertificate {
        grid_nodes: vec![base_nodes],
        grid_radii: opts.annulus_radii,
        ..Default::default()
    };
    let candidates = std::iter::once(r1).chain(ladder(1, opts.ladder_max).filter(|t| *t > r1));
    let Some((r, worst)) = choose_radius(h, c, m, candidates, base_nodes, opts.annulus_radii) else {
        let e = Error::Certification(format!("no ladder radius gives ρ_c(h) > {m} on the annulus"));
        return Err(fail(&seq, 1, e, Some(cert)));
    };
    cert.push(Condition::above("(a_1) ρ(g_1) on r_1 ≤ |ζ| ≤ 1", worst, m));
    cert.set_param("r_1", r);
    seq.stages.push(Stage {
        map: h.clone(),
        r,
        level: m,
        eps,
        certificate: cert,
    });

    for j in 2..=k {
        let prev = seq.stages.last().expect("stage 1 present").clone();
        let mut cone = opts.cone.clone();
        cone.a = Some(seq.a);
        if opts.scale_grids {
            let need = (2 * (prev.map.degree() + 1)).next_power_of_two();
            let ap = &mut cone.levi.push.approx;
            ap.verify_nodes = ap.verify_nodes.max(need);
            ap.max_nodes = ap.max_nodes.max(4 * need);
        }
        let nodes = 2 * cone.levi.push.approx.verify_nodes;
        let level = seq.level(j);
        let tol = seq.tolerance(j);
        let (g, mut cert) = match lift_step_cone_with(&prev.map, c, tol, prev.r, &cone) {
            Ok(x) => x,
            Err(e) => return Err(fail(&seq, j, e, None)),
        };
        let cands = ladder(j as u32, opts.ladder_max).filter(|t| *t > prev.r);
        let chosen = choose_radius(&g, c, level, cands, nodes, opts.annulus_radii);
        let (r, worst) = match chosen {
            Some(x) => x,
            None => {
                let lo = annulus_min(&g, c, 1.0 - 2f64.powi(-(opts.ladder_max as i32)), nodes, opts.annulus_radii);
                (f64::NAN, lo)
            }
        };
        cert.push(Condition::above(format!("(a_{j}) ρ(g_{j}) on r_{j} ≤ |ζ| ≤ 1"), worst, level));
        cert.push(Condition::above(
            format!("(b_{j}) ρ(g_{j}) − ρ(g_{}) + ε_{} on Ū", j - 1, j - 1),
            disc_min_difference(&g, &prev.map, c, nodes, opts.annulus_radii) + prev.eps,
            0.0,
        ));
        cert.push(Condition::below(
            format!("(c_{j}) sup |g_{j} − g_{}| on |ζ| ≤ r_{}", j - 1, j - 1),
            (&g - &prev.map).majorant(prev.r),
            prev.eps,
        ));
        cert.set_param(&format!("r_{j}"), r);
        let floor = 1.0 - 2f64.powi(-(j as i32));
        if !(r >= floor) {
            cert.push(Condition::above(format!("r_{j} ≥ 1 − 2^-{j}"), r, floor));
        }
        if !cert.pass() {
            let names: Vec<String> = cert.failures().map(|c| c.name.clone()).collect();
            let e = Error::Certification(format!("stage {j}: {}", names.join("; ")));
            return Err(fail(&seq, j, e, Some(cert)));
        }
        seq.stages.push(Stage {
            map: g,
            r,
            level,
            eps: tol,
            certificate: cert,
        });
    }

    seq.telescoping = telescoping(&seq, opts);
    if !seq.telescoping.pass() {
        let e = Error::Certification("telescoping bounds".into());
        let t = seq.telescoping.clone();
        return Err(fail(&seq, k, e, Some(t)));
    }
    Ok(seq)
}

fn validate(c: f64, m: f64, eps: f64, r1: f64, k: usize, opts: &BuildOptions) -> crate::error::Result<()> {
    ConeFunction::new(c)?.require_strong("build_proper_cone_disc")?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid(format!("M = {m} must be positive; cross the critical level first")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("ε = {eps} must be positive")));
    }
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(invalid(format!("r1 = {r1} outside (0, 1)")));
    }
    if k == 0 {
        return Err(invalid("need at least one stage"));
    }
    if opts.annulus_radii < 2 || opts.ladder_max == 0 || opts.ladder_max > 52 {
        return Err(invalid("annulus needs two radii and the ladder 1..=52 steps"));
    }
    Ok(())
}

fn ladder(from: u32, to: u32) -> impl Iterator<Item = f64> {
    (from.max(1)..=to).map(|j| 1.0 - 2f64.powi(-(j as i32)))
}

/// min ρ_c(f) over `m` radii spanning [t, 1] and n nodes each.
fn annulus_min(f: &PolyMap, c: f64, t: f64, n: usize, m: usize) -> f64 {
    (0..m)
        .map(|l| t + (1.0 - t) * l as f64 / (m - 1) as f64)
        .flat_map(|s| f.sample_circle(s, n))
        .map(|z| rho_cone(c, &z))
        .fold(f64::INFINITY, f64::min)
}

fn choose_radius(
    f: &PolyMap,
    c: f64,
    level: f64,
    candidates: impl Iterator<Item = f64>,
    n: usize,
    m: usize,
) -> Option<(f64, f64)> {
    candidates
        .map(|t| (t, annulus_min(f, c, t, n, m)))
        .find(|(_, v)| *v > level)
}

/// min ρ_c(f) − ρ_c(g) over a polar grid of Ū.
fn disc_min_difference(f: &PolyMap, g: &PolyMap, c: f64, n: usize, m: usize) -> f64 {
    let rings = 4 * m;
    let mut low = rho_cone(c, &f.eval(0.0.into())) - rho_cone(c, &g.eval(0.0.into()));
    for l in 1..=rings {
        let t = l as f64 / rings as f64;
        for (a, b) in f.sample_circle(t, n).iter().zip(&g.sample_circle(t, n)) {
            low = low.min(rho_cone(c, a) - rho_cone(c, b));
        }
    }
    low
}

fn telescoping(seq: &StageSequence, opts: &BuildOptions) -> LiftCertificate {
    let kk = seq.stages.len();
    let g = &seq.stages[kk - 1].map;
    let n = (2 * (g.degree() + 1))
        .next_power_of_two()
        .max(2 * opts.cone.levi.push.approx.verify_nodes);
    let mut cert = LiftCertificate {
        grid_nodes: vec![n],
        grid_radii: opts.annulus_radii,
        ..Default::default()
    };
    let mut tail = 0.0;
    for k in (1..kk).rev() {
        tail += seq.tolerance(k + 1);
        let st = &seq.stages[k - 1];
        cert.push(Condition::below(
            format!("sup |g_{kk} − g_{k}| on |ζ| ≤ r_{k}"),
            (g - &st.map).majorant(st.r),
            tail,
        ));
    }
    cert.push(Condition::below("Σ_{k≥2} ε_k vs ε", tail, seq.eps));
    for k in 1..=kk {
        let lo = seq.stages[k - 1].r;
        let hi = seq.stages.get(k).map_or(1.0, |s| s.r);
        let m = opts.annulus_radii;
        let low = (0..m)
            .map(|l| lo + (hi - lo) * l as f64 / (m - 1) as f64)
            .flat_map(|s| g.sample_circle(s, n))
            .map(|z| rho_cone(seq.c, &z))
            .fold(f64::INFINITY, f64::min);
        cert.push(Condition::above(
            format!("ρ(g_{kk}) − M_{k} + ε on r_{k} ≤ |ζ| ≤ r_{}", k + 1),
            low - seq.level(k) + seq.eps,
            0.0,
        ));
    }
    cert
}
