use std::fs::{self, File, OpenOptions};
use std::io;
use std::path::{Path, PathBuf};

use propdisc::boundarylab::{characteristic_curve, cluster_sample, fatou_scan, range_density, target_grid, Scheme};
use propdisc::conedisc::{build_proper_cone_disc_with, BuildError, BuildOptions, StageSequence};
use propdisc::corepoly::{Cx, PolyMap, C2};
use propdisc::levigeom::{lifting_radius_with, rho_cone, LiftingRadius, RadiusCheck, RadiusOptions};
use propdisc::liftengine::{lift_step_cone_with, ApproxOptions, ConeOptions, LeviOptions, LiftCertificate, PushOptions};
use propdisc::tubedisc::{build_axis_avoiding_disc_with, AxisAvoidingDisc, AxisBuildError, AxisOptions, ChordOptions, TubeOptions};
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::report::*;

/// In-memory result of a run, for callers that inspect more than the files.
#[derive(Debug)]
pub enum Outcome {
    Cone(Result<StageSequence, BuildError>),
    Tube(Result<AxisAvoidingDisc, AxisBuildError>),
    Lift(propdisc::Result<(PolyMap, LiftCertificate)>),
    Diagnose(propdisc::Result<Diagnostics>),
    Oracle(propdisc::Result<(LiftingRadius, RadiusCheck)>),
}

/// Files of a run (name, contents) sorted by name, plus its status.
#[derive(Debug)]
pub struct RunArtifacts {
    pub files: Vec<(String, String)>,
    pub pass: bool,
    pub partial: bool,
    /// Lines for the terminal.
    pub summary: Vec<String>,
    pub outcome: Outcome,
}

impl RunArtifacts {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_str())
    }

    /// 0 when every certificate passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn h_map(cfg: &RunConfig) -> propdisc::Result<PolyMap> {
    PolyMap::from_components(&cfg.h1, &cfg.h2)
}

fn push_opts(cfg: &RunConfig) -> PushOptions {
    PushOptions {
        approx: ApproxOptions {
            verify_nodes: cfg.grid_theta,
            verify_radii: cfg.grid_radii,
            ..ApproxOptions::default()
        },
        ..PushOptions::default()
    }
}

fn cone_opts(cfg: &RunConfig) -> ConeOptions {
    ConeOptions {
        a: None,
        radius: RadiusOptions {
            seed: cfg.seed,
            ..RadiusOptions::default()
        },
        levi: LeviOptions {
            riemann_tol: cfg.riemann_tol,
            push: push_opts(cfg),
            ..LeviOptions::default()
        },
    }
}

fn summary(pass: bool, message: String) -> Summary {
    Summary {
        pass,
        status: if pass { "pass" } else { "certificate failure" },
        message,
    }
}

/// Dispatches to the pipeline named by `cfg.command`.
pub fn run(cfg: &RunConfig) -> RunArtifacts {
    match cfg.command {
        Command::Cone => run_cone(cfg),
        Command::Tube => run_tube(cfg),
        Command::Lift => run_lift(cfg),
        Command::Diagnose => run_diagnose(cfg),
        Command::Oracle => run_oracle(cfg),
    }
}

#[derive(Serialize)]
struct ConeResult {
    c: f64,
    #[serde(rename = "M1")]
    m1: f64,
    eps: f64,
    r1: f64,
    a: f64,
    stages_requested: usize,
    stages_certified: usize,
    final_degree: Option<usize>,
    stages: Vec<StageOut>,
    telescoping: CertificateOut,
    failure: Option<FailureOut>,
}

fn run_cone(cfg: &RunConfig) -> RunArtifacts {
    let opts = BuildOptions {
        cone: cone_opts(cfg),
        ..BuildOptions::default()
    };
    let res = match h_map(cfg) {
        Ok(h) => build_proper_cone_disc_with(&h, cfg.c, cfg.m, cfg.eps, cfg.r1, cfg.stages, &opts),
        Err(e) => Err(BuildError {
            stage: 0,
            error: e,
            partial: StageSequence {
                c: cfg.c,
                m1: cfg.m,
                eps: cfg.eps,
                r1: cfg.r1,
                a: f64::NAN,
                stages: Vec::new(),
                telescoping: LiftCertificate::default(),
            },
            certificate: None,
        }),
    };
    let (seq, failure) = match &res {
        Ok(s) => (s, None),
        Err(e) => (
            &e.partial,
            Some(FailureOut {
                stage: e.stage,
                error: e.error.to_string(),
                certificate: e.certificate.as_ref().map(Into::into),
            }),
        ),
    };
    let pass = res.as_ref().is_ok_and(|s| s.pass() && s.stages.len() == cfg.stages);
    let partial = res.is_err();
    let prov = Provenance::new(cfg, partial);
    let mut lines: Vec<String> = seq
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| {
            format!(
                "stage {}: r = {}, M = {}, degree {}, {}",
                i + 1,
                s.r,
                s.level,
                s.map.degree(),
                if s.certificate.pass() { "pass" } else { "FAIL" }
            )
        })
        .collect();
    let message = match &res {
        Ok(s) => format!("{} stages, telescoping {}", s.stages.len(), if s.telescoping.pass() { "pass" } else { "FAIL" }),
        Err(e) => e.to_string(),
    };
    lines.push(message.clone());
    let result = ConeResult {
        c: seq.c,
        m1: seq.m1,
        eps: seq.eps,
        r1: seq.r1,
        a: seq.a,
        stages_requested: cfg.stages,
        stages_certified: seq.stages.len(),
        final_degree: seq.last_map().map(PolyMap::degree),
        stages: seq.stages.iter().enumerate().map(|(i, s)| StageOut::new(i + 1, s)).collect(),
        telescoping: (&seq.telescoping).into(),
        failure,
    };
    let mut files = vec![("report.toml".to_string(), report_toml(&prov, &summary(pass, message), &result))];
    if let Some(g) = seq.last_map() {
        let c = cfg.c;
        files.push(("coefficients.csv".into(), coefficients_csv(&prov, g)));
        files.push((
            "samples.csv".into(),
            samples_csv(&prov, cfg.grid_theta, cfg.grid_radii, |z| g.eval(z), |w| rho_cone(c, w)),
        ));
    }
    finish(files, pass, partial, lines, Outcome::Cone(res))
}

#[derive(Serialize)]
struct TubeResult {
    #[serde(rename = "M0")]
    m0: f64,
    #[serde(rename = "M1")]
    m1: f64,
    r1: f64,
    eps: Vec<f64>,
    stages_requested: usize,
    stages_certified: usize,
    final_degree: Option<usize>,
    removed_zeros: Option<[usize; 2]>,
    log_error: Option<f64>,
    exp_modulus_error: Option<f64>,
    exp_log_error: Option<f64>,
    stages: Vec<StageOut>,
    telescoping: CertificateOut,
    failure: Option<FailureOut>,
}

fn log_rho(w: &C2) -> f64 {
    w.z1.norm().ln().max(w.z2.norm().ln())
}

fn run_tube(cfg: &RunConfig) -> RunArtifacts {
    let eps: Vec<f64> = (0..cfg.stages).map(|k| cfg.eps / 2f64.powi(k as i32)).collect();
    let opts = AxisOptions {
        tube: TubeOptions {
            chord: ChordOptions {
                eta_factor: cfg.eta,
                ..ChordOptions::default()
            },
            push: push_opts(cfg),
            ..TubeOptions::default()
        },
        annulus_radii: cfg.grid_radii,
        ..AxisOptions::default()
    };
    let res = match h_map(cfg) {
        Ok(h) => build_axis_avoiding_disc_with(&h, cfg.r1, &eps, cfg.stages, &opts),
        Err(e) => Err(AxisBuildError {
            stage: 0,
            error: e,
            partial: propdisc::tubedisc::AxisSequence {
                m0: f64::NAN,
                m1: f64::NAN,
                eps: eps.clone(),
                r1: cfg.r1,
                stages: Vec::new(),
                telescoping: LiftCertificate::default(),
            },
            certificate: None,
        }),
    };
    let (seq, failure) = match &res {
        Ok(d) => (&d.sequence, None),
        Err(e) => (
            &e.partial,
            Some(FailureOut {
                stage: e.stage,
                error: e.error.to_string(),
                certificate: e.certificate.as_ref().map(Into::into),
            }),
        ),
    };
    let exp_ok = res.as_ref().is_ok_and(|d| d.exp_disc.pass(1e-10));
    let pass = exp_ok && res.as_ref().is_ok_and(|d| d.sequence.pass() && d.sequence.stages.len() == cfg.stages);
    let partial = res.is_err();
    let prov = Provenance::new(cfg, partial);
    let mut lines: Vec<String> = seq
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| {
            format!(
                "stage {}: r = {}, M = {}, degree {}, {}",
                i + 1,
                s.r,
                s.level,
                s.map.degree(),
                if s.certificate.pass() { "pass" } else { "FAIL" }
            )
        })
        .collect();
    let message = match &res {
        Ok(d) => format!(
            "{} stages, telescoping {}, |f| = e^u error {:.3e}",
            d.sequence.stages.len(),
            if d.sequence.telescoping.pass() { "pass" } else { "FAIL" },
            d.exp_disc.modulus_error
        ),
        Err(e) => e.to_string(),
    };
    lines.push(message.clone());
    let disc = res.as_ref().ok();
    let result = TubeResult {
        m0: seq.m0,
        m1: seq.m1,
        r1: seq.r1,
        eps: seq.eps.clone(),
        stages_requested: cfg.stages,
        stages_certified: seq.stages.len(),
        final_degree: seq.last_map().map(PolyMap::degree),
        removed_zeros: disc.map(|d| [d.factored.roots[0].len(), d.factored.roots[1].len()]),
        log_error: disc.map(|d| d.log_error),
        exp_modulus_error: disc.map(|d| d.exp_disc.modulus_error),
        exp_log_error: disc.map(|d| d.exp_disc.log_error),
        stages: seq.stages.iter().enumerate().map(|(i, s)| StageOut::new(i + 1, s)).collect(),
        telescoping: (&seq.telescoping).into(),
        failure,
    };
    let mut files = vec![("report.toml".to_string(), report_toml(&prov, &summary(pass, message), &result))];
    if let Some(g) = seq.last_map() {
        files.push(("coefficients.csv".into(), coefficients_csv(&prov, g)));
        let csv = match disc {
            Some(d) => samples_csv(&prov, cfg.grid_theta, cfg.grid_radii, |z| d.eval(z), log_rho),
            None => samples_csv(&prov, cfg.grid_theta, cfg.grid_radii, |z| exp2(&g.eval(z)), log_rho),
        };
        files.push(("samples.csv".into(), csv));
    }
    finish(files, pass, partial, lines, Outcome::Tube(res))
}

fn exp2(w: &C2) -> C2 {
    C2::new(w.z1.exp(), w.z2.exp())
}

#[derive(Serialize)]
struct LiftResult {
    c: f64,
    eps: f64,
    r1: f64,
    degree: Option<usize>,
    error: Option<String>,
    certificate: Option<CertificateOut>,
}

fn run_lift(cfg: &RunConfig) -> RunArtifacts {
    let h = h_map(cfg);
    let res = h.as_ref().map_err(Clone::clone).and_then(|h| lift_step_cone_with(h, cfg.c, cfg.eps, cfg.r1, &cone_opts(cfg)));
    let pass = res.as_ref().is_ok_and(|(_, c)| c.pass());
    let partial = res.is_err();
    let prov = Provenance::new(cfg, partial);
    let message = match &res {
        Ok((g, c)) => format!("degree {}, certificate {}", g.degree(), if c.pass() { "pass" } else { "FAIL" }),
        Err(e) => e.to_string(),
    };
    let result = LiftResult {
        c: cfg.c,
        eps: cfg.eps,
        r1: cfg.r1,
        degree: res.as_ref().ok().map(|(g, _)| g.degree()),
        error: res.as_ref().err().map(ToString::to_string),
        certificate: res.as_ref().ok().map(|(_, c)| c.into()),
    };
    let mut files = vec![("report.toml".to_string(), report_toml(&prov, &summary(pass, message.clone()), &result))];
    if let Ok((g, _)) = &res {
        let c = cfg.c;
        files.push(("coefficients.csv".into(), coefficients_csv(&prov, g)));
        files.push((
            "samples.csv".into(),
            samples_csv(&prov, cfg.grid_theta, cfg.grid_radii, |z| g.eval(z), |w| rho_cone(c, w)),
        ));
    }
    finish(files, pass, partial, vec![message], Outcome::Lift(res))
}

/// Boundary diagnostics of the stage map h₁; they describe this polynomial,
/// not a limit map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub label: &'static str,
    pub degree: usize,
    pub nevanlinna_radii: Vec<f64>,
    pub nevanlinna_values: Vec<f64>,
    pub nevanlinna_quadrature_error: Vec<f64>,
    pub nevanlinna_nondecreasing: bool,
    pub fatou_directions: usize,
    pub fatou_tol: f64,
    pub fatou_fraction: f64,
    pub range_theta0: f64,
    pub range_window: f64,
    pub range_targets: usize,
    pub range_total_hits: usize,
    pub range_attained_fraction: f64,
    pub radial_tail_diameter: f64,
}

fn diagnostics(cfg: &RunConfig) -> propdisc::Result<Diagnostics> {
    let mut p = cfg.h1.clone();
    while p.len() > 1 && p.last() == Some(&Cx::new(0.0, 0.0)) {
        p.pop();
    }
    let f = |z: Cx| p.iter().rev().fold(Cx::new(0.0, 0.0), |a, c| a * z + c);
    let radii: Vec<f64> = (0..cfg.grid_radii).map(|l| 0.99 * l as f64 / (cfg.grid_radii - 1) as f64).collect();
    let curve = characteristic_curve(&f, &radii, cfg.grid_theta)?;
    let ladder: Vec<f64> = (1..=12).map(|k| 1.0 - 2f64.powi(-k)).collect();
    let (n_dir, tol) = (16, 1e-3);
    let scan = fatou_scan(&f, n_dir, &ladder, tol)?;
    let e = Cx::from_polar(1.0, cfg.theta0);
    let window = 0.25;
    let targets = target_grid(f(e * 0.95), 0.1, 5);
    let range = range_density(&p, cfg.theta0, window, &targets)?;
    let radial = cluster_sample(&f, cfg.theta0, Scheme::Radial, &ladder)?;
    Ok(Diagnostics {
        label: "stage-map diagnostics",
        degree: p.len() - 1,
        nevanlinna_nondecreasing: curve.is_nondecreasing(0.0),
        nevanlinna_radii: curve.radii,
        nevanlinna_values: curve.values,
        nevanlinna_quadrature_error: curve.quadrature_error,
        fatou_directions: n_dir,
        fatou_tol: tol,
        fatou_fraction: scan.fraction,
        range_theta0: cfg.theta0,
        range_window: window,
        range_targets: targets.len(),
        range_total_hits: range.total_hits(),
        range_attained_fraction: range.attained_fraction(),
        radial_tail_diameter: radial.summary.tail_diameter,
    })
}

#[derive(Serialize)]
struct ErrorResult {
    error: String,
}

fn run_diagnose(cfg: &RunConfig) -> RunArtifacts {
    let res = diagnostics(cfg);
    let pass = res.as_ref().is_ok_and(|d| d.nevanlinna_nondecreasing);
    let partial = res.is_err();
    let prov = Provenance::new(cfg, partial);
    let (message, report) = match &res {
        Ok(d) => {
            let m = format!(
                "T(r) nondecreasing: {}, radial limits {:.3}, range attained {:.3}",
                d.nevanlinna_nondecreasing, d.fatou_fraction, d.range_attained_fraction
            );
            let r = report_toml(&prov, &summary(pass, m.clone()), d);
            (m, r)
        }
        Err(e) => {
            let m = e.to_string();
            let r = report_toml(&prov, &summary(false, m.clone()), &ErrorResult { error: m.clone() });
            (m, r)
        }
    };
    finish(vec![("report.toml".into(), report)], pass, partial, vec![message], Outcome::Diagnose(res))
}

#[derive(Serialize)]
struct OracleResult {
    c: f64,
    a: f64,
    min_ratio: Option<f64>,
    safety: f64,
    capped: bool,
    batch: usize,
    with_solutions: usize,
    seed: u64,
    check_seed: u64,
    check_points: usize,
    check_worst_margin: f64,
    check_pass: bool,
}

fn run_oracle(cfg: &RunConfig) -> RunArtifacts {
    let opts = RadiusOptions {
        batch: cfg.batch,
        seed: cfg.seed,
        ..RadiusOptions::default()
    };
    let check_seed = cfg.seed.wrapping_add(1);
    let res = lifting_radius_with(cfg.c, &opts).and_then(|a| {
        let chk = a.verify(check_seed, cfg.batch, opts.rho_range)?;
        Ok((a, chk))
    });
    let pass = res.as_ref().is_ok_and(|(a, chk)| a.value > 0.0 && chk.pass);
    let partial = res.is_err();
    let prov = Provenance::new(cfg, partial);
    let (lines, report) = match &res {
        Ok((a, chk)) => {
            let lines = vec![
                format!("a({}) = {} {} 0", cfg.c, a.value, if a.value > 0.0 { ">" } else { "≤" }),
                format!(
                    "calibration: {} points, {} with critical points, capped {}",
                    a.batch, a.with_solutions, a.capped
                ),
                format!(
                    "certification: {} fresh points, worst margin {:.6e}, {}",
                    chk.points,
                    chk.worst_margin,
                    if chk.pass { "pass" } else { "FAIL" }
                ),
            ];
            let result = OracleResult {
                c: a.c,
                a: a.value,
                min_ratio: a.min_ratio,
                safety: a.safety,
                capped: a.capped,
                batch: a.batch,
                with_solutions: a.with_solutions,
                seed: a.seed,
                check_seed,
                check_points: chk.points,
                check_worst_margin: chk.worst_margin,
                check_pass: chk.pass,
            };
            let r = report_toml(&prov, &summary(pass, lines.join("; ")), &result);
            (lines, r)
        }
        Err(e) => {
            let m = e.to_string();
            let r = report_toml(&prov, &summary(false, m.clone()), &ErrorResult { error: m.clone() });
            (vec![m], r)
        }
    };
    finish(vec![("report.toml".into(), report)], pass, partial, lines, Outcome::Oracle(res))
}

fn finish(mut files: Vec<(String, String)>, pass: bool, partial: bool, summary: Vec<String>, outcome: Outcome) -> RunArtifacts {
    files.sort_by(|a, b| a.0.cmp(&b.0));
    RunArtifacts {
        files,
        pass,
        partial,
        summary,
        outcome,
    }
}

pub const LOCK_NAME: &str = ".propdisc.lock";

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    dir: PathBuf,
    _file: File,
}

impl OutputLock {
    /// Creates `dir` if needed and the lockfile inside it.
    ///
    /// # Errors
    /// The directory is unwritable or another run holds the lock.
    pub fn acquire(dir: &Path) -> io::Result<OutputLock> {
        fs::create_dir_all(dir)?;
        let file = OpenOptions::new().write(true).create_new(true).open(dir.join(LOCK_NAME))?;
        Ok(OutputLock {
            dir: dir.to_path_buf(),
            _file: file,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(self.dir.join(LOCK_NAME));
    }
}

/// Writes every artifact into the locked directory.
///
/// # Errors
/// Unwritable destination.
pub fn export(artifacts: &RunArtifacts, lock: &OutputLock) -> io::Result<Vec<PathBuf>> {
    artifacts
        .files
        .iter()
        .map(|(name, text)| {
            let p = lock.dir().join(name);
            fs::write(&p, text)?;
            Ok(p)
        })
        .collect()
}
