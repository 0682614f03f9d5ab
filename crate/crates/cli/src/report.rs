use std::f64::consts::TAU;
use std::fmt::Write as _;

use propdisc::conedisc::Stage;
use propdisc::corepoly::{Cx, PolyMap, C2};
use propdisc::liftengine::{LiftCertificate, Relation};
use serde::Serialize;

use crate::config::{ConfigEcho, RunConfig};

/// Header block carried by every artifact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub partial: bool,
    pub config: ConfigEcho,
}

impl Provenance {
    pub fn new(cfg: &RunConfig, partial: bool) -> Self {
        Provenance {
            tool: "propdisc",
            version: env!("CARGO_PKG_VERSION"),
            command: cfg.command.name(),
            seed: cfg.seed,
            partial,
            config: cfg.echo(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub status: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionOut {
    pub name: String,
    pub relation: &'static str,
    pub bound: f64,
    pub achieved: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamOut {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateOut {
    pub pass: bool,
    pub grid_nodes: Vec<usize>,
    pub grid_radii: usize,
    pub notes: Vec<String>,
    pub conditions: Vec<ConditionOut>,
    pub params: Vec<ParamOut>,
}

impl From<&LiftCertificate> for CertificateOut {
    fn from(c: &LiftCertificate) -> Self {
        CertificateOut {
            pass: c.pass(),
            grid_nodes: c.grid_nodes.clone(),
            grid_radii: c.grid_radii,
            notes: c.notes.clone(),
            conditions: c
                .conditions
                .iter()
                .map(|d| ConditionOut {
                    name: d.name.clone(),
                    relation: match d.relation {
                        Relation::Below => "<",
                        Relation::Above => ">",
                    },
                    bound: d.bound,
                    achieved: d.achieved,
                    pass: d.pass,
                })
                .collect(),
            params: c
                .params
                .iter()
                .map(|(n, v)| ParamOut {
                    name: n.clone(),
                    value: *v,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageOut {
    pub k: usize,
    pub r: f64,
    pub level: f64,
    pub eps: f64,
    pub degree: usize,
    pub certificate: CertificateOut,
}

impl StageOut {
    pub fn new(k: usize, s: &Stage) -> Self {
        StageOut {
            k,
            r: s.r,
            level: s.level,
            eps: s.eps,
            degree: s.map.degree(),
            certificate: (&s.certificate).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureOut {
    pub stage: usize,
    pub error: String,
    pub certificate: Option<CertificateOut>,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    provenance: &'a Provenance,
    summary: &'a Summary,
    result: &'a T,
}

/// Structured-text report: provenance, summary and the command's result,
/// keys in declaration order.
pub fn report_toml<T: Serialize>(prov: &Provenance, summary: &Summary, result: &T) -> String {
    toml::to_string(&Document {
        provenance: prov,
        summary,
        result,
    })
    .expect("report shapes serialize")
}

/// The provenance block as `# ` comment lines.
pub fn provenance_comment(prov: &Provenance) -> String {
    #[derive(Serialize)]
    struct Wrap<'a> {
        provenance: &'a Provenance,
    }
    let text = toml::to_string(&Wrap { provenance: prov }).expect("provenance serializes");
    text.lines().filter(|l| !l.is_empty()).map(|l| format!("# {l}\n")).collect()
}

/// 15 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub const SAMPLE_HEADER: &str = "theta,r,re_f1,im_f1,re_f2,im_f2,rho";

/// Samples of `f` on radii l/m, l = 1..=m, and n nodes θ_k = 2πk/n.
pub fn samples_csv(prov: &Provenance, n: usize, m: usize, f: impl Fn(Cx) -> C2, rho: impl Fn(&C2) -> f64) -> String {
    let mut s = provenance_comment(prov);
    s.push_str(SAMPLE_HEADER);
    s.push('\n');
    for l in 1..=m {
        let r = l as f64 / m as f64;
        for k in 0..n {
            let theta = TAU * k as f64 / n as f64;
            let w = f(Cx::from_polar(r, theta));
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                num(theta),
                num(r),
                num(w.z1.re),
                num(w.z1.im),
                num(w.z2.re),
                num(w.z2.im),
                num(rho(&w))
            );
        }
    }
    s
}

/// Taylor coefficients of a map, one row per power.
pub fn coefficients_csv(prov: &Provenance, g: &PolyMap) -> String {
    let mut s = provenance_comment(prov);
    s.push_str("k,re_f1,im_f1,re_f2,im_f2\n");
    for (k, a) in g.coeffs().iter().enumerate() {
        let _ = writeln!(s, "{k},{},{},{},{}", num(a.z1.re), num(a.z1.im), num(a.z2.re), num(a.z2.im));
    }
    s
}
