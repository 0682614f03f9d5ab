use std::fmt;
use std::path::{Path, PathBuf};

use propdisc::corepoly::Cx;
use serde::{Deserialize, Serialize};

/// Pipeline selected by a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Proper disc in {ρ_c > 0} by stages of cone lifts.
    Cone,
    /// Axis-avoiding disc by stages of ρ_max lifts.
    Tube,
    /// One cone lift of h.
    Lift,
    /// Boundary diagnostics of the first component of h.
    Diagnose,
    /// Lifting radius a(c) and its check on fresh points.
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Cone => "cone",
            Command::Tube => "tube",
            Command::Lift => "lift",
            Command::Diagnose => "diagnose",
            Command::Oracle => "oracle",
        }
    }

    fn constructive(self) -> bool {
        matches!(self, Command::Cone | Command::Lift | Command::Oracle)
    }
}

/// Run parameters as given on the command line or in a config file; unset
/// fields take the command's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Config file echo of the command name; must match the subcommand.
    #[arg(skip)]
    pub command: Option<Command>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// First level M₁.
    #[arg(long = "M", allow_hyphen_values = true)]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    /// ε (cone, lift) or ε₁ with ε_k = ε₁·2^{1−k} (tube).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub stages: Option<usize>,
    /// Boundary nodes of the verification and sample grids.
    #[arg(long = "grid-theta")]
    pub grid_theta: Option<usize>,
    /// Radii of the verification and sample grids.
    #[arg(long = "grid-radii")]
    pub grid_radii: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Oracle calibration batch.
    #[arg(long)]
    pub batch: Option<usize>,
    /// Coefficients of h₁, lowest first, e.g. 1.5,0.2 or 0.1+2i.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h1: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub h2: Option<Vec<String>>,
    /// Boundary tolerance of the conformal maps in cone lifts.
    #[arg(long = "riemann-tol")]
    pub riemann_tol: Option<f64>,
    /// Chord offset factor of the tube discs.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Boundary direction for diagnostics.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
}

impl Params {
    /// `self` with unset fields taken from `base`.
    pub fn over(self, base: Params) -> Params {
        Params {
            command: self.command.or(base.command),
            out: self.out.or(base.out),
            c: self.c.or(base.c),
            m: self.m.or(base.m),
            eps: self.eps.or(base.eps),
            r1: self.r1.or(base.r1),
            stages: self.stages.or(base.stages),
            grid_theta: self.grid_theta.or(base.grid_theta),
            grid_radii: self.grid_radii.or(base.grid_radii),
            seed: self.seed.or(base.seed),
            batch: self.batch.or(base.batch),
            h1: self.h1.or(base.h1),
            h2: self.h2.or(base.h2),
            riemann_tol: self.riemann_tol.or(base.riemann_tol),
            eta: self.eta.or(base.eta),
            theta0: self.theta0.or(base.theta0),
        }
    }

    /// Reads a TOML config file.
    ///
    /// # Errors
    /// Unreadable file or unknown keys.
    pub fn from_file(path: &Path) -> Result<Params, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError::new("config", e.message().to_string()))
    }
}

/// A validation failure naming the offending field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub field: &'static str,
    pub detail: String,
}

impl ConfigError {
    pub fn new(field: &'static str, detail: impl Into<String>) -> Self {
        ConfigError {
            field,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.detail)
    }
}

impl std::error::Error for ConfigError {}

/// A validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub c: f64,
    pub m: f64,
    pub eps: f64,
    pub r1: f64,
    pub stages: usize,
    pub grid_theta: usize,
    pub grid_radii: usize,
    pub seed: u64,
    pub batch: usize,
    pub h1: Vec<Cx>,
    pub h2: Vec<Cx>,
    pub riemann_tol: f64,
    pub eta: f64,
    pub theta0: f64,
}

/// Parameter echo written into every artifact. The output directory is
/// left out so that reruns elsewhere compare equal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub command: &'static str,
    pub c: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub eps: f64,
    pub r1: f64,
    pub stages: usize,
    pub grid_theta: usize,
    pub grid_radii: usize,
    pub seed: u64,
    pub batch: usize,
    pub h1: Vec<String>,
    pub h2: Vec<String>,
    pub riemann_tol: f64,
    pub eta: f64,
    pub theta0: f64,
}

fn parse_coeffs(field: &'static str, v: &[String]) -> Result<Vec<Cx>, ConfigError> {
    if v.is_empty() {
        return Err(ConfigError::new(field, "needs at least one coefficient"));
    }
    v.iter()
        .map(|s| {
            let z: Cx = s.trim().parse().map_err(|_| ConfigError::new(field, format!("cannot parse coefficient {s:?}")))?;
            if z.is_finite() {
                Ok(z)
            } else {
                Err(ConfigError::new(field, format!("coefficient {s:?} is not finite")))
            }
        })
        .collect()
}

fn format_coeff(z: &Cx) -> String {
    format!("{}{:+}i", z.re, z.im)
}

impl RunConfig {
    /// Fills defaults for `command` and validates every field.
    ///
    /// # Errors
    /// The first field outside its documented range.
    pub fn resolve(command: Command, p: Params) -> Result<RunConfig, ConfigError> {
        if let Some(c) = p.command {
            if c != command {
                return Err(ConfigError::new("command", format!("config file names {} but the subcommand is {}", c.name(), command.name())));
            }
        }
        let tube = command == Command::Tube;
        let strs = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let (d_h1, d_h2) = if tube { (strs(&["1"]), strs(&["1"])) } else { (strs(&["1.5", "0.2"]), strs(&["0"])) };
        let cfg = RunConfig {
            command,
            out: p.out,
            c: p.c.unwrap_or(0.5),
            m: p.m.unwrap_or(1.0),
            eps: p.eps.unwrap_or(if tube { 0.25 } else { 0.1 }),
            r1: p.r1.unwrap_or(0.5),
            stages: p.stages.unwrap_or(if tube { 5 } else { 6 }),
            grid_theta: p.grid_theta.unwrap_or(512),
            grid_radii: p.grid_radii.unwrap_or(8),
            seed: p.seed.unwrap_or(7),
            batch: p.batch.unwrap_or(100),
            h1: parse_coeffs("h1", p.h1.as_deref().unwrap_or(&d_h1))?,
            h2: parse_coeffs("h2", p.h2.as_deref().unwrap_or(&d_h2))?,
            riemann_tol: p.riemann_tol.unwrap_or(1e-7),
            eta: p.eta.unwrap_or(0.05),
            theta0: p.theta0.unwrap_or(0.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, field: &'static str, range: &str, v: String| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::new(field, format!("{v} outside {range}")))
            }
        };
        if self.command.constructive() {
            check(self.c.is_finite() && self.c < 1.0, "c", "c < 1", self.c.to_string())?;
        }
        check(self.m.is_finite() && self.m > 0.0, "M", "M > 0", self.m.to_string())?;
        check(self.eps.is_finite() && self.eps > 0.0, "eps", "eps > 0", self.eps.to_string())?;
        if self.command == Command::Tube {
            check(self.eps < 1.0, "eps", "eps < 1 so that the tolerances sum below 2", self.eps.to_string())?;
        }
        check(self.r1 > 0.0 && self.r1 < 1.0, "r1", "0 < r1 < 1", self.r1.to_string())?;
        check(self.stages >= 1, "stages", "stages ≥ 1", self.stages.to_string())?;
        check(self.grid_theta >= 8, "grid_theta", "grid_theta ≥ 8", self.grid_theta.to_string())?;
        check(self.grid_radii >= 2, "grid_radii", "grid_radii ≥ 2", self.grid_radii.to_string())?;
        check(self.batch >= 1, "batch", "batch ≥ 1", self.batch.to_string())?;
        check(self.riemann_tol > 0.0 && self.riemann_tol < 1.0, "riemann_tol", "0 < riemann_tol < 1", self.riemann_tol.to_string())?;
        check(self.eta > 0.0 && self.eta <= 1.0, "eta", "0 < eta ≤ 1", self.eta.to_string())?;
        check(self.theta0.is_finite(), "theta0", "finite values", self.theta0.to_string())?;
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: self.command.name(),
            c: self.c,
            m: self.m,
            eps: self.eps,
            r1: self.r1,
            stages: self.stages,
            grid_theta: self.grid_theta,
            grid_radii: self.grid_radii,
            seed: self.seed,
            batch: self.batch,
            h1: self.h1.iter().map(format_coeff).collect(),
            h2: self.h2.iter().map(format_coeff).collect(),
            riemann_tol: self.riemann_tol,
            eta: self.eta,
            theta0: self.theta0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_command() {
        let cone = RunConfig::resolve(Command::Cone, Params::default()).unwrap();
        assert_eq!((cone.c, cone.m, cone.eps, cone.r1, cone.stages), (0.5, 1.0, 0.1, 0.5, 6));
        assert_eq!(cone.h1, vec![Cx::new(1.5, 0.0), Cx::new(0.2, 0.0)]);
        let tube = RunConfig::resolve(Command::Tube, Params::default()).unwrap();
        assert_eq!((tube.eps, tube.stages), (0.25, 5));
        assert_eq!(tube.h2, vec![Cx::new(1.0, 0.0)]);
    }

    #[test]
    fn validation_names_the_field() {
        let p = Params { c: Some(1.2), ..Params::default() };
        assert_eq!(RunConfig::resolve(Command::Cone, p.clone()).unwrap_err().field, "c");
        assert!(RunConfig::resolve(Command::Diagnose, p).is_ok());
        let p = Params { r1: Some(1.0), ..Params::default() };
        assert_eq!(RunConfig::resolve(Command::Tube, p).unwrap_err().field, "r1");
        let p = Params { stages: Some(0), ..Params::default() };
        assert_eq!(RunConfig::resolve(Command::Cone, p).unwrap_err().field, "stages");
        let p = Params { h1: Some(vec!["x".into()]), ..Params::default() };
        assert_eq!(RunConfig::resolve(Command::Lift, p).unwrap_err().field, "h1");
        let p = Params { command: Some(Command::Tube), ..Params::default() };
        assert_eq!(RunConfig::resolve(Command::Cone, p).unwrap_err().field, "command");
    }

    #[test]
    fn flags_override_file() {
        let file: Params = toml::from_str("c = 0.3\nM = 2.0\nh1 = [\"1\", \"0.5+1i\"]\n").unwrap();
        let flags = Params { c: Some(0.4), ..Params::default() };
        let p = flags.over(file);
        assert_eq!((p.c, p.m), (Some(0.4), Some(2.0)));
        let cfg = RunConfig::resolve(Command::Cone, p).unwrap();
        assert_eq!(cfg.h1[1], Cx::new(0.5, 1.0));
        assert_eq!(cfg.echo().h1[1], "0.5+1i");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Params>("colour = 1\n").is_err());
    }
}
