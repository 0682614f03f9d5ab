use std::fmt;

/// Direction of a checked inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// achieved < bound
    Below,
    /// achieved > bound
    Above,
}

/// One inequality evaluated on a verification grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub name: String,
    pub relation: Relation,
    pub bound: f64,
    /// Worst value over the grid (max for [`Relation::Below`], min for
    /// [`Relation::Above`]).
    pub achieved: f64,
    pub pass: bool,
}

impl Condition {
    pub fn below(name: impl Into<String>, achieved: f64, bound: f64) -> Self {
        Condition {
            name: name.into(),
            relation: Relation::Below,
            bound,
            achieved,
            pass: achieved < bound,
        }
    }

    pub fn above(name: impl Into<String>, achieved: f64, bound: f64) -> Self {
        Condition {
            name: name.into(),
            relation: Relation::Above,
            bound,
            achieved,
            pass: achieved > bound,
        }
    }

    /// bound − achieved for `Below`, achieved − bound for `Above`.
    pub fn slack(&self) -> f64 {
        match self.relation {
            Relation::Below => self.bound - self.achieved,
            Relation::Above => self.achieved - self.bound,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::Below => "<",
            Relation::Above => ">",
        };
        let tag = if self.pass { "ok" } else { "FAIL" };
        write!(f, "{}: {:.6e} {op} {:.6e} [{tag}]", self.name, self.achieved, self.bound)
    }
}

/// Record of the conditions checked for one lifting operation.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LiftCertificate {
    pub conditions: Vec<Condition>,
    /// Boundary node counts of the grids used (base grid and its double).
    pub grid_nodes: Vec<usize>,
    pub grid_radii: usize,
    /// Named parameters of the run (ε, r, levels, K, degree, ...).
    pub params: Vec<(String, f64)>,
    /// Free-form notes (escalation history, budgets hit).
    pub notes: Vec<String>,
}

impl LiftCertificate {
    /// True iff every condition holds (and there is at least one).
    pub fn pass(&self) -> bool {
        !self.conditions.is_empty() && self.conditions.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, c: Condition) {
        self.conditions.push(c);
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn set_param(&mut self, name: &str, v: f64) {
        match self.params.iter_mut().find(|(n, _)| n == name) {
            Some(p) => p.1 = v,
            None => self.params.push((name.to_string(), v)),
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for LiftCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate ({})", if self.pass() { "pass" } else { "FAIL" })?;
        for c in &self.conditions {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_all_conditions_hold() {
        let mut c = LiftCertificate::default();
        assert!(!c.pass());
        c.push(Condition::below("a", 0.1, 0.2));
        c.push(Condition::above("b", 1.0, 0.5));
        assert!(c.pass());
        c.push(Condition::below("c", 0.2, 0.2));
        assert!(!c.pass());
        assert_eq!(c.failures().count(), 1);
        assert!((c.condition("b").unwrap().slack() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Condition::below("x", f64::NAN, 1.0).pass);
        assert!(!Condition::above("x", f64::NAN, 1.0).pass);
    }
}
