use crate::corepoly::{Cx, C2};
use crate::error::{invalid, precondition, Result};

/// ρ_c(z) = |x|² − c|y|² on C², z = x + iy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeFunction {
    c: f64,
}

impl ConeFunction {
    /// # Errors
    /// Non-finite c.
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid(format!("cone parameter {c} is not finite")));
        }
        Ok(ConeFunction { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rho(&self, z: &C2) -> f64 {
        rho_cone(self.c, z)
    }

    /// Componentwise h(x + iy) = x + icy.
    pub fn h(&self, z: &C2) -> C2 {
        C2::new(h_scalar(self.c, z.z1), h_scalar(self.c, z.z2))
    }

    /// κ = (1 + c)/2, the coefficient of w₁² + w₂² in the Levi polynomial.
    pub fn kappa(&self) -> f64 {
        0.5 * (1.0 + self.c)
    }

    /// (1 − c)/2: the Levi form of ρ_c is this multiple of |w|².
    pub fn levi_scalar(&self) -> f64 {
        0.5 * (1.0 - self.c)
    }

    pub fn is_strongly_psh(&self) -> bool {
        self.c < 1.0
    }

    /// # Errors
    /// c ≥ 1.
    pub fn require_strong(&self, op: &'static str) -> Result<()> {
        if self.is_strongly_psh() {
            Ok(())
        } else {
            Err(precondition(op, format!("needs c < 1, got c = {}", self.c)))
        }
    }
}

/// Exact evaluation of ρ_c.
pub fn rho_cone(c: f64, z: &C2) -> f64 {
    z.z1.re * z.z1.re + z.z2.re * z.z2.re - c * (z.z1.im * z.z1.im + z.z2.im * z.z2.im)
}

pub(crate) fn h_scalar(c: f64, z: Cx) -> Cx {
    Cx::new(z.re, c * z.im)
}
