use crate::corepoly::{PolyMap, C2};
use crate::error::{invalid, precondition, Result};
use crate::levigeom::rho_cone;

/// Boundary statistics of ρ_1∘f and ρ_c∘f on one circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleReport {
    pub radius: f64,
    /// Trapezoidal mean of ρ_1(f(re^{iθ})).
    pub mean_rho1: f64,
    pub min_rho1: f64,
    pub min_rho_c: f64,
}

/// Mean-value evidence that no disc is proper in {ρ_c > 0} for c ≥ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FalsifyReport {
    pub c: f64,
    /// ρ_1(f(0)).
    pub center_rho1: f64,
    pub circles: Vec<CircleReport>,
}

impl FalsifyReport {
    /// Largest |mean − ρ_1(f(0))| over the circles.
    pub fn mean_error(&self) -> f64 {
        self.circles
            .iter()
            .map(|c| (c.mean_rho1 - self.center_rho1).abs())
            .fold(0.0, f64::max)
    }

    /// min ρ_c ≤ min ρ_1 ≤ mean on every circle, up to `tol`.
    pub fn ordered(&self, tol: f64) -> bool {
        self.circles
            .iter()
            .all(|c| c.min_rho_c <= c.min_rho1 + tol && c.min_rho1 <= c.mean_rho1 + tol)
    }

    /// Every circle's boundary minimum of ρ_c is at most the center value
    /// (up to `tol`).
    pub fn minima_bounded_by_center(&self, tol: f64) -> bool {
        self.circles.iter().all(|c| c.min_rho_c <= self.center_rho1 + tol)
    }
}

/// ρ_1 = Re(z1² + z2²), harmonic along holomorphic discs.
pub fn rho_one(z: &C2) -> f64 {
    (z.z1 * z.z1 + z.z2 * z.z2).re
}

/// Samples ρ_1∘f and ρ_c∘f on circles |ζ| = r with n nodes each.
///
/// # Errors
/// c < 1, a radius outside (0, 1], or n = 0.
pub fn falsify_c_ge_1(f: &PolyMap, c: f64, radii: &[f64], n: usize) -> Result<FalsifyReport> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(precondition("falsify_c_ge_1", format!("needs c ≥ 1, got {c}")));
    }
    if n == 0 {
        return Err(invalid("need at least one node"));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(invalid(format!("radius {r} outside (0, 1]")));
    }
    let circles = radii
        .iter()
        .map(|&r| {
            let vals = f.sample_circle(r, n);
            let r1: Vec<f64> = vals.iter().map(rho_one).collect();
            CircleReport {
                radius: r,
                mean_rho1: r1.iter().sum::<f64>() / n as f64,
                min_rho1: r1.iter().copied().fold(f64::INFINITY, f64::min),
                min_rho_c: vals.iter().map(|z| rho_cone(c, z)).fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    Ok(FalsifyReport {
        c,
        center_rho1: rho_one(&f.eval(0.0.into())),
        circles,
    })
}
