use crate::corepoly::{Cx, PolyMap, C2};
use crate::error::{invalid, Error, Result};

use super::model::rho_max;

/// f = (e^{g₁}, e^{g₂}) sampled on a polar grid, kept in log-modulus form
/// u + iv so that large u does not overflow.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpDisc {
    pub g: PolyMap,
    pub radii: Vec<f64>,
    pub n_theta: usize,
    /// g on the grid, one row per radius; u_j = Re, v_j = Im.
    pub values: Vec<Vec<C2>>,
    /// max over nodes of ||f_j| − e^{u_j}| / max(1, e^{u_j}), where e^{u_j} is finite.
    pub modulus_error: f64,
    /// max over nodes of |log max(|f₁|, |f₂|) − ρ_max(g)|, where finite.
    pub log_error: f64,
}

impl ExpDisc {
    /// u_j at grid point (ring, node).
    pub fn u(&self, ring: usize, k: usize) -> [f64; 2] {
        self.values[ring][k].re()
    }

    /// f at grid point (ring, node); components overflow to infinity
    /// beyond e^{709}.
    pub fn f(&self, ring: usize, k: usize) -> C2 {
        exp2(&self.values[ring][k])
    }

    /// f at an arbitrary point of Ū.
    pub fn eval(&self, zeta: Cx) -> C2 {
        exp2(&self.g.eval(zeta))
    }

    /// log max(|f₁|, |f₂|) = max(u₁, u₂) at (ring, node), without overflow.
    pub fn log_max_modulus(&self, ring: usize, k: usize) -> f64 {
        rho_max(&self.values[ring][k])
    }

    /// min over the grid of min(e^{u₁}, e^{u₂}), as a logarithm.
    pub fn log_min_modulus(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|w| w.re()[0].min(w.re()[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.modulus_error <= tol && self.log_error <= tol
    }
}

fn exp2(w: &C2) -> C2 {
    C2::new(w.z1.exp(), w.z2.exp())
}

/// # Errors
/// Empty grid, a radius outside [0, 1], or non-finite u at some node.
pub fn exponentiate(g: &PolyMap, radii: &[f64], n_theta: usize) -> Result<ExpDisc> {
    if radii.is_empty() || n_theta == 0 || radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(invalid("need radii in [0, 1] and at least one node"));
    }
    let values: Vec<Vec<C2>> = radii.iter().map(|&r| g.sample_circle(r, n_theta)).collect();
    let mut modulus_error = 0.0f64;
    let mut log_error = 0.0f64;
    for w in values.iter().flatten() {
        if !w.is_finite() {
            return Err(Error::Numerical(format!("non-finite exponent {w:?}")));
        }
        let f = exp2(w);
        let u = w.re();
        for j in 0..2 {
            let eu = u[j].exp();
            if eu.is_finite() {
                let m = f.get(j).norm();
                modulus_error = modulus_error.max((m - eu).abs() / eu.max(1.0));
            }
        }
        let big = f.z1.norm().max(f.z2.norm());
        if big.is_finite() && big > 0.0 {
            log_error = log_error.max((big.ln() - rho_max(w)).abs());
        }
    }
    Ok(ExpDisc {
        g: g.clone(),
        radii: radii.to_vec(),
        n_theta,
        values,
        modulus_error,
        log_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_exponent() {
        let e = exponentiate(&PolyMap::zero(), &[0.0, 0.5, 1.0], 8).unwrap();
        assert_eq!(e.f(2, 3), C2::real(1.0, 1.0));
        assert_eq!(e.u(1, 0), [0.0, 0.0]);
        assert_eq!(e.log_max_modulus(0, 0), 0.0);
    }

    #[test]
    fn identities_hold() {
        let g = PolyMap::from_components(
            &[Cx::new(0.3, 0.0), Cx::new(2.0, 1.0), Cx::new(0.0, -1.5)],
            &[Cx::new(-1.0, 0.5), Cx::new(0.0, 3.0)],
        )
        .unwrap();
        let e = exponentiate(&g, &[0.25, 0.5, 0.75, 1.0], 64).unwrap();
        assert!(e.modulus_error <= 1e-10, "{}", e.modulus_error);
        assert!(e.log_error <= 1e-10, "{}", e.log_error);
        assert!(e.pass(1e-10));
    }

    #[test]
    fn large_exponent_in_log_form() {
        let g = PolyMap::constant(C2::real(800.0, -800.0));
        let e = exponentiate(&g, &[1.0], 4).unwrap();
        assert_eq!(e.log_max_modulus(0, 0), 800.0);
        assert!(e.f(0, 0).z1.re.is_infinite());
        assert_eq!(e.log_min_modulus(), -800.0);
    }

    #[test]
    fn bad_grid() {
        assert!(exponentiate(&PolyMap::zero(), &[], 4).is_err());
        assert!(exponentiate(&PolyMap::zero(), &[1.5], 4).is_err());
    }
}
