use std::f64::consts::TAU;

use crate::corepoly::Cx;
use crate::error::{invalid, Result};

/// Scalar function on the unit disc.
pub type ScalarFn<'a> = &'a (dyn Fn(Cx) -> Cx + Sync);

/// T(r, f) with its value on the doubled grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Characteristic {
    pub r: f64,
    pub n_theta: usize,
    pub value: f64,
    pub doubled: f64,
    pub converged: bool,
}

/// log⁺ t = max(log t, 0); log⁺ 0 = 0.
pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

fn trapezoid(f: ScalarFn<'_>, r: f64, n: usize) -> f64 {
    (0..n)
        .map(|k| log_plus(f(Cx::from_polar(r, TAU * k as f64 / n as f64)).norm()))
        .sum::<f64>()
        / n as f64
}

/// Trapezoidal T(r, f) = ∫ log⁺|f(re^{iθ})| dθ/2π on `n_theta` nodes,
/// flagged converged when the 2·n_theta value agrees to 1e−8·(1 + T).
///
/// # Errors
/// r outside [0, 1) or no nodes.
pub fn nevanlinna_t(f: ScalarFn<'_>, r: f64, n_theta: usize) -> Result<Characteristic> {
    if !(0.0..1.0).contains(&r) || n_theta == 0 {
        return Err(invalid(format!("need 0 ≤ r < 1 and nodes, got r = {r}, n = {n_theta}")));
    }
    let value = trapezoid(f, r, n_theta);
    let doubled = trapezoid(f, r, 2 * n_theta);
    Ok(Characteristic {
        r,
        n_theta,
        value,
        doubled,
        converged: (value - doubled).abs() <= 1e-8 * (1.0 + value.abs()),
    })
}

/// T(r, f) over a radius grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicCurve {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// |T_n − T_2n| per radius.
    pub quadrature_error: Vec<f64>,
    pub n_theta: usize,
}

impl CharacteristicCurve {
    /// Values never drop by more than `slack` plus twice the local
    /// quadrature error.
    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.values.windows(2).zip(self.quadrature_error.windows(2)).all(|(v, e)| {
            v[1] >= v[0] - slack - 2.0 * (e[0] + e[1])
        })
    }
}

/// # Errors
/// Radii not in [0, 1) or not increasing, or no nodes.
pub fn characteristic_curve(f: ScalarFn<'_>, radii: &[f64], n_theta: usize) -> Result<CharacteristicCurve> {
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("radii must increase"));
    }
    let mut values = Vec::with_capacity(radii.len());
    let mut quadrature_error = Vec::with_capacity(radii.len());
    for &r in radii {
        let c = nevanlinna_t(f, r, n_theta)?;
        values.push(c.doubled);
        quadrature_error.push((c.value - c.doubled).abs());
    }
    Ok(CharacteristicCurve {
        radii: radii.to_vec(),
        values,
        quadrature_error,
        n_theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_and_identity() {
        let two = |_: Cx| Cx::new(2.0, 0.0);
        assert!((nevanlinna_t(&two, 0.3, 64).unwrap().value - 2f64.ln()).abs() < 1e-10);
        let id = |z: Cx| z;
        assert_eq!(nevanlinna_t(&id, 0.9, 64).unwrap().value, 0.0);
        let dbl = |z: Cx| z * 2.0;
        assert!((nevanlinna_t(&dbl, 0.75, 64).unwrap().value - 1.5f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn exponential_closed_form() {
        let e = |z: Cx| z.exp();
        let c = nevanlinna_t(&e, 0.6, 4096).unwrap();
        assert!((c.doubled - 0.6 / PI).abs() < 1e-6);
    }

    #[test]
    fn zero_function() {
        let z = |_: Cx| Cx::new(0.0, 0.0);
        let c = nevanlinna_t(&z, 0.5, 8).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.converged);
    }

    #[test]
    fn curve_monotone() {
        let f = |z: Cx| (z * 3.0).exp() + z * z;
        let radii: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        let c = characteristic_curve(&f, &radii, 512).unwrap();
        assert!(c.is_nondecreasing(0.0));
        assert!(c.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn bad_radius() {
        let id = |z: Cx| z;
        assert!(nevanlinna_t(&id, 1.0, 8).is_err());
        assert!(nevanlinna_t(&id, 0.5, 0).is_err());
        assert!(characteristic_curve(&id, &[0.5, 0.2], 8).is_err());
    }
}
