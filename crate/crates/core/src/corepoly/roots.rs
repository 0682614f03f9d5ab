use nalgebra::DMatrix;

use super::c2::Cx;
use crate::error::{invalid, Error, Result};

/// Horner evaluation of Σ c_k z^k and its derivative.
pub fn horner(coeffs: &[Cx], z: Cx) -> (Cx, Cx) {
    let mut p = Cx::new(0.0, 0.0);
    let mut dp = Cx::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + *c;
    }
    (p, dp)
}

/// Roots of Σ c_k z^k (index k holds the z^k coefficient), with
/// multiplicity, from the eigenvalues of the companion matrix followed by
/// a few Newton steps each.
///
/// # Errors
/// A constant or identically zero polynomial, or a failed eigenvalue solve.
pub fn poly_roots(coeffs: &[Cx]) -> Result<Vec<Cx>> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let deg = coeffs
        .iter()
        .rposition(|c| c.norm() > 1e-14 * scale)
        .ok_or_else(|| invalid("zero polynomial has no isolated roots"))?;
    if deg == 0 {
        return Err(invalid("constant polynomial has no roots"));
    }
    let lead = coeffs[deg];
    let mut m = DMatrix::<Cx>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Cx::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let eig = m
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("companion eigenvalues did not converge".into()))?;
    let p = &coeffs[..=deg];
    Ok(eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..8 {
                let (v, dv) = horner(p, z);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = v / dv;
                let next = z - step;
                if !next.is_finite() || horner(p, next).0.norm() > v.norm() {
                    break;
                }
                z = next;
                if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                    break;
                }
            }
            z
        })
        .collect())
}

/// Quotient of Σ c_k z^k by (z − a), dropping the remainder.
pub fn deflate(coeffs: &[Cx], a: Cx) -> (Vec<Cx>, Cx) {
    let n = coeffs.len();
    if n <= 1 {
        return (vec![Cx::new(0.0, 0.0)], coeffs.first().copied().unwrap_or_default());
    }
    let mut q = vec![Cx::new(0.0, 0.0); n - 1];
    let mut acc = coeffs[n - 1];
    for k in (0..n - 1).rev() {
        q[k] = acc;
        acc = coeffs[k] + acc * a;
    }
    (q, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn roots_of_known_cubic() {
        // (z − 1)(z + 2)(z − i)
        let r = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)];
        let mut p = vec![c(1.0, 0.0)];
        for a in r {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (k, pk) in p.iter().enumerate() {
                q[k + 1] += *pk;
                q[k] -= *pk * a;
            }
            p = q;
        }
        let got = poly_roots(&p).unwrap();
        for a in r {
            assert!(got.iter().any(|z| (z - a).norm() < 1e-12));
        }
    }

    #[test]
    fn deflation_is_exact_for_a_root() {
        let p = [c(-2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]; // (z − 1)(z + 2)
        let (q, rem) = deflate(&p, c(1.0, 0.0));
        assert!(rem.norm() < 1e-15);
        assert_eq!(q, vec![c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn constants_rejected() {
        assert!(poly_roots(&[c(5.0, 0.0)]).is_err());
        assert!(poly_roots(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }
}
