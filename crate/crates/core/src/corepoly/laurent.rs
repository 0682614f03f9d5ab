use super::c2::{Cx, C2};
use super::fourier::{dft_coeffs, fft_inverse, interpolate_to};
use super::poly::BoundaryGrid;
use crate::error::{invalid, precondition, Result};

/// Coefficients of Σ_{k=-M}^{N} c_k ζ^k, stored from frequency −M upward.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentCoeffs {
    low_freq: usize,
    coeffs: Vec<Cx>,
    /// Sup distance to the trigonometric interpolant of the input on the doubled grid.
    pub sup_error: f64,
    /// Set when `sup_error` exceeds the requested tolerance.
    pub failed: bool,
}

impl LaurentCoeffs {
    /// # Errors
    /// Empty or non-finite coefficient list.
    pub fn new(low_freq: usize, coeffs: Vec<Cx>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("Laurent band is empty"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite Laurent coefficient"));
        }
        Ok(LaurentCoeffs {
            low_freq,
            coeffs,
            sup_error: 0.0,
            failed: false,
        })
    }

    pub fn low_freq(&self) -> usize {
        self.low_freq
    }

    pub fn high_freq(&self) -> i64 {
        self.coeffs.len() as i64 - 1 - self.low_freq as i64
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    /// Coefficient of ζ^k (zero outside the band).
    pub fn coeff(&self, k: i64) -> Cx {
        let i = k + self.low_freq as i64;
        if i < 0 || i as usize >= self.coeffs.len() {
            Cx::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn eval(&self, z: Cx) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(-(self.low_freq as i32))
    }

    /// Values at the n nodes of the unit circle.
    pub fn eval_grid(&self, n: usize) -> Vec<Cx> {
        let mut spec = vec![Cx::new(0.0, 0.0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i as i64 - self.low_freq as i64;
            spec[k.rem_euclid(n as i64) as usize] += c;
        }
        fft_inverse(&mut spec);
        spec
    }
}

/// Discrete Fourier coefficients of `samples` (on the unit circle) in the
/// band −M..N, with the sup error against the full trigonometric
/// interpolant measured on the doubled grid.
///
/// # Errors
/// N < −M or a grid too coarse for the band (n ≤ 2(M+N)).
pub fn trig_approx(samples: &BoundaryGrid<Cx>, low_freq: usize, band: i64, tol: f64) -> Result<LaurentCoeffs> {
    let m = low_freq as i64;
    if band < -m {
        return Err(invalid(format!("band {band} below −{m}")));
    }
    let n = samples.n_theta();
    if (n as i64) <= 2 * (m + band) {
        return Err(invalid(format!("grid of {n} nodes too coarse for band −{m}..{band}")));
    }
    let c = dft_coeffs(samples.values());
    let coeffs: Vec<Cx> = (-m..=band)
        .map(|k| c[k.rem_euclid(n as i64) as usize])
        .collect();
    let mut out = LaurentCoeffs::new(low_freq, coeffs)?;
    let fine = interpolate_to(samples.values(), 2 * n);
    let approx = out.eval_grid(2 * n);
    out.sup_error = fine
        .iter()
        .zip(&approx)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    out.failed = !(out.sup_error <= tol);
    Ok(out)
}

/// Samples w ↦ λ(w) on the n-node circle |w| = s.
///
/// # Errors
/// n not a power of two.
pub fn sample_disc(s: f64, n: usize, lambda: impl Fn(Cx) -> C2) -> Result<BoundaryGrid<C2>> {
    BoundaryGrid::sample(s, n, lambda)
}

/// Taylor coefficients a_1..a_N of each sampled disc, computed by discrete
/// Fourier analysis on its sampling circle |w| = s.
///
/// # Errors
/// Inconsistent input, or a disc whose constant term exceeds `tol`.
pub fn taylor_truncate(discs: &[BoundaryGrid<C2>], order: usize, tol: f64) -> Result<Vec<Vec<C2>>> {
    discs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let s = g.radius();
            let n = g.n_theta();
            if !(s > 0.0) || n < 2 * (order + 1) {
                return Err(invalid(format!(
                    "disc {i}: need positive radius and at least {} samples",
                    2 * (order + 1)
                )));
            }
            let v1: Vec<Cx> = g.values().iter().map(|v| v.z1).collect();
            let v2: Vec<Cx> = g.values().iter().map(|v| v.z2).collect();
            let c1 = dft_coeffs(&v1);
            let c2 = dft_coeffs(&v2);
            let a0 = C2::new(c1[0], c2[0]).norm();
            if a0 > tol {
                return Err(precondition(
                    "taylor_truncate",
                    format!("disc {i} has constant term {a0:.3e} above {tol:.1e}"),
                ));
            }
            let mut sk = 1.0;
            Ok((1..=order)
                .map(|k| {
                    sk *= s;
                    C2::new(c1[k], c2[k]) / sk
                })
                .collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corepoly::fourier::node;

    #[test]
    fn monomial_inverse() {
        let g = BoundaryGrid::sample(1.0, 64, |z: Cx| z.inv()).unwrap();
        let l = trig_approx(&g, 1, 10, 1e-12).unwrap();
        assert!((l.coeff(-1) - Cx::new(1.0, 0.0)).norm() < 1e-12);
        for k in 0..=10 {
            assert!(l.coeff(k).norm() < 1e-12);
        }
        assert!(!l.failed);
    }

    #[test]
    fn constant_function() {
        let g = BoundaryGrid::sample(1.0, 16, |_| Cx::new(3.0, 0.0)).unwrap();
        let l = trig_approx(&g, 0, 3, 1e-12).unwrap();
        assert!((l.coeff(0) - Cx::new(3.0, 0.0)).norm() < 1e-12);
        assert!(l.sup_error <= 1e-12);
    }

    #[test]
    fn geometric_series() {
        let g = BoundaryGrid::sample(1.0, 256, |z: Cx| (Cx::new(2.0, 0.0) - z).inv()).unwrap();
        let l = trig_approx(&g, 0, 20, 1e-5).unwrap();
        for k in 0..=20 {
            let want = 0.5f64.powi(k as i32 + 1);
            assert!((l.coeff(k) - Cx::new(want, 0.0)).norm() < 1e-10, "k={k}");
        }
        assert!(l.sup_error <= 1e-5);
        assert!(!l.failed);
        let tight = trig_approx(&g, 0, 20, 1e-9).unwrap();
        assert!(tight.failed);
    }

    #[test]
    fn band_checks() {
        let g = BoundaryGrid::sample(1.0, 16, |z| z).unwrap();
        assert!(trig_approx(&g, 0, -1, 1.0).is_err());
        assert!(trig_approx(&g, 4, 4, 1.0).is_err());
    }

    #[test]
    fn taylor_of_sine() {
        let d = sample_disc(0.95, 64, |w| C2::new(w.sin(), Cx::new(0.0, 0.0))).unwrap();
        let a = taylor_truncate(&[d], 5, 1e-12).unwrap();
        assert!((a[0][0].z1 - Cx::new(1.0, 0.0)).norm() < 1e-10);
        assert!(a[0][1].z1.norm() < 1e-10);
        assert!((a[0][2].z1 + Cx::new(1.0 / 6.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn node_dependent_coefficient() {
        let nodes: Vec<Cx> = (0..8).map(|k| node(k, 8)).collect();
        let discs: Vec<_> = nodes
            .iter()
            .map(|z| sample_disc(0.95, 16, |w| C2::new(z.conj() * w * w, Cx::new(0.0, 0.0))).unwrap())
            .collect();
        let a = taylor_truncate(&discs, 3, 1e-12).unwrap();
        for (z, ai) in nodes.iter().zip(&a) {
            assert!((ai[1].z1 - z.conj()).norm() < 1e-12);
            assert!(ai[0].norm() < 1e-12 && ai[2].norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_uncentered_disc() {
        let d = sample_disc(0.95, 16, |w| C2::new(w + 1.0, Cx::new(0.0, 0.0))).unwrap();
        assert!(taylor_truncate(&[d], 3, 1e-10).is_err());
    }
}
