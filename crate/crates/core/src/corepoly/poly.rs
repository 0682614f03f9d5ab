use std::ops::{Add, Sub};

use super::c2::{Cx, C2};
use super::fourier::{circle_values_c2, is_pow2, node};
use crate::error::{invalid, Result};

/// Polynomial map ζ ↦ Σ_k c_k ζ^k from C to C².
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    coeffs: Vec<C2>,
}

impl PolyMap {
    /// Builds a map from its coefficient list (index k holds the ζ^k term).
    ///
    /// # Errors
    /// Empty list or a non-finite coefficient.
    pub fn new(coeffs: Vec<C2>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("PolyMap needs at least one coefficient"));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!("PolyMap coefficient {k} is not finite")));
        }
        Ok(PolyMap { coeffs })
    }

    pub fn constant(p: C2) -> Self {
        PolyMap { coeffs: vec![p] }
    }

    pub fn zero() -> Self {
        PolyMap::constant(C2::ZERO)
    }

    /// Map with the given component coefficient lists (shorter list padded).
    ///
    /// # Errors
    /// Both lists empty or a non-finite coefficient.
    pub fn from_components(f1: &[Cx], f2: &[Cx]) -> Result<Self> {
        let n = f1.len().max(f2.len());
        let zero = Cx::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|k| {
                C2::new(
                    f1.get(k).copied().unwrap_or(zero),
                    f2.get(k).copied().unwrap_or(zero),
                )
            })
            .collect();
        PolyMap::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C2] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn component(&self, j: usize) -> Vec<Cx> {
        self.coeffs.iter().map(|c| c.get(j)).collect()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Cx) -> C2 {
        let mut acc = C2::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + *c;
        }
        acc
    }

    pub fn derivative(&self) -> PolyMap {
        if self.coeffs.len() == 1 {
            return PolyMap::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| *c * k as f64)
            .collect();
        PolyMap { coeffs }
    }

    /// Drops trailing coefficients of norm ≤ tol (keeps at least one).
    pub fn trimmed(&self, tol: f64) -> PolyMap {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() <= tol) {
            coeffs.pop();
        }
        PolyMap { coeffs }
    }

    pub fn translated(&self, v: C2) -> PolyMap {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += v;
        PolyMap { coeffs }
    }

    /// Values on the n-node circle of radius r via coefficient folding and
    /// one FFT per component; O(degree + n log n).
    pub fn sample_circle(&self, r: f64, n: usize) -> Vec<C2> {
        circle_values_c2(&self.coeffs, r, n)
    }

    /// Sum of coefficient norms times r^k: a bound for sup_{|ζ|≤r} |P|.
    pub fn majorant(&self, r: f64) -> f64 {
        let mut rk = 1.0;
        let mut s = 0.0;
        for c in &self.coeffs {
            s += c.norm() * rk;
            rk *= r;
        }
        s
    }
}

impl Add for &PolyMap {
    type Output = PolyMap;
    fn add(self, o: &PolyMap) -> PolyMap {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(C2::ZERO)
                    + o.coeffs.get(k).copied().unwrap_or(C2::ZERO)
            })
            .collect();
        PolyMap { coeffs }
    }
}

impl Sub for &PolyMap {
    type Output = PolyMap;
    fn sub(self, o: &PolyMap) -> PolyMap {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(C2::ZERO)
                    - o.coeffs.get(k).copied().unwrap_or(C2::ZERO)
            })
            .collect();
        PolyMap { coeffs }
    }
}

/// Samples on the equispaced nodes r·e^{2πik/n} of one circle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid<T = Cx> {
    n_theta: usize,
    radius: f64,
    values: Vec<T>,
}

impl<T> BoundaryGrid<T> {
    /// # Errors
    /// n not a power of two, or value count different from n.
    pub fn new(radius: f64, values: Vec<T>) -> Result<Self> {
        let n = values.len();
        if !is_pow2(n) {
            return Err(invalid(format!("grid size {n} is not a power of two")));
        }
        Ok(BoundaryGrid {
            n_theta: n,
            radius,
            values,
        })
    }

    /// Samples `f` at the nodes of the n-node circle of radius r.
    ///
    /// # Errors
    /// n not a power of two.
    pub fn sample(radius: f64, n: usize, f: impl Fn(Cx) -> T) -> Result<Self> {
        if !is_pow2(n) {
            return Err(invalid(format!("grid size {n} is not a power of two")));
        }
        let values = (0..n).map(|k| f(node(k, n) * radius)).collect();
        Ok(BoundaryGrid {
            n_theta: n,
            radius,
            values,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn node(&self, k: usize) -> Cx {
        node(k, self.n_theta) * self.radius
    }

    pub fn component(&self, j: usize) -> BoundaryGrid<Cx>
    where
        T: Copy + Into<C2>,
    {
        BoundaryGrid {
            n_theta: self.n_theta,
            radius: self.radius,
            values: self.values.iter().map(|v| (*v).into().get(j)).collect(),
        }
    }
}

/// Horner evaluation of `map` at n equispaced nodes on each radius.
///
/// # Errors
/// Empty radius list, a radius outside (0, 1], or n not a power of two.
pub fn eval_and_sample(map: &PolyMap, radii: &[f64], n_theta: usize) -> Result<Vec<BoundaryGrid<C2>>> {
    if radii.is_empty() {
        return Err(invalid("empty radius list"));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(invalid(format!("radius {r} outside (0, 1]")));
    }
    radii
        .iter()
        .map(|&r| BoundaryGrid::sample(r, n_theta, |z| map.eval(z)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    #[test]
    fn evaluates_simple_map() {
        let p = PolyMap::from_components(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let v = p.eval(c(0.0, 1.0));
        assert_eq!(v, C2::new(c(1.0, 0.0), c(0.0, 1.0)));
    }

    #[test]
    fn identity_gives_roots_of_unity() {
        let p = PolyMap::from_components(&[c(0.0, 0.0), c(1.0, 0.0)], &[]).unwrap();
        let g = eval_and_sample(&p, &[1.0], 8).unwrap();
        for (k, v) in g[0].values().iter().enumerate() {
            let w = Cx::from_polar(1.0, std::f64::consts::TAU * k as f64 / 8.0);
            assert!((v.z1 - w).norm() < 1e-15);
        }
    }

    #[test]
    fn counts_samples() {
        let p = PolyMap::constant(C2::ZERO);
        let g = eval_and_sample(&p, &[0.5, 1.0], 4).unwrap();
        assert_eq!(g.iter().map(|g| g.values().len()).sum::<usize>(), 8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PolyMap::new(vec![]).is_err());
        assert!(PolyMap::new(vec![C2::new(c(f64::NAN, 0.0), c(0.0, 0.0))]).is_err());
        let p = PolyMap::zero();
        assert!(eval_and_sample(&p, &[], 8).is_err());
        assert!(eval_and_sample(&p, &[1.0], 12).is_err());
        assert!(eval_and_sample(&p, &[1.5], 8).is_err());
    }

    #[test]
    fn degree_is_last_index() {
        let p = PolyMap::new(vec![C2::ZERO, C2::ZERO, C2::real(1.0, 0.0)]).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(PolyMap::zero().degree(), 0);
        assert_eq!(p.derivative().coeffs()[1], C2::real(2.0, 0.0));
    }
}
