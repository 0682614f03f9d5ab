use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::corepoly::{fourier::node, taylor_truncate, BoundaryGrid, Cx, PolyMap, C2};
use crate::error::{invalid, precondition, Result};

/// Largest admissible |λ_ζ(0)|.
pub const CENTER_TOL: f64 = 1e-10;

/// A family of holomorphic discs λ_ζ : Ū → Cⁿ, ζ ∈ T, with λ_ζ(0) = 0,
/// each given by its Taylor polynomial in w.
pub trait DiscFamily: Sync {
    /// λ_ζ as a polynomial in w.
    ///
    /// # Errors
    /// Implementation specific.
    fn disc(&self, zeta: Cx) -> Result<PolyMap>;
}

impl<F> DiscFamily for F
where
    F: Fn(Cx) -> Result<PolyMap> + Sync,
{
    fn disc(&self, zeta: Cx) -> Result<PolyMap> {
        self(zeta)
    }
}

/// Memoizes a family by node; nested power-of-two grids share entries.
pub struct CachedFamily<'a> {
    inner: &'a dyn DiscFamily,
    cache: Mutex<HashMap<(u64, u64), PolyMap>>,
}

impl<'a> CachedFamily<'a> {
    pub fn new(inner: &'a dyn DiscFamily) -> Self {
        CachedFamily {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Discs at all n nodes e^{2πik/n}, computed in parallel where missing.
    ///
    /// # Errors
    /// The first failing node, or a disc violating λ_ζ(0) = 0.
    pub fn discs_on(&self, n: usize) -> Result<Vec<PolyMap>> {
        let nodes: Vec<Cx> = (0..n).map(|k| node(k, n)).collect();
        let missing: Vec<Cx> = {
            let cache = self.cache.lock().expect("cache poisoned");
            nodes.iter().copied().filter(|z| !cache.contains_key(&key(*z))).collect()
        };
        let fresh: Vec<(Cx, PolyMap)> = missing
            .par_iter()
            .map(|z| Ok((*z, checked(self.inner, *z)?)))
            .collect::<Result<_>>()?;
        let mut cache = self.cache.lock().expect("cache poisoned");
        for (z, d) in fresh {
            cache.insert(key(z), d);
        }
        Ok(nodes.iter().map(|z| cache[&key(*z)].clone()).collect())
    }
}

impl DiscFamily for CachedFamily<'_> {
    fn disc(&self, zeta: Cx) -> Result<PolyMap> {
        if let Some(d) = self.cache.lock().expect("cache poisoned").get(&key(zeta)) {
            return Ok(d.clone());
        }
        let d = checked(self.inner, zeta)?;
        self.cache.lock().expect("cache poisoned").insert(key(zeta), d.clone());
        Ok(d)
    }
}

fn key(z: Cx) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

fn checked(f: &dyn DiscFamily, z: Cx) -> Result<PolyMap> {
    let d = f.disc(z)?;
    let a0 = d.coeffs()[0].norm();
    if a0 > CENTER_TOL {
        return Err(precondition(
            "disc family",
            format!("disc at ζ = {z} has |λ(0)| = {a0:.3e}"),
        ));
    }
    Ok(d)
}

/// Taylor data of a disc family at equispaced nodes of T.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscFamilySamples {
    nodes: Vec<Cx>,
    /// Per node, coefficients a_0..a_N (a_0 within [`CENTER_TOL`] of zero).
    coeffs: Vec<Vec<C2>>,
    /// Radius of the circle the Taylor data was read from.
    rescale: f64,
}

impl DiscFamilySamples {
    /// # Errors
    /// Empty or non-power-of-two node count, ragged data, or a nonzero
    /// constant term.
    pub fn new(coeffs: Vec<Vec<C2>>, rescale: f64) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(invalid(format!("{n} family nodes; need a power of two")));
        }
        let order = coeffs[0].len();
        if order == 0 || coeffs.iter().any(|c| c.len() != order) {
            return Err(invalid("ragged or empty Taylor data"));
        }
        if let Some(i) = coeffs.iter().position(|c| c[0].norm() > CENTER_TOL) {
            return Err(precondition(
                "DiscFamilySamples",
                format!("node {i} has constant term {:.3e}", coeffs[i][0].norm()),
            ));
        }
        Ok(DiscFamilySamples {
            nodes: (0..n).map(|k| node(k, n)).collect(),
            coeffs,
            rescale,
        })
    }

    /// Samples `family` at n nodes.
    ///
    /// # Errors
    /// Family failure or inconsistent data.
    pub fn from_family(family: &dyn DiscFamily, n: usize) -> Result<Self> {
        let discs = CachedFamily::new(family).discs_on(n)?;
        let order = discs.iter().map(|d| d.coeffs().len()).max().unwrap_or(1);
        let coeffs = discs
            .iter()
            .map(|d| (0..order).map(|k| d.coeffs().get(k).copied().unwrap_or(C2::ZERO)).collect())
            .collect();
        DiscFamilySamples::new(coeffs, 1.0)
    }

    /// Taylor data read off discs sampled on circles |w| = s, one per node.
    ///
    /// # Errors
    /// See [`taylor_truncate`].
    pub fn from_boundary_samples(discs: &[BoundaryGrid<C2>], order: usize) -> Result<Self> {
        let s = discs.first().map_or(1.0, |g| g.radius());
        let a = taylor_truncate(discs, order, CENTER_TOL)?;
        let coeffs = a
            .into_iter()
            .map(|row| std::iter::once(C2::ZERO).chain(row).collect())
            .collect();
        DiscFamilySamples::new(coeffs, s)
    }

    pub fn nodes(&self) -> &[Cx] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[Vec<C2>] {
        &self.coeffs
    }

    pub fn rescale(&self) -> f64 {
        self.rescale
    }

    /// Highest Taylor order stored.
    pub fn order(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    /// Values of a_j at the nodes.
    pub fn coefficient(&self, j: usize) -> Vec<C2> {
        self.coeffs.iter().map(|c| c[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corepoly::sample_disc;

    #[test]
    fn closure_family_and_cache() {
        let f = |z: Cx| PolyMap::new(vec![C2::ZERO, C2::new(z.conj(), Cx::new(0.0, 0.0))]);
        let cached = CachedFamily::new(&f);
        let a = cached.discs_on(8).unwrap();
        let b = cached.discs_on(16).unwrap();
        for k in 0..8 {
            assert_eq!(a[k], b[2 * k]);
        }
        let s = DiscFamilySamples::from_family(&f, 8).unwrap();
        assert_eq!(s.order(), 1);
        assert!((s.coefficient(1)[2].z1 - node(2, 8).conj()).norm() < 1e-15);
    }

    #[test]
    fn uncentered_disc_rejected() {
        let f = |_z: Cx| PolyMap::new(vec![C2::real(1.0, 0.0)]);
        assert!(CachedFamily::new(&f).discs_on(4).is_err());
        assert!(DiscFamilySamples::new(vec![vec![C2::real(1.0, 0.0)]], 1.0).is_err());
        assert!(DiscFamilySamples::new(vec![vec![C2::ZERO]; 3], 1.0).is_err());
    }

    #[test]
    fn from_sampled_circles() {
        let grids: Vec<_> = (0..4)
            .map(|k| {
                let z = node(k, 4);
                sample_disc(0.9, 32, |w| C2::new(z * w, w * w)).unwrap()
            })
            .collect();
        let s = DiscFamilySamples::from_boundary_samples(&grids, 4).unwrap();
        assert_eq!(s.rescale(), 0.9);
        assert!((s.coeffs()[1][1].z1 - node(1, 4)).norm() < 1e-12);
        assert!((s.coeffs()[3][2].z2 - Cx::new(1.0, 0.0)).norm() < 1e-12);
    }
}
