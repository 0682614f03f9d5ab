use std::f64::consts::TAU;

use super::cone::ConeFunction;
use super::critical::solve_critical;
use crate::corepoly::{Cx, PlanarDomain, C2};
use crate::error::{invalid, precondition, Error, Result};

/// Parameters u with |1 + u²| below this are outside the chart.
pub const CHART_CLIP: f64 = 1e-6;

/// Which affine direction parametrizes the quadric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartKind {
    /// w(u) = t(u)·(1, u).
    Default,
    /// w(u) = t(u)·(u, 1).
    Swapped,
}

/// Levi polynomial Q_z(w) = 2h(z)·w + κ(w₁² + w₂²) of ρ_c at a base point,
/// with a rational parametrization of the quadric Λ_z = {Q_z = 0}.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviChart {
    cone: ConeFunction,
    base: C2,
    rho_base: f64,
    h: C2,
    kind: ChartKind,
    u0: Cx,
}

/// Builds the chart at z, choosing the affine direction that keeps u0
/// inside the closed unit disc.
///
/// # Errors
/// Non-finite input, a vanishing gradient (h(z) = 0, e.g. z = 0), or a
/// degenerate quadric (c = −1).
pub fn levi_chart(c: f64, z: C2) -> Result<LeviChart> {
    let cone = ConeFunction::new(c)?;
    if !z.is_finite() {
        return Err(invalid("non-finite base point"));
    }
    let h = cone.h(&z);
    if h.norm() == 0.0 {
        return Err(precondition(
            "levi_chart",
            format!("ρ_c has a critical point at the base point {z:?}"),
        ));
    }
    if cone.kappa().abs() < 1e-12 {
        return Err(precondition("levi_chart", "quadric degenerates to a line at c = −1"));
    }
    let (kind, u0) = if h.z2.norm() >= h.z1.norm() {
        (ChartKind::Default, -h.z1 / h.z2)
    } else {
        (ChartKind::Swapped, -h.z2 / h.z1)
    };
    Ok(LeviChart {
        cone,
        base: z,
        rho_base: cone.rho(&z),
        h,
        kind,
        u0,
    })
}

impl LeviChart {
    pub fn cone(&self) -> ConeFunction {
        self.cone
    }

    pub fn c(&self) -> f64 {
        self.cone.c()
    }

    pub fn base(&self) -> C2 {
        self.base
    }

    pub fn rho_base(&self) -> f64 {
        self.rho_base
    }

    /// (2h(z₁), 2h(z₂)).
    pub fn lin_coeffs(&self) -> C2 {
        self.h * 2.0
    }

    pub fn quad_coeff(&self) -> f64 {
        self.cone.kappa()
    }

    pub fn levi_scalar(&self) -> f64 {
        self.cone.levi_scalar()
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn u0(&self) -> Cx {
        self.u0
    }

    /// The same chart with the other affine direction.
    pub fn swapped(&self) -> LeviChart {
        let (kind, u0) = match self.kind {
            ChartKind::Default => (ChartKind::Swapped, -self.h.z2 / self.h.z1),
            ChartKind::Swapped => (ChartKind::Default, -self.h.z1 / self.h.z2),
        };
        LeviChart {
            kind,
            u0,
            ..self.clone()
        }
    }

    /// Q_z(w).
    pub fn levi_poly(&self, w: C2) -> Cx {
        self.lin_coeffs().dot(&w) + self.quad_coeff() * (w.z1 * w.z1 + w.z2 * w.z2)
    }

    /// Levi form (1 − c)/2·|w|².
    pub fn levi_form(&self, w: C2) -> f64 {
        self.levi_scalar() * w.norm_sqr()
    }

    /// ρ_c(z + w) − ρ_c(z).
    pub fn gain(&self, w: C2) -> f64 {
        self.cone.rho(&(self.base + w)) - self.rho_base
    }

    /// Complex tangent direction (h(z₂), −h(z₁)) of Λ_z at 0.
    pub fn tangent(&self) -> C2 {
        C2::new(self.h.z2, -self.h.z1)
    }

    /// Point of Λ_z with parameter u; None where |1 + u²| < [`CHART_CLIP`].
    pub fn w(&self, u: Cx) -> Option<C2> {
        chart_point(self.kind, self.h, self.quad_coeff(), u)
    }

    /// dw/du; None outside the chart.
    pub fn dw(&self, u: Cx) -> Option<C2> {
        let one = Cx::new(1.0, 0.0);
        let q = one + u * u;
        if q.norm() < CHART_CLIP {
            return None;
        }
        let k = self.quad_coeff();
        let (a, b) = match self.kind {
            ChartKind::Default => (self.h.z1, self.h.z2),
            ChartKind::Swapped => (self.h.z2, self.h.z1),
        };
        let t = -2.0 * (a + b * u) / (k * q);
        let dt = -2.0 * (b * q - (a + b * u) * 2.0 * u) / (k * q * q);
        let (d1, d2) = (dt, t + dt * u);
        Some(match self.kind {
            ChartKind::Default => C2::new(d1, d2),
            ChartKind::Swapped => C2::new(d2, d1),
        })
    }

    /// Radius R with {w ∈ Λ_z : ρ_c(z + w) − ρ_c(z) < C} = {|w| < R}.
    pub fn sublevel_radius(&self, level: f64) -> f64 {
        (level / self.levi_scalar()).sqrt()
    }
}

pub(crate) fn chart_point(kind: ChartKind, h: C2, kappa: f64, u: Cx) -> Option<C2> {
    let q = Cx::new(1.0, 0.0) + u * u;
    if q.norm() < CHART_CLIP {
        return None;
    }
    Some(match kind {
        ChartKind::Default => {
            let t = -2.0 * (h.z1 + h.z2 * u) / (kappa * q);
            C2::new(t, t * u)
        }
        ChartKind::Swapped => {
            let t = -2.0 * (h.z1 * u + h.z2) / (kappa * q);
            C2::new(t * u, t)
        }
    })
}

/// Options for [`sublevel_component_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct SublevelOptions {
    /// Number of rays from u0 (power of two).
    pub rays: usize,
    /// Critical threshold to use instead of running the oracle.
    pub threshold: Option<f64>,
}

impl Default for SublevelOptions {
    fn default() -> Self {
        SublevelOptions {
            rays: 256,
            threshold: None,
        }
    }
}

/// Component of {u : ρ_c(z + w(u)) − ρ_c(z) < C} containing u0, traced
/// along rays from u0.
///
/// # Errors
/// See [`sublevel_component_with`].
pub fn sublevel_component(chart: &LeviChart, level: f64) -> Result<PlanarDomain> {
    sublevel_component_with(chart, level, &SublevelOptions::default())
}

/// # Errors
/// c ≥ 1; a non-positive level; a level at or above the critical threshold
/// ([`Error::AboveThreshold`]); a ray along which |w| is not increasing up
/// to the boundary or never reaches it.
pub fn sublevel_component_with(chart: &LeviChart, level: f64, opts: &SublevelOptions) -> Result<PlanarDomain> {
    chart.cone.require_strong("sublevel_component")?;
    if !(level > 0.0) || !level.is_finite() {
        return Err(invalid(format!("sublevel {level} must be positive")));
    }
    let threshold = match opts.threshold {
        Some(t) => t,
        None => solve_critical(chart.c(), chart.base)?.threshold(),
    };
    if level >= threshold {
        return Err(Error::AboveThreshold { level, threshold });
    }
    let r = chart.sublevel_radius(level);
    let r2 = r * r;
    let u0 = chart.u0;
    let speed = chart.dw(u0).map_or(1.0, |d| d.norm()).max(1e-300);
    let step0 = r / speed / 64.0;
    let smax = 1e6 * (1.0 + u0.norm()) + 1e3 * step0;
    let f = |s: f64, d: Cx| chart.w(u0 + d * s).map_or(f64::INFINITY, |w| w.norm_sqr() - r2);
    let n = opts.rays;
    let mut radii = Vec::with_capacity(n);
    for k in 0..n {
        let d = Cx::from_polar(1.0, TAU * k as f64 / n as f64);
        let (mut lo, mut flo) = (0.0, -r2);
        let mut hi = step0;
        loop {
            let fh = f(hi, d);
            if fh >= 0.0 {
                break;
            }
            if fh <= flo {
                return Err(Error::Numerical(format!(
                    "sublevel set is not star-shaped about u0 in the chart (ray {k})"
                )));
            }
            lo = hi;
            flo = fh;
            hi *= 1.1;
            if hi > smax {
                return Err(Error::Numerical(format!("ray {k} does not leave the sublevel set")));
            }
        }
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if f(m, d) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        radii.push(0.5 * (lo + hi));
    }
    PlanarDomain::star(u0, radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_point(rng: &mut ChaCha8Rng) -> C2 {
        C2::from_parts(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    #[test]
    fn chart_coefficients() {
        let ch = levi_chart(0.5, C2::real(1.0, 0.0)).unwrap();
        assert_eq!(ch.lin_coeffs(), C2::real(2.0, 0.0));
        assert_eq!(ch.quad_coeff(), 0.75);
        assert_eq!(ch.levi_scalar(), 0.25);
        assert_eq!(ch.kind(), ChartKind::Swapped);
        assert_eq!(ch.u0(), Cx::new(0.0, 0.0));
        assert!(ch.w(ch.u0()).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn origin_is_rejected() {
        assert!(levi_chart(0.5, C2::ZERO).is_err());
        assert!(levi_chart(-1.0, C2::real(1.0, 0.0)).is_err());
    }

    #[test]
    fn levi_identity_on_quadric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &c in &[0.5, -0.4, 0.9] {
            let ch = levi_chart(c, C2::from_parts(1.3, -0.2, 0.4, 0.8)).unwrap();
            let mut used = 0;
            while used < 1000 {
                let u = ch.u0() + Cx::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                let Some(w) = ch.w(u) else { continue };
                used += 1;
                let scale = 1.0 + w.norm_sqr();
                assert!(ch.levi_poly(w).norm() <= 1e-10 * scale);
                assert!((ch.gain(w) - ch.levi_form(w)).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn pluriharmonic_case_has_zero_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = levi_chart(1.0, C2::from_parts(0.7, 0.3, -1.1, 0.5)).unwrap();
        for _ in 0..200 {
            let u = Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if let Some(w) = ch.w(u) {
                assert!(ch.gain(w).abs() <= 1e-10 * (1.0 + w.norm_sqr()));
            }
        }
    }

    #[test]
    fn derivative_matches_difference_and_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = rand_point(&mut rng);
            let ch = levi_chart(0.3, z).unwrap();
            for chart in [ch.clone(), ch.swapped()] {
                assert!(chart.w(chart.u0()).unwrap().norm() <= 1e-12 * (1.0 + z.norm()));
                let u = chart.u0() + Cx::new(0.1, -0.05);
                let e = 1e-6;
                let fd = (chart.w(u + e).unwrap() - chart.w(u - e).unwrap()) / (2.0 * e);
                assert!((fd - chart.dw(u).unwrap()).norm() <= 1e-6 * (1.0 + fd.norm()));
                let d0 = chart.dw(chart.u0()).unwrap();
                let t = chart.tangent();
                assert!(d0.hdot(&t).norm() >= (1.0 - 1e-12) * d0.norm() * t.norm());
            }
        }
    }

    #[test]
    fn clipped_near_poles() {
        let ch = levi_chart(0.5, C2::real(1.0, 1.0)).unwrap();
        assert!(ch.w(Cx::new(0.0, 1.0)).is_none());
        assert!(ch.w(Cx::new(0.0, -1.0 + 1e-8)).is_none());
    }

    #[test]
    fn sublevel_boundary_sits_on_radius() {
        let ch = levi_chart(0.5, C2::real(1.0, 0.0)).unwrap();
        let d = sublevel_component(&ch, 0.1).unwrap();
        assert!(d.contains(ch.u0()));
        assert_eq!(d.center(), ch.u0());
        let r = ch.sublevel_radius(0.1);
        for u in d.boundary() {
            assert!((ch.w(*u).unwrap().norm() - r).abs() <= 1e-8);
        }
    }

    #[test]
    fn sublevel_above_threshold_reports_it() {
        let ch = levi_chart(0.5, C2::real(1.0, 0.0)).unwrap();
        let t = solve_critical(0.5, ch.base()).unwrap().threshold();
        match sublevel_component(&ch, 1.01 * t) {
            Err(Error::AboveThreshold { threshold, .. }) => assert_eq!(threshold, t),
            other => panic!("{other:?}"),
        }
        assert!(sublevel_component(&ch, 0.0).is_err());
        let weak = levi_chart(1.0, C2::real(1.0, 0.0)).unwrap();
        assert!(sublevel_component(&weak, 0.1).is_err());
    }
}
