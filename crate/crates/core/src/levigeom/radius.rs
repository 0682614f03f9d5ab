use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cone::ConeFunction;
use super::critical::solve_critical;
use crate::corepoly::C2;
use crate::error::{invalid, Result};

/// Calibration settings for [`lifting_radius_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusOptions {
    pub batch: usize,
    pub seed: u64,
    pub safety: f64,
    /// Returned (and flagged) when no batch point has a critical point in
    /// its search ball.
    pub cap: f64,
    /// Calibration points are drawn with ρ_c(z) uniform in this range.
    pub rho_range: (f64, f64),
}

impl Default for RadiusOptions {
    fn default() -> Self {
        RadiusOptions {
            batch: 100,
            seed: 0x1eb1,
            safety: 0.5,
            cap: 1.0,
            rho_range: (0.5, 10.0),
        }
    }
}

/// Calibrated a(c) with the data it was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingRadius {
    pub c: f64,
    pub value: f64,
    /// min over the batch of (ρ_c(z + w*) − ρ_c(z))/ρ_c(z).
    pub min_ratio: Option<f64>,
    pub safety: f64,
    pub capped: bool,
    pub batch: usize,
    /// Batch points with at least one critical point in the search ball.
    pub with_solutions: usize,
    pub seed: u64,
}

/// Outcome of checking a(c) against fresh points.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusCheck {
    pub points: usize,
    /// min over points of gain − a·ρ_c(z) (infinite when no point has a
    /// critical point in its ball).
    pub worst_margin: f64,
    pub pass: bool,
}

/// a(c) from a calibration batch of the given size with default settings.
///
/// # Errors
/// See [`lifting_radius_with`].
pub fn lifting_radius(c: f64, batch: usize) -> Result<LiftingRadius> {
    lifting_radius_with(
        c,
        &RadiusOptions {
            batch,
            ..RadiusOptions::default()
        },
    )
}

/// a(c) = safety · min over the batch of the relative gain at the nearest
/// nonzero critical point.
///
/// # Errors
/// c ≥ 1, an empty batch, a safety factor outside (0, 1], a bad ρ range,
/// or an oracle failure.
pub fn lifting_radius_with(c: f64, opts: &RadiusOptions) -> Result<LiftingRadius> {
    ConeFunction::new(c)?.require_strong("lifting_radius")?;
    if opts.batch == 0 {
        return Err(invalid("empty calibration batch"));
    }
    if !(opts.safety > 0.0 && opts.safety <= 1.0) {
        return Err(invalid(format!("safety factor {} outside (0, 1]", opts.safety)));
    }
    let ratios = batch_ratios(c, opts.seed, opts.batch, opts.rho_range)?;
    let with_solutions = ratios.iter().filter(|r| r.is_some()).count();
    let min_ratio = ratios.into_iter().flatten().reduce(f64::min);
    let (value, capped) = match min_ratio {
        Some(m) => (opts.safety * m, false),
        None => (opts.cap, true),
    };
    Ok(LiftingRadius {
        c,
        value,
        min_ratio,
        safety: opts.safety,
        capped,
        batch: opts.batch,
        with_solutions,
        seed: opts.seed,
    })
}

impl LiftingRadius {
    /// Checks gain > a·ρ_c(z) at the nearest critical point for `points`
    /// fresh samples drawn from `seed`.
    ///
    /// # Errors
    /// Oracle failure.
    pub fn verify(&self, seed: u64, points: usize, rho_range: (f64, f64)) -> Result<RadiusCheck> {
        let margins: Vec<Option<f64>> = (0..points)
            .into_par_iter()
            .map(|i| {
                let z = calibration_point(self.c, seed, i as u64, rho_range)?;
                let rho = ConeFunction::new(self.c)?.rho(&z);
                Ok(point_gain(self.c, z)?.map(|g| g - self.value * rho))
            })
            .collect::<Result<_>>()?;
        let worst_margin = margins.into_iter().flatten().fold(f64::INFINITY, f64::min);
        Ok(RadiusCheck {
            points,
            worst_margin,
            pass: worst_margin > 0.0,
        })
    }
}

/// Deterministic sample point i of the stream `seed`: a uniform direction
/// in C² with ρ_c > 0, scaled so that ρ_c(z) is uniform in `rho_range`.
///
/// # Errors
/// A range that is empty or not positive.
pub fn calibration_point(c: f64, seed: u64, i: u64, rho_range: (f64, f64)) -> Result<C2> {
    let (lo, hi) = rho_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(invalid(format!("ρ range ({lo}, {hi}) must be positive")));
    }
    let cone = ConeFunction::new(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    loop {
        let v = C2::from_parts(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n2 = v.norm_sqr();
        if !(n2 > 1e-6 && n2 <= 1.0) {
            continue;
        }
        let d = v / n2.sqrt();
        let r = cone.rho(&d);
        if r < 1e-3 {
            continue;
        }
        let target = if hi > lo { rng.gen_range(lo..hi) } else { lo };
        return Ok(d * (target / r).sqrt());
    }
}

fn batch_ratios(c: f64, seed: u64, batch: usize, rho_range: (f64, f64)) -> Result<Vec<Option<f64>>> {
    (0..batch)
        .into_par_iter()
        .map(|i| {
            let z = calibration_point(c, seed, i as u64, rho_range)?;
            let rho = ConeFunction::new(c)?.rho(&z);
            Ok(point_gain(c, z)?.map(|g| g / rho))
        })
        .collect()
}

/// ρ_c(z + w*) − ρ_c(z) at the nearest nonzero critical point w*.
fn point_gain(c: f64, z: C2) -> Result<Option<f64>> {
    let set = solve_critical(c, z)?;
    let cone = ConeFunction::new(c)?;
    Ok(set.solutions.first().map(|s| cone.rho(&(z + s.w)) - cone.rho(&z)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_and_deterministic() {
        let a = lifting_radius(0.5, 20).unwrap();
        assert!(a.value > 0.0);
        assert!(!a.capped);
        assert_eq!(a, lifting_radius(0.5, 20).unwrap());
    }

    #[test]
    fn safety_scales_exactly() {
        let base = RadiusOptions {
            batch: 10,
            ..RadiusOptions::default()
        };
        let a = lifting_radius_with(0.5, &base).unwrap();
        let half = lifting_radius_with(
            0.5,
            &RadiusOptions {
                safety: 0.25,
                ..base
            },
        )
        .unwrap();
        assert_eq!(half.value, 0.5 * a.value);
    }

    #[test]
    fn sample_points_hit_range() {
        for i in 0..50 {
            let z = calibration_point(0.5, 9, i, (0.5, 10.0)).unwrap();
            let r = ConeFunction::new(0.5).unwrap().rho(&z);
            assert!((0.5 - 1e-12..=10.0 + 1e-12).contains(&r));
        }
        assert_eq!(
            calibration_point(0.5, 9, 3, (0.5, 10.0)).unwrap(),
            calibration_point(0.5, 9, 3, (0.5, 10.0)).unwrap()
        );
        assert!(calibration_point(0.5, 9, 3, (0.0, 1.0)).is_err());
    }

    #[test]
    fn rejects_bad_options() {
        assert!(lifting_radius(1.0, 10).is_err());
        assert!(lifting_radius(0.5, 0).is_err());
        let bad = RadiusOptions {
            safety: 0.0,
            ..RadiusOptions::default()
        };
        assert!(lifting_radius_with(0.5, &bad).is_err());
    }
}
