use rayon::prelude::*;

use super::nevanlinna::ScalarFn;
use crate::corepoly::Cx;
use crate::error::{invalid, precondition, Result};

/// How points approach e^{iθ0}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    /// ζ = d·e^{iθ0}.
    Radial,
    /// `spread` points per depth inside the Stolz angle Γ_α, at distance
    /// 1 − d from e^{iθ0}.
    Angular { alpha: f64, spread: usize },
    /// `spread` points per depth on |ζ| = d with |arg ζ − θ0| ≤ window.
    Unrestricted { window: f64, spread: usize },
}

/// Bounding box and scatter of the recorded values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterSummary {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub centroid: Cx,
    /// RMS distance to the centroid.
    pub dispersion: f64,
    /// Diameter of the values at the deepest depth.
    pub tail_diameter: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterRecord {
    pub theta0: f64,
    pub scheme: Scheme,
    pub depths: Vec<f64>,
    /// Sample points, one row per depth.
    pub points: Vec<Vec<Cx>>,
    pub values: Vec<Vec<Cx>>,
    pub summary: ClusterSummary,
}

/// |Im(1 − ζe^{−iθ})| < α|ζ − e^{iθ}|.
pub fn in_stolz_angle(zeta: Cx, theta: f64, alpha: f64) -> bool {
    let e = Cx::from_polar(1.0, theta);
    (Cx::new(1.0, 0.0) - zeta * e.conj()).im.abs() < alpha * (zeta - e).norm()
}

fn scheme_points(theta0: f64, scheme: Scheme, d: f64) -> Vec<Cx> {
    let e = Cx::from_polar(1.0, theta0);
    let spread = |s: usize| (0..s).map(move |l| if s == 1 { 0.0 } else { 2.0 * l as f64 / (s - 1) as f64 - 1.0 });
    match scheme {
        Scheme::Radial => vec![e * d],
        Scheme::Angular { alpha, spread: s } => {
            let beta = 0.9 * alpha.asin();
            spread(s)
                .map(|u| e * (Cx::new(1.0, 0.0) - Cx::from_polar(1.0 - d, u * beta)))
                .collect()
        }
        Scheme::Unrestricted { window, spread: s } => {
            spread(s).map(|u| Cx::from_polar(d, theta0 + u * window)).collect()
        }
    }
}

/// Values of f along the approach scheme at each depth.
///
/// # Errors
/// Depths not strictly increasing in (0, 1), bad scheme parameters, or a
/// scheme point outside U or (angular) outside Γ_α.
pub fn cluster_sample(f: ScalarFn<'_>, theta0: f64, scheme: Scheme, depths: &[f64]) -> Result<ClusterRecord> {
    if depths.is_empty() || depths.windows(2).any(|w| !(w[0] < w[1])) || !(depths[0] > 0.0) {
        return Err(invalid("depths must increase strictly from a positive value"));
    }
    match scheme {
        Scheme::Angular { alpha, spread } if !(alpha > 0.0 && alpha < 1.0) || spread == 0 => {
            return Err(invalid(format!("angular scheme needs 0 < α < 1 and samples, got α = {alpha}")))
        }
        Scheme::Unrestricted { window, spread } if !(window > 0.0) || spread == 0 => {
            return Err(invalid("unrestricted scheme needs a positive window and samples"))
        }
        _ => {}
    }
    let mut points = Vec::with_capacity(depths.len());
    for &d in depths {
        let row = scheme_points(theta0, scheme, d);
        for z in &row {
            if !(z.norm() < 1.0) {
                return Err(precondition("cluster_sample", format!("scheme point {z} escapes U at depth {d}")));
            }
            if let Scheme::Angular { alpha, .. } = scheme {
                if !in_stolz_angle(*z, theta0, alpha) {
                    return Err(precondition("cluster_sample", format!("{z} outside the Stolz angle")));
                }
            }
        }
        points.push(row);
    }
    let values: Vec<Vec<Cx>> = points.par_iter().map(|row| row.iter().map(|z| f(*z)).collect()).collect();
    let summary = summarize(&values);
    Ok(ClusterRecord {
        theta0,
        scheme,
        depths: depths.to_vec(),
        points,
        values,
        summary,
    })
}

fn summarize(values: &[Vec<Cx>]) -> ClusterSummary {
    let all: Vec<Cx> = values.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let centroid = all.iter().sum::<Cx>() / n;
    let fold = |g: fn(&Cx) -> f64| {
        all.iter()
            .map(g)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let dispersion = (all.iter().map(|v| (v - centroid).norm_sqr()).sum::<f64>() / n).sqrt();
    let tail = values.last().map_or(&[][..], |v| &v[..]);
    let mut tail_diameter = 0.0f64;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            tail_diameter = tail_diameter.max((a - b).norm());
        }
    }
    ClusterSummary {
        re: fold(|v| v.re),
        im: fold(|v| v.im),
        centroid,
        dispersion,
        tail_diameter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_identity() {
        let id = |z: Cx| z;
        let depths = [0.5, 0.9, 0.99, 0.999];
        let rec = cluster_sample(&id, 0.0, Scheme::Radial, &depths).unwrap();
        let v: Vec<f64> = rec.values.iter().map(|r| r[0].re).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!((v[3] - 1.0).abs() < 2e-3);
    }

    #[test]
    fn real_segment_in_every_angle() {
        for alpha in [0.01, 0.3, 0.99] {
            assert!(in_stolz_angle(Cx::new(0.9, 0.0), 0.0, alpha));
        }
        assert!(!in_stolz_angle(Cx::new(0.9, 0.1), 0.0, 0.5));
    }

    #[test]
    fn angular_points_inside() {
        let id = |z: Cx| z * z;
        let rec = cluster_sample(&id, 1.3, Scheme::Angular { alpha: 0.5, spread: 5 }, &[0.8, 0.9, 0.99]).unwrap();
        assert!(rec.points.iter().flatten().all(|z| in_stolz_angle(*z, 1.3, 0.5) && z.norm() < 1.0));
        assert!(rec.summary.dispersion > 0.0);
    }

    #[test]
    fn unrestricted_summary() {
        let f = |z: Cx| z;
        let rec = cluster_sample(&f, 0.0, Scheme::Unrestricted { window: 0.1, spread: 3 }, &[0.5, 0.9]).unwrap();
        assert_eq!(rec.points[1].len(), 3);
        assert!((rec.summary.tail_diameter - 2.0 * 0.9 * 0.1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn bad_depths_and_escape() {
        let id = |z: Cx| z;
        assert!(cluster_sample(&id, 0.0, Scheme::Radial, &[0.9, 0.5]).is_err());
        assert!(cluster_sample(&id, 0.0, Scheme::Radial, &[0.5, 1.0]).is_err());
        assert!(cluster_sample(&id, 0.0, Scheme::Angular { alpha: 1.5, spread: 3 }, &[0.5]).is_err());
    }
}
