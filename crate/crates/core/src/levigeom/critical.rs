use nalgebra::{Matrix4, Vector4};

use super::chart::{chart_point, ChartKind};
use super::cone::ConeFunction;
use crate::corepoly::{Cx, C2};
use crate::error::{invalid, precondition, Result};

/// Residual gate for accepted solutions.
pub const RESIDUAL_GATE: f64 = 1e-10;
/// Search ball radius as a multiple of |z|.
pub const SEARCH_FACTOR: f64 = 4.0;
const GRID: usize = 32;
const GRID_HALF_WIDTH: f64 = 2.0;

/// One nonzero solution w of the critical system at z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalSolution {
    pub w: C2,
    /// |2conj(h₂)w₁ − 2conj(h₁)w₂ + (1+c)(w₁conj(w₂) − conj(w₁)w₂)|.
    pub colinearity_residual: f64,
    /// |Q_z(w)|.
    pub quadric_residual: f64,
}

/// Nonzero critical points of ρ_c(z + ·) restricted to Λ_z inside the
/// search ball |w| ≤ 4|z|.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSolutionSet {
    pub base: C2,
    pub c: f64,
    /// Sorted by increasing |w|.
    pub solutions: Vec<CriticalSolution>,
    pub min_norm: Option<f64>,
    pub search_radius: f64,
    /// Starts whose polishing did not reach the residual gate.
    pub dropped: usize,
}

impl CriticalSolutionSet {
    /// Largest C for which B(z; C) is certified free of nonzero critical
    /// points: (1 − c)/2·min|w|², or the search ball's value when the ball
    /// holds no solution.
    pub fn threshold(&self) -> f64 {
        let r = self.min_norm.unwrap_or(self.search_radius);
        0.5 * (1.0 - self.c) * r * r
    }
}

/// Dense multi-start Newton solve of the critical system in both charts.
///
/// # Errors
/// c ≥ 1, ρ_c(z) ≤ 0, or non-finite input.
pub fn critical_system_solve(c: f64, z: C2) -> Result<CriticalSolutionSet> {
    let cone = ConeFunction::new(c)?;
    cone.require_strong("critical_system_solve")?;
    if !(cone.rho(&z) > 0.0) {
        return Err(precondition(
            "critical_system_solve",
            format!("needs ρ_c(z) > 0, got {}", cone.rho(&z)),
        ));
    }
    solve_critical(c, z)
}

pub(crate) fn solve_critical(c: f64, z: C2) -> Result<CriticalSolutionSet> {
    solve_in_charts(c, z, &[ChartKind::Default, ChartKind::Swapped])
}

/// Like [`critical_system_solve`] but seeding only from the listed charts.
///
/// # Errors
/// As for [`critical_system_solve`].
pub fn critical_system_solve_in(c: f64, z: C2, charts: &[ChartKind]) -> Result<CriticalSolutionSet> {
    ConeFunction::new(c)?.require_strong("critical_system_solve")?;
    solve_in_charts(c, z, charts)
}

fn solve_in_charts(c: f64, z: C2, charts: &[ChartKind]) -> Result<CriticalSolutionSet> {
    let cone = ConeFunction::new(c)?;
    if !z.is_finite() {
        return Err(invalid("non-finite base point"));
    }
    let h = cone.h(&z);
    if h.norm() == 0.0 {
        return Err(precondition("critical_system_solve", "h(z) vanishes"));
    }
    let zn = z.norm();
    let ball = SEARCH_FACTOR * zn;
    let sys = System { h, k: 1.0 + c };
    let mut found: Vec<C2> = Vec::new();
    let mut dropped = 0;
    for &kind in charts {
        for i in 0..GRID {
            for j in 0..GRID {
                let cell = 2.0 * GRID_HALF_WIDTH / GRID as f64;
                let u = Cx::new(
                    -GRID_HALF_WIDTH + (i as f64 + 0.5 + 0.0123) * cell,
                    -GRID_HALF_WIDTH + (j as f64 + 0.5 + 0.0071) * cell,
                );
                let Some(w0) = chart_point(kind, h, cone.kappa(), u) else {
                    continue;
                };
                if !(w0.norm() <= 2.0 * ball) {
                    continue;
                }
                match sys.polish(w0) {
                    Some(w) => {
                        let n = w.norm();
                        if n <= 1e-8 * zn || n > ball {
                            continue;
                        }
                        if !found.iter().any(|v| (*v - w).norm() <= 1e-8 * zn) {
                            found.push(w);
                        }
                    }
                    None => dropped += 1,
                }
            }
        }
    }
    let mut solutions: Vec<CriticalSolution> = found
        .into_iter()
        .map(|w| {
            let (e1, e2) = sys.eval(w);
            CriticalSolution {
                w,
                colinearity_residual: e1.norm(),
                quadric_residual: 0.5 * e2.norm(),
            }
        })
        .collect();
    solutions.sort_by(|a, b| {
        a.w.norm()
            .total_cmp(&b.w.norm())
            .then(a.w.z1.re.total_cmp(&b.w.z1.re))
            .then(a.w.z1.im.total_cmp(&b.w.z1.im))
    });
    let min_norm = solutions.first().map(|s| s.w.norm());
    Ok(CriticalSolutionSet {
        base: z,
        c,
        solutions,
        min_norm,
        search_radius: ball,
        dropped,
    })
}

/// E₁ = 2conj(h₂)w₁ − 2conj(h₁)w₂ + k(w₁conj(w₂) − conj(w₁)w₂),
/// E₂ = 4h₁w₁ + 4h₂w₂ + k(w₁² + w₂²), with k = 1 + c.
struct System {
    h: C2,
    k: f64,
}

impl System {
    fn eval(&self, w: C2) -> (Cx, Cx) {
        let (h, k) = (self.h, self.k);
        let e1 = 2.0 * h.z2.conj() * w.z1 - 2.0 * h.z1.conj() * w.z2
            + k * (w.z1 * w.z2.conj() - w.z1.conj() * w.z2);
        let e2 = 4.0 * h.z1 * w.z1 + 4.0 * h.z2 * w.z2 + k * (w.z1 * w.z1 + w.z2 * w.z2);
        (e1, e2)
    }

    fn jacobian(&self, w: C2) -> Matrix4<f64> {
        let (h, k) = (self.h, self.k);
        // (∂/∂w, ∂/∂w̄) per coordinate.
        let e1 = [
            (2.0 * h.z2.conj() + k * w.z2.conj(), -k * w.z2),
            (-2.0 * h.z1.conj() - k * w.z1.conj(), k * w.z1),
        ];
        let zero = Cx::new(0.0, 0.0);
        let e2 = [
            (4.0 * h.z1 + 2.0 * k * w.z1, zero),
            (4.0 * h.z2 + 2.0 * k * w.z2, zero),
        ];
        let i = Cx::new(0.0, 1.0);
        let mut m = Matrix4::zeros();
        for (row, e) in [e1, e2].iter().enumerate() {
            for (j, (dw, dwb)) in e.iter().enumerate() {
                let da = dw + dwb;
                let db = i * (dw - dwb);
                m[(2 * row, 2 * j)] = da.re;
                m[(2 * row + 1, 2 * j)] = da.im;
                m[(2 * row, 2 * j + 1)] = db.re;
                m[(2 * row + 1, 2 * j + 1)] = db.im;
            }
        }
        m
    }

    fn residual(&self, w: C2) -> f64 {
        let (e1, e2) = self.eval(w);
        e1.norm().max(e2.norm())
    }

    /// Newton iteration; Some(w) once both residuals pass the gate.
    fn polish(&self, mut w: C2) -> Option<C2> {
        let mut hits = 0;
        for _ in 0..60 {
            let (e1, e2) = self.eval(w);
            let f = Vector4::new(e1.re, e1.im, e2.re, e2.im);
            let step = self.jacobian(w).lu().solve(&f)?;
            w = w - C2::from_parts(step[0], step[1], step[2], step[3]);
            if !w.is_finite() {
                return None;
            }
            if self.residual(w) <= 0.01 * RESIDUAL_GATE {
                hits += 1;
                if hits >= 2 {
                    break;
                }
            }
        }
        (self.residual(w) <= RESIDUAL_GATE).then_some(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn same_set(a: &CriticalSolutionSet, b: &CriticalSolutionSet, scale: f64, tol: f64) -> bool {
        a.solutions.len() == b.solutions.len()
            && a
                .solutions
                .iter()
                .all(|s| b.solutions.iter().any(|t| (s.w - t.w * scale).norm() <= tol))
    }

    #[test]
    fn residuals_pass_gate() {
        let set = critical_system_solve(0.5, C2::real(1.0, 0.0)).unwrap();
        for s in &set.solutions {
            assert!(s.colinearity_residual <= RESIDUAL_GATE);
            assert!(s.quadric_residual <= RESIDUAL_GATE);
            assert!(s.w.norm() <= set.search_radius);
        }
        assert!(set.min_norm.map_or(true, |m| m > 0.0));
    }

    #[test]
    fn solutions_are_homogeneous() {
        let z = C2::from_parts(0.9, 0.4, -0.3, 1.1);
        let a = critical_system_solve(0.5, z).unwrap();
        for t in [0.25, 3.0] {
            let b = critical_system_solve(0.5, z * t).unwrap();
            assert!(same_set(&b, &a, t, 1e-9 * t.max(1.0)), "{a:?}\n{b:?}");
        }
    }

    #[test]
    fn chart_swap_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let z = C2::from_parts(
                rng.gen_range(0.5..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let a = critical_system_solve_in(0.5, z, &[ChartKind::Default]).unwrap();
            let b = critical_system_solve_in(0.5, z, &[ChartKind::Swapped]).unwrap();
            assert!(same_set(&a, &b, 1.0, 1e-9), "{a:?}\n{b:?}");
        }
    }

    #[test]
    fn preconditions() {
        assert!(critical_system_solve(1.0, C2::real(1.0, 0.0)).is_err());
        assert!(critical_system_solve(0.5, C2::from_parts(0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn critical_points_are_critical_on_quadric() {
        let z = C2::from_parts(1.2, 0.5, 0.3, -0.7);
        let set = critical_system_solve(0.5, z).unwrap();
        let ch = super::super::chart::levi_chart(0.5, z).unwrap();
        for s in &set.solutions {
            assert!(ch.levi_poly(s.w).norm() <= 1e-9);
            assert!((ch.gain(s.w) - ch.levi_form(s.w)).abs() <= 1e-9);
        }
    }
}
