use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use super::c2::Cx;
use super::domain::{winding_number, PlanarDomain};
use super::fourier::{circle_values, dft_coeffs, fft_forward, fft_inverse, interpolate_to};
use crate::error::{Error, Result};

/// Tuning knobs for [`riemann_map_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannOptions {
    /// Degrees tried, in order, for the Green's function fit.
    pub fit_degrees: Vec<usize>,
    /// Largest degree of the returned polynomial.
    pub max_degree: usize,
    /// Certification grid size (the doubled grid is checked as well).
    pub verify_nodes: usize,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        RiemannOptions {
            fit_degrees: vec![16, 24, 32, 48, 64, 96, 128],
            max_degree: 1024,
            verify_nodes: 512,
        }
    }
}

/// Outcome of the certification checks of a conformal map.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalCertificate {
    pub degree: usize,
    pub fit_degree: usize,
    /// Max distance from φ(node) to the boundary over the checked grid.
    pub boundary_distance: f64,
    pub diameter: f64,
    pub center_error: f64,
    pub winding: i64,
    pub min_derivative: f64,
    pub tol: f64,
    /// Checked grid: twice the verification grid, at least 2·(degree + 1).
    pub nodes: usize,
    pub pass: bool,
}

impl ConformalCertificate {
    pub fn relative_distance(&self) -> f64 {
        self.boundary_distance / self.diameter
    }
}

/// Polynomial approximation φ of the conformal map from the closed unit
/// disc onto a planar domain, normalized by φ(0) ≈ center, φ'(0) > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannMap {
    coeffs: Vec<Cx>,
    pub certificate: ConformalCertificate,
}

impl RiemannMap {
    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn eval(&self, z: Cx) -> Cx {
        horner(&self.coeffs, z)
    }

    pub fn derivative(&self, z: Cx) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * k as f64;
        }
        acc
    }
}

fn horner(c: &[Cx], z: Cx) -> Cx {
    c.iter().rev().fold(Cx::new(0.0, 0.0), |a, c| a * z + c)
}

/// Certified conformal map with default options.
///
/// # Errors
/// Certification failure after the degree budget; the message carries the
/// best certificate found.
pub fn riemann_map(domain: &PlanarDomain, tol: f64) -> Result<RiemannMap> {
    riemann_map_with(domain, tol, &RiemannOptions::default())
}

/// Least-squares conformal map: fit the Green's function of the domain with
/// pole at the center by a polynomial (Arnoldi-stabilized basis), read off
/// the boundary correspondence from the argument of ψ = (z − z₀)e^{P}, and
/// expand its inverse in a Fourier series. Fit degrees are escalated until
/// the certificate passes.
///
/// # Errors
/// See [`riemann_map`].
pub fn riemann_map_with(domain: &PlanarDomain, tol: f64, opts: &RiemannOptions) -> Result<RiemannMap> {
    let diam = domain.diameter();
    let mut best: Option<RiemannMap> = None;
    let samples = match domain.radial() {
        Some(r) => BoundarySamples::star(domain.center(), r, opts),
        None => BoundarySamples::polyline(domain.boundary(), opts),
    };
    for &deg in &opts.fit_degrees {
        let Some(t) = samples.correspondence(domain.center(), deg) else {
            continue;
        };
        let spectrum = samples.inverse_spectrum(&t, opts.max_degree);
        let mut candidates = Vec::new();
        let mut n = 8usize;
        while n < spectrum.len() {
            candidates.push(n);
            n *= 2;
        }
        for &m in &candidates {
            let coeffs = normalized(&spectrum[..=m]);
            let map = certify(domain, coeffs, deg, tol, diam, opts.verify_nodes);
            if map.certificate.pass {
                return Ok(map);
            }
            if best
                .as_ref()
                .map_or(true, |b| map.certificate.boundary_distance < b.certificate.boundary_distance)
            {
                best = Some(map);
            }
        }
    }
    Err(Error::Certification(match best {
        Some(b) => format!("conformal map not certified: {:?}", b.certificate),
        None => "conformal map: no admissible boundary correspondence".into(),
    }))
}

/// Rotates the coefficients so that φ'(0) is real and positive.
fn normalized(c: &[Cx]) -> Vec<Cx> {
    let beta = -c[1].arg();
    c.iter()
        .enumerate()
        .map(|(k, v)| v * Cx::from_polar(1.0, beta * k as f64))
        .collect()
}

fn certify(domain: &PlanarDomain, coeffs: Vec<Cx>, fit_degree: usize, tol: f64, diam: f64, nodes: usize) -> RiemannMap {
    let mut dist: f64 = 0.0;
    let m = (2 * nodes).max((2 * coeffs.len()).next_power_of_two());
    let fine = circle_values(&coeffs, 1.0, m);
    let star = domain.radial().map(|r| RadialBoundary::new(domain.center(), r));
    for p in &fine {
        let d = match &star {
            Some(s) => s.radial_gap(*p),
            None => domain.boundary_distance(*p),
        };
        dist = dist.max(d);
    }
    let dcoeffs: Vec<Cx> = coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    let dvals = circle_values(&dcoeffs, 1.0, m);
    let min_derivative = dvals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let winding = winding_number(&fine, domain.center());
    let center_error = (coeffs[0] - domain.center()).norm();
    let pass = dist <= tol * diam && center_error <= tol * diam && winding == 1 && min_derivative > 0.0;
    RiemannMap {
        certificate: ConformalCertificate {
            degree: coeffs.len() - 1,
            fit_degree,
            boundary_distance: dist,
            diameter: diam,
            center_error,
            winding,
            min_derivative,
            tol,
            nodes: m,
            pass,
        },
        coeffs,
    }
}

/// Star-shaped boundary center + r(α)e^{iα}; r is the trigonometric
/// interpolant of its samples, tabulated on a 16× finer grid and read back
/// by four-point Lagrange interpolation.
struct RadialBoundary {
    center: Cx,
    fine: Vec<f64>,
}

impl RadialBoundary {
    fn new(center: Cx, radii: &[f64]) -> Self {
        let v: Vec<Cx> = radii.iter().map(|r| Cx::new(*r, 0.0)).collect();
        let fine = interpolate_to(&v, 16 * radii.len()).iter().map(|c| c.re).collect();
        RadialBoundary { center, fine }
    }

    fn radius(&self, alpha: f64) -> f64 {
        let n = self.fine.len();
        let x = alpha.rem_euclid(TAU) / TAU * n as f64;
        let i = x.floor() as i64;
        let f = x - i as f64;
        let r = |j: i64| self.fine[(i + j).rem_euclid(n as i64) as usize];
        let (p0, p1, p2, p3) = (r(-1), r(0), r(1), r(2));
        let w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        let w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        let w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3
    }

    /// |r(arg(p − c)) − |p − c||, an upper bound for the distance to the curve.
    fn radial_gap(&self, p: Cx) -> f64 {
        let d = p - self.center;
        (self.radius(d.arg()) - d.norm()).abs()
    }
}

enum BoundarySamples {
    /// Dense points along a polyline; consecutive points share a segment.
    Polyline { points: Vec<Cx> },
    /// Uniform-angle samples of a smooth star-shaped boundary.
    Star { points: Vec<Cx> },
}

impl BoundarySamples {
    fn polyline(vertices: &[Cx], opts: &RiemannOptions) -> Self {
        let n = vertices.len();
        let max_fit = opts.fit_degrees.iter().copied().max().unwrap_or(64);
        let target = (8 * max_fit).max(4 * n).max(2048);
        let perimeter: f64 = (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).sum();
        let h = perimeter / target as f64;
        let mut points = Vec::with_capacity(target + n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let pieces = ((b - a).norm() / h).ceil().max(1.0) as usize;
            for p in 0..pieces {
                points.push(a + (b - a) * (p as f64 / pieces as f64));
            }
        }
        BoundarySamples::Polyline { points }
    }

    fn star(center: Cx, radii: &[f64], opts: &RiemannOptions) -> Self {
        let max_fit = opts.fit_degrees.iter().copied().max().unwrap_or(64);
        let mut n = radii.len();
        while n < 4 * max_fit {
            n *= 2;
        }
        let v: Vec<Cx> = radii.iter().map(|r| Cx::new(*r, 0.0)).collect();
        let r = interpolate_to(&v, n);
        let points = r
            .iter()
            .enumerate()
            .map(|(k, r)| center + Cx::from_polar(r.re, TAU * k as f64 / n as f64))
            .collect();
        BoundarySamples::Star { points }
    }

    fn points(&self) -> &[Cx] {
        match self {
            BoundarySamples::Polyline { points } => points,
            BoundarySamples::Star { points } => points,
        }
    }

    /// Green's function fit of the given degree and the resulting unwrapped
    /// boundary arguments; None when the argument is not increasing.
    fn correspondence(&self, center: Cx, degree: usize) -> Option<Vec<f64>> {
        let pts = self.points();
        let scale = pts.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
        let z: Vec<Cx> = pts.iter().map(|p| (p - center) / scale).collect();
        let p = green_fit(&z, degree)?;
        let mut t = Vec::with_capacity(z.len());
        let mut prev = 0.0;
        for (i, (zi, pi)) in z.iter().zip(&p).enumerate() {
            let a = zi.arg() + pi.im;
            let v = if i == 0 {
                a
            } else {
                let d = (a - prev + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
                prev + d
            };
            if i > 0 && v < prev - 1e-9 {
                return None;
            }
            let v = if i > 0 { v.max(prev) } else { v };
            t.push(v);
            prev = v;
        }
        if *t.last().unwrap() >= t[0] + TAU {
            return None;
        }
        Some(t)
    }

    /// Fourier coefficients (frequencies 0..) of s ↦ b(s), where b(s) is the
    /// boundary point with unwrapped argument t(b) = t₀ + s.
    fn inverse_spectrum(&self, t: &[f64], max_freq: usize) -> Vec<Cx> {
        let t0 = t[0];
        match self {
            BoundarySamples::Polyline { points } => {
                let n = points.len();
                let nf = (8 * n).next_power_of_two().max(4096).max(4 * max_freq);
                let mut vals = Vec::with_capacity(nf);
                let mut i = 0usize;
                for j in 0..nf {
                    let s = t0 + TAU * j as f64 / nf as f64;
                    while i + 1 < n && t[i + 1] <= s {
                        i += 1;
                    }
                    let (ta, tb, a, b) = if i + 1 < n {
                        (t[i], t[i + 1], points[i], points[i + 1])
                    } else {
                        (t[n - 1], t0 + TAU, points[n - 1], points[0])
                    };
                    let f = if tb > ta { ((s - ta) / (tb - ta)).clamp(0.0, 1.0) } else { 0.0 };
                    vals.push(a + (b - a) * f);
                }
                fft_forward(&mut vals);
                let sc = 1.0 / nf as f64;
                vals.truncate(max_freq + 1);
                vals.iter_mut().for_each(|v| *v *= sc);
                vals
            }
            BoundarySamples::Star { points } => {
                // ĉ_k = (1/2π)∫ b(α) e^{−ik(t(α)−t₀)} t'(α) dα on the uniform α grid.
                let n = points.len();
                let tau: Vec<Cx> = t
                    .iter()
                    .enumerate()
                    .map(|(i, ti)| Cx::new(ti - t0 - TAU * i as f64 / n as f64, 0.0))
                    .collect();
                let dtau = spectral_derivative(&tau);
                let w: Vec<f64> = dtau.iter().map(|d| 1.0 + d.re).collect();
                let kmax = max_freq.min(n / 2);
                let mut out = vec![Cx::new(0.0, 0.0); kmax + 1];
                for i in 0..n {
                    let step = Cx::from_polar(1.0, -(t[i] - t0));
                    let mut e = Cx::new(w[i] / n as f64, 0.0) * points[i];
                    for c in out.iter_mut() {
                        *c += e;
                        e *= step;
                    }
                }
                out
            }
        }
    }
}

/// Derivative in α of the trigonometric interpolant of uniform samples.
fn spectral_derivative(v: &[Cx]) -> Vec<Cx> {
    let n = v.len();
    let mut c = dft_coeffs(v);
    for (k, ck) in c.iter_mut().enumerate() {
        let f = if k < n / 2 {
            k as f64
        } else if k == n / 2 {
            0.0
        } else {
            k as f64 - n as f64
        };
        *ck *= Cx::new(0.0, f);
    }
    fft_inverse(&mut c);
    c
}

/// Values at the (scaled) boundary points of the polynomial P with
/// Re P = −log|z| there, fitted in the Arnoldi-orthogonalized monomial
/// basis; ψ = z·e^{P} then has modulus ≈ 1 on the boundary. The
/// imaginary constant of P is left free.
fn green_fit(z: &[Cx], degree: usize) -> Option<Vec<Cx>> {
    let m = z.len();
    if m < 2 * degree + 2 {
        return None;
    }
    let q = arnoldi(z, degree);
    let cols = 2 * degree + 1;
    let mut a = DMatrix::<f64>::zeros(m, cols);
    let mut rhs = DVector::<f64>::zeros(m);
    for i in 0..m {
        a[(i, 0)] = q[0][i].re;
        for k in 1..=degree {
            a[(i, 2 * k - 1)] = q[k][i].re;
            a[(i, 2 * k)] = -q[k][i].im;
        }
        rhs[i] = -z[i].norm().ln();
    }
    let qr = a.qr();
    let qt_b = qr.q().transpose() * rhs;
    let x = qr.r().solve_upper_triangular(&qt_b)?;
    let mut d = vec![Cx::new(x[0], 0.0)];
    for k in 1..=degree {
        d.push(Cx::new(x[2 * k - 1], x[2 * k]));
    }
    Some(
        (0..m)
            .map(|i| (0..=degree).map(|k| d[k] * q[k][i]).sum())
            .collect(),
    )
}

/// Vandermonde-with-Arnoldi basis: columns q_0..q_n spanning the monomials
/// of degree ≤ n, orthonormal in the discrete inner product (1/m)Σ conj(u)v.
fn arnoldi(z: &[Cx], n: usize) -> Vec<Vec<Cx>> {
    let m = z.len();
    let mf = m as f64;
    let mut q: Vec<Vec<Cx>> = vec![vec![Cx::new(1.0, 0.0); m]];
    for k in 1..=n {
        let mut v: Vec<Cx> = z.iter().zip(&q[k - 1]).map(|(a, b)| a * b).collect();
        for _pass in 0..2 {
            for j in 0..k {
                let c: Cx = q[j].iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<Cx>() / mf;
                for (vi, qi) in v.iter_mut().zip(&q[j]) {
                    *vi -= c * qi;
                }
            }
        }
        let nrm = (v.iter().map(|x| x.norm_sqr()).sum::<f64>() / mf).sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        q.push(v);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64, c: Cx) -> Vec<Cx> {
        (0..n).map(|k| c + Cx::from_polar(r, TAU * k as f64 / n as f64)).collect()
    }

    #[test]
    fn unit_disc_is_identity() {
        let d = PlanarDomain::new(circle(4096, 1.0, Cx::new(0.0, 0.0)), Cx::new(0.0, 0.0)).unwrap();
        let m = riemann_map(&d, 1e-6).map_err(|e| e.to_string()).unwrap();
        assert!(m.certificate.pass);
        assert!((m.coeffs()[1].norm() - 1.0).abs() < 1e-5, "{:?}", &m.coeffs()[..3]);
    }

    #[test]
    fn shifted_disc_is_affine() {
        let d = PlanarDomain::star(Cx::new(1.0, 0.0), vec![2.0; 64]).unwrap();
        let m = riemann_map(&d, 1e-9).unwrap();
        assert!((m.coeffs()[0] - Cx::new(1.0, 0.0)).norm() < 1e-9);
        assert!((m.coeffs()[1] - Cx::new(2.0, 0.0)).norm() < 1e-9);
        assert!(m.coeffs()[2..].iter().all(|c| c.norm() < 1e-9));
    }

    #[test]
    fn ellipse_star() {
        let n = 256;
        let (a, b) = (2.0f64, 1.0f64);
        let radii: Vec<f64> = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                1.0 / ((t.cos() / a).powi(2) + (t.sin() / b).powi(2)).sqrt()
            })
            .collect();
        let d = PlanarDomain::star(Cx::new(0.0, 0.0), radii).unwrap();
        let m = riemann_map(&d, 1e-6).map_err(|e| e.to_string()).unwrap();
        assert!(m.certificate.pass, "{:?}", m.certificate);
        assert!(m.coeffs()[1].im.abs() < 1e-12 && m.coeffs()[1].re > 0.0);
        assert!(m.coeffs()[0].norm() < 1e-6);
    }
}
