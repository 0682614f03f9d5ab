use std::cell::RefCell;
use std::f64::consts::TAU;

use rustfft::FftPlanner;

use super::c2::{Cx, C2};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward DFT: X_k = Σ x_m e^{-2πikm/n}.
pub fn fft_forward(buf: &mut [Cx]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// In-place unnormalized inverse DFT: x_m = Σ X_k e^{2πikm/n}.
pub fn fft_inverse(buf: &mut [Cx]) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    plan.process(buf);
}

/// The node e^{2πik/n}, computed from the reduced fraction k/n so that
/// shared nodes of nested power-of-two grids are bit-identical.
pub fn node(k: usize, n: usize) -> Cx {
    let (mut k, mut n) = (k % n, n);
    while k % 2 == 0 && n % 2 == 0 && n > 1 {
        k /= 2;
        n /= 2;
    }
    if k == 0 {
        return Cx::new(1.0, 0.0);
    }
    Cx::from_polar(1.0, TAU * k as f64 / n as f64)
}

/// Angle of node k on an n-node grid, reduced the same way as [`node`].
pub fn node_angle(k: usize, n: usize) -> f64 {
    let (mut k, mut n) = (k % n, n);
    while k % 2 == 0 && n % 2 == 0 && n > 1 {
        k /= 2;
        n /= 2;
    }
    TAU * k as f64 / n as f64
}

pub fn is_pow2(n: usize) -> bool {
    n >= 1 && n.is_power_of_two()
}

/// Values Σ_k c_k (r e^{2πim/n})^k at the n grid nodes, by folding the
/// coefficients modulo n and one inverse FFT.
pub fn circle_values(coeffs: &[Cx], r: f64, n: usize) -> Vec<Cx> {
    let mut bins = vec![Cx::new(0.0, 0.0); n];
    let mut rk = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        if rk == 0.0 {
            break;
        }
        bins[k % n] += c * rk;
        rk *= r;
        if rk < 1e-300 {
            rk = 0.0;
        }
    }
    fft_inverse(&mut bins);
    bins
}

/// Like [`circle_values`] for C²-valued coefficient lists.
pub fn circle_values_c2(coeffs: &[C2], r: f64, n: usize) -> Vec<C2> {
    let c1: Vec<Cx> = coeffs.iter().map(|c| c.z1).collect();
    let c2: Vec<Cx> = coeffs.iter().map(|c| c.z2).collect();
    let v1 = circle_values(&c1, r, n);
    let v2 = circle_values(&c2, r, n);
    v1.into_iter().zip(v2).map(|(a, b)| C2::new(a, b)).collect()
}

/// Discrete Fourier coefficients ĉ_k = (1/n) Σ v_m e^{-2πikm/n}, stored
/// with frequency k at index k mod n.
pub fn dft_coeffs(values: &[Cx]) -> Vec<Cx> {
    let n = values.len();
    let mut buf = values.to_vec();
    fft_forward(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}

/// Evaluate the trigonometric interpolant of `values` (given on n nodes)
/// at the nodes of an m-node grid, m a multiple of n. The Nyquist
/// frequency is split evenly between ±n/2.
pub fn interpolate_to(values: &[Cx], m: usize) -> Vec<Cx> {
    let n = values.len();
    assert!(m >= n && m % n == 0, "target grid must refine the source grid");
    let c = dft_coeffs(values);
    let mut spec = vec![Cx::new(0.0, 0.0); m];
    let half = n / 2;
    for k in 0..n {
        let f = if k < half { k as i64 } else { k as i64 - n as i64 };
        if n % 2 == 0 && k == half {
            spec[half] += c[k] * 0.5;
            spec[m - half] += c[k] * 0.5;
        } else {
            spec[f.rem_euclid(m as i64) as usize] += c[k];
        }
    }
    fft_inverse(&mut spec);
    spec
}
