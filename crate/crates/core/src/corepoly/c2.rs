use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type Cx = Complex64;

/// A point of C².
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct C2 {
    pub z1: Cx,
    pub z2: Cx,
}

impl C2 {
    pub const ZERO: C2 = C2 {
        z1: Cx::new(0.0, 0.0),
        z2: Cx::new(0.0, 0.0),
    };

    pub const fn new(z1: Cx, z2: Cx) -> Self {
        C2 { z1, z2 }
    }

    /// Point with the given real and imaginary parts per coordinate.
    pub fn from_parts(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        C2::new(Cx::new(x1, y1), Cx::new(x2, y2))
    }

    pub fn real(x1: f64, x2: f64) -> Self {
        C2::from_parts(x1, 0.0, x2, 0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.z1.is_finite() && self.z2.is_finite()
    }

    /// Bilinear pairing z1·w1 + z2·w2 (no conjugation).
    pub fn dot(&self, other: &C2) -> Cx {
        self.z1 * other.z1 + self.z2 * other.z2
    }

    /// Hermitian pairing z1·conj(w1) + z2·conj(w2).
    pub fn hdot(&self, other: &C2) -> Cx {
        self.z1 * other.z1.conj() + self.z2 * other.z2.conj()
    }

    pub fn conj(&self) -> C2 {
        C2::new(self.z1.conj(), self.z2.conj())
    }

    pub fn swap(&self) -> C2 {
        C2::new(self.z2, self.z1)
    }

    pub fn re(&self) -> [f64; 2] {
        [self.z1.re, self.z2.re]
    }

    pub fn im(&self) -> [f64; 2] {
        [self.z1.im, self.z2.im]
    }

    pub fn get(&self, j: usize) -> Cx {
        match j {
            0 => self.z1,
            1 => self.z2,
            _ => panic!("C2 component index {j} out of range"),
        }
    }

    pub fn set(&mut self, j: usize, v: Cx) {
        match j {
            0 => self.z1 = v,
            1 => self.z2 = v,
            _ => panic!("C2 component index {j} out of range"),
        }
    }
}

impl Add for C2 {
    type Output = C2;
    fn add(self, o: C2) -> C2 {
        C2::new(self.z1 + o.z1, self.z2 + o.z2)
    }
}

impl Sub for C2 {
    type Output = C2;
    fn sub(self, o: C2) -> C2 {
        C2::new(self.z1 - o.z1, self.z2 - o.z2)
    }
}

impl Neg for C2 {
    type Output = C2;
    fn neg(self) -> C2 {
        C2::new(-self.z1, -self.z2)
    }
}

impl AddAssign for C2 {
    fn add_assign(&mut self, o: C2) {
        self.z1 += o.z1;
        self.z2 += o.z2;
    }
}

impl SubAssign for C2 {
    fn sub_assign(&mut self, o: C2) {
        self.z1 -= o.z1;
        self.z2 -= o.z2;
    }
}

impl Mul<f64> for C2 {
    type Output = C2;
    fn mul(self, s: f64) -> C2 {
        C2::new(self.z1 * s, self.z2 * s)
    }
}

impl Mul<Cx> for C2 {
    type Output = C2;
    fn mul(self, s: Cx) -> C2 {
        C2::new(self.z1 * s, self.z2 * s)
    }
}

impl Div<f64> for C2 {
    type Output = C2;
    fn div(self, s: f64) -> C2 {
        C2::new(self.z1 / s, self.z2 / s)
    }
}

impl std::iter::Sum for C2 {
    fn sum<I: Iterator<Item = C2>>(iter: I) -> C2 {
        iter.fold(C2::ZERO, |a, b| a + b)
    }
}
