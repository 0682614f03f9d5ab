use std::f64::consts::TAU;

use super::c2::Cx;
use crate::error::{invalid, Result};

/// Bounded simply connected planar domain given by a closed, simple,
/// positively oriented polyline and a marked interior point.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarDomain {
    boundary: Vec<Cx>,
    center: Cx,
    radial: Option<Vec<f64>>,
}

impl PlanarDomain {
    /// The closing segment from the last vertex back to the first is implicit.
    ///
    /// # Errors
    /// Fewer than three vertices, non-finite data, a self-intersection, or
    /// winding number about `center` different from 1.
    pub fn new(boundary: Vec<Cx>, center: Cx) -> Result<Self> {
        let d = PlanarDomain {
            boundary,
            center,
            radial: None,
        };
        d.validate()?;
        Ok(d)
    }

    /// Domain star-shaped about `center` with boundary center + r_k e^{2πik/n}.
    ///
    /// # Errors
    /// As for [`PlanarDomain::new`], plus non-positive radii.
    pub fn star(center: Cx, radii: Vec<f64>) -> Result<Self> {
        let n = radii.len();
        if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(invalid("star domain radii must be positive and finite"));
        }
        let boundary = radii
            .iter()
            .enumerate()
            .map(|(k, r)| center + Cx::from_polar(*r, TAU * k as f64 / n as f64))
            .collect();
        let d = PlanarDomain {
            boundary,
            center,
            radial: Some(radii),
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let n = self.boundary.len();
        if n < 3 {
            return Err(invalid("boundary polyline needs at least three vertices"));
        }
        if !self.center.is_finite() || self.boundary.iter().any(|z| !z.is_finite()) {
            return Err(invalid("non-finite domain data"));
        }
        if let Some((i, j)) = first_crossing(&self.boundary) {
            return Err(invalid(format!("boundary segments {i} and {j} intersect")));
        }
        let w = winding_number(&self.boundary, self.center);
        if w != 1 {
            return Err(invalid(format!("winding number about the center is {w}, expected 1")));
        }
        Ok(())
    }

    pub fn boundary(&self) -> &[Cx] {
        &self.boundary
    }

    pub fn center(&self) -> Cx {
        self.center
    }

    /// Radial samples when the domain was built with [`PlanarDomain::star`].
    pub fn radial(&self) -> Option<&[f64]> {
        self.radial.as_deref()
    }

    pub fn diameter(&self) -> f64 {
        let b = &self.boundary;
        let mut d: f64 = 0.0;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                d = d.max((b[i] - b[j]).norm_sqr());
            }
        }
        d.sqrt()
    }

    /// Distance from p to the boundary polyline.
    pub fn boundary_distance(&self, p: Cx) -> f64 {
        let b = &self.boundary;
        let n = b.len();
        (0..n)
            .map(|i| segment_distance(p, b[i], b[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Cx) -> bool {
        winding_number(&self.boundary, p) != 0
    }
}

/// Distance from p to the segment [a, b].
pub fn segment_distance(p: Cx, a: Cx, b: Cx) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / l2).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

/// Winding number of the closed polyline about p (0 when p lies on it).
pub fn winding_number(poly: &[Cx], p: Cx) -> i64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i] - p;
        let b = poly[(i + 1) % n] - p;
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return 0;
        }
        total += (b / a).arg();
    }
    (total / TAU).round() as i64
}

fn orient(a: Cx, b: Cx, c: Cx) -> f64 {
    ((b - a) * (c - a).conj()).im
}

fn segments_cross(a: Cx, b: Cx, c: Cx, d: Cx) -> bool {
    if a.re.max(b.re) < c.re.min(d.re)
        || c.re.max(d.re) < a.re.min(b.re)
        || a.im.max(b.im) < c.im.min(d.im)
        || c.im.max(d.im) < a.im.min(b.im)
    {
        return false;
    }
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Cx, q: Cx, r: Cx, o: f64| {
        o == 0.0
            && r.re >= p.re.min(q.re)
            && r.re <= p.re.max(q.re)
            && r.im >= p.im.min(q.im)
            && r.im <= p.im.max(q.im)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// First pair of non-adjacent segments that meet, if any.
pub fn first_crossing(poly: &[Cx]) -> Option<(usize, usize)> {
    let n = poly.len();
    let seg = |i: usize| (poly[i], poly[(i + 1) % n]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = seg(i);
        let (c, d) = seg(j);
        a.re.min(b.re).total_cmp(&c.re.min(d.re))
    });
    for (oi, &i) in order.iter().enumerate() {
        let (a, b) = seg(i);
        let xmax = a.re.max(b.re);
        for &j in &order[oi + 1..] {
            let (c, d) = seg(j);
            if c.re.min(d.re) > xmax {
                break;
            }
            let adjacent = j == (i + 1) % n || i == (j + 1) % n;
            if adjacent {
                let (shared, p, q) = if j == (i + 1) % n { (b, a, d) } else { (a, b, c) };
                if orient(p, shared, q) == 0.0 && ((p - shared) * (q - shared).conj()).re > 0.0 {
                    return Some((i.min(j), i.max(j)));
                }
                continue;
            }
            if segments_cross(a, b, c, d) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}
