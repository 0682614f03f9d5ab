use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corepoly::{poly_roots, Cx, C2};
use crate::error::{invalid, precondition, Error, Result};

/// Polynomial on C² as a list of terms c·z₁^i z₂^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    terms: Vec<(Cx, u32, u32)>,
}

impl BiPoly {
    /// Like terms are merged and zero terms dropped.
    pub fn new(terms: &[(Cx, u32, u32)]) -> Self {
        let mut t: Vec<(Cx, u32, u32)> = Vec::new();
        for &(c, i, j) in terms {
            match t.iter_mut().find(|(_, a, b)| (*a, *b) == (i, j)) {
                Some(e) => e.0 += c,
                None => t.push((c, i, j)),
            }
        }
        t.retain(|(c, _, _)| *c != Cx::new(0.0, 0.0));
        t.sort_by_key(|&(_, i, j)| (i + j, i));
        BiPoly { terms: t }
    }

    pub fn terms(&self) -> &[(Cx, u32, u32)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|&(_, i, j)| i + j).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &C2) -> Cx {
        self.terms
            .iter()
            .map(|&(c, i, j)| c * z.z1.powu(i) * z.z2.powu(j))
            .sum()
    }

    /// Top-degree homogeneous part P′.
    pub fn leading_part(&self) -> BiPoly {
        let d = self.degree();
        BiPoly {
            terms: self.terms.iter().copied().filter(|&(_, i, j)| i + j == d).collect(),
        }
    }
}

/// Q(z) = a z₁ + b z₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearForm {
    pub a: Cx,
    pub b: Cx,
}

impl LinearForm {
    pub fn eval(&self, z: &C2) -> Cx {
        self.a * z.z1 + self.b * z.z2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayEvidence {
    /// Unit direction z of the ray t·z.
    pub direction: C2,
    pub on_factor_line: bool,
    /// max(|P(tz)|, |Q(tz)|) along the ladder.
    pub values: Vec<f64>,
    /// Ladder index from which the values increase strictly.
    pub monotone_from: usize,
    pub t0: f64,
    /// values[last] / max(1, values[monotone_from]).
    pub growth: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProperPair {
    pub p: BiPoly,
    pub q: LinearForm,
    /// Unit directions of the lines {P′ = 0}.
    pub factor_lines: Vec<C2>,
    /// |P′(v)| per factor line, relative to the coefficient scale.
    pub line_residuals: Vec<f64>,
    /// min |Q(v)| over unit factor directions.
    pub q_clearance: f64,
    pub ladder: Vec<f64>,
    pub rays: Vec<RayEvidence>,
    pub draws: usize,
}

impl ProperPair {
    pub fn pass(&self) -> bool {
        self.line_residuals.iter().all(|r| *r <= 1e-12) && self.rays.iter().all(|r| r.pass)
    }
}

/// Settings for [`proper_pair_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProperOptions {
    pub seed: u64,
    /// Smallest admissible |Q(v)| on unit factor directions.
    pub clearance: f64,
    pub max_draws: usize,
    pub random_rays: usize,
    /// Ladder t = 2^k, k = 0..=ladder_len − 1.
    pub ladder_len: usize,
    /// Smallest admissible growth along a ray.
    pub min_growth: f64,
}

impl Default for ProperOptions {
    fn default() -> Self {
        ProperOptions {
            seed: 0x5eed,
            clearance: 0.1,
            max_draws: 1000,
            random_rays: 16,
            ladder_len: 24,
            min_growth: 100.0,
        }
    }
}

/// Unit directions of the lines through 0 on which the homogeneous `lead`
/// vanishes, and the relative residual |lead(v)| at each.
///
/// # Errors
/// Root finding failure.
pub fn factor_lines(lead: &BiPoly) -> Result<(Vec<C2>, Vec<f64>)> {
    let d = lead.degree() as usize;
    let mut coeffs = vec![Cx::new(0.0, 0.0); d + 1];
    for &(c, i, _) in lead.terms() {
        coeffs[i as usize] += c;
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut top = d;
    while top > 0 && coeffs[top] == Cx::new(0.0, 0.0) {
        top -= 1;
    }
    let mut lines = Vec::new();
    if top > 0 {
        for t in poly_roots(&coeffs[..=top])? {
            let v = C2::new(t, Cx::new(1.0, 0.0));
            lines.push(C2::new(v.z1 / v.norm(), v.z2 / v.norm()));
        }
    }
    for _ in top..d {
        lines.push(C2::new(Cx::new(1.0, 0.0), Cx::new(0.0, 0.0)));
    }
    let residuals = lines.iter().map(|v| lead.eval(v).norm() / scale).collect();
    Ok((lines, residuals))
}

/// True when Q vanishes on no line of {P′ = 0} (|Q(v)| > clearance on
/// unit directions v).
///
/// # Errors
/// P constant or a factorization failure.
pub fn is_admissible(p: &BiPoly, q: &LinearForm, clearance: f64) -> Result<bool> {
    if p.degree() == 0 {
        return Err(precondition("proper_pair", "P is constant"));
    }
    let (lines, _) = factor_lines(&p.leading_part())?;
    Ok(lines.iter().all(|v| q.eval(v).norm() > clearance))
}

/// # Errors
/// See [`proper_pair_with`].
pub fn proper_pair(p: &BiPoly) -> Result<ProperPair> {
    proper_pair_with(p, &ProperOptions::default())
}

/// Linear Q with (P, Q) proper: drawn from unit-norm forms with a seeded
/// generator until it clears every line of {P′ = 0}, then checked along
/// rays t·z through each factor line and random directions.
///
/// # Errors
/// P constant, a factorization failure, or no admissible draw.
pub fn proper_pair_with(p: &BiPoly, opts: &ProperOptions) -> Result<ProperPair> {
    if p.degree() == 0 {
        return Err(precondition("proper_pair", "P is constant"));
    }
    if opts.ladder_len < 3 || !(opts.clearance > 0.0 && opts.clearance < 1.0) {
        return Err(invalid("ladder needs three points and clearance in (0, 1)"));
    }
    let (lines, line_residuals) = factor_lines(&p.leading_part())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draw = |rng: &mut ChaCha8Rng| -> C2 {
        let v = C2::from_parts(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        C2::new(v.z1 / n, v.z2 / n)
    };
    let mut chosen = None;
    let mut draws = 0;
    while draws < opts.max_draws {
        draws += 1;
        let v = draw(&mut rng);
        let q = LinearForm { a: v.z1, b: v.z2 };
        let clear = lines.iter().map(|l| q.eval(l).norm()).fold(f64::INFINITY, f64::min);
        if clear > opts.clearance {
            chosen = Some((q, clear));
            break;
        }
    }
    let Some((q, q_clearance)) = chosen else {
        return Err(Error::Numerical(format!("no admissible Q in {} draws", opts.max_draws)));
    };
    let ladder: Vec<f64> = (0..opts.ladder_len).map(|k| 2f64.powi(k as i32)).collect();
    let mut rays: Vec<RayEvidence> = lines.iter().map(|v| ray(p, &q, *v, true, &ladder, opts)).collect();
    for _ in 0..opts.random_rays {
        let v = draw(&mut rng);
        rays.push(ray(p, &q, v, false, &ladder, opts));
    }
    Ok(ProperPair {
        p: p.clone(),
        q,
        factor_lines: lines,
        line_residuals,
        q_clearance,
        ladder,
        rays,
        draws,
    })
}

fn ray(p: &BiPoly, q: &LinearForm, v: C2, on_factor_line: bool, ladder: &[f64], opts: &ProperOptions) -> RayEvidence {
    let values: Vec<f64> = ladder
        .iter()
        .map(|t| {
            let z = C2::new(v.z1 * *t, v.z2 * *t);
            p.eval(&z).norm().max(q.eval(&z).norm())
        })
        .collect();
    let mut from = values.len() - 1;
    while from > 0 && values[from - 1] < values[from] {
        from -= 1;
    }
    let last = values[values.len() - 1];
    let growth = last / values[from].max(1.0);
    RayEvidence {
        direction: v,
        on_factor_line,
        monotone_from: from,
        t0: ladder[from],
        growth,
        pass: from <= ladder.len() / 2 && growth >= opts.min_growth,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Cx {
        Cx::new(1.0, 0.0)
    }

    #[test]
    fn square_of_first_coordinate() {
        let p = BiPoly::new(&[(one(), 2, 0)]);
        let z2 = LinearForm { a: Cx::new(0.0, 0.0), b: one() };
        assert!(is_admissible(&p, &z2, 0.5).unwrap());
        let pp = proper_pair(&p).unwrap();
        assert!(pp.pass());
        assert_eq!(pp.factor_lines.len(), 2);
        assert!(pp.factor_lines.iter().all(|v| v.z1.norm() < 1e-12));
    }

    #[test]
    fn product_of_coordinates() {
        let p = BiPoly::new(&[(one(), 1, 1)]);
        let q = LinearForm { a: one(), b: one() };
        assert!(is_admissible(&p, &q, 0.5).unwrap());
        let z1 = LinearForm { a: one(), b: Cx::new(0.0, 0.0) };
        assert!(!is_admissible(&p, &z1, 0.1).unwrap());
        assert!(proper_pair(&p).unwrap().pass());
    }

    #[test]
    fn constant_rejected() {
        let p = BiPoly::new(&[(Cx::new(5.0, 0.0), 0, 0)]);
        assert!(matches!(proper_pair(&p), Err(Error::Precondition { .. })));
    }

    #[test]
    fn deterministic_draws() {
        let p = BiPoly::new(&[(one(), 3, 0), (Cx::new(-2.0, 1.0), 1, 2), (one(), 0, 0)]);
        let a = proper_pair(&p).unwrap();
        let b = proper_pair(&p).unwrap();
        assert_eq!(a, b);
        assert!(a.pass());
        assert!(a.line_residuals.iter().all(|r| *r <= 1e-12));
    }

    #[test]
    fn merges_terms() {
        let p = BiPoly::new(&[(one(), 1, 1), (one(), 1, 1), (Cx::new(-2.0, 0.0), 1, 1), (one(), 0, 1)]);
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.degree(), 1);
    }
}
