use super::cert::{Condition, LiftCertificate};
use super::family::{CachedFamily, DiscFamily};
use crate::corepoly::fourier::node;
use crate::corepoly::{trig_approx, BoundaryGrid, Cx, PolyMap, C2};
use crate::error::{precondition, Result};

/// Budgets and grids for [`approx_disc_family_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxOptions {
    /// Initial number of family nodes for the Laurent expansion.
    pub start_nodes: usize,
    pub max_nodes: usize,
    /// Boundary nodes of the base verification grid (its double is checked too).
    pub verify_nodes: usize,
    /// Radii of the base verification grid on r ≤ |ζ| ≤ 1.
    pub verify_radii: usize,
    /// Degree budget for h.
    pub max_degree: usize,
    /// Fraction of ε granted to the uniform error of λ̃ − λ.
    pub approx_share: f64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            start_nodes: 64,
            max_nodes: 4096,
            verify_nodes: 512,
            verify_radii: 8,
            max_degree: 1 << 16,
            approx_share: 0.25,
        }
    }
}

/// Polynomial h with (i) dist(h(ζ), λ_ζ(T)) < ε on T, (ii) dist(h(tζ),
/// λ_ζ(Ū)) < ε for r ≤ t ≤ 1, (iii) |h| < ε on |ζ| ≤ r.
///
/// # Errors
/// See [`approx_disc_family_with`].
pub fn approx_disc_family(family: &dyn DiscFamily, eps: f64, r: f64) -> Result<(PolyMap, LiftCertificate)> {
    approx_disc_family_with(family, eps, r, &ApproxOptions::default())
}

/// Expands λ(ζ, w) ≈ Σ_j A_j(ζ) w^j with Laurent polynomials A_j in ζ,
/// sets h(ζ) = Σ_j A_j(ζ) ζ^{jK}, and doubles K until the three
/// conditions hold on the verification grid and its double. A certificate
/// that still fails when the degree budget is reached is returned as is.
///
/// # Errors
/// ε ≤ 0, r outside (0, 1), bad grid options, or a family failure.
pub fn approx_disc_family_with(
    family: &dyn DiscFamily,
    eps: f64,
    r: f64,
    opts: &ApproxOptions,
) -> Result<(PolyMap, LiftCertificate)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(precondition("approx_disc_family", format!("needs ε > 0, got {eps}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(precondition("approx_disc_family", format!("needs 0 < r < 1, got {r}")));
    }
    check_grid_options(opts)?;
    let cache = CachedFamily::new(family);
    let exp = Expansion::build(&cache, opts.approx_share * eps, opts)?;
    let mut k = exp.initial_k(eps, r);
    let mut last: Option<(PolyMap, LiftCertificate)> = None;
    let mut history = Vec::new();
    loop {
        if exp.degree(k) > opts.max_degree {
            let (h, mut cert) = match last {
                Some(v) => v,
                None => {
                    let h = exp.poly(k);
                    let mut c = verify_family_map(&h, k, &cache, eps, r, opts)?;
                    c.notes.push("initial K already exceeds the degree budget".into());
                    (h, c)
                }
            };
            cert.notes.extend(history);
            cert.notes.push(format!(
                "degree budget {} exhausted (next K = {k} needs degree {})",
                opts.max_degree,
                exp.degree(k)
            ));
            return Ok((h, cert));
        }
        let h = exp.poly(k);
        let mut cert = verify_family_map(&h, k, &cache, eps, r, opts)?;
        exp.record(&mut cert);
        if cert.pass() {
            cert.notes.extend(history);
            return Ok((h, cert));
        }
        history.push(format!(
            "K = {k}: {}",
            cert.failures().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
        ));
        last = Some((h, cert));
        k *= 2;
    }
}

pub(crate) fn check_grid_options(opts: &ApproxOptions) -> Result<()> {
    let pow2 = |n: usize| n >= 2 && n.is_power_of_two();
    if !pow2(opts.start_nodes) || !pow2(opts.max_nodes) || !pow2(opts.verify_nodes) || opts.verify_radii < 2 {
        return Err(precondition("approx_disc_family", "grid sizes must be powers of two (radii ≥ 2)"));
    }
    if !(opts.approx_share > 0.0 && opts.approx_share < 1.0) {
        return Err(precondition("approx_disc_family", "approx_share must lie in (0, 1)"));
    }
    Ok(())
}

/// Laurent data of the Taylor coefficients a_1..a_N of the family.
struct Expansion {
    nodes: usize,
    /// bands[j-1] = (−M_j, P_j) and the coefficients for those frequencies.
    bands: Vec<(i64, i64)>,
    coeffs: Vec<Vec<C2>>,
    taylor_tail: f64,
    band_tail: f64,
    alias_mass: f64,
    laurent_sup: f64,
}

impl Expansion {
    fn build(cache: &CachedFamily<'_>, delta: f64, opts: &ApproxOptions) -> Result<Self> {
        let mut n = opts.start_nodes;
        loop {
            let discs = cache.discs_on(n)?;
            let order = discs.iter().map(|d| d.coeffs().len()).max().unwrap_or(1) - 1;
            let coef = |i: usize, j: usize| discs[i].coeffs().get(j).copied().unwrap_or(C2::ZERO);
            let mut big_n = 1;
            let mut taylor_tail: f64 = 0.0;
            for i in 0..n {
                let mut tail = 0.0;
                let mut jn = order;
                for j in (1..=order).rev() {
                    let t = tail + coef(i, j).norm();
                    if t > delta / 4.0 {
                        break;
                    }
                    tail = t;
                    jn = j - 1;
                }
                big_n = big_n.max(jn.max(1));
                taylor_tail = taylor_tail.max(tail);
            }
            let per_j = delta / (4.0 * big_n as f64);
            let freq = |k: usize| if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
            let mut alias_mass = 0.0;
            let mut spectra = Vec::with_capacity(big_n);
            for j in 1..=big_n {
                let vals: Vec<C2> = (0..n).map(|i| coef(i, j)).collect();
                let s = spectrum(&vals);
                alias_mass += s
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| freq(*k).unsigned_abs() as usize >= n / 4)
                    .map(|(_, c)| c.norm())
                    .sum::<f64>();
                spectra.push(s);
            }
            if alias_mass > delta / 8.0 && 2 * n <= opts.max_nodes {
                n *= 2;
                continue;
            }
            let mut bands = Vec::with_capacity(big_n);
            let mut coeffs = Vec::with_capacity(big_n);
            let mut band_tail = 0.0;
            let mut laurent_sup: f64 = 0.0;
            for (j0, s) in spectra.iter().enumerate() {
                let at = |f: i64| s[f.rem_euclid(n as i64) as usize];
                let half = (n / 4) as i64 - 1;
                let mut lo = -half;
                let mut cut = 0.0;
                while lo < 0 && cut + at(lo).norm() <= per_j / 2.0 {
                    cut += at(lo).norm();
                    lo += 1;
                }
                let mut hi = half;
                let mut cut_hi = 0.0;
                while hi > lo && cut_hi + at(hi).norm() <= per_j / 2.0 {
                    cut_hi += at(hi).norm();
                    hi -= 1;
                }
                let outside: f64 = s
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| freq(*k) < lo || freq(*k) > hi)
                    .map(|(_, c)| c.norm())
                    .sum();
                band_tail += outside;
                let low = (-lo) as usize;
                let mut comp = Vec::with_capacity(2);
                for c in 0..2 {
                    let g = BoundaryGrid::new(1.0, (0..n).map(|i| coef(i, j0 + 1).get(c)).collect())?;
                    let l = trig_approx(&g, low, hi, f64::INFINITY)?;
                    laurent_sup = laurent_sup.max(l.sup_error);
                    comp.push(l);
                }
                bands.push((lo, hi));
                coeffs.push((lo..=hi).map(|f| C2::new(comp[0].coeff(f), comp[1].coeff(f))).collect());
            }
            return Ok(Expansion {
                nodes: n,
                bands,
                coeffs,
                taylor_tail,
                band_tail,
                alias_mass,
                laurent_sup,
            });
        }
    }

    fn k_min(&self) -> usize {
        self.bands
            .iter()
            .enumerate()
            .map(|(j0, (lo, _))| ((-lo).max(0) as usize).div_ceil(j0 + 1))
            .max()
            .unwrap_or(1)
            .max(1)
    }

    fn degree(&self, k: usize) -> usize {
        self.bands
            .iter()
            .enumerate()
            .map(|(j0, (_, hi))| ((j0 + 1) * k) as i64 + hi)
            .max()
            .unwrap_or(0)
            .max(0) as usize
    }

    /// Σ_j Σ_f |c_jf| r^{jK+f}: bounds sup_{|ζ|≤r}|h|.
    fn majorant(&self, k: usize, r: f64) -> f64 {
        let mut s = 0.0;
        for (j0, ((lo, _), c)) in self.bands.iter().zip(&self.coeffs).enumerate() {
            for (i, v) in c.iter().enumerate() {
                let e = ((j0 + 1) * k) as f64 + (*lo + i as i64) as f64;
                s += v.norm() * r.powf(e);
            }
        }
        s
    }

    /// Smallest K ≥ K_min whose majorant on |ζ| ≤ r is below ε/2.
    fn initial_k(&self, eps: f64, r: f64) -> usize {
        let lo0 = self.k_min();
        if self.majorant(lo0, r) <= eps / 2.0 {
            return lo0;
        }
        let mut hi = lo0;
        while self.majorant(hi, r) > eps / 2.0 && hi < 1 << 30 {
            hi *= 2;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let m = (lo + hi) / 2;
            if self.majorant(m, r) <= eps / 2.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        hi.max(lo0)
    }

    fn poly(&self, k: usize) -> PolyMap {
        let mut out = vec![C2::ZERO; self.degree(k) + 1];
        for (j0, ((lo, _), c)) in self.bands.iter().zip(&self.coeffs).enumerate() {
            for (i, v) in c.iter().enumerate() {
                let m = ((j0 + 1) * k) as i64 + lo + i as i64;
                out[m as usize] += *v;
            }
        }
        PolyMap::new(out).expect("finite coefficients")
    }

    fn record(&self, cert: &mut LiftCertificate) {
        cert.set_param("family_nodes", self.nodes as f64);
        cert.set_param("taylor_order", self.bands.len() as f64);
        cert.set_param(
            "max_negative_band",
            self.bands.iter().map(|(lo, _)| -lo).max().unwrap_or(0) as f64,
        );
        cert.set_param("taylor_tail", self.taylor_tail);
        cert.set_param("band_tail", self.band_tail);
        cert.set_param("alias_mass", self.alias_mass);
        cert.set_param("laurent_sup_error", self.laurent_sup);
    }
}

fn spectrum(vals: &[C2]) -> Vec<C2> {
    use crate::corepoly::fourier::dft_coeffs;
    let a = dft_coeffs(&vals.iter().map(|v| v.z1).collect::<Vec<_>>());
    let b = dft_coeffs(&vals.iter().map(|v| v.z2).collect::<Vec<_>>());
    a.into_iter().zip(b).map(|(x, y)| C2::new(x, y)).collect()
}

/// Radii r = t_0 < ... < t_{m-1} = 1, equispaced.
pub(crate) fn radius_ladder(r: f64, m: usize) -> Vec<f64> {
    (0..m).map(|l| r + (1.0 - r) * l as f64 / (m - 1) as f64).collect()
}

/// Checks (i)–(iii) for h against the family on the base grid and its double.
fn verify_family_map(
    h: &PolyMap,
    k: usize,
    cache: &CachedFamily<'_>,
    eps: f64,
    r: f64,
    opts: &ApproxOptions,
) -> Result<LiftCertificate> {
    let n = 2 * opts.verify_nodes;
    let discs = cache.discs_on(n)?;
    let on_t = h.sample_circle(1.0, n);
    let mut dist_t: f64 = 0.0;
    for (i, d) in discs.iter().enumerate() {
        let w = node((i * (k % n)) % n, n);
        dist_t = dist_t.max((on_t[i] - d.eval(w)).norm());
    }
    let mut dist_a: f64 = 0.0;
    for t in radius_ladder(r, 2 * opts.verify_radii - 1) {
        let vals = h.sample_circle(t, n);
        let tk = t.powf(k as f64);
        for (i, d) in discs.iter().enumerate() {
            let w = node((i * (k % n)) % n, n) * tk;
            let mut best = (vals[i] - d.eval(w)).norm();
            if best >= 0.5 * eps {
                best = best.min(closest_on_disc(d, vals[i], w));
            }
            dist_a = dist_a.max(best);
        }
    }
    let mut cert = LiftCertificate {
        grid_nodes: vec![opts.verify_nodes, n],
        grid_radii: opts.verify_radii,
        ..Default::default()
    };
    cert.push(Condition::below("(i) dist(h, λ_ζ(T)) on T", dist_t, eps));
    cert.push(Condition::below("(ii) dist(h(tζ), λ_ζ(Ū)) on r ≤ t ≤ 1", dist_a, eps));
    cert.push(Condition::below("(iii) sup |h| on |ζ| ≤ r", h.majorant(r), eps));
    cert.set_param("eps", eps);
    cert.set_param("r", r);
    cert.set_param("K", k as f64);
    cert.set_param("degree", h.degree() as f64);
    Ok(cert)
}

/// Upper bound for dist(p, λ(Ū)) by projected Gauss–Newton from w.
pub(crate) fn closest_on_disc(lambda: &PolyMap, p: C2, w: Cx) -> f64 {
    let dl = lambda.derivative();
    let proj = |w: Cx| if w.norm() > 1.0 { w / w.norm() } else { w };
    let mut w = proj(w);
    let mut best = (lambda.eval(w) - p).norm();
    let mut step_scale = 1.0;
    for _ in 0..40 {
        let res = lambda.eval(w) - p;
        let j = dl.eval(w);
        let jj = j.norm_sqr();
        if jj == 0.0 {
            break;
        }
        let dw = -res.hdot(&j).conj() / jj * step_scale;
        let cand = proj(w + dw);
        let v = (lambda.eval(cand) - p).norm();
        if v < best {
            best = v;
            w = cand;
            step_scale = (step_scale * 2.0).min(1.0);
        } else {
            step_scale *= 0.5;
            if step_scale < 1e-6 {
                break;
            }
        }
    }
    best
}
