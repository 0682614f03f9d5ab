use propdisc::corepoly::{Cx, PolyMap, C2};
use propdisc::levigeom::rho_cone;
use propdisc::liftengine::*;
use propdisc::Error;

fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn unit_family(_z: Cx) -> propdisc::Result<PolyMap> {
    PolyMap::new(vec![C2::ZERO, C2::real(1.0, 0.0)])
}

/// (min, max) of f over `m` radii in [lo, hi] on n nodes.
fn range(f: impl Fn(Cx) -> f64, lo: f64, hi: f64, n: usize, m: usize) -> (f64, f64) {
    let mut out = (f64::INFINITY, f64::NEG_INFINITY);
    for l in 0..m {
        let t = lo + (hi - lo) * l as f64 / (m - 1) as f64;
        for k in 0..n {
            let v = f(Cx::from_polar(t, std::f64::consts::TAU * k as f64 / n as f64));
            out = (out.0.min(v), out.1.max(v));
        }
    }
    out
}

#[test]
fn monomial_family_gives_power() {
    let (h, cert) = approx_disc_family(&unit_family, 0.1, 0.5).unwrap();
    assert!(cert.pass(), "{cert}");
    let k = h.degree();
    assert!(k as f64 > 0.1f64.ln() / 0.5f64.ln());
    assert!((h.coeffs()[k].z1 - cx(1.0, 0.0)).norm() < 1e-12);
    assert!(h.majorant(0.5) < 0.1);
    assert!(h.eval(cx(0.0, 0.0)).norm() <= 0.1);
}

#[test]
fn twisted_family_recheck_on_doubled_grid() {
    let fam = |z: Cx| PolyMap::new(vec![C2::ZERO, C2::new(z.conj(), cx(0.0, 0.0))]);
    let (h, cert) = approx_disc_family(&fam, 0.1, 0.5).unwrap();
    assert!(cert.pass(), "{cert}");
    let n = 2 * cert.grid_nodes.iter().max().copied().unwrap_or(512);
    // |h(ζ)| = |ζ|^{K−1}; on T it lies on the boundary circle of λ_ζ.
    let (lo, hi) = range(|z| h.eval(z).z1.norm(), 1.0, 1.0, n, 2);
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    assert!(h.majorant(0.5) < 0.1);
}

#[test]
fn approximation_rejects_nonpositive_eps() {
    assert!(matches!(approx_disc_family(&unit_family, 0.0, 0.5), Err(Error::Precondition { .. })));
}

#[test]
fn push_to_unit_level_is_exact() {
    let rho = |z: &C2| z.z1.norm_sqr();
    let (g, cert) = push_boundary(&BaseMap::Poly(PolyMap::zero()), &unit_family, &rho, -0.1, 1.0, 0.1, 0.5, &PushOptions::default()).unwrap();
    assert!(cert.pass(), "{cert}");
    let (lo, hi) = range(|z| rho(&g.eval(z)), 1.0, 1.0, 2048, 2);
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    let (inner, _) = range(|z| g.eval(z).norm(), 0.0, 0.5, 2048, 16);
    assert!(inner >= 0.0 && g.majorant(0.5) < 0.1);
}

#[test]
fn push_hypothesis_b_names_itself() {
    let rho = |z: &C2| (z.z1 - cx(0.5, 0.0)).norm_sqr();
    let opts = PushOptions {
        band: Some(1.8),
        ..PushOptions::default()
    };
    let res = push_boundary(&BaseMap::Poly(PolyMap::zero()), &unit_family, &rho, 0.1, 2.0, 1.9, 0.5, &opts);
    assert!(matches!(res, Err(Error::Hypothesis { which: "(b)", .. })));
}

#[test]
fn push_is_translation_equivariant() {
    let g0 = PolyMap::from_components(&[cx(0.0, 0.0), cx(0.05, 0.0)], &[]).unwrap();
    let v = C2::from_parts(-1.0, 2.0, 0.5, 0.0);
    let rho0 = |z: &C2| z.z1.norm_sqr();
    let rhov = move |z: &C2| (*z - v).z1.norm_sqr();
    let opts = PushOptions {
        band: Some(0.19),
        ..PushOptions::default()
    };
    let (a, _) = push_boundary(&BaseMap::Poly(g0.clone()), &unit_family, &rho0, -0.5, 1.0, 0.2, 0.5, &opts).unwrap();
    let (b, _) = push_boundary(&BaseMap::Poly(g0.translated(v)), &unit_family, &rhov, -0.5, 1.0, 0.2, 0.5, &opts).unwrap();
    let d = &b - &a.translated(v);
    assert!(d.coeffs().iter().all(|c| c.norm() <= 1e-10));
}

fn levi_fixture() -> PolyMap {
    PolyMap::from_components(&[cx(2.0, 0.0), cx(0.3, 0.0)], &[]).unwrap()
}

#[test]
fn levi_lift_certifies_and_rechecks() {
    let g0 = levi_fixture();
    let c = 0.5;
    let level = |z: Cx| 0.2 * rho_cone(c, &levi_fixture().eval(z));
    let (eps, r) = (0.05, 0.5);
    let (g, cert) = lift_step_levi(&g0, c, &level, eps, r).unwrap();
    assert!(cert.pass(), "{cert}");
    let n = 1024;
    let (lo, hi) = range(
        |z| rho_cone(c, &g.eval(z)) - rho_cone(c, &g0.eval(z)) - level(z),
        1.0,
        1.0,
        n,
        2,
    );
    assert!(lo > -eps && hi < eps, "{lo} {hi}");
    let (low, _) = range(|z| rho_cone(c, &g.eval(z)) - rho_cone(c, &g0.eval(z)) + eps, 0.0, 1.0, n, 16);
    assert!(low > 0.0);
    assert!((&g - &g0).majorant(r) < eps);
}

#[test]
fn levi_lift_preconditions() {
    let g0 = levi_fixture();
    let zero_level = |_: Cx| 0.0;
    assert!(matches!(lift_step_levi(&g0, 0.5, &zero_level, 0.05, 0.5), Err(Error::Precondition { .. })));
    let through_zero = PolyMap::from_components(&[cx(-1.0, 0.0), cx(1.0, 0.0)], &[]).unwrap();
    let level = |_: Cx| 0.1;
    assert!(matches!(lift_step_levi(&through_zero, 0.5, &level, 0.05, 0.5), Err(Error::Precondition { .. })));
}

#[test]
fn cone_lift_from_constant_and_half_radius() {
    let h = PolyMap::constant(C2::real(2.0, 0.0));
    let (eps, r) = (0.1, 0.5);
    let (g, cert) = lift_step_cone(&h, 0.5, eps, r).unwrap();
    assert!(cert.pass(), "{cert}");
    let a = cert.param("a").unwrap();
    assert_eq!(cert.param("m_h"), Some(4.0));
    let m_g = boundary_min(&g, 0.5, 2048);
    assert!(m_g >= (1.0 + a) * 4.0 - eps);
    assert!((&g - &h).majorant(r) < eps);

    let opts = ConeOptions {
        a: Some(a / 2.0),
        ..ConeOptions::default()
    };
    let (g2, cert2) = lift_step_cone_with(&h, 0.5, eps, r, &opts).unwrap();
    assert!(cert2.pass(), "{cert2}");
    assert!(boundary_min(&g2, 0.5, 2048) >= (1.0 + a / 2.0) * 4.0 - eps);
}

#[test]
fn cone_lift_needs_positive_minimum() {
    let h = PolyMap::zero();
    assert!(matches!(lift_step_cone(&h, 0.5, 0.1, 0.5), Err(Error::Precondition { .. })));
    assert!(lift_step_cone(&PolyMap::constant(C2::real(1.0, 0.0)), 1.0, 0.1, 0.5).is_err());
}
