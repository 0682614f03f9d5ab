use proptest::prelude::*;
use propdisc::corepoly::fourier::node;
use propdisc::corepoly::*;

fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn coeff() -> impl Strategy<Value = Cx> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| cx(a, b))
}

#[test]
fn evaluation_and_roots_of_unity() {
    let p = PolyMap::from_components(&[cx(1.0, 0.0)], &[cx(0.0, 0.0), cx(1.0, 0.0)]).unwrap();
    assert_eq!(p.eval(cx(0.0, 1.0)), C2::new(cx(1.0, 0.0), cx(0.0, 1.0)));
    let id = PolyMap::from_components(&[cx(0.0, 0.0), cx(1.0, 0.0)], &[]).unwrap();
    let s = id.sample_circle(1.0, 8);
    for (k, v) in s.iter().enumerate() {
        assert!((v.z1 - node(k, 8)).norm() < 1e-15);
        assert!((v.z1.powu(8) - cx(1.0, 0.0)).norm() < 1e-14);
    }
    let grid = eval_and_sample(&id, &[0.5, 1.0], 4).unwrap();
    assert_eq!(grid.iter().map(|g| g.values().len()).sum::<usize>(), 8);
}

#[test]
fn geometric_series_coefficients() {
    let g = BoundaryGrid::sample(1.0, 256, |z| cx(1.0, 0.0) / (cx(2.0, 0.0) - z)).unwrap();
    let l = trig_approx(&g, 0, 20, 1e-5).unwrap();
    for k in 0..=20 {
        assert!((l.coeff(k) - cx(2f64.powi(-(k as i32 + 1)), 0.0)).norm() < 1e-10);
    }
    assert!(l.sup_error <= 1e-5 && !l.failed);
}

#[test]
fn conjugate_monomial_and_constant() {
    let g = BoundaryGrid::sample(1.0, 64, |z| z.conj()).unwrap();
    let l = trig_approx(&g, 1, 1, 1e-12).unwrap();
    assert!((l.coeff(-1) - cx(1.0, 0.0)).norm() < 1e-12);
    assert!(l.coeff(0).norm() < 1e-12 && l.coeff(1).norm() < 1e-12);
    let c = BoundaryGrid::sample(1.0, 16, |_| cx(3.0, 0.0)).unwrap();
    let l = trig_approx(&c, 0, 0, 1e-12).unwrap();
    assert!((l.coeff(0) - cx(3.0, 0.0)).norm() < 1e-12 && l.sup_error <= 1e-12);
}

#[test]
fn sine_taylor_coefficients() {
    let d = sample_disc(0.95, 64, |w| C2::new(w.sin(), cx(0.0, 0.0))).unwrap();
    let a = &taylor_truncate(&[d], 8, 1e-12).unwrap()[0];
    assert!((a[0].z1 - cx(1.0, 0.0)).norm() < 1e-10);
    assert!(a[1].z1.norm() < 1e-10);
    assert!((a[2].z1 - cx(-1.0 / 6.0, 0.0)).norm() < 1e-10);
}

#[test]
fn node_dependent_quadratic_family() {
    let discs: Vec<_> = (0..8)
        .map(|k| {
            let z = node(k, 8);
            sample_disc(0.95, 32, move |w| C2::new(z.conj() * w * w, cx(0.0, 0.0))).unwrap()
        })
        .collect();
    let a = taylor_truncate(&discs, 4, 1e-12).unwrap();
    for (k, ak) in a.iter().enumerate() {
        assert!((ak[1].z1 - node(k, 8).conj()).norm() < 1e-12);
        assert!(ak[0].z1.norm() < 1e-12);
    }
}

#[test]
fn affine_disc_conformal_map() {
    let boundary: Vec<Cx> = (0..256).map(|k| cx(1.0, 0.0) + node(k, 256) * 2.0).collect();
    let dom = PlanarDomain::new(boundary, cx(1.0, 0.0)).unwrap();
    let m = riemann_map(&dom, 1e-3).unwrap();
    assert!(m.certificate.pass);
    assert!((m.eval(cx(0.0, 0.0)) - cx(1.0, 0.0)).norm() < 1e-6);
    assert!((m.derivative(cx(0.0, 0.0)).norm() - 2.0).abs() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn band_limited_round_trip(lo in 0usize..6, hi in 0i64..6, c in prop::collection::vec(coeff(), 12)) {
        let m = lo as i64;
        let f = |z: Cx| (-m..=hi).map(|k| c[(k + m) as usize] * z.powi(k as i32)).sum::<Cx>();
        let g = BoundaryGrid::sample(1.0, 64, f).unwrap();
        let l = trig_approx(&g, lo, hi, 1e-12).unwrap();
        prop_assert!(l.sup_error <= 1e-12);
        for k in -m..=hi {
            prop_assert!((l.coeff(k) - c[(k + m) as usize]).norm() <= 1e-12);
        }
    }

    #[test]
    fn taylor_truncate_is_linear(a in prop::collection::vec(coeff(), 6), b in prop::collection::vec(coeff(), 6)) {
        let pa = |w: Cx| C2::new((1..6).map(|k| a[k] * w.powu(k as u32)).sum(), a[0] * w);
        let pb = |w: Cx| C2::new(b[0] * w, (1..6).map(|k| b[k] * w.powu(k as u32)).sum());
        let sa = sample_disc(0.95, 32, pa).unwrap();
        let sb = sample_disc(0.95, 32, pb).unwrap();
        let ss = sample_disc(0.95, 32, |w| pa(w) + pb(w)).unwrap();
        let t = taylor_truncate(&[sa, sb, ss], 8, 1e-12).unwrap();
        for j in 0..8 {
            prop_assert!((t[2][j] - (t[0][j] + t[1][j])).norm() <= 1e-12);
        }
    }

    #[test]
    fn doubled_grid_shares_nodes(c in prop::collection::vec(coeff(), 1..20), r in 0.1..1.0f64) {
        let p = PolyMap::from_components(&c, &c[..c.len() / 2]).unwrap();
        let a = eval_and_sample(&p, &[r, 1.0], 16).unwrap();
        let b = eval_and_sample(&p, &[r, 1.0], 32).unwrap();
        for (ga, gb) in a.iter().zip(&b) {
            for k in 0..16 {
                prop_assert_eq!(ga.values()[k], gb.values()[2 * k]);
            }
        }
    }

    #[test]
    fn roots_annihilate(c in prop::collection::vec(coeff(), 2..25)) {
        prop_assume!(c.last().unwrap().norm() > 0.1);
        let roots = poly_roots(&c).unwrap();
        prop_assert_eq!(roots.len(), c.len() - 1);
        let scale: f64 = c.iter().map(|v| v.norm()).sum();
        for z in roots {
            let (p, _) = horner(&c, z);
            prop_assert!(p.norm() <= 1e-9 * scale * (1.0 + z.norm()).powi(c.len() as i32 - 1));
        }
    }
}
