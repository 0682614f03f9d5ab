use proptest::prelude::*;
use propdisc::corepoly::{Cx, PolyMap, C2};
use propdisc::tubedisc::*;
use propdisc::Error;

fn cx(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn small() -> ModelOptions {
    ModelOptions {
        boundary_samples: 128,
        rings: 6,
        rays: 12,
        curve_samples: 65,
        domain_vertices: 128,
    }
}

#[test]
fn model_disc_at_tenth() {
    let m = model_disc(0.1).unwrap();
    assert!(m.certificate.pass(), "{}", m.certificate);
    assert!(m.max_residual() < 1e-9);
    assert!((m.a_eps - 4.5f64.sqrt()).abs() < 1e-14);
    for z in &m.boundary {
        assert!(dist_to_k(z.re()) < 1e-8);
        assert!(z.z1.im * z.z1.im + z.z2.im * z.z2.im <= 10.0 + 1e-8);
    }
    // Real points of Γ_ε sit on γ_ε.
    for &(x1, h) in &m.curve {
        assert!(model_f(0.1, x1, h).abs() < 1e-12);
    }
}

#[test]
fn graph_at_small_eps_hugs_the_diagonal() {
    let eps = 0.01;
    for k in 0..=100 {
        let x1 = k as f64 / 100.0;
        let h = h_eps(eps, x1);
        assert!(h <= 1.0 - x1 + 1e-15 && h >= 1.0 - x1 - eps, "{x1} {h}");
    }
}

#[test]
fn model_rejects_bad_eps() {
    assert!(model_disc(0.0).is_err());
    assert!(model_disc(0.5).is_err());
    assert!(xi_eps(0.7, 0.1, 0.0).is_err());
}

#[test]
fn largest_eps_on_coarse_grid() {
    assert_eq!(largest_admissible_eps(0.1, &small()), Some(0.4));
    assert_eq!(largest_admissible_eps(0.0, &small()), None);
}

#[test]
fn tube_lift_rechecks_on_doubled_grid() {
    let g0 = PolyMap::from_components(&[cx(0.5, 0.0), cx(0.1, 0.0)], &[cx(0.3, 0.1)]).unwrap();
    let (c0, c1, eps, r) = (0.2, 1.0, 0.05, 0.5);
    let (g, cert) = lift_step_tube(&g0, c0, c1, eps, r).unwrap();
    assert!(cert.pass(), "{cert}");
    let n = 2 * cert.grid_nodes.iter().max().copied().unwrap();
    for w in g.sample_circle(1.0, n) {
        assert!((rho_max(&w) - c1).abs() < eps);
    }
    for l in 0..16 {
        let t = r + (1.0 - r) * l as f64 / 15.0;
        for w in g.sample_circle(t, n) {
            assert!(rho_max(&w) > c0);
        }
    }
    assert!((&g - &g0).majorant(r) < eps);
}

#[test]
fn tube_lift_reports_band() {
    let g0 = PolyMap::from_components(&[cx(0.5, 0.0), cx(0.4, 0.0)], &[]).unwrap();
    assert!(matches!(
        lift_step_tube(&g0, 0.2, 0.8, 0.05, 0.5),
        Err(Error::Hypothesis { which: "band", .. })
    ));
}

#[test]
fn factor_and_restore() {
    // (ζ(ζ − 0.2), 3 + ζ)
    let h = PolyMap::from_components(&[cx(0.0, 0.0), cx(-0.2, 0.0), cx(1.0, 0.0)], &[cx(3.0, 0.0), cx(1.0, 0.0)]).unwrap();
    let f = factor_zeros(&h, 0.5).unwrap();
    assert_eq!(f.roots[0].len(), 2);
    assert!(f.roots[1].is_empty());
    assert!(f.min_modulus[0] > 0.0 && f.min_modulus[1] > 0.0);
    for k in 0..32 {
        let z = Cx::from_polar(0.3 + 0.02 * k as f64, k as f64);
        let back = f.restore(z, f.map.eval(z));
        assert!((back - h.eval(z)).norm() < 1e-12);
    }
    let on_annulus = PolyMap::from_components(&[cx(-0.7, 0.0), cx(1.0, 0.0)], &[cx(1.0, 0.0)]).unwrap();
    assert!(factor_zeros(&on_annulus, 0.5).is_err());
}

#[test]
fn axis_levels_step_by_one() {
    assert_eq!(axis_level(0.5, 1), 0.5);
    assert_eq!(axis_level(0.5, 4), 3.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_endpoints_and_real_trace(eps in 0.01..0.49f64, x1 in 0.0..1.0f64) {
        prop_assert!((h_eps(eps, 0.0) - 1.0).abs() < 1e-14);
        prop_assert!(h_eps(eps, 1.0).abs() < 1e-14);
        let h = h_eps(eps, x1);
        prop_assert!(model_f(eps, x1, h).abs() < 1e-13);
        prop_assert!((xi_eps(eps, x1, 0.0).unwrap() - h).abs() < 1e-12);
        prop_assert!((graph_eps(eps, cx(x1, 0.0)) - cx(h, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn chord_disc_through_point(x1 in -1.0..0.9f64, x2 in -1.0..0.9f64, y1 in -2.0..2.0f64, y2 in -2.0..2.0f64) {
        let z = C2::from_parts(x1, y1, x2, y2);
        let (c0, c1, tol) = (-1.2, 1.0, 1e-3);
        let tri = disc_through_point(&z, c0, c1, tol).unwrap();
        prop_assert!(tri.certificate.pass());
        prop_assert!((tri.disc.eval(cx(0.0, 0.0)) - z).norm() < tol);
        let n = 4 * (tri.order() + 1).next_power_of_two();
        for w in tri.disc.sample_circle(1.0, n) {
            prop_assert!((rho_max(&w) - c1).abs() < tol);
        }
        for l in 0..8 {
            for w in tri.disc.sample_circle(l as f64 / 7.0, n) {
                prop_assert!(rho_max(&w) > c0);
            }
        }
    }

    #[test]
    fn exponential_moduli(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64) {
        let g = PolyMap::from_components(&[cx(a, b), cx(c, 0.0)], &[cx(d, 1.0), cx(0.0, c)]).unwrap();
        let e = exponentiate(&g, &[0.0, 0.5, 1.0], 16).unwrap();
        prop_assert!(e.pass(1e-12));
        for ring in 0..3 {
            for k in 0..16 {
                let f = e.f(ring, k);
                let u = e.u(ring, k);
                prop_assert!((f.z1.norm().ln() - u[0]).abs() < 1e-12);
                prop_assert!((f.z2.norm().ln() - u[1]).abs() < 1e-12);
                prop_assert!(f.z1.norm() > 0.0 && f.z2.norm() > 0.0);
            }
        }
    }
}
