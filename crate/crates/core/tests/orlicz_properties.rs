use orlicz_spectra::field::{build_bump, CellField, Grid, ScalarField};
use orlicz_spectra::orlicz::*;
use proptest::prelude::*;

fn families() -> Vec<YoungFunction> {
    [
        NonlinearitySpec::PurePower { p: 1.5 },
        NonlinearitySpec::PurePower { p: 3.0 },
        NonlinearitySpec::PowerLog { p: 2.5, r: 1.5 },
        NonlinearitySpec::PowerLog { p: 2.0, r: 1.0 },
        NonlinearitySpec::PowerOverLog { p: 4.0 },
        NonlinearitySpec::Tabulated {
            knots: vec![(0.0, 0.0), (1.0, 1.0), (10.0, 30.0), (100.0, 1000.0)],
        },
    ]
    .into_iter()
    .map(|s| YoungFunction::new(s).unwrap())
    .collect()
}

fn rel_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn phi_examples() {
    let p3 = NonlinearitySpec::PurePower { p: 3.0 };
    assert_eq!(eval_phi(&p3, 2.0).unwrap(), 4.0);
    assert_eq!(eval_phi(&p3, -2.0).unwrap(), -4.0);
    let pl = NonlinearitySpec::PowerLog { p: 2.0, r: 1.0 };
    assert!((eval_phi(&pl, 1.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    for yf in families() {
        assert_eq!(eval_phi(yf.spec(), 0.0).unwrap(), 0.0);
    }
}

#[test]
fn tabulated_refuses_extrapolation() {
    let spec = NonlinearitySpec::Tabulated {
        knots: vec![(0.0, 0.0), (1.0, 2.0)],
    };
    assert!(matches!(
        eval_phi(&spec, 1.5),
        Err(orlicz_spectra::Error::ExtrapolationRefused { .. })
    ));
    assert!(matches!(
        eval_phi(&spec, -1.5),
        Err(orlicz_spectra::Error::ExtrapolationRefused { .. })
    ));
}

#[test]
fn capital_phi_examples() {
    let quad = YoungFunction::new(NonlinearitySpec::PurePower { p: 2.0 }).unwrap();
    assert_eq!(eval_Phi(&quad, 3.0).unwrap(), 4.5);
    assert_eq!(eval_Phi(&quad, -3.0).unwrap(), 4.5);
    assert!((eval_Phi_conjugate(&quad, 2.0).unwrap() - 2.0).abs() < 1e-12);
    let pl = YoungFunction::new(NonlinearitySpec::PowerLog { p: 2.0, r: 2.0 }).unwrap();
    let oracle = (2.0 * std::f64::consts::LN_2 - 1.0) / 2.0;
    assert!((eval_Phi(&pl, 1.0).unwrap() - oracle).abs() < 1e-12);
    let cubic = YoungFunction::new(NonlinearitySpec::PurePower { p: 3.0 }).unwrap();
    assert!((eval_Phi_conjugate(&cubic, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-10);
    for yf in families() {
        assert_eq!(eval_Phi(&yf, 0.0).unwrap(), 0.0);
    }
}

#[test]
fn pure_power_indices_are_exact() {
    for p in [1.5, 2.0, 3.0, 4.7] {
        let yf = YoungFunction::new(NonlinearitySpec::PurePower { p }).unwrap();
        let idx = estimate_indices(&yf, 1e-6, 1e6, 2000).unwrap();
        assert!(
            (idx.p0 - p).abs() <= 1e-9 && (idx.p0_sup - p).abs() <= 1e-9,
            "{p}: {idx:?}"
        );
    }
}

#[test]
fn delta2_examples() {
    let quad = check_delta2(&YoungFunction::new(NonlinearitySpec::PurePower { p: 2.0 }).unwrap()).unwrap();
    assert!(quad.pass);
    assert!((quad.liminf_est - 2.0).abs() < 1e-9 && (quad.limsup_est - 2.0).abs() < 1e-9);
    let pl = check_delta2(&YoungFunction::new(NonlinearitySpec::PowerLog { p: 2.0, r: 1.0 }).unwrap()).unwrap();
    assert!(pl.pass && pl.liminf_est >= 2.0 && pl.limsup_est <= 3.0, "{pl:?}");
    let pol = check_delta2(&YoungFunction::new(NonlinearitySpec::PowerOverLog { p: 4.0 }).unwrap()).unwrap();
    assert!(pol.pass);
}

#[test]
fn young_inequality_on_grid_of_pairs() {
    let mut worst: f64 = 0.0;
    for yf in families() {
        for i in 1..=100 {
            let s = 0.5 * i as f64;
            let phi_s = yf.Phi(s).unwrap();
            for j in 1..=100 {
                let t = 0.5 * j as f64;
                let rhs = phi_s + yf.Phi_conjugate(t).unwrap();
                worst = worst.max(rel_gap(s * t, rhs));
            }
        }
    }
    assert!(worst <= 1e-9, "largest relative violation {worst:e}");
}

#[test]
fn luxemburg_constant_field() {
    let g = Grid::new_1d(1.0, 10).unwrap();
    let quad = YoungFunction::new(NonlinearitySpec::PurePower { p: 2.0 }).unwrap();
    let c = 3.0;
    let f = CellField::from_fn(g, |_| c);
    let norm = luxemburg_norm(|k| orlicz_modular(&quad, &f, k)).unwrap();
    assert!((norm - c / 2f64.sqrt()).abs() < 1e-9);
    let zero = CellField::from_fn(g, |_| 0.0);
    assert_eq!(luxemburg_norm(|k| orlicz_modular(&quad, &zero, k)).unwrap(), 0.0);
}

#[test]
fn luxemburg_rejects_increasing_modular() {
    assert!(matches!(
        luxemburg_norm(|k| Ok(k)),
        Err(orlicz_spectra::Error::Contract(_))
    ));
}

#[test]
fn variable_exponent_examples() {
    let g = Grid::new_1d(1.0, 2000).unwrap();
    let q = ExponentField::from_fn(g, |x| 2.0 + x[0]).unwrap();
    let u1 = ScalarField::from_values(g, vec![1.0; g.node_count()]).unwrap();
    assert!((variable_exponent_norm(&u1, &q).unwrap() - 1.0).abs() < 1e-9);
    let u2 = u1.scaled(2.0);
    let m = variable_exponent_modular(&u2, &q).unwrap();
    assert!((m - 4.0 / std::f64::consts::LN_2).abs() < 1e-6);
    let nu = variable_exponent_norm(&u2, &q).unwrap();
    assert!(nu * nu <= m && m <= nu.powi(3));
}

#[test]
fn variable_exponent_rejects_misaligned_grid() {
    let q = ExponentField::constant(Grid::new_1d(1.0, 8).unwrap(), 2.0).unwrap();
    let u = ScalarField::zeros(Grid::new_1d(1.0, 9).unwrap());
    assert!(matches!(
        variable_exponent_modular(&u, &q),
        Err(orlicz_spectra::Error::Shape { .. })
    ));
}

#[test]
fn modular_and_norm_vanish_together() {
    let g = Grid::new_1d(1.0, 128).unwrap();
    let q = ExponentField::from_fn(g, |x| 1.5 + x[0]).unwrap();
    let bump = build_bump(&g, [0.5, 0.0], 0.1, 0.3).unwrap();
    let mut last = (f64::INFINITY, f64::INFINITY);
    for n in [1.0, 10.0, 100.0, 1000.0, 1e4] {
        let diff = bump.scaled(1.0 / n);
        let m = variable_exponent_modular(&diff, &q).unwrap();
        let nu = variable_exponent_norm(&diff, &q).unwrap();
        assert!(m < last.0 && nu < last.1);
        last = (m, nu);
    }
    assert!(last.0 < 1e-5 && last.1 < 1e-3, "{last:?}");
}

fn cells(values: Vec<f64>) -> CellField {
    let g = Grid::new_1d(1.0, values.len()).unwrap();
    CellField::from_values(g, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_equality_on_the_graph(s in 1e-3f64..50.0, f in 0usize..6) {
        let yf = &families()[f];
        let t = yf.phi(s).unwrap();
        let lhs = s * t;
        let rhs = yf.Phi(s).unwrap() + yf.Phi_conjugate(t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-6 * lhs.max(1.0));
    }

    #[test]
    fn young_inequality_random(s in 1e-6f64..50.0, t in 1e-6f64..50.0, f in 0usize..6) {
        let yf = &families()[f];
        let rhs = yf.Phi(s).unwrap() + yf.Phi_conjugate(t).unwrap();
        prop_assert!(rel_gap(s * t, rhs) <= 1e-9);
    }

    #[test]
    fn phi_is_odd_and_capital_phi_even(t in -90.0f64..90.0, f in 0usize..6) {
        let yf = &families()[f];
        prop_assert_eq!(yf.phi(-t).unwrap(), -yf.phi(t).unwrap());
        prop_assert_eq!(yf.Phi(-t).unwrap(), yf.Phi(t).unwrap());
        prop_assert!(yf.Phi(t).unwrap() >= 0.0);
    }

    #[test]
    fn upper_index_scaling(t in 1e-3f64..50.0, tau in 0.01f64..=1.0, f in 0usize..5) {
        let yf = &families()[f];
        let p_sup = GrowthIndices::of(yf).unwrap().p0_sup;
        let lhs = yf.Phi(t).unwrap();
        let rhs = tau.powf(p_sup) * yf.Phi(t / tau).unwrap();
        prop_assert!(rel_gap(rhs, lhs) <= 1e-9, "{} < {}", lhs, rhs);
    }

    #[test]
    fn luxemburg_norm_properties(
        a in prop::collection::vec(-5.0f64..5.0, 16),
        b in prop::collection::vec(-5.0f64..5.0, 16),
        c in -4.0f64..4.0,
        f in 0usize..5,
    ) {
        let yf = &families()[f];
        let norm = |v: &[f64]| {
            let field = cells(v.to_vec());
            luxemburg_norm(|k| orlicz_modular(yf, &field, k)).unwrap()
        };
        let na = norm(&a);
        let nb = norm(&b);
        prop_assume!(na > 0.0 && nb > 0.0);
        let fa = cells(a.clone());
        let m = orlicz_modular(yf, &fa, na).unwrap();
        prop_assert!((m - 1.0).abs() <= 1e-8, "modular at the norm {}", m);
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        prop_assert!((norm(&scaled) - c.abs() * na).abs() <= 1e-8 * na.max(1.0));
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert!(norm(&sum) <= (na + nb) * (1.0 + 1e-9));
    }

    #[test]
    fn variable_exponent_sandwich(
        coeffs in prop::collection::vec(-3.0f64..3.0, 4),
        q_lo in 1.1f64..3.0,
        spread in 0.0f64..2.0,
    ) {
        let g = Grid::new_1d(1.0, 64).unwrap();
        let u = ScalarField::from_fn(g, |x| {
            coeffs.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * x[0]).sin()).sum()
        });
        prop_assume!(!u.is_zero());
        let q = ExponentField::from_fn(g, |x| q_lo + spread * x[0] * x[0]).unwrap();
        let m = variable_exponent_modular(&u, &q).unwrap();
        let nu = variable_exponent_norm(&u, &q).unwrap();
        let (lo, hi) = (q.q_minus(), q.q_plus());
        let slack = 1e-8 * m.max(1e-300);
        if nu > 1.0 {
            prop_assert!(nu.powf(lo) <= m + slack && m <= nu.powf(hi) + slack);
        } else {
            prop_assert!(nu.powf(hi) <= m + slack && m <= nu.powf(lo) + slack);
        }
        let c = 2.5;
        let scaled = variable_exponent_norm(&u.scaled(-c), &q).unwrap();
        prop_assert!((scaled - c * nu).abs() <= 1e-8 * scaled);
    }
}
