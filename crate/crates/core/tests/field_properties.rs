use orlicz_spectra::field::*;
use proptest::prelude::*;

#[test]
fn hat_and_ramp_gradients() {
    let g = Grid::new_1d(1.0, 2).unwrap();
    let hat = ScalarField::from_values(g, vec![0.0, 1.0, 0.0]).unwrap();
    assert_eq!(gradient_magnitude(&hat).values(), &[2.0, 2.0]);
    assert!(gradient_magnitude(&ScalarField::zeros(g))
        .values()
        .iter()
        .all(|v| *v == 0.0));

    let g = Grid::new_1d(1.0, 8).unwrap();
    let ramp = ScalarField::from_fn(g, |x| 3.0 * x[0]);
    let cells = gradient_magnitude(&ramp);
    for v in &cells.values()[..g.cell_count() - 1] {
        assert!((v - 3.0).abs() < 1e-12);
    }
}

#[test]
fn midpoint_integration() {
    let unit = Grid::new_1d(1.0, 7).unwrap();
    assert!((integrate(&CellField::from_fn(unit, |_| 1.0)) - 1.0).abs() < 1e-15);
    let rect = Grid::new_2d([2.0, 1.0], [6, 5]).unwrap();
    assert!((integrate(&CellField::from_fn(rect, |_| 1.0)) - 2.0).abs() < 1e-15);
    let four = Grid::new_1d(1.0, 4).unwrap();
    assert_eq!(integrate(&CellField::from_fn(four, |x| x[0])), 0.5);
}

#[test]
fn bump_profile_values() {
    let g = Grid::new_1d(1.0, 100).unwrap();
    let b = build_bump(&g, [0.5, 0.0], 0.1, 0.3).unwrap();
    assert_eq!(b.values()[50], 1.0);
    assert_eq!(b.values()[10], 0.0);
    assert!((bump_profile(0.2, 0.1, 0.3) - (1.0f64 - 4.0 / 3.0).exp()).abs() < 1e-15);
    assert!(matches!(
        build_bump(&g, [0.1, 0.0], 0.1, 0.3),
        Err(orlicz_spectra::Error::Geometry(_))
    ));
}

#[test]
fn disjoint_bump_examples() {
    let line = Grid::new_1d(1.0, 64).unwrap();
    let one = build_disjoint_bumps(&line, 1).unwrap();
    let v = one[0].values();
    assert_eq!(v[32], 1.0);
    assert!((0..=64).all(|i| v[i] == v[64 - i]));
    let three = build_disjoint_bumps(&line, 3).unwrap();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let overlap: f64 = three[i]
                .values()
                .iter()
                .zip(three[j].values())
                .map(|(a, b)| a * b)
                .sum();
            assert_eq!(overlap, 0.0);
        }
    }

    let square = Grid::new_2d([1.0, 1.0], [32, 32]).unwrap();
    let four = build_disjoint_bumps(&square, 4).unwrap();
    let measures: Vec<f64> = four.iter().map(support_measure).collect();
    assert!(measures.iter().all(|m| *m > 0.0));
    assert!(measures.iter().sum::<f64>() < square.measure());
}

#[test]
fn capacity_is_reported() {
    let g = Grid::new_1d(1.0, 16).unwrap();
    let max = max_disjoint_bumps(&g);
    assert!(build_disjoint_bumps(&g, max).is_ok());
    match build_disjoint_bumps(&g, max + 1) {
        Err(orlicz_spectra::Error::Capacity { requested, max: m }) => {
            assert_eq!(requested, max + 1);
            assert_eq!(m, max);
        }
        other => panic!("expected a capacity error, got {other:?}"),
    }
}

fn grids() -> Vec<Grid> {
    vec![
        Grid::new_1d(1.0, 96).unwrap(),
        Grid::new_1d(2.5, 40).unwrap(),
        Grid::new_2d([1.0, 1.0], [24, 24]).unwrap(),
        Grid::new_2d([2.0, 1.0], [40, 18]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_is_absolutely_homogeneous(
        seed in prop::collection::vec(-2.0f64..2.0, 6),
        c in -10.0f64..10.0,
        e in -20i32..20,
        gi in 0usize..4,
    ) {
        let g = grids()[gi];
        let u = ScalarField::from_fn(g, |x| seed.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * (x[0] + 0.3 * x[1])).sin()).sum());
        let base = gradient_magnitude(&u);
        // Binary scalings commute with every rounding step.
        let two = 2f64.powi(e) * c.signum();
        for (s, b) in gradient_magnitude(&u.scaled(two)).values().iter().zip(base.values()) {
            prop_assert_eq!(*s, two.abs() * b);
        }
        for (s, b) in gradient_magnitude(&u.scaled(c)).values().iter().zip(base.values()) {
            prop_assert!((s - c.abs() * b).abs() <= 8.0 * f64::EPSILON * c.abs() * b.max(u.max_abs() / g.h()));
        }
    }

    #[test]
    fn bumps_stay_in_unit_range(k in 1usize..6, gi in 0usize..4) {
        let g = grids()[gi];
        prop_assume!(k <= max_disjoint_bumps(&g));
        let bumps = build_disjoint_bumps(&g, k).unwrap();
        prop_assert_eq!(bumps.len(), k);
        for b in &bumps {
            prop_assert!(b.is_dirichlet());
            prop_assert!(b.values().iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(support_measure(b) > 0.0);
        }
        for i in 0..k {
            for j in (i + 1)..k {
                prop_assert!(bumps[i].values().iter().zip(bumps[j].values()).all(|(a, b)| a * b == 0.0));
            }
        }
    }

    #[test]
    fn field_dump_round_trips(seed in prop::collection::vec(-1e3f64..1e3, 3), gi in 0usize..4) {
        let g = grids()[gi];
        let u = ScalarField::from_fn(g, |x| seed[0] * x[0].sin() + seed[1] * x[1].cos() * x[0] + seed[2] / (1.0 + x[0]));
        let mut buf = Vec::new();
        io::write_field(&u, &mut buf).unwrap();
        prop_assert_eq!(io::read_field(g, buf.as_slice()).unwrap(), u);
    }
}
