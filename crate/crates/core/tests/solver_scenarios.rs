use orlicz_spectra::field::{build_bump, Grid, ScalarField};
use orlicz_spectra::orlicz::{ExponentField, NonlinearitySpec, YoungFunction};
use orlicz_spectra::spectrum::*;
use orlicz_spectra::Error;

fn context(spec: NonlinearitySpec, cells: usize, q: impl Fn([f64; 2]) -> f64) -> EnergyContext {
    let grid = Grid::new_1d(1.0, cells).unwrap();
    let yf = YoungFunction::new(spec).unwrap();
    EnergyContext::new(yf, ExponentField::from_fn(grid, q).unwrap()).unwrap()
}

fn centered_start(ctx: &EnergyContext, norm: f64) -> ScalarField {
    let bump = build_bump(ctx.grid(), [0.5, 0.0], 0.2, 0.4).unwrap();
    bump.scaled(norm / ctx.sobolev_norm(&bump).unwrap())
}

fn assert_eigen_identity(pair: &EigenPair, tol: f64) {
    assert!(pair.residual <= tol, "residual {:e}", pair.residual);
    assert!((pair.lambda_recovered / pair.lambda - 1.0).abs() <= 1e-3, "{pair:?}");
}

/// `λ₁ = (4/h²) tan²(πh/2)`: exact principal eigenvalue of the discrete
/// quadratic problem with midpoint-averaged mass.
fn discrete_principal_eigenvalue(h: f64) -> f64 {
    4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).tan().powi(2)
}

#[test]
fn ball_minimization_below_the_threshold() {
    let ctx = context(NonlinearitySpec::PowerLog { p: 2.5, r: 1.5 }, 256, |x| 1.5 + 0.4 * x[0]);
    let c1 = estimate_embedding_constant(&ctx, 32).unwrap();
    let rho = default_rho(c1);
    let star = lambda_star(rho, c1, ctx.q().q_minus(), ctx.indices().p0_sup).unwrap();
    assert!(star > 0.0);
    let lambda = 0.5 * star;
    let opts = SolverOptions::default();
    let out = ball_minimize(&ctx, lambda, rho, &centered_start(&ctx, 0.5 * rho), &opts).unwrap();
    let pair = out.pair().expect("nontrivial pair");
    assert!(pair.energy < 0.0);
    assert!(pair.sobolev_norm < rho);
    assert_eigen_identity(pair, 1e-6);
    let recomputed = ctx.residual(&pair.u, lambda).unwrap();
    assert_eq!(recomputed, pair.residual);
}

#[test]
fn ball_minimization_edge_cases() {
    let ctx = context(NonlinearitySpec::PowerLog { p: 2.5, r: 1.5 }, 64, |x| 1.5 + 0.4 * x[0]);
    let opts = SolverOptions::default();
    let zero = ScalarField::zeros(*ctx.grid());
    assert!(ball_minimize(&ctx, 0.1, 0.5, &zero, &opts).unwrap().is_trivial());
    let outside = centered_start(&ctx, 0.8);
    assert!(matches!(
        ball_minimize(&ctx, 0.1, 0.5, &outside, &opts),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn homogeneous_control() {
    let ctx = context(NonlinearitySpec::PurePower { p: 2.0 }, 256, |_| 2.0);
    let lambda_1 = discrete_principal_eigenvalue(ctx.grid().h());
    assert!((lambda_1 / (std::f64::consts::PI.powi(2)) - 1.0).abs() < 1e-4);
    let opts = SolverOptions::default();
    let start = centered_start(&ctx, 0.45);
    for lambda in [5.0, 8.0, 0.9 * std::f64::consts::PI.powi(2)] {
        assert!(
            ball_minimize(&ctx, lambda, 0.9, &start, &opts).unwrap().is_trivial(),
            "λ = {lambda}"
        );
    }
    let out = ball_minimize(&ctx, lambda_1, 0.9, &start, &opts).unwrap();
    let pair = out.pair().expect("principal eigenfunction");
    assert_eigen_identity(pair, 1e-6);
    // The eigenfunction has one sign.
    let v = pair.u.values();
    assert!(v.iter().all(|x| *x >= 0.0) || v.iter().all(|x| *x <= 0.0));
}

#[test]
fn free_descent_for_every_lambda() {
    let ctx = context(NonlinearitySpec::PowerOverLog { p: 4.0 }, 256, |_| 2.0);
    let opts = SolverOptions::default();
    let start = centered_start(&ctx, 0.5);
    let mut norms = Vec::new();
    for lambda in [0.5, 1.0, 5.0, 10.0] {
        let out = free_minimize(&ctx, lambda, &start, &opts).unwrap();
        let pair = out.pair().expect("nontrivial pair");
        assert!(pair.energy < 0.0);
        assert_eigen_identity(pair, 1e-6);
        norms.push(pair.sobolev_norm);
    }
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
}

#[test]
fn genus_sequence_vanishes() {
    let ctx = context(NonlinearitySpec::PowerOverLog { p: 4.0 }, 256, |_| 2.0);
    let seq = genus_sequence_solve(&ctx, 1.0, 3, &SolverOptions::default()).unwrap();
    assert!(seq.pairs.len() >= 2, "{:?}", seq.omitted);
    assert!(seq.pairs.windows(2).all(|w| w[1].sobolev_norm < w[0].sobolev_norm));
    for pair in &seq.pairs {
        assert!(pair.energy < 0.0);
        assert_eigen_identity(pair, 1e-6);
    }
    assert!(seq.seeds.iter().all(|s| s.energy < 0.0));
    assert!((1..=3).all(|k| seq.seeds.iter().any(|s| s.k == k)));
    assert_eq!(seq.truncated_at, None);
}

#[test]
fn genus_sequence_for_other_lambdas() {
    let ctx = context(NonlinearitySpec::PowerOverLog { p: 4.0 }, 128, |_| 2.0);
    for lambda in [0.5, 5.0, 10.0] {
        let seq = genus_sequence_solve(&ctx, lambda, 2, &SolverOptions::default()).unwrap();
        assert!(!seq.pairs.is_empty(), "λ = {lambda}: {:?}", seq.omitted);
    }
}

#[test]
fn genus_sequence_preconditions() {
    let quad = context(NonlinearitySpec::PurePower { p: 2.0 }, 64, |_| 2.0);
    assert!(matches!(
        genus_sequence_solve(&quad, 1.0, 2, &SolverOptions::default()),
        Err(Error::Precondition(_))
    ));
    let ctx = context(NonlinearitySpec::PowerOverLog { p: 4.0 }, 64, |_| 2.0);
    assert!(matches!(
        genus_sequence_solve(&ctx, 1.0, 0, &SolverOptions::default()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn genus_sequence_truncates_on_coarse_meshes() {
    let ctx = context(NonlinearitySpec::PowerOverLog { p: 4.0 }, 12, |_| 2.0);
    let seq = genus_sequence_solve(&ctx, 1.0, 10, &SolverOptions::default()).unwrap();
    let cut = seq.truncated_at.expect("capacity reached");
    assert!(cut <= 10 && seq.seeds.iter().all(|s| s.k < cut));
}
