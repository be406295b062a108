use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{build_bump, Grid, ScalarField};
use crate::orlicz::variable_exponent_norm;
use crate::spectrum::energy::EnergyContext;

/// Multiplier applied to the largest observed norm ratio.
pub const EMBEDDING_SAFETY: f64 = 1.25;
/// Seed of the random probes used when none is given.
pub const DEFAULT_PROBE_SEED: u64 = 0x0c1e_57a7;
/// Modes in the random smooth probes.
const RANDOM_MODES: usize = 6;
const DESCENT_SCALES: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryReport {
    pub rho: f64,
    pub c1: f64,
    /// Smallest `J_λ` over probe fields rescaled to norm `ρ`.
    pub sphere_inf_estimate: f64,
    pub descent_direction_found: bool,
    /// `None` when `q⁻ ≥ p⁰` leaves the threshold undefined.
    pub lambda_star: Option<f64>,
    pub alpha: f64,
}

/// Deterministic probe fields: low sine modes, bumps, tents and random
/// smooth mode sums. Random coefficients do not depend on the mesh.
pub fn probe_fields(grid: &Grid, n_samples: usize) -> Vec<ScalarField> {
    probe_fields_seeded(grid, n_samples, DEFAULT_PROBE_SEED)
}

/// [`probe_fields`] with the random mode sums drawn from `seed`.
pub fn probe_fields_seeded(grid: &Grid, n_samples: usize, seed: u64) -> Vec<ScalarField> {
    let pi = std::f64::consts::PI;
    let l: Vec<f64> = grid.extents().to_vec();
    let two_d = grid.dim() == 2;
    let lx = l[0];
    let ly = if two_d { l[1] } else { 1.0 };
    let mode = move |x: [f64; 2], k: usize, m: usize| {
        let sx = (k as f64 * pi * x[0] / lx).sin();
        if two_d {
            sx * (m as f64 * pi * x[1] / ly).sin()
        } else {
            sx
        }
    };
    let mut out = Vec::with_capacity(n_samples);
    for k in 1..=3 {
        for m in 1..=(if two_d { 2 } else { 1 }) {
            out.push(ScalarField::from_fn(*grid, move |x| mode(x, k, m)));
        }
    }
    let center = [0.5 * lx, 0.5 * ly];
    let short = if two_d { lx.min(ly) } else { lx };
    for frac in [0.45, 0.3, 0.15] {
        let r = frac * short;
        if 2.0 * r >= 3.0 * grid.h() {
            if let Ok(b) = build_bump(grid, center, 0.5 * r, r) {
                out.push(b);
            }
        }
    }
    for peak in [0.5, 0.3, 0.7] {
        out.push(ScalarField::from_fn(*grid, move |x| {
            let tent = |s: f64| if s <= peak { s / peak } else { (1.0 - s) / (1.0 - peak) };
            let tx = tent(x[0] / lx);
            if two_d {
                tx * tent(x[1] / ly)
            } else {
                tx
            }
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n_samples {
        let modes = if two_d { RANDOM_MODES / 2 } else { RANDOM_MODES };
        let coeffs: Vec<Vec<f64>> = (0..modes)
            .map(|_| {
                (0..(if two_d { modes } else { 1 }))
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        out.push(ScalarField::from_fn(*grid, |x| {
            let mut s = 0.0;
            for (k, row) in coeffs.iter().enumerate() {
                for (m, a) in row.iter().enumerate() {
                    s += a * mode(x, k + 1, m + 1) / (k + m + 1) as f64;
                }
            }
            s
        }));
    }
    out.truncate(n_samples);
    out
}

/// Estimate of the embedding constant `c₁` in `|u|_{q(x)} ≤ c₁‖u‖`: the
/// largest norm ratio over the probe fields, times [`EMBEDDING_SAFETY`].
pub fn estimate_embedding_constant(ctx: &EnergyContext, n_samples: usize) -> Result<f64> {
    estimate_embedding_constant_seeded(ctx, n_samples, DEFAULT_PROBE_SEED)
}

/// [`estimate_embedding_constant`] over [`probe_fields_seeded`].
pub fn estimate_embedding_constant_seeded(ctx: &EnergyContext, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples < 32 {
        return Err(Error::Precondition(format!(
            "need at least 32 probe fields, got {n_samples}"
        )));
    }
    let mut best: f64 = 0.0;
    for u in probe_fields_seeded(ctx.grid(), n_samples, seed) {
        let sob = ctx.sobolev_norm(&u)?;
        if !(sob > 0.0) {
            continue;
        }
        best = best.max(variable_exponent_norm(&u, ctx.q())? / sob);
    }
    if !(best > 0.0) {
        return Err(Error::Numeric("every probe field is degenerate".into()));
    }
    Ok(best * EMBEDDING_SAFETY)
}

/// `λ⋆ = ρ^{p⁰-q⁻}/2 · q⁻/c₁^{q⁻}`.
///
/// Requires `0 < ρ ≤ min(1, 1/c₁)` so that `|u|_{q(x)} ≤ 1` on the sphere,
/// and `q⁻ < p⁰`.
pub fn lambda_star(rho: f64, c1: f64, q_minus: f64, p0_sup: f64) -> Result<f64> {
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::Domain(format!("c₁ must be positive, got {c1}")));
    }
    if !(rho > 0.0 && rho <= 1f64.min(1.0 / c1)) {
        return Err(Error::Domain(format!(
            "ρ = {rho} must lie in (0, min(1, 1/c₁)] with c₁ = {c1}"
        )));
    }
    if !(q_minus > 1.0 && q_minus < p0_sup) {
        return Err(Error::Domain(format!(
            "need 1 < q⁻ < p⁰, got q⁻ = {q_minus}, p⁰ = {p0_sup}"
        )));
    }
    Ok(rho.powf(p0_sup - q_minus) / 2.0 * q_minus / c1.powf(q_minus))
}

/// The largest admissible radius, shrunk by 10%.
pub fn default_rho(c1: f64) -> f64 {
    0.9 * 1f64.min(1.0 / c1)
}

/// Bump supported where `q` stays below `q⁻ + ε₀`, `ε₀ = (p₀ - q⁻)/2`.
///
/// The center is the node with the largest inscribed ball inside both the
/// box and the sublevel set; ties go to the smaller exponent, then the lower
/// index. When `ε₀ ≤ 0` the sublevel constraint is dropped.
pub fn sublevel_bump(ctx: &EnergyContext) -> Result<ScalarField> {
    let grid = ctx.grid();
    let q = ctx.q();
    let eps0 = 0.5 * (ctx.indices().p0 - q.q_minus());
    let level = q.q_minus() + eps0;
    let outside: Vec<[f64; 2]> = if eps0 > 0.0 {
        (0..grid.node_count())
            .filter(|&n| q.values()[n] >= level)
            .map(|n| grid.node_coords(n))
            .collect()
    } else {
        Vec::new()
    };
    let dist = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let mut best: Option<(f64, f64, usize)> = None;
    for n in 0..grid.node_count() {
        if grid.is_boundary(n) || (eps0 > 0.0 && q.values()[n] >= level) {
            continue;
        }
        let x = grid.node_coords(n);
        let mut r = (0..grid.dim())
            .map(|a| x[a].min(grid.extents()[a] - x[a]))
            .fold(f64::INFINITY, f64::min);
        for o in &outside {
            r = r.min(dist(x, *o));
        }
        let better = match best {
            None => true,
            Some((br, bq, _)) => r > br || (r == br && q.values()[n] < bq),
        };
        if better {
            best = Some((r, q.values()[n], n));
        }
    }
    let Some((r, _, n)) = best else {
        return Err(Error::Geometry(
            "no interior node satisfies the sublevel condition".into(),
        ));
    };
    let outer = 0.999 * r;
    if outer < 1.5 * grid.h() {
        return Err(Error::Geometry(format!(
            "sublevel set too thin for a bump (inscribed radius {r})"
        )));
    }
    build_bump(grid, grid.node_coords(n), 0.5 * outer, outer)
}

/// Sphere bound and negative-direction diagnostics at radius `ρ`.
pub fn check_mountain_geometry(ctx: &EnergyContext, lambda: f64, rho: f64) -> Result<GeometryReport> {
    let c1 = estimate_embedding_constant(ctx, 32)?;
    if !(rho > 0.0 && rho <= 1f64.min(1.0 / c1)) {
        return Err(Error::Precondition(format!(
            "ρ = {rho} must lie in (0, min(1, 1/c₁)] with c₁ = {c1}"
        )));
    }
    let p0_sup = ctx.indices().p0_sup;
    let lambda_star = lambda_star(rho, c1, ctx.q().q_minus(), p0_sup).ok();
    let mut sphere_inf = f64::INFINITY;
    for u in probe_fields(ctx.grid(), 32) {
        let norm = ctx.sobolev_norm(&u)?;
        if norm > 0.0 {
            sphere_inf = sphere_inf.min(ctx.energy(&u.scaled(rho / norm), lambda)?);
        }
    }
    let bump = sublevel_bump(ctx)?;
    let mut descent = false;
    for t in DESCENT_SCALES {
        if ctx.energy(&bump.scaled(t), lambda)? < 0.0 {
            descent = true;
            break;
        }
    }
    Ok(GeometryReport {
        rho,
        c1,
        sphere_inf_estimate: sphere_inf,
        descent_direction_found: descent,
        lambda_star,
        alpha: rho.powf(p0_sup) / 2.0,
    })
}
