//! Eigenpairs seeded from scaled spheres of spans of disjoint bumps.
//!
//! For `k = 1, 2, …` the span `F_k` of `k` disjoint bumps is sampled on its
//! unit sphere and scaled by `t_k`, chosen so that every sample has negative
//! energy. Each seed is first relaxed by descent with the nodes outside the
//! active bump slots pinned to zero, which keeps the sign pattern of the
//! seed. A Newton polish on the full mesh then removes the pins, so
//! sign-changing critical points (saddles of `J_λ`) are reachable.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{disjoint_bump_layout, BumpLayout, ScalarField};
use crate::orlicz::variable_exponent_modular;
use crate::spectrum::descent::{minimize, newton_polish, SolverOptions};
use crate::spectrum::energy::{EigenPair, EnergyContext};

/// Sphere samples per span.
const SAMPLES: usize = 8;
/// Pairs closer than this in both energy and norm are the same pair.
const DUPLICATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRecord {
    pub k: usize,
    pub t_k: f64,
    /// `J_λ` at the seed, before any descent.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmittedSeed {
    pub k: usize,
    pub sample: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenusSequence {
    /// Distinct converged pairs with negative energy, by decreasing norm.
    pub pairs: Vec<EigenPair>,
    pub seeds: Vec<SeedRecord>,
    pub omitted: Vec<OmittedSeed>,
    /// First `k` the mesh could not host, if the run stopped early.
    pub truncated_at: Option<usize>,
}

/// Coefficient patterns on the `k` bumps: alternating signs, its negative,
/// all plus, all minus, then `±e_i`; duplicates removed, at most eight.
pub fn sphere_samples(k: usize) -> Vec<Vec<f64>> {
    let alternating: Vec<f64> = (0..k).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let mut candidates = vec![
        alternating.clone(),
        alternating.iter().map(|c| -c).collect(),
        vec![1.0; k],
        vec![-1.0; k],
    ];
    for i in 0..k {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; k];
            e[i] = s;
            candidates.push(e);
        }
    }
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        if !out.contains(&c) {
            out.push(c);
        }
        if out.len() == SAMPLES {
            break;
        }
    }
    out
}

fn combine(layout: &BumpLayout, coeffs: &[f64]) -> ScalarField {
    let mut u = ScalarField::zeros(*layout.bumps[0].grid());
    for (b, c) in layout.bumps.iter().zip(coeffs) {
        if *c != 0.0 {
            u = u.axpy(*c, b);
        }
    }
    u
}

/// Boundary, slot edges, and every node outside the active slots.
fn slot_mask(ctx: &EnergyContext, layout: &BumpLayout, coeffs: &[f64]) -> Vec<bool> {
    let grid = ctx.grid();
    (0..grid.node_count())
        .map(|n| {
            grid.is_boundary(n)
                || !layout
                    .slots
                    .iter()
                    .zip(coeffs)
                    .any(|(s, c)| *c != 0.0 && s.contains_node(grid, n) && !s.on_edge(grid, n))
        })
        .collect()
}

fn same_pair(a: &EigenPair, b: &EigenPair) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= DUPLICATE_TOL * x.abs().max(y.abs());
    close(a.energy, b.energy) && close(a.sobolev_norm, b.sobolev_norm)
}

struct Seed {
    k: usize,
    sample: usize,
    coeffs: Vec<f64>,
    u: ScalarField,
    layout_index: usize,
}

/// Eigenpairs at `λ` from the sets `A_k(t_k)`, `k = 1..=k_max`.
pub fn genus_sequence_solve(
    ctx: &EnergyContext,
    lambda: f64,
    k_max: usize,
    opts: &SolverOptions,
) -> Result<GenusSequence> {
    let p0 = ctx.indices().p0;
    let q_plus = ctx.q().q_plus();
    if !(q_plus < p0) {
        return Err(Error::Precondition(format!(
            "the sequence needs q⁺ < p₀, got q⁺ = {q_plus}, p₀ = {p0}"
        )));
    }
    if k_max < 1 {
        return Err(Error::Precondition("k_max must be at least 1".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let mut layouts = Vec::new();
    let mut seeds = Vec::new();
    let mut records = Vec::new();
    let mut truncated_at = None;
    for k in 1..=k_max {
        let layout = match disjoint_bump_layout(ctx.grid(), k) {
            Ok(l) => l,
            Err(Error::Capacity { .. }) => {
                truncated_at = Some(k);
                break;
            }
            Err(e) => return Err(e),
        };
        let samples = sphere_samples(k);
        let mut units = Vec::with_capacity(samples.len());
        let mut m = f64::INFINITY;
        for coeffs in &samples {
            let theta = combine(&layout, coeffs);
            let unit = theta.scaled(1.0 / ctx.sobolev_norm(&theta)?);
            m = m.min(variable_exponent_modular(&unit, ctx.q())?);
            units.push(unit);
        }
        // Below this scale t^{p₀} < λ m t^{q⁺} / q⁺, so J_λ < 0 on the whole set.
        let t_k = 0.5 * 1f64.min((lambda * m / q_plus).powf(1.0 / (p0 - q_plus)));
        for (sample, (coeffs, unit)) in samples.into_iter().zip(units).enumerate() {
            let u = unit.scaled(t_k);
            records.push(SeedRecord {
                k,
                t_k,
                energy: ctx.energy(&u, lambda)?,
            });
            seeds.push(Seed {
                k,
                sample,
                coeffs,
                u,
                layout_index: layouts.len(),
            });
        }
        layouts.push(layout);
    }

    let results: Vec<Result<std::result::Result<EigenPair, String>>> = seeds
        .par_iter()
        .map(|s| {
            let mask = slot_mask(ctx, &layouts[s.layout_index], &s.coeffs);
            let relaxed = match minimize(ctx, lambda, &s.u, None, &mask, opts) {
                Ok(r) => r,
                Err(Error::NonConvergence { residual, .. }) => {
                    return Ok(Err(format!("slot descent did not converge (residual {residual:e})")))
                }
                Err(e) => return Err(e),
            };
            if relaxed.trivial {
                return Ok(Err("slot descent collapsed to zero".into()));
            }
            let polished = match newton_polish(ctx, lambda, &relaxed.u, opts) {
                Ok(p) => p,
                Err(Error::Numeric(msg)) => return Ok(Err(format!("Newton polish failed: {msg}"))),
                Err(e) => return Err(e),
            };
            if polished.residual > opts.tol {
                return Ok(Err(format!(
                    "Newton polish stalled at residual {:e}",
                    polished.residual
                )));
            }
            if ctx.norm_below(&polished.u, opts.trivial_norm)? {
                return Ok(Err("Newton polish reached the zero field".into()));
            }
            let pair = ctx.eigen_pair(polished.u, lambda)?;
            if !(pair.energy < 0.0) {
                return Ok(Err(format!("critical point has energy {:e} ≥ 0", pair.energy)));
            }
            Ok(Ok(pair))
        })
        .collect();

    let mut pairs: Vec<EigenPair> = Vec::new();
    let mut omitted = Vec::new();
    for (s, r) in seeds.iter().zip(results) {
        match r? {
            Ok(p) => {
                if !pairs.iter().any(|q| same_pair(q, &p)) {
                    pairs.push(p);
                }
            }
            Err(reason) => omitted.push(OmittedSeed {
                k: s.k,
                sample: s.sample,
                reason,
            }),
        }
    }
    pairs.sort_by(|a, b| b.sobolev_norm.total_cmp(&a.sobolev_norm));
    Ok(GenusSequence {
        pairs,
        seeds: records,
        omitted,
        truncated_at,
    })
}
