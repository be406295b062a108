use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::spectrum::energy::EnergyContext;

/// Absolute slack for the coercivity bound, relative to the terms compared.
const BOUND_SLACK: f64 = 1e-8;

/// `∫ Φ(|∇u|) / ∫ |u|^{q(x)}`.
pub fn rayleigh_quotient(ctx: &EnergyContext, u: &ScalarField) -> Result<f64> {
    let den = crate::orlicz::variable_exponent_modular(u, ctx.q())?;
    if den == 0.0 {
        return Err(Error::Domain("the quotient is undefined for the zero field".into()));
    }
    Ok(ctx.gradient_modular(u)? / den)
}

/// Quotient of `t · bump` for every `t` in `t_list`.
pub fn quotient_scaling_sweep(ctx: &EnergyContext, bump: &ScalarField, t_list: &[f64]) -> Result<Vec<f64>> {
    t_list
        .iter()
        .map(|t| rayleigh_quotient(ctx, &bump.scaled(*t)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayReport {
    /// `‖v‖` of the direction.
    pub direction_norm: f64,
    pub energies: Vec<f64>,
    /// Smallest `J_λ(rv) - lower bound` along the ray.
    pub min_margin: f64,
    pub bound_holds: bool,
    pub eventually_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    pub lambda: f64,
    /// `max ∫ |v̂|^{q⁺}` over unit directions.
    pub d1: f64,
    /// `max ∫ |v̂|^{q⁻}` over unit directions.
    pub d2: f64,
    pub radii: Vec<f64>,
    pub rays: Vec<RayReport>,
    pub bounded_below: bool,
    pub all_eventually_increasing: bool,
}

/// `α(t) = t^{p⁰}` for `t ≤ 1` and `t^{p₀}` for `t > 1`: a lower bound for
/// `∫Φ(|∇u|)` at `‖u‖ = t`.
pub fn alpha(t: f64, p0: f64, p0_sup: f64) -> f64 {
    if t <= 1.0 {
        t.powf(p0_sup)
    } else {
        t.powf(p0)
    }
}

/// `true` when the energies over the last decade of radii increase strictly.
/// Needs at least two radii in that decade.
pub fn eventually_increasing(radii: &[f64], energies: &[f64]) -> bool {
    let Some(&r_max) = radii.iter().max_by(|a, b| a.total_cmp(b)) else {
        return false;
    };
    let mut tail: Vec<(f64, f64)> = radii
        .iter()
        .zip(energies)
        .filter(|(r, _)| **r >= 0.1 * r_max)
        .map(|(r, e)| (*r, *e))
        .collect();
    tail.sort_by(|a, b| a.0.total_cmp(&b.0));
    tail.len() >= 2 && tail.windows(2).all(|w| w[1].1 > w[0].1)
}

fn power_integral(u: &ScalarField, exponent: f64) -> f64 {
    let avg = u.cell_averages();
    avg.values().iter().map(|v| v.abs().powf(exponent)).sum::<f64>() * u.grid().cell_volume()
}

/// Checks `J_λ(rv) ≥ α(r‖v‖) - (d₁λ/q⁻)(r‖v‖)^{q⁺} - (d₂λ/q⁻)(r‖v‖)^{q⁻}` along
/// every ray and that `J_λ` grows over the last decade of radii.
pub fn coercivity_probe(
    ctx: &EnergyContext,
    lambda: f64,
    directions: &[ScalarField],
    radii: &[f64],
) -> Result<CoercivityReport> {
    let (p0, p0_sup) = (ctx.indices().p0, ctx.indices().p0_sup);
    let (q_minus, q_plus) = (ctx.q().q_minus(), ctx.q().q_plus());
    if !(q_plus < p0) {
        return Err(Error::Precondition(format!(
            "coercivity needs q⁺ < p₀, got q⁺ = {q_plus}, p₀ = {p0}"
        )));
    }
    if directions.is_empty() || radii.is_empty() {
        return Err(Error::Precondition("need at least one direction and one radius".into()));
    }
    let mut norms = Vec::with_capacity(directions.len());
    let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
    for v in directions {
        let n = ctx.sobolev_norm(v)?;
        if !(n > 0.0) {
            return Err(Error::Precondition("directions must be nonzero".into()));
        }
        let unit = v.scaled(1.0 / n);
        d1 = d1.max(power_integral(&unit, q_plus));
        d2 = d2.max(power_integral(&unit, q_minus));
        norms.push(n);
    }
    let mut rays = Vec::with_capacity(directions.len());
    for (v, &n) in directions.iter().zip(&norms) {
        let mut energies = Vec::with_capacity(radii.len());
        let mut min_margin = f64::INFINITY;
        let mut holds = true;
        for &r in radii {
            let e = ctx.energy(&v.scaled(r), lambda)?;
            let s = r * n;
            let a = alpha(s, p0, p0_sup);
            let loss = lambda / q_minus * (d1 * s.powf(q_plus) + d2 * s.powf(q_minus));
            let margin = e - (a - loss);
            let slack = BOUND_SLACK * (a + loss + e.abs());
            holds &= margin >= -slack;
            min_margin = min_margin.min(margin);
            energies.push(e);
        }
        let inc = eventually_increasing(radii, &energies);
        rays.push(RayReport {
            direction_norm: n,
            energies,
            min_margin,
            bound_holds: holds,
            eventually_increasing: inc,
        });
    }
    Ok(CoercivityReport {
        lambda,
        d1,
        d2,
        radii: radii.to_vec(),
        bounded_below: rays.iter().all(|r| r.bound_holds),
        all_eventually_increasing: rays.iter().all(|r| r.eventually_increasing),
        rays,
    })
}
