//! Line-search descent on `J_λ`, optionally confined to a Luxemburg ball,
//! and a Newton polish for saddle-type critical points.
//!
//! Directions solve `(H + σP) d = -g` where `H` is the Hessian of `J_λ` and
//! `P` is the positive definite Hessian of the gradient term. `σ = 0` is a
//! Newton step; growing `σ` moves toward a preconditioned gradient step.
//! Every accepted step satisfies the Armijo condition along the projected
//! path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::spectrum::energy::{EigenPair, EnergyContext};

/// Shift schedule for `H + σP`, smallest first.
const SHIFTS: [f64; 10] = [0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4, 1e6, 1e8];
/// Smallest acceptable ratio of LDLᵀ pivots.
const PIVOT_RATIO: f64 = 1e-12;
/// Backtracking steps per direction.
const MAX_BACKTRACKS: usize = 40;
/// Energy changes below this fraction of `∫Φ(|∇u|) + |J|` are rounding noise.
const NOISE: f64 = 1e-14;
const POLISH_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Residual at or below which a critical point is accepted.
    pub tol: f64,
    /// Residual at which iteration stops.
    pub stop_residual: f64,
    pub max_iterations: usize,
    pub armijo: f64,
    pub backtrack: f64,
    /// Luxemburg norm below which an iterate counts as the zero field.
    pub trivial_norm: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            stop_residual: 1e-8,
            max_iterations: 50_000,
            armijo: 1e-4,
            backtrack: 0.5,
            trivial_norm: 1e-7,
        }
    }
}

/// Final state of a descent run.
#[derive(Debug, Clone)]
pub struct DescentRun {
    pub u: ScalarField,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrivialOutcome {
    pub iterations: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Pair(EigenPair),
    Trivial(TrivialOutcome),
}

impl SolveOutcome {
    pub fn pair(&self) -> Option<&EigenPair> {
        match self {
            SolveOutcome::Pair(p) => Some(p),
            SolveOutcome::Trivial(_) => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, SolveOutcome::Trivial(_))
    }
}

struct Iterate {
    u: ScalarField,
    energy: f64,
    grad: ScalarField,
    residual: f64,
}

struct Problem<'a> {
    ctx: &'a EnergyContext,
    lambda: f64,
    radius: Option<f64>,
    mask: &'a [bool],
    opts: &'a SolverOptions,
}

impl Problem<'_> {
    fn evaluate(&self, u: ScalarField) -> Result<Iterate> {
        let (energy, grad) = self.ctx.energy_and_gradient(&u, self.lambda, self.mask)?;
        let residual = self.ctx.residual_of(&grad);
        Ok(Iterate {
            u,
            energy,
            grad,
            residual,
        })
    }

    /// Radial projection onto the ball.
    fn project(&self, u: ScalarField) -> Result<ScalarField> {
        match self.radius {
            Some(r) if !self.ctx.norm_at_most(&u, r)? => {
                let norm = self.ctx.sobolev_norm(&u)?;
                Ok(u.scaled(r / norm))
            }
            _ => Ok(u),
        }
    }

    fn is_trivial(&self, u: &ScalarField) -> Result<bool> {
        Ok(u.is_zero() || self.ctx.norm_below(u, self.opts.trivial_norm)?)
    }

    /// Tries step lengths `1, β, β², …` along `d`; `None` when all fail.
    fn line_search(&self, it: &Iterate, d: &ScalarField) -> Result<Option<(Iterate, f64)>> {
        let scale = self.ctx.gradient_modular(&it.u)? + it.energy.abs();
        let mut t = 1.0;
        for _ in 0..MAX_BACKTRACKS {
            let trial = self.project(it.u.axpy(t, d))?;
            let step = trial.axpy(-1.0, &it.u);
            let slope = it.grad.dot(&step);
            match self.evaluate(trial) {
                Ok(next) => {
                    let armijo = slope < 0.0 && next.energy <= it.energy + self.opts.armijo * slope;
                    let noise = next.energy - it.energy <= NOISE * scale && next.residual < it.residual;
                    if armijo || noise {
                        return Ok(Some((next, t)));
                    }
                }
                Err(Error::ExtrapolationRefused { .. }) => {}
                Err(e) => return Err(e),
            }
            t *= self.opts.backtrack;
        }
        Ok(None)
    }

    fn run(&self, start: &ScalarField) -> Result<DescentRun> {
        let mut u = start.clone();
        for (v, m) in u.values_mut().iter_mut().zip(self.mask) {
            if *m {
                *v = 0.0;
            }
        }
        let mut it = self.evaluate(self.project(u)?)?;
        let mut shift_idx = 0;
        for iteration in 0..self.opts.max_iterations {
            if self.is_trivial(&it.u)? {
                return Ok(self.finish(it, iteration, true));
            }
            if it.residual <= self.opts.stop_residual {
                return Ok(self.finish(it, iteration, false));
            }
            let (h, p) = self.ctx.hessians(&it.u, self.lambda, self.mask)?;
            let neg_g: Vec<f64> = it.grad.values().iter().map(|v| -v).collect();
            let mut accepted = None;
            let mut idx = shift_idx;
            while idx < SHIFTS.len() {
                let m = if SHIFTS[idx] == 0.0 {
                    h.clone()
                } else {
                    h.add_scaled(SHIFTS[idx], &p)
                };
                if let Some(f) = m.ldlt().filter(|f| f.pivot_ratio() >= PIVOT_RATIO) {
                    let d = ScalarField::from_values(*it.u.grid(), f.solve(&neg_g))?;
                    if let Some(found) = self.line_search(&it, &d)? {
                        accepted = Some((found, idx));
                        break;
                    }
                }
                idx += 1;
            }
            let Some(((next, t), used)) = accepted else {
                // No shift yields progress: the iterate sits at the noise floor.
                return Ok(self.finish(it, iteration, false));
            };
            // Full steps relax the shift, damped steps keep it.
            shift_idx = if t == 1.0 { used.saturating_sub(1) } else { used };
            it = next;
        }
        if it.residual <= self.opts.tol {
            return Ok(self.finish(it, self.opts.max_iterations, false));
        }
        Err(Error::NonConvergence {
            iterations: self.opts.max_iterations,
            residual: it.residual,
            reason: "iteration cap reached".into(),
        })
    }

    fn finish(&self, it: Iterate, iterations: usize, trivial: bool) -> DescentRun {
        DescentRun {
            u: it.u,
            energy: it.energy,
            residual: it.residual,
            iterations,
            trivial,
        }
    }
}

/// Descent on `J_λ` with the nodes in `mask` held at zero; confined to the
/// ball of Luxemburg radius `radius` when given.
pub fn minimize(
    ctx: &EnergyContext,
    lambda: f64,
    start: &ScalarField,
    radius: Option<f64>,
    mask: &[bool],
    opts: &SolverOptions,
) -> Result<DescentRun> {
    if mask.len() != ctx.grid().node_count() {
        return Err(Error::Shape {
            expected: ctx.grid().node_count(),
            got: mask.len(),
        });
    }
    Problem {
        ctx,
        lambda,
        radius,
        mask,
        opts,
    }
    .run(start)
}

fn outcome(ctx: &EnergyContext, lambda: f64, run: DescentRun, opts: &SolverOptions) -> Result<SolveOutcome> {
    if run.trivial {
        return Ok(SolveOutcome::Trivial(TrivialOutcome {
            iterations: run.iterations,
            energy: run.energy,
        }));
    }
    if run.residual > opts.tol {
        return Err(Error::NonConvergence {
            iterations: run.iterations,
            residual: run.residual,
            reason: "descent stalled above the residual tolerance".into(),
        });
    }
    Ok(SolveOutcome::Pair(ctx.eigen_pair(run.u, lambda)?))
}

/// Projected descent inside `{‖u‖ ≤ ρ}` from `start`.
///
/// Returns the pair when the final iterate is a nontrivial critical point,
/// the trivial outcome when the iterate collapses to zero, and a
/// non-convergence error otherwise.
pub fn ball_minimize(
    ctx: &EnergyContext,
    lambda: f64,
    rho: f64,
    start: &ScalarField,
    opts: &SolverOptions,
) -> Result<SolveOutcome> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Precondition(format!("ball radius must be positive, got {rho}")));
    }
    if start.is_zero() {
        return Ok(SolveOutcome::Trivial(TrivialOutcome {
            iterations: 0,
            energy: 0.0,
        }));
    }
    if !ctx.norm_at_most(start, rho * (1.0 + 1e-9))? {
        return Err(Error::Precondition(format!(
            "start lies outside the ball of radius {rho}"
        )));
    }
    let run = minimize(ctx, lambda, start, Some(rho), ctx.boundary_mask(), opts)?;
    outcome(ctx, lambda, run, opts)
}

/// Unconstrained descent from `start`.
pub fn free_minimize(
    ctx: &EnergyContext,
    lambda: f64,
    start: &ScalarField,
    opts: &SolverOptions,
) -> Result<SolveOutcome> {
    if start.is_zero() {
        return Ok(SolveOutcome::Trivial(TrivialOutcome {
            iterations: 0,
            energy: 0.0,
        }));
    }
    let run = minimize(ctx, lambda, start, None, ctx.boundary_mask(), opts)?;
    outcome(ctx, lambda, run, opts)
}

/// Newton iteration on `∇J_λ = 0` with backtracking on `‖∇J_λ‖₂`.
///
/// Converges to nearby critical points of any Morse index, which descent
/// cannot reach.
pub fn newton_polish(
    ctx: &EnergyContext,
    lambda: f64,
    start: &ScalarField,
    opts: &SolverOptions,
) -> Result<DescentRun> {
    let mask = ctx.boundary_mask();
    let (mut energy, mut grad) = ctx.energy_and_gradient(start, lambda, mask)?;
    let mut u = start.clone();
    let merit = |g: &ScalarField| g.dot(g).sqrt();
    for iteration in 0..POLISH_ITERATIONS {
        let residual = ctx.residual_of(&grad);
        if residual <= opts.stop_residual || u.is_zero() {
            return Ok(DescentRun {
                u,
                energy,
                residual,
                iterations: iteration,
                trivial: false,
            });
        }
        let (h, _) = ctx.hessians(&u, lambda, mask)?;
        let neg_g: Vec<f64> = grad.values().iter().map(|v| -v).collect();
        let d = ScalarField::from_values(*u.grid(), h.lu()?.solve(&neg_g))?;
        let m0 = merit(&grad);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = u.axpy(t, &d);
            match ctx.energy_and_gradient(&trial, lambda, mask) {
                Ok((e, g)) if merit(&g) < (1.0 - 1e-4 * t) * m0 => {
                    accepted = Some((trial, e, g));
                    break;
                }
                Ok(_) | Err(Error::ExtrapolationRefused { .. }) => {}
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        let Some((next, e, g)) = accepted else {
            return Ok(DescentRun {
                u,
                energy,
                residual,
                iterations: iteration,
                trivial: false,
            });
        };
        u = next;
        energy = e;
        grad = g;
    }
    let residual = ctx.residual_of(&grad);
    Ok(DescentRun {
        u,
        energy,
        residual,
        iterations: POLISH_ITERATIONS,
        trivial: false,
    })
}
