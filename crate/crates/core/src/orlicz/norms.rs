use crate::error::{Error, Result};
use crate::field::{CellField, ScalarField};
use crate::orlicz::exponent::ExponentField;
use crate::orlicz::young::YoungFunction;

/// Relative bracket width at which bisection stops.
const REL_WIDTH: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 2100;

/// `inf{k > 0 : m(k) ≤ 1}` for a modular `k ↦ m(k)` that is non-increasing
/// in `k` and tends to 0 at infinity.
///
/// The bracket is grown from `k = 1` by doubling or halving, then bisected.
/// A modular that vanishes at `k = 1` belongs to the zero field and yields 0.
pub fn luxemburg_norm(mut modular_eval: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut m = |k: f64| -> Result<f64> {
        let v = modular_eval(k)?;
        if v.is_nan() || v < 0.0 {
            return Err(Error::Contract(format!("modular at k = {k} is {v}")));
        }
        Ok(v)
    };
    let m1 = m(1.0)?;
    if m1 == 0.0 {
        return Ok(0.0);
    }
    let non_increasing = |k_small: f64, v_small: f64, k_big: f64, v_big: f64| -> Result<()> {
        if v_big > v_small {
            return Err(Error::Contract(format!(
                "modular increases from {v_small:e} at k = {k_small:e} to {v_big:e} at k = {k_big:e}"
            )));
        }
        Ok(())
    };
    let (mut lo, mut hi) = if m1 > 1.0 {
        let (mut k, mut v) = (1.0, m1);
        let mut steps = 0;
        loop {
            let (k2, v2) = (2.0 * k, m(2.0 * k)?);
            non_increasing(k, v, k2, v2)?;
            if v2 <= 1.0 {
                break (k, k2);
            }
            (k, v) = (k2, v2);
            steps += 1;
            if steps > MAX_DOUBLINGS {
                return Err(Error::Numeric("modular stays above 1 for every probed k".into()));
            }
        }
    } else {
        let (mut k, mut v) = (1.0, m1);
        let mut steps = 0;
        loop {
            let (k2, v2) = (0.5 * k, m(0.5 * k)?);
            non_increasing(k2, v2, k, v)?;
            if v2 > 1.0 {
                break (k2, k);
            }
            (k, v) = (k2, v2);
            steps += 1;
            if steps > MAX_DOUBLINGS || k2 == 0.0 {
                return Err(Error::Numeric("modular stays below 1 for every probed k".into()));
            }
        }
    };
    while hi - lo > REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if m(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `∫ Φ(f/k)` by the midpoint rule. Arguments beyond a tabulated range
/// count as an infinite modular.
pub fn orlicz_modular(yf: &YoungFunction, f: &CellField, k: f64) -> Result<f64> {
    let mut sum = 0.0;
    for v in f.values() {
        match yf.Phi(v / k) {
            Ok(x) => sum += x,
            Err(Error::ExtrapolationRefused { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(sum * f.grid().cell_volume())
}

/// `∫ |u|^{q(x)}` with cell-averaged `u` and `q`.
pub fn variable_exponent_modular(u: &ScalarField, q: &ExponentField) -> Result<f64> {
    scaled_modular(u, q, 1.0)
}

fn scaled_modular(u: &ScalarField, q: &ExponentField, mu: f64) -> Result<f64> {
    q.check_grid(u.grid())?;
    let avg = u.cell_averages();
    let sum: f64 = avg
        .values()
        .iter()
        .zip(q.cell_values())
        .map(|(v, qc)| (v.abs() / mu).powf(*qc))
        .sum();
    Ok(sum * u.grid().cell_volume())
}

/// `|u|_{q(x)} = inf{μ > 0 : ∫ |u/μ|^{q(x)} ≤ 1}`.
pub fn variable_exponent_norm(u: &ScalarField, q: &ExponentField) -> Result<f64> {
    q.check_grid(u.grid())?;
    luxemburg_norm(|mu| scaled_modular(u, q, mu))
}
