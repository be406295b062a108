use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::nonlinearity::NonlinearitySpec;
use crate::orlicz::young::YoungFunction;

/// Bounds of `tφ(t)/Φ(t)`: `p0` is the infimum, `p0_sup` the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndices {
    pub p0: f64,
    pub p0_sup: f64,
    pub grid_used: SampleGrid,
}

/// Log-spaced sample description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
    /// Whether closed-form limits at 0 and ∞ were folded into the extrema.
    pub limits_included: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub pass: bool,
}

/// Stand-in for "finite" when judging the upper ratio bound.
const INFINITY_PROXY: f64 = 1e6;
/// Decades probed by the Δ₂ tail check: `t ∈ [1e2, 1e6]`.
const TAIL: (f64, f64) = (1e2, 1e6);
const TAIL_POINTS: usize = 401;

impl GrowthIndices {
    /// Default sampling: 2000 log-spaced points on `[1e-6, 1e6]`.
    pub fn of(yf: &YoungFunction) -> Result<Self> {
        estimate_indices(yf, 1e-6, 1e6, 2000)
    }
}

/// `tφ(t)/Φ(t)`; exactly `p` for a pure power.
pub fn index_ratio(yf: &YoungFunction, t: f64) -> Result<f64> {
    if let (NonlinearitySpec::PurePower { p }, true) = (yf.spec(), t > 0.0 && t.is_finite()) {
        return Ok(*p);
    }
    let big = yf.Phi(t)?;
    if !(big > 0.0) {
        return Err(Error::Domain(format!("Φ({t}) = {big}; the index ratio is undefined")));
    }
    Ok(t * yf.phi(t)? / big)
}

fn log_grid(t_min: f64, t_max: f64, n: usize) -> impl Iterator<Item = f64> {
    let span = (t_max / t_min).ln();
    (0..n).map(move |i| (t_min * (span * i as f64 / (n - 1) as f64).exp()).min(t_max))
}

/// Extrema of `tφ(t)/Φ(t)` on a log-spaced grid over `[t_min, t_max]`.
///
/// For families whose ratio limits at 0 and ∞ are known, the limits join
/// the extrema: the built-in families attain their indices only
/// asymptotically. Tabulated functions are sampled up to their last knot.
pub fn estimate_indices(yf: &YoungFunction, t_min: f64, t_max: f64, n: usize) -> Result<GrowthIndices> {
    if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
    }
    if n < 100 {
        return Err(Error::Domain(format!("need at least 100 samples, got {n}")));
    }
    let t_max = t_max.min(yf.domain_max());
    if !(t_min < t_max) {
        return Err(Error::Domain(format!(
            "sample range ends at the last knot {t_max}, below t_min = {t_min}"
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in log_grid(t_min, t_max, n) {
        let r = index_ratio(yf, t)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let limits = yf.spec().ratio_limits();
    if let Some((at_zero, at_inf)) = limits {
        lo = lo.min(at_zero).min(at_inf);
        hi = hi.max(at_zero).max(at_inf);
    }
    Ok(GrowthIndices {
        p0: lo,
        p0_sup: hi,
        grid_used: SampleGrid {
            t_min,
            t_max,
            n,
            limits_included: limits.is_some(),
        },
    })
}

/// Tail estimate of `liminf` and `limsup` of `tφ/Φ` at infinity.
///
/// The ratio is sampled over `[1e2, 1e6]`, or over the last four decades
/// below the final knot of a tabulated function.
pub fn check_delta2(yf: &YoungFunction) -> Result<Delta2Report> {
    let max = yf.domain_max();
    let (a, b) = if max.is_finite() { (max * 1e-4, max) } else { TAIL };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in log_grid(a, b, TAIL_POINTS) {
        let r = index_ratio(yf, t)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(Delta2Report {
        liminf_est: lo,
        limsup_est: hi,
        pass: lo > 1.0 && hi < INFINITY_PROXY,
    })
}

/// `liminf_{t→∞} log Φ(t) / log t`: the closed-form limit when known, else
/// the value at the largest admissible argument.
pub fn growth_limit(yf: &YoungFunction) -> Result<f64> {
    if let Some((_, at_inf)) = yf.spec().ratio_limits() {
        return Ok(at_inf);
    }
    let t = yf.domain_max().min(1e12);
    if !(t > 1.0) {
        return Err(Error::Domain(format!(
            "growth at infinity cannot be probed below t = {t}"
        )));
    }
    Ok(yf.Phi(t)?.ln() / t.ln())
}
