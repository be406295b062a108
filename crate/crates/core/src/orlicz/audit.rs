//! Finite probes of the Sobolev-conjugate integrals and of the subcritical
//! growth condition built on them.
//!
//! Both integrals `∫ Φ⁻¹(s) / s^{(N+1)/N} ds` are split into decades. Each
//! decade is integrated in `y = ln s` with a fixed Gauss–Legendre rule; the
//! trend of the last few decade increments decides convergence. A trend that
//! is neither clearly geometric nor clearly non-decaying is reported as
//! inconclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::young::YoungFunction;
use crate::quadrature::GaussLegendre;

const DECADES: usize = 30;
/// Increments inspected when classifying a trend.
const TREND_WINDOW: usize = 4;
/// Successive increment ratios at or below this value count as convergent.
const CONVERGENT_RATIO: f64 = 0.97;
/// Successive increment ratios at or above this value count as divergent.
const DIVERGENT_RATIO: f64 = 0.995;
/// Table density for the inverse of the conjugate.
const POINTS_PER_DECADE: usize = 20;
/// Extent of the inverse-conjugate table in `s`: `[1e-30, 1e30]`.
const TABLE_DECADES: i32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevAudit {
    pub near_zero_finite: bool,
    pub at_infinity_divergent: bool,
    pub near_zero_trend: Trend,
    pub at_infinity_trend: Trend,
    /// Decade integrals over `[10^{-j-1}, 10^{-j}]`, `j = 0, 1, …`.
    pub near_zero_increments: Vec<f64>,
    /// Decade integrals over `[10^j, 10^{j+1}]`, `j = 0, 1, …`.
    pub at_infinity_increments: Vec<f64>,
}

struct ConjugateIntegrand<'a> {
    yf: &'a YoungFunction,
    /// `1/N`
    inv_n: f64,
    rule: GaussLegendre,
    /// Largest `s` at which `Φ⁻¹` is defined.
    s_max: f64,
}

impl<'a> ConjugateIntegrand<'a> {
    fn new(yf: &'a YoungFunction, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        let max = yf.domain_max();
        let s_max = if max.is_finite() { yf.Phi(max)? } else { f64::INFINITY };
        Ok(Self {
            yf,
            inv_n: 1.0 / n as f64,
            rule: GaussLegendre::new(16),
            s_max,
        })
    }

    /// `∫_{e^a}^{e^b} Φ⁻¹(s) s^{-(N+1)/N} ds`, integrated in `y = ln s`.
    fn integral(&self, a: f64, b: f64) -> Result<f64> {
        self.rule
            .try_integrate(a, b, |y| Ok(self.yf.Phi_inverse(y.exp())? * (-y * self.inv_n).exp()))
    }

    /// Integrand in `y`: `Φ⁻¹(e^y) e^{-y/N}`.
    fn density(&self, y: f64) -> Result<f64> {
        Ok(self.yf.Phi_inverse(y.exp())? * (-y * self.inv_n).exp())
    }
}

fn classify(increments: &[f64]) -> Trend {
    if increments.len() < TREND_WINDOW + 1 {
        return Trend::Inconclusive;
    }
    let tail = &increments[increments.len() - TREND_WINDOW - 1..];
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|r| *r <= CONVERGENT_RATIO) {
        Trend::Convergent
    } else if ratios.iter().all(|r| *r >= DIVERGENT_RATIO) {
        Trend::Divergent
    } else {
        Trend::Inconclusive
    }
}

/// Probes `∫_t^1 Φ⁻¹(s)/s^{(N+1)/N} ds` as `t → 0` and the same integral on
/// `[1, t]` as `t → ∞` over thirty decades each.
pub fn sobolev_conjugate_audit(yf: &YoungFunction, n: usize) -> Result<SobolevAudit> {
    let f = ConjugateIntegrand::new(yf, n)?;
    let ln10 = std::f64::consts::LN_10;
    let near_zero_increments = (0..DECADES)
        .map(|j| f.integral(-((j + 1) as f64) * ln10, -(j as f64) * ln10))
        .collect::<Result<Vec<_>>>()?;
    let mut at_infinity_increments = Vec::new();
    for j in 0..DECADES {
        if 10f64.powi(j as i32 + 1) > f.s_max {
            break;
        }
        at_infinity_increments.push(f.integral(j as f64 * ln10, (j + 1) as f64 * ln10)?);
    }
    let near_zero_trend = classify(&near_zero_increments);
    let at_infinity_trend = classify(&at_infinity_increments);
    Ok(SobolevAudit {
        near_zero_finite: near_zero_trend == Trend::Convergent,
        at_infinity_divergent: at_infinity_trend == Trend::Divergent,
        near_zero_trend,
        at_infinity_trend,
        near_zero_increments,
        at_infinity_increments,
    })
}

/// Monotone table of `G(s) = ∫₀ˢ Φ⁻¹(σ)/σ^{(N+1)/N} dσ` on log-spaced `s`,
/// kept as `(ln s, ln G)` pairs.
struct InverseConjugateTable {
    log_s: Vec<f64>,
    log_g: Vec<f64>,
}

impl InverseConjugateTable {
    fn build(f: &ConjugateIntegrand) -> Result<Self> {
        let ln10 = std::f64::consts::LN_10;
        let step = ln10 / POINTS_PER_DECADE as f64;
        let y0 = -(TABLE_DECADES as f64) * ln10;
        let y_top = (TABLE_DECADES as f64 * ln10).min(f.s_max.ln());
        // Below the first knot the integrand behaves like c s^{β-1}; β is
        // read off from the local slope of s·integrand.
        let d0 = f.density(y0)?;
        let d1 = f.density(y0 + step)?;
        let beta = (d1 / d0).ln() / step;
        if !(beta > 0.0 && d0 > 0.0) {
            return Err(Error::Numeric(format!(
                "inverse conjugate cannot be started at s = 1e-{TABLE_DECADES} (local exponent {beta})"
            )));
        }
        let mut acc = d0 / beta;
        let mut log_s = vec![y0];
        let mut log_g = vec![acc.ln()];
        let mut y = y0;
        while y + step <= y_top + 1e-12 {
            acc += f.integral(y, y + step)?;
            y += step;
            log_s.push(y);
            log_g.push(acc.ln());
        }
        if log_s.len() < 2 {
            return Err(Error::Numeric("inverse conjugate table is empty".into()));
        }
        Ok(Self { log_s, log_g })
    }

    fn top(&self) -> f64 {
        self.log_g.last().unwrap().exp()
    }

    /// `Φ⋆(τ) = G⁻¹(τ)` by log-log interpolation; `None` beyond the table.
    fn conjugate(&self, tau: f64) -> Option<f64> {
        let lt = tau.ln();
        let last = self.log_g.len() - 1;
        if lt > self.log_g[last] || lt < self.log_g[0] {
            return None;
        }
        let i = self.log_g.partition_point(|g| *g <= lt).clamp(1, last) - 1;
        let w = (lt - self.log_g[i]) / (self.log_g[i + 1] - self.log_g[i]);
        Some((self.log_s[i] + w * (self.log_s[i + 1] - self.log_s[i])).exp())
    }
}

/// Checks that `τ^{q⁺}/Φ⋆(kτ)` decreases strictly over the three largest
/// probe decades for every `k` in `k_list`.
///
/// When the integral at infinity converges, `Φ⋆` is infinite beyond a finite
/// argument and the ratio vanishes eventually; the probe then returns `true`.
pub fn critical_growth_probe(yf: &YoungFunction, q_plus: f64, k_list: &[f64], n: usize) -> Result<bool> {
    if !(q_plus > 1.0) {
        return Err(Error::Precondition(format!("q⁺ must exceed 1, got {q_plus}")));
    }
    if k_list.is_empty() || k_list.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::Precondition("k_list must hold positive finite values".into()));
    }
    let audit = sobolev_conjugate_audit(yf, n)?;
    if audit.near_zero_trend != Trend::Convergent {
        return Err(Error::Numeric(
            "the inverse Sobolev conjugate is not finite near zero, so it cannot be inverted".into(),
        ));
    }
    if audit.at_infinity_trend == Trend::Convergent {
        return Ok(true);
    }
    let f = ConjugateIntegrand::new(yf, n)?;
    let table = InverseConjugateTable::build(&f)?;
    let k_max = k_list.iter().copied().fold(0.0, f64::max);
    let tau_top = 10f64.powf((table.top() / k_max).log10().floor());
    for &k in k_list {
        let mut prev = f64::INFINITY;
        for d in (0..4).rev() {
            let tau = tau_top * 10f64.powi(-d);
            let conj = table
                .conjugate(k * tau)
                .ok_or_else(|| Error::Numeric(format!("Φ⋆ inversion failed at {}", k * tau)))?;
            let ratio = (q_plus * tau.ln() - conj.ln()).exp();
            if !(ratio < prev) {
                return Ok(false);
            }
            prev = ratio;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::nonlinearity::NonlinearitySpec;

    fn yf(spec: NonlinearitySpec) -> YoungFunction {
        YoungFunction::new(spec).unwrap()
    }

    #[test]
    fn quadratic_in_three_dimensions() {
        let a = sobolev_conjugate_audit(&yf(NonlinearitySpec::PurePower { p: 2.0 }), 3).unwrap();
        assert!(a.near_zero_finite && a.at_infinity_divergent, "{a:?}");
    }

    #[test]
    fn quadratic_on_a_line_diverges_near_zero() {
        let a = sobolev_conjugate_audit(&yf(NonlinearitySpec::PurePower { p: 2.0 }), 1).unwrap();
        assert!(!a.near_zero_finite);
        assert_eq!(a.near_zero_trend, Trend::Divergent);
    }

    #[test]
    fn power_log_in_six_dimensions() {
        let a = sobolev_conjugate_audit(&yf(NonlinearitySpec::PowerLog { p: 2.0, r: 2.0 }), 6).unwrap();
        assert!(a.near_zero_finite && a.at_infinity_divergent, "{a:?}");
    }

    #[test]
    fn decade_increments_match_power_law() {
        // Φ⁻¹(s) = √(2s), N = 3: ∫ √2 s^{-5/6} ds = 6√2 s^{1/6}.
        let a = sobolev_conjugate_audit(&yf(NonlinearitySpec::PurePower { p: 2.0 }), 3).unwrap();
        let exact = 6.0 * 2f64.sqrt() * (1.0 - 10f64.powf(-1.0 / 6.0));
        assert!((a.near_zero_increments[0] - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn subcritical_growth_for_power_log() {
        let y = yf(NonlinearitySpec::PowerLog { p: 2.5, r: 1.5 });
        assert!(critical_growth_probe(&y, 3.0, &[0.5, 1.0, 2.0], 6).unwrap());
    }

    #[test]
    fn supercritical_exponent_fails() {
        let y = yf(NonlinearitySpec::PurePower { p: 2.0 });
        assert!(!critical_growth_probe(&y, 7.0, &[1.0], 3).unwrap());
        assert!(critical_growth_probe(&y, 5.0, &[1.0], 3).unwrap());
    }

    #[test]
    fn near_linear_exponent_passes() {
        let y = yf(NonlinearitySpec::PowerOverLog { p: 4.0 });
        assert!(critical_growth_probe(&y, 1.01, &[1.0, 10.0], 6).unwrap());
    }

    #[test]
    fn conjugate_must_be_constructible() {
        let y = yf(NonlinearitySpec::PurePower { p: 2.0 });
        assert!(matches!(
            critical_growth_probe(&y, 1.5, &[1.0], 1),
            Err(Error::Numeric(_))
        ));
        assert!(matches!(
            critical_growth_probe(&y, 1.0, &[1.0], 3),
            Err(Error::Precondition(_))
        ));
    }
}
