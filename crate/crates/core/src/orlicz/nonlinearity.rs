use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude `PowerOverLog` switches to its series branch,
/// where `log(1+t)` and `t` are indistinguishable in double precision.
const SMALL_T: f64 = 1e-8;

/// Parametric family for the odd homeomorphism `φ(t) = a(|t|) t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NonlinearitySpec {
    /// `φ(t) = |t|^{p-2} t`
    PurePower { p: f64 },
    /// `φ(t) = log(1 + |t|^r) |t|^{p-2} t`
    PowerLog { p: f64, r: f64 },
    /// `φ(t) = |t|^{p-2} t / log(1 + |t|)`
    PowerOverLog { p: f64 },
    /// Piecewise-linear `φ` through `(t, φ(t))` knots with `t ≥ 0`, extended oddly.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl NonlinearitySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match *self {
            Self::PurePower { p } if !(p > 1.0 && p.is_finite()) => bad(format!("pure power needs p > 1, got {p}")),
            Self::PowerLog { p, r } if !(p > 1.0 && p.is_finite()) => {
                bad(format!("power-log needs p > 1, got p = {p}, r = {r}"))
            }
            Self::PowerLog { r, .. } if !(r > 0.0 && r.is_finite()) => bad(format!("power-log needs r > 0, got {r}")),
            Self::PowerOverLog { p } if !(p > 2.0 && p.is_finite()) => {
                bad(format!("power-over-log needs p > 2, got {p}"))
            }
            Self::Tabulated { ref knots } => validate_knots(knots),
            _ => Ok(()),
        }
    }

    /// `φ(t)` for `t ≥ 0`.
    pub(crate) fn phi_pos(&self, t: f64) -> Result<f64> {
        debug_assert!(t >= 0.0);
        Ok(match *self {
            Self::PurePower { p } => t.powf(p - 1.0),
            Self::PowerLog { p, r } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(r).ln_1p() * t.powf(p - 1.0)
                }
            }
            Self::PowerOverLog { p } => {
                if t == 0.0 {
                    0.0
                } else if t < SMALL_T {
                    // t / log(1+t) = 1 + t/2 + O(t^2)
                    t.powf(p - 2.0) * (1.0 + 0.5 * t)
                } else {
                    t.powf(p - 1.0) / t.ln_1p()
                }
            }
            Self::Tabulated { ref knots } => tabulated_eval(knots, t)?.0,
        })
    }

    /// `φ'(t)` for `t > 0`; used for Hessians only.
    pub(crate) fn dphi_pos(&self, t: f64) -> Result<f64> {
        debug_assert!(t > 0.0);
        Ok(match *self {
            Self::PurePower { p } => (p - 1.0) * t.powf(p - 2.0),
            Self::PowerLog { p, r } => {
                let tr = t.powf(r);
                r * tr / (1.0 + tr) * t.powf(p - 2.0) + (p - 1.0) * tr.ln_1p() * t.powf(p - 2.0)
            }
            Self::PowerOverLog { p } => {
                if t < SMALL_T {
                    (p - 2.0) * t.powf(p - 3.0) + 0.5 * (p - 1.0) * t.powf(p - 2.0)
                } else {
                    let l = t.ln_1p();
                    (p - 1.0) * t.powf(p - 2.0) / l - t.powf(p - 1.0) / ((1.0 + t) * l * l)
                }
            }
            Self::Tabulated { ref knots } => tabulated_eval(knots, t)?.1,
        })
    }

    /// Largest admissible argument; `f64::INFINITY` for the closed families.
    pub fn domain_max(&self) -> f64 {
        match self {
            Self::Tabulated { knots } => knots.last().map_or(0.0, |k| k.0),
            _ => f64::INFINITY,
        }
    }

    /// Limits of `tφ(t)/Φ(t)` as `t → 0` and `t → ∞`, when known in closed form.
    pub fn ratio_limits(&self) -> Option<(f64, f64)> {
        match *self {
            Self::PurePower { p } => Some((p, p)),
            Self::PowerLog { p, r } => Some((p + r, p)),
            Self::PowerOverLog { p } => Some((p - 1.0, p)),
            Self::Tabulated { .. } => None,
        }
    }

    pub fn has_closed_form_antiderivative(&self) -> bool {
        matches!(self, Self::PurePower { .. } | Self::Tabulated { .. })
    }

    pub fn label(&self) -> String {
        match *self {
            Self::PurePower { p } => format!("pure_power(p={p})"),
            Self::PowerLog { p, r } => format!("power_log(p={p}, r={r})"),
            Self::PowerOverLog { p } => format!("power_over_log(p={p})"),
            Self::Tabulated { ref knots } => format!("tabulated({} knots)", knots.len()),
        }
    }
}

/// Evaluates `φ(t)` for any real `t`. The result is odd in `t`.
pub fn eval_phi(spec: &NonlinearitySpec, t: f64) -> Result<f64> {
    let v = spec.phi_pos(t.abs())?;
    Ok(if t < 0.0 { -v } else { v })
}

fn validate_knots(knots: &[(f64, f64)]) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidSpec(
            "tabulated nonlinearity needs at least two knots".into(),
        ));
    }
    if knots[0] != (0.0, 0.0) {
        return Err(Error::InvalidSpec(format!(
            "tabulated nonlinearity must start at (0, 0), got {:?}",
            knots[0]
        )));
    }
    for w in knots.windows(2) {
        let ((t0, v0), (t1, v1)) = (w[0], w[1]);
        if !(t1 > t0) || !t1.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "knot abscissae must increase strictly ({t0} then {t1})"
            )));
        }
        if !(v1 > v0) || !v1.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "tabulated φ must increase strictly ({v0} then {v1})"
            )));
        }
    }
    Ok(())
}

/// Value and slope of the piecewise-linear interpolant at `t ≥ 0`.
fn tabulated_eval(knots: &[(f64, f64)], t: f64) -> Result<(f64, f64)> {
    let max = knots.last().map_or(0.0, |k| k.0);
    if !(t <= max) {
        return Err(Error::ExtrapolationRefused { t, max });
    }
    let idx = segment_index(knots, t);
    let (t0, v0) = knots[idx];
    let (t1, v1) = knots[idx + 1];
    let slope = (v1 - v0) / (t1 - t0);
    Ok((v0 + slope * (t - t0), slope))
}

/// Index of the knot segment containing `t`; the last segment is closed on the right.
pub(crate) fn segment_index(knots: &[(f64, f64)], t: f64) -> usize {
    let pos = knots.partition_point(|k| k.0 <= t);
    pos.clamp(1, knots.len() - 1) - 1
}
