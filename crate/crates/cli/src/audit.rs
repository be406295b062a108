use orlicz_spectra::orlicz::{
    check_delta2, critical_growth_probe, growth_limit, sobolev_conjugate_audit, Delta2Report, NonlinearitySpec,
    SobolevAudit,
};
use orlicz_spectra::spectrum::EnergyContext;
use serde::Serialize;

/// Multipliers `k` at which the critical-growth probe is evaluated.
pub const GROWTH_PROBE_K: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conditions {
    pub delta2: bool,
    /// The inverse Sobolev conjugate is finite near zero and diverges at
    /// infinity.
    pub sobolev_conjugate: bool,
    /// `|t|^{q⁺}/Φ⋆(kt)` decays; `None` when the probe could not be run.
    pub subcritical_growth: Option<bool>,
    /// `1 < q⁻ < p₀`
    pub q_minus_below_p0: bool,
    /// `q⁺ < p₀`
    pub q_plus_below_p0: bool,
    /// `N < p₀ < liminf log Φ(t) / log t`
    pub growth_above_dimension: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    /// Hypotheses under which every `λ ∈ (0, λ⋆)` is an eigenvalue.
    pub small_lambda_regime: bool,
    /// Hypotheses under which every `λ > 0` is an eigenvalue with a
    /// sequence of eigenfunctions tending to zero.
    pub every_lambda_regime: bool,
    /// The compact embedding follows from growth alone, without the
    /// Sobolev-conjugate conditions.
    pub embedding_by_growth: bool,
    /// Pure power with `q ≡ p`: the classical homogeneous problem.
    pub homogeneous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub nonlinearity: String,
    pub mesh_dimension: usize,
    pub audit_dimension: usize,
    pub p0: f64,
    pub p0_sup: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub growth_limit: f64,
    pub delta2: Delta2Report,
    pub sobolev: SobolevAudit,
    /// Error text when the critical-growth probe could not be evaluated.
    pub subcritical_growth_note: Option<String>,
    pub conditions: Conditions,
    pub verdicts: Verdicts,
}

pub fn audit(ctx: &EnergyContext, audit_dimension: usize) -> orlicz_spectra::Result<AuditReport> {
    let yf = ctx.yf();
    let idx = ctx.indices();
    let (q_minus, q_plus) = (ctx.q().q_minus(), ctx.q().q_plus());
    let delta2 = check_delta2(yf)?;
    let sobolev = sobolev_conjugate_audit(yf, audit_dimension)?;
    let limit = growth_limit(yf)?;
    let (subcritical_growth, note) = match critical_growth_probe(yf, q_plus, &GROWTH_PROBE_K, audit_dimension) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let conditions = Conditions {
        delta2: delta2.pass,
        sobolev_conjugate: sobolev.near_zero_finite && sobolev.at_infinity_divergent,
        subcritical_growth,
        q_minus_below_p0: 1.0 < q_minus && q_minus < idx.p0,
        q_plus_below_p0: q_plus < idx.p0,
        growth_above_dimension: (audit_dimension as f64) < idx.p0 && idx.p0 < limit,
    };
    let embedding = conditions.delta2
        && ((conditions.sobolev_conjugate && conditions.subcritical_growth == Some(true))
            || conditions.growth_above_dimension);
    let homogeneous = match yf.spec() {
        NonlinearitySpec::PurePower { p } => ctx.q().values().iter().all(|q| q == p),
        _ => false,
    };
    let verdicts = Verdicts {
        small_lambda_regime: conditions.q_minus_below_p0 && embedding,
        every_lambda_regime: conditions.q_plus_below_p0 && embedding,
        embedding_by_growth: conditions.delta2 && conditions.growth_above_dimension,
        homogeneous,
    };
    Ok(AuditReport {
        nonlinearity: yf.spec().label(),
        mesh_dimension: ctx.grid().dim(),
        audit_dimension,
        p0: idx.p0,
        p0_sup: idx.p0_sup,
        q_minus,
        q_plus,
        growth_limit: limit,
        delta2,
        sobolev,
        subcritical_growth_note: note,
        conditions,
        verdicts,
    })
}

impl AuditReport {
    /// Names the failed exponent conditions, or `None` when solving is
    /// admissible.
    pub fn solve_refusal(&self) -> Option<String> {
        if self.conditions.q_minus_below_p0 || self.conditions.q_plus_below_p0 {
            return None;
        }
        Some(format!(
            "neither 1 < q⁻ < p₀ (q⁻ = {}, p₀ = {}) nor q⁺ < p₀ (q⁺ = {}) holds{}",
            self.q_minus,
            self.p0,
            self.q_plus,
            if self.verdicts.homogeneous {
                "; this is the homogeneous case"
            } else {
                ""
            }
        ))
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let c = &self.conditions;
        let v = &self.verdicts;
        vec![
            format!("nonlinearity: {}", self.nonlinearity),
            format!(
                "indices: p0 = {:.6}, p0_sup = {:.6}, growth limit = {:.6}",
                self.p0, self.p0_sup, self.growth_limit
            ),
            format!("exponent: q_minus = {:.6}, q_plus = {:.6}", self.q_minus, self.q_plus),
            format!(
                "delta2: {} (tail ratio in [{:.6}, {:.6}])",
                yes(c.delta2),
                self.delta2.liminf_est,
                self.delta2.limsup_est
            ),
            format!(
                "sobolev conjugate (N = {}): near zero {:?}, at infinity {:?} -> {}",
                self.audit_dimension,
                self.sobolev.near_zero_trend,
                self.sobolev.at_infinity_trend,
                yes(c.sobolev_conjugate)
            ),
            format!(
                "subcritical growth: {}",
                match c.subcritical_growth {
                    Some(b) => yes(b).to_string(),
                    None => format!(
                        "not evaluated ({})",
                        self.subcritical_growth_note.as_deref().unwrap_or("")
                    ),
                }
            ),
            format!("1 < q_minus < p0: {}", yes(c.q_minus_below_p0)),
            format!("q_plus < p0: {}", yes(c.q_plus_below_p0)),
            format!("N < p0 < growth limit: {}", yes(c.growth_above_dimension)),
            format!("small-lambda regime: {}", yes(v.small_lambda_regime)),
            format!("every-lambda regime: {}", yes(v.every_lambda_regime)),
            format!("embedding by growth: {}", yes(v.embedding_by_growth)),
            format!("homogeneous: {}", yes(v.homogeneous)),
        ]
    }
}
