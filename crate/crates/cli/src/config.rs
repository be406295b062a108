use std::fmt;

use orlicz_spectra::field::Grid;
use orlicz_spectra::orlicz::{ExponentField, NonlinearitySpec, YoungFunction};
use orlicz_spectra::spectrum::{EnergyContext, SolverOptions};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Exponent as a constant or an expression in `x` and `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentSpec {
    Constant(f64),
    Expression(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// Box side lengths, one per axis.
    pub extents: Vec<f64>,
    /// Cells per axis.
    pub cells: Vec<usize>,
    pub nonlinearity: NonlinearitySpec,
    pub q: ExponentSpec,
    /// Space dimension used by the Sobolev-conjugate audit. Defaults to the
    /// mesh dimension.
    #[serde(default)]
    pub audit_dimension: Option<usize>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// Seed of the random embedding probes.
    #[serde(default)]
    pub seed: u64,
    /// Ball radius; defaults to `0.9 · min(1, 1/c₁)`.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub k_max: Option<usize>,
}

fn default_probes() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed JSON or a field of the wrong type.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed but inadmissible configuration.
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, column, message } => write!(f, "config line {line}, column {column}: {message}"),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ProblemConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.extents.len() != self.cells.len() || !(1..=2).contains(&self.cells.len()) {
            return bad(format!(
                "extents and cells must both have one or two entries, got {} and {}",
                self.extents.len(),
                self.cells.len()
            ));
        }
        if self.audit_dimension == Some(0) {
            return bad("audit_dimension must be at least 1".into());
        }
        if self.probes < 32 {
            return bad(format!("probes must be at least 32, got {}", self.probes));
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0 && rho.is_finite()) {
                return bad(format!("rho must be positive, got {rho}"));
            }
        }
        self.nonlinearity
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(&self.extents, &self.cells).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn audit_dimension(&self) -> usize {
        self.audit_dimension.unwrap_or(self.cells.len())
    }

    /// `q` at the nodes of `grid`.
    pub fn exponent(&self, grid: Grid) -> Result<ExponentField, ConfigError> {
        let field = match &self.q {
            ExponentSpec::Constant(q) => ExponentField::constant(grid, *q),
            ExponentSpec::Expression(text) => {
                let f = compile_expression(text)?;
                ExponentField::from_fn(grid, |x| f(x[0], x[1]))
            }
        };
        field.map_err(|e| ConfigError::Invalid(format!("q: {e}")))
    }

    pub fn context(&self) -> Result<EnergyContext, ConfigError> {
        let grid = self.grid()?;
        let yf = YoungFunction::new(self.nonlinearity.clone()).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        EnergyContext::new(yf, self.exponent(grid)?).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

/// Compiles an arithmetic expression in `x` and `y`. `log` is the natural
/// logarithm.
pub fn compile_expression(text: &str) -> Result<impl Fn(f64, f64) -> f64, ConfigError> {
    let expr: meval::Expr = text
        .parse()
        .map_err(|e| ConfigError::Invalid(format!("q expression `{text}`: {e}")))?;
    let mut ctx = meval::Context::new();
    ctx.func("log", f64::ln);
    expr.bind2_with_context(ctx, "x", "y")
        .map_err(|e| ConfigError::Invalid(format!("q expression `{text}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "extents": [1.0],
        "cells": [16],
        "nonlinearity": {"family": "power_log", "p": 2.5, "r": 1.5},
        "q": "1.5 + 0.4*x"
    }"#;

    #[test]
    fn parses_defaults() {
        let cfg = ProblemConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.audit_dimension(), 1);
        assert_eq!(cfg.solver, SolverOptions::default());
        assert_eq!(cfg.probes, 32);
        let q = cfg.exponent(cfg.grid().unwrap()).unwrap();
        assert!((q.q_minus() - 1.5).abs() < 1e-15 && (q.q_plus() - 1.9).abs() < 1e-15);
    }

    #[test]
    fn expressions() {
        let f = compile_expression("2 + sin(x)^2 * exp(-y) + log(1 + x) - cos(0)").unwrap();
        let (x, y) = (0.3f64, 0.7f64);
        let expected = 2.0 + x.sin().powi(2) * (-y).exp() + (1.0 + x).ln() - 1.0;
        assert!((f(x, y) - expected).abs() < 1e-14);
        assert!(compile_expression("2 + z").is_err());
        assert!(compile_expression("2 + (x").is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "{\n  \"extents\": [1.0],\n  \"cells\": [oops]\n}";
        match ProblemConfig::from_json(text) {
            Err(ConfigError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_inadmissible_values() {
        let low_q = BASE.replace("1.5 + 0.4*x", "0.9 + x");
        let cfg = ProblemConfig::from_json(&low_q).unwrap();
        assert!(cfg.context().is_err());
        let bad_r = BASE.replace("\"r\": 1.5", "\"r\": -1");
        assert!(matches!(ProblemConfig::from_json(&bad_r), Err(ConfigError::Invalid(_))));
        let mismatch = BASE.replace("\"cells\": [16]", "\"cells\": [16, 16]");
        assert!(matches!(
            ProblemConfig::from_json(&mismatch),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ProblemConfig::from_json(BASE).unwrap();
        let b = ProblemConfig::from_json(&BASE.replace('\n', " ")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed = 1;
        assert_ne!(a.hash(), c.hash());
    }
}
