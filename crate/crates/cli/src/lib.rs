//! Configuration loading, hypothesis audits, solver runs and reproducible
//! artifact output for the `orlicz-spectra` command.

pub mod artifacts;
pub mod audit;
pub mod commands;
pub mod config;

pub use artifacts::{eigenpairs_csv, write_artifacts, EIGENPAIRS_HEADER};
pub use audit::{audit, AuditReport, Conditions, Verdicts};
pub use commands::{run, summary, Command, Method, Overrides, PairRecord, RunError, RunRecord, SolveRecord, Status};
pub use config::{compile_expression, ConfigError, ExponentSpec, ProblemConfig};
