use std::fmt;
use std::time::{Duration, Instant};

use orlicz_spectra::field::ScalarField;
use orlicz_spectra::spectrum::{
    ball_minimize, default_rho, estimate_embedding_constant_seeded, free_minimize, genus_sequence_solve, lambda_star,
    sublevel_bump, EigenPair, EnergyContext, OmittedSeed, SeedRecord, SolveOutcome, SolverOptions,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::audit::{audit, AuditReport};
use crate::config::{ConfigError, ProblemConfig};

const DEFAULT_K_MAX: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Audit,
    Solve,
    Sweep,
    Sequence,
    LambdaStar,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Audit => "audit",
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Sequence => "sequence",
            Command::LambdaStar => "lambda-star",
        }
    }
}

/// Command-line values that override the config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub k_max: Option<usize>,
    pub seed: Option<u64>,
    pub force: bool,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Usage(String),
    /// The audit rules the command out and `--force` was not given.
    Refused(String),
    Numeric(orlicz_spectra::Error),
    Io(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Usage(m) => write!(f, "usage: {m}"),
            RunError::Refused(m) => write!(f, "refused: {m}; pass --force to run anyway"),
            RunError::Numeric(e) => write!(f, "{e}"),
            RunError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<orlicz_spectra::Error> for RunError {
    fn from(e: orlicz_spectra::Error) -> Self {
        RunError::Numeric(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Projected descent inside the ball of radius `rho`.
    Ball,
    /// Unconstrained descent.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pair,
    Trivial,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    #[serde(flatten)]
    pub pair: EigenPair,
    pub field_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub lambda: f64,
    pub method: Method,
    pub rho: f64,
    pub status: Status,
    pub message: Option<String>,
    pub pair: Option<PairRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceRecord {
    pub lambda: f64,
    pub k_max: usize,
    pub pairs: Vec<PairRecord>,
    pub seeds: Vec<SeedRecord>,
    pub omitted: Vec<OmittedSeed>,
    pub truncated_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRecord {
    pub c1: f64,
    pub rho: f64,
    pub q_minus: f64,
    pub p0_sup: f64,
    pub lambda_star: f64,
    pub probes: usize,
    pub probe_seed: u64,
}

/// Everything a command produced. Identical inputs give identical records;
/// the wall time is kept out of every serialized form.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: Command,
    pub config_hash: String,
    pub seed: u64,
    pub audit: AuditReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub solves: Vec<SolveRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdRecord>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunRecord {
    /// Converged pairs in output order.
    pub fn pairs(&self) -> Vec<&PairRecord> {
        let from_solves = self.solves.iter().filter_map(|s| s.pair.as_ref());
        let from_sequence = self.sequence.iter().flat_map(|s| s.pairs.iter());
        from_solves.chain(from_sequence).collect()
    }

    pub fn has_failures(&self) -> bool {
        self.solves.iter().any(|s| s.status == Status::Failed)
    }
}

fn field_file(index: usize) -> String {
    format!("field_{index:03}.csv")
}

struct Session {
    cfg: ProblemConfig,
    ctx: EnergyContext,
    audit: AuditReport,
    force: bool,
}

impl Session {
    fn open(cfg: &ProblemConfig, overrides: &Overrides) -> Result<Self, RunError> {
        let mut cfg = cfg.clone();
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        let ctx = cfg.context()?;
        let audit = audit(&ctx, cfg.audit_dimension())?;
        Ok(Self {
            cfg,
            ctx,
            audit,
            force: overrides.force,
        })
    }

    fn record(self, command: Command) -> RunRecord {
        RunRecord {
            command,
            config_hash: self.cfg.hash(),
            seed: self.cfg.seed,
            audit: self.audit,
            solves: Vec::new(),
            sequence: None,
            threshold: None,
            wall_time: Duration::ZERO,
        }
    }

    fn refuse_unless(&self, ok: bool, reason: impl FnOnce() -> String) -> Result<(), RunError> {
        if ok || self.force {
            Ok(())
        } else {
            Err(RunError::Refused(reason()))
        }
    }

    fn threshold(&self) -> Result<ThresholdRecord, RunError> {
        let c1 = estimate_embedding_constant_seeded(&self.ctx, self.cfg.probes, self.cfg.seed)?;
        let rho = self.cfg.rho.unwrap_or_else(|| default_rho(c1));
        let (q_minus, p0_sup) = (self.ctx.q().q_minus(), self.ctx.indices().p0_sup);
        Ok(ThresholdRecord {
            c1,
            rho,
            q_minus,
            p0_sup,
            lambda_star: lambda_star(rho, c1, q_minus, p0_sup)?,
            probes: self.cfg.probes,
            probe_seed: self.cfg.seed,
        })
    }

    fn radius(&self) -> Result<f64, RunError> {
        match self.cfg.rho {
            Some(r) => Ok(r),
            None => Ok(default_rho(estimate_embedding_constant_seeded(
                &self.ctx,
                self.cfg.probes,
                self.cfg.seed,
            )?)),
        }
    }

    fn solve_refusal(&self) -> Result<(), RunError> {
        match self.audit.solve_refusal() {
            Some(reason) if !self.force => Err(RunError::Refused(reason)),
            _ => Ok(()),
        }
    }

    /// Descent from a bump at half the ball radius; unconstrained when the
    /// energy is coercive, confined to the ball otherwise.
    fn solve_one(&self, lambda: f64, rho: f64, start: &ScalarField, opts: &SolverOptions) -> SolveRecord {
        let method = if self.audit.conditions.q_plus_below_p0 {
            Method::Free
        } else {
            Method::Ball
        };
        let result = match method {
            Method::Free => free_minimize(&self.ctx, lambda, start, opts),
            Method::Ball => ball_minimize(&self.ctx, lambda, rho, start, opts),
        };
        let (status, message, pair) = match result {
            Ok(SolveOutcome::Pair(p)) => (Status::Pair, None, Some(p)),
            Ok(SolveOutcome::Trivial(t)) => (
                Status::Trivial,
                Some(format!("converged to the zero field after {} iterations", t.iterations)),
                None,
            ),
            Err(e) => (Status::Failed, Some(e.to_string()), None),
        };
        let pair = pair.map(|pair| PairRecord {
            pair,
            field_file: String::new(),
        });
        SolveRecord {
            lambda,
            method,
            rho,
            status,
            message,
            pair,
        }
    }

    fn solve_all(&self, lambdas: &[f64]) -> Result<Vec<SolveRecord>, RunError> {
        if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(RunError::Usage(format!("λ must be positive, got {bad}")));
        }
        self.solve_refusal()?;
        let rho = self.radius()?;
        let bump = sublevel_bump(&self.ctx)?;
        let start = bump.scaled(0.5 * rho / self.ctx.sobolev_norm(&bump)?);
        let opts = self.cfg.solver;
        let mut records: Vec<SolveRecord> = lambdas
            .par_iter()
            .map(|&l| self.solve_one(l, rho, &start, &opts))
            .collect();
        let mut index = 0;
        for r in records.iter_mut() {
            if let Some(p) = r.pair.as_mut() {
                p.field_file = field_file(index);
                index += 1;
            }
        }
        Ok(records)
    }
}

pub fn run(command: Command, cfg: &ProblemConfig, overrides: &Overrides) -> Result<RunRecord, RunError> {
    let clock = Instant::now();
    let session = Session::open(cfg, overrides)?;
    let mut record = match command {
        Command::Audit => session.record(command),
        Command::Solve => {
            let lambda = overrides
                .lambda
                .or(session.cfg.lambda)
                .ok_or_else(|| RunError::Usage("solve needs --lambda or a `lambda` config entry".into()))?;
            let solves = session.solve_all(&[lambda])?;
            RunRecord {
                solves,
                ..session.record(command)
            }
        }
        Command::Sweep => {
            let lambdas = overrides
                .lambdas
                .clone()
                .or_else(|| session.cfg.lambdas.clone())
                .filter(|l| !l.is_empty())
                .ok_or_else(|| RunError::Usage("sweep needs --lambdas or a `lambdas` config entry".into()))?;
            let solves = session.solve_all(&lambdas)?;
            RunRecord {
                solves,
                ..session.record(command)
            }
        }
        Command::Sequence => {
            let lambda = overrides
                .lambda
                .or(session.cfg.lambda)
                .ok_or_else(|| RunError::Usage("sequence needs --lambda or a `lambda` config entry".into()))?;
            let k_max = overrides.k_max.or(session.cfg.k_max).unwrap_or(DEFAULT_K_MAX);
            session.refuse_unless(session.audit.conditions.q_plus_below_p0, || {
                format!("q⁺ = {} is not below p₀ = {}", session.audit.q_plus, session.audit.p0)
            })?;
            let seq = genus_sequence_solve(&session.ctx, lambda, k_max, &session.cfg.solver)?;
            let pairs = seq
                .pairs
                .into_iter()
                .enumerate()
                .map(|(i, pair)| PairRecord {
                    pair,
                    field_file: field_file(i),
                })
                .collect();
            let sequence = SequenceRecord {
                lambda,
                k_max,
                pairs,
                seeds: seq.seeds,
                omitted: seq.omitted,
                truncated_at: seq.truncated_at,
            };
            RunRecord {
                sequence: Some(sequence),
                ..session.record(command)
            }
        }
        Command::LambdaStar => {
            session.refuse_unless(session.audit.conditions.q_minus_below_p0, || {
                format!(
                    "1 < q⁻ < p₀ fails (q⁻ = {}, p₀ = {})",
                    session.audit.q_minus, session.audit.p0
                )
            })?;
            let threshold = session.threshold()?;
            RunRecord {
                threshold: Some(threshold),
                ..session.record(command)
            }
        }
    };
    record.wall_time = clock.elapsed();
    Ok(record)
}

/// Human-readable result lines, free of timing data.
pub fn summary(record: &RunRecord) -> String {
    let mut lines = vec![
        format!("command: {}", record.command.name()),
        format!("config: {}", record.config_hash),
    ];
    lines.extend(record.audit.summary_lines());
    for s in &record.solves {
        let detail = match (&s.pair, &s.message) {
            (Some(p), _) => format!(
                "energy {:.6e}, residual {:.3e}, recovered lambda {:.6e}, norm {:.6e}",
                p.pair.energy, p.pair.residual, p.pair.lambda_recovered, p.pair.sobolev_norm
            ),
            (None, Some(m)) => m.clone(),
            (None, None) => String::new(),
        };
        lines.push(format!(
            "lambda {:.6e} [{:?}]: {:?}: {detail}",
            s.lambda, s.method, s.status
        ));
    }
    if let Some(seq) = &record.sequence {
        lines.push(format!(
            "sequence at lambda {:.6e}, k_max {}: {} pairs",
            seq.lambda,
            seq.k_max,
            seq.pairs.len()
        ));
        for p in &seq.pairs {
            lines.push(format!(
                "  norm {:.6e}, energy {:.6e}, residual {:.3e}",
                p.pair.sobolev_norm, p.pair.energy, p.pair.residual
            ));
        }
        for o in &seq.omitted {
            lines.push(format!("  omitted k = {}, sample {}: {}", o.k, o.sample, o.reason));
        }
        if let Some(k) = seq.truncated_at {
            lines.push(format!("  mesh cannot host {k} disjoint bumps; stopped"));
        }
    }
    if let Some(t) = &record.threshold {
        lines.push(format!(
            "lambda_star {:.6e} (rho {:.6e}, c1 {:.6e}, q_minus {:.6}, p0_sup {:.6})",
            t.lambda_star, t.rho, t.c1, t.q_minus, t.p0_sup
        ));
    }
    lines.join("\n") + "\n"
}
