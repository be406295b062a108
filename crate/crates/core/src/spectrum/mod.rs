mod descent;
mod energy;
mod genus;
mod geometry;
mod quotient;

pub use descent::{
    ball_minimize, free_minimize, minimize, newton_polish, DescentRun, SolveOutcome, SolverOptions, TrivialOutcome,
};
pub use energy::{EigenPair, EnergyContext};
pub use genus::{genus_sequence_solve, sphere_samples, GenusSequence, OmittedSeed, SeedRecord};
pub use geometry::{
    check_mountain_geometry, default_rho, estimate_embedding_constant, estimate_embedding_constant_seeded, lambda_star,
    probe_fields, probe_fields_seeded, sublevel_bump, GeometryReport, DEFAULT_PROBE_SEED, EMBEDDING_SAFETY,
};
pub use quotient::{
    alpha, coercivity_probe, eventually_increasing, quotient_scaling_sweep, rayleigh_quotient, CoercivityReport,
    RayReport,
};
