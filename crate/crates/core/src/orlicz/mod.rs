mod audit;
mod exponent;
mod indices;
mod nonlinearity;
mod norms;
mod young;

pub use audit::{critical_growth_probe, sobolev_conjugate_audit, SobolevAudit, Trend};
pub use exponent::ExponentField;
pub use indices::{check_delta2, estimate_indices, growth_limit, index_ratio, Delta2Report, GrowthIndices, SampleGrid};
pub use nonlinearity::{eval_phi, NonlinearitySpec};
pub use norms::{luxemburg_norm, orlicz_modular, variable_exponent_modular, variable_exponent_norm};
pub use young::{eval_Phi, eval_Phi_conjugate, YoungFunction};
