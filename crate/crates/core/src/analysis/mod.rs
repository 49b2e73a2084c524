//! Figures of merit and parameter engineering.

pub mod entropy;
pub mod repudiation;
pub mod settings;
pub mod sweep;
pub mod tails;

use serde::Serialize;

pub use entropy::{binary_entropy, entropy_inverse};
pub use repudiation::{
    repudiation_from_eps, repudiation_probability, OutcomeDistribution, RepudiationBounds,
};
pub use settings::{
    forgery_reject_probability, qubits_per_bit, repudiation_bound_scheme, set_parameters,
    set_parameters_with, QubitCost, SettingsOptions,
};
pub use sweep::{sweep, SweepConfig, SweepRow, XAxis};
pub use tails::{chernoff_lower, chernoff_upper, genuine_accept_probability};

use crate::protocol::SchemeParams;
use crate::Result;

/// Per-qudit error rates and costs of one parameter setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiguresOfMerit {
    /// Genuine per-position error rate, equal to `alpha`.
    pub g: f64,
    /// Lower bound `1 - p1` on the forged per-position error rate.
    pub j: f64,
    /// `J - G`
    pub gap: f64,
    pub p1: f64,
    pub qubits_per_bit: f64,
    pub qubits_per_bit_asymptotic: f64,
    pub repudiation_bound: f64,
}

pub fn figures_of_merit(params: &SchemeParams) -> Result<FiguresOfMerit> {
    let q = qubits_per_bit(params)?;
    Ok(FiguresOfMerit {
        g: params.alpha,
        j: 1.0 - params.p1,
        gap: params.gap,
        p1: params.p1,
        qubits_per_bit: q.exact,
        qubits_per_bit_asymptotic: q.asymptotic,
        repudiation_bound: repudiation_bound_scheme(params),
    })
}
