//! Common-randomness simulation and key-consolidation experiments.

mod consolidation;
mod rtt;

pub use consolidation::{
    consolidation_experiment, eps_sweep, parse_sweep, write_curve_csv, CurveRow, Disagreement, Execution,
    ExperimentConfig, CURVE_CSV_HEADER,
};
pub use rtt::{simulate_exchange, write_exchange_csv, BitExtract, DelayModel, Exchange, JitterFamily, RttSample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid delay model: {0}")]
    Model(String),
    #[error("degenerate delay model: round-trip times have zero variance")]
    Degenerate,
    #[error("invalid sweep {0:?} (expected lo:hi:steps)")]
    Sweep(String),
    #[error("invalid experiment: {0}")]
    Experiment(String),
    #[error(transparent)]
    Keygen(#[from] crate::keygen::KeygenError),
    #[error(transparent)]
    Kem(#[from] crate::kem::KemError),
    #[error(transparent)]
    Gf2(#[from] crate::gf2::Gf2Error),
}
