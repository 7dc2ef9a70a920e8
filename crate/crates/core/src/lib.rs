//! Exact spontaneous-emission dynamics of a two-level emitter coupled to a
//! coupled-cavity array with static on-site disorder, and the rescaled
//! geometric (volume) non-Markovianity measure of the resulting
//! amplitude-damping channel.
//!
//! The pipeline for one disorder realization is
//!
//! ```text
//! ChainSpec + DisorderSpec --sample_realization--> Realization
//!     --spectral_data--> SpectralData --Trajectory::from_spectrum--> Trajectory
//!     --geometric_measure--> MeasureResult
//! ```
//!
//! and [`ensemble`] averages the per-realization measure over many
//! realizations and over a (σ, g) grid.
//!
//! Energies are in the same (arbitrary) unit as the hopping rate `J`; times
//! are in the inverse unit. Internally all dynamics is evaluated in the frame
//! rotating at the bare cavity frequency ω0.

// `!(x > 0.0)` style checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ensemble;
mod error;
pub mod model;
pub mod nonmarkov;
pub mod tridiag;

pub use error::{Error, Result};

pub use dynamics::{
    amplitude_trajectory, bound_states, choose_horizon, diagonalize, full_state, spectral_data,
    BoundStateReport, Eigensystem, Horizon, HorizonPolicy, SpectralData, TimeStep, Trajectory,
};
pub use ensemble::{
    run_ensemble, sweep, EnsembleConfig, EnsembleResult, HorizonRule, SweepCell, SweepOptions,
    SweepResult,
};
pub use model::{
    band_info, build_hamiltonian, dispersion, sample_realization, BandInfo, ChainSpec,
    DisorderSpec, Realization,
};
pub use nonmarkov::{apply_channel, geometric_measure, revival_detector, DensityMatrix, MeasureResult};
