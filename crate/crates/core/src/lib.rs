//! Simulator for a pair of driven, collectively damped two-level atoms under
//! photodetection-triggered (quantum-jump) Markovian feedback.
//!
//! The system state is a 4x4 density matrix evolving under a Lindblad master
//! equation whose collective decay channel is modified by a feedback unitary
//! applied at each detected jump. The crate provides
//!
//! - the fixed operator algebra of the two-qubit space ([`operators`]),
//! - dense 16x16 superoperator assembly for every master-equation variant
//!   (collective decay, jump feedback, inefficient detection, spontaneous
//!   emission, local dephasing) ([`liouvillian`]),
//! - deterministic propagation and Liouvillian null-space steady states
//!   ([`dynamics`]),
//! - a Monte-Carlo wave-function unraveling that serves as an independent
//!   stochastic cross-check of the deterministic evolution ([`trajectories`]),
//! - entanglement measures (Wootters concurrence, singlet fidelity, purity)
//!   ([`entanglement`]),
//! - parameter-grid sweeps and optimum refinement ([`sweeps`]).
//!
//! Rates are quoted in units of the collective decay rate, which defaults
//! to 1 and sets the time unit.

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod liouvillian;
mod linalg;
pub mod operators;
pub mod sweeps;
pub mod trajectories;

pub use nalgebra;

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

pub use dynamics::{
    asymptotic_state, evolve, evolve_scaled, steady_state, trace_distance, DensityMatrix,
    EvolutionResult, SteadyStateResult,
};
pub use entanglement::{concurrence, fidelity_to_singlet, measures, purity, MeasureReport};
pub use error::{Error, Result};
pub use liouvillian::{build, dissipator, hamiltonian_term, Superoperator, SystemConfig};
pub use operators::{Feedback, Operator, StateVector};
pub use sweeps::{AxisSpec, Quantity, SweepResult, SweepSpec, TimeSeriesSpec};
pub use trajectories::{ensemble_average, run_trajectory, ChannelLabel, TrajectoryRecord};
