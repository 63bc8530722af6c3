//! Dynamics of a three-level Lambda system under periodically switched
//! coupling and probe fields.
//!
//! The library covers closed-system stroboscopic evolution with exact
//! piecewise propagators, the product-formula effective Hamiltonian,
//! closed-form fidelity/absorption expressions with their detuned
//! coefficient tables, open-system evolution for projector and Lindblad
//! decay, observable extraction, and reproduction pipelines that emit
//! plot-ready CSV data.

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod open_system;
pub mod propagate;
pub mod selftest;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use model::{
    build_hamiltonians, dark_state, hamiltonian_at, mixed_initial, DensityMatrix, Hamiltonians,
    ModulationSchedule, PureState, SystemParams,
};
pub use observables::{OscillationStats, PlateauValue, TimeSeries};
pub use open_system::{evolve_master, liouvillian, DecaySpec, DensityTrajectory};
pub use propagate::{
    cycle_unitary, effective_hamiltonian, evolve_eff, evolve_pure, fidelity, Trajectory,
};
