//! Conditional energy changes and work statistics of general quantum
//! measurements, with the thermodynamic bookkeeping needed to close the
//! measurement cycle against a single heat bath.
//!
//! The library models a measurement as a physical process — apparatus
//! preparation, premeasurement unitary, pointer readout — and computes, per
//! outcome: conditional energies before (weak value) and after (post-state
//! expectation) the process, the compound work when the pointer commutes
//! with the final apparatus Hamiltonian, and the non-recoverable work at a
//! given temperature, together with the classical reduction limits
//! (two-point eigenvalue statistics, quasi-probabilities, pure-state
//! trajectories).
//!
//! Everything is dense complex linear algebra at desk scale (dimensions up
//! to a few dozen). All types are immutable values and all operations pure
//! functions; see the `examples/` directory for one runnable walkthrough per
//! capability.

pub mod cli;
pub mod energetics;
pub mod error;
pub mod measurement;
pub mod modelfile;
pub mod opcore;
pub mod scenarios;
pub mod thermo;
pub mod verify;
pub mod workstats;

pub use error::{Error, Result};
pub use measurement::{
    induced_povm, instrument_apply, make_ideal_model, make_noisy_model, make_repeatable_model,
    outcome_branches, MeasurementModel, Outcome, OutcomeBranch, PointerObservable, Povm,
    RepeatableSpec,
};
pub use opcore::{
    spectral_decompose, validate, von_neumann_entropy, DensityState, Operator,
    SpectralDecomposition, ValidationKind, ValidationReport,
};
