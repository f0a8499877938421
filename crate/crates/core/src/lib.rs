//! Generalized geometric measure (GGM) and localizable GGM for multiqubit
//! pure states.
//!
//! The crate is `no_std` with `alloc`. Floating-point transcendental
//! functions come from `std` (default feature) or from `libm`
//! (`--no-default-features --features libm`).
//!
//! Qubits are numbered from 1, and qubit 1 is the most significant bit of a
//! basis index: for `N` qubits, qubit `q` owns the bit `1 << (N - q)`.
//!
//! Module map:
//! - [`qstate`]: state construction, sampling, partial trace, projective collapse.
//! - [`ggm`]: Schmidt spectra and the GGM over bipartitions.
//! - [`localize`]: measurement ensembles and the optimized localizable GGM.
//! - [`oracle`]: closed-form reference values for the named state families.
//! - [`spin`]: transverse-field Ising and XXZ chains, Lanczos ground states, sweeps.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("lggm-core needs either the `std` or the `libm` feature for floating-point math");

extern crate alloc;

mod error;
pub mod ggm;
pub mod linalg;
pub mod localize;
pub mod optimize;
pub mod oracle;
pub mod qstate;
pub mod spin;

pub use error::{Error, Result};
pub use ggm::{ggm, max_eigenvalue, schmidt_spectrum, CutPolicy, GgmValue};
pub use localize::{
    average_ggm, conjecture_check, ensemble, global_lggm, lggm, lggm_with_hints, ConjectureReport,
    Ensemble, GlobalLggm, LggmResult, MeasurementConfig,
};
pub use optimize::OptimizerSettings;
pub use qstate::{
    build, haar_random, project_and_trace, reduced_density, DensityMatrix, PureState, StateSpec,
};
pub use spin::{ground_state, sweep, GroundState, SpinModel, SpinModelSpec, SweepSpec};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
