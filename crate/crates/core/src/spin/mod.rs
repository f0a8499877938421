//! Periodic spin-1/2 chains: the transverse-field Ising model and the XXZ
//! model in a longitudinal field, their Lanczos ground states, and
//! entanglement sweeps over a coupling.

mod hamiltonian;
mod lanczos;
mod sweep;

pub use hamiltonian::{apply_hamiltonian, apply_hamiltonian_into, SpinModel, SpinModelSpec};
pub use lanczos::{
    ground_state, lanczos_lowest, GroundState, LanczosOutcome, LanczosSettings, Sector,
    SectorStrategy,
};
pub use sweep::{
    central_differences, locate_extremum, sweep, Extremum, ExtremumKind, Measure, Series,
    SweepParameter, SweepPoint, SweepResult, SweepSpec,
};
