//! Command-line front end for `lggm-core`: single-state evaluation,
//! sampling campaigns and spin-chain sweeps.

pub mod campaign;
pub mod cli;
pub mod error;
pub mod format;
pub mod io;
