//! Command implementations behind the `mlfft` binary: lattice construction
//! (`build`), error sweeps over index-set refinements (`experiment`), and
//! coverage re-checks of stored artifacts (`verify`).

pub mod build;
pub mod config;
pub mod error;
pub mod experiment;
pub mod setspec;
pub mod verify;
