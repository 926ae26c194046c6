//! Simulation of three-party arbitrary quantum state transfer between atoms
//! held in three fiber-coupled optical cavities.
//!
//! The crate goes from physical cavity parameters ([`couplings`]) to the
//! effective Ising-ring Hamiltonians ([`hamiltonians`]) and then to the staged
//! transfer protocol with post-selection ([`protocol`]). [`sweep`] batches the
//! protocol over parameter grids and [`cli`] exposes everything on the command
//! line.

pub mod cli;
pub mod couplings;
pub mod error;
pub mod exec;
pub mod hamiltonians;
pub mod protocol;
pub mod qcore;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Execution;
