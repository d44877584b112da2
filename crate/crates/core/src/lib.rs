//! Simulation and numerical checks for two-dimensional competition processes.
//!
//! * [`rates`]: state space, models and exact transition enumeration.
//! * [`sim`]: exact CTMC and jump-chain simulation, seeded batches.
//! * [`lyapunov`]: generator evaluation and drift certificates.
//! * [`analysis`]: linear-model constants and identities, boundary
//!   classification, hitting times, the auxiliary urn, Reuter's series.
//! * [`config`] and [`cli`]: the file-driven command line.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod lyapunov;
pub mod rates;
pub mod sim;
pub mod stream;

pub use rates::{Model, State};
