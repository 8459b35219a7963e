//! Pseudospectral simulation and diagnostics for 2D periodic gravity water waves in conformal
//! (Riemann-mapping) variables.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod energy;
pub mod error;
pub mod evolution;
pub mod halfplane;
pub mod initial;
pub mod mollify;
pub mod output;
pub mod quadrature;
pub mod singular;
pub mod spectral;
pub mod stability;
pub mod state;

pub use error::{Error, Result};
pub use evolution::{simulate, SolverConfig, Trajectory};
pub use initial::{generate_initial, InitialSpec};
pub use spectral::{grid, Field, Grid, C64};
pub use state::WaterWaveState;
