//! Batch experiment driver for the exponential SAV Runge-Kutta NLS solver:
//! run configuration, exact plane-wave data, and the single-run /
//! convergence / conservation experiment modes with CSV and plot-script
//! output. The `esav` binary exposes these as subcommands.

pub mod config;
pub mod plots;
pub mod runner;
pub mod wave;

pub use config::{InitialCondition, RunConfig};
pub use runner::{
    convergence_table, run_conservation, run_convergence, run_single, simulate, ConvergenceRow,
    SimOutcome,
};
pub use wave::{perturbed_plane_wave, plane_wave, PlaneWaveSpec};
