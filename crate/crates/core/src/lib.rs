//! Structure-preserving exponential integrators for the cubic nonlinear
//! Schrodinger equation `i psi_t = -1/2 Laplacian psi + beta |psi|^2 psi`
//! on periodic 2-D and 3-D boxes.
//!
//! The equation is reformulated with a scalar auxiliary variable so that the
//! energy becomes quadratic, discretized in space with a Fourier
//! pseudo-spectral method, and integrated in time with Gauss-Runge-Kutta
//! methods conjugated by the exact linear propagator. With a tableau that
//! satisfies the symplectic coefficient condition the discrete mass and the
//! quadratic (modified) energy are conserved to solver tolerance at any
//! order of accuracy; the original Hamiltonian energy is conserved only up
//! to the truncation order.
//!
//! Crate layout:
//!
//! * [`grid`] — periodic grids, complex grid functions, FFT-diagonalized
//!   operators (`-1/2 Laplacian` and its unitary propagators).
//! * [`sav`] — the auxiliary-variable system: consistent initialization,
//!   stage slopes, mass and the two energies.
//! * [`tableau`] — Gauss collocation tableaus and the symplectic-condition
//!   check.
//! * [`stepper`] — the implicit stage solver and time stepper, plus a
//!   reference stepper in the transformed (integrating-factor) variable.
//! * [`diagnostics`] — invariant series, max-norm errors, convergence rates.
//! * [`kernels`] — the data-parallel primitives behind everything above.
//!   With the default `parallel` feature they run on rayon; without it they
//!   fall back to sequential loops. Reductions are chunked identically in
//!   both backends, so results are bitwise reproducible run-to-run and
//!   across thread counts.

pub mod diagnostics;
pub mod error;
mod fft;
pub mod grid;
pub mod kernels;
pub mod sav;
pub mod stepper;
pub mod tableau;

pub use error::{Error, Result};
pub use grid::{ComplexField, PeriodicGrid, SpectralSymbol};
pub use sav::{ModelParams, SavState, SavSystem};
pub use stepper::{SolverConfig, StageSet, StepReport, Stepper};
pub use tableau::Tableau;

pub use num_complex::Complex64;
