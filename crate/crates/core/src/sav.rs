//! The auxiliary-variable reformulation of the cubic NLS equation.
//!
//! The wave function is paired with a global scalar `q` that tracks
//! `sqrt((psi^2, psi^2) + C0)`, turning the quartic part of the energy into a
//! quadratic form. The module provides the consistent initialization of `q`,
//! the two stage slopes of the reformulated system, and the three energy-like
//! functionals tracked by the diagnostics:
//!
//! * mass              `M = (psi, psi)`
//! * modified energy   `E = (L psi, psi) + beta/2 q^2 - beta/2 C0`
//! * Hamiltonian       `H = (L psi, psi) + beta/2 (psi^2, psi^2)`
//!
//! with `L = -1/2 Laplacian`. `E` and `H` agree whenever `q` is consistent
//! with `psi`; the time-discrete flow conserves `M` and `E` but not `H`.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, PeriodicGrid, SpectralSymbol};
use crate::kernels;

/// Relative bound on the imaginary residue of quantities that are real by
/// construction. A violation indicates a broken operator, not bad data.
pub const RESIDUE_TOL: f64 = 1e-12;

/// Nonlinearity strength and the positive shift that keeps the auxiliary
/// variable well defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    beta: f64,
    c0: f64,
}

impl ModelParams {
    /// `c0` must be strictly positive.
    pub fn new(beta: f64, c0: f64) -> Result<Self> {
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "auxiliary shift c0 = {c0} must be strictly positive"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta = {beta} must be finite")));
        }
        Ok(Self { beta, c0 })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }
}

/// Wave function plus auxiliary scalar, advanced in lockstep.
#[derive(Clone, Debug)]
pub struct SavState {
    pub psi: ComplexField,
    pub q: f64,
    pub time: f64,
}

/// Grid operator and model parameters bundled for the slope and energy
/// evaluations. Immutable and cheap to share between trajectories.
pub struct SavSystem {
    symbol: SpectralSymbol,
    params: ModelParams,
}

impl SavSystem {
    pub fn new(grid: &Arc<PeriodicGrid>, params: ModelParams) -> Self {
        Self {
            symbol: SpectralSymbol::new(grid),
            params,
        }
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        self.symbol.grid()
    }

    pub fn symbol(&self) -> &SpectralSymbol {
        &self.symbol
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `(psi^2, psi^2) = quad_weight * sum |psi|^4`, evaluated directly on
    /// the modulus so it is real by construction.
    pub fn quartic_norm(&self, psi: &ComplexField) -> f64 {
        psi.grid().quad_weight() * kernels::sum_abs4(psi.values())
    }

    /// Consistent initial value of the auxiliary variable,
    /// `q = sqrt((psi^2, psi^2) + C0) > 0`.
    pub fn initial_aux(&self, psi: &ComplexField) -> f64 {
        let radicand = self.quartic_norm(psi) + self.params.c0;
        assert!(
            radicand > 0.0,
            "radicand {radicand} not positive; c0 validation should prevent this"
        );
        radicand.sqrt()
    }

    /// Builds a state at `time = 0` with the consistent auxiliary value.
    pub fn initial_state(&self, psi: ComplexField) -> SavState {
        let q = self.initial_aux(&psi);
        SavState { psi, q, time: 0.0 }
    }

    /// Field slope of the reformulated system:
    /// `-i beta |psi|^2 psi q / sqrt((psi^2, psi^2) + C0)`.
    pub fn nonlinear_slope(&self, psi: &ComplexField, q: f64) -> ComplexField {
        let mut cubic = ComplexField::zeros(psi.grid());
        let quartic_sum = kernels::cubic_with_abs4(psi.values(), cubic.values_mut());
        let den = (psi.grid().quad_weight() * quartic_sum + self.params.c0).sqrt();
        let coef = Complex64::new(0.0, -self.params.beta * q / den);
        let mut out = ComplexField::zeros(psi.grid());
        kernels::scale_into(out.values_mut(), cubic.values(), coef);
        out
    }

    /// Scalar slope of the auxiliary variable:
    /// `2 Re(-i L psi, |psi|^2 psi) / sqrt((psi^2, psi^2) + C0)`.
    pub fn aux_slope(&self, psi: &ComplexField) -> f64 {
        self.slopes(psi, 1.0).1
    }

    /// Evaluates both slopes sharing the cubic term and the denominator.
    /// The returned pair is `(field slope, aux slope)`.
    pub fn slopes(&self, psi: &ComplexField, q: f64) -> (ComplexField, f64) {
        let mut cubic = ComplexField::zeros(psi.grid());
        let quartic_sum = kernels::cubic_with_abs4(psi.values(), cubic.values_mut());
        let den = (psi.grid().quad_weight() * quartic_sum + self.params.c0).sqrt();

        let lop = self
            .symbol
            .apply(psi)
            .expect("slope evaluation requires the system's own grid");
        // (-i L psi, cubic) = -i (L psi, cubic), so the real part is the
        // imaginary part of the plain bracket.
        let bracket = lop
            .inner_product(&cubic)
            .expect("fields share a grid by construction");
        let l = 2.0 * bracket.im / den;

        let coef = Complex64::new(0.0, -self.params.beta * q / den);
        let mut k = ComplexField::zeros(psi.grid());
        kernels::scale_into(k.values_mut(), cubic.values(), coef);
        (k, l)
    }

    /// Discrete mass `(psi, psi)`.
    pub fn mass(&self, psi: &ComplexField) -> f64 {
        psi.grid().quad_weight() * kernels::sum_abs2(psi.values())
    }

    /// Quadratic (modified) energy
    /// `(L psi, psi) + beta/2 q^2 - beta/2 C0`.
    pub fn modified_energy(&self, state: &SavState) -> f64 {
        let kinetic = self.kinetic_energy(&state.psi);
        kinetic + 0.5 * self.params.beta * (state.q * state.q - self.params.c0)
    }

    /// Original Hamiltonian energy
    /// `(L psi, psi) + beta/2 (psi^2, psi^2)`.
    pub fn hamiltonian_energy(&self, psi: &ComplexField) -> f64 {
        self.kinetic_energy(psi) + 0.5 * self.params.beta * self.quartic_norm(psi)
    }

    /// `(L psi, psi)`, asserted real up to [`RESIDUE_TOL`].
    fn kinetic_energy(&self, psi: &ComplexField) -> f64 {
        let lop = self
            .symbol
            .apply(psi)
            .expect("energy evaluation requires the system's own grid");
        let ip = lop
            .inner_product(psi)
            .expect("fields share a grid by construction");
        assert!(
            ip.im.abs() <= RESIDUE_TOL * (1.0 + ip.norm()),
            "imaginary residue {:.3e} of (L psi, psi) = {ip} exceeds {RESIDUE_TOL:.0e}; \
             the operator application is no longer self-adjoint",
            ip.im
        );
        ip.re
    }
}
