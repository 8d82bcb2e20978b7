//! Invariant time series, error norms and convergence rates.

use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::sav::{SavState, SavSystem};

/// Tracked invariants along a trajectory: mass `M`, modified energy `E`,
/// Hamiltonian energy `H`, and their relative drifts
/// `R X^n = |(X^n - X^0) / X^0|`. A quantity whose baseline is zero is
/// tracked by absolute drift instead.
#[derive(Clone, Debug, Default)]
pub struct InvariantSeries {
    times: Vec<f64>,
    mass: Vec<f64>,
    modified_energy: Vec<f64>,
    hamiltonian: Vec<f64>,
    rel_mass: Vec<f64>,
    rel_energy: Vec<f64>,
    rel_hamiltonian: Vec<f64>,
}

impl InvariantSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the invariants of `state`. The first call sets the baselines,
    /// so its relative entries are exactly zero.
    pub fn record(&mut self, system: &SavSystem, state: &SavState) {
        let m = system.mass(&state.psi);
        let e = system.modified_energy(state);
        let h = system.hamiltonian_energy(&state.psi);

        let drift = |x: f64, x0: f64| {
            if x0 == 0.0 {
                (x - x0).abs()
            } else {
                ((x - x0) / x0).abs()
            }
        };
        if self.times.is_empty() {
            self.rel_mass.push(0.0);
            self.rel_energy.push(0.0);
            self.rel_hamiltonian.push(0.0);
        } else {
            self.rel_mass.push(drift(m, self.mass[0]));
            self.rel_energy.push(drift(e, self.modified_energy[0]));
            self.rel_hamiltonian.push(drift(h, self.hamiltonian[0]));
        }
        self.times.push(state.time);
        self.mass.push(m);
        self.modified_energy.push(e);
        self.hamiltonian.push(h);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn modified_energy(&self) -> &[f64] {
        &self.modified_energy
    }

    pub fn hamiltonian(&self) -> &[f64] {
        &self.hamiltonian
    }

    pub fn rel_mass(&self) -> &[f64] {
        &self.rel_mass
    }

    pub fn rel_energy(&self) -> &[f64] {
        &self.rel_energy
    }

    pub fn rel_hamiltonian(&self) -> &[f64] {
        &self.rel_hamiltonian
    }

    pub fn max_rel_mass(&self) -> f64 {
        self.rel_mass.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_rel_energy(&self) -> f64 {
        self.rel_energy.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_rel_hamiltonian(&self) -> f64 {
        self.rel_hamiltonian.iter().copied().fold(0.0, f64::max)
    }
}

/// Grid max-norm of the difference between a numerical and a reference field.
pub fn linf_error(psi: &ComplexField, exact: &ComplexField) -> Result<f64> {
    psi.linf_diff(exact)
}

/// Convergence rates from consecutive pairs of a step-size ladder:
/// `rate[j] = ln(err[j-1] / err[j]) / ln(step[j-1] / step[j])`. The first
/// entry has no predecessor and is `None`.
pub fn convergence_rates(errors: &[f64], steps: &[f64]) -> Result<Vec<Option<f64>>> {
    if errors.len() != steps.len() {
        return Err(Error::InvalidRateInput(format!(
            "{} errors vs {} step sizes",
            errors.len(),
            steps.len()
        )));
    }
    if errors.len() < 2 {
        return Err(Error::InvalidRateInput(
            "need at least two ladder entries".into(),
        ));
    }
    for &e in errors {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidRateInput(format!("non-positive error {e}")));
        }
    }
    for &s in steps {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidRateInput(format!("non-positive step {s}")));
        }
    }

    let mut rates = vec![None];
    for j in 1..errors.len() {
        rates.push(Some(
            (errors[j - 1] / errors[j]).ln() / (steps[j - 1] / steps[j]).ln(),
        ));
    }
    Ok(rates)
}
