//! Time stepping for the auxiliary-variable NLS system.
//!
//! One step advances `(psi, q)` by an implicit `s`-stage Runge-Kutta method
//! applied in the moving frame of the linear propagator. With stage values
//! `Psi_i`, `Q_i` and slopes `k_i`, `l_i` from [`SavSystem::slopes`], the
//! stage equations read
//!
//! ```text
//! Psi_i = exp(-i L c_i tau) psi_n + tau sum_j a_ij exp(i L (c_j - c_i) tau) k_j
//! Q_i   = q_n + tau sum_j a_ij l_j
//! ```
//!
//! and the update is
//!
//! ```text
//! psi_{n+1} = exp(-i L tau) psi_n + tau sum_i b_i exp(-i L (1 - c_i) tau) k_i
//! q_{n+1}   = q_n + tau sum_i b_i l_i.
//! ```
//!
//! All propagator applications are diagonal in Fourier space, so the stepper
//! keeps each stage in both physical and spectral form and reuses phase
//! tables cached per `(tableau, tau)` pair; rebuilding the transcendental
//! tables every step would dominate the non-FFT cost on small grids.
//!
//! The coupled stage equations are solved by fixed-point sweeps (the
//! nonlocal scalar factor in the slopes makes Jacobians unattractive, and
//! the iteration contracts like `tau * beta * max|psi|^2` in the step-size
//! regimes of interest). Non-convergence is a first-class error; callers
//! retry with a smaller step.
//!
//! [`Stepper::lawson_step`] integrates the transformed variable
//! `u = exp(i L t) psi` with the same tableau using only the public operator
//! and slope routines; the two routes are algebraically identical, which the
//! test suite exercises as an oracle.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::ComplexField;
use crate::kernels;
use crate::sav::{SavState, SavSystem};
use crate::tableau::Tableau;

/// Fixed-point solver controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Relative tolerance on the stage updates (mixed max-norm metric).
    pub tol: f64,
    /// Sweep limit before reporting non-convergence.
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iters: 200,
        }
    }
}

/// Converged stage data of one step.
pub struct StageSet {
    pub psi: Vec<ComplexField>,
    pub q: Vec<f64>,
    pub slope_k: Vec<ComplexField>,
    pub slope_l: Vec<f64>,
    pub sweeps: usize,
    pub residual: f64,
}

/// Convergence report of one step.
#[derive(Clone, Copy, Debug)]
pub struct StepReport {
    pub sweeps: usize,
    pub residual: f64,
}

pub struct Stepper {
    system: Arc<SavSystem>,
    tableau: Tableau,
    tau: f64,
    solver: SolverConfig,
    /// `exp(-i lambda c_i tau)` per stage.
    free_tables: Vec<Vec<Complex64>>,
    /// `exp(i lambda (c_j - c_i) tau)`; `None` on the diagonal (identity).
    cross_tables: Vec<Vec<Option<Vec<Complex64>>>>,
    /// `exp(-i lambda (1 - c_i) tau)` per stage.
    output_tables: Vec<Vec<Complex64>>,
    /// `exp(-i lambda tau)`.
    full_table: Vec<Complex64>,
}

/// Solver-internal view of a converged step: stages and slopes in both
/// physical and spectral form.
struct Solved {
    psi_hat: Vec<Complex64>,
    stage_phys: Vec<Vec<Complex64>>,
    stage_q: Vec<f64>,
    k_hat: Vec<Vec<Complex64>>,
    k_phys: Vec<Vec<Complex64>>,
    l: Vec<f64>,
    sweeps: usize,
    residual: f64,
}

impl Stepper {
    pub fn new(
        system: Arc<SavSystem>,
        tableau: Tableau,
        tau: f64,
        solver: SolverConfig,
    ) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParams(format!(
                "time step {tau} must be positive"
            )));
        }
        if !(solver.tol.is_finite() && solver.tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "solver tolerance {} must be positive",
                solver.tol
            )));
        }
        if solver.max_iters == 0 {
            return Err(Error::InvalidParams(
                "solver needs at least one sweep".into(),
            ));
        }

        let sym = system.symbol();
        let c = tableau.c();
        let s = tableau.stages();
        let free_tables = (0..s).map(|i| sym.phase_table(-c[i] * tau)).collect();
        let cross_tables = (0..s)
            .map(|i| {
                (0..s)
                    .map(|j| {
                        if i == j {
                            None
                        } else {
                            Some(sym.phase_table((c[j] - c[i]) * tau))
                        }
                    })
                    .collect()
            })
            .collect();
        let output_tables = (0..s)
            .map(|i| sym.phase_table(-(1.0 - c[i]) * tau))
            .collect();
        let full_table = sym.phase_table(-tau);

        Ok(Self {
            system,
            tableau,
            tau,
            solver,
            free_tables,
            cross_tables,
            output_tables,
            full_table,
        })
    }

    pub fn system(&self) -> &Arc<SavSystem> {
        &self.system
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    fn check_state(&self, state: &SavState) -> Result<()> {
        if state.psi.grid().len() != self.system.grid().len()
            || state.psi.grid().nodes() != self.system.grid().nodes()
        {
            return Err(Error::GridMismatch(
                "state grid does not match the stepper's system".into(),
            ));
        }
        Ok(())
    }

    /// Advances the state by one step of size `tau`.
    pub fn step(&self, state: &SavState) -> Result<SavState> {
        self.step_detailed(state).map(|(next, _)| next)
    }

    /// Advances the state and reports the sweep count and final residual of
    /// the stage solve.
    pub fn step_detailed(&self, state: &SavState) -> Result<(SavState, StepReport)> {
        self.check_state(state)?;
        let solved = self.solve_internal(state)?;
        let grid = self.system.grid();
        let s = self.tableau.stages();
        let b = self.tableau.b();

        // psi_{n+1} = exp(-i L tau) psi_n + tau sum_i b_i exp(-i L (1-c_i) tau) k_i
        let mut out_hat = vec![Complex64::default(); grid.len()];
        kernels::mul_table_into(&mut out_hat, &solved.psi_hat, &self.full_table);
        for i in 0..s {
            kernels::axpy_table(
                &mut out_hat,
                Complex64::new(self.tau * b[i], 0.0),
                &self.output_tables[i],
                &solved.k_hat[i],
            );
        }
        grid.fft_inverse(&mut out_hat);
        let psi = ComplexField::from_values(grid, out_hat)?;

        let q = state.q + self.tau * (0..s).map(|i| b[i] * solved.l[i]).sum::<f64>();

        Ok((
            SavState {
                psi,
                q,
                time: state.time + self.tau,
            },
            StepReport {
                sweeps: solved.sweeps,
                residual: solved.residual,
            },
        ))
    }

    /// Solves the implicit stage system and returns the converged stages and
    /// slopes. The residual is the mixed metric
    /// `max_i max(|dPsi_i|_inf / (1 + |Psi_i|_inf), |dQ_i| / (1 + |Q_i|))`.
    pub fn solve_stages(&self, state: &SavState) -> Result<StageSet> {
        self.check_state(state)?;
        let solved = self.solve_internal(state)?;
        let grid = self.system.grid();
        let psi = solved
            .stage_phys
            .into_iter()
            .map(|v| ComplexField::from_values(grid, v))
            .collect::<Result<Vec<_>>>()?;
        let slope_k = solved
            .k_phys
            .into_iter()
            .map(|v| ComplexField::from_values(grid, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(StageSet {
            psi,
            q: solved.stage_q,
            slope_k,
            slope_l: solved.l,
            sweeps: solved.sweeps,
            residual: solved.residual,
        })
    }

    /// Evaluates both slopes at stage `i`, writing the field slope into
    /// `k_phys`/`k_hat` and returning the scalar slope. `stage_hat` must be
    /// the spectral form of `stage_phys`.
    #[allow(clippy::too_many_arguments)]
    fn eval_slopes(
        &self,
        stage_hat: &[Complex64],
        stage_phys: &[Complex64],
        q: f64,
        cubic: &mut [Complex64],
        lop: &mut Vec<Complex64>,
        k_phys: &mut [Complex64],
        k_hat: &mut Vec<Complex64>,
    ) -> f64 {
        let grid = self.system.grid();
        let params = self.system.params();
        let eigenvalues = self.system.symbol().eigenvalues();

        let quartic_sum = kernels::cubic_with_abs4(stage_phys, cubic);
        let den = (grid.quad_weight() * quartic_sum + params.c0()).sqrt();

        // L Psi_i from the spectral stage representation.
        kernels::mul_real_table_into(lop, stage_hat, eigenvalues);
        grid.fft_inverse(lop);

        // l_i = 2 Re(-i L Psi, cubic) / den = 2 Im(L Psi, cubic) / den.
        let bracket = grid.quad_weight() * kernels::dot_conj(lop, cubic);
        let l = 2.0 * bracket.im / den;

        // k_i = -i beta Q_i cubic / den.
        let coef = Complex64::new(0.0, -params.beta() * q / den);
        kernels::scale_into(k_phys, cubic, coef);
        k_hat.clear();
        k_hat.extend_from_slice(k_phys);
        grid.fft_forward(k_hat);

        l
    }

    fn solve_internal(&self, state: &SavState) -> Result<Solved> {
        let grid = self.system.grid();
        let n = grid.len();
        let s = self.tableau.stages();
        let a = self.tableau.a();
        let tau = self.tau;
        let q_n = state.q;

        let mut psi_hat = state.psi.values().to_vec();
        grid.fft_forward(&mut psi_hat);

        // Free-flight initial guess: Psi_i = exp(-i L c_i tau) psi_n, Q_i = q_n.
        let mut stage_hat: Vec<Vec<Complex64>> = (0..s)
            .map(|i| {
                let mut h = vec![Complex64::default(); n];
                kernels::mul_table_into(&mut h, &psi_hat, &self.free_tables[i]);
                h
            })
            .collect();
        let mut stage_phys: Vec<Vec<Complex64>> = stage_hat
            .iter()
            .map(|h| {
                let mut p = h.clone();
                grid.fft_inverse(&mut p);
                p
            })
            .collect();
        let mut stage_q = vec![q_n; s];

        let mut k_hat: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n); s];
        let mut k_phys: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n]; s];
        let mut l = vec![0.0; s];

        let mut cubic = vec![Complex64::default(); n];
        let mut lop = vec![Complex64::default(); n];
        let mut scratch_hat = vec![Complex64::default(); n];
        let mut scratch_phys = vec![Complex64::default(); n];

        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut sweeps = 0;

        while sweeps < self.solver.max_iters {
            sweeps += 1;

            for i in 0..s {
                l[i] = self.eval_slopes(
                    &stage_hat[i],
                    &stage_phys[i],
                    stage_q[i],
                    &mut cubic,
                    &mut lop,
                    &mut k_phys[i],
                    &mut k_hat[i],
                );
            }

            residual = 0.0;
            for i in 0..s {
                kernels::mul_table_into(&mut scratch_hat, &psi_hat, &self.free_tables[i]);
                for j in 0..s {
                    let coef = Complex64::new(tau * a[i][j], 0.0);
                    if coef.re == 0.0 {
                        continue;
                    }
                    match &self.cross_tables[i][j] {
                        Some(table) => {
                            kernels::axpy_table(&mut scratch_hat, coef, table, &k_hat[j])
                        }
                        None => kernels::axpy(&mut scratch_hat, coef, &k_hat[j]),
                    }
                }
                scratch_phys.copy_from_slice(&scratch_hat);
                grid.fft_inverse(&mut scratch_phys);

                let q_new = q_n + tau * (0..s).map(|j| a[i][j] * l[j]).sum::<f64>();

                let dpsi = kernels::max_abs_diff(&scratch_phys, &stage_phys[i])
                    / (1.0 + kernels::max_abs(&scratch_phys));
                let dq = (q_new - stage_q[i]).abs() / (1.0 + q_new.abs());
                residual = nan_max(residual, nan_max(dpsi, dq));

                std::mem::swap(&mut stage_hat[i], &mut scratch_hat);
                std::mem::swap(&mut stage_phys[i], &mut scratch_phys);
                stage_q[i] = q_new;
            }

            if residual <= self.solver.tol {
                converged = true;
                break;
            }
        }

        if !converged {
            return Err(Error::NonConvergence {
                iterations: sweeps,
                residual,
            });
        }

        // Re-evaluate the slopes at the converged stage values so the update
        // uses slope data consistent with the stages to machine precision.
        for i in 0..s {
            l[i] = self.eval_slopes(
                &stage_hat[i],
                &stage_phys[i],
                stage_q[i],
                &mut cubic,
                &mut lop,
                &mut k_phys[i],
                &mut k_hat[i],
            );
        }

        Ok(Solved {
            psi_hat,
            stage_phys,
            stage_q,
            k_hat,
            k_phys,
            l,
            sweeps,
            residual,
        })
    }

    /// Reference step in the transformed variable `u = exp(i L t) psi`.
    ///
    /// Applies the same tableau to the `u`-system using only the public
    /// propagator and slope routines, then maps back through
    /// `psi = exp(-i L (t_n + tau)) u`. Algebraically identical to [`step`];
    /// needs the absolute time `t_n` because the transform does.
    ///
    /// [`step`]: Self::step
    pub fn lawson_step(&self, state: &SavState, t_n: f64) -> Result<SavState> {
        self.check_state(state)?;
        let sys = &self.system;
        let sym = sys.symbol();
        let s = self.tableau.stages();
        let (a, b, c) = (self.tableau.a(), self.tableau.b(), self.tableau.c());
        let tau = self.tau;

        let u_n = sym.propagate(&state.psi, t_n)?;
        let mut stage_u: Vec<ComplexField> = vec![u_n.clone(); s];
        let mut stage_q = vec![state.q; s];
        let mut k_tilde: Vec<ComplexField> = vec![ComplexField::zeros(sys.grid()); s];
        let mut l = vec![0.0; s];

        let eval = |stage_u: &[ComplexField],
                    stage_q: &[f64],
                    k_tilde: &mut [ComplexField],
                    l: &mut [f64]|
         -> Result<()> {
            for i in 0..s {
                let t_i = t_n + c[i] * tau;
                let psi_i = sym.propagate(&stage_u[i], -t_i)?;
                let (k_i, l_i) = sys.slopes(&psi_i, stage_q[i]);
                k_tilde[i] = sym.propagate(&k_i, t_i)?;
                l[i] = l_i;
            }
            Ok(())
        };

        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut sweeps = 0;
        while sweeps < self.solver.max_iters {
            sweeps += 1;
            eval(&stage_u, &stage_q, &mut k_tilde, &mut l)?;

            residual = 0.0;
            for i in 0..s {
                let mut u_new = u_n.clone();
                for j in 0..s {
                    if a[i][j] != 0.0 {
                        u_new.add_scaled(Complex64::new(tau * a[i][j], 0.0), &k_tilde[j])?;
                    }
                }
                let q_new = state.q + tau * (0..s).map(|j| a[i][j] * l[j]).sum::<f64>();

                let dpsi = u_new.linf_diff(&stage_u[i])? / (1.0 + u_new.norm_linf());
                let dq = (q_new - stage_q[i]).abs() / (1.0 + q_new.abs());
                residual = nan_max(residual, nan_max(dpsi, dq));

                stage_u[i] = u_new;
                stage_q[i] = q_new;
            }

            if residual <= self.solver.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations: sweeps,
                residual,
            });
        }

        eval(&stage_u, &stage_q, &mut k_tilde, &mut l)?;

        let mut u_next = u_n;
        for i in 0..s {
            u_next.add_scaled(Complex64::new(tau * b[i], 0.0), &k_tilde[i])?;
        }
        let psi = sym.propagate(&u_next, -(t_n + tau))?;
        let q = state.q + tau * (0..s).map(|i| b[i] * l[i]).sum::<f64>();
        Ok(SavState {
            psi,
            q,
            time: state.time + tau,
        })
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else if a > b {
        a
    } else {
        b
    }
}
