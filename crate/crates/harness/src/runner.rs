//! The three experiment modes: single run, convergence ladder, conservation
//! study. Simulation is separated from file output so tests can drive the
//! numerics directly.

use anyhow::{bail, Context, Result};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use esav_core::diagnostics::{convergence_rates, linf_error, InvariantSeries};
use esav_core::{
    Complex64, ComplexField, ModelParams, PeriodicGrid, SavState, SavSystem, SolverConfig, Stepper,
    Tableau,
};

use crate::config::{InitialCondition, RunConfig};
use crate::plots;
use crate::wave::{perturbed_plane_wave, plane_wave, PlaneWaveSpec};

/// Errors below this are considered roundoff-dominated; rate entries whose
/// pair touches the floor are flagged instead of reported.
pub const ERROR_FLOOR: f64 = 1e-12;

pub struct SimOutcome {
    pub state: SavState,
    pub series: InvariantSeries,
    /// Final max-norm error against the exact solution, when one is known.
    pub linf_error: Option<f64>,
    pub steps: usize,
    pub truncated: bool,
    /// Worst fixed-point sweep count over the whole run.
    pub max_sweeps: usize,
}

pub fn build_grid(cfg: &RunConfig) -> Result<Arc<PeriodicGrid>> {
    Ok(PeriodicGrid::new(&cfg.lengths, &cfg.nodes)?)
}

pub fn build_system(cfg: &RunConfig) -> Result<Arc<SavSystem>> {
    let grid = build_grid(cfg)?;
    let params = ModelParams::new(cfg.beta, cfg.c0)?;
    Ok(Arc::new(SavSystem::new(&grid, params)))
}

fn wave_spec(cfg: &RunConfig) -> PlaneWaveSpec {
    PlaneWaveSpec::new(&cfg.wave[..cfg.dims], &cfg.lengths, cfg.beta)
}

/// Loads a complex field from a CSV of `re,im` rows in row-major node order.
fn load_field(grid: &Arc<PeriodicGrid>, path: &Path) -> Result<ComplexField> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading initial condition {}", path.display()))?;
    let mut values = Vec::with_capacity(grid.len());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .with_context(|| format!("line {}: expected 're,im'", lineno + 1))?;
        values.push(Complex64::new(
            re.trim().parse().with_context(|| format!("line {}", lineno + 1))?,
            im.trim().parse().with_context(|| format!("line {}", lineno + 1))?,
        ));
    }
    Ok(ComplexField::from_values(grid, values)?)
}

/// Initial field per the config; the returned spec is present when the exact
/// solution is known at later times.
pub fn initial_field(
    cfg: &RunConfig,
    grid: &Arc<PeriodicGrid>,
) -> Result<(ComplexField, Option<PlaneWaveSpec>)> {
    match &cfg.ic {
        InitialCondition::PlaneWave => {
            let spec = wave_spec(cfg);
            let field = plane_wave(grid, &spec, 0.0)?;
            Ok((field, Some(spec)))
        }
        InitialCondition::PerturbedPlaneWave => {
            let spec = wave_spec(cfg);
            Ok((perturbed_plane_wave(grid, &spec)?, None))
        }
        InitialCondition::File(path) => Ok((load_field(grid, path)?, None)),
    }
}

/// Integrates the configured problem to `t_final`, recording invariants
/// every `stride` steps (plus the initial and final states).
pub fn simulate(cfg: &RunConfig) -> Result<SimOutcome> {
    cfg.validate()?;
    let sc = cfg.step_count()?;
    if sc.truncated {
        eprintln!(
            "warning: t_final = {} is not an integer multiple of tau = {}; \
             running {} steps to t = {}",
            cfg.t_final,
            cfg.tau,
            sc.steps,
            sc.steps as f64 * cfg.tau
        );
    }

    let system = build_system(cfg)?;
    let (psi0, spec) = initial_field(cfg, system.grid())?;
    let stepper = Stepper::new(
        system.clone(),
        Tableau::gauss(cfg.stages)?,
        cfg.tau,
        SolverConfig {
            tol: cfg.tol,
            max_iters: cfg.max_iters,
        },
    )?;

    let mut state = system.initial_state(psi0);
    let mut series = InvariantSeries::new();
    series.record(&system, &state);

    let mut max_sweeps = 0;
    for n in 0..sc.steps {
        let (mut next, report) = stepper
            .step_detailed(&state)
            .with_context(|| format!("step {} (t = {})", n + 1, state.time))?;
        // Absolute time as n * tau, not accumulated addition.
        next.time = (n + 1) as f64 * cfg.tau;
        max_sweeps = max_sweeps.max(report.sweeps);
        state = next;
        if (n + 1) % cfg.stride == 0 || n + 1 == sc.steps {
            series.record(&system, &state);
        }
    }

    let linf = match spec {
        Some(spec) => {
            let exact = plane_wave(system.grid(), &spec, state.time)?;
            Some(linf_error(&state.psi, &exact)?)
        }
        None => None,
    };

    Ok(SimOutcome {
        state,
        series,
        linf_error: linf,
        steps: sc.steps,
        truncated: sc.truncated,
        max_sweeps,
    })
}

/// Full double precision: 17 significant digits.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_invariants_csv(path: &Path, series: &InvariantSeries) -> Result<()> {
    let mut out = String::from("t,M,E,H,RM,RE,RH\n");
    for i in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(series.times()[i]),
            fmt(series.mass()[i]),
            fmt(series.modified_energy()[i]),
            fmt(series.hamiltonian()[i]),
            fmt(series.rel_mass()[i]),
            fmt(series.rel_energy()[i]),
            fmt(series.rel_hamiltonian()[i]),
        ));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Runs the configured problem once and writes `invariants.csv` plus, when
/// the exact solution is known, `final_error.txt`.
pub fn run_single(cfg: &RunConfig) -> Result<SimOutcome> {
    let outcome = simulate(cfg)?;
    fs::create_dir_all(&cfg.outdir)
        .with_context(|| format!("creating {}", cfg.outdir.display()))?;
    write_invariants_csv(&cfg.outdir.join("invariants.csv"), &outcome.series)?;
    if let Some(err) = outcome.linf_error {
        fs::write(cfg.outdir.join("final_error.txt"), format!("{}\n", fmt(err)))
            .context("writing final_error.txt")?;
    }
    Ok(outcome)
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub linf_error: f64,
    /// `None` for the first ladder entry and for pairs touching the
    /// roundoff floor.
    pub rate: Option<f64>,
}

/// Runs the ladder (sorted descending) and tabulates errors and rates.
/// Requires a plane-wave initial condition since the error needs the exact
/// solution. Ladder entries are independent runs; with the `parallel`
/// feature they execute concurrently.
pub fn convergence_table(cfg: &RunConfig, tau_ladder: &[f64]) -> Result<Vec<ConvergenceRow>> {
    if tau_ladder.len() < 2 {
        bail!("convergence study needs at least two tau values");
    }
    if tau_ladder.windows(2).any(|w| w[0] <= w[1]) {
        bail!("tau ladder must be sorted in descending order");
    }
    if cfg.ic != InitialCondition::PlaneWave {
        bail!("convergence study needs ic = plane_wave (exact solution required)");
    }

    let run_one = |&tau: &f64| -> Result<f64> {
        let mut entry = cfg.clone();
        entry.tau = tau;
        let outcome = simulate(&entry).with_context(|| format!("tau = {tau}"))?;
        outcome
            .linf_error
            .context("plane-wave run did not produce an error")
    };

    #[cfg(feature = "parallel")]
    let errors: Vec<f64> = {
        use rayon::prelude::*;
        tau_ladder.par_iter().map(run_one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let errors: Vec<f64> = tau_ladder.iter().map(run_one).collect::<Result<_>>()?;

    let rates = convergence_rates(&errors, tau_ladder)?;
    Ok(tau_ladder
        .iter()
        .zip(&errors)
        .zip(&rates)
        .enumerate()
        .map(|(j, ((&tau, &err), &rate))| {
            let floored =
                j > 0 && (errors[j - 1] <= ERROR_FLOOR || errors[j] <= ERROR_FLOOR);
            ConvergenceRow {
                tau,
                linf_error: err,
                rate: if floored { None } else { rate },
            }
        })
        .collect())
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut out = String::from("tau,linf_error,rate\n");
    for row in rows {
        let rate = match row.rate {
            Some(r) => fmt(r),
            None => "*".to_string(),
        };
        out.push_str(&format!("{},{},{rate}\n", fmt(row.tau), fmt(row.linf_error)));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Convergence study with CSV and plot-script output.
pub fn run_convergence(cfg: &RunConfig, tau_ladder: &[f64]) -> Result<Vec<ConvergenceRow>> {
    let rows = convergence_table(cfg, tau_ladder)?;
    fs::create_dir_all(&cfg.outdir)
        .with_context(|| format!("creating {}", cfg.outdir.display()))?;
    write_convergence_csv(&cfg.outdir.join("convergence.csv"), &rows)?;
    fs::write(
        cfg.outdir.join("plot_convergence.py"),
        plots::convergence_script(2 * cfg.stages),
    )
    .context("writing plot_convergence.py")?;
    Ok(rows)
}

/// Long-run invariant study: integrates to `t_final`, writes the invariant
/// series and a plot script for the relative drifts.
pub fn run_conservation(cfg: &RunConfig) -> Result<SimOutcome> {
    let outcome = simulate(cfg)?;
    fs::create_dir_all(&cfg.outdir)
        .with_context(|| format!("creating {}", cfg.outdir.display()))?;
    write_invariants_csv(&cfg.outdir.join("invariants.csv"), &outcome.series)?;
    fs::write(
        cfg.outdir.join("plot_invariants.py"),
        plots::invariants_script(),
    )
    .context("writing plot_invariants.py")?;
    Ok(outcome)
}
