use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use esav_core::Tableau;
use esav_harness::{runner, RunConfig};

#[derive(Parser)]
#[command(
    name = "esav",
    about = "Mass- and energy-preserving exponential SAV Runge-Kutta solver \
             for the cubic NLS equation on periodic boxes",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate once and write invariants.csv (+ final_error.txt when the
    /// exact solution is known).
    Run(CommonArgs),
    /// Temporal convergence study over a ladder of step sizes; writes
    /// convergence.csv and a plot script.
    Converge(ConvergeArgs),
    /// Long-run invariant study; writes invariants.csv and a plot script.
    Conserve(CommonArgs),
    /// Print the Gauss tableaus and their symplectic-condition defects.
    CheckTableau {
        /// Check a single stage count instead of all of them.
        #[arg(long)]
        stages: Option<usize>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Descending comma-separated step-size ladder, e.g. 0.03,0.02,0.015,0.01
    #[arg(long, value_delimiter = ',', required = true)]
    taus: Vec<f64>,
}

/// Per-key command-line overrides; each maps onto the config key of the
/// same name.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    stages: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// plane_wave | perturbed_plane_wave | file:PATH
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    k1: Option<i64>,
    #[arg(long)]
    k2: Option<i64>,
    #[arg(long)]
    k3: Option<i64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    outdir: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let o = &self.overrides;
        if let Some(v) = o.dims {
            cfg.dims = v;
        }
        if let Some(v) = &o.lengths {
            cfg.lengths = v.clone();
        }
        if let Some(v) = &o.nodes {
            cfg.nodes = v.clone();
        }
        if let Some(v) = o.beta {
            cfg.beta = v;
        }
        if let Some(v) = o.c0 {
            cfg.c0 = v;
        }
        if let Some(v) = o.stages {
            cfg.stages = v;
        }
        if let Some(v) = o.tau {
            cfg.tau = v;
        }
        if let Some(v) = o.t_final {
            cfg.t_final = v;
        }
        if let Some(v) = &o.ic {
            cfg.set("ic", v).context("parsing --ic")?;
        }
        if let Some(v) = o.k1 {
            cfg.wave[0] = v;
        }
        if let Some(v) = o.k2 {
            cfg.wave[1] = v;
        }
        if let Some(v) = o.k3 {
            cfg.wave[2] = v;
        }
        if let Some(v) = o.tol {
            cfg.tol = v;
        }
        if let Some(v) = o.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = o.stride {
            cfg.stride = v;
        }
        if let Some(v) = &o.outdir {
            cfg.outdir = v.clone();
        }
        Ok(cfg)
    }
}

fn print_tableau(s: usize) -> Result<()> {
    let t = Tableau::gauss(s)?;
    println!("{} ({} stages, order {})", t.name(), t.stages(), 2 * s);
    println!("  c = {:?}", t.c());
    println!("  b = {:?}", t.b());
    for row in t.a() {
        println!("  A | {row:?}");
    }
    println!("  row-sum defect      = {:.3e}", t.row_sum_defect());
    println!("  weight-sum defect   = {:.3e}", t.weight_defect());
    println!("  symplectic defect   = {:.3e}", t.symplectic_defect());
    let ok = t.row_sum_defect() <= 1e-14
        && t.weight_defect() <= 1e-14
        && t.symplectic_defect() <= 1e-14;
    println!("  {}", if ok { "PASS" } else { "FAIL" });
    anyhow::ensure!(ok, "tableau defects exceed 1e-14");
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(args) => {
            let cfg = args.resolve()?;
            let outcome = runner::run_single(&cfg)?;
            println!(
                "{} steps to t = {} ({} tableau stages), worst stage solve {} sweeps",
                outcome.steps,
                outcome.state.time,
                cfg.stages,
                outcome.max_sweeps
            );
            println!(
                "max relative drift: mass {:.3e}, modified energy {:.3e}, Hamiltonian {:.3e}",
                outcome.series.max_rel_mass(),
                outcome.series.max_rel_energy(),
                outcome.series.max_rel_hamiltonian()
            );
            if let Some(err) = outcome.linf_error {
                println!("final max-norm error vs exact solution: {err:.6e}");
            }
            println!("wrote {}", cfg.outdir.join("invariants.csv").display());
        }
        Cmd::Converge(args) => {
            let cfg = args.common.resolve()?;
            let rows = runner::run_convergence(&cfg, &args.taus)?;
            println!("{:>12} {:>14} {:>8}", "tau", "linf_error", "rate");
            for row in &rows {
                match row.rate {
                    Some(r) => println!("{:>12.6} {:>14.6e} {:>8.3}", row.tau, row.linf_error, r),
                    None => println!("{:>12.6} {:>14.6e} {:>8}", row.tau, row.linf_error, "*"),
                }
            }
            println!("wrote {}", cfg.outdir.join("convergence.csv").display());
        }
        Cmd::Conserve(args) => {
            let cfg = args.resolve()?;
            let outcome = runner::run_conservation(&cfg)?;
            println!(
                "{} steps to t = {}: max RM {:.3e}, max RE {:.3e}, max RH {:.3e}",
                outcome.steps,
                outcome.state.time,
                outcome.series.max_rel_mass(),
                outcome.series.max_rel_energy(),
                outcome.series.max_rel_hamiltonian()
            );
            println!("wrote {}", cfg.outdir.join("invariants.csv").display());
        }
        Cmd::CheckTableau { stages } => match stages {
            Some(s) => print_tableau(s)?,
            None => {
                for s in 1..=3 {
                    print_tableau(s)?;
                }
                let euler = Tableau::explicit_euler();
                println!(
                    "{}: symplectic defect = {:.3e} (negative control, expected 1)",
                    euler.name(),
                    euler.symplectic_defect()
                );
            }
        },
    }
    Ok(())
}
