//! Flat key-value run configuration with command-line overrides.
//!
//! The file format is one `key = value` pair per line; `#` starts a comment.
//! Multi-valued keys (`lengths`, `nodes`) take comma-separated entries.
//! Floats are printed with Rust's shortest round-trip formatting, so
//! `parse(serialize(cfg)) == cfg` holds exactly.

use anyhow::{anyhow, bail, Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Initial-condition selector.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// Progressive plane wave with the configured integer wave indices and
    /// the dispersion frequency `|k|^2 / 2 + beta`; the exact solution is
    /// known, so runs report a final max-norm error.
    PlaneWave,
    /// The same plane wave with a small real modulation
    /// `1 + 0.1 sum_a cos(2 pi x_a / l_a)`. Multi-mode data without an
    /// analytic solution; used for invariant studies where a single Fourier
    /// mode would be degenerate.
    PerturbedPlaneWave,
    /// Complex samples loaded from a CSV file of `re,im` rows in row-major
    /// node order.
    File(PathBuf),
}

impl InitialCondition {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "plane_wave" => Ok(Self::PlaneWave),
            "perturbed_plane_wave" => Ok(Self::PerturbedPlaneWave),
            other => match other.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Self::File(PathBuf::from(path))),
                _ => bail!(
                    "unknown initial condition '{other}' \
                     (expected plane_wave, perturbed_plane_wave or file:PATH)"
                ),
            },
        }
    }
}

impl std::fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PlaneWave => write!(f, "plane_wave"),
            Self::PerturbedPlaneWave => write!(f, "perturbed_plane_wave"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dims: usize,
    pub lengths: Vec<f64>,
    pub nodes: Vec<usize>,
    pub beta: f64,
    pub c0: f64,
    pub stages: usize,
    pub tau: f64,
    pub t_final: f64,
    pub ic: InitialCondition,
    pub wave: [i64; 3],
    pub tol: f64,
    pub max_iters: usize,
    pub stride: usize,
    pub outdir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        Self {
            dims: 2,
            lengths: vec![two_pi, two_pi],
            nodes: vec![16, 16],
            beta: 5.0,
            c0: 1.0,
            stages: 2,
            tau: 0.01,
            t_final: 1.0,
            ic: InitialCondition::PlaneWave,
            wave: [1, 1, 1],
            tol: 1e-13,
            max_iters: 200,
            stride: 1,
            outdir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", lineno + 1))?;
            cfg.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| anyhow!("key '{key}': cannot parse '{value}': {e}"))
        }
        fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
        where
            T::Err: std::fmt::Display,
        {
            value.split(',').map(|v| num(key, v.trim())).collect()
        }

        match key {
            "dims" => self.dims = num(key, value)?,
            "lengths" => self.lengths = list(key, value)?,
            "nodes" => self.nodes = list(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "c0" => self.c0 = num(key, value)?,
            "stages" => self.stages = num(key, value)?,
            "tau" => self.tau = num(key, value)?,
            "t_final" => self.t_final = num(key, value)?,
            "ic" => self.ic = InitialCondition::parse(value)?,
            "k1" => self.wave[0] = num(key, value)?,
            "k2" => self.wave[1] = num(key, value)?,
            "k3" => self.wave[2] = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "max_iters" => self.max_iters = num(key, value)?,
            "stride" => self.stride = num(key, value)?,
            "outdir" => self.outdir = PathBuf::from(value),
            other => bail!("unknown config key '{other}'"),
        }
        Ok(())
    }

    /// Serializes to the file format; `parse` of the result reproduces the
    /// config exactly.
    pub fn serialize(&self) -> String {
        let join_f64 = |xs: &[f64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let join_usize = |xs: &[usize]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let _ = writeln!(out, "dims = {}", self.dims);
        let _ = writeln!(out, "lengths = {}", join_f64(&self.lengths));
        let _ = writeln!(out, "nodes = {}", join_usize(&self.nodes));
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "c0 = {}", self.c0);
        let _ = writeln!(out, "stages = {}", self.stages);
        let _ = writeln!(out, "tau = {}", self.tau);
        let _ = writeln!(out, "t_final = {}", self.t_final);
        let _ = writeln!(out, "ic = {}", self.ic);
        let _ = writeln!(out, "k1 = {}", self.wave[0]);
        let _ = writeln!(out, "k2 = {}", self.wave[1]);
        let _ = writeln!(out, "k3 = {}", self.wave[2]);
        let _ = writeln!(out, "tol = {}", self.tol);
        let _ = writeln!(out, "max_iters = {}", self.max_iters);
        let _ = writeln!(out, "stride = {}", self.stride);
        let _ = writeln!(out, "outdir = {}", self.outdir.display());
        out
    }

    /// Checks cross-field consistency (axis counts, positive steps, sane
    /// stride) before a run.
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dims) {
            bail!("dims = {} (only 2 and 3 supported)", self.dims);
        }
        if self.lengths.len() != self.dims {
            bail!(
                "{} lengths given for dims = {}",
                self.lengths.len(),
                self.dims
            );
        }
        if self.nodes.len() != self.dims {
            bail!("{} node counts given for dims = {}", self.nodes.len(), self.dims);
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            bail!("tau = {} must be positive", self.tau);
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            bail!("t_final = {} must be positive", self.t_final);
        }
        if self.stride == 0 {
            bail!("stride must be at least 1");
        }
        Ok(())
    }

    /// Number of steps covering `[0, t_final]`. Accepts `t_final / tau`
    /// within a tiny relative window of an integer (decimal literals are not
    /// exactly representable); otherwise truncates to the last full step and
    /// reports it.
    pub fn step_count(&self) -> Result<StepCount> {
        let ratio = self.t_final / self.tau;
        let nearest = ratio.round();
        if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            Ok(StepCount {
                steps: nearest as usize,
                truncated: false,
            })
        } else {
            let steps = ratio.floor().max(1.0) as usize;
            Ok(StepCount {
                steps,
                truncated: true,
            })
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepCount {
    pub steps: usize,
    /// True when `t_final` is not an integer multiple of `tau`; the run then
    /// covers `steps * tau` instead.
    pub truncated: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        let mut cfg = RunConfig::default();
        cfg.dims = 3;
        cfg.lengths = vec![2.0 * std::f64::consts::PI; 3];
        cfg.nodes = vec![32, 32, 32];
        cfg.beta = 6.5;
        cfg.tau = 0.0125;
        cfg.t_final = 9.0;
        cfg.ic = InitialCondition::PerturbedPlaneWave;
        cfg.wave = [1, -2, 1];
        cfg.tol = 3.5e-14;
        cfg.outdir = PathBuf::from("results/run_a");

        let text = cfg.serialize();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn parses_comments_and_overrides() {
        let text = "# smoke run\nbeta = 7 # strong coupling\n\nnodes = 32, 32\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.beta, 7.0);
        assert_eq!(cfg.nodes, vec![32, 32]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse("betta = 7\n").is_err());
        assert!(RunConfig::parse("beta seven\n").is_err());
        assert!(RunConfig::parse("beta = seven\n").is_err());
        assert!(RunConfig::parse("ic = cosine\n").is_err());
    }

    #[test]
    fn file_ic_round_trips() {
        let cfg = RunConfig::parse("ic = file:samples/init.csv\n").unwrap();
        assert_eq!(
            cfg.ic,
            InitialCondition::File(PathBuf::from("samples/init.csv"))
        );
        let again = RunConfig::parse(&cfg.serialize()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn validation_checks_axis_counts() {
        let mut cfg = RunConfig::default();
        cfg.dims = 3;
        assert!(cfg.validate().is_err());
        cfg.lengths.push(1.0);
        cfg.nodes.push(8);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn step_count_accepts_near_integer_ratios() {
        let mut cfg = RunConfig::default();
        cfg.t_final = 9.0;
        cfg.tau = 0.03; // 9 / 0.03 is not exact in binary, still 300 steps
        let sc = cfg.step_count().unwrap();
        assert_eq!(sc.steps, 300);
        assert!(!sc.truncated);

        cfg.tau = 0.007;
        let sc = cfg.step_count().unwrap();
        assert!(sc.truncated);
        assert_eq!(sc.steps, 1285); // floor(9 / 0.007)
    }
}
