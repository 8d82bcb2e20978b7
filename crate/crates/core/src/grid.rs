//! Periodic tensor-product grids, complex grid functions and the
//! FFT-diagonalized linear operators built on them.
//!
//! The grid stores one wavenumber table per axis in FFT bin order: bin `j`
//! carries the integer mode `m = j` for `j < N/2` and `m = j - N` otherwise,
//! so `k_m = 2 pi m / l` with `m in {-N/2, ..., N/2 - 1}`. The discrete inner
//! product is the trapezoidal rule on the periodic box,
//! `(f, g) = prod(l_a / N_a) * sum f conj(g)`, which keeps the discrete
//! integration-by-parts identities exact for the spectral operators below.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fft::FftPlans;
use crate::kernels;

/// Uniform periodic grid on a 2-D or 3-D box `[0, l_1) x ... x [0, l_d)`.
pub struct PeriodicGrid {
    lengths: Vec<f64>,
    nodes: Vec<usize>,
    wavenumbers: Vec<Vec<f64>>,
    quad_weight: f64,
    plans: FftPlans,
}

impl PeriodicGrid {
    /// Builds a grid with the given per-axis box lengths and node counts.
    ///
    /// Node counts must be even and at least 4 (FFT bins pair `+m` with `-m`
    /// apart from the lone Nyquist mode); lengths must be positive; only 2-D
    /// and 3-D boxes are supported.
    pub fn new(lengths: &[f64], nodes: &[usize]) -> Result<Arc<Self>> {
        let dims = lengths.len();
        if !(2..=3).contains(&dims) {
            return Err(Error::InvalidGrid(format!(
                "expected 2 or 3 axes, got {dims}"
            )));
        }
        if nodes.len() != dims {
            return Err(Error::InvalidGrid(format!(
                "{} lengths but {} node counts",
                dims,
                nodes.len()
            )));
        }
        for (a, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "length {l} along axis {a} must be positive"
                )));
            }
        }
        for (a, &n) in nodes.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "node count {n} along axis {a} must be even and >= 4"
                )));
            }
        }

        let wavenumbers = lengths
            .iter()
            .zip(nodes)
            .map(|(&l, &n)| {
                let scale = 2.0 * std::f64::consts::PI / l;
                (0..n)
                    .map(|j| {
                        let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
                        scale * m as f64
                    })
                    .collect()
            })
            .collect();
        let quad_weight = lengths
            .iter()
            .zip(nodes)
            .map(|(&l, &n)| l / n as f64)
            .product();

        Ok(Arc::new(Self {
            lengths: lengths.to_vec(),
            nodes: nodes.to_vec(),
            wavenumbers,
            quad_weight,
            plans: FftPlans::new(nodes),
        }))
    }

    pub fn dims(&self) -> usize {
        self.nodes.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber table for one axis, in FFT bin order.
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    /// Quadrature weight of the trapezoidal rule, `prod(l_a / N_a)`.
    pub fn quad_weight(&self) -> f64 {
        self.quad_weight
    }

    /// Physical coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lengths[axis] * i as f64 / self.nodes[axis] as f64
    }

    /// In-place unnormalized forward FFT of a row-major value array.
    pub fn fft_forward(&self, values: &mut [Complex64]) {
        assert_eq!(values.len(), self.len(), "value array does not match grid");
        self.plans.forward(values);
    }

    /// In-place inverse FFT, scaled by `1 / prod(N_a)`.
    pub fn fft_inverse(&self, values: &mut [Complex64]) {
        assert_eq!(values.len(), self.len(), "value array does not match grid");
        self.plans.inverse(values);
    }

    fn same_geometry(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.lengths == other.lengths
    }
}

impl std::fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("lengths", &self.lengths)
            .field("nodes", &self.nodes)
            .field("quad_weight", &self.quad_weight)
            .finish()
    }
}

/// Complex-valued grid function, stored row-major (axis 0 outermost).
#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: Arc<PeriodicGrid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: &Arc<PeriodicGrid>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn constant(grid: &Arc<PeriodicGrid>, c: Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f` at every node; the slice passed to `f` holds the node's
    /// physical coordinates, one per axis.
    pub fn from_fn(grid: &Arc<PeriodicGrid>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let dims = grid.dims();
        let nodes = grid.nodes();
        let mut coords = vec![0.0; dims];
        let mut index = vec![0usize; dims];
        let values = (0..grid.len())
            .map(|_| {
                for a in 0..dims {
                    coords[a] = grid.coord(a, index[a]);
                }
                let v = f(&coords);
                for a in (0..dims).rev() {
                    index[a] += 1;
                    if index[a] < nodes[a] {
                        break;
                    }
                    index[a] = 0;
                }
                v
            })
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    /// Wraps an existing value vector; `values.len()` must equal `grid.len()`.
    pub fn from_values(grid: &Arc<PeriodicGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same_grid(&self, other: &Self, what: &str) -> Result<()> {
        if self.grid.same_geometry(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    /// Discrete sesquilinear inner product `quad_weight * sum f conj(g)`,
    /// linear in `self` and conjugate-linear in `other`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other, "inner product")?;
        Ok(self.grid.quad_weight() * kernels::dot_conj(&self.values, &other.values))
    }

    /// Discrete L2 norm, `sqrt((f, f))`.
    pub fn norm_l2(&self) -> f64 {
        (self.grid.quad_weight() * kernels::sum_abs2(&self.values)).sqrt()
    }

    /// Max-norm over grid nodes.
    pub fn norm_linf(&self) -> f64 {
        kernels::max_abs(&self.values)
    }

    /// `max |self - other|` over nodes.
    pub fn linf_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other, "max-norm difference")?;
        Ok(kernels::max_abs_diff(&self.values, &other.values))
    }

    /// Returns `s * self`.
    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::zeros(&self.grid);
        kernels::scale_into(&mut out.values, &self.values, s);
        out
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &Self) -> Result<()> {
        self.check_same_grid(other, "add_scaled")?;
        kernels::axpy(&mut self.values, s, &other.values);
        Ok(())
    }
}

/// Eigenvalue table of the linear operator `-1/2 Laplacian`, diagonal in the
/// Fourier basis: mode `K` has eigenvalue `1/2 sum_a k_a^2 >= 0`.
pub struct SpectralSymbol {
    grid: Arc<PeriodicGrid>,
    eigenvalues: Vec<f64>,
}

impl SpectralSymbol {
    pub fn new(grid: &Arc<PeriodicGrid>) -> Self {
        let dims = grid.dims();
        let nodes = grid.nodes();
        let mut index = vec![0usize; dims];
        let eigenvalues = (0..grid.len())
            .map(|_| {
                let lam = 0.5
                    * (0..dims)
                        .map(|a| {
                            let k = grid.wavenumbers(a)[index[a]];
                            k * k
                        })
                        .sum::<f64>();
                for a in (0..dims).rev() {
                    index[a] += 1;
                    if index[a] < nodes[a] {
                        break;
                    }
                    index[a] = 0;
                }
                lam
            })
            .collect();
        Self {
            grid: grid.clone(),
            eigenvalues,
        }
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    /// Eigenvalues in row-major mode order (matching FFT output layout).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn check_field(&self, f: &ComplexField, what: &str) -> Result<()> {
        if self.grid.same_geometry(f.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: field grid {:?} does not match operator grid {:?}",
                f.grid(),
                self.grid
            )))
        }
    }

    /// Applies the operator: forward FFT, multiply by the eigenvalue table,
    /// inverse FFT. Constant fields map to zero (the zero mode has
    /// eigenvalue 0).
    pub fn apply(&self, f: &ComplexField) -> Result<ComplexField> {
        self.check_field(f, "linear operator")?;
        let mut buf = f.values().to_vec();
        self.grid.fft_forward(&mut buf);
        let mut out = vec![Complex64::default(); buf.len()];
        kernels::mul_real_table_into(&mut out, &buf, &self.eigenvalues);
        self.grid.fft_inverse(&mut out);
        ComplexField::from_values(&self.grid, out)
    }

    /// Phase table of the unitary propagator at offset `t`: entry `K` is
    /// `exp(i lambda_K t)`.
    pub fn phase_table(&self, t: f64) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .map(|&lam| {
                let (s, c) = (lam * t).sin_cos();
                Complex64::new(c, s)
            })
            .collect()
    }

    /// Unitary propagation `exp(i L t) f`; `t = 0` returns `f` unchanged and
    /// negative `t` gives the inverse propagator.
    pub fn propagate(&self, f: &ComplexField, t: f64) -> Result<ComplexField> {
        self.check_field(f, "propagator")?;
        if t == 0.0 {
            return Ok(f.clone());
        }
        let table = self.phase_table(t);
        let mut buf = f.values().to_vec();
        self.grid.fft_forward(&mut buf);
        let mut out = vec![Complex64::default(); buf.len()];
        kernels::mul_table_into(&mut out, &buf, &table);
        self.grid.fft_inverse(&mut out);
        ComplexField::from_values(&self.grid, out)
    }
}
