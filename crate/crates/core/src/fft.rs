//! Multi-dimensional FFT built from per-axis 1-D transforms.
//!
//! Convention: the forward transform is unnormalized, the inverse carries the
//! full `1 / prod(N_a)` factor, so `inverse(forward(f)) == f` up to roundoff.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::kernels;

struct AxisPlan {
    n: usize,
    /// Product of the node counts of the trailing axes; 1 for the last axis.
    inner: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

pub(crate) struct FftPlans {
    axes: Vec<AxisPlan>,
    ntot: usize,
}

impl FftPlans {
    pub fn new(nodes: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let ntot: usize = nodes.iter().product();
        let axes = nodes
            .iter()
            .enumerate()
            .map(|(a, &n)| AxisPlan {
                n,
                inner: nodes[a + 1..].iter().product(),
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
            .collect();
        Self { axes, ntot }
    }

    pub fn forward(&self, values: &mut [Complex64]) {
        debug_assert_eq!(values.len(), self.ntot);
        for axis in &self.axes {
            if axis.inner == 1 {
                kernels::fft_lines(&axis.forward, values, axis.n);
            } else {
                kernels::fft_lines_strided(&axis.forward, values, axis.n, axis.inner);
            }
        }
    }

    pub fn inverse(&self, values: &mut [Complex64]) {
        debug_assert_eq!(values.len(), self.ntot);
        for axis in &self.axes {
            if axis.inner == 1 {
                kernels::fft_lines(&axis.inverse, values, axis.n);
            } else {
                kernels::fft_lines_strided(&axis.inverse, values, axis.n, axis.inner);
            }
        }
        kernels::scale_real(values, 1.0 / self.ntot as f64);
    }
}
