//! Shared oracles for the integration tests: an O(N^2) discrete Fourier
//! transform that is independent of the FFT path, and random band-limited
//! fields synthesized directly from Fourier modes (no transform involved).

use esav_core::{Complex64, ComplexField, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Integer mode vector and complex amplitude.
pub type Mode = (Vec<i64>, Complex64);

/// Draws `count` random modes with every index in `[-max_index, max_index]`
/// and O(1) amplitudes. Deterministic in `seed`.
pub fn random_modes(grid: &PeriodicGrid, seed: u64, count: usize, max_index: i64) -> Vec<Mode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = grid.dims();
    (0..count)
        .map(|_| {
            let k: Vec<i64> = (0..dims).map(|_| rng.gen_range(-max_index..=max_index)).collect();
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (k, amp)
        })
        .collect()
}

/// Synthesizes `sum_m amp_m exp(i k_m . x)` by direct evaluation at the
/// nodes. The wavenumber of integer index `m` along axis `a` is
/// `2 pi m / l_a`.
pub fn synthesize(grid: &Arc<PeriodicGrid>, modes: &[Mode]) -> ComplexField {
    let lengths: Vec<f64> = grid.lengths().to_vec();
    ComplexField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|(k, amp)| {
                let phase: f64 = k
                    .iter()
                    .zip(x)
                    .zip(&lengths)
                    .map(|((&m, &xi), &l)| 2.0 * std::f64::consts::PI * m as f64 / l * xi)
                    .sum();
                amp * Complex64::new(phase.cos(), phase.sin())
            })
            .sum()
    })
}

/// A random smooth field: a handful of low modes with O(1) total amplitude.
pub fn random_smooth_field(grid: &Arc<PeriodicGrid>, seed: u64) -> ComplexField {
    let max_index = (grid.nodes().iter().copied().min().unwrap() as i64 / 2 - 1).min(3);
    let modes = random_modes(grid, seed, 6, max_index);
    let scale = Complex64::new(1.0 / modes.len() as f64, 0.0);
    synthesize(grid, &modes).scaled(scale)
}

/// Eigenvalue of the operator `-1/2 Laplacian` for an integer mode vector.
pub fn mode_eigenvalue(grid: &PeriodicGrid, k: &[i64]) -> f64 {
    0.5 * k
        .iter()
        .zip(grid.lengths())
        .map(|(&m, &l)| {
            let kk = 2.0 * std::f64::consts::PI * m as f64 / l;
            kk * kk
        })
        .sum::<f64>()
}

/// Unnormalized forward DFT by direct summation, bin-for-bin comparable
/// with the FFT output layout (row-major bins, each axis in FFT bin order).
pub fn naive_dft(grid: &PeriodicGrid, values: &[Complex64]) -> Vec<Complex64> {
    let nodes = grid.nodes().to_vec();
    let dims = nodes.len();
    let ntot = grid.len();
    let mut out = vec![Complex64::default(); ntot];

    let unflatten = |mut idx: usize| -> Vec<usize> {
        let mut multi = vec![0usize; dims];
        for a in (0..dims).rev() {
            multi[a] = idx % nodes[a];
            idx /= nodes[a];
        }
        multi
    };

    for (bin, slot) in out.iter_mut().enumerate() {
        let kbin = unflatten(bin);
        let mut acc = Complex64::default();
        for (pos, v) in values.iter().enumerate() {
            let xbin = unflatten(pos);
            let phase: f64 = kbin
                .iter()
                .zip(&xbin)
                .zip(&nodes)
                .map(|((&kb, &xb), &n)| {
                    -2.0 * std::f64::consts::PI * (kb * xb) as f64 / n as f64
                })
                .sum();
            acc += v * Complex64::new(phase.cos(), phase.sin());
        }
        *slot = acc;
    }
    out
}
