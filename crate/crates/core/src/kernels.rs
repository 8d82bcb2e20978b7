//! Data-parallel inner loops shared by the field and FFT code.
//!
//! Every kernel exists in a sequential flavour ([`seq`]) and, with the
//! `parallel` feature, a rayon flavour ([`par`]). The free functions at the
//! top level dispatch to whichever backend the crate was compiled with.
//!
//! Reductions accumulate fixed-size chunks in index order and then fold the
//! partial results sequentially, so both backends produce bitwise-identical
//! sums for any thread count. Elementwise maps are trivially deterministic.

use num_complex::Complex64;
use rustfft::Fft;
use std::sync::Arc;

/// Chunk length for reductions and elementwise maps. Fixing this makes the
/// summation order independent of the backend and of the rayon thread count.
pub const CHUNK: usize = 1024;

/// max that propagates NaN instead of dropping it (f64::max ignores NaN).
#[inline]
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else if a > b {
        a
    } else {
        b
    }
}

macro_rules! kernel_dispatch {
    ($(#[$meta:meta])* $name:ident ( $($arg:ident : $ty:ty),* ) -> $ret:ty) => {
        $(#[$meta])*
        #[inline]
        pub fn $name($($arg: $ty),*) -> $ret {
            #[cfg(feature = "parallel")]
            return par::$name($($arg),*);
            #[cfg(not(feature = "parallel"))]
            return seq::$name($($arg),*);
        }
    };
}

kernel_dispatch!(
    /// `sum a[i] * conj(b[i])` — the unweighted discrete sesquilinear form.
    dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64
);
kernel_dispatch!(
    /// `sum |a[i]|^2`.
    sum_abs2(a: &[Complex64]) -> f64
);
kernel_dispatch!(
    /// `sum |a[i]|^4`.
    sum_abs4(a: &[Complex64]) -> f64
);
kernel_dispatch!(
    /// Writes `|src[i]|^2 * src[i]` into `dst` and returns `sum |src[i]|^4`.
    cubic_with_abs4(src: &[Complex64], dst: &mut [Complex64]) -> f64
);
kernel_dispatch!(
    /// `dst[i] = s * src[i]`.
    scale_into(dst: &mut [Complex64], src: &[Complex64], s: Complex64) -> ()
);
kernel_dispatch!(
    /// `dst[i] = table[i] * src[i]`.
    mul_table_into(dst: &mut [Complex64], src: &[Complex64], table: &[Complex64]) -> ()
);
kernel_dispatch!(
    /// `dst[i] = re[i] * src[i]` for a real multiplier table.
    mul_real_table_into(dst: &mut [Complex64], src: &[Complex64], table: &[f64]) -> ()
);
kernel_dispatch!(
    /// `acc[i] += coef * table[i] * src[i]`.
    axpy_table(acc: &mut [Complex64], coef: Complex64, table: &[Complex64], src: &[Complex64]) -> ()
);
kernel_dispatch!(
    /// `acc[i] += coef * src[i]`.
    axpy(acc: &mut [Complex64], coef: Complex64, src: &[Complex64]) -> ()
);
kernel_dispatch!(
    /// `data[i] *= s` for real `s`.
    scale_real(data: &mut [Complex64], s: f64) -> ()
);
kernel_dispatch!(
    /// `max |a[i]|`; NaN entries poison the result.
    max_abs(a: &[Complex64]) -> f64
);
kernel_dispatch!(
    /// `max |a[i] - b[i]|`; NaN entries poison the result.
    max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64
);
kernel_dispatch!(
    /// FFT of contiguous lines: `data` is `lines * n` long, each line transformed in place.
    fft_lines(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize) -> ()
);
kernel_dispatch!(
    /// FFT along a strided axis: `data` is viewed as `[outer][n][inner]` and every
    /// length-`n` line with stride `inner` is transformed in place.
    fft_lines_strided(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize, inner: usize) -> ()
);

/// Sequential backend.
pub mod seq {
    use super::*;

    pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        debug_assert_eq!(a.len(), b.len());
        a.chunks(CHUNK)
            .zip(b.chunks(CHUNK))
            .map(|(ca, cb)| {
                ca.iter()
                    .zip(cb)
                    .fold(Complex64::new(0.0, 0.0), |s, (x, y)| s + x * y.conj())
            })
            .sum()
    }

    pub fn sum_abs2(a: &[Complex64]) -> f64 {
        a.chunks(CHUNK)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn sum_abs4(a: &[Complex64]) -> f64 {
        a.chunks(CHUNK)
            .map(|c| {
                c.iter()
                    .map(|z| {
                        let a2 = z.norm_sqr();
                        a2 * a2
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn cubic_with_abs4(src: &[Complex64], dst: &mut [Complex64]) -> f64 {
        debug_assert_eq!(src.len(), dst.len());
        src.chunks(CHUNK)
            .zip(dst.chunks_mut(CHUNK))
            .map(|(cs, cd)| {
                let mut quartic = 0.0;
                for (z, w) in cs.iter().zip(cd) {
                    let a2 = z.norm_sqr();
                    quartic += a2 * a2;
                    *w = a2 * z;
                }
                quartic
            })
            .sum()
    }

    pub fn scale_into(dst: &mut [Complex64], src: &[Complex64], s: Complex64) {
        for (w, z) in dst.iter_mut().zip(src) {
            *w = s * z;
        }
    }

    pub fn mul_table_into(dst: &mut [Complex64], src: &[Complex64], table: &[Complex64]) {
        for ((w, z), t) in dst.iter_mut().zip(src).zip(table) {
            *w = t * z;
        }
    }

    pub fn mul_real_table_into(dst: &mut [Complex64], src: &[Complex64], table: &[f64]) {
        for ((w, z), t) in dst.iter_mut().zip(src).zip(table) {
            *w = t * z;
        }
    }

    pub fn axpy_table(
        acc: &mut [Complex64],
        coef: Complex64,
        table: &[Complex64],
        src: &[Complex64],
    ) {
        for ((w, t), z) in acc.iter_mut().zip(table).zip(src) {
            *w += coef * t * z;
        }
    }

    pub fn axpy(acc: &mut [Complex64], coef: Complex64, src: &[Complex64]) {
        for (w, z) in acc.iter_mut().zip(src) {
            *w += coef * z;
        }
    }

    pub fn scale_real(data: &mut [Complex64], s: f64) {
        for z in data {
            *z *= s;
        }
    }

    pub fn max_abs(a: &[Complex64]) -> f64 {
        a.chunks(CHUNK)
            .map(|c| c.iter().fold(0.0, |m, z| nan_max(m, z.norm())))
            .fold(0.0, nan_max)
    }

    pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        a.chunks(CHUNK)
            .zip(b.chunks(CHUNK))
            .map(|(ca, cb)| {
                ca.iter()
                    .zip(cb)
                    .fold(0.0, |m, (x, y)| nan_max(m, (x - y).norm()))
            })
            .fold(0.0, nan_max)
    }

    pub fn fft_lines(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize) {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for line in data.chunks_mut(n) {
            fft.process_with_scratch(line, &mut scratch);
        }
    }

    pub fn fft_lines_strided(
        fft: &Arc<dyn Fft<f64>>,
        data: &mut [Complex64],
        n: usize,
        inner: usize,
    ) {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut lines = vec![Complex64::default(); inner * n];
        for block in data.chunks_mut(n * inner) {
            // Gather the interleaved lines into contiguous rows, transform,
            // then scatter back.
            for (j, row) in lines.chunks_mut(n).enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = block[i * inner + j];
                }
                fft.process_with_scratch(row, &mut scratch);
            }
            for (i, slot) in block.chunks_mut(inner).enumerate() {
                for (j, v) in slot.iter_mut().enumerate() {
                    *v = lines[j * n + i];
                }
            }
        }
    }
}

/// Rayon backend. Chunk boundaries match [`seq`], so results are
/// bitwise-identical to the sequential kernels.
#[cfg(feature = "parallel")]
pub mod par {
    use super::*;
    use rayon::prelude::*;

    pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        debug_assert_eq!(a.len(), b.len());
        let partials: Vec<Complex64> = a
            .par_chunks(CHUNK)
            .zip(b.par_chunks(CHUNK))
            .map(|(ca, cb)| {
                ca.iter()
                    .zip(cb)
                    .fold(Complex64::new(0.0, 0.0), |s, (x, y)| s + x * y.conj())
            })
            .collect();
        partials.into_iter().sum()
    }

    pub fn sum_abs2(a: &[Complex64]) -> f64 {
        let partials: Vec<f64> = a
            .par_chunks(CHUNK)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .collect();
        partials.into_iter().sum()
    }

    pub fn sum_abs4(a: &[Complex64]) -> f64 {
        let partials: Vec<f64> = a
            .par_chunks(CHUNK)
            .map(|c| {
                c.iter()
                    .map(|z| {
                        let a2 = z.norm_sqr();
                        a2 * a2
                    })
                    .sum::<f64>()
            })
            .collect();
        partials.into_iter().sum()
    }

    pub fn cubic_with_abs4(src: &[Complex64], dst: &mut [Complex64]) -> f64 {
        debug_assert_eq!(src.len(), dst.len());
        let partials: Vec<f64> = src
            .par_chunks(CHUNK)
            .zip(dst.par_chunks_mut(CHUNK))
            .map(|(cs, cd)| {
                let mut quartic = 0.0;
                for (z, w) in cs.iter().zip(cd) {
                    let a2 = z.norm_sqr();
                    quartic += a2 * a2;
                    *w = a2 * z;
                }
                quartic
            })
            .collect();
        partials.into_iter().sum()
    }

    pub fn scale_into(dst: &mut [Complex64], src: &[Complex64], s: Complex64) {
        dst.par_chunks_mut(CHUNK)
            .zip(src.par_chunks(CHUNK))
            .for_each(|(cd, cs)| super::seq::scale_into(cd, cs, s));
    }

    pub fn mul_table_into(dst: &mut [Complex64], src: &[Complex64], table: &[Complex64]) {
        dst.par_chunks_mut(CHUNK)
            .zip(src.par_chunks(CHUNK))
            .zip(table.par_chunks(CHUNK))
            .for_each(|((cd, cs), ct)| super::seq::mul_table_into(cd, cs, ct));
    }

    pub fn mul_real_table_into(dst: &mut [Complex64], src: &[Complex64], table: &[f64]) {
        dst.par_chunks_mut(CHUNK)
            .zip(src.par_chunks(CHUNK))
            .zip(table.par_chunks(CHUNK))
            .for_each(|((cd, cs), ct)| super::seq::mul_real_table_into(cd, cs, ct));
    }

    pub fn axpy_table(
        acc: &mut [Complex64],
        coef: Complex64,
        table: &[Complex64],
        src: &[Complex64],
    ) {
        acc.par_chunks_mut(CHUNK)
            .zip(table.par_chunks(CHUNK))
            .zip(src.par_chunks(CHUNK))
            .for_each(|((ca, ct), cs)| super::seq::axpy_table(ca, coef, ct, cs));
    }

    pub fn axpy(acc: &mut [Complex64], coef: Complex64, src: &[Complex64]) {
        acc.par_chunks_mut(CHUNK)
            .zip(src.par_chunks(CHUNK))
            .for_each(|(ca, cs)| super::seq::axpy(ca, coef, cs));
    }

    pub fn scale_real(data: &mut [Complex64], s: f64) {
        data.par_chunks_mut(CHUNK)
            .for_each(|c| super::seq::scale_real(c, s));
    }

    pub fn max_abs(a: &[Complex64]) -> f64 {
        let partials: Vec<f64> = a
            .par_chunks(CHUNK)
            .map(|c| c.iter().fold(0.0, |m, z| nan_max(m, z.norm())))
            .collect();
        partials.into_iter().fold(0.0, nan_max)
    }

    pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let partials: Vec<f64> = a
            .par_chunks(CHUNK)
            .zip(b.par_chunks(CHUNK))
            .map(|(ca, cb)| {
                ca.iter()
                    .zip(cb)
                    .fold(0.0, |m, (x, y)| nan_max(m, (x - y).norm()))
            })
            .collect();
        partials.into_iter().fold(0.0, nan_max)
    }

    pub fn fft_lines(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize) {
        data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::default(); fft.get_inplace_scratch_len()],
            |scratch, line| fft.process_with_scratch(line, scratch),
        );
    }

    pub fn fft_lines_strided(
        fft: &Arc<dyn Fft<f64>>,
        data: &mut [Complex64],
        n: usize,
        inner: usize,
    ) {
        let mut lines = vec![Complex64::default(); inner * n];
        for block in data.chunks_mut(n * inner) {
            let immutable = &*block;
            lines.par_chunks_mut(n).enumerate().for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, (j, row)| {
                    for (i, v) in row.iter_mut().enumerate() {
                        *v = immutable[i * inner + j];
                    }
                    fft.process_with_scratch(row, scratch);
                },
            );
            let lines_ref = &lines;
            block
                .par_chunks_mut(inner)
                .enumerate()
                .for_each(|(i, slot)| {
                    for (j, v) in slot.iter_mut().enumerate() {
                        *v = lines_ref[j * n + i];
                    }
                });
        }
    }
}

#[cfg(all(test, feature = "parallel"))]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(len: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn backends_agree_bitwise_on_reductions() {
        for len in [1, 7, CHUNK, CHUNK + 3, 5 * CHUNK + 11] {
            let a = random_vec(len, 1);
            let b = random_vec(len, 2);
            assert_eq!(seq::dot_conj(&a, &b), par::dot_conj(&a, &b));
            assert_eq!(seq::sum_abs2(&a), par::sum_abs2(&a));
            assert_eq!(seq::sum_abs4(&a), par::sum_abs4(&a));
            assert_eq!(seq::max_abs(&a), par::max_abs(&a));
            assert_eq!(seq::max_abs_diff(&a, &b), par::max_abs_diff(&a, &b));

            let mut cs = vec![Complex64::default(); len];
            let mut cp = vec![Complex64::default(); len];
            let qs = seq::cubic_with_abs4(&a, &mut cs);
            let qp = par::cubic_with_abs4(&a, &mut cp);
            assert_eq!(qs, qp);
            assert_eq!(cs, cp);
        }
    }

    #[test]
    fn backends_agree_on_maps() {
        let len = 3 * CHUNK + 17;
        let a = random_vec(len, 3);
        let t = random_vec(len, 4);
        let s = Complex64::new(0.3, -0.7);

        let mut ds = vec![Complex64::default(); len];
        let mut dp = vec![Complex64::default(); len];
        seq::scale_into(&mut ds, &a, s);
        par::scale_into(&mut dp, &a, s);
        assert_eq!(ds, dp);

        seq::mul_table_into(&mut ds, &a, &t);
        par::mul_table_into(&mut dp, &a, &t);
        assert_eq!(ds, dp);

        let mut as_ = a.clone();
        let mut ap = a.clone();
        seq::axpy_table(&mut as_, s, &t, &ds);
        par::axpy_table(&mut ap, s, &t, &dp);
        assert_eq!(as_, ap);
    }

    #[test]
    fn nan_poisons_max() {
        let mut a = random_vec(10, 5);
        a[7] = Complex64::new(f64::NAN, 0.0);
        assert!(seq::max_abs(&a).is_nan());
        assert!(par::max_abs(&a).is_nan());
    }
}
