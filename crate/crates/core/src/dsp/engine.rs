use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;

/// Matrix axis a 1-D operation runs along.
///
/// `Rows` transforms each column across rows (slow time / azimuth);
/// `Cols` transforms each row across columns (fast time / range).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

pub(crate) fn plan(len: usize, direction: Direction) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("fft planner poisoned");
    match direction {
        Direction::Forward => p.plan_fft_forward(len),
        Direction::Inverse => p.plan_fft_inverse(len),
    }
}

/// Unitary in-place transform of every contiguous `len`-sample line in `buf`.
pub(crate) fn fft_lines(buf: &mut [Complex64], len: usize, direction: Direction) {
    let fft = plan(len, direction);
    let norm = 1.0 / (len as f64).sqrt();
    let scratch_len = fft.get_inplace_scratch_len();
    buf.par_chunks_mut(len).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, line| {
            fft.process_with_scratch(line, scratch);
            for z in line.iter_mut() {
                *z *= norm;
            }
        },
    );
}

/// Unitary 1-D transform of a single vector.
pub fn fft_vec(v: &[Complex64], direction: Direction) -> Vec<Complex64> {
    let mut out = v.to_vec();
    if !out.is_empty() {
        fft_lines(&mut out, v.len(), direction);
    }
    out
}

/// Circular left rotation by `floor(n/2)`.
pub fn fftshift_vec<T: Clone>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.rotate_left(v.len() / 2);
    out
}

/// Index a zero-centred quantity lands on after [`fftshift_vec`].
pub fn shifted_zero_index(n: usize) -> usize {
    (n - n / 2) % n
}

/// Signed DFT bin frequency of bin `k` for an `n`-point transform sampled at `rate`.
pub fn bin_frequency(k: usize, n: usize, rate: f64) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    if k < n_f / 2.0 {
        k * rate / n_f
    } else {
        (k - n_f) * rate / n_f
    }
}

pub fn fftshift_axis(m: &ComplexMatrix, axis: Axis) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    let mut out = Vec::with_capacity(rows * cols);
    match axis {
        Axis::Cols => {
            for r in 0..rows {
                out.extend(fftshift_vec(m.row(r)));
            }
        }
        Axis::Rows => {
            let shift = rows / 2;
            for r in 0..rows {
                out.extend_from_slice(m.row((r + shift) % rows));
            }
        }
    }
    ComplexMatrix::from_parts(rows, cols, out)
}

/// Snapshot of an engine's operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    /// Full-matrix FFT passes (one per `fft_axis` call).
    pub fft_passes: u64,
    /// Elementwise complex multiply passes over a matrix.
    pub multiply_passes: u64,
    /// Interpolation kernel tap evaluations.
    pub kernel_evals: u64,
}

/// Shared context for the spectral primitives.
///
/// FFT plans are cached process-wide behind a mutex; the engine itself only
/// carries counters and stage timings, so one engine per pipeline run keeps
/// counts attributable to that run.
#[derive(Debug, Default)]
pub struct SpectralEngine {
    fft_passes: AtomicU64,
    multiply_passes: AtomicU64,
    kernel_evals: AtomicU64,
    stages: Mutex<Vec<(String, Duration)>>,
}

impl SpectralEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(&self) -> OpCounts {
        OpCounts {
            fft_passes: self.fft_passes.load(Ordering::Relaxed),
            multiply_passes: self.multiply_passes.load(Ordering::Relaxed),
            kernel_evals: self.kernel_evals.load(Ordering::Relaxed),
        }
    }

    /// Accumulated wall time per named stage, in first-seen order merged by name.
    pub fn stage_times(&self) -> BTreeMap<String, Duration> {
        let mut out = BTreeMap::new();
        for (name, d) in self.stages.lock().expect("stage log poisoned").iter() {
            *out.entry(name.clone()).or_insert(Duration::ZERO) += *d;
        }
        out
    }

    pub(crate) fn stage<T>(&self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages
            .lock()
            .expect("stage log poisoned")
            .push((name.to_string(), start.elapsed()));
        out
    }

    pub(crate) fn add_kernel_evals(&self, n: u64) {
        self.kernel_evals.fetch_add(n, Ordering::Relaxed);
    }

    /// Unitary FFT (1/sqrt(N) both ways) applied independently to every line
    /// along `axis`.
    pub fn fft_axis(&self, m: &ComplexMatrix, axis: Axis, direction: Direction) -> ComplexMatrix {
        let mut out = m.clone();
        self.fft_axis_in_place(&mut out, axis, direction);
        out
    }

    pub(crate) fn fft_axis_in_place(&self, m: &mut ComplexMatrix, axis: Axis, direction: Direction) {
        self.fft_passes.fetch_add(1, Ordering::Relaxed);
        match axis {
            Axis::Cols => {
                let cols = m.cols();
                fft_lines(m.as_mut_slice(), cols, direction);
            }
            Axis::Rows => {
                let mut t = m.transpose();
                let rows = m.rows();
                fft_lines(t.as_mut_slice(), rows, direction);
                *m = t.transpose();
            }
        }
    }

    /// Multiplies every sample by `f(row, col)`.
    pub(crate) fn multiply_in_place<F>(&self, m: &mut ComplexMatrix, f: F)
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        self.multiply_passes.fetch_add(1, Ordering::Relaxed);
        let cols = m.cols();
        m.as_mut_slice()
            .par_chunks_mut(cols)
            .enumerate()
            .for_each(|(r, row)| {
                for (c, z) in row.iter_mut().enumerate() {
                    *z *= f(r, c);
                }
            });
    }
}
