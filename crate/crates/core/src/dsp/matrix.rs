use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, VsarError};

/// Dense complex matrix, row-major.
///
/// Rows index pulses (slow time / azimuth) and columns index fast-time or
/// range samples. Every public constructor rejects empty shapes and
/// non-finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(VsarError::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(VsarError::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(VsarError::NonFinite {
                row: i / cols,
                col: i % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    /// Builds a matrix by evaluating `f(row, col)` for every sample.
    pub fn from_fn<F>(rows: usize, cols: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        if rows == 0 || cols == 0 {
            return Err(VsarError::EmptyMatrix { rows, cols });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        data.par_chunks_mut(cols).enumerate().for_each(|(r, row)| {
            for (c, z) in row.iter_mut().enumerate() {
                *z = f(r, c);
            }
        });
        Self::new(rows, cols, data)
    }

    /// Internal constructor for buffers produced by finite arithmetic on
    /// already-validated inputs.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let (rows, cols) = (self.rows, self.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
        out.par_chunks_mut(rows).enumerate().for_each(|(c, dst)| {
            for (r, z) in dst.iter_mut().enumerate() {
                *z = self.data[r * cols + c];
            }
        });
        Self::from_parts(cols, rows, out)
    }

    /// Copies this matrix into the top-left corner of a larger zero matrix.
    pub fn zero_pad(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows < self.rows || cols < self.cols {
            return Err(VsarError::OutputTooSmall {
                rows,
                cols,
                min_rows: self.rows,
                min_cols: self.cols,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
        for r in 0..self.rows {
            out[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
        }
        Ok(Self::from_parts(rows, cols, out))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_parts(
            self.rows,
            self.cols,
            self.data.iter().map(|z| z * k).collect(),
        )
    }

    /// Elementwise sum; shapes must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(VsarError::ShapeMismatch {
                rows: self.rows,
                cols: self.cols,
                len: other.data.len(),
            });
        }
        Ok(Self::from_parts(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }
}

/// Relative L2 distance `||a - b|| / ||b||`.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
