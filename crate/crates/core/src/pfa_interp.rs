//! Baseline polar-format focuser: separable windowed-sinc regridding from the
//! polar wavenumber samples to a rectangular grid in the frame rotated to
//! `theta_k`, then a 2-D FFT.
//!
//! The rectangular grid reuses the chirp-scaling focuser's steps (fast-time
//! wavenumber step in `k_x`, `K_Xc * d_theta` in `k_y`) so both methods image
//! onto identical pixels. Grid samples the polar annulus does not cover are
//! zero and flagged in the support mask.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dsp::{
    bin_frequency, fftshift_axis, Axis, ComplexMatrix, Direction, SincKernel, SpectralEngine,
};
use crate::echo::{PhaseHistory, RvpState};
use crate::error::{Result, VsarError};
use crate::geometry::{radial_wavenumber, FrameGeometry, RadarParams};
use crate::image::ComplexImage;
use crate::pfa_cs::{azimuth_wavenumber_step, range_wavenumber_step};

/// Pass-1 output: every pulse resampled onto the common `k_x` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeResampled {
    pub data: ComplexMatrix,
    /// `true` where the query fell inside the pulse's radial support.
    pub support_mask: Vec<bool>,
    pub kx0: f64,
    pub dkx: f64,
    params: RadarParams,
    geom: FrameGeometry,
}

/// Rectangular wavenumber grid; rows follow `k_y`, columns `k_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectGrid {
    pub data: ComplexMatrix,
    pub support_mask: Vec<bool>,
    pub kx0: f64,
    pub dkx: f64,
    pub ky0: f64,
    pub dky: f64,
}

impl RectGrid {
    pub fn kx(&self, col: usize) -> f64 {
        self.kx0 + col as f64 * self.dkx
    }
    pub fn ky(&self, row: usize) -> f64 {
        self.ky0 + row as f64 * self.dky
    }
}

/// Removes the residual video phase with the spectral filter
/// `exp(-j pi f^2 / K)`; RVP-free input is returned unchanged.
pub fn deskew(engine: &SpectralEngine, ph: &PhaseHistory) -> PhaseHistory {
    if ph.rvp_state() == RvpState::Removed {
        return ph.clone();
    }
    let p = ph.params();
    let (k, fs) = (p.chirp_rate(), p.sample_rate_hz());
    let n = ph.matrix().cols();
    let mut m = ph.matrix().clone();
    engine.stage("deskew", || {
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
        engine.multiply_in_place(&mut m, |_, c| {
            let f = bin_frequency(c, n, fs);
            Complex64::cis(-PI * f * f / k)
        });
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Inverse);
    });
    ph.with_matrix(m, RvpState::Removed)
}

fn collect_rows(
    rows: usize,
    cols: usize,
    lines: Vec<(Vec<Complex64>, Vec<bool>)>,
) -> (ComplexMatrix, Vec<bool>) {
    let mut data = Vec::with_capacity(rows * cols);
    let mut mask = Vec::with_capacity(rows * cols);
    for (v, m) in lines {
        data.extend(v);
        mask.extend(m);
    }
    (ComplexMatrix::new(rows, cols, data).expect("finite interpolation output"), mask)
}

/// Pass 1: for each pulse, resample fast time so that the projected
/// wavenumber `K_R cos(theta_n - theta_k)` lands on the uniform `k_x` grid.
pub fn range_resample(
    engine: &SpectralEngine,
    ph: &PhaseHistory,
    kernel: &SincKernel,
) -> Result<RangeResampled> {
    if ph.rvp_state() != RvpState::Removed {
        return Err(VsarError::WrongRvpState {
            expected: RvpState::Removed.name(),
            found: ph.rvp_state().name(),
        });
    }
    let (p, g) = (ph.params(), ph.geometry());
    let (rows, cols) = ph.matrix().shape();
    let dkx = range_wavenumber_step(p, g);
    let kx0 = radial_wavenumber(p, g, ph.tau_hat()[0]);
    let theta_k = g.center_azimuth_rad();
    let lines: Vec<_> = engine.stage("range_resample", || {
        (0..rows)
            .into_par_iter()
            .map(|n| {
                let stretch = 1.0 / (ph.theta()[n] - theta_k).cos();
                let queries: Vec<f64> = (0..cols)
                    .map(|i| ((kx0 + i as f64 * dkx) * stretch - kx0) / dkx)
                    .collect();
                let out = engine.sinc_interp(ph.matrix().row(n), &queries, kernel);
                let mask = out.outside.iter().map(|o| !o).collect();
                (out.values, mask)
            })
            .collect()
    });
    let (data, support_mask) = collect_rows(rows, cols, lines);
    Ok(RangeResampled {
        data,
        support_mask,
        kx0,
        dkx,
        params: *p,
        geom: *g,
    })
}

/// Pass 2: for each `k_x` column, resample across pulses so that
/// `K_Y = k_x tan(theta_n - theta_k)` lands on the uniform `k_y` grid.
pub fn azimuth_resample(
    engine: &SpectralEngine,
    rr: &RangeResampled,
    kernel: &SincKernel,
) -> Result<RectGrid> {
    let (rows, cols) = rr.data.shape();
    let g = &rr.geom;
    let dky = azimuth_wavenumber_step(&rr.params, g);
    let mid = (rows as f64 - 1.0) / 2.0;
    let ky0 = -mid * dky;
    let step = g.angle_step_rad();
    let by_col = rr.data.transpose();
    let lines: Vec<_> = engine.stage("azimuth_resample", || {
        (0..cols)
            .into_par_iter()
            .map(|i| {
                let kx = rr.kx0 + i as f64 * rr.dkx;
                let queries: Vec<f64> = (0..rows)
                    .map(|j| (ky0 + j as f64 * dky).atan2(kx) / step + mid)
                    .collect();
                let out = engine.sinc_interp(by_col.row(i), &queries, kernel);
                let mut values = out.values;
                let mut mask = Vec::with_capacity(rows);
                for (j, q) in queries.iter().enumerate() {
                    let nearest = q.round().clamp(0.0, (rows - 1) as f64) as usize;
                    let inside = !out.outside[j] && rr.support_mask[nearest * cols + i];
                    if !inside {
                        values[j] = Complex64::new(0.0, 0.0);
                    }
                    mask.push(inside);
                }
                (values, mask)
            })
            .collect()
    });
    let (t, mask_t) = collect_rows(cols, rows, lines);
    let mut support_mask = vec![false; rows * cols];
    for i in 0..cols {
        for j in 0..rows {
            support_mask[j * cols + i] = mask_t[i * rows + j];
        }
    }
    Ok(RectGrid {
        data: t.transpose(),
        support_mask,
        kx0: rr.kx0,
        dkx: rr.dkx,
        ky0,
        dky,
    })
}

/// Output size and kernel for [`focus_interp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpPlan {
    pub kernel: SincKernel,
    pub out_rows: usize,
    pub out_cols: usize,
}

impl InterpPlan {
    pub fn new(ph: &PhaseHistory) -> Self {
        Self {
            kernel: SincKernel::default(),
            out_rows: 2 * ph.matrix().rows(),
            out_cols: 2 * ph.matrix().cols(),
        }
    }

    pub fn with_output(mut self, rows: usize, cols: usize) -> Self {
        self.out_rows = rows;
        self.out_cols = cols;
        self
    }

    pub fn with_kernel(mut self, kernel: SincKernel) -> Self {
        self.kernel = kernel;
        self
    }
}

/// Deskew (if raw), two-pass regridding, zero-padded 2-D FFT, centre shift.
pub fn focus_interp(
    engine: &SpectralEngine,
    ph: &PhaseHistory,
    plan: &InterpPlan,
) -> Result<ComplexImage> {
    let (rows, cols) = ph.matrix().shape();
    if plan.out_rows < rows || plan.out_cols < cols {
        return Err(VsarError::OutputTooSmall {
            rows: plan.out_rows,
            cols: plan.out_cols,
            min_rows: rows,
            min_cols: cols,
        });
    }
    let free = deskew(engine, ph);
    let rr = range_resample(engine, &free, &plan.kernel)?;
    let grid = azimuth_resample(engine, &rr, &plan.kernel)?;
    let img = engine.stage("image_fft", || -> Result<ComplexMatrix> {
        let mut m = grid.data.zero_pad(plan.out_rows, plan.out_cols)?;
        engine.fft_axis_in_place(&mut m, Axis::Rows, Direction::Forward);
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
        Ok(fftshift_axis(&fftshift_axis(&m, Axis::Cols), Axis::Rows))
    })?;
    let dx = 2.0 * PI / (plan.out_cols as f64 * grid.dkx);
    let dy = 2.0 * PI / (plan.out_rows as f64 * grid.dky);
    ComplexImage::new(img, dx, dy, ph.geometry().center_azimuth_rad())
}
