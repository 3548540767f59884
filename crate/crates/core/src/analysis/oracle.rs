//! Brute-force reference imager: a direct nonuniform DFT from the polar
//! wavenumber samples onto the image grid. Quartic cost, so it is guarded to
//! desk-scale problems.

use num_complex::Complex64;

use crate::dsp::ComplexMatrix;
use crate::echo::{PhaseHistory, RvpState};
use crate::error::{Result, VsarError};
use crate::geometry::radial_wavenumber;
use crate::image::ComplexImage;

/// Largest phase history and pixel grid accepted without `force`.
pub const ORACLE_MAX_SAMPLES: usize = 128 * 128;
pub const ORACLE_MAX_PIXELS: usize = 128 * 128;

/// Output pixel grid for [`oracle_image`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelGrid {
    pub rows: usize,
    pub cols: usize,
    pub dx_m: f64,
    pub dy_m: f64,
}

impl PixelGrid {
    /// The grid of an existing image.
    pub fn of(img: &ComplexImage) -> Self {
        Self {
            rows: img.rows(),
            cols: img.cols(),
            dx_m: img.dx_m(),
            dy_m: img.dy_m(),
        }
    }
}

/// `image(x, y) = sum_{n,m} S(n, m) exp(-j (x K_X + y K_Y)) / sqrt(rows * cols)`
/// with `(K_X, K_Y)` the exact polar wavenumbers in the frame rotated to
/// `theta_k`, so the normalization matches the unitary FFT focusers.
pub fn oracle_image(ph: &PhaseHistory, grid: &PixelGrid, force: bool) -> Result<ComplexImage> {
    if ph.rvp_state() != RvpState::Removed {
        return Err(VsarError::WrongRvpState {
            expected: RvpState::Removed.name(),
            found: ph.rvp_state().name(),
        });
    }
    let (n_p, n_f) = ph.matrix().shape();
    let samples = n_p * n_f;
    let pixels = grid.rows * grid.cols;
    if !force && (samples > ORACLE_MAX_SAMPLES || pixels > ORACLE_MAX_PIXELS) {
        return Err(VsarError::OracleTooLarge { samples, pixels });
    }
    let (p, g) = (ph.params(), ph.geometry());
    let theta_k = g.center_azimuth_rad();
    let mut kx = Vec::with_capacity(samples);
    let mut ky = Vec::with_capacity(samples);
    let mut s = Vec::with_capacity(samples);
    for n in 0..n_p {
        let (sin, cos) = (ph.theta()[n] - theta_k).sin_cos();
        for m in 0..n_f {
            let kr = radial_wavenumber(p, g, ph.tau_hat()[m]);
            kx.push(kr * cos);
            ky.push(kr * sin);
            s.push(ph.matrix().get(n, m));
        }
    }
    let norm = 1.0 / (pixels as f64).sqrt();
    // placeholder image only supplies the pixel-to-metre mapping
    let frame = ComplexImage::new(ComplexMatrix::zeros(grid.rows, grid.cols)?, grid.dx_m, grid.dy_m, theta_k)?;
    let m = ComplexMatrix::from_fn(grid.rows, grid.cols, |r, c| {
        let (x, y) = frame.pixel_to_xy(r as f64, c as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..samples {
            acc += s[i] * Complex64::cis(-(x * kx[i] + y * ky[i]));
        }
        acc * norm
    })?;
    ComplexImage::new(m, grid.dx_m, grid.dy_m, theta_k)
}
