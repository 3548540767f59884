//! Point-response metrology on focused images.
//!
//! Sub-pixel work uses the image's own band-limited spectrum: the image is
//! taken back to the wavenumber domain once, and any off-grid sample is then
//! an exact trigonometric sum. Peak positions come from a two-level fine
//! search, and cuts through the peak come from a zero-padded FFT of the
//! spectrum line that passes through it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsp::{fft_lines, fft_vec, Direction};
use crate::error::{MetricError, Result, VsarError};
use crate::image::ComplexImage;

/// Default sub-pixel oversampling for peaks and cuts.
pub const DEFAULT_OVERSAMPLE: usize = 16;
/// Default ISLR / PSLR sidelobe extent in multiples of the IRW.
pub const DEFAULT_SIDELOBE_EXTENT: f64 = 10.0;

// Spectrum rows/columns whose marginal energy is below this fraction of the
// total are dropped from the trigonometric sums.
const SUPPORT_FLOOR: f64 = 1e-15;

/// Refined peak of a point response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub row: f64,
    pub col: f64,
    /// Image-frame coordinates, m.
    pub x_m: f64,
    pub y_m: f64,
    pub value: Complex64,
}

/// Cut direction through a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutAxis {
    /// Along columns (`x'`).
    Range,
    /// Along rows (`y'`).
    Azimuth,
}

/// 1-D magnitude profile in dB, 0 dB at its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub db: Vec<f64>,
    pub spacing_m: f64,
}

impl Profile {
    /// Builds a profile from linear magnitudes, normalizing to the maximum.
    pub fn from_magnitudes(mags: &[f64], spacing_m: f64) -> std::result::Result<Self, MetricError> {
        let max = mags.iter().cloned().fold(0.0, f64::max);
        if mags.is_empty() || max <= 0.0 {
            return Err(MetricError::EmptyProfile);
        }
        let db = mags
            .iter()
            .map(|m| if *m == max { 0.0 } else { 20.0 * (m / max).log10() })
            .collect();
        Ok(Self { db, spacing_m })
    }

    /// Index of the 0 dB sample (first one on ties).
    pub fn peak_index(&self) -> usize {
        self.db.iter().position(|d| *d == 0.0).unwrap_or(0)
    }

    /// Indices of the first local minimum on each side of the peak.
    pub fn first_nulls(&self) -> std::result::Result<(usize, usize), MetricError> {
        let p = self.peak_index();
        let d = &self.db;
        let mut left = None;
        let mut i = p;
        while i > 0 {
            if d[i - 1] == f64::NEG_INFINITY {
                left = Some(i - 1);
                break;
            }
            if d[i - 1] > d[i] && i < p {
                left = Some(i);
                break;
            }
            i -= 1;
        }
        let mut right = None;
        let mut i = p;
        while i + 1 < d.len() {
            if d[i + 1] == f64::NEG_INFINITY {
                right = Some(i + 1);
                break;
            }
            if d[i + 1] > d[i] && i > p {
                right = Some(i);
                break;
            }
            i += 1;
        }
        match (left, right) {
            (Some(l), Some(r)) => Ok((l, r)),
            (None, _) => Err(MetricError::NoNull { side: "left" }),
            _ => Err(MetricError::NoNull { side: "right" }),
        }
    }
}

/// Width between the two -3 dB crossings, linear interpolation in dB.
pub fn irw(profile: &Profile) -> std::result::Result<f64, MetricError> {
    let d = &profile.db;
    if d.is_empty() {
        return Err(MetricError::EmptyProfile);
    }
    let p = profile.peak_index();
    let crossing = |inside: usize, outside: usize| -> f64 {
        let (a, b) = (d[inside], d[outside]);
        let frac = if b == f64::NEG_INFINITY { 0.0 } else { (a + 3.0) / (a - b) };
        inside as f64 + frac * (outside as f64 - inside as f64)
    };
    let left = (1..=p)
        .rev()
        .find(|&i| d[i - 1] < -3.0)
        .map(|i| crossing(i, i - 1))
        .ok_or(MetricError::NoHalfPowerCrossing { side: "left" })?;
    let right = (p..d.len() - 1)
        .find(|&i| d[i + 1] < -3.0)
        .map(|i| crossing(i, i + 1))
        .ok_or(MetricError::NoHalfPowerCrossing { side: "right" })?;
    Ok((right - left) * profile.spacing_m)
}

fn sidelobe_window(profile: &Profile, extent: f64) -> std::result::Result<(usize, usize, usize, usize, bool), MetricError> {
    let (l, r) = profile.first_nulls()?;
    let width = irw(profile)?;
    let p = profile.peak_index() as f64;
    let reach = extent * width / profile.spacing_m;
    let lo = p - reach;
    let hi = p + reach;
    let n = profile.db.len();
    let truncated = lo < 0.0 || hi > (n - 1) as f64;
    let lo = lo.max(0.0).ceil() as usize;
    let hi = (hi.min((n - 1) as f64)).floor() as usize;
    Ok((l, r, lo.min(l), hi.max(r), truncated))
}

/// Highest sidelobe outside the main lobe (first nulls) within
/// `extent * IRW` of the peak, dB. `-inf` means no sidelobe above the floor.
pub fn pslr(profile: &Profile, extent: f64) -> std::result::Result<f64, MetricError> {
    let (l, r, lo, hi, _) = sidelobe_window(profile, extent)?;
    let d = &profile.db;
    Ok(d[lo..l]
        .iter()
        .chain(&d[r + 1..=hi])
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Integrated sidelobe ratio and whether the extent ran off the profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Islr {
    pub db: f64,
    pub truncated: bool,
}

/// `10 log10(E_side / E_main)`: main lobe between the first nulls, sidelobes
/// from the nulls out to `extent * IRW` on each side.
pub fn islr(profile: &Profile, extent: f64) -> std::result::Result<Islr, MetricError> {
    let (l, r, lo, hi, truncated) = sidelobe_window(profile, extent)?;
    let power = |d: &f64| 10f64.powf(d / 10.0);
    let d = &profile.db;
    let main: f64 = d[l..=r].iter().map(power).sum();
    let side: f64 = d[lo..l].iter().chain(&d[r + 1..=hi]).map(power).sum();
    let db = if side == 0.0 { f64::NEG_INFINITY } else { 10.0 * (side / main).log10() };
    Ok(Islr { db, truncated })
}

/// Band-limited view of an image for sub-pixel evaluation.
pub struct PsfAnalyzer<'a> {
    img: &'a ComplexImage,
    /// Spectrum restricted to its support: `spec[a * v_idx.len() + b]`.
    spec: Vec<Complex64>,
    u_idx: Vec<f64>,
    v_idx: Vec<f64>,
    norm: f64,
}

fn centred_indices(marginal: &[f64]) -> Vec<(usize, f64)> {
    let n = marginal.len();
    let total: f64 = marginal.iter().sum();
    let centroid: Complex64 = marginal
        .iter()
        .enumerate()
        .map(|(k, e)| Complex64::from_polar(*e, 2.0 * PI * k as f64 / n as f64))
        .sum();
    let centre = centroid.arg() / (2.0 * PI) * n as f64;
    marginal
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > SUPPORT_FLOOR * total)
        .map(|(k, _)| {
            let mut s = k as f64;
            while s < centre - n as f64 / 2.0 {
                s += n as f64;
            }
            while s >= centre + n as f64 / 2.0 {
                s -= n as f64;
            }
            (k, s)
        })
        .collect()
}

impl<'a> PsfAnalyzer<'a> {
    pub fn new(img: &'a ComplexImage) -> Result<Self> {
        let (rows, cols) = (img.rows(), img.cols());
        if img.matrix().energy() == 0.0 {
            return Err(VsarError::ZeroImage);
        }
        // unitary inverse 2-D DFT
        let mut s = img.matrix().as_slice().to_vec();
        fft_lines(&mut s, cols, Direction::Inverse);
        let mut t = vec![Complex64::new(0.0, 0.0); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                t[c * rows + r] = s[r * cols + c];
            }
        }
        fft_lines(&mut t, rows, Direction::Inverse);
        let mut row_e = vec![0.0; rows];
        let mut col_e = vec![0.0; cols];
        for c in 0..cols {
            for r in 0..rows {
                let e = t[c * rows + r].norm_sqr();
                row_e[r] += e;
                col_e[c] += e;
            }
        }
        let us = centred_indices(&row_e);
        let vs = centred_indices(&col_e);
        let mut spec = Vec::with_capacity(us.len() * vs.len());
        for (u, _) in &us {
            for (v, _) in &vs {
                spec.push(t[v * rows + u]);
            }
        }
        Ok(Self {
            img,
            spec,
            u_idx: us.into_iter().map(|(_, s)| s).collect(),
            v_idx: vs.into_iter().map(|(_, s)| s).collect(),
            norm: 1.0 / ((rows * cols) as f64).sqrt(),
        })
    }

    fn kernel(idx: &[f64], n: usize, pos: f64) -> Vec<Complex64> {
        idx.iter()
            .map(|k| Complex64::cis(-2.0 * PI * k * pos / n as f64))
            .collect()
    }

    /// Values on the separable grid `rows x cols` of fractional positions.
    fn evaluate_grid(&self, rows: &[f64], cols: &[f64]) -> Vec<Complex64> {
        let nv = self.v_idx.len();
        let col_kernels: Vec<Vec<Complex64>> = cols
            .iter()
            .map(|c| Self::kernel(&self.v_idx, self.img.cols(), *c))
            .collect();
        // partial[c][a] = sum_b spec[a, b] e_c[b]
        let partial: Vec<Vec<Complex64>> = col_kernels
            .par_iter()
            .map(|ek| {
                self.spec
                    .chunks(nv)
                    .map(|line| line.iter().zip(ek).map(|(s, e)| s * e).sum())
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for r in rows {
            let er = Self::kernel(&self.u_idx, self.img.rows(), *r);
            for p in &partial {
                let v: Complex64 = p.iter().zip(&er).map(|(a, b)| a * b).sum();
                out.push(v * self.norm);
            }
        }
        out
    }

    /// Image value at a fractional pixel position.
    pub fn value_at(&self, row: f64, col: f64) -> Complex64 {
        self.evaluate_grid(&[row], &[col])[0]
    }

    /// Coarse argmax inside the half-open pixel window, ties to the lowest
    /// row then lowest column.
    pub fn coarse_peak(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Option<(usize, usize)> {
        let m = self.img.matrix();
        let mut best: Option<(usize, usize, f64)> = None;
        for r in rows.start..rows.end.min(m.rows()) {
            for c in cols.start..cols.end.min(m.cols()) {
                let a = m.get(r, c).norm();
                if best.is_none_or(|b| a > b.2) {
                    best = Some((r, c, a));
                }
            }
        }
        best.filter(|b| b.2 > 0.0).map(|b| (b.0, b.1))
    }

    /// Refines a coarse peak: +-1 px at `1/os`, then +-1/os at `1/os^2`.
    pub fn refine(&self, coarse: (usize, usize), oversample: usize) -> Peak {
        let os = oversample.max(1) as f64;
        let mut centre = (coarse.0 as f64, coarse.1 as f64);
        let mut value = self.img.matrix().get(coarse.0, coarse.1);
        let half = oversample.max(1) as i64;
        for step in [1.0 / os, 1.0 / (os * os)] {
            let span: Vec<f64> = (-half..=half).map(|k| k as f64 * step).collect();
            let rows: Vec<f64> = span.iter().map(|d| centre.0 + d).collect();
            let cols: Vec<f64> = span.iter().map(|d| centre.1 + d).collect();
            let vals = self.evaluate_grid(&rows, &cols);
            let mut best = 0;
            for (i, v) in vals.iter().enumerate() {
                if v.norm() > vals[best].norm() {
                    best = i;
                }
            }
            centre = (rows[best / cols.len()], cols[best % cols.len()]);
            value = vals[best];
        }
        let (x_m, y_m) = self.img.pixel_to_xy(centre.0, centre.1);
        Peak {
            row: centre.0,
            col: centre.1,
            x_m,
            y_m,
            value,
        }
    }

    /// Coarse argmax in a window followed by sub-pixel refinement.
    pub fn peak_in_window(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
        oversample: usize,
    ) -> Result<Peak> {
        let coarse = self.coarse_peak(rows, cols).ok_or(VsarError::ZeroImage)?;
        Ok(self.refine(coarse, oversample))
    }

    /// Full-length cut through `peak` along `axis`, oversampled by `os`,
    /// centred on the peak.
    pub fn profile(&self, peak: &Peak, axis: CutAxis, oversample: usize) -> Result<Profile> {
        let os = oversample.max(1);
        let (along_idx, along_n, across_idx, across_n, across_pos, along_pos, spacing) = match axis {
            CutAxis::Range => (
                &self.v_idx,
                self.img.cols(),
                &self.u_idx,
                self.img.rows(),
                peak.row,
                peak.col,
                self.img.dx_m(),
            ),
            CutAxis::Azimuth => (
                &self.u_idx,
                self.img.rows(),
                &self.v_idx,
                self.img.cols(),
                peak.col,
                peak.row,
                self.img.dy_m(),
            ),
        };
        let across = Self::kernel(across_idx, across_n, across_pos);
        let nv = self.v_idx.len();
        // line[k] over the along axis with the across axis summed out
        let line: Vec<Complex64> = match axis {
            CutAxis::Range => (0..nv)
                .map(|b| {
                    (0..self.u_idx.len())
                        .map(|a| self.spec[a * nv + b] * across[a])
                        .sum()
                })
                .collect(),
            CutAxis::Azimuth => self
                .spec
                .chunks(nv)
                .map(|l| l.iter().zip(&across).map(|(s, e)| s * e).sum())
                .collect(),
        };
        let long = os * along_n;
        let mut buf = vec![Complex64::new(0.0, 0.0); long];
        for (k, z) in along_idx.iter().zip(&line) {
            let ramp = Complex64::cis(-2.0 * PI * k * along_pos / along_n as f64);
            let slot = (k.rem_euclid(long as f64)) as usize % long;
            buf[slot] += z * ramp;
        }
        let mut cut = fft_vec(&buf, Direction::Forward);
        cut.rotate_right(long / 2);
        let mags: Vec<f64> = cut.iter().map(|z| z.norm()).collect();
        Ok(Profile::from_magnitudes(&mags, spacing / os as f64)?)
    }
}

/// Global peak of a nonzero image, refined at `oversample`.
pub fn locate_peak(img: &ComplexImage, oversample: usize) -> Result<Peak> {
    let a = PsfAnalyzer::new(img)?;
    a.peak_in_window(0..img.rows(), 0..img.cols(), oversample)
}

/// Cut through `peak` along `axis`.
pub fn profile_cut(img: &ComplexImage, axis: CutAxis, peak: &Peak, oversample: usize) -> Result<Profile> {
    PsfAnalyzer::new(img)?.profile(peak, axis, oversample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{fftshift_axis, Axis, ComplexMatrix, SpectralEngine};

    // Image of a flat n x n spectral block, centred at a fractional offset.
    fn sinc_image(n: usize, m: usize, shift: (f64, f64)) -> ComplexImage {
        let spec = ComplexMatrix::from_fn(m, m, |u, v| {
            if u < n && v < n {
                let (cu, cv) = (u as f64 - (n as f64 - 1.0) / 2.0, v as f64 - (n as f64 - 1.0) / 2.0);
                Complex64::cis(2.0 * PI * (cu * shift.0 + cv * shift.1) / m as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        let e = SpectralEngine::new();
        let img = e.fft_axis(&e.fft_axis(&spec, Axis::Rows, Direction::Forward), Axis::Cols, Direction::Forward);
        let img = fftshift_axis(&fftshift_axis(&img, Axis::Rows), Axis::Cols);
        ComplexImage::new(img, 0.1, 0.1, 0.0).unwrap()
    }

    #[test]
    fn impulse_peak_is_its_pixel() {
        let mut data = vec![Complex64::new(0.0, 0.0); 32 * 32];
        data[10 * 32 + 20] = Complex64::new(1.0, 0.0);
        let img = ComplexImage::new(ComplexMatrix::new(32, 32, data).unwrap(), 0.5, 0.25, 0.0).unwrap();
        let p = locate_peak(&img, 16).unwrap();
        assert!((p.row - 10.0).abs() < 1e-9 && (p.col - 20.0).abs() < 1e-9);
        assert_eq!((p.x_m, p.y_m), ((20.0 - 16.0) * 0.5, (10.0 - 16.0) * 0.25));
    }

    #[test]
    fn subpixel_sinc_recovered() {
        for shift in [(0.3, -0.3), (0.45, 0.1), (-0.2, 0.37)] {
            let img = sinc_image(32, 64, shift);
            let p = locate_peak(&img, 16).unwrap();
            // image centre is pixel (32, 32)
            let want = (32.0 + shift.0, 32.0 + shift.1);
            assert!((p.row - want.0).abs() < 0.02, "{p:?} vs {want:?}");
            assert!((p.col - want.1).abs() < 0.02, "{p:?} vs {want:?}");
        }
    }

    #[test]
    fn tie_break_lowest_row_then_col() {
        let mut data = vec![Complex64::new(0.0, 0.0); 16 * 16];
        data[9 * 16 + 3] = Complex64::new(1.0, 0.0);
        data[4 * 16 + 12] = Complex64::new(0.0, 1.0);
        data[4 * 16 + 7] = Complex64::new(-1.0, 0.0);
        let img = ComplexImage::new(ComplexMatrix::new(16, 16, data).unwrap(), 1.0, 1.0, 0.0).unwrap();
        let a = PsfAnalyzer::new(&img).unwrap();
        assert_eq!(a.coarse_peak(0..16, 0..16), Some((4, 7)));
    }

    #[test]
    fn zero_image_rejected() {
        let img = ComplexImage::new(ComplexMatrix::zeros(8, 8).unwrap(), 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(locate_peak(&img, 16), Err(VsarError::ZeroImage)));
    }

    // Continuous sinc reference: first null at 1 unit.
    fn sinc_db(x: f64) -> f64 {
        let s = crate::dsp::sinc(x).abs();
        20.0 * s.log10()
    }

    #[test]
    fn sinc_fixture_metrics() {
        let n = 128;
        let img = sinc_image(n, 2 * n, (0.0, 0.0));
        let a = PsfAnalyzer::new(&img).unwrap();
        let peak = a.peak_in_window(0..2 * n, 0..2 * n, 16).unwrap();
        let prof = a.profile(&peak, CutAxis::Range, 16).unwrap();
        assert_eq!(prof.db[prof.peak_index()], 0.0);
        assert!((prof.spacing_m - 0.1 / 16.0).abs() < 1e-15);
        // null spacing: 2 pixels (block fills half the band)
        let delta = 2.0 * 0.1;
        let w = irw(&prof).unwrap();
        assert!((w / (0.886 * delta) - 1.0).abs() < 0.005, "irw {w}");
        let ps = pslr(&prof, DEFAULT_SIDELOBE_EXTENT).unwrap();
        assert!((ps + 13.26).abs() < 0.1, "pslr {ps}");

        // main lobe agrees with |sinc| within 0.1 dB
        let p0 = prof.peak_index();
        let (l, r) = prof.first_nulls().unwrap();
        for i in (l + 2)..(r - 1) {
            let x = (i as f64 - p0 as f64) * prof.spacing_m / delta;
            assert!((prof.db[i] - sinc_db(x)).abs() < 0.1, "{i}: {} vs {}", prof.db[i], sinc_db(x));
        }

        // ISLR reference by quadrature of sinc^2: main lobe |x| < 1,
        // sidelobes 1 < |x| < 10 * 0.886
        let quad = |a: f64, b: f64| {
            let steps = 200_000;
            let h = (b - a) / steps as f64;
            (0..steps)
                .map(|k| {
                    let x = a + (k as f64 + 0.5) * h;
                    crate::dsp::sinc(x).powi(2) * h
                })
                .sum::<f64>()
        };
        let reference = 10.0 * (quad(1.0, 10.0 * 0.886) / quad(0.0, 1.0)).log10();
        assert!((reference + 10.2).abs() < 0.1, "reference {reference}");
        let is = islr(&prof, DEFAULT_SIDELOBE_EXTENT).unwrap();
        assert!(!is.truncated);
        assert!((is.db - reference).abs() < 0.1, "islr {} vs {reference}", is.db);
    }

    #[test]
    fn boxcar_irw_is_its_width() {
        let mut mags = vec![0.0; 101];
        for m in mags.iter_mut().take(71).skip(30) {
            *m = 1.0;
        }
        let p = Profile::from_magnitudes(&mags, 0.01).unwrap();
        let w = irw(&p).unwrap();
        assert!((w - 0.40).abs() < 1e-12, "{w}");
    }

    #[test]
    fn triangle_has_no_sidelobes() {
        let mags: Vec<f64> = (0..41)
            .map(|i| (1.0 - (i as f64 - 20.0).abs() / 10.0).max(0.0))
            .collect();
        let p = Profile::from_magnitudes(&mags, 1.0).unwrap();
        assert_eq!(pslr(&p, 10.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(islr(&p, 10.0).unwrap().db, f64::NEG_INFINITY);
    }

    #[test]
    fn failures_are_reported() {
        let flat = Profile::from_magnitudes(&[1.0; 20], 1.0).unwrap();
        assert!(matches!(irw(&flat), Err(MetricError::NoHalfPowerCrossing { .. })));
        let ramp: Vec<f64> = (0..20).map(|i| 1.0 - i as f64 * 0.01).collect();
        let p = Profile::from_magnitudes(&ramp, 1.0).unwrap();
        assert!(matches!(p.first_nulls(), Err(MetricError::NoNull { .. })));
        assert!(matches!(Profile::from_magnitudes(&[], 1.0), Err(MetricError::EmptyProfile)));
    }

    #[test]
    fn truncated_islr_flagged() {
        let img = sinc_image(16, 32, (0.0, 0.0));
        let a = PsfAnalyzer::new(&img).unwrap();
        let peak = a.peak_in_window(0..32, 0..32, 8).unwrap();
        let prof = a.profile(&peak, CutAxis::Azimuth, 8).unwrap();
        assert!(islr(&prof, 40.0).unwrap().truncated);
        assert!(!islr(&prof, 5.0).unwrap().truncated);
    }
}
