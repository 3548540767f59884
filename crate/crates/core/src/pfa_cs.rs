//! Interpolation-free polar reformatting by chirp scaling.
//!
//! Each pulse's fast-time axis is stretched by `delta_r = 1/cos(theta_n - theta_k)`
//! (range frequency scaling) and each range bin's slow-time axis by
//! `delta_a = f_c / (f_c + K tau_hat)` (azimuth time scaling). Both are
//! realized as chains of FFTs and unit-modulus chirp multiplies, so the
//! resampled spectrum lands on the rectangular grid without a single
//! interpolation kernel evaluation. A final zero-padded range FFT forms the
//! image.
//!
//! ```text
//! range  (per pulse):  [FFT · H1 · IFFT] · Phi_S · FFT · H2 · IFFT · Phi_I
//! azimuth (per bin):   h1 · FFT · Phi_S · IFFT · h2 · FFT · Phi_I
//! image:               zero-pad · range FFT · centre shift
//! ```
//!
//! The bracketed `H1` stage runs only for RVP-free input. On raw input the
//! remaining sandwich already deskews the history, so `H1` must be skipped.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dsp::{
    bin_frequency, fftshift_axis, Axis, ComplexMatrix, Direction, SpectralEngine,
};
use crate::echo::{PhaseHistory, RvpState};
use crate::error::{Result, VsarError};
use crate::geometry::{frame_pulse_angles, radial_wavenumber, FrameGeometry, RadarParams};
use crate::image::ComplexImage;

/// Per-pulse and per-range-bin scaling factors for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFactors {
    delta_r: Vec<f64>,
    delta_a: Vec<f64>,
    doppler_rate: f64,
    alpha: f64,
}

impl ScalingFactors {
    /// Explicit factors, for degenerate or synthetic configurations.
    pub fn new(delta_r: Vec<f64>, delta_a: Vec<f64>, doppler_rate: f64, chirp_rate: f64) -> Result<Self> {
        if delta_r.iter().chain(&delta_a).any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(VsarError::InvalidParameter {
                name: "delta",
                reason: "scaling factors must be finite and positive".into(),
            });
        }
        if !(doppler_rate.is_finite() && doppler_rate != 0.0) {
            return Err(VsarError::InvalidParameter {
                name: "doppler_rate",
                reason: format!("must be finite and nonzero, got {doppler_rate}"),
            });
        }
        Ok(Self {
            delta_r,
            delta_a,
            doppler_rate,
            alpha: -PI * chirp_rate,
        })
    }

    /// Range scaling factor per pulse.
    pub fn delta_r(&self) -> &[f64] {
        &self.delta_r
    }
    /// Azimuth scaling factor per fast-time bin.
    pub fn delta_a(&self) -> &[f64] {
        &self.delta_a
    }
    /// Doppler rate at the aperture centre `K_a = -2 v^2 / (lambda R_a)`, Hz/s.
    pub fn doppler_rate(&self) -> f64 {
        self.doppler_rate
    }
    /// Dechirp chirp constant `-pi K`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub fn scaling_factors(p: &RadarParams, g: &FrameGeometry) -> ScalingFactors {
    let delta_r = frame_pulse_angles(g)
        .iter()
        .map(|th| 1.0 / (th - g.center_azimuth_rad()).cos())
        .collect();
    let fc = p.carrier_hz();
    let delta_a = p
        .fast_time_axis()
        .iter()
        .map(|t| fc / (fc + p.chirp_rate() * t))
        .collect();
    let v = g.speed_m_per_s();
    let ka = -2.0 * v * v / (p.wavelength() * g.slant_range_m());
    ScalingFactors {
        delta_r,
        delta_a,
        doppler_rate: ka,
        alpha: -PI * p.chirp_rate(),
    }
}

// Stage functions. All are unit modulus by construction.

/// Range deskew / RVP filter `H1(f) = exp(j pi f^2 / K)`.
pub fn range_h1(f: f64, k: f64) -> Complex64 {
    Complex64::cis(PI * f * f / k)
}

/// Range scaling chirp `Phi_S(tau) = exp(j pi K (1 - delta) tau^2)`.
pub fn range_phi_s(tau: f64, k: f64, delta: f64) -> Complex64 {
    Complex64::cis(PI * k * (1.0 - delta) * tau * tau)
}

/// Range inverse filter: residual-chirp removal plus the shift that recentres
/// the scaled axis on the carrier.
pub fn range_h2(f: f64, k: f64, fc: f64, delta: f64) -> Complex64 {
    let shift = (delta - 1.0) * fc / (delta * k);
    Complex64::cis(-PI * f * f / (delta * k) + 2.0 * PI * f * shift)
}

/// Range inverse scaling chirp `exp(j pi K delta (delta-1) (tau + (delta-1) f_c/(delta K))^2)`.
pub fn range_phi_i(tau: f64, k: f64, fc: f64, delta: f64) -> Complex64 {
    let u = tau + (delta - 1.0) * fc / (delta * k);
    Complex64::cis(PI * k * delta * (delta - 1.0) * u * u)
}

/// Azimuth pre-chirp `h1(t) = exp(j pi K_a t^2)`.
pub fn azimuth_h1(t: f64, ka: f64) -> Complex64 {
    Complex64::cis(PI * ka * t * t)
}

/// Azimuth scaling filter `exp(j pi (delta-1) f^2 / (delta K_a))`.
pub fn azimuth_phi_s(f: f64, ka: f64, delta: f64) -> Complex64 {
    Complex64::cis(PI * (delta - 1.0) * f * f / (delta * ka))
}

/// Azimuth post-chirp `h2(t) = exp(-j pi delta K_a t^2)`; cancels `h1` at `delta = 1`.
pub fn azimuth_h2(t: f64, ka: f64, delta: f64) -> Complex64 {
    Complex64::cis(-PI * delta * ka * t * t)
}

/// Azimuth inverse filter `exp(-j pi (delta-1) f^2 / (delta^2 K_a))`.
pub fn azimuth_phi_i(f: f64, ka: f64, delta: f64) -> Complex64 {
    Complex64::cis(-PI * (delta - 1.0) * f * f / (delta * delta * ka))
}

/// Everything the chirp-scaling focuser needs beyond the phase history.
#[derive(Debug, Clone, PartialEq)]
pub struct CsPlan {
    pub factors: ScalingFactors,
    /// Radius of the imaged scene, used for the aliasing guards.
    pub support_radius_m: f64,
    pub out_rows: usize,
    pub out_cols: usize,
}

impl CsPlan {
    /// Plan with the frame's own scaling factors and 2x oversampled output.
    pub fn new(ph: &PhaseHistory, support_radius_m: f64) -> Self {
        Self {
            factors: scaling_factors(ph.params(), ph.geometry()),
            support_radius_m,
            out_rows: 2 * ph.matrix().rows(),
            out_cols: 2 * ph.matrix().cols(),
        }
    }

    pub fn with_output(mut self, rows: usize, cols: usize) -> Self {
        self.out_rows = rows;
        self.out_cols = cols;
        self
    }

    pub fn with_factors(mut self, factors: ScalingFactors) -> Self {
        self.factors = factors;
        self
    }

    fn check(&self, ph: &PhaseHistory) -> Result<()> {
        let (rows, cols) = ph.matrix().shape();
        if self.factors.delta_r.len() != rows || self.factors.delta_a.len() != cols {
            return Err(VsarError::ShapeMismatch {
                rows: self.factors.delta_r.len(),
                cols: self.factors.delta_a.len(),
                len: rows * cols,
            });
        }
        if self.out_rows < rows || self.out_cols < cols {
            return Err(VsarError::OutputTooSmall {
                rows: self.out_rows,
                cols: self.out_cols,
                min_rows: rows,
                min_cols: cols,
            });
        }
        if !(self.support_radius_m.is_finite() && self.support_radius_m >= 0.0) {
            return Err(VsarError::InvalidParameter {
                name: "support_radius_m",
                reason: format!("must be finite and non-negative, got {}", self.support_radius_m),
            });
        }
        Ok(())
    }
}

fn check_range_support(ph: &PhaseHistory, plan: &CsPlan) -> Result<()> {
    let p = ph.params();
    let k = p.chirp_rate();
    let nyquist = p.sample_rate_hz() / 2.0;
    let occupied =
        2.0 * k * ph.geometry().grazing_rad().cos() * plan.support_radius_m / p.speed_of_light();
    for (pulse, &d) in plan.factors.delta_r.iter().enumerate() {
        let band = d * occupied + k * (d - 1.0).abs() * p.pulse_width_s() / 2.0;
        if band >= nyquist {
            return Err(VsarError::RangeSupportOverflow {
                pulse,
                band_hz: band,
                nyquist_hz: nyquist,
            });
        }
    }
    Ok(())
}

fn check_azimuth_support(ph: &PhaseHistory, plan: &CsPlan) -> Result<()> {
    let p = ph.params();
    let g = ph.geometry();
    let nyquist = p.prf_hz() / 2.0;
    let k_max = radial_wavenumber(p, g, p.pulse_width_s() / 2.0);
    let occupied =
        plan.support_radius_m * k_max * g.speed_m_per_s() / (2.0 * PI * g.ground_radius_m());
    let chirp = plan.factors.doppler_rate.abs() * g.n_pulses() as f64 / p.prf_hz() / 2.0;
    for (bin, &d) in plan.factors.delta_a.iter().enumerate() {
        let band = d * occupied + chirp;
        if band >= nyquist {
            return Err(VsarError::AzimuthSupportOverflow {
                bin,
                band_hz: band,
                nyquist_hz: nyquist,
            });
        }
    }
    Ok(())
}

/// Stretches every pulse onto the frame-centre range wavenumber grid.
///
/// Output pulse `n` is `s_R(delta_r(n) tau_hat + (delta_r(n) - 1) f_c / K)`,
/// where `s_R` is the RVP-free history. Accepts raw or RVP-free input and
/// always returns an RVP-free history.
pub fn range_chirp_scaling(
    engine: &SpectralEngine,
    ph: &PhaseHistory,
    plan: &CsPlan,
) -> Result<PhaseHistory> {
    plan.check(ph)?;
    check_range_support(ph, plan)?;
    let p = ph.params();
    let (k, fc, fs) = (p.chirp_rate(), p.carrier_hz(), p.sample_rate_hz());
    let n = ph.matrix().cols();
    let tau = ph.tau_hat();
    let freq: Vec<f64> = (0..n).map(|m| bin_frequency(m, n, fs)).collect();
    let delta = &plan.factors.delta_r;

    let mut m = ph.matrix().clone();
    engine.stage("range_scaling", || {
        if ph.rvp_state() == RvpState::Removed {
            engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
            engine.multiply_in_place(&mut m, |_, c| range_h1(freq[c], k));
            engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Inverse);
        }
        engine.multiply_in_place(&mut m, |r, c| range_phi_s(tau[c], k, delta[r]));
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
        engine.multiply_in_place(&mut m, |r, c| range_h2(freq[c], k, fc, delta[r]));
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Inverse);
        engine.multiply_in_place(&mut m, |r, c| range_phi_i(tau[c], k, fc, delta[r]));
    });
    Ok(ph.with_matrix(m, RvpState::Removed))
}

/// Slow time of row `r` in an `m`-row azimuth buffer whose first `n` rows
/// hold the pulses, on a circular axis centred on the middle pulse.
pub fn azimuth_time(r: usize, n: usize, m: usize, prf: f64) -> f64 {
    let mut s = r as f64 - (n as f64 - 1.0) / 2.0;
    if s >= m as f64 / 2.0 {
        s -= m as f64;
    }
    s / prf
}

/// Time-scales every range bin by `delta_a` and returns its azimuth spectrum.
///
/// The input pulses occupy rows `[0, n_pulses)` of a zero-padded
/// `plan.out_rows`-row buffer. Output column `m` is the unitary azimuth DFT
/// of `s(tau_hat_m, delta_a(m) t)`; rows are unshifted Doppler bins.
pub fn azimuth_chirp_scaling(
    engine: &SpectralEngine,
    scaled: &PhaseHistory,
    plan: &CsPlan,
) -> Result<ComplexMatrix> {
    plan.check(scaled)?;
    if scaled.rvp_state() != RvpState::Removed {
        return Err(VsarError::WrongRvpState {
            expected: RvpState::Removed.name(),
            found: scaled.rvp_state().name(),
        });
    }
    check_azimuth_support(scaled, plan)?;
    let prf = scaled.params().prf_hz();
    let (n, cols) = scaled.matrix().shape();
    let rows = plan.out_rows;
    let ka = plan.factors.doppler_rate;
    let delta = &plan.factors.delta_a;
    let t: Vec<f64> = (0..rows).map(|r| azimuth_time(r, n, rows, prf)).collect();
    let f: Vec<f64> = (0..rows).map(|r| bin_frequency(r, rows, prf)).collect();

    // Work on the transpose so each range bin is one contiguous line.
    let mut m = scaled.matrix().zero_pad(rows, cols)?.transpose();
    engine.stage("azimuth_scaling", || {
        engine.multiply_in_place(&mut m, |_, r| azimuth_h1(t[r], ka));
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
        engine.multiply_in_place(&mut m, |b, r| azimuth_phi_s(f[r], ka, delta[b]));
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Inverse);
        engine.multiply_in_place(&mut m, |b, r| azimuth_h2(t[r], ka, delta[b]));
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
        engine.multiply_in_place(&mut m, |b, r| azimuth_phi_i(f[r], ka, delta[b]));
    });
    Ok(m.transpose())
}

/// Range wavenumber step per fast-time sample on the frame-centre axis, rad/m.
pub fn range_wavenumber_step(p: &RadarParams, g: &FrameGeometry) -> f64 {
    p.two_way_wavenumber_per_hz() * g.grazing_rad().cos() * p.chirp_rate() / p.sample_rate_hz()
}

/// Cross-range wavenumber step per pulse after azimuth scaling, rad/m.
pub fn azimuth_wavenumber_step(p: &RadarParams, g: &FrameGeometry) -> f64 {
    radial_wavenumber(p, g, 0.0) * g.angle_step_rad()
}

/// Full chirp-scaling image formation.
pub fn focus_cs(engine: &SpectralEngine, ph: &PhaseHistory, plan: &CsPlan) -> Result<ComplexImage> {
    let scaled = range_chirp_scaling(engine, ph, plan)?;
    let az = azimuth_chirp_scaling(engine, &scaled, plan)?;
    let img = engine.stage("range_compression", || -> Result<ComplexMatrix> {
        let mut m = az.zero_pad(plan.out_rows, plan.out_cols)?;
        engine.fft_axis_in_place(&mut m, Axis::Cols, Direction::Forward);
        Ok(fftshift_axis(&fftshift_axis(&m, Axis::Cols), Axis::Rows))
    })?;
    let (p, g) = (ph.params(), ph.geometry());
    let dx = 2.0 * PI / (plan.out_cols as f64 * range_wavenumber_step(p, g));
    let dy = 2.0 * PI / (plan.out_rows as f64 * azimuth_wavenumber_step(p, g));
    ComplexImage::new(img, dx, dy, g.center_azimuth_rad())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{fft_vec, relative_error, OpCounts};
    use crate::echo::simulate;
    use crate::geometry::{PointTarget, Scene};
    use proptest::prelude::*;

    fn table1(theta_k: f64) -> (RadarParams, FrameGeometry) {
        let p = RadarParams::table1();
        (p, FrameGeometry::table1(&p, theta_k))
    }

    // Reduced frame that still keeps the Table-I waveform.
    fn reduced(theta_k: f64, pulses: usize) -> (RadarParams, FrameGeometry) {
        let p = RadarParams::table1();
        (p, FrameGeometry::new(&p, 2500.0, PI / 4.0, 100.0, theta_k, pulses).unwrap())
    }

    #[test]
    fn scaling_factor_examples() {
        let (p, g) = table1(0.3);
        let sf = scaling_factors(&p, &g);
        assert!((sf.doppler_rate() + 5866.67).abs() < 0.01);
        assert!(sf.doppler_rate() < 0.0);
        assert!((sf.alpha() / (-PI * 1.5e13) - 1.0).abs() < 1e-14);
        let dr = sf.delta_r();
        assert!(dr.iter().all(|d| *d >= 1.0));
        for i in 0..dr.len() {
            assert_eq!(dr[i], dr[dr.len() - 1 - i]);
        }
        let da = sf.delta_a();
        assert_eq!(da[520], 1.0);
        assert!(da.windows(2).all(|w| w[1] < w[0]));
        // tau_hat = +40 us sits one step past the last sample
        let edge: f64 = 220e9 / (220e9 + 1.5e13 * 40e-6);
        assert!((edge - 0.99728).abs() < 1e-5);
        assert!((1.0 / (PI / 3.0).cos() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn stage_functions_reduce_to_identity_at_unit_delta() {
        for x in [-3e6, -1.0, 0.0, 2.5e6] {
            assert_eq!(range_phi_s(x * 1e-12, 1.5e13, 1.0), Complex64::new(1.0, 0.0));
            assert_eq!(range_phi_i(x * 1e-12, 1.5e13, 220e9, 1.0), Complex64::new(1.0, 0.0));
            let t = x * 1e-8;
            let prod = azimuth_h1(t, -5866.7) * azimuth_h2(t, -5866.7, 1.0);
            assert!((prod - 1.0).norm() < 1e-12);
            assert_eq!(azimuth_phi_s(x, -5866.7, 1.0), Complex64::new(1.0, 0.0));
            let h = range_h1(x, 1.5e13) * range_h2(x, 1.5e13, 220e9, 1.0);
            assert!((h - 1.0).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn stage_functions_are_unit_modulus(
            x in -1.0f64..1.0, d in 0.9f64..1.1, k in 1e12f64..1e14, ka in -1e4f64..-1.0
        ) {
            let tau = x * 40e-6;
            let f = x * 6.5e6;
            let t = x * 0.1;
            let fa = x * 3e3;
            for z in [
                range_h1(f, k), range_phi_s(tau, k, d), range_h2(f, k, 220e9, d),
                range_phi_i(tau, k, 220e9, d), azimuth_h1(t, ka), azimuth_phi_s(fa, ka, d),
                azimuth_h2(t, ka, d), azimuth_phi_i(fa, ka, d),
            ] {
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn centre_target_range_scaling_is_identity() {
        let (p, g) = reduced(0.0, 32);
        let ph = simulate(&Scene::single(0.0, 0.0), &p, &g, RvpState::Raw).unwrap();
        let plan = CsPlan::new(&ph, 0.0);
        let e = SpectralEngine::new();
        let out = range_chirp_scaling(&e, &ph, &plan).unwrap();
        let err = relative_error(out.matrix().as_slice(), ph.matrix().as_slice());
        // delta_r departs from 1 by ~1e-8 on the edge pulses
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn unit_delta_range_chain_is_exact_identity_on_rvp_free_input() {
        let (p, g) = reduced(0.2, 16);
        let ph = simulate(&Scene::single(12.0, -9.0), &p, &g, RvpState::Removed).unwrap();
        let sf = ScalingFactors::new(vec![1.0; 16], scaling_factors(&p, &g).delta_a().to_vec(), -5866.7, p.chirp_rate()).unwrap();
        let plan = CsPlan::new(&ph, 15.0).with_factors(sf);
        let out = range_chirp_scaling(&SpectralEngine::new(), &ph, &plan).unwrap();
        let err = relative_error(out.matrix().as_slice(), ph.matrix().as_slice());
        // delta_r departs from 1 by ~1e-8 on the edge pulses
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn edge_pulse_beat_frequency_scales_by_delta() {
        // widen the aperture so delta_r - 1 is measurable
        let p = RadarParams::table1();
        let g = FrameGeometry::with_angle_step(2500.0, PI / 4.0, 100.0, 0.0, 9, 0.01).unwrap();
        let ph = simulate(&Scene::single(30.0, 0.0), &p, &g, RvpState::Removed).unwrap();
        let plan = CsPlan::new(&ph, 30.0);
        let out = range_chirp_scaling(&SpectralEngine::new(), &ph, &plan).unwrap();
        let peak = |row: &[Complex64]| -> f64 {
            // 16x zero-padded spectrum peak
            let n = row.len();
            let mut pad = row.to_vec();
            pad.resize(16 * n, Complex64::new(0.0, 0.0));
            let s = fft_vec(&pad, Direction::Forward);
            let (i, _) = s
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            bin_frequency(i, 16 * n, p.sample_rate_hz())
        };
        let d = plan.factors.delta_r()[0];
        assert!(d > 1.00007);
        let fin = peak(ph.matrix().row(0));
        let fout = peak(out.matrix().row(0));
        assert!(((fout / fin) - d).abs() / d < 1e-3, "{fout} / {fin} vs {d}");
    }

    #[test]
    fn range_support_guard_names_pulse() {
        let (p, g) = reduced(0.0, 8);
        let ph = simulate(&Scene::empty(), &p, &g, RvpState::Raw).unwrap();
        let plan = CsPlan::new(&ph, 500.0);
        assert!(matches!(
            range_chirp_scaling(&SpectralEngine::new(), &ph, &plan),
            Err(VsarError::RangeSupportOverflow { pulse: 0, .. })
        ));
    }

    #[test]
    fn azimuth_support_guard_and_state_check() {
        let (p, g) = reduced(0.0, 64);
        let raw = simulate(&Scene::empty(), &p, &g, RvpState::Raw).unwrap();
        let e = SpectralEngine::new();
        assert!(matches!(
            azimuth_chirp_scaling(&e, &raw, &CsPlan::new(&raw, 10.0)),
            Err(VsarError::WrongRvpState { .. })
        ));
        let free = simulate(&Scene::empty(), &p, &g, RvpState::Removed).unwrap();
        assert!(matches!(
            azimuth_chirp_scaling(&e, &free, &CsPlan::new(&free, 90.0)),
            Err(VsarError::AzimuthSupportOverflow { .. })
        ));
    }

    #[test]
    fn unit_delta_azimuth_chain_is_plain_fft() {
        let (p, g) = reduced(0.5, 40);
        let ph = simulate(&Scene::single(-8.0, 11.0), &p, &g, RvpState::Removed).unwrap();
        let sf = ScalingFactors::new(vec![1.0; 40], vec![1.0; p.n_fast()], -5866.7, p.chirp_rate()).unwrap();
        let plan = CsPlan::new(&ph, 15.0).with_factors(sf);
        let e = SpectralEngine::new();
        let out = azimuth_chirp_scaling(&e, &ph, &plan).unwrap();
        let expect = e.fft_axis(&ph.matrix().zero_pad(80, p.n_fast()).unwrap(), Axis::Rows, Direction::Forward);
        assert!(relative_error(out.as_slice(), expect.as_slice()) < 1e-9);
    }

    #[test]
    fn centre_target_azimuth_output_peaks_at_zero_doppler() {
        let (p, g) = reduced(0.0, 64);
        let ph = simulate(&Scene::single(0.0, 0.0), &p, &g, RvpState::Removed).unwrap();
        let plan = CsPlan::new(&ph, 0.0);
        let out = azimuth_chirp_scaling(&SpectralEngine::new(), &ph, &plan).unwrap();
        for c in [0, 300, 520, 1039] {
            let col = out.column(c);
            let best = (0..col.len()).max_by(|a, b| col[*a].norm().total_cmp(&col[*b].norm())).unwrap();
            assert_eq!(best, 0, "column {c}");
        }
    }

    #[test]
    fn focus_conserves_energy_and_counts_ops() {
        let (p, g) = reduced(0.7, 48);
        let scene = Scene::new(vec![PointTarget::new(5.0, -3.0, 1.0), PointTarget::new(-4.0, 6.0, 0.5)]);
        for (state, ffts, muls) in [(RvpState::Raw, 6, 7), (RvpState::Removed, 8, 8)] {
            let ph = simulate(&scene, &p, &g, state).unwrap();
            let e = SpectralEngine::new();
            let img = focus_cs(&e, &ph, &CsPlan::new(&ph, scene.extent_m())).unwrap();
            let (ein, eout) = (ph.matrix().energy(), img.matrix().energy());
            assert!(((eout - ein) / ein).abs() < 1e-9);
            assert_eq!(
                e.counts(),
                OpCounts { fft_passes: ffts, multiply_passes: muls, kernel_evals: 0 }
            );
            assert_eq!(img.rows(), 96);
            assert_eq!(img.cols(), 2080);
        }
    }

    #[test]
    fn degenerate_factors_reduce_to_deskew_plus_2d_fft() {
        let (p, g) = reduced(0.0, 24);
        let ph = simulate(&Scene::single(7.0, 3.0), &p, &g, RvpState::Raw).unwrap();
        let sf = ScalingFactors::new(vec![1.0; 24], vec![1.0; p.n_fast()], -5866.7, p.chirp_rate()).unwrap();
        let plan = CsPlan::new(&ph, 10.0).with_factors(sf);
        let e = SpectralEngine::new();
        let img = focus_cs(&e, &ph, &plan).unwrap();

        let n = p.n_fast();
        let mut rows = Vec::new();
        for r in 0..24 {
            let mut s = fft_vec(ph.matrix().row(r), Direction::Forward);
            for (m, z) in s.iter_mut().enumerate() {
                let f = bin_frequency(m, n, p.sample_rate_hz());
                *z *= Complex64::cis(-PI * f * f / p.chirp_rate());
            }
            rows.extend(fft_vec(&s, Direction::Inverse));
        }
        let deskew = ComplexMatrix::new(24, n, rows).unwrap();
        let padded = deskew.zero_pad(48, 2 * n).unwrap();
        let spec = e.fft_axis(&e.fft_axis(&padded, Axis::Rows, Direction::Forward), Axis::Cols, Direction::Forward);
        let expect = fftshift_axis(&fftshift_axis(&spec, Axis::Cols), Axis::Rows);
        assert!(relative_error(img.matrix().as_slice(), expect.as_slice()) < 1e-9);
    }

    #[test]
    fn empty_scene_gives_zero_image_and_centre_target_peaks_at_centre() {
        let (p, g) = reduced(0.0, 32);
        let e = SpectralEngine::new();
        let ph = simulate(&Scene::empty(), &p, &g, RvpState::Raw).unwrap();
        let img = focus_cs(&e, &ph, &CsPlan::new(&ph, 0.0)).unwrap();
        assert_eq!(img.matrix().energy(), 0.0);

        let ph = simulate(&Scene::single(0.0, 0.0), &p, &g, RvpState::Raw).unwrap();
        let img = focus_cs(&e, &ph, &CsPlan::new(&ph, 0.0)).unwrap();
        let a = img.matrix().as_slice();
        let best = (0..a.len()).max_by(|x, y| a[*x].norm().total_cmp(&a[*y].norm())).unwrap();
        assert_eq!((best / img.cols(), best % img.cols()), (32, 1040));
    }

    #[test]
    fn output_smaller_than_history_rejected() {
        let (p, g) = reduced(0.0, 8);
        let ph = simulate(&Scene::empty(), &p, &g, RvpState::Raw).unwrap();
        let plan = CsPlan::new(&ph, 0.0).with_output(4, 2080);
        assert!(matches!(
            focus_cs(&SpectralEngine::new(), &ph, &plan),
            Err(VsarError::OutputTooSmall { .. })
        ));
    }
}
