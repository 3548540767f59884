//! Circular video-SAR geometry: platform trajectory, differential ranges,
//! per-pulse aperture angles and the polar wavenumber mapping.
//!
//! Fast time is always the centred variable `tau_hat = tau - 2 R_a / c`,
//! sampled on `[-T_r/2, T_r/2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VsarError};
use crate::SPEED_OF_LIGHT;

/// Largest synthetic aperture accepted for one frame, rad.
pub const MAX_APERTURE_RAD: f64 = 0.1;
/// Default scene radius guard, m.
pub const DEFAULT_SCENE_RADIUS_M: f64 = 50.0;
/// Minimum fast-time samples per pulse.
pub const MIN_FAST_SAMPLES: usize = 16;

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(VsarError::InvalidParameter {
            name,
            reason: format!("must be finite and positive, got {v}"),
        })
    }
}

/// LFM waveform and sampling constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarParams {
    carrier_hz: f64,
    bandwidth_hz: f64,
    sample_rate_hz: f64,
    pulse_width_s: f64,
    prf_hz: f64,
    speed_of_light: f64,
}

impl RadarParams {
    pub fn new(
        carrier_hz: f64,
        bandwidth_hz: f64,
        sample_rate_hz: f64,
        pulse_width_s: f64,
        prf_hz: f64,
        speed_of_light: f64,
    ) -> Result<Self> {
        positive("carrier_frequency_hz", carrier_hz)?;
        positive("bandwidth_hz", bandwidth_hz)?;
        positive("sampling_frequency_hz", sample_rate_hz)?;
        positive("pulse_width_s", pulse_width_s)?;
        positive("prf_hz", prf_hz)?;
        positive("speed_of_light_m_per_s", speed_of_light)?;
        let p = Self {
            carrier_hz,
            bandwidth_hz,
            sample_rate_hz,
            pulse_width_s,
            prf_hz,
            speed_of_light,
        };
        if p.n_fast() < MIN_FAST_SAMPLES {
            return Err(VsarError::InvalidParameter {
                name: "sampling_frequency_hz",
                reason: format!(
                    "round(f_s * T_r) = {} fast-time samples, need at least {MIN_FAST_SAMPLES}",
                    p.n_fast()
                ),
            });
        }
        Ok(p)
    }

    /// 220 GHz / 1.2 GHz / 13 MHz / 80 us / 6 kHz with `c = 3e8`, the
    /// reference point-target configuration.
    pub fn table1() -> Self {
        Self::new(220e9, 1.2e9, 13e6, 80e-6, 6e3, 3e8).expect("table-1 constants are valid")
    }

    pub fn with_speed_of_light(self, c: f64) -> Result<Self> {
        Self::new(
            self.carrier_hz,
            self.bandwidth_hz,
            self.sample_rate_hz,
            self.pulse_width_s,
            self.prf_hz,
            c,
        )
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }
    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }
    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }
    pub fn pulse_width_s(&self) -> f64 {
        self.pulse_width_s
    }
    pub fn prf_hz(&self) -> f64 {
        self.prf_hz
    }
    pub fn speed_of_light(&self) -> f64 {
        self.speed_of_light
    }

    /// Chirp rate `K = B / T_r`, Hz/s.
    pub fn chirp_rate(&self) -> f64 {
        self.bandwidth_hz / self.pulse_width_s
    }

    pub fn wavelength(&self) -> f64 {
        self.speed_of_light / self.carrier_hz
    }

    /// Fast-time samples per pulse, `round(f_s * T_r)`.
    pub fn n_fast(&self) -> usize {
        (self.sample_rate_hz * self.pulse_width_s).round() as usize
    }

    /// Centred fast-time axis `tau_hat_m = (m - n/2) / f_s`.
    pub fn fast_time_axis(&self) -> Vec<f64> {
        let n = self.n_fast();
        (0..n)
            .map(|m| (m as f64 - (n / 2) as f64) / self.sample_rate_hz)
            .collect()
    }

    /// `4 pi / c`, the two-way wavenumber per hertz.
    pub fn two_way_wavenumber_per_hz(&self) -> f64 {
        4.0 * PI / self.speed_of_light
    }
}

impl Default for RadarParams {
    fn default() -> Self {
        Self::table1()
            .with_speed_of_light(SPEED_OF_LIGHT)
            .expect("valid")
    }
}

/// Circular trajectory and one frame's sub-aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameGeometry {
    slant_range_m: f64,
    grazing_rad: f64,
    speed_m_per_s: f64,
    center_azimuth_rad: f64,
    n_pulses: usize,
    angle_step_rad: f64,
}

impl FrameGeometry {
    /// Geometry whose per-pulse angle step follows from platform speed and
    /// PRF, `d_theta = v / (R_s * PRF)`.
    pub fn new(
        radar: &RadarParams,
        slant_range_m: f64,
        grazing_rad: f64,
        speed_m_per_s: f64,
        center_azimuth_rad: f64,
        n_pulses: usize,
    ) -> Result<Self> {
        positive("slant_range_m", slant_range_m)?;
        positive("platform_speed_m_per_s", speed_m_per_s)?;
        let ground = slant_range_m * grazing_rad.cos();
        let step = speed_m_per_s / (ground * radar.prf_hz());
        Self::with_angle_step(
            slant_range_m,
            grazing_rad,
            speed_m_per_s,
            center_azimuth_rad,
            n_pulses,
            step,
        )
    }

    /// Geometry with an explicit per-pulse angle step.
    pub fn with_angle_step(
        slant_range_m: f64,
        grazing_rad: f64,
        speed_m_per_s: f64,
        center_azimuth_rad: f64,
        n_pulses: usize,
        angle_step_rad: f64,
    ) -> Result<Self> {
        positive("slant_range_m", slant_range_m)?;
        positive("platform_speed_m_per_s", speed_m_per_s)?;
        positive("angle_step_rad", angle_step_rad)?;
        if !(grazing_rad.is_finite() && (0.0..PI / 2.0).contains(&grazing_rad)) {
            return Err(VsarError::InvalidParameter {
                name: "grazing_angle_rad",
                reason: format!("must lie in [0, pi/2), got {grazing_rad}"),
            });
        }
        if !center_azimuth_rad.is_finite() {
            return Err(VsarError::InvalidParameter {
                name: "frame_center_azimuth_rad",
                reason: "must be finite".into(),
            });
        }
        if n_pulses < 2 {
            return Err(VsarError::InvalidParameter {
                name: "pulses_per_frame",
                reason: format!("need at least 2 pulses, got {n_pulses}"),
            });
        }
        let aperture = n_pulses as f64 * angle_step_rad;
        if aperture >= MAX_APERTURE_RAD {
            return Err(VsarError::InvalidParameter {
                name: "pulses_per_frame",
                reason: format!(
                    "synthetic aperture {aperture:.4} rad exceeds the small-angle limit {MAX_APERTURE_RAD} rad"
                ),
            });
        }
        Ok(Self {
            slant_range_m,
            grazing_rad,
            speed_m_per_s,
            center_azimuth_rad,
            n_pulses,
            angle_step_rad,
        })
    }

    /// Table-I geometry: 2500 m slant range, 45 deg grazing, 100 m/s, 600 pulses.
    pub fn table1(radar: &RadarParams, center_azimuth_rad: f64) -> Self {
        Self::new(radar, 2500.0, PI / 4.0, 100.0, center_azimuth_rad, 600)
            .expect("table-1 geometry is valid")
    }

    pub fn with_center_azimuth(&self, center_azimuth_rad: f64) -> Result<Self> {
        Self::with_angle_step(
            self.slant_range_m,
            self.grazing_rad,
            self.speed_m_per_s,
            center_azimuth_rad,
            self.n_pulses,
            self.angle_step_rad,
        )
    }

    pub fn slant_range_m(&self) -> f64 {
        self.slant_range_m
    }
    pub fn grazing_rad(&self) -> f64 {
        self.grazing_rad
    }
    pub fn speed_m_per_s(&self) -> f64 {
        self.speed_m_per_s
    }
    pub fn center_azimuth_rad(&self) -> f64 {
        self.center_azimuth_rad
    }
    pub fn n_pulses(&self) -> usize {
        self.n_pulses
    }
    pub fn angle_step_rad(&self) -> f64 {
        self.angle_step_rad
    }

    /// Trajectory radius `R_s = R_a cos(phi)`.
    pub fn ground_radius_m(&self) -> f64 {
        self.slant_range_m * self.grazing_rad.cos()
    }

    /// Platform height `H = R_a sin(phi)`.
    pub fn height_m(&self) -> f64 {
        self.slant_range_m * self.grazing_rad.sin()
    }

    /// Total synthetic angle of the frame.
    pub fn aperture_rad(&self) -> f64 {
        self.n_pulses as f64 * self.angle_step_rad
    }

    /// Azimuth angle reached `t` seconds after the frame centre.
    pub fn angle_at_time(&self, t: f64) -> f64 {
        self.center_azimuth_rad + self.speed_m_per_s * t / self.ground_radius_m()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointTarget {
    pub x: f64,
    pub y: f64,
    pub amplitude: f64,
}

impl PointTarget {
    pub fn new(x: f64, y: f64, amplitude: f64) -> Self {
        Self { x, y, amplitude }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub targets: Vec<PointTarget>,
    pub radius_limit_m: f64,
}

impl Scene {
    pub fn new(targets: Vec<PointTarget>) -> Self {
        Self {
            targets,
            radius_limit_m: DEFAULT_SCENE_RADIUS_M,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn single(x: f64, y: f64) -> Self {
        Self::new(vec![PointTarget::new(x, y, 1.0)])
    }

    /// 3x3 grid of unit targets at 20 m spacing.
    pub fn default_grid() -> Self {
        let mut targets = Vec::with_capacity(9);
        for y in [-20.0, 0.0, 20.0] {
            for x in [-20.0, 0.0, 20.0] {
                targets.push(PointTarget::new(x, y, 1.0));
            }
        }
        Self::new(targets)
    }

    /// Checks the radius guard and amplitude sign of every target.
    pub fn validate(&self) -> Result<()> {
        positive("scene_radius_limit_m", self.radius_limit_m)?;
        for (index, t) in self.targets.iter().enumerate() {
            if !(t.x.is_finite() && t.y.is_finite()) || t.radius() > self.radius_limit_m {
                return Err(VsarError::TargetOutsideScene {
                    index,
                    radius_m: t.radius(),
                    limit_m: self.radius_limit_m,
                });
            }
            if !(t.amplitude.is_finite() && t.amplitude > 0.0) {
                return Err(VsarError::InvalidParameter {
                    name: "amplitude",
                    reason: format!("target {index} amplitude must be positive, got {}", t.amplitude),
                });
            }
        }
        Ok(())
    }

    /// Largest target distance from scene centre (0 for an empty scene).
    pub fn extent_m(&self) -> f64 {
        self.targets.iter().map(PointTarget::radius).fold(0.0, f64::max)
    }
}

/// Antenna phase centre at azimuth `theta`.
pub fn apc_position(g: &FrameGeometry, theta: f64) -> (f64, f64, f64) {
    let rs = g.ground_radius_m();
    (rs * theta.cos(), rs * theta.sin(), g.height_m())
}

/// Range to the target minus range to scene centre, from the full 3-D distance.
pub fn delta_range_exact(g: &FrameGeometry, t: &PointTarget, theta: f64) -> f64 {
    let (xa, ya, za) = apc_position(g, theta);
    let dx = xa - t.x;
    let dy = ya - t.y;
    (dx * dx + dy * dy + za * za).sqrt() - g.slant_range_m()
}

/// First-order (plane-wave) differential range.
pub fn delta_range_planar(g: &FrameGeometry, t: &PointTarget, theta: f64) -> f64 {
    let cg = g.grazing_rad().cos();
    -(t.x * cg * theta.cos() + t.y * cg * theta.sin())
}

/// Ground-plane wavenumber `(K_X, K_Y)` of fast-time sample `tau_hat` on the
/// pulse at azimuth `theta`.
pub fn wavenumber_coords(p: &RadarParams, g: &FrameGeometry, tau_hat: f64, theta: f64) -> (f64, f64) {
    let radial = radial_wavenumber(p, g, tau_hat);
    (radial * theta.cos(), radial * theta.sin())
}

/// Ground-projected radial wavenumber `(4 pi / c)(f_c + K tau_hat) cos(phi)`.
pub fn radial_wavenumber(p: &RadarParams, g: &FrameGeometry, tau_hat: f64) -> f64 {
    p.two_way_wavenumber_per_hz()
        * (p.carrier_hz() + p.chirp_rate() * tau_hat)
        * g.grazing_rad().cos()
}

/// Pulse azimuths `theta_n = theta_k + (n - (N-1)/2) d_theta`.
pub fn frame_pulse_angles(g: &FrameGeometry) -> Vec<f64> {
    let mid = (g.n_pulses() as f64 - 1.0) / 2.0;
    (0..g.n_pulses())
        .map(|n| g.center_azimuth_rad() + (n as f64 - mid) * g.angle_step_rad())
        .collect()
}

/// Ground coordinates expressed in the frame rotated to azimuth `theta_k`
/// (image axes: x along the frame-centre look direction).
pub fn rotate_to_frame(x: f64, y: f64, theta_k: f64) -> (f64, f64) {
    let (s, c) = theta_k.sin_cos();
    (x * c + y * s, -x * s + y * c)
}

/// Inverse of [`rotate_to_frame`].
pub fn rotate_from_frame(xf: f64, yf: f64, theta_k: f64) -> (f64, f64) {
    let (s, c) = theta_k.sin_cos();
    (xf * c - yf * s, xf * s + yf * c)
}
