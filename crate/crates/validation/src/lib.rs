//! Fixtures and bookkeeping for the acceptance gate.

use std::f64::consts::FRAC_PI_4;

use vsar_cli::config::{Scenario, ScenarioConfig, TargetConfig};
use vsar_core::geometry::{rotate_to_frame, FrameGeometry};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub summary: String,
}

/// Collects verdicts and prints one line per criterion.
#[derive(Debug, Default)]
pub struct Gate {
    verdicts: Vec<Verdict>,
}

impl Gate {
    pub fn record(&mut self, v: Verdict) {
        println!(
            "criterion {} [{}] {}: {}",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.title,
            v.summary
        );
        self.verdicts.push(v);
    }

    pub fn failures(&self) -> Vec<u32> {
        self.verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect()
    }
}

fn targets(pts: &[(f64, f64)]) -> Vec<TargetConfig> {
    pts.iter()
        .map(|&(x, y)| TargetConfig {
            x_m: x,
            y_m: y,
            amplitude: 1.0,
        })
        .collect()
}

/// Table-I scenario with the given targets and frame azimuths.
pub fn table1(pts: &[(f64, f64)], thetas: &[f64]) -> Scenario {
    let mut c = ScenarioConfig::table1();
    c.scene.targets = targets(pts);
    c.geometry.frame_center_azimuth_rad = thetas.to_vec();
    c.validate().expect("table-1 fixture is valid")
}

/// The 3x3 grid at frames 0 and pi/4.
pub fn table1_grid() -> Scenario {
    let c = ScenarioConfig::table1();
    assert_eq!(c.geometry.frame_center_azimuth_rad, [0.0, FRAC_PI_4]);
    c.validate().expect("table-1 config is valid")
}

/// Desk-scale problem: 64 pulses x 64 samples. Bandwidth and aperture are
/// both cut by the ratio 13 MHz / 0.8 MHz, so range and azimuth resolution
/// shrink together and the image stays square-ish.
pub fn reduced(pts: &[(f64, f64)], theta_k: f64) -> Scenario {
    let ratio = 13e6 / 0.8e6;
    let mut c = ScenarioConfig::table1();
    c.radar.sample_rate_hz = 0.8e6;
    c.radar.bandwidth_hz = 1.2e9 / ratio;
    c.geometry.pulses_per_frame = 64;
    // 600 pulses at 100 m/s span the full aperture; keep 1/ratio of it
    c.geometry.platform_speed_m_per_s = 100.0 * (600.0 / 64.0) / ratio;
    c.geometry.frame_center_azimuth_rad = vec![theta_k];
    c.scene.targets = targets(pts);
    c.validate().expect("reduced fixture is valid")
}

/// Image-frame displacement of a point target predicted by the planar
/// wavefront approximation, from the second-order expansion of the slant
/// range about the scene centre. Returns `(dx, dy)` in metres.
pub fn wavefront_curvature_shift(g: &FrameGeometry, x: f64, y: f64) -> (f64, f64) {
    let (xf, yf) = rotate_to_frame(x, y, g.center_azimuth_rad());
    let (cos, ra) = (g.grazing_rad().cos(), g.slant_range_m());
    let r2 = xf * xf + yf * yf;
    (-(r2 - cos * cos * xf * xf) / (2.0 * ra * cos), xf * yf * cos / ra)
}
