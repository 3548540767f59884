//! Scenario configuration: a strict JSON document with SI units in every
//! field name. Parsing rejects unknown keys; validation reports every
//! problem at once, each tagged with its field path.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vsar_core::dsp::SincKernel;
use vsar_core::echo::{RangeModel, RvpState};
use vsar_core::geometry::{FrameGeometry, PointTarget, RadarParams, Scene};
use vsar_core::image::Method;
use vsar_core::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub radar: RadarConfig,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub scene: SceneConfig,
    #[serde(default)]
    pub echo: EchoConfig,
    #[serde(default)]
    pub focus: FocusConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub sample_rate_hz: f64,
    pub pulse_width_s: f64,
    pub prf_hz: f64,
    #[serde(default = "default_c")]
    pub speed_of_light_m_per_s: f64,
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub slant_range_m: f64,
    pub grazing_rad: f64,
    pub platform_speed_m_per_s: f64,
    pub pulses_per_frame: usize,
    /// One frame per entry.
    pub frame_center_azimuth_rad: Vec<f64>,
    /// Overrides the `v / (R_s PRF)` step when set.
    #[serde(default)]
    pub angle_step_rad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default = "default_radius")]
    pub radius_limit_m: f64,
    #[serde(default)]
    pub targets: Vec<TargetConfig>,
}

fn default_radius() -> f64 {
    Scene::empty().radius_limit_m
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            radius_limit_m: default_radius(),
            targets: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub x_m: f64,
    pub y_m: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoConfig {
    /// State of the simulated samples; `raw` is what a dechirp receiver delivers.
    #[serde(default = "default_rvp")]
    pub rvp: RvpState,
    #[serde(default)]
    pub range_model: RangeModel,
    /// Complex white noise at this SNR when set.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_rvp() -> RvpState {
    RvpState::Raw
}

impl Default for EchoConfig {
    fn default() -> Self {
        Self {
            rvp: default_rvp(),
            range_model: RangeModel::default(),
            snr_db: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocusConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    /// Output size; defaults to twice the phase-history size.
    #[serde(default)]
    pub output_rows: Option<usize>,
    #[serde(default)]
    pub output_cols: Option<usize>,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    #[serde(default = "default_extent")]
    pub sidelobe_extent_irw: f64,
    #[serde(default = "default_search")]
    pub search_radius_px: usize,
    #[serde(default = "default_taps")]
    pub interp_taps: usize,
    #[serde(default = "default_beta")]
    pub interp_beta: f64,
    /// Lifts the oracle size guard.
    #[serde(default)]
    pub oracle_force: bool,
}

fn default_method() -> Method {
    Method::Cs
}
fn default_oversample() -> usize {
    vsar_core::analysis::DEFAULT_OVERSAMPLE
}
fn default_extent() -> f64 {
    vsar_core::analysis::DEFAULT_SIDELOBE_EXTENT
}
fn default_search() -> usize {
    vsar_core::analysis::ReportOptions::default().search_radius_px
}
fn default_taps() -> usize {
    SincKernel::default().taps()
}
fn default_beta() -> f64 {
    SincKernel::default().beta()
}

impl Default for FocusConfig {
    fn default() -> Self {
        Self {
            method: default_method(),
            output_rows: None,
            output_cols: None,
            oversample: default_oversample(),
            sidelobe_extent_irw: default_extent(),
            search_radius_px: default_search(),
            interp_taps: default_taps(),
            interp_beta: default_beta(),
            oracle_force: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Vsarph,
    Vsarim,
    Pgm,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
    #[serde(default = "default_floor")]
    pub render_floor_db: f64,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn all_formats() -> Vec<Format> {
    vec![Format::Vsarph, Format::Vsarim, Format::Pgm, Format::Csv, Format::Json]
}
fn default_floor() -> f64 {
    -60.0
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_dir(),
            formats: all_formats(),
            render_floor_db: default_floor(),
        }
    }
}

/// One invalid field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  {}: {}", e.path, e.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// A configuration that passed validation, with the core types built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub radar: RadarParams,
    /// One geometry per frame, in config order.
    pub frames: Vec<FrameGeometry>,
    pub scene: Scene,
    pub kernel: SincKernel,
}

impl Scenario {
    pub fn output_dims(&self) -> (usize, usize) {
        let g = &self.frames[0];
        (
            self.config.focus.output_rows.unwrap_or(2 * g.n_pulses()),
            self.config.focus.output_cols.unwrap_or(2 * self.radar.n_fast()),
        )
    }

    pub fn report_options(&self) -> vsar_core::analysis::ReportOptions {
        vsar_core::analysis::ReportOptions {
            oversample: self.config.focus.oversample,
            sidelobe_extent: self.config.focus.sidelobe_extent_irw,
            search_radius_px: self.config.focus.search_radius_px,
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.config.outputs.formats.contains(&f)
    }
}

struct Checker(Vec<FieldError>);

impl Checker {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, v: f64) -> bool {
        if v.is_finite() && v > 0.0 {
            return true;
        }
        self.push(path, format!("must be finite and positive, got {v}"));
        false
    }

    fn finite(&mut self, path: &str, v: f64) -> bool {
        if v.is_finite() {
            return true;
        }
        self.push(path, format!("must be finite, got {v}"));
        false
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| {
            ConfigErrors(vec![FieldError {
                path: path.display().to_string(),
                message: e.to_string(),
            }])
            .into()
        })
    }

    /// The shipped default: Table-I radar parameters, `c = 3e8`,
    /// the 3x3 target grid, frames at 0 and pi/4.
    pub fn table1() -> Self {
        let p = RadarParams::table1();
        Self {
            radar: RadarConfig {
                carrier_hz: p.carrier_hz(),
                bandwidth_hz: p.bandwidth_hz(),
                sample_rate_hz: p.sample_rate_hz(),
                pulse_width_s: p.pulse_width_s(),
                prf_hz: p.prf_hz(),
                speed_of_light_m_per_s: p.speed_of_light(),
            },
            geometry: GeometryConfig {
                slant_range_m: 2500.0,
                grazing_rad: std::f64::consts::FRAC_PI_4,
                platform_speed_m_per_s: 100.0,
                pulses_per_frame: 600,
                frame_center_azimuth_rad: vec![0.0, std::f64::consts::FRAC_PI_4],
                angle_step_rad: None,
            },
            scene: SceneConfig {
                radius_limit_m: default_radius(),
                targets: Scene::default_grid()
                    .targets
                    .iter()
                    .map(|t| TargetConfig {
                        x_m: t.x,
                        y_m: t.y,
                        amplitude: t.amplitude,
                    })
                    .collect(),
            },
            echo: EchoConfig::default(),
            focus: FocusConfig::default(),
            outputs: OutputConfig::default(),
        }
    }

    /// Checks every field and builds the core types.
    pub fn validate(&self) -> Result<Scenario, ConfigErrors> {
        let mut ck = Checker(Vec::new());
        let r = &self.radar;
        let mut radar_ok = ck.positive("radar.carrier_hz", r.carrier_hz);
        radar_ok &= ck.positive("radar.bandwidth_hz", r.bandwidth_hz);
        radar_ok &= ck.positive("radar.sample_rate_hz", r.sample_rate_hz);
        radar_ok &= ck.positive("radar.pulse_width_s", r.pulse_width_s);
        radar_ok &= ck.positive("radar.prf_hz", r.prf_hz);
        radar_ok &= ck.positive("radar.speed_of_light_m_per_s", r.speed_of_light_m_per_s);
        let radar = if radar_ok {
            match RadarParams::new(
                r.carrier_hz,
                r.bandwidth_hz,
                r.sample_rate_hz,
                r.pulse_width_s,
                r.prf_hz,
                r.speed_of_light_m_per_s,
            ) {
                Ok(p) => Some(p),
                Err(e) => {
                    ck.push("radar", e.to_string());
                    None
                }
            }
        } else {
            None
        };

        let g = &self.geometry;
        let mut geom_ok = ck.positive("geometry.slant_range_m", g.slant_range_m);
        geom_ok &= ck.positive("geometry.platform_speed_m_per_s", g.platform_speed_m_per_s);
        if !(g.grazing_rad.is_finite() && (0.0..std::f64::consts::FRAC_PI_2).contains(&g.grazing_rad)) {
            ck.push("geometry.grazing_rad", format!("must lie in [0, pi/2), got {}", g.grazing_rad));
            geom_ok = false;
        }
        if g.pulses_per_frame < 2 {
            ck.push("geometry.pulses_per_frame", format!("need at least 2, got {}", g.pulses_per_frame));
            geom_ok = false;
        }
        if g.frame_center_azimuth_rad.is_empty() {
            ck.push("geometry.frame_center_azimuth_rad", "need at least one frame");
            geom_ok = false;
        }
        for (i, a) in g.frame_center_azimuth_rad.iter().enumerate() {
            geom_ok &= ck.finite(&format!("geometry.frame_center_azimuth_rad[{i}]"), *a);
        }
        if let Some(s) = g.angle_step_rad {
            geom_ok &= ck.positive("geometry.angle_step_rad", s);
        }
        let mut frames = Vec::new();
        if let (true, Some(p)) = (geom_ok, radar.as_ref()) {
            for (i, a) in g.frame_center_azimuth_rad.iter().enumerate() {
                let built = match g.angle_step_rad {
                    Some(step) => FrameGeometry::with_angle_step(
                        g.slant_range_m,
                        g.grazing_rad,
                        g.platform_speed_m_per_s,
                        *a,
                        g.pulses_per_frame,
                        step,
                    ),
                    None => FrameGeometry::new(
                        p,
                        g.slant_range_m,
                        g.grazing_rad,
                        g.platform_speed_m_per_s,
                        *a,
                        g.pulses_per_frame,
                    ),
                };
                match built {
                    Ok(f) => frames.push(f),
                    Err(e) => {
                        ck.push(format!("geometry.frame_center_azimuth_rad[{i}]"), e.to_string());
                        break;
                    }
                }
            }
        }

        let s = &self.scene;
        ck.positive("scene.radius_limit_m", s.radius_limit_m);
        for (i, t) in s.targets.iter().enumerate() {
            let px = ck.finite(&format!("scene.targets[{i}].x_m"), t.x_m);
            let py = ck.finite(&format!("scene.targets[{i}].y_m"), t.y_m);
            ck.positive(&format!("scene.targets[{i}].amplitude"), t.amplitude);
            let radius = t.x_m.hypot(t.y_m);
            if px && py && s.radius_limit_m.is_finite() && radius > s.radius_limit_m {
                ck.push(
                    format!("scene.targets[{i}]"),
                    format!(
                        "lies {radius:.3} m from scene centre, beyond the scene radius guard of {} m",
                        s.radius_limit_m
                    ),
                );
            }
        }
        let scene = Scene {
            targets: s.targets.iter().map(|t| PointTarget::new(t.x_m, t.y_m, t.amplitude)).collect(),
            radius_limit_m: s.radius_limit_m,
        };

        if let Some(snr) = self.echo.snr_db {
            ck.finite("echo.snr_db", snr);
        }

        let f = &self.focus;
        if let (Some(p), Some(fr)) = (radar.as_ref(), frames.first()) {
            if let Some(rows) = f.output_rows {
                if rows < fr.n_pulses() {
                    ck.push("focus.output_rows", format!("{rows} is smaller than the {} pulses per frame", fr.n_pulses()));
                }
            }
            if let Some(cols) = f.output_cols {
                if cols < p.n_fast() {
                    ck.push("focus.output_cols", format!("{cols} is smaller than the {} fast-time samples", p.n_fast()));
                }
            }
        }
        if f.oversample < 1 {
            ck.push("focus.oversample", "must be at least 1");
        }
        ck.positive("focus.sidelobe_extent_irw", f.sidelobe_extent_irw);
        if f.search_radius_px < 1 {
            ck.push("focus.search_radius_px", "must be at least 1");
        }
        let kernel = match SincKernel::new(f.interp_taps, f.interp_beta) {
            Ok(k) => Some(k),
            Err(e) => {
                ck.push("focus.interp_taps", e.to_string());
                None
            }
        };

        let o = &self.outputs;
        if o.directory.as_os_str().is_empty() {
            ck.push("outputs.directory", "must not be empty");
        }
        if !(o.render_floor_db.is_finite() && o.render_floor_db < 0.0) {
            ck.push("outputs.render_floor_db", format!("must be finite and negative, got {}", o.render_floor_db));
        }

        if !ck.0.is_empty() {
            return Err(ConfigErrors(ck.0));
        }
        Ok(Scenario {
            config: self.clone(),
            radar: radar.expect("checked"),
            frames,
            scene,
            kernel: kernel.expect("checked"),
        })
    }
}
