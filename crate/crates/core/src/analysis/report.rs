//! Per-target image-quality reports.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::metrics::{irw, islr, pslr, CutAxis, PsfAnalyzer, DEFAULT_OVERSAMPLE, DEFAULT_SIDELOBE_EXTENT};
use crate::geometry::{rotate_to_frame, Scene};
use crate::image::{ComplexImage, Method};

/// A decibel value whose `-inf` ("below floor") is carried as the string
/// `"-inf"` so text formats can represent it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Db(pub f64);

impl Serialize for Db {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Db {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Db;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or \"-inf\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Db, E> {
                Ok(Db(v))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Db, E> {
                Ok(Db(v as f64))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Db, E> {
                Ok(Db(v as f64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Db, E> {
                match v {
                    "-inf" => Ok(Db(f64::NEG_INFINITY)),
                    other => other.parse().map(Db).map_err(E::custom),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Metrics for one target of one image. Missing values mean the measurement
/// failed; `failure` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetQuality {
    pub method: Method,
    pub theta_k_rad: f64,
    pub target_id: usize,
    /// Truth in the image frame, m.
    pub truth_x_m: f64,
    pub truth_y_m: f64,
    pub peak_x_m: Option<f64>,
    pub peak_y_m: Option<f64>,
    pub peak_error_range_px: Option<f64>,
    pub peak_error_azimuth_px: Option<f64>,
    pub peak_magnitude: Option<f64>,
    pub irw_range_m: Option<f64>,
    pub irw_azimuth_m: Option<f64>,
    pub pslr_range_db: Option<Db>,
    pub pslr_azimuth_db: Option<Db>,
    pub islr_range_db: Option<Db>,
    pub islr_azimuth_db: Option<Db>,
    pub islr_truncated: bool,
    pub failure: Option<String>,
}

impl TargetQuality {
    fn empty(method: Method, theta_k_rad: f64, target_id: usize, truth: (f64, f64)) -> Self {
        Self {
            method,
            theta_k_rad,
            target_id,
            truth_x_m: truth.0,
            truth_y_m: truth.1,
            peak_x_m: None,
            peak_y_m: None,
            peak_error_range_px: None,
            peak_error_azimuth_px: None,
            peak_magnitude: None,
            irw_range_m: None,
            irw_azimuth_m: None,
            pslr_range_db: None,
            pslr_azimuth_db: None,
            islr_range_db: None,
            islr_azimuth_db: None,
            islr_truncated: false,
            failure: None,
        }
    }

    /// Largest peak error over both axes, in output pixels.
    pub fn peak_error_px(&self) -> Option<f64> {
        Some(self.peak_error_range_px?.abs().max(self.peak_error_azimuth_px?.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub method: Method,
    pub theta_k_rad: f64,
    pub targets: Vec<TargetQuality>,
}

/// Options for [`quality_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub oversample: usize,
    pub sidelobe_extent: f64,
    /// Half-width of the per-target peak search window, pixels.
    pub search_radius_px: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            oversample: DEFAULT_OVERSAMPLE,
            sidelobe_extent: DEFAULT_SIDELOBE_EXTENT,
            search_radius_px: 12,
        }
    }
}

/// Measures every scene target in `img`. Failures are recorded per target
/// and never abort the report.
pub fn quality_report(img: &ComplexImage, scene: &Scene, method: Method, opts: &ReportOptions) -> QualityReport {
    let theta_k = img.theta_k_rad();
    let analyzer = PsfAnalyzer::new(img);
    let targets = scene
        .targets
        .iter()
        .enumerate()
        .map(|(id, t)| {
            let truth = rotate_to_frame(t.x, t.y, theta_k);
            let mut q = TargetQuality::empty(method, theta_k, id, truth);
            let a = match &analyzer {
                Ok(a) => a,
                Err(e) => {
                    q.failure = Some(e.to_string());
                    return q;
                }
            };
            let (r, c) = img.xy_to_pixel(truth.0, truth.1);
            let w = opts.search_radius_px as f64;
            let clamp = |v: f64, n: usize| v.clamp(0.0, n as f64) as usize;
            let rows = clamp((r - w).floor(), img.rows())..clamp((r + w).ceil() + 1.0, img.rows());
            let cols = clamp((c - w).floor(), img.cols())..clamp((c + w).ceil() + 1.0, img.cols());
            let peak = match a.peak_in_window(rows, cols, opts.oversample) {
                Ok(p) => p,
                Err(e) => {
                    q.failure = Some(format!("no peak near truth: {e}"));
                    return q;
                }
            };
            q.peak_x_m = Some(peak.x_m);
            q.peak_y_m = Some(peak.y_m);
            q.peak_error_range_px = Some((peak.x_m - truth.0) / img.dx_m());
            q.peak_error_azimuth_px = Some((peak.y_m - truth.1) / img.dy_m());
            q.peak_magnitude = Some(peak.value.norm());
            let mut failures = Vec::new();
            for axis in [CutAxis::Range, CutAxis::Azimuth] {
                let prof = match a.profile(&peak, axis, opts.oversample) {
                    Ok(p) => p,
                    Err(e) => {
                        failures.push(format!("{axis:?} cut: {e}"));
                        continue;
                    }
                };
                let (w, ps, is) = (
                    irw(&prof),
                    pslr(&prof, opts.sidelobe_extent),
                    islr(&prof, opts.sidelobe_extent),
                );
                let slot = match axis {
                    CutAxis::Range => (&mut q.irw_range_m, &mut q.pslr_range_db, &mut q.islr_range_db),
                    CutAxis::Azimuth => (&mut q.irw_azimuth_m, &mut q.pslr_azimuth_db, &mut q.islr_azimuth_db),
                };
                match w {
                    Ok(v) => *slot.0 = Some(v),
                    Err(e) => failures.push(format!("{axis:?} irw: {e}")),
                }
                match ps {
                    Ok(v) => *slot.1 = Some(Db(v)),
                    Err(e) => failures.push(format!("{axis:?} pslr: {e}")),
                }
                match is {
                    Ok(v) => {
                        *slot.2 = Some(Db(v.db));
                        q.islr_truncated |= v.truncated;
                    }
                    Err(e) => failures.push(format!("{axis:?} islr: {e}")),
                }
            }
            if !failures.is_empty() {
                q.failure = Some(failures.join("; "));
            }
            q
        })
        .collect();
    QualityReport {
        method,
        theta_k_rad: theta_k,
        targets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{fftshift_axis, Axis, ComplexMatrix, Direction, SpectralEngine};
    use num_complex::Complex64;

    #[test]
    fn empty_scene_gives_empty_report() {
        let img = ComplexImage::new(ComplexMatrix::zeros(4, 4).unwrap(), 1.0, 1.0, 0.0).unwrap();
        let r = quality_report(&img, &Scene::empty(), Method::Cs, &ReportOptions::default());
        assert!(r.targets.is_empty());
    }

    #[test]
    fn zero_image_records_failure_per_target() {
        let img = ComplexImage::new(ComplexMatrix::zeros(8, 8).unwrap(), 1.0, 1.0, 0.0).unwrap();
        let r = quality_report(&img, &Scene::default_grid(), Method::Interp, &ReportOptions::default());
        assert_eq!(r.targets.len(), 9);
        assert!(r.targets.iter().all(|t| t.failure.is_some() && t.peak_x_m.is_none()));
    }

    #[test]
    fn sinc_target_measured_at_truth() {
        let (n, m) = (64, 128);
        let spec = ComplexMatrix::from_fn(m, m, |u, v| {
            if u < n && v < n { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
        .unwrap();
        let e = SpectralEngine::new();
        let img = e.fft_axis(&e.fft_axis(&spec, Axis::Rows, Direction::Forward), Axis::Cols, Direction::Forward);
        let img = fftshift_axis(&fftshift_axis(&img, Axis::Rows), Axis::Cols);
        let img = ComplexImage::new(img, 0.1, 0.1, 0.0).unwrap();
        let scene = Scene::single(0.0, 0.0);
        let r = quality_report(&img, &scene, Method::Oracle, &ReportOptions::default());
        let t = &r.targets[0];
        assert!(t.failure.is_none(), "{:?}", t.failure);
        assert!(t.peak_error_px().unwrap() < 0.02, "{t:?}");
        assert!((t.irw_range_m.unwrap() / (0.886 * 0.2) - 1.0).abs() < 0.01);
        assert!((t.pslr_azimuth_db.unwrap().0 + 13.26).abs() < 0.15);
    }

    #[test]
    fn db_sentinel_round_trips_through_serde_value() {
        use serde::de::value::{Error, F64Deserializer, StrDeserializer};
        use serde::de::IntoDeserializer;
        let s: StrDeserializer<Error> = "-inf".into_deserializer();
        assert_eq!(Db::deserialize(s).unwrap(), Db(f64::NEG_INFINITY));
        let f: F64Deserializer<Error> = (-13.2f64).into_deserializer();
        assert_eq!(Db::deserialize(f).unwrap(), Db(-13.2));
    }
}
