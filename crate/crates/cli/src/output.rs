//! File emission: atomic writes, magnitude renders and report files.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::Context;
use vsar_core::analysis::{QualityReport, TargetQuality};
use vsar_core::image::ComplexImage;

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    // temp files are created owner-only; outputs are ordinary files
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Result of [`render_magnitude`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Render {
    pub bytes: Vec<u8>,
    /// Set when the image was identically zero and rendered black.
    pub all_zero: bool,
}

/// 16-bit binary PGM of `20 log10(|s| / max|s|)` clamped to `[floor_db, 0]`
/// and mapped linearly onto `[0, 65535]`. The first raster line is the last
/// image row, so +y points up.
pub fn render_magnitude(img: &ComplexImage, floor_db: f64) -> Render {
    let (rows, cols) = (img.rows(), img.cols());
    let mags: Vec<f64> = img.matrix().as_slice().iter().map(|z| z.norm()).collect();
    let max = mags.iter().copied().fold(0.0, f64::max);
    let mut bytes = format!("P5\n{cols} {rows}\n65535\n").into_bytes();
    bytes.reserve(2 * rows * cols);
    for r in (0..rows).rev() {
        for &m in &mags[r * cols..(r + 1) * cols] {
            let level = if max > 0.0 {
                let db = (20.0 * (m / max).log10()).clamp(floor_db, 0.0);
                ((db - floor_db) / -floor_db * 65535.0).round() as u16
            } else {
                0
            };
            bytes.extend_from_slice(&level.to_be_bytes());
        }
    }
    Render {
        bytes,
        all_zero: max == 0.0,
    }
}

pub fn write_report_json<W: Write>(w: W, report: &QualityReport) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(w, report)?;
    Ok(())
}

pub fn read_report_json<R: Read>(r: R) -> anyhow::Result<QualityReport> {
    Ok(serde_json::from_reader(r)?)
}

/// One row per target per report.
pub fn write_reports_csv<W: Write>(w: W, reports: &[QualityReport]) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut any = false;
    for t in reports.iter().flat_map(|r| &r.targets) {
        out.serialize(t)?;
        any = true;
    }
    if !any {
        out.write_record(CSV_HEADER)?;
    }
    out.flush()?;
    Ok(())
}

const CSV_HEADER: [&str; 18] = [
    "method",
    "theta_k_rad",
    "target_id",
    "truth_x_m",
    "truth_y_m",
    "peak_x_m",
    "peak_y_m",
    "peak_error_range_px",
    "peak_error_azimuth_px",
    "peak_magnitude",
    "irw_range_m",
    "irw_azimuth_m",
    "pslr_range_db",
    "pslr_azimuth_db",
    "islr_range_db",
    "islr_azimuth_db",
    "islr_truncated",
    "failure",
];

/// Regroups rows into reports by consecutive (method, theta_k).
pub fn read_reports_csv<R: Read>(r: R) -> anyhow::Result<Vec<QualityReport>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out: Vec<QualityReport> = Vec::new();
    for row in rd.deserialize() {
        let t: TargetQuality = row?;
        match out.last_mut() {
            Some(last) if last.method == t.method && last.theta_k_rad.to_bits() == t.theta_k_rad.to_bits() => {
                last.targets.push(t)
            }
            _ => out.push(QualityReport {
                method: t.method,
                theta_k_rad: t.theta_k_rad,
                targets: vec![t],
            }),
        }
    }
    Ok(out)
}
