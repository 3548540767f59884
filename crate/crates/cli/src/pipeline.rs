//! Frame orchestration: simulate, focus, analyze, bench.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vsar_core::analysis::{oracle_image, quality_report, PixelGrid, QualityReport};
use vsar_core::dsp::{OpCounts, SpectralEngine};
use vsar_core::echo::{simulate_with, PhaseHistory, RvpState};
use vsar_core::formats::{read_image, read_phase_history, write_image, write_phase_history};
use vsar_core::image::{ComplexImage, Method};
use vsar_core::pfa_cs::{azimuth_wavenumber_step, focus_cs, range_wavenumber_step, CsPlan};
use vsar_core::pfa_interp::{deskew, focus_interp, InterpPlan};

use crate::config::{Format, Scenario};
use crate::output::{render_magnitude, write_atomic, write_report_json, write_reports_csv};

pub fn phase_history_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("frame_{k}.vsarph"))
}

pub fn frame_path(dir: &Path, k: usize, method: Method, ext: &str) -> PathBuf {
    dir.join(format!("frame_{k}_{}.{ext}", method.name()))
}

/// Simulated (and optionally noisy) history of frame `k`.
pub fn simulate_frame(sc: &Scenario, k: usize, seed: Option<u64>) -> anyhow::Result<PhaseHistory> {
    let e = &sc.config.echo;
    let ph = simulate_with(&sc.scene, &sc.radar, &sc.frames[k], e.rvp, e.range_model)?;
    Ok(match e.snr_db {
        Some(snr) => ph.with_noise(snr, seed.unwrap_or(e.seed).wrapping_add(k as u64))?,
        None => ph,
    })
}

/// Focuses one history with `method` on the scenario's output grid. All
/// three methods share one pixel grid.
pub fn focus(sc: &Scenario, engine: &SpectralEngine, ph: &PhaseHistory, method: Method) -> anyhow::Result<ComplexImage> {
    let (rows, cols) = sc.output_dims();
    Ok(match method {
        Method::Cs => {
            let plan = CsPlan::new(ph, sc.scene.extent_m()).with_output(rows, cols);
            focus_cs(engine, ph, &plan)?
        }
        Method::Interp => {
            let plan = InterpPlan::new(ph).with_output(rows, cols).with_kernel(sc.kernel);
            focus_interp(engine, ph, &plan)?
        }
        Method::Oracle => {
            let (p, g) = (ph.params(), ph.geometry());
            let grid = PixelGrid {
                rows,
                cols,
                dx_m: 2.0 * std::f64::consts::PI / (cols as f64 * range_wavenumber_step(p, g)),
                dy_m: 2.0 * std::f64::consts::PI / (rows as f64 * azimuth_wavenumber_step(p, g)),
            };
            let free = match ph.rvp_state() {
                RvpState::Raw => deskew(engine, ph),
                RvpState::Removed => ph.clone(),
            };
            oracle_image(&free, &grid, sc.config.focus.oracle_force)?
        }
    })
}

pub fn analyze(sc: &Scenario, img: &ComplexImage, method: Method) -> QualityReport {
    quality_report(img, &sc.scene, method, &sc.report_options())
}

pub fn write_history(path: &Path, ph: &PhaseHistory) -> anyhow::Result<()> {
    write_atomic(path, |mut w| Ok(write_phase_history(&mut w, ph)?))
}

pub fn read_history(path: &Path) -> anyhow::Result<PhaseHistory> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_phase_history(&mut BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

pub fn read_complex_image(path: &Path) -> anyhow::Result<ComplexImage> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_image(&mut BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

/// Writes the image dump and render requested by the config. Returns a
/// warning when the render was of an all-zero image.
pub fn write_image_outputs(sc: &Scenario, dir: &Path, k: usize, method: Method, img: &ComplexImage) -> anyhow::Result<Option<String>> {
    if sc.wants(Format::Vsarim) {
        write_atomic(&frame_path(dir, k, method, "vsarim"), |mut w| Ok(write_image(&mut w, img)?))?;
    }
    let mut warning = None;
    if sc.wants(Format::Pgm) {
        let r = render_magnitude(img, sc.config.outputs.render_floor_db);
        if r.all_zero {
            warning = Some(format!("frame {k} ({}): image is all zero, rendered black", method.name()));
        }
        write_atomic(&frame_path(dir, k, method, "pgm"), |w| Ok(w.write_all(&r.bytes)?))?;
    }
    Ok(warning)
}

pub fn write_report_outputs(sc: &Scenario, dir: &Path, k: usize, report: &QualityReport) -> anyhow::Result<()> {
    if sc.wants(Format::Csv) {
        write_atomic(&frame_path(dir, k, report.method, "csv"), |w| {
            write_reports_csv(w, std::slice::from_ref(report))
        })?;
    }
    if sc.wants(Format::Json) {
        write_atomic(&frame_path(dir, k, report.method, "json"), |w| write_report_json(w, report))?;
    }
    Ok(())
}

/// What one frame of `run` produced.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub frame: usize,
    pub report: QualityReport,
    pub counts: OpCounts,
    pub warnings: Vec<String>,
}

/// Runs `f` over every frame on the current rayon pool and collects the
/// failures rather than stopping at the first.
pub fn for_each_frame<T: Send>(
    sc: &Scenario,
    f: impl Fn(usize) -> anyhow::Result<T> + Sync,
) -> anyhow::Result<Vec<T>> {
    let results: Vec<anyhow::Result<T>> = (0..sc.frames.len()).into_par_iter().map(&f).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failed.push(format!("frame {k}: {e:#}")),
        }
    }
    if !failed.is_empty() {
        bail!("{} of {} frames failed:\n  {}", failed.len(), sc.frames.len(), failed.join("\n  "));
    }
    Ok(ok)
}

/// Simulate, focus, analyze and write every frame.
pub fn run(sc: &Scenario, dir: &Path, method: Method, seed: Option<u64>) -> anyhow::Result<Vec<FrameOutcome>> {
    for_each_frame(sc, |k| {
        let ph = simulate_frame(sc, k, seed)?;
        if sc.wants(Format::Vsarph) {
            write_history(&phase_history_path(dir, k), &ph)?;
        }
        let engine = SpectralEngine::new();
        let img = focus(sc, &engine, &ph, method)?;
        let mut warnings = Vec::new();
        warnings.extend(write_image_outputs(sc, dir, k, method, &img)?);
        let report = analyze(sc, &img, method);
        write_report_outputs(sc, dir, k, &report)?;
        Ok(FrameOutcome {
            frame: k,
            report,
            counts: engine.counts(),
            warnings,
        })
    })
}

/// Wall-time summary of one method over the bench repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    /// `max - min`.
    pub spread_s: f64,
    pub samples_s: Vec<f64>,
    /// Median wall time per named stage.
    pub stages_median_s: BTreeMap<String, f64>,
    /// Operation counters of one repetition (identical across repetitions).
    pub counts: OpCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub frame: usize,
    pub reps: usize,
    pub pulses: usize,
    pub fast_samples: usize,
    pub output_rows: usize,
    pub output_cols: usize,
    pub threads: usize,
    pub cs: MethodTiming,
    pub interp: MethodTiming,
    /// `cs.median_s / interp.median_s`; below 1 means chirp scaling is faster.
    pub ratio_cs_over_interp: f64,
}

pub const MIN_BENCH_REPS: usize = 3;

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn time_method(sc: &Scenario, ph: &PhaseHistory, method: Method, reps: usize) -> anyhow::Result<MethodTiming> {
    let mut samples = Vec::with_capacity(reps);
    let mut stages: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut counts: Option<OpCounts> = None;
    for _ in 0..reps {
        let engine = SpectralEngine::new();
        let start = Instant::now();
        let img = focus(sc, &engine, ph, method)?;
        let elapsed = start.elapsed();
        drop(img);
        samples.push(elapsed.as_secs_f64());
        for (name, d) in engine.stage_times() {
            stages.entry(name).or_default().push(d.as_secs_f64());
        }
        let c = engine.counts();
        if let Some(prev) = counts {
            if prev != c {
                bail!("{} operation counts changed between repetitions: {prev:?} vs {c:?}", method.name());
            }
        }
        counts = Some(c);
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(0.0, f64::max);
    Ok(MethodTiming {
        median_s: median(&samples),
        min_s: min,
        max_s: max,
        spread_s: max - min,
        samples_s: samples,
        stages_median_s: stages.into_iter().map(|(k, v)| (k, median(&v))).collect(),
        counts: counts.expect("reps >= 1"),
    })
}

/// Times `focus_cs` against `focus_interp` on one simulated frame.
/// Simulation and file I/O are excluded from the timings.
pub fn bench(sc: &Scenario, frame: usize, reps: usize, seed: Option<u64>) -> anyhow::Result<BenchReport> {
    if reps < MIN_BENCH_REPS {
        bail!("bench needs at least {MIN_BENCH_REPS} repetitions, got {reps}");
    }
    if frame >= sc.frames.len() {
        bail!("frame {frame} out of range (config has {})", sc.frames.len());
    }
    let ph = simulate_frame(sc, frame, seed)?;
    // warm the FFT plan cache so the first repetition is not penalized
    focus(sc, &SpectralEngine::new(), &ph, Method::Cs)?;
    focus(sc, &SpectralEngine::new(), &ph, Method::Interp)?;
    let cs = time_method(sc, &ph, Method::Cs, reps)?;
    let interp = time_method(sc, &ph, Method::Interp, reps)?;
    let (rows, cols) = sc.output_dims();
    Ok(BenchReport {
        frame,
        reps,
        pulses: ph.matrix().rows(),
        fast_samples: ph.matrix().cols(),
        output_rows: rows,
        output_cols: cols,
        threads: rayon::current_num_threads(),
        ratio_cs_over_interp: cs.median_s / interp.median_s,
        cs,
        interp,
    })
}

pub fn write_bench(path: &Path, b: &BenchReport) -> anyhow::Result<()> {
    write_atomic(path, |w| Ok(serde_json::to_writer_pretty(w, b)?))
}
