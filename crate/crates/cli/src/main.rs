use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use vsar_core::dsp::SpectralEngine;
use vsar_core::image::Method;

use vsar_cli::config::{ConfigErrors, Scenario, ScenarioConfig};
use vsar_cli::pipeline::{self, for_each_frame};

#[derive(Parser)]
#[command(name = "vsar", version, about = "Simulate, focus and measure video SAR frames")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario configuration (strict JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Noise seed; overrides `echo.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the phase history of every frame.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Focus previously simulated frames.
    Focus {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        method: Method,
    },
    /// Measure focused frames against the scene truth.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Defaults to `focus.method`.
        #[arg(long)]
        method: Option<Method>,
    },
    /// Time chirp scaling against interpolation on one frame.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        frame: usize,
    },
    /// Simulate, focus and analyze every frame.
    Run {
        #[command(flatten)]
        common: Common,
        /// Defaults to `focus.method`.
        #[arg(long)]
        method: Option<Method>,
    },
}

fn load(common: &Common) -> anyhow::Result<(Scenario, PathBuf)> {
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let cfg = ScenarioConfig::load(&common.config)?;
    let sc = cfg.validate()?;
    let dir = common.out.clone().unwrap_or_else(|| sc.config.outputs.directory.clone());
    Ok((sc, dir))
}

fn simulate(common: &Common) -> anyhow::Result<()> {
    let (sc, dir) = load(common)?;
    for_each_frame(&sc, |k| {
        let ph = pipeline::simulate_frame(&sc, k, common.seed)?;
        let path = pipeline::phase_history_path(&dir, k);
        pipeline::write_history(&path, &ph)?;
        println!("frame {k}: wrote {}", path.display());
        Ok(())
    })?;
    Ok(())
}

fn focus(common: &Common, method: Method) -> anyhow::Result<()> {
    let (sc, dir) = load(common)?;
    for_each_frame(&sc, |k| {
        let ph = pipeline::read_history(&pipeline::phase_history_path(&dir, k))?;
        let engine = SpectralEngine::new();
        let img = pipeline::focus(&sc, &engine, &ph, method)?;
        if let Some(w) = pipeline::write_image_outputs(&sc, &dir, k, method, &img)? {
            eprintln!("warning: {w}");
        }
        let c = engine.counts();
        println!(
            "frame {k}: {} {}x{} (fft passes {}, multiplies {}, kernel evals {})",
            method.name(),
            img.rows(),
            img.cols(),
            c.fft_passes,
            c.multiply_passes,
            c.kernel_evals
        );
        Ok(())
    })?;
    Ok(())
}

fn print_report(k: usize, r: &vsar_core::analysis::QualityReport) {
    for t in &r.targets {
        match &t.failure {
            Some(f) => println!("frame {k} {} target {}: {f}", r.method.name(), t.target_id),
            None => println!(
                "frame {k} {} target {}: peak error {:.3} px, IRW {:.4}/{:.4} m, PSLR {:.2}/{:.2} dB",
                r.method.name(),
                t.target_id,
                t.peak_error_px().unwrap_or(f64::NAN),
                t.irw_range_m.unwrap_or(f64::NAN),
                t.irw_azimuth_m.unwrap_or(f64::NAN),
                t.pslr_range_db.map_or(f64::NAN, |d| d.0),
                t.pslr_azimuth_db.map_or(f64::NAN, |d| d.0),
            ),
        }
    }
}

fn analyze(common: &Common, method: Option<Method>) -> anyhow::Result<()> {
    let (sc, dir) = load(common)?;
    let method = method.unwrap_or(sc.config.focus.method);
    for_each_frame(&sc, |k| {
        let img = pipeline::read_complex_image(&pipeline::frame_path(&dir, k, method, "vsarim"))?;
        let report = pipeline::analyze(&sc, &img, method);
        pipeline::write_report_outputs(&sc, &dir, k, &report)?;
        print_report(k, &report);
        Ok(())
    })?;
    Ok(())
}

fn bench(common: &Common, reps: usize, frame: usize) -> anyhow::Result<()> {
    let (sc, dir) = load(common)?;
    let b = pipeline::bench(&sc, frame, reps, common.seed)?;
    let path = dir.join("bench.json");
    pipeline::write_bench(&path, &b)?;
    println!(
        "{}x{} over {} reps: cs median {:.3} s (spread {:.3}), interp median {:.3} s (spread {:.3}), ratio {:.3}",
        b.pulses, b.fast_samples, b.reps, b.cs.median_s, b.cs.spread_s, b.interp.median_s, b.interp.spread_s, b.ratio_cs_over_interp
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn run(common: &Common, method: Option<Method>) -> anyhow::Result<()> {
    let (sc, dir) = load(common)?;
    let method = method.unwrap_or(sc.config.focus.method);
    let outcomes = pipeline::run(&sc, &dir, method, common.seed)?;
    for o in &outcomes {
        for w in &o.warnings {
            eprintln!("warning: {w}");
        }
        print_report(o.frame, &o.report);
    }
    println!("{} frame(s) written to {}", outcomes.len(), dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Simulate { common } => simulate(common),
        Cmd::Focus { common, method } => focus(common, *method),
        Cmd::Analyze { common, method } => analyze(common, *method),
        Cmd::Bench { common, reps, frame } => bench(common, *reps, *frame),
        Cmd::Run { common, method } => run(common, *method),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(ce) = e.downcast_ref::<ConfigErrors>() {
                eprint!("{ce}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}
