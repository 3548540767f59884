use std::fs;
use std::path::Path;

use num_complex::Complex64;
use vsar_cli::config::{Scenario, ScenarioConfig, TargetConfig};
use vsar_cli::output::{read_report_json, read_reports_csv, render_magnitude};
use vsar_cli::pipeline::{self, bench, frame_path, phase_history_path, read_history, run};
use vsar_core::dsp::{ComplexMatrix, SpectralEngine};
use vsar_core::image::{ComplexImage, Method};

/// 64 pulses x 64 samples, two frames, two targets.
fn small(dir: &Path) -> Scenario {
    let ratio = 13e6 / 0.8e6;
    let mut c = ScenarioConfig::table1();
    c.radar.sample_rate_hz = 0.8e6;
    c.radar.bandwidth_hz = 1.2e9 / ratio;
    c.geometry.pulses_per_frame = 64;
    c.geometry.platform_speed_m_per_s = 100.0 * (600.0 / 64.0) / ratio;
    c.geometry.frame_center_azimuth_rad = vec![0.0, 0.5];
    c.scene.targets = vec![
        TargetConfig { x_m: 0.0, y_m: 0.0, amplitude: 1.0 },
        TargetConfig { x_m: 12.0, y_m: -9.0, amplitude: 0.5 },
    ];
    c.outputs.directory = dir.to_path_buf();
    c.validate().unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn phase_history_survives_the_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small(dir.path());
    let ph = pipeline::simulate_frame(&sc, 1, None).unwrap();
    let path = phase_history_path(dir.path(), 1);
    pipeline::write_history(&path, &ph).unwrap();
    let back = read_history(&path).unwrap();
    assert_eq!(back.rvp_state(), ph.rvp_state());
    assert_eq!(back.params(), ph.params());
    assert_eq!(back.geometry(), ph.geometry());
    // samples are stored as f32: quantized once, then stable
    for (a, b) in back.matrix().as_slice().iter().zip(ph.matrix().as_slice()) {
        assert_eq!(a.re, b.re as f32 as f64);
        assert_eq!(a.im, b.im as f32 as f64);
    }
    pipeline::write_history(&path, &back).unwrap();
    let again = read_history(&path).unwrap();
    assert_eq!(again.matrix().as_slice(), back.matrix().as_slice());
}

#[test]
fn reports_parse_back_equal_to_memory() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small(dir.path());
    for method in [Method::Cs, Method::Interp] {
        for o in run(&sc, dir.path(), method, None).unwrap() {
            let csv = read_reports_csv(fs::File::open(frame_path(dir.path(), o.frame, method, "csv")).unwrap()).unwrap();
            assert_eq!(csv, vec![o.report.clone()]);
            let json = read_report_json(fs::File::open(frame_path(dir.path(), o.frame, method, "json")).unwrap()).unwrap();
            assert_eq!(json, o.report);
        }
    }
}

#[test]
fn run_emits_every_file_with_deterministic_names() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small(dir.path());
    run(&sc, dir.path(), Method::Cs, None).unwrap();
    let names: Vec<String> = read_dir_sorted(dir.path()).into_iter().map(|(n, _)| n).collect();
    let mut want = Vec::new();
    for k in 0..2 {
        want.push(format!("frame_{k}.vsarph"));
        for ext in ["csv", "json", "pgm", "vsarim"] {
            want.push(format!("frame_{k}_cs.{ext}"));
        }
    }
    want.sort();
    assert_eq!(names, want);
}

#[test]
fn two_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut sc = small(a.path());
    sc.config.echo.snr_db = Some(10.0);
    let ra = run(&sc, a.path(), Method::Interp, Some(11)).unwrap();
    let rb = run(&sc, b.path(), Method::Interp, Some(11)).unwrap();
    assert_eq!(read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    let counts = |r: &[pipeline::FrameOutcome]| r.iter().map(|o| o.counts).collect::<Vec<_>>();
    assert_eq!(counts(&ra), counts(&rb));
}

#[test]
fn noise_seed_changes_the_history() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = small(dir.path());
    sc.config.echo.snr_db = Some(0.0);
    let a = pipeline::simulate_frame(&sc, 0, Some(1)).unwrap();
    let b = pipeline::simulate_frame(&sc, 0, Some(2)).unwrap();
    assert_ne!(a.matrix().as_slice(), b.matrix().as_slice());
    let c = pipeline::simulate_frame(&sc, 0, Some(1)).unwrap();
    assert_eq!(a.matrix().as_slice(), c.matrix().as_slice());
}

#[test]
fn empty_scene_renders_black_and_warns() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small(dir.path()).config;
    c.scene.targets.clear();
    let sc = c.validate().unwrap();
    let out = run(&sc, dir.path(), Method::Cs, None).unwrap();
    assert_eq!(out.len(), 2);
    for o in &out {
        assert_eq!(o.warnings.len(), 1, "{:?}", o.warnings);
        assert!(o.report.targets.is_empty());
        let pgm = fs::read(frame_path(dir.path(), o.frame, Method::Cs, "pgm")).unwrap();
        let header = b"P5\n128 128\n65535\n";
        assert_eq!(&pgm[..header.len()], header);
        assert!(pgm[header.len()..].iter().all(|&b| b == 0));
    }
}

#[test]
fn render_matches_committed_golden_file() {
    let z = |re, im| Complex64::new(re, im);
    let data = vec![
        z(2.0, 0.0), z(0.6, 0.8), z(0.2, 0.0), z(0.002, 0.0),
        z(0.0, 0.0), z(1e-9, 0.0), z(0.0, 0.02), z(1.5, 0.0),
        z(0.0632, 0.0), z(-2.0, 0.0), z(1.0, 1.0), z(0.0, -0.5),
    ];
    let img = ComplexImage::new(ComplexMatrix::new(3, 4, data).unwrap(), 0.1, 0.1, 0.0).unwrap();
    let golden = include_bytes!("golden/tiny_3x4.pgm");
    let r = render_magnitude(&img, -60.0);
    assert!(!r.all_zero);
    assert_eq!(r.bytes.as_slice(), golden.as_slice());
}

#[test]
fn bench_counts_are_stable_and_short_runs_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small(dir.path());
    let err = bench(&sc, 0, 2, None).unwrap_err();
    assert!(err.to_string().contains("at least 3"), "{err}");
    assert!(bench(&sc, 5, 3, None).is_err());

    let a = bench(&sc, 1, 3, None).unwrap();
    let b = bench(&sc, 1, 3, None).unwrap();
    assert_eq!(a.cs.counts, b.cs.counts);
    assert_eq!(a.interp.counts, b.interp.counts);
    assert_eq!(a.cs.counts.kernel_evals, 0);
    assert!(a.interp.counts.kernel_evals > 0);
    assert_eq!(a.cs.samples_s.len(), 3);
    assert!(a.cs.min_s <= a.cs.median_s && a.cs.median_s <= a.cs.max_s);
    assert!(!a.cs.stages_median_s.is_empty());

    let path = dir.path().join("bench.json");
    pipeline::write_bench(&path, &a).unwrap();
    let back: pipeline::BenchReport = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn oracle_agrees_with_cs_on_the_peak() {
    let dir = tempfile::tempdir().unwrap();
    let sc = small(dir.path());
    let ph = pipeline::simulate_frame(&sc, 0, None).unwrap();
    let peak = |m: Method| {
        let img = pipeline::focus(&sc, &SpectralEngine::new(), &ph, m).unwrap();
        let a = img.matrix().as_slice();
        (0..a.len()).max_by(|x, y| a[*x].norm().total_cmp(&a[*y].norm())).unwrap()
    };
    assert_eq!(peak(Method::Oracle), peak(Method::Cs));
}
