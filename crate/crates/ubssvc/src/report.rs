//! Human-readable tables and `key=value` machine output.

use std::fmt::Write as _;

use ubssvc_core::{QualityReport, RecoveryStats, RoundtripReport, ValidationReport};

use crate::bench::{BenchReport, BenchResult};

fn db(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

pub fn render_quality(r: &QualityReport, porcelain: bool) -> String {
    let mut s = String::new();
    if porcelain {
        for (i, (mse, psnr)) in r.per_frame_mse.iter().zip(&r.per_frame_psnr).enumerate() {
            writeln!(s, "frame.{i}.mse={mse}").unwrap();
            writeln!(s, "frame.{i}.psnr={psnr}").unwrap();
        }
        writeln!(s, "frames={}", r.frames()).unwrap();
        writeln!(s, "mean_psnr={}", r.mean_psnr).unwrap();
        writeln!(s, "infinite_count={}", r.infinite_count).unwrap();
        return s;
    }
    writeln!(s, "{:>6}  {:>14}  {:>10}", "frame", "mse", "psnr_db").unwrap();
    for (i, (mse, psnr)) in r.per_frame_mse.iter().zip(&r.per_frame_psnr).enumerate() {
        writeln!(s, "{i:>6}  {mse:>14.6}  {:>10}", db(*psnr)).unwrap();
    }
    writeln!(
        s,
        "mean psnr {} dB over {} finite frames ({} identical)",
        db(r.mean_psnr),
        r.frames() - r.infinite_count,
        r.infinite_count
    )
    .unwrap();
    s
}

fn render_stats(s: &mut String, st: &RecoveryStats, porcelain: bool) {
    if porcelain {
        writeln!(s, "zero_columns={}", st.zero_columns).unwrap();
        writeln!(s, "clean_columns={}", st.clean_columns).unwrap();
        writeln!(s, "forced_columns={}", st.forced_columns).unwrap();
        for (p, v) in RecoveryStats::QUANTILES.iter().zip(st.residual_quantiles) {
            writeln!(s, "residual_q{p}={v}").unwrap();
        }
    } else {
        writeln!(
            s,
            "detail columns: {} zero, {} clean, {} forced",
            st.zero_columns, st.clean_columns, st.forced_columns
        )
        .unwrap();
        let q = st.residual_quantiles;
        writeln!(
            s,
            "relative residual: min {:.3e}  p50 {:.3e}  p90 {:.3e}  p99 {:.3e}  max {:.3e}",
            q[0], q[1], q[2], q[3], q[4]
        )
        .unwrap();
    }
}

pub fn render_recovery(st: &RecoveryStats, porcelain: bool) -> String {
    let mut s = String::new();
    render_stats(&mut s, st, porcelain);
    s
}

pub fn render_roundtrip(r: &RoundtripReport, porcelain: bool) -> String {
    let mut s = String::new();
    if porcelain {
        writeln!(s, "mixed_frames={}", r.mixed_count).unwrap();
        writeln!(s, "tail_frames={}", r.tail_count).unwrap();
        writeln!(s, "decoded_frames={}", r.decoded_count).unwrap();
    } else {
        writeln!(
            s,
            "mixed frames: {} (+{} tail), decoded frames: {}",
            r.mixed_count, r.tail_count, r.decoded_count
        )
        .unwrap();
    }
    render_stats(&mut s, &r.stats, porcelain);
    s.push_str(&render_quality(&r.quality, porcelain));
    s
}

pub fn render_validation(r: &ValidationReport, det_floor: f64, porcelain: bool) -> String {
    let mut s = String::new();
    let cols = |c: &[usize]| {
        c.iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    if porcelain {
        writeln!(s, "passed={}", r.passed).unwrap();
        for (c, d) in &r.submatrix_results {
            writeln!(s, "det.{}={d}", cols(c)).unwrap();
        }
        writeln!(s, "min_abs_determinant={}", r.min_abs_determinant).unwrap();
        return s;
    }
    writeln!(s, "{:>12}  {:>14}", "columns", "|det|").unwrap();
    for (c, d) in &r.submatrix_results {
        writeln!(s, "{:>12}  {d:>14.6e}", format!("{{{}}}", cols(c))).unwrap();
    }
    writeln!(
        s,
        "{}: min |det| {:.6e} against floor {det_floor:e}",
        if r.passed { "PASS" } else { "FAIL" },
        r.min_abs_determinant
    )
    .unwrap();
    s
}

fn bench_row(s: &mut String, key: &str, row: &Result<BenchResult, String>, porcelain: bool) {
    match (row, porcelain) {
        (Ok(r), true) => {
            writeln!(s, "{key}.original_bytes={}", r.original_bytes).unwrap();
            writeln!(s, "{key}.compressed_bytes={}", r.compressed_bytes).unwrap();
            writeln!(s, "{key}.ratio={}", r.ratio).unwrap();
            writeln!(s, "{key}.improvement_percent={}", r.improvement_percent).unwrap();
        }
        (Err(e), true) => writeln!(s, "{key}.error={e}").unwrap(),
        (Ok(r), false) => writeln!(
            s,
            "{:<14}  {:>12}  {:>12}  {:>9.4}  {:>+9.2}%",
            r.label, r.original_bytes, r.compressed_bytes, r.ratio, r.improvement_percent
        )
        .unwrap(),
        (Err(e), false) => writeln!(s, "{key:<14}  FAILED: {e}").unwrap(),
    }
}

pub fn render_bench(r: &BenchReport, porcelain: bool) -> String {
    let mut s = String::new();
    if porcelain {
        writeln!(s, "raw_source_bytes={}", r.raw_source_bytes).unwrap();
        writeln!(s, "raw_mixed_bytes={}", r.raw_mixed_bytes).unwrap();
    } else {
        writeln!(
            s,
            "{:<14}  {:>12}  {:>12}  {:>9}  {:>10}",
            "row", "original", "compressed", "ratio", "gain"
        )
        .unwrap();
    }
    bench_row(&mut s, "codec", &r.direct, porcelain);
    bench_row(&mut s, "ubssvc", &r.mixed, porcelain);
    match (r.ratio_of_ratios, porcelain) {
        (Some(v), true) => {
            writeln!(s, "ratio_of_ratios={v}").unwrap();
            writeln!(s, "improvement_percent={}", (v - 1.0) * 100.0).unwrap();
        }
        (Some(v), false) => writeln!(
            s,
            "ratio of ratios {v:.4} ({:+.2}% over the codec alone)",
            (v - 1.0) * 100.0
        )
        .unwrap(),
        (None, _) => {}
    }
    s
}
