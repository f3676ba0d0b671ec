//! Exit criteria for the codec. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ubssvc::bench::{bench, compression_ratio};
use ubssvc::vio::{decode_container, encode_container};
use ubssvc_core::{
    decode_sequence, encode_sequence, frame_psnr, generalized_inverse, haar_forward, haar_inverse,
    mix_block, recover_block, recover_dense, CodecConfig, Frame, FrameBlock, Matrix, MixingMatrix,
    QuantMode,
};

/// Mean PSNR of `roundtrip` on `gen --preset sparse-detail --frames 40
/// --seed 1` (176x144) with the default configuration, recorded on the
/// first verified build.
const SPARSE_DETAIL_BASELINE_DB: f64 = 33.0822;
const BASELINE_SLACK_DB: f64 = 0.1;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ubssvc"))
}

fn run_cli(args: &[&str], cwd: &Path) -> Result<(i32, Vec<u8>), String> {
    let out = cli()
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn porcelain_value(stdout: &[u8], key: &str) -> Option<String> {
    String::from_utf8_lossy(stdout)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_owned))
}

fn sparse_sources(rng: &mut ChaCha8Rng, n: usize, t: usize, k: usize) -> Matrix {
    let mut s = Matrix::zeros(n, t);
    for c in 0..t {
        let active = rng.random_range(0..=k);
        let mut rows: Vec<usize> = (0..n).collect();
        for i in 0..active {
            let pick = rng.random_range(i..n);
            rows.swap(i, pick);
            s[(rows[i], c)] = rng.random_range(-100.0..=100.0);
        }
    }
    s
}

fn ac1_exact_sparse_recovery() -> Outcome {
    let a = MixingMatrix::default();
    let mut worst_err = 0.0f64;
    let mut worst_time = Duration::ZERO;
    let mut forced = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sparse_sources(&mut rng, 4, 10_000, 2);
        let x = a.matrix().matmul(&s).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let (rec, stats) = recover_block(&a, &x, 1e-8).map_err(|e| e.to_string())?;
        worst_time = worst_time.max(start.elapsed());
        worst_err = worst_err.max(rec.max_abs_diff(&s));
        forced += stats.forced_columns;
    }
    check(
        worst_err <= 1e-6 && forced == 0 && worst_time < Duration::from_secs(1),
        format!("100 seeds: max err {worst_err:.3e}, forced {forced}, slowest {worst_time:?}"),
    )
}

fn ac2_frame_accounting(dir: &Path) -> Outcome {
    let frames = ubssvc::synth::generate(&ubssvc::synth::GenParams {
        width: 32,
        height: 32,
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    let cfg = CodecConfig::default();
    let enc = encode_sequence(&frames, &cfg).map_err(|e| e.to_string())?;
    let (dec, _) = decode_sequence(&enc, &cfg).map_err(|e| e.to_string())?;

    let (code, _) = run_cli(
        &[
            "gen",
            "--frames",
            "40",
            "--width",
            "32",
            "--height",
            "32",
            "--out",
            "ac2/%03d.pgm",
        ],
        dir,
    )?;
    let (code2, rt) = run_cli(
        &["--porcelain", "roundtrip", "--input", "ac2/%03d.pgm"],
        dir,
    )?;
    let cli_mixed = porcelain_value(&rt, "mixed_frames");
    let cli_decoded = porcelain_value(&rt, "decoded_frames");
    check(
        enc.mixed_frames.len() == 30
            && enc.tail_frames.is_empty()
            && dec.len() == 40
            && code == 0
            && code2 == 0
            && cli_mixed.as_deref() == Some("30")
            && cli_decoded.as_deref() == Some("40"),
        format!(
            "40 frames -> {} mixed -> {} decoded (cli: {:?} -> {:?})",
            enc.mixed_frames.len(),
            dec.len(),
            cli_mixed,
            cli_decoded
        ),
    )
}

fn ac3_structural_floor(dir: &Path) -> Outcome {
    let frames = vec![Frame::filled(16, 8, 77.0); 40];
    let cfg = CodecConfig::default();
    let enc = encode_sequence(&frames, &cfg).map_err(|e| e.to_string())?;
    let payload_ratio = enc.mixed_frames.len() as f64 / frames.len() as f64;

    let lib =
        bench(&frames, &cfg, "cp {in} {out}", QuantMode::Affine8).map_err(|e| e.to_string())?;
    let lib_gain = lib.improvement_percent().unwrap_or(f64::NAN);

    run_cli(
        &[
            "gen",
            "--frames",
            "40",
            "--width",
            "32",
            "--height",
            "16",
            "--out",
            "ac3/%03d.pgm",
        ],
        dir,
    )?;
    let (code, out) = run_cli(
        &[
            "--porcelain",
            "bench",
            "--input",
            "ac3/%03d.pgm",
            "--codec-cmd",
            "cp {in} {out}",
        ],
        dir,
    )?;
    let cli_gain: f64 = porcelain_value(&out, "improvement_percent")
        .and_then(|v| v.parse().ok())
        .unwrap_or(f64::NAN);

    let mpeg2 = compression_ratio(225.0, 169.0).map_err(|e| e.to_string())?;
    let h264 = compression_ratio(98.2, 7.31).map_err(|e| e.to_string())?;
    check(
        payload_ratio == 0.75
            && lib.raw_mixed_bytes * 4 == lib.raw_source_bytes * 3
            && (lib_gain - 33.3).abs() <= 0.1
            && code == 0
            && (cli_gain - 33.3).abs() <= 0.1
            && (mpeg2.ratio - 1.331).abs() < 5e-4
            && (mpeg2.improvement_percent - 33.1).abs() < 0.05
            && (h264.ratio - 13.43).abs() < 5e-3,
        format!(
            "payload {payload_ratio}, identity-codec gain {lib_gain:.3}% (cli {cli_gain:.3}%), ratios {:.4} / {:.4}",
            mpeg2.ratio, h264.ratio
        ),
    )
}

fn ac4_haar() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = MixingMatrix::default();
    let (mut rt, mut parseval, mut commute) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let w = 2 * rng.random_range(1..=12);
        let h = 2 * rng.random_range(1..=12);
        let px: Vec<f64> = (0..w * h)
            .map(|_| rng.random_range(-255.0..=255.0))
            .collect();
        let f = Frame::new(w, h, px).map_err(|e| e.to_string())?;
        let sb = haar_forward(&f).map_err(|e| e.to_string())?;
        let back = haar_inverse(&sb).map_err(|e| e.to_string())?;
        for (x, y) in back.pixels().iter().zip(f.pixels()) {
            rt = rt.max((x - y).abs());
        }
        let e: f64 = f.pixels().iter().map(|v| v * v).sum();
        parseval = parseval.max((sb.energy() - e).abs() / e);
    }
    for _ in 0..100 {
        let (w, h) = (2 * rng.random_range(1..=8), 2 * rng.random_range(1..=8));
        let frames: Vec<Frame> = (0..4)
            .map(|_| {
                Frame::new(
                    w,
                    h,
                    (0..w * h).map(|_| rng.random_range(0.0..=255.0)).collect(),
                )
                .unwrap()
            })
            .collect();
        let mixed =
            mix_block(&a, &FrameBlock::new(frames.clone()).unwrap()).map_err(|e| e.to_string())?;
        let src: Vec<_> = frames.iter().map(|f| haar_forward(f).unwrap()).collect();
        for (i, xf) in mixed.frames().iter().enumerate() {
            let sb = haar_forward(xf).unwrap();
            for band in 0..4 {
                for (k, got) in sb.planes()[band].pixels().iter().enumerate() {
                    let want: f64 = (0..4)
                        .map(|j| a.get(i, j) * src[j].planes()[band].pixels()[k])
                        .sum();
                    commute = commute.max((got - want).abs() / want.abs().max(1.0));
                }
            }
        }
    }
    check(
        rt <= 1e-12 && parseval <= 1e-9 && commute <= 1e-9,
        format!("roundtrip {rt:.2e}, parseval {parseval:.2e}, commutation {commute:.2e}"),
    )
}

fn ac5_psnr() -> Outcome {
    let p = |a: f64, b: f64| frame_psnr(&Frame::filled(8, 8, a), &Frame::filled(8, 8, b)).unwrap();
    let white_black = p(255.0, 0.0);
    let same = p(42.0, 42.0);
    let d16 = p(116.0, 100.0);
    let drop = p(108.0, 100.0) - d16;
    check(
        white_black == 0.0
            && same == f64::INFINITY
            && (d16 - 24.05).abs() <= 0.01
            && (drop - 6.02).abs() <= 0.01,
        format!("0 dB case {white_black}, identical {same}, d=16 {d16:.4} dB, doubling drop {drop:.4} dB"),
    )
}

fn ac6_pseudo_inverse() -> Outcome {
    let a = MixingMatrix::default();
    let pinv = generalized_inverse(&a).map_err(|e| e.to_string())?;
    let ident = a
        .matrix()
        .matmul(&pinv)
        .unwrap()
        .max_abs_diff(&Matrix::identity(3));
    let projector = pinv.matmul(a.matrix()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = Matrix::new(
        4,
        64,
        (0..256).map(|_| rng.random_range(0.0..=255.0)).collect(),
    )
    .unwrap();
    let once = recover_dense(&pinv, &a.matrix().matmul(&s).unwrap()).unwrap();
    let as_projector = once.max_abs_diff(&projector.matmul(&s).unwrap());
    let twice = recover_dense(&pinv, &a.matrix().matmul(&once).unwrap()).unwrap();
    let idempotence = twice.max_abs_diff(&once);
    check(
        ident <= 1e-12 && as_projector <= 1e-9 && idempotence <= 1e-9,
        format!("|AA⁺ − I| {ident:.2e}, recover∘mix vs A⁺A {as_projector:.2e}, idempotence {idempotence:.2e}"),
    )
}

fn ac7_determinism(dir: &Path) -> Outcome {
    let sizes = ["--width", "48", "--height", "32"];
    let mut commands: Vec<Vec<String>> = Vec::new();
    let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    for run in ["r1", "r2"] {
        let mut gen = own(&["gen", "--frames", "13", "--seed", "9", "--out"]);
        gen.push(format!("{run}/src/%02d.pgm"));
        gen.extend(own(&sizes));
        commands.push(gen);
        commands.push(own(&[
            "mix",
            "--input",
            &format!("{run}/src/%02d.pgm"),
            "--out",
            &format!("{run}/a.ubss"),
        ]));
        commands.push(own(&[
            "mix",
            "--input",
            &format!("{run}/src/%02d.pgm"),
            "--quant",
            "affine8",
            "--out",
            &format!("{run}/q.ubss"),
        ]));
        commands.push(own(&[
            "separate",
            "--input",
            &format!("{run}/a.ubss"),
            "--out",
            &format!("{run}/dec/%02d.pgm"),
        ]));
        commands.push(own(&[
            "roundtrip",
            "--input",
            &format!("{run}/src/%02d.pgm"),
            "--out",
            &format!("{run}/rt/%02d.pgm"),
        ]));
        commands.push(own(&[
            "psnr",
            "--reference",
            &format!("{run}/src/%02d.pgm"),
            "--test",
            &format!("{run}/dec/%02d.pgm"),
        ]));
        commands.push(own(&["validate-matrix"]));
        commands.push(own(&[
            "bench",
            "--input",
            &format!("{run}/src/%02d.pgm"),
            "--codec-cmd",
            "cp {in} {out}",
        ]));
    }
    let mut stdouts = Vec::new();
    for args in &commands {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, out) = run_cli(&refs, dir)?;
        if code != 0 {
            return Err(format!("{args:?} exited {code}"));
        }
        stdouts.push(
            String::from_utf8_lossy(&out)
                .replace("r1/", "")
                .replace("r2/", ""),
        );
    }
    let half = stdouts.len() / 2;
    let stdout_same = stdouts[..half] == stdouts[half..];

    let tree = |run: &str| -> Vec<(String, Vec<u8>)> {
        let mut files = Vec::new();
        let mut stack = vec![dir.join(run)];
        while let Some(p) = stack.pop() {
            for e in fs::read_dir(&p).unwrap() {
                let path = e.unwrap().path();
                if path.is_dir() {
                    stack.push(path);
                } else {
                    let rel = path
                        .strip_prefix(dir.join(run))
                        .unwrap()
                        .to_string_lossy()
                        .into_owned();
                    files.push((rel, fs::read(&path).unwrap()));
                }
            }
        }
        files.sort();
        files
    };
    let (t1, t2) = (tree("r1"), tree("r2"));
    let files_same = t1 == t2 && !t1.is_empty();

    // separate-through-files equals the in-memory roundtrip
    let dec: Vec<_> = t1
        .iter()
        .filter(|(p, _)| p.starts_with("dec"))
        .map(|(_, b)| b)
        .collect();
    let rt: Vec<_> = t1
        .iter()
        .filter(|(p, _)| p.starts_with("rt"))
        .map(|(_, b)| b)
        .collect();
    let file_path_matches_memory = dec == rt && dec.len() == 13;

    let mut lossless = true;
    for name in ["a.ubss", "q.ubss"] {
        let bytes = fs::read(dir.join("r1").join(name)).unwrap();
        let enc = decode_container(&bytes).map_err(|e| e.to_string())?;
        let again = encode_container(&enc).map_err(|e| e.to_string())?;
        lossless &= again == bytes && decode_container(&again).map_err(|e| e.to_string())? == enc;
    }
    check(
        stdout_same && files_same && file_path_matches_memory && lossless,
        format!(
            "{} commands x2: stdout identical {stdout_same}, {} files identical {files_same}, mix+separate == roundtrip {file_path_matches_memory}, container lossless {lossless}",
            half,
            t1.len()
        ),
    )
}

fn ac8_quality_baseline(dir: &Path) -> Outcome {
    run_cli(
        &[
            "gen",
            "--preset",
            "sparse-detail",
            "--frames",
            "40",
            "--seed",
            "1",
            "--out",
            "ac8/%03d.pgm",
        ],
        dir,
    )?;
    let (code, out) = run_cli(
        &["--porcelain", "roundtrip", "--input", "ac8/%03d.pgm"],
        dir,
    )?;
    let mean: f64 = porcelain_value(&out, "mean_psnr")
        .and_then(|v| v.parse().ok())
        .unwrap_or(f64::NAN);
    check(
        code == 0 && mean >= SPARSE_DETAIL_BASELINE_DB - BASELINE_SLACK_DB,
        format!(
            "mean PSNR {mean:.4} dB, baseline {SPARSE_DETAIL_BASELINE_DB} dB, floor {:.4} dB",
            SPARSE_DETAIL_BASELINE_DB - BASELINE_SLACK_DB
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<Criterion> = vec![
        (
            "AC1 exact sparse recovery",
            Box::new(ac1_exact_sparse_recovery),
        ),
        ("AC2 frame accounting", Box::new(|| ac2_frame_accounting(d))),
        (
            "AC3 structural compression floor",
            Box::new(|| ac3_structural_floor(d)),
        ),
        ("AC4 Haar correctness", Box::new(ac4_haar)),
        ("AC5 PSNR formula", Box::new(ac5_psnr)),
        (
            "AC6 pseudo-inverse identities",
            Box::new(ac6_pseudo_inverse),
        ),
        (
            "AC7 determinism and serialization",
            Box::new(|| ac7_determinism(d)),
        ),
        (
            "AC8 end-to-end quality regression",
            Box::new(|| ac8_quality_baseline(d)),
        ),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
