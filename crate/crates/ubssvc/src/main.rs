use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ubssvc::bench::bench;
use ubssvc::config::{load_config, parse_quant};
use ubssvc::report::{
    render_bench, render_quality, render_recovery, render_roundtrip, render_validation,
};
use ubssvc::synth::{generate, GenParams, Preset};
use ubssvc::vio::{read_container, read_sequence, write_container, write_sequence, SequenceInput};
use ubssvc::Error;
use ubssvc_core::mixcore::DEFAULT_DET_FLOOR;
use ubssvc_core::{
    decode_sequence, encode_sequence, roundtrip_eval, sequence_report, validate_mixing_matrix,
    CodecConfig, Frame,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_EXTERNAL: u8 = 3;

/// Video compression by mixing groups of frames and separating them again.
#[derive(Debug, Parser)]
#[command(name = "ubssvc", version)]
struct Cli {
    /// Emit key=value lines instead of tables.
    #[arg(long, global = true)]
    porcelain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every square submatrix of the mixing matrix is nonsingular.
    ValidateMatrix {
        /// Codec configuration file (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DET_FLOOR)]
        det_floor: f64,
    },
    /// Mix a frame sequence into a UBSS container.
    Mix {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        codec: CodecArgs,
        /// Container path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover frames from a UBSS container.
    Separate {
        /// Container path.
        #[arg(long)]
        input: PathBuf,
        /// Configuration file; the mixing matrix always comes from the container.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Residual threshold above which a column is flagged as forced.
        #[arg(long)]
        tau: Option<f64>,
        /// Output PGM pattern, e.g. `out/%03d.pgm`.
        #[arg(long)]
        out: String,
    },
    /// Encode and decode in memory and report PSNR.
    Roundtrip {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        codec: CodecArgs,
        /// Also write the reconstructed frames.
        #[arg(long)]
        out: Option<String>,
    },
    /// PSNR between two sequences.
    Psnr {
        /// Reference PGM pattern.
        #[arg(long)]
        reference: String,
        /// Test PGM pattern.
        #[arg(long)]
        test: String,
    },
    /// Write a seeded synthetic sequence as PGM frames.
    Gen {
        #[arg(long, default_value = "sparse-detail")]
        preset: Preset,
        #[arg(long, default_value_t = 40)]
        frames: usize,
        #[arg(long, default_value_t = 176)]
        width: usize,
        #[arg(long, default_value_t = 144)]
        height: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Block geometry comes from the mixing matrix in this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: String,
    },
    /// Compare an external codec on raw source frames and on the mixed stream.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        /// Codec configuration file (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Shell command with `{in}` and `{out}` (also `{width}`, `{height}`, `{frames}`).
        #[arg(long)]
        codec_cmd: String,
        /// Export of the mixed stream: `affine8` bytes or `float` f32 values.
        #[arg(long, default_value = "affine8")]
        quant: String,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// PGM pattern (`frames/%03d.pgm`) or, with --width/--height, a raw 8-bit planar file.
    #[arg(long)]
    input: String,
    /// Frame width of a raw planar input.
    #[arg(long, requires = "height")]
    width: Option<usize>,
    /// Frame height of a raw planar input.
    #[arg(long, requires = "width")]
    height: Option<usize>,
    /// Number of frames to read.
    #[arg(long)]
    frames: Option<usize>,
}

impl InputArgs {
    fn load(&self) -> ubssvc::Result<Vec<Frame>> {
        let input = match (self.width, self.height) {
            (Some(width), Some(height)) => SequenceInput::RawPlanar {
                path: self.input.clone().into(),
                width,
                height,
                count: self.frames,
            },
            _ => SequenceInput::PgmPattern {
                pattern: self.input.clone(),
                start: 0,
                count: self.frames,
            },
        };
        Ok(read_sequence(&input)?.frames)
    }
}

#[derive(Debug, Args)]
struct CodecArgs {
    /// Codec configuration file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Residual threshold above which a column is flagged as forced.
    #[arg(long)]
    tau: Option<f64>,
    /// `float` or `affine8`.
    #[arg(long)]
    quant: Option<String>,
}

impl CodecArgs {
    fn resolve(&self) -> ubssvc::Result<CodecConfig> {
        let mut cfg = base_config(self.config.as_ref())?;
        if let Some(tau) = self.tau {
            cfg.tau = tau;
        }
        if let Some(q) = &self.quant {
            cfg.quantization = parse_quant(q)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn base_config(path: Option<&PathBuf>) -> ubssvc::Result<CodecConfig> {
    path.map_or_else(|| Ok(CodecConfig::default()), load_config)
}

fn run(cli: Cli) -> ubssvc::Result<u8> {
    let porcelain = cli.porcelain;
    match cli.command {
        Command::ValidateMatrix { config, det_floor } => {
            let cfg = base_config(config.as_ref())?;
            let report = validate_mixing_matrix(cfg.matrix.matrix(), det_floor)?;
            print!("{}", render_validation(&report, det_floor, porcelain));
            Ok(if report.passed { 0 } else { EXIT_DATA })
        }
        Command::Mix { input, codec, out } => {
            let cfg = codec.resolve()?;
            let frames = input.load()?;
            let enc = encode_sequence(&frames, &cfg)?;
            write_container(&enc, &out)?;
            if porcelain {
                println!("source_frames={}", frames.len());
                println!("mixed_frames={}", enc.mixed_frames.len());
                println!("tail_frames={}", enc.tail_frames.len());
            } else {
                println!(
                    "{} source frames -> {} mixed (+{} tail) in {}",
                    frames.len(),
                    enc.mixed_frames.len(),
                    enc.tail_frames.len(),
                    out.display()
                );
            }
            Ok(0)
        }
        Command::Separate {
            input,
            config,
            tau,
            out,
        } => {
            let enc = read_container(&input)?;
            let mut cfg = match &config {
                Some(p) => load_config(p)?,
                None => CodecConfig::with_matrix(enc.matrix.clone()),
            };
            cfg.quantization = enc.quantization.mode;
            if let Some(t) = tau {
                cfg.tau = t;
            }
            let (frames, stats) = decode_sequence(&enc, &cfg)?;
            write_sequence(&frames, &out)?;
            if porcelain {
                println!("decoded_frames={}", frames.len());
            } else {
                println!("{} frames written to {out}", frames.len());
            }
            print!("{}", render_recovery(&stats, porcelain));
            Ok(0)
        }
        Command::Roundtrip { input, codec, out } => {
            let cfg = codec.resolve()?;
            let frames = input.load()?;
            let (report, decoded) = roundtrip_eval(&frames, &cfg)?;
            if let Some(pattern) = out {
                write_sequence(&decoded, &pattern)?;
            }
            print!("{}", render_roundtrip(&report, porcelain));
            Ok(0)
        }
        Command::Psnr { reference, test } => {
            let load = |pattern: String| {
                read_sequence(&SequenceInput::PgmPattern {
                    pattern,
                    start: 0,
                    count: None,
                })
            };
            let a = load(reference)?.frames;
            let b = load(test)?.frames;
            let report = sequence_report(&a, &b)?;
            print!("{}", render_quality(&report, porcelain));
            Ok(0)
        }
        Command::Gen {
            preset,
            frames,
            width,
            height,
            seed,
            config,
            out,
        } => {
            let cfg = base_config(config.as_ref())?;
            let params = GenParams {
                preset,
                width,
                height,
                frames,
                seed,
                block: cfg.n(),
                active: cfg.m() - 1,
            };
            let written = write_sequence(&generate(&params)?, &out)?;
            if porcelain {
                println!("frames={}", written.len());
            } else {
                println!("{} frames written to {out}", written.len());
            }
            Ok(0)
        }
        Command::Bench {
            input,
            config,
            codec_cmd,
            quant,
        } => {
            let cfg = base_config(config.as_ref())?;
            let frames = input.load()?;
            let report = bench(&frames, &cfg, &codec_cmd, parse_quant(&quant)?)?;
            print!("{}", render_bench(&report, porcelain));
            for e in [&report.direct, &report.mixed]
                .into_iter()
                .filter_map(|r| r.as_ref().err())
            {
                eprintln!("ubssvc: external command failed: {e}");
            }
            Ok(if report.failed() { EXIT_EXTERNAL } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("ubssvc: {e}");
            ExitCode::from(match e {
                Error::External(_) => EXIT_EXTERNAL,
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            })
        }
    }
}
