use std::path::PathBuf;
use std::process::ExitCode;

use cellmark::EmbedMode;
use cellmark_cli::{commands, CliError};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cellmark", version, about = "Cellular-automaton scrambled image watermarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a key file.
    Keygen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Watermark image whose dimensions the key records.
        #[arg(long, conflicts_with = "size")]
        wm: Option<PathBuf>,
        /// Watermark dimensions as HxW.
        #[arg(long, value_parser = parse_size)]
        size: Option<(usize, usize)>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<EmbedMode>,
        #[arg(long, default_value_t = 7)]
        rule: u32,
        #[arg(long, default_value_t = 20)]
        generations: u32,
        #[arg(long, default_value_t = 0)]
        plane: u8,
        #[arg(long, default_value_t = 9)]
        repetition: usize,
    },
    /// Reorder an image with the key's permutation.
    Scramble {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Undo `scramble`.
    Unscramble {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hide a watermark image in a cover.
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        wm: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the watermark as a bilevel image.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply noise, crop or jpeg to an image.
    Attack {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print one metric as JSON: egd, gdd, psnr, histogram, histeq, ber, nc.
    Metrics {
        #[arg(long)]
        kind: String,
        a: PathBuf,
        b: Option<PathBuf>,
    },
    /// Run the robustness grid described by a config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or("expected HxW")?;
    Ok((
        h.trim().parse().map_err(|e| format!("{e}"))?,
        w.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn parse_mode(s: &str) -> Result<EmbedMode, String> {
    s.parse().map_err(|e: cellmark::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Keygen { out, seed, wm, size, mode, rule, generations, plane, repetition } => {
            let opts = commands::KeygenOptions {
                seed,
                rule,
                generations,
                bit_plane: plane,
                repetition,
                mode: mode.unwrap_or_default(),
            };
            commands::keygen(&out, wm.as_deref(), size, &opts)
        }
        Command::Scramble { input, key, out } => commands::scramble(&input, &key, &out, false),
        Command::Unscramble { input, key, out } => commands::scramble(&input, &key, &out, true),
        Command::Embed { input, wm, key, out } => commands::embed_cmd(&input, &wm, &key, &out),
        Command::Extract { input, key, out } => commands::extract_cmd(&input, &key, &out),
        Command::Attack { kind, param, seed, input, out } => {
            commands::attack(&kind, param, seed, &input, &out)
        }
        Command::Metrics { kind, a, b } => {
            let value = commands::metrics(&kind, &a, b.as_deref())?;
            println!("{value}");
            Ok(())
        }
        Command::Bench { config } => {
            let out = commands::bench_cmd(&config)?;
            eprintln!("report written to {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
