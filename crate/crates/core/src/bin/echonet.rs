use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use echonet::experiment::{
    export_dot_file, run_experiment, summarize, DataSource, ExperimentConfig, Mode,
};
use echonet::{Error, GenomeKind};

#[derive(Parser)]
#[command(
    name = "echonet",
    version,
    about = "Evolve Echo Networks and RNN baselines for signal classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated seeded evolution experiments.
    Run {
        /// TOML configuration; unset fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long, value_enum)]
        network: Option<GenomeKind>,
        #[arg(long, value_enum)]
        data: Option<DataSource>,
        /// Directory holding the metadata table and waveform files.
        #[arg(long)]
        data_path: Option<PathBuf>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Print a genome file as a Graphviz graph.
    ExportDot {
        genome: PathBuf,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print accuracy statistics of the completed runs under a directory.
    Summarize { dir: PathBuf },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::TomlDe(_) | Error::TomlSer(_) => 2,
        Error::Data(_)
        | Error::MalformedRow { .. }
        | Error::SignalTooShort { .. }
        | Error::Csv(_) => 3,
        _ => 4,
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            seed,
            repeats,
            mode,
            network,
            data,
            data_path,
            generations,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::read(&path).map_err(|e| match e {
                    Error::Io { path, source } => {
                        Error::Config(format!("{}: {source}", path.display()))
                    }
                    other => other,
                })?,
                None => ExperimentConfig::default(),
            };
            if let Some(v) = seed {
                cfg.evolution.seed = v;
            }
            if let Some(v) = repeats {
                cfg.repeats = v;
            }
            if let Some(v) = mode {
                cfg.mode = v;
            }
            if let Some(v) = network {
                cfg.network = v;
            }
            if let Some(v) = data {
                cfg.data = v;
            }
            if data_path.is_some() {
                cfg.data_path = data_path;
            }
            if let Some(v) = generations {
                cfg.evolution.generations = v;
            }
            let manifest = run_experiment(&cfg, &out, &mut |line| eprintln!("{line}"))?;
            let s = manifest.summary;
            println!(
                "{}: mean {:.4} std {:.4} min {:.4} max {:.4} over {} runs ({})",
                s.network.display_name(),
                s.mean,
                s.std,
                s.min,
                s.max,
                s.runs,
                out.display()
            );
        }
        Command::ExportDot { genome, out } => {
            let text = export_dot_file(&genome).map_err(|e| match e {
                Error::Io { path, source } => Error::Data(format!("{}: {source}", path.display())),
                Error::Json(e) => Error::Data(format!("{}: {e}", genome.display())),
                other => other,
            })?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?
                }
                None => print!("{text}"),
            }
        }
        Command::Summarize { dir } => {
            let table = summarize(&dir).map_err(|e| match e {
                Error::Io { path, source } => Error::Data(format!("{}: {source}", path.display())),
                other => other,
            })?;
            print!("{table}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
