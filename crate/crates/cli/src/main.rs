use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use cergm_cli::commands::dispatch;
use cergm_cli::config::{Command, Format, RunConfig};
use cergm_cli::{output, CliError};

/// Normalization constants of constrained exponential random graph models.
#[derive(Parser, Debug)]
#[command(name = "cergm", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a config entry, e.g. `--set model.n=6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Defaults to `output.format` in the config, then json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Replaces `chain.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall-clock time in `runtime_ms`.
    #[arg(long)]
    timing: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut cfg = RunConfig::load(&cli.config, &cli.set)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    let format = cli.format.or(cfg.output.format).unwrap_or(Format::Json);
    let path = cli.output.or_else(|| cfg.output.path.clone());
    let model = cfg.model()?;
    let start = Instant::now();
    let record = dispatch(cli.command, &cfg, format == Format::Csv)?;
    let runtime = cli.timing.then(|| start.elapsed().as_millis());
    match path {
        Some(path) => {
            let file = File::create(path)?;
            output::write(
                BufWriter::new(file),
                format,
                cli.command,
                &model,
                runtime,
                &record,
            )
        }
        None => output::write(
            io::stdout().lock(),
            format,
            cli.command,
            &model,
            runtime,
            &record,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
