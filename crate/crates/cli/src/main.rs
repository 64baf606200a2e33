//! `finipost` command line: run experiments, evaluate bounds, self-test.
//!
//! Exit codes: 0 ok, 1 configuration error, 2 I/O error, 3 bound violation.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use finipost::harness::{evaluate_bound, run_experiment, selftest, write_report, ExperimentConfig, Format};
use finipost::Error;

#[derive(Parser)]
#[command(name = "finipost", version, about = "Finitary posterior experiments and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output file; defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `csv` or `json`; defaults to the output extension, then csv.
        #[arg(long)]
        format: Option<String>,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (the report does not depend on this).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Evaluate one closed-form bound on JSON parameters.
    Bound {
        name: String,
        #[arg(long)]
        params: String,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

enum Failure {
    Config(String),
    Io(String),
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Io(_) => 2,
            Self::Violation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Io(m) | Self::Violation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Self::Io(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Io(format!("io-error: {e}"))
}

fn format_for(explicit: Option<&str>, path: Option<&Path>) -> Result<Format, Failure> {
    if let Some(f) = explicit {
        return Ok(f.parse()?);
    }
    let json = path
        .and_then(|p| p.extension())
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    Ok(if json { Format::Json } else { Format::Csv })
}

fn run(
    config: &Path,
    out: Option<PathBuf>,
    format: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_path(config)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(k) = threads {
        if k == 0 {
            return Err(Failure::Config(
                "config-error: --threads must be at least 1".to_string(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Config(format!("config-error: {e}")))?;
    }
    let out = out.or_else(|| cfg.output.as_ref().map(PathBuf::from));
    let format = format_for(format.as_deref(), out.as_deref())?;
    let report = run_experiment(&cfg)?;
    match &out {
        Some(path) => {
            let file =
                std::fs::File::create(path).map_err(|e| Failure::Io(format!("io-error: {}: {e}", path.display())))?;
            write_report(&report, std::io::BufWriter::new(file), format)?;
        }
        None => write_report(&report, std::io::stdout().lock(), format)?,
    }
    match report.violations() {
        0 => Ok(()),
        v => Err(Failure::Violation(format!(
            "{v} of {} rows exceed bound + slack",
            report.rows.len()
        ))),
    }
}

fn bound(name: &str, params: &str) -> Result<(), Failure> {
    let value: serde_json::Value =
        serde_json::from_str(params).map_err(|e| Failure::Config(format!("config-error: --params: {e}")))?;
    let result = evaluate_bound(name, &value)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{result}").map_err(io_failure)
}

fn run_selftest() -> Result<(), Failure> {
    let checks = selftest();
    let mut out = std::io::stdout().lock();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status} {}: {}", c.name, c.detail).map_err(io_failure)?;
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        failed => Err(Failure::Violation(format!("{failed} self-test checks failed"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            out,
            format,
            seed,
            threads,
        } => run(&config, out, format, seed, threads),
        Command::Bound { name, params } => bound(&name, &params),
        Command::Selftest => run_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("finipost: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
