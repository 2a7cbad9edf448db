//! Argument parsing and subcommand dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::config::{
    load_configs, parse_tol_overrides, validate, validate_batch, ConfigError, Pipeline, RunConfig, FAMILIES,
};
use crate::output::{matrix_csv, plot_data, residuals_csv, spectra_csv, to_json, write_file};
use crate::pipeline::{run_config, verify_all, Outcome, Report, Status};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HEUNBAND_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "heunband", version, about = "Commuting operators for band-time limiting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the polynomial families and their parameters.
    Families {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the configurations in a JSON file and write their reports.
    Run(RunArgs),
    /// Run the full acceptance suite.
    VerifyAll {
        /// Directory for the suite report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the configurations and write the matrices they build as CSV.
    Export(RunArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// JSON file holding one run or an array of runs.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; reports go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format (`run`, default json) or matrix format (`export`,
    /// default csv).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tolerance override `NAME=VALUE`; may be repeated.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            for d in &e.diagnostics {
                eprintln!("error: {d}");
            }
            EXIT_USAGE
        }
    }
}

fn execute(command: Command) -> Result<i32, ConfigError> {
    match command {
        Command::Families { format } => families(format),
        Command::Run(args) => run(args, false),
        Command::Export(args) => run(args, true),
        Command::VerifyAll { out, format } => verify_all_command(out, format),
    }
}

/// Worker pool sized by `HEUNBAND_THREADS` when set.
fn thread_pool() -> Result<rayon::ThreadPool, ConfigError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => builder = builder.num_threads(n),
            _ => {
                return Err(ConfigError::single(format!(
                    "{THREADS_ENV} = {raw:?} must be a positive integer"
                )))
            }
        }
    }
    builder
        .build()
        .map_err(|e| ConfigError::single(format!("cannot start worker threads: {e}")))
}

fn families(format: Option<Format>) -> Result<i32, ConfigError> {
    let mut out = std::io::stdout().lock();
    let text = match format {
        None => {
            let mut s = format!(
                "{:<16} {:<18} {:<11} {}\n",
                "KIND", "PIPELINES", "PARAMETERS", "CONSTRAINTS"
            );
            for f in &FAMILIES {
                let params = if f.parameters.is_empty() { "-" } else { f.parameters };
                s.push_str(&format!(
                    "{:<16} {:<18} {:<11} {}\n",
                    f.kind, f.pipelines, params, f.constraints
                ));
            }
            s
        }
        Some(Format::Json) => to_json(&FAMILIES),
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for f in &FAMILIES {
                w.serialize(f).expect("writing to memory cannot fail");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv writes UTF-8")
        }
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_PASS)
}

fn io_error(path: &Path, e: std::io::Error) -> ConfigError {
    ConfigError::single(format!("{}: {e}", path.display()))
}

fn run(args: RunArgs, export: bool) -> Result<i32, ConfigError> {
    let cli_tols = parse_tol_overrides(&args.tol)?;
    let configs = validate_batch(load_configs(&args.config)?, &cli_tols)?;
    let pool = thread_pool()?;
    let outcomes: Vec<Outcome> = pool.install(|| configs.par_iter().map(|c| run_config(c, export)).collect());

    if outcomes.iter().any(|o| o.status == Status::Invalid) {
        let mut diagnostics = Vec::new();
        for o in outcomes.iter().filter(|o| o.status == Status::Invalid) {
            diagnostics.extend(o.report.verdict.diagnostics.iter().map(|d| format!("{}: {d}", o.name)));
        }
        return Err(ConfigError { diagnostics });
    }

    // Reports are written one after another, in configuration order.
    let dirs: Vec<Option<PathBuf>> = configs
        .iter()
        .map(|c| args.out.clone().or_else(|| c.config.out.clone()))
        .collect();
    if export {
        for (o, dir) in outcomes.iter().zip(&dirs) {
            let dir = dir
                .as_deref()
                .ok_or_else(|| ConfigError::single(format!("{}: export needs --out or an `out` field", o.name)))?;
            write_matrices(dir, o, args.format.unwrap_or(Format::Csv))?;
        }
    } else {
        let format = args.format.unwrap_or(Format::Json);
        let mut to_stdout: Vec<&Outcome> = Vec::new();
        for (o, dir) in outcomes.iter().zip(&dirs) {
            match dir {
                Some(dir) => write_report(dir, o, format)?,
                None => to_stdout.push(o),
            }
        }
        print_reports(&to_stdout, format, configs.len() > 1);
    }
    Ok(summarize(&outcomes))
}

fn write_report(dir: &Path, o: &Outcome, format: Format) -> Result<(), ConfigError> {
    let pairs = [(o.name.as_str(), &o.report)];
    let written = match format {
        Format::Json => write_file(dir, &format!("{}.json", o.name), &to_json(&o.report)),
        Format::Csv => write_file(dir, &format!("{}.residuals.csv", o.name), &residuals_csv(pairs))
            .and_then(|_| write_file(dir, &format!("{}.spectra.csv", o.name), &spectra_csv(pairs))),
    };
    written.map_err(|e| io_error(dir, e))?;
    if let Some(values) = o.report.spectra.get("concentration") {
        write_file(dir, &format!("{}.concentration.dat", o.name), &plot_data(values)).map_err(|e| io_error(dir, e))?;
    }
    Ok(())
}

fn write_matrices(dir: &Path, o: &Outcome, format: Format) -> Result<(), ConfigError> {
    let written = match format {
        Format::Csv => o
            .matrices
            .iter()
            .try_for_each(|(name, m)| write_file(dir, &format!("{}.{name}.csv", o.name), &matrix_csv(m)).map(drop)),
        Format::Json => {
            let rows: BTreeMap<&str, Vec<Vec<f64>>> = o
                .matrices
                .iter()
                .map(|(name, m)| (name.as_str(), m.to_rows()))
                .collect();
            write_file(dir, &format!("{}.matrices.json", o.name), &to_json(&rows)).map(drop)
        }
    };
    written.map_err(|e| io_error(dir, e))
}

fn print_reports(outcomes: &[&Outcome], format: Format, batch: bool) {
    if outcomes.is_empty() {
        return;
    }
    let text = match format {
        Format::Json if batch => to_json(&outcomes.iter().map(|o| &o.report).collect::<Vec<&Report>>()),
        Format::Json => to_json(&outcomes[0].report),
        Format::Csv => residuals_csv(outcomes.iter().map(|o| (o.name.as_str(), &o.report))),
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

/// One status line per run on stderr; the exit code reflects the worst.
fn summarize(outcomes: &[Outcome]) -> i32 {
    let mut code = EXIT_PASS;
    for o in outcomes {
        if o.report.verdict.passed {
            eprintln!("{}: PASS", o.name);
        } else {
            code = EXIT_FAIL;
            eprintln!("{}: FAIL", o.name);
            for d in &o.report.verdict.diagnostics {
                eprintln!("  {d}");
            }
        }
    }
    code
}

fn verify_all_command(out: Option<PathBuf>, format: Format) -> Result<i32, ConfigError> {
    let config = validate(RunConfig::new(Pipeline::VerifyAll), None, &BTreeMap::new())?;
    let pool = thread_pool()?;
    let (outcome, criteria): (Outcome, _) = pool.install(|| verify_all(&config));
    for c in &criteria {
        println!("{}", c.line());
    }
    if let Some(dir) = out {
        write_report(&dir, &outcome, format)?;
    }
    Ok(if outcome.report.verdict.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}
