//! Command-line front end: `analyze`, `recover`, `sweep` and `verify`.

mod commands;
pub mod parse;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::EnumerationLimits;
use crate::recovery::RecoveryConfig;

pub use commands::{
    cmd_analyze, cmd_recover, cmd_sweep, family_candidates, SweepRow, SWEEP_HEADER,
};
pub use verify::{cmd_verify, run_suites, Implementations, SuiteReport, VerifyReport};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for usage, parse and input errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when a verification suite failed.
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Largest ambient group accepted from a group spec.
pub const GROUP_ORDER_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Everything a command needs, independent of how it was parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub group_spec: Option<String>,
    pub input_path: Option<PathBuf>,
    pub candidates_path: Option<PathBuf>,
    pub family: Option<String>,
    pub seed: u64,
    pub trials: usize,
    pub output_format: OutputFormat,
    pub gamma: f64,
    pub theta: f64,
    /// Largest group order for which subgroups are enumerated.
    pub enumeration_cap: usize,
    /// Sweep: exponents `n` of the base subgroup `Z_p^n`.
    pub n_range: Vec<usize>,
    /// Sweep: perturbation sizes `|T|`.
    pub t_range: Vec<usize>,
    /// Sweep: the prime `p`.
    pub base: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rc = RecoveryConfig::default();
        RunConfig {
            group_spec: None,
            input_path: None,
            candidates_path: None,
            family: None,
            seed: 0,
            trials: 1,
            output_format: OutputFormat::Json,
            gamma: rc.gamma,
            theta: rc.theta,
            enumeration_cap: rc.limits.order_cap,
            n_range: vec![6, 7, 8],
            t_range: vec![1, 2, 3, 4],
            base: 2,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.trials == 0 {
            return bad("--trials must be at least 1");
        }
        if self.enumeration_cap == 0 {
            return bad("--cap must be positive");
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return bad("--gamma must be a finite non-negative number");
        }
        if !(self.theta.is_finite() && self.theta >= 0.0) {
            return bad("--theta must be a finite non-negative number");
        }
        if self.base < 2 {
            return bad("--base must be at least 2");
        }
        Ok(())
    }

    pub fn recovery_config(&self) -> RecoveryConfig {
        RecoveryConfig {
            gamma: self.gamma,
            theta: self.theta,
            limits: EnumerationLimits {
                order_cap: self.enumeration_cap,
                ..EnumerationLimits::default()
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "distdoubling", version, about = "Doubling measures and coset recovery for sets in finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal epsilon, entropy gap and additive energy of a set.
    Analyze(CommonArgs),
    /// Recover a coset close to a set and check the bounds.
    Recover(CommonArgs),
    /// Run a perturbed-subgroup family and emit one CSV row per instance.
    Sweep(CommonArgs),
    /// Run every invariant suite; exit 2 on any failure.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Group spec such as 2x2x2 or 4x6.
    #[arg(long)]
    group: Option<String>,
    /// Set file with one element per line.
    #[arg(long)]
    set: Option<PathBuf>,
    /// Candidate subgroups, one generator list per line.
    #[arg(long)]
    candidates: Option<PathBuf>,
    /// Sweep family: delete, add, mixed or random.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances per parameter point (sweep) or per suite (verify).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Label an instance gamma-regime when its entropy gap is at most this.
    #[arg(long)]
    gamma: Option<f64>,
    /// Label an instance theta-regime when its main bound is at most this.
    #[arg(long)]
    theta: Option<f64>,
    /// Largest group order for subgroup enumeration.
    #[arg(long)]
    cap: Option<usize>,
    /// Sweep exponents, e.g. 6..10 or 6,8.
    #[arg(long)]
    n_range: Option<String>,
    /// Sweep perturbation sizes, e.g. 1..4.
    #[arg(long)]
    t_range: Option<String>,
    /// Sweep prime.
    #[arg(long)]
    base: Option<usize>,
    /// Output path; stdout when absent or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn into_config(self, default_trials: usize, default_format: OutputFormat) -> Result<RunConfig> {
        let d = RunConfig::default();
        let config = RunConfig {
            group_spec: self.group,
            input_path: self.set,
            candidates_path: self.candidates,
            family: self.family,
            seed: self.seed,
            trials: self.trials.unwrap_or(default_trials),
            output_format: self.format.unwrap_or(default_format),
            gamma: self.gamma.unwrap_or(d.gamma),
            theta: self.theta.unwrap_or(d.theta),
            enumeration_cap: self.cap.unwrap_or(d.enumeration_cap),
            n_range: match self.n_range {
                Some(r) => parse::parse_range(&r)?,
                None => d.n_range,
            },
            t_range: match self.t_range {
                Some(r) => parse::parse_range(&r)?,
                None => d.t_range,
            },
            base: self.base.unwrap_or(d.base),
            out: self.out,
        };
        config.validate()?;
        Ok(config)
    }
}

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) if p.as_os_str() != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn write_csv<I>(out: &mut dyn Write, header: &[&str], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
}

enum Kind {
    Analyze,
    Recover,
    Sweep,
    Verify,
}

/// Runs one parsed command, writing its output to `out`. Returns the exit
/// status.
fn execute(command: Command, out_override: Option<&mut dyn Write>) -> std::result::Result<i32, String> {
    let (config, kind) = match command {
        Command::Analyze(a) => (a.into_config(1, OutputFormat::Json), Kind::Analyze),
        Command::Recover(a) => (a.into_config(1, OutputFormat::Json), Kind::Recover),
        Command::Sweep(a) => (a.into_config(1, OutputFormat::Csv), Kind::Sweep),
        Command::Verify(a) => (
            a.into_config(verify::DEFAULT_TRIALS, OutputFormat::Json),
            Kind::Verify,
        ),
    };
    let config = config.map_err(|e| e.to_string())?;
    let mut file;
    let out: &mut dyn Write = match out_override {
        Some(w) => w,
        None => {
            file = open_output(&config.out).map_err(|e| format!("cannot open output: {e}"))?;
            &mut *file
        }
    };
    let io_err = |e: io::Error| format!("write failed: {e}");
    match kind {
        Kind::Analyze => {
            let report = cmd_analyze(&config).map_err(|e| e.to_string())?;
            match config.output_format {
                OutputFormat::Json => write_json(out, &report),
                OutputFormat::Csv => write_csv(
                    out,
                    &crate::measures::MeasureReport::CSV_HEADER,
                    [report.csv_record()],
                ),
            }
            .map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Kind::Recover => {
            let result = cmd_recover(&config).map_err(|e| e.to_string())?;
            match config.output_format {
                OutputFormat::Json => write_json(out, &result),
                OutputFormat::Csv => write_csv(
                    out,
                    &crate::recovery::RecoveryResult::CSV_HEADER,
                    [result.csv_record()],
                ),
            }
            .map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Kind::Sweep => {
            let rows = cmd_sweep(&config).map_err(|e| e.to_string())?;
            match config.output_format {
                OutputFormat::Json => write_json(out, &rows),
                OutputFormat::Csv => {
                    write_csv(out, &SWEEP_HEADER, rows.iter().map(SweepRow::csv_record))
                }
            }
            .map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Kind::Verify => {
            let report = cmd_verify(&config);
            match config.output_format {
                OutputFormat::Json => write_json(out, &report),
                OutputFormat::Csv => write_csv(
                    out,
                    &SuiteReport::CSV_HEADER,
                    report.suites.iter().map(SuiteReport::csv_record),
                ),
            }
            .map_err(io_err)?;
            Ok(if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn run_inner<I, T>(args: I, out: Option<&mut dyn Write>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(args, None)
}

/// As [`run`], writing command output to `out` instead of `--out`/stdout.
pub fn run_to<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(args, Some(out))
}
