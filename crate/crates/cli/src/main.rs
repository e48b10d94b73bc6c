use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polydistort::critical::CriticalError;
use polydistort::harness::{
    classify, write_reports_csv, write_trials_csv, HarnessError, Outcome, OutputFormat, WORKERS_ENV,
};
use polydistort::{
    bounds_report, run_campaign, run_equality, verify, CampaignConfig, Polynomial, Statement, Witnesses,
};
use serde::Serialize;

const EXIT_MALFORMED: u8 = 1;
const EXIT_VIOLATED: u8 = 2;
const EXIT_HYPOTHESIS: u8 = 3;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "polydistort",
    version,
    about = "Check cross-ratio distortion inequalities for polynomials"
)]
#[command(after_help = format!("The worker count of fuzz campaigns can be set with {WORKERS_ENV}."))]
struct Cli {
    /// Output format of reports [default: json].
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one statement on one witness.
    Verify {
        /// theorem1, corollary1, ..., corollary5, eq8, remark1.
        statement: Statement,
        /// Witness JSON, inline or as a file path.
        #[arg(long)]
        input: String,
        /// Tolerance overriding the witness.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a seeded fuzz campaign from a JSON config.
    Fuzz {
        #[arg(long)]
        config: PathBuf,
        /// Where to write every trial, overriding the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Critical-value bounds of a polynomial with P(0) = 0 and P'(0) != 0.
    Bounds {
        /// Ascending [re, im] coefficient pairs, inline or as a file path.
        #[arg(long)]
        poly: String,
    },
    /// Reproduce every equality case at one degree.
    Equality {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn malformed(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_MALFORMED,
        message: message.to_string(),
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        malformed(e)
    }
}

/// An argument that names an existing file is read; anything else is taken
/// as inline JSON.
fn json_argument(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        fs::read_to_string(path).map_err(|e| malformed(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(malformed)?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(malformed(e)),
        _ => Ok(()),
    }
}

fn print_csv<T: Serialize>(rows: &[T]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(io::stdout());
    for row in rows {
        w.serialize(row).map_err(malformed)?;
    }
    w.flush().map_err(malformed)
}

fn cmd_verify(statement: Statement, input: &str, tol: Option<f64>, format: Format) -> Result<u8, Failure> {
    let text = json_argument(input)?;
    let witnesses: Witnesses = serde_json::from_str(&text).map_err(|e| malformed(format!("witness: {e}")))?;
    let report = verify(statement, &witnesses, tol)?;
    match format {
        Format::Json => print_json(&report)?,
        Format::Csv => write_reports_csv(std::slice::from_ref(&report), io::stdout())?,
    }
    Ok(match classify(&report) {
        Outcome::Held | Outcome::Degenerate => 0,
        Outcome::Violated => EXIT_VIOLATED,
        Outcome::HypothesisFailed => EXIT_HYPOTHESIS,
    })
}

fn cmd_fuzz(config: &Path, output: Option<PathBuf>, format: Option<Format>) -> Result<u8, Failure> {
    let text = fs::read_to_string(config).map_err(|e| malformed(format!("{}: {e}", config.display())))?;
    let mut cfg: CampaignConfig = serde_json::from_str(&text).map_err(|e| malformed(format!("config: {e}")))?;
    if output.is_some() {
        cfg.output = output;
    }
    if let Some(f) = format {
        cfg.format = f.into();
    }
    let outcome = run_campaign(&cfg)?;
    if let Some(path) = &cfg.output {
        let file = fs::File::create(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
        let mut file = io::BufWriter::new(file);
        match cfg.format {
            OutputFormat::Csv => write_trials_csv(&outcome.trials, &mut file)?,
            OutputFormat::Json => serde_json::to_writer(&mut file, &outcome.trials).map_err(malformed)?,
        }
        file.flush().map_err(malformed)?;
    }
    print_json(&outcome.summary)?;
    Ok(if outcome.summary.passed() { 0 } else { EXIT_VIOLATED })
}

fn cmd_bounds(poly: &str, format: Format) -> Result<u8, Failure> {
    let text = json_argument(poly)?;
    let p: Polynomial = serde_json::from_str(&text).map_err(|e| malformed(format!("polynomial: {e}")))?;
    let report = match bounds_report(&p) {
        Ok(r) => r,
        Err(e @ CriticalError::Hypothesis(_)) => {
            return Err(Failure {
                code: EXIT_HYPOTHESIS,
                message: e.to_string(),
            })
        }
        Err(e) => return Err(malformed(e)),
    };
    match format {
        Format::Json => print_json(&report)?,
        Format::Csv => print_csv(std::slice::from_ref(&report))?,
    }
    Ok(if report.holds() { 0 } else { EXIT_VIOLATED })
}

#[derive(Serialize)]
struct FamilyRow<'a> {
    n: usize,
    statement: Statement,
    family: &'a str,
    trials: usize,
    max_abs_relative_slack: f64,
    all_hold: bool,
}

fn cmd_equality(n: usize, trials: usize, seed: u64, format: Format) -> Result<u8, Failure> {
    let summary = run_equality(n, trials, seed)?;
    match format {
        Format::Json => print_json(&summary)?,
        Format::Csv => {
            let rows: Vec<FamilyRow> = summary
                .families
                .iter()
                .map(|f| FamilyRow {
                    n,
                    statement: f.statement,
                    family: &f.family,
                    trials: f.trials,
                    max_abs_relative_slack: f.max_abs_relative_slack,
                    all_hold: f.all_hold,
                })
                .collect();
            print_csv(&rows)?;
        }
    }
    Ok(if summary.passed { 0 } else { EXIT_VIOLATED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_MALFORMED);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let format = cli.format.unwrap_or(Format::Json);
    let result = match cli.command {
        Command::Verify { statement, input, tol } => cmd_verify(statement, &input, tol, format),
        Command::Fuzz { config, output } => cmd_fuzz(&config, output, cli.format),
        Command::Bounds { poly } => cmd_bounds(&poly, format),
        Command::Equality { n, trials, seed } => cmd_equality(n, trials, seed, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
