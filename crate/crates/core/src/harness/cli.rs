//! Command-line front end. Exit codes: 0 pass, 1 constraint failure, 2 usage
//! or parse error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::chsh::{all_block_violations, BlockViolationReport};
use crate::correlations::{reference_tables, verify_tables, VERIFY_TOL};
use crate::error::Error;
use crate::extraction::{extract, measurement_equivalence, EquivalenceEntry, ExtractionReport, EXTRACT_TOL};
use crate::harness::embed::{embed_realization, EmbeddingSpec};
use crate::harness::io::{self, TablesFile};
use crate::harness::sample::sample_tables;
use crate::ideal::{ideal_realization, Realization};
use crate::schmidt::SchmidtCoefficients;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Typed decimals like `0.70710678` are rescaled if their squares sum to 1
/// within this; files and the library stay strict.
pub const TYPED_COEFF_SLACK: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "selftest", version, about = "Self-testing correlations for pure bipartite entangled states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct CoeffSource {
    /// Comma-separated Schmidt coefficients.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    coeffs: Option<Vec<f64>>,
    /// Coefficients file `{"d": .., "c": [..]}`.
    #[arg(long, value_name = "PATH")]
    coeffs_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CoeffArgs {
    /// Local dimension; must match the number of coefficients if given.
    #[arg(short = 'd')]
    d: Option<usize>,
    #[command(flatten)]
    source: CoeffSource,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reference correlation tables for the given coefficients.
    Generate {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// The ideal realization (target state and measurements).
    Ideal {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Checks a tables file against the reference correlation.
    Verify {
        #[arg(long, value_name = "PATH")]
        tables: PathBuf,
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
    /// Tilted CHSH value of every block.
    Chsh {
        #[arg(long, value_name = "PATH")]
        tables: PathBuf,
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Runs the extraction isometry on a realization.
    Extract {
        #[arg(long, value_name = "PATH")]
        realization: PathBuf,
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long, default_value_t = 1.0 - EXTRACT_TOL)]
        fidelity_threshold: f64,
        #[arg(long, default_value_t = EXTRACT_TOL)]
        tol: f64,
        /// Also map every block observable through the isometry.
        #[arg(long)]
        measurements: bool,
    },
    /// Hides a realization behind extra dimensions and local unitaries.
    Embed {
        #[arg(long, value_name = "PATH")]
        realization: PathBuf,
        /// Embedding spec file `{"extraA": .., "extraB": .., "seed": ..}`.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["extra_a", "extra_b", "seed"])]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        extra_a: usize,
        #[arg(long, default_value_t = 0)]
        extra_b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Finite-shot estimate of a realization's tables.
    Sample {
        #[arg(long, value_name = "PATH")]
        realization: PathBuf,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn load_coefficients(args: &CoeffArgs) -> std::result::Result<SchmidtCoefficients, Failure> {
    let sc = match (&args.source.coeffs, &args.source.coeffs_file) {
        (Some(c), _) => {
            let total: f64 = c.iter().map(|x| x * x).sum();
            let c = if (total - 1.0).abs() <= TYPED_COEFF_SLACK && total > 0.0 {
                c.iter().map(|x| x / total.sqrt()).collect()
            } else {
                c.clone()
            };
            SchmidtCoefficients::new(c)?
        }
        (None, Some(path)) => io::parse_coefficients(&io::read_file(path)?, &path.display().to_string())?,
        (None, None) => return Err(Failure::Usage("one of --coeffs or --coeffs-file is required".into())),
    };
    if let Some(d) = args.d {
        if d != sc.d() {
            return Err(Failure::Usage(format!("-d {d} does not match {} coefficients", sc.d())));
        }
    }
    Ok(sc)
}

fn load_realization(path: &Path) -> std::result::Result<Realization, Failure> {
    Ok(io::parse_realization(&io::read_file(path)?, &path.display().to_string())?)
}

fn emit(output: &Option<PathBuf>, contents: &str) -> std::result::Result<(), Failure> {
    match output {
        Some(path) => io::write_file(path, contents)?,
        None => println!("{contents}"),
    }
    Ok(())
}

fn report<T: Serialize>(value: &T) {
    println!("{}", io::to_json(value));
}

#[derive(Serialize)]
struct ChshOutput {
    blocks: Vec<BlockViolationReport>,
    max_residual: f64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ExtractOutput {
    #[serde(flatten)]
    report: ExtractionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    measurement_equivalence: Option<Vec<EquivalenceEntry>>,
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate { coeffs, output } => {
            let sc = load_coefficients(&coeffs)?;
            emit(&output, &io::tables_to_json(&reference_tables(&sc)))?;
            Ok(true)
        }
        Command::Ideal { coeffs, output } => {
            let sc = load_coefficients(&coeffs)?;
            emit(&output, &io::realization_to_json(&ideal_realization(&sc)))?;
            Ok(true)
        }
        Command::Verify { tables, coeffs, tol } => {
            let sc = load_coefficients(&coeffs)?;
            let t = io::parse_tables(&io::read_file(&tables)?, &tables.display().to_string())?;
            let rep = verify_tables(&t, &sc, tol)?;
            report(&rep);
            Ok(rep.pass)
        }
        Command::Chsh { tables, coeffs, tol } => {
            let sc = load_coefficients(&coeffs)?;
            let t = io::parse_tables(&io::read_file(&tables)?, &tables.display().to_string())?;
            let blocks = all_block_violations(&t, &sc)?;
            let max_residual = blocks.iter().map(|b| b.residual).fold(0.0, f64::max);
            let pass = max_residual <= tol;
            report(&ChshOutput { blocks, max_residual, tol, pass });
            Ok(pass)
        }
        Command::Extract { realization, coeffs, fidelity_threshold, tol, measurements } => {
            let sc = load_coefficients(&coeffs)?;
            let r = load_realization(&realization)?;
            let mut ex = extract(&r, &sc, tol)?;
            ex.report.judge(fidelity_threshold, tol);
            let mut pass = ex.report.pass;
            let equivalence = if measurements {
                let entries = measurement_equivalence(&r, &sc, &ex)?;
                pass &= entries.iter().all(|e| e.residual <= tol);
                Some(entries)
            } else {
                None
            };
            report(&ExtractOutput { report: ex.report, measurement_equivalence: equivalence });
            Ok(pass)
        }
        Command::Embed { realization, spec, extra_a, extra_b, seed, output } => {
            let r = load_realization(&realization)?;
            let spec = match spec {
                Some(path) => io::from_json::<EmbeddingSpec>(&io::read_file(&path)?, &path.display().to_string())?,
                None => EmbeddingSpec { extra_a, extra_b, seed },
            };
            emit(&output, &io::realization_to_json(&embed_realization(&r, &spec)?))?;
            Ok(true)
        }
        Command::Sample { realization, shots, seed, output } => {
            if shots == 0 {
                return Err(Failure::Usage("--shots must be at least 1".into()));
            }
            let r = load_realization(&realization)?;
            let s = sample_tables(&r, shots, seed)?;
            let mut file = TablesFile::from_tables(&s.estimated);
            file.shots = Some(s.shots_per_pair);
            file.seed = Some(s.seed);
            file.stderr_max = Some(s.stderr_max);
            emit(&output, &io::to_json(&file))?;
            Ok(true)
        }
    }
}

/// Parses `argv` (including the program name) and runs one subcommand.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(cli_dispatch(["selftest"]), EXIT_USAGE);
        assert_eq!(cli_dispatch(["selftest", "generate"]), EXIT_USAGE);
        assert_eq!(cli_dispatch(["selftest", "generate", "--coeffs", "0.6,abc"]), EXIT_USAGE);
        assert_eq!(cli_dispatch(["selftest", "generate", "-d", "3", "--coeffs", "0.8,0.6"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(cli_dispatch(["selftest", "--help"]), EXIT_PASS);
    }

    #[test]
    fn product_state_is_constraint_failure() {
        assert_eq!(cli_dispatch(["selftest", "generate", "--coeffs", "1,0"]), EXIT_FAIL);
        assert_eq!(cli_dispatch(["selftest", "generate", "--coeffs", "0.5,0.5"]), EXIT_FAIL);
    }
}
