use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xmodkit::group::DEFAULT_BUDGET;
use xmodkit::words::DEFAULT_AUDIT_LEN;
use xmodkit_cli::commands::{self, Algorithm, CondP, Options};
use xmodkit_cli::defs::{load, Definitions};
use xmodkit_cli::{CliError, Report};

#[derive(Parser)]
#[command(name = "xmodkit", version, about = "Checks and constructions for finite crossed modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Print a short human-readable summary instead of JSON
    #[arg(long, global = true, conflicts_with = "json")]
    summary: bool,
    /// Print the JSON report (default)
    #[arg(long, global = true)]
    json: bool,
    /// Node budget for every search
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Maximal length of audited ternary cosmash words
    #[arg(long, global = true, default_value_t = DEFAULT_AUDIT_LEN)]
    ternary_len: usize,
    /// Seed for every generated corpus
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Include wall-clock time in the report
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Axioms, word-level axioms and the ternary condition of a crossed module
    Check { file: PathBuf, name: String },
    /// π₀ as a cokernel, compared with its coequalizer presentation
    Pi0 { file: PathBuf, name: String },
    /// Construct and certify a section of an epimorphism of crossed modules
    Lift {
        file: PathBuf,
        /// morphism name; omit with --family
        epi: Option<String>,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::ProjectiveSection)]
        algorithm: AlgorithmArg,
        /// run every epimorphism of a family block
        #[arg(long, conflicts_with = "epi")]
        family: Option<String>,
    },
    /// Condition (P) experiments in the variety of Z/4Z-modules
    Condp {
        #[arg(value_enum)]
        experiment: CondPArg,
        file: Option<PathBuf>,
        /// setmap block for z4-pipeline
        #[arg(long)]
        set_map: Option<String>,
        /// corpus size
        #[arg(long)]
        count: Option<usize>,
    },
    /// Check everything in a file, or the built-in corpus without one
    Audit { file: Option<PathBuf> },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    ProjectiveSection,
    PullbackSection,
}

#[derive(Clone, Copy, ValueEnum)]
enum CondPArg {
    Z4Pipeline,
    NonSchreier,
    Transfer,
    Preservation,
    Modules,
}

fn read_defs(path: &Path) -> Result<Definitions, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    load(&src)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let opts = Options { budget: cli.common.budget, ternary_len: cli.common.ternary_len, seed: cli.common.seed };
    match &cli.command {
        Command::Check { file, name } => commands::check(&read_defs(file)?, name, &opts),
        Command::Pi0 { file, name } => commands::pi0_cmd(&read_defs(file)?, name),
        Command::Lift { file, epi, algorithm, family } => {
            let defs = read_defs(file)?;
            let algorithm = match algorithm {
                AlgorithmArg::ProjectiveSection => Algorithm::ProjectiveSection,
                AlgorithmArg::PullbackSection => Algorithm::PullbackSection,
            };
            match (epi, family) {
                (Some(e), None) => commands::lift(&defs, e, algorithm, &opts),
                (None, Some(f)) => commands::lift_family(&defs, f, algorithm, &opts),
                _ => Err(CliError::Usage("lift needs a morphism name or --family".into())),
            }
        }
        Command::Condp { experiment, file, set_map, count } => {
            let defs = file.as_deref().map(read_defs).transpose()?;
            let sub = match experiment {
                CondPArg::Z4Pipeline => CondP::Z4Pipeline,
                CondPArg::NonSchreier => CondP::NonSchreier,
                CondPArg::Transfer => CondP::Transfer,
                CondPArg::Preservation => CondP::Preservation,
                CondPArg::Modules => CondP::Modules,
            };
            commands::condp(sub, defs.as_ref(), set_map.as_deref(), *count, &opts)
        }
        Command::Audit { file } => {
            let defs = file.as_deref().map(read_defs).transpose()?;
            commands::audit(defs.as_ref(), &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            if cli.common.timing {
                report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            if cli.common.summary {
                print!("{}", report.to_summary());
            } else {
                println!("{}", report.to_json());
            }
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
