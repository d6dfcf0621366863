use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ramsey_cli::commands::{self, Outcome};
use ramsey_cli::problem::{resolve, Overrides, ProblemFile};
use ramsey_core::EngineId;

#[derive(Parser)]
#[command(name = "ramsey", version, about = "Exact monochromatic-subset counts and Ramsey number search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count distributions with a monochromatic target at one n.
    Compute {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        #[arg(long)]
        k_cutoff: Option<usize>,
    },
    /// Scan n = 1, 2, ... for the smallest n where every distribution has one.
    Search {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        #[arg(long)]
        k_cutoff: Option<usize>,
    },
    /// Run all three engines and compare.
    Validate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k_cutoff: Option<usize>,
    },
    /// Upper bound on the largest compatible event tuple.
    Kmax {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        n: Option<usize>,
        /// Also search for the true maximum.
        #[arg(long)]
        realized: bool,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Number of boxes.
    #[arg(long)]
    t: Option<usize>,
    /// Size of the distributed subsets.
    #[arg(long)]
    r: Option<usize>,
    /// Target subset sizes, comma separated and nondecreasing.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    /// Problem file (TOML key = value pairs); flags override it.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Enumeration budget (env RAMSEY_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
    /// Worker threads (env RAMSEY_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Brute,
    Direct,
    Spectrum,
}

impl From<EngineArg> for EngineId {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Brute => EngineId::Brute,
            EngineArg::Direct => EngineId::Direct,
            EngineArg::Spectrum => EngineId::Spectrum,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn overrides(problem: &ProblemArgs) -> Overrides {
    Overrides {
        t: problem.t,
        r: problem.r,
        p: problem.p.clone(),
        budget: problem.budget,
        workers: problem.workers,
        ..Overrides::default()
    }
}

fn run(cli: Cli) -> (Outcome, Format) {
    let (problem, mut flags) = match &cli.command {
        Command::Compute { problem, .. }
        | Command::Search { problem, .. }
        | Command::Validate { problem, .. }
        | Command::Kmax { problem, .. } => (problem, overrides(problem)),
    };
    match &cli.command {
        Command::Compute { n, engine, k_cutoff, .. } => {
            flags.n = *n;
            flags.engine = engine.map(Into::into);
            flags.k_cutoff = *k_cutoff;
        }
        Command::Search { n_max, engine, k_cutoff, .. } => {
            flags.n_max = *n_max;
            flags.engine = engine.map(Into::into);
            flags.k_cutoff = *k_cutoff;
        }
        Command::Validate { n, k_cutoff, .. } => {
            flags.n = *n;
            flags.k_cutoff = *k_cutoff;
        }
        Command::Kmax { n, .. } => flags.n = *n,
    }
    let format = problem.format;
    let file = match problem.file.as_deref().map(ProblemFile::load).transpose() {
        Ok(file) => file,
        Err(e) => return (Outcome::parse_error(&e), format),
    };
    let resolved = match resolve(flags, file, &|name| std::env::var(name).ok()) {
        Ok(r) => r,
        Err(e) => return (Outcome::parse_error(&e), format),
    };
    let outcome = match &cli.command {
        Command::Compute { .. } => commands::compute(&resolved),
        Command::Search { .. } => commands::search(&resolved),
        Command::Validate { .. } => commands::validate(&resolved),
        Command::Kmax { realized, .. } => commands::kmax(&resolved, *realized),
    };
    (outcome, format)
}

fn main() -> ExitCode {
    let (outcome, format) = run(Cli::parse());
    if let Some(doc) = &outcome.document {
        match format {
            Format::Json => println!("{}", doc.to_json()),
            Format::Csv => print!("{}", doc.to_csv()),
        }
    }
    for message in &outcome.messages {
        eprintln!("{message}");
    }
    ExitCode::from(outcome.code as u8)
}
