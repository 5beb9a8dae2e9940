mod commands;
mod report;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{Failure, Inputs, Report};

#[derive(Parser)]
#[command(name = "sqrank", version, about = "Model ranks, square degrees of tree families, and square extraction")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Report format on standard output.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for sampling suites.
    #[arg(long, default_value_t = 7, global = true)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Widest relation a model may carry.
    #[arg(long, default_value_t = 4, global = true)]
    max_arity: usize,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Witness,
    Rank,
}

#[derive(Subcommand)]
pub enum Command {
    /// Rank of every set (or the given sets) of a finite model.
    Rank {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        variant: u8,
        #[arg(long, default_value_t = 2)]
        closure: usize,
        /// Witness family size for variants 2 and up.
        #[arg(long)]
        witnesses: Option<usize>,
        /// Class bound for the experimental partition variants 4 and 5.
        #[arg(long)]
        classes: Option<usize>,
        /// Comma-separated elements; repeatable.
        #[arg(long = "set")]
        sets: Vec<String>,
    },
    /// Rectangle ranks of a two-sorted colored model.
    Rkrc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        variant: u8,
        #[arg(long, default_value_t = 2)]
        closure: usize,
        #[arg(long)]
        color: Option<usize>,
        /// Also decide whether some color reaches this rank.
        #[arg(long)]
        alpha: Option<i32>,
    },
    /// Square degree of a tree family, or of one entry.
    Degsq {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        entry: Option<PathBuf>,
        /// Read a labelled (Souslin) family instead.
        #[arg(long)]
        souslin: bool,
    },
    /// Rectangle degree of a pair of node sets in one tree.
    Degrc {
        #[arg(long)]
        tree: PathBuf,
        /// Comma-separated strings.
        #[arg(long)]
        u1: String,
        #[arg(long)]
        u2: String,
        /// Leave same-side companions free.
        #[arg(long)]
        permissive: bool,
    },
    /// Build a family of prescribed square degree.
    Build {
        #[arg(long)]
        alpha: usize,
        #[arg(long, default_value_t = sqrank::builder::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a witness, rectangle or coloring into a model file.
    Encode {
        #[command(subcommand)]
        kind: EncodeKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Largest square of leaves in a family.
    FindSquare {
        #[arg(long)]
        family: PathBuf,
        /// Stop at the first square of this size.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Largest rectangle in a tree or in a family.
    FindRectangle {
        #[arg(long, required_unless_present = "family", conflicts_with = "family")]
        tree: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Chain of splitting approximations certified by a witness.
    ExtractSquare {
        #[arg(long)]
        family: PathBuf,
        /// Defaults to the largest square of the family.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        quota: usize,
        #[arg(long, value_enum, default_value_t = Mode::Witness)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        variant: u8,
        #[arg(long, default_value_t = 2)]
        closure: usize,
    },
    /// Grow a splitting square inside a set of points of a closed set.
    Boost {
        #[arg(long)]
        tree: PathBuf,
        /// Comma-separated full-depth strings.
        #[arg(long)]
        points: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = 1)]
        threshold: usize,
    },
    /// Least set of the given size free for a list of functions.
    FreeSet {
        #[arg(long)]
        functions: PathBuf,
        #[arg(long)]
        target: usize,
    },
    /// Whether every small pattern of the source occurs in the target.
    EmbedCheck {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        source: PathBuf,
        /// Largest pattern size; defaults to the source size.
        #[arg(long)]
        max: Option<usize>,
    },
    /// Run the bundled invariant checks on seeded samples.
    Selftest {
        #[arg(long, default_value_t = 40)]
        cases: usize,
    },
}

#[derive(Subcommand)]
pub enum EncodeKind {
    Square {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    Souslin {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    Rectangle {
        /// Repeatable; tree `i` gives color `i`.
        #[arg(long, required = true)]
        tree: Vec<PathBuf>,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    Coloring {
        #[arg(long)]
        coloring: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rank { .. } => "rank",
            Command::Rkrc { .. } => "rkrc",
            Command::Degsq { .. } => "degsq",
            Command::Degrc { .. } => "degrc",
            Command::Build { .. } => "build",
            Command::Encode { .. } => "encode",
            Command::FindSquare { .. } => "find-square",
            Command::FindRectangle { .. } => "find-rectangle",
            Command::ExtractSquare { .. } => "extract-square",
            Command::Boost { .. } => "boost",
            Command::FreeSet { .. } => "free-set",
            Command::EmbedCheck { .. } => "embed-check",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn emit(report: &Report, format: Format) -> ExitCode {
    let text = match format {
        Format::Json => format!("{:#}\n", report.to_json()),
        Format::Text => report.to_text(),
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(report.exit_code())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let report = Report {
                command: None,
                argv: argv[1..].to_vec(),
                inputs: Inputs::default(),
                outcome: Err(Failure::input(e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: "))),
                seconds: None,
            };
            // the format flag may be the thing that failed to parse
            let text = argv.windows(2).any(|w| w[0] == "--format" && w[1] == "text");
            return emit(&report, if text { Format::Text } else { Format::Json });
        }
    };
    let g = &cli.global;
    let mut inputs = Inputs::default();
    let start = Instant::now();
    let outcome = match g.jobs {
        Some(0) => Err(Failure::input("--jobs must be at least 1")),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| commands::run(&cli.command, g, &mut inputs)),
            Err(e) => Err(Failure::input(format!("thread pool: {e}"))),
        },
        None => commands::run(&cli.command, g, &mut inputs),
    };
    let report = Report {
        command: Some(cli.command.name().to_string()),
        argv: argv[1..].to_vec(),
        inputs,
        outcome,
        seconds: g.timing.then(|| start.elapsed().as_secs_f64()),
    };
    emit(&report, g.format)
}
