use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvechar::harness::{self, resolve_config};

#[derive(Parser)]
#[command(
    name = "curvechar",
    version,
    about = "Exact curve characters, lengths and self-intersections on the once-punctured torus"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// JSON config file providing defaults for seed, out_dir and width.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw of the run; recorded in outputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overridden by CURVECHAR_OUT_DIR).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker pool width; results never depend on it.
    #[arg(long, global = true)]
    width: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical character polynomial of a word.
    Char { word: String },
    /// Decide whether two words have equal characters.
    Equal {
        word1: String,
        word2: String,
        /// Use random rational representations instead of the exact polynomial.
        #[arg(long)]
        probabilistic: bool,
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Enumerate character-sharing tuples up to a length bound.
    Search {
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        include_powers: bool,
        /// Annotate bucket members with self-intersection numbers.
        #[arg(long)]
        annotate: bool,
        /// JSONL report path, relative to the output directory.
        #[arg(long, default_value = "search_report.jsonl")]
        out: PathBuf,
    },
    /// Self-intersection number of a class (default structure: x = y = 3).
    Selfint {
        word: String,
        /// Trace of the first generator, as p or p/q.
        #[arg(long, requires = "y")]
        x: Option<String>,
        /// Trace of the second generator, as p or p/q.
        #[arg(long, requires = "x")]
        y: Option<String>,
    },
    /// Geodesic lengths of classes at a cusped structure.
    Lengths {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(required = true)]
        words: Vec<String>,
        /// CSV path, relative to the output directory; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the reference pinching schedule and report lengths per step.
    Pinch {
        /// JSON file: {"probes": ["abaaB", ...]}.
        #[arg(long)]
        pinch_config: Option<PathBuf>,
        #[arg(long, default_value = "pinch_report.csv")]
        out: PathBuf,
    },
    /// Minimum non-simple length over a grid of structures.
    Hempel {
        #[arg(long)]
        max_len: usize,
        /// Semicolon-separated trace pairs, e.g. "3,3;3,4;7/2,4".
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the reversal filter and simple-class determination up to a bound.
    GrCheck {
        #[arg(long)]
        max_len: usize,
    },
    /// Run the acceptance criteria (optionally a single one by name).
    Acceptance { suite: Option<String> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve_config(
        cli.global.config.as_deref(),
        cli.global.seed,
        cli.global.out_dir.as_deref(),
        cli.global.width,
    ) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Char { word } => harness::run_char(word),
        Command::Equal {
            word1,
            word2,
            probabilistic,
            trials,
        } => harness::run_equal(&cfg, word1, word2, *probabilistic, *trials),
        Command::Search {
            max_len,
            include_powers,
            annotate,
            out,
        } => harness::run_search(&cfg, *max_len, *include_powers, *annotate, out),
        Command::Selfint { word, x, y } => {
            harness::run_selfint(word, x.as_deref(), y.as_deref())
        }
        Command::Lengths { x, y, words, out } => {
            harness::run_lengths(&cfg, x, y, words, out.as_deref())
        }
        Command::Pinch { pinch_config, out } => {
            harness::run_pinch(&cfg, pinch_config.as_deref(), out)
        }
        Command::Hempel { max_len, grid, out } => {
            harness::run_hempel(&cfg, *max_len, grid, out.as_deref())
        }
        Command::GrCheck { max_len } => harness::run_gr_check(*max_len),
        Command::Acceptance { suite } => harness::run_acceptance(suite.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
