//! `emorec` command-line runner.
//!
//! Exit codes: 0 success, 1 usage, 2 missing file, 3 invalid input data,
//! 4 algorithm precondition not met.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod render;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "emorec", version, about = "Emotion-aware movie recommendation experiments")]
pub struct Cli {
    /// Directory holding movies.csv, ratings.csv, links.csv and emotion_labels.csv
    #[arg(long, global = true, default_value = ".")]
    pub data_dir: PathBuf,

    /// Catalog file [default: <data-dir>/catalog.json]
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,

    /// Training ratings [default: <data-dir>/ratings.csv]
    #[arg(long, global = true)]
    pub ratings: Option<PathBuf>,

    /// Emit JSON instead of a table
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Merge the CSV inputs into a catalog and print the merge report
    Ingest(IngestArgs),
    /// Produce a top-N list with one of the five recommenders
    Recommend(RecommendArgs),
    /// Rerank a list by similarity to a user's profile vector, keeping 5
    Rerank(RerankArgs),
    /// Print a user's emotion profile (uvec and wvec)
    Profile(ProfileArgs),
    /// Compare recommendation lists and optionally check hits against later ratings
    Evaluate(EvaluateArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Where to write the catalog [default: <data-dir>/catalog.json]
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Fill missing overviews from TMDb (needs TMDB_API_KEY)
    #[arg(long)]
    pub fetch_overviews: bool,

    /// Maximum TMDb requests per run
    #[arg(long, default_value_t = 50)]
    pub fetch_limit: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Ibcf,
    Ubcf,
    Gar,
    Ear,
    Mar,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ibcf => "ibcf",
            Algorithm::Ubcf => "ubcf",
            Algorithm::Gar => "gar",
            Algorithm::Ear => "ear",
            Algorithm::Mar => "mar",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingArg {
    Prob,
    Argmax,
    Threshold,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct EncodingOpts {
    /// Emotion encoding inside item vectors
    #[arg(long, value_enum, default_value_t = EncodingArg::Prob)]
    pub encoding: EncodingArg,

    /// Threshold for `--encoding threshold`
    #[arg(long, default_value_t = 0.2)]
    pub tau: f64,

    /// Weight of the genre block in item vectors
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct UserOpts {
    /// Active user id
    #[arg(long, conflicts_with = "random_user")]
    pub user: Option<u32>,

    /// Pick the active user at random (reproducible via --rng-seed)
    #[arg(long)]
    pub random_user: bool,

    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

#[derive(Args, Debug)]
pub struct RecommendArgs {
    #[arg(long, value_enum)]
    pub algo: Algorithm,

    /// Seed movie for item-based algorithms [default: the user's top-rated watch]
    #[arg(long)]
    pub seed: Option<u32>,

    #[command(flatten)]
    pub user: UserOpts,

    /// List length
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    /// Neighbours consulted by ubcf
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_neighbors: u64,

    #[command(flatten)]
    pub encoding: EncodingOpts,

    /// Also write the list as CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RerankArgs {
    /// List file (a recommend --out file, or a multi-column table)
    #[arg(long)]
    pub list: PathBuf,

    /// Column to use when the list file holds several lists
    #[arg(long)]
    pub column: Option<String>,

    #[command(flatten)]
    pub user: UserOpts,

    /// Profile vector CSV (header row, one values row) instead of a user
    #[arg(long, conflicts_with_all = ["user", "random_user"])]
    pub wvec: Option<PathBuf>,

    /// Append the genre block to item vectors
    #[arg(long)]
    pub genres: bool,

    #[command(flatten)]
    pub encoding: EncodingOpts,

    /// Also write the reranked list as CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub user: UserOpts,

    /// Append the genre block to wvec
    #[arg(long)]
    pub genres: bool,

    #[command(flatten)]
    pub encoding: EncodingOpts,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// List files; repeat the flag, multi-column files contribute every column
    #[arg(long = "list", required = true)]
    pub lists: Vec<PathBuf>,

    /// Externally reported duplicate count to compare against
    #[arg(long)]
    pub expect_duplicates: Option<usize>,

    /// User whose later ratings are checked for hits
    #[arg(long, requires = "extra_ratings")]
    pub hit_user: Option<u32>,

    /// Ratings recorded after the training set
    #[arg(long, requires = "hit_user")]
    pub extra_ratings: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CliError::USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
