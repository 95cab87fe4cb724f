use std::collections::BTreeMap;
use std::path::PathBuf;

use emorec::cf::{ibcf_recommend, ubcf_recommend, Orientation, RatingMatrix};
use emorec::content::{ear_recommend, gar_recommend, mar_recommend, EmotionEncoding, IvecConfig};
use emorec::evaluation::{hit_check, overlap_report, HitCheck};
use emorec::ingest::tmdb::{fetch_missing_overviews, TmdbClient, TmdbConfig, TmdbError};
use emorec::ingest::{self, build_test_split, merge_catalog, Catalog, RatingRecord};
use emorec::lists::{read_lists, render_list_csv, NamedList};
use emorec::profile::{compute_profile, load_vector_csv, rerank_top5};
use emorec::similarity::ScoredItem;
use emorec::{Error, MovieId, UserId};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::render;
use crate::{
    Algorithm, Cli, Command, EncodingArg, EncodingOpts, EvaluateArgs, IngestArgs, ProfileArgs, RecommendArgs,
    RerankArgs, UserOpts,
};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const USAGE: u8 = 1;
    pub const MISSING_FILE: u8 = 2;
    pub const INVALID_DATA: u8 = 3;
    pub const PRECONDITION: u8 = 4;

    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: Self::USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => CliError::MISSING_FILE,
            Error::Parse { .. }
            | Error::Validation { .. }
            | Error::Schema(_)
            | Error::Json(_)
            | Error::Dimension { .. } => CliError::INVALID_DATA,
            Error::Config(_) => CliError::USAGE,
            _ => CliError::PRECONDITION,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<TmdbError> for CliError {
    fn from(e: TmdbError) -> Self {
        let code = match e {
            TmdbError::MissingApiKey => CliError::USAGE,
            _ => CliError::PRECONDITION,
        };
        CliError {
            code,
            message: format!("tmdb: {e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Ingest(args) => ingest_cmd(cli, args),
        Command::Recommend(args) => recommend_cmd(cli, args),
        Command::Rerank(args) => rerank_cmd(cli, args),
        Command::Profile(args) => profile_cmd(cli, args),
        Command::Evaluate(args) => evaluate_cmd(cli, args),
    }
}

fn catalog_path(cli: &Cli) -> PathBuf {
    cli.catalog.clone().unwrap_or_else(|| cli.data_dir.join("catalog.json"))
}

fn ratings_path(cli: &Cli) -> PathBuf {
    cli.ratings.clone().unwrap_or_else(|| cli.data_dir.join("ratings.csv"))
}

fn load_catalog(cli: &Cli) -> CliResult<Catalog> {
    Ok(Catalog::load(catalog_path(cli))?)
}

fn load_ratings(cli: &Cli) -> CliResult<Vec<RatingRecord>> {
    Ok(ingest::load_ratings(ratings_path(cli))?)
}

fn encoding(opts: &EncodingOpts) -> CliResult<EmotionEncoding> {
    let enc = match opts.encoding {
        EncodingArg::Prob => EmotionEncoding::Prob,
        EncodingArg::Argmax => EmotionEncoding::Argmax,
        EncodingArg::Threshold => EmotionEncoding::Threshold(opts.tau),
    };
    Ok(enc.validate()?)
}

fn ivec_config(opts: &EncodingOpts, genres: bool) -> CliResult<IvecConfig> {
    let enc = encoding(opts)?;
    let config = if genres {
        IvecConfig::with_genres(enc, opts.alpha)
    } else {
        IvecConfig::emotion_only(enc)
    };
    Ok(config.validate()?)
}

/// Picks uniformly among the distinct rating users, in ascending id order.
pub fn random_user(ratings: &[RatingRecord], rng_seed: u64) -> Option<UserId> {
    let mut users: Vec<UserId> = ratings.iter().map(|r| r.user_id).collect();
    users.sort_unstable();
    users.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    users.choose(&mut rng).copied()
}

fn resolve_user(opts: &UserOpts, ratings: &[RatingRecord]) -> CliResult<Option<UserId>> {
    if opts.random_user {
        let user = random_user(ratings, opts.rng_seed).ok_or_else(|| CliError {
            code: CliError::PRECONDITION,
            message: "no users in the ratings file".into(),
        })?;
        log::info!("random user {user} (rng seed {})", opts.rng_seed);
        return Ok(Some(user));
    }
    Ok(opts.user.map(UserId))
}

/// The user's highest-rated movie (latest rating per movie, ties by lowest
/// id) among those `eligible` accepts.
fn top_rated_watch(
    user: UserId,
    ratings: &[RatingRecord],
    eligible: impl Fn(MovieId) -> bool,
) -> CliResult<MovieId> {
    let mut latest: BTreeMap<MovieId, (i64, f64)> = BTreeMap::new();
    for r in ratings.iter().filter(|r| r.user_id == user) {
        let e = latest.entry(r.movie_id).or_insert((r.timestamp, r.rating));
        if r.timestamp >= e.0 {
            *e = (r.timestamp, r.rating);
        }
    }
    if latest.is_empty() {
        return Err(Error::UnknownUser(user).into());
    }
    let mut best: Option<(MovieId, f64)> = None;
    for (id, (_, rating)) in latest {
        if eligible(id) && best.is_none_or(|(_, b)| rating > b) {
            best = Some((id, rating));
        }
    }
    best.map(|(id, _)| id).ok_or_else(|| CliError {
        code: CliError::PRECONDITION,
        message: format!("user {user} has no watched movie usable as a seed"),
    })
}

fn ingest_cmd(cli: &Cli, args: &IngestArgs) -> CliResult<String> {
    let dir = &cli.data_dir;
    let movies = ingest::load_movies(dir.join("movies.csv"))?;
    let ratings = load_ratings(cli)?;
    let links = ingest::load_links(dir.join("links.csv"))?;
    let labels = ingest::load_emotion_labels(dir.join("emotion_labels.csv"))?;
    let mut catalog = merge_catalog(movies, &ratings, links, &labels);
    let overviews_path = dir.join("overviews.csv");
    if overviews_path.exists() {
        catalog = catalog.with_overviews(&ingest::load_overviews(&overviews_path)?);
    }
    let mut fetched = None;
    if args.fetch_overviews {
        let client = TmdbClient::from_env(TmdbConfig::default())?;
        let (c, summary) = fetch_missing_overviews(catalog, &client, args.fetch_limit)?;
        catalog = c;
        fetched = Some(summary);
    }
    let out = args.out.clone().unwrap_or_else(|| catalog_path(cli));
    catalog.save(&out)?;
    log::info!("wrote {}", out.display());
    if cli.json {
        return Ok(render::json(catalog.merge_report())?);
    }
    let mut text = render::merge_report(catalog.merge_report());
    if let Some(s) = fetched {
        text.push_str(&format!(
            "overviews_fetched     {}\noverviews_not_found   {}\noverviews_failed      {}\n",
            s.fetched,
            s.not_found.len(),
            s.failed.len()
        ));
    }
    Ok(text)
}

fn recommend_cmd(cli: &Cli, args: &RecommendArgs) -> CliResult<String> {
    let catalog = load_catalog(cli)?;
    let ratings = load_ratings(cli)?;
    let user = resolve_user(&args.user, &ratings)?;
    let n = args.n as usize;
    let enc = encoding(&args.encoding)?;

    let seed = if args.algo == Algorithm::Ubcf {
        None
    } else if let Some(s) = args.seed {
        Some(MovieId(s))
    } else {
        let user = user.ok_or_else(|| CliError::usage(format!("--algo {} needs --seed or a user", args.algo.name())))?;
        let seed = match args.algo {
            Algorithm::Ear | Algorithm::Mar => top_rated_watch(user, &ratings, |m| catalog.emotion(m).is_some())?,
            _ => top_rated_watch(user, &ratings, |m| catalog.contains(m))?,
        };
        log::info!("seed movie {seed} from user {user}");
        Some(seed)
    };

    let items: Vec<ScoredItem> = match (args.algo, seed) {
        (Algorithm::Ibcf, Some(seed)) => {
            let m = RatingMatrix::build(&ratings, Orientation::ItemsAsRows);
            ibcf_recommend(&m, seed, n)?
        }
        (Algorithm::Gar, Some(seed)) => gar_recommend(&catalog, seed, n)?,
        (Algorithm::Ear, Some(seed)) => ear_recommend(&catalog, seed, n, enc)?,
        (Algorithm::Mar, Some(seed)) => mar_recommend(&catalog, seed, n, enc, args.encoding.alpha)?,
        (Algorithm::Ubcf, _) => {
            let user = user.ok_or_else(|| CliError::usage("--algo ubcf needs --user or --random-user"))?;
            let m = RatingMatrix::build(&ratings, Orientation::UsersAsRows);
            ubcf_recommend(&m, user, n, args.k_neighbors as usize)?
        }
        (_, None) => unreachable!("item-based algorithms always resolve a seed"),
    };

    if let Some(out) = &args.out {
        write_file(out, &render_list_csv(&items, &catalog)?)?;
    }
    let header = render::RunHeader {
        algorithm: args.algo.name(),
        seed,
        user,
    };
    if cli.json {
        return Ok(render::json(&render::ranked_json(&header, &items, &catalog))?);
    }
    Ok(render::ranked_table(&header, &items, &catalog, "score"))
}

fn write_file(path: &std::path::Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError {
        code: CliError::MISSING_FILE,
        message: format!("{}: {e}", path.display()),
    })
}

fn pick_list(lists: Vec<NamedList>, column: Option<&str>, path: &std::path::Path) -> CliResult<NamedList> {
    match column {
        Some(c) => lists
            .into_iter()
            .find(|l| l.name == c)
            .ok_or_else(|| CliError::usage(format!("{}: no column named {c:?}", path.display()))),
        None if lists.len() == 1 => Ok(lists.into_iter().next().expect("one list")),
        None => Err(CliError::usage(format!(
            "{} holds {} lists; choose one with --column",
            path.display(),
            lists.len()
        ))),
    }
}

fn rerank_cmd(cli: &Cli, args: &RerankArgs) -> CliResult<String> {
    let list = pick_list(read_lists(&args.list)?, args.column.as_deref(), &args.list)?;
    let catalog = load_catalog(cli)?;
    let config = ivec_config(&args.encoding, args.genres)?;
    let (wvec, user) = match &args.wvec {
        Some(path) => (load_vector_csv(path)?, None),
        None => {
            let ratings = load_ratings(cli)?;
            let user = resolve_user(&args.user, &ratings)?
                .ok_or_else(|| CliError::usage("rerank needs --user, --random-user or --wvec"))?;
            (compute_profile(user, &ratings, &catalog, config)?.wvec, Some(user))
        }
    };
    let top = rerank_top5(&wvec, &list.items, &catalog, config)?;
    if let Some(out) = &args.out {
        write_file(out, &render_list_csv(&top, &catalog)?)?;
    }
    let header = render::RunHeader {
        algorithm: &list.name,
        seed: None,
        user,
    };
    if cli.json {
        return Ok(render::json(&render::ranked_json(&header, &top, &catalog))?);
    }
    Ok(render::ranked_table(&header, &top, &catalog, "similarity"))
}

fn profile_cmd(cli: &Cli, args: &ProfileArgs) -> CliResult<String> {
    let catalog = load_catalog(cli)?;
    let ratings = load_ratings(cli)?;
    let user = resolve_user(&args.user, &ratings)?
        .ok_or_else(|| CliError::usage("profile needs --user or --random-user"))?;
    let profile = compute_profile(user, &ratings, &catalog, ivec_config(&args.encoding, args.genres)?)?;
    if cli.json {
        return Ok(render::json(&profile)?);
    }
    Ok(render::profile_table(&profile))
}

fn evaluate_cmd(cli: &Cli, args: &EvaluateArgs) -> CliResult<String> {
    let mut lists: BTreeMap<String, Vec<MovieId>> = BTreeMap::new();
    for path in &args.lists {
        for list in read_lists(path)? {
            let ids = list.ids();
            if lists.insert(list.name.clone(), ids).is_some() {
                return Err(CliError::usage(format!("list name {:?} appears twice", list.name)));
            }
        }
    }
    if lists.len() < 2 {
        return Err(CliError::usage(format!("evaluate needs at least 2 lists, got {}", lists.len())));
    }
    let mut report = overlap_report(&lists)?;
    if let Some(expected) = args.expect_duplicates {
        report = report.with_expected_duplicates(expected);
    }

    let mut hits: BTreeMap<String, HitCheck> = BTreeMap::new();
    if let (Some(user), Some(extra)) = (args.hit_user, &args.extra_ratings) {
        let train = load_ratings(cli)?;
        let extra = ingest::load_ratings(extra)?;
        let split = build_test_split(&train, &extra, UserId(user))?;
        let unseen = split.unseen_movies();
        for (name, ids) in &lists {
            hits.insert(name.clone(), hit_check(ids, &unseen));
        }
    }

    if cli.json {
        return Ok(render::json(&render::EvaluateJson {
            report: &report,
            hit_checks: (!hits.is_empty()).then_some(&hits),
        })?);
    }
    let mut text = report.render_table();
    if !hits.is_empty() {
        text.push_str(&render::hits_table(&hits));
    }
    Ok(text)
}
