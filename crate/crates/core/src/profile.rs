//! User emotion profiles and profile-based reranking.
//!
//! A user's `uvec` is the mean emotion vector of the movies they rated;
//! `wvec` is the mean of those movies' item vectors under an [`IvecConfig`].
//! Movies without an emotion profile are skipped when averaging.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::content::{IvecConfig, ItemVectorizer};
use crate::emotion::{mean_vectors, EmotionVector};
use crate::ingest::{Catalog, RatingRecord};
use crate::similarity::{cosine, top_k, Scored, ScoredItem};
use crate::{Error, MovieId, Result, UserId};

pub const RERANK_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: UserId,
    pub uvec: EmotionVector,
    pub wvec: Vec<f64>,
    pub watched_count: usize,
    pub profiled_count: usize,
}

/// Distinct movies the user has rated, ascending.
pub fn watched_movies(user: UserId, ratings: &[RatingRecord]) -> BTreeSet<MovieId> {
    ratings
        .iter()
        .filter(|r| r.user_id == user)
        .map(|r| r.movie_id)
        .collect()
}

fn profiled_watches(user: UserId, ratings: &[RatingRecord], catalog: &Catalog) -> Result<(usize, Vec<MovieId>)> {
    let watched = watched_movies(user, ratings);
    if watched.is_empty() {
        return Err(Error::UnknownUser(user));
    }
    let profiled: Vec<MovieId> = watched
        .iter()
        .copied()
        .filter(|m| catalog.emotion(*m).is_some())
        .collect();
    if profiled.is_empty() {
        return Err(Error::Domain(format!(
            "none of the {} movies user {user} watched has an emotion profile",
            watched.len()
        )));
    }
    Ok((watched.len(), profiled))
}

pub fn compute_uvec(user: UserId, ratings: &[RatingRecord], catalog: &Catalog) -> Result<EmotionVector> {
    let (_, profiled) = profiled_watches(user, ratings, catalog)?;
    let vectors: Vec<EmotionVector> = profiled
        .iter()
        .filter_map(|m| catalog.emotion(*m).copied())
        .collect();
    mean_vectors(&vectors)
}

pub fn compute_wvec(
    user: UserId,
    ratings: &[RatingRecord],
    catalog: &Catalog,
    config: IvecConfig,
) -> Result<Vec<f64>> {
    let (_, profiled) = profiled_watches(user, ratings, catalog)?;
    let vectorizer = ItemVectorizer::new(catalog, config)?;
    mean_ivecs(&vectorizer, &profiled)
}

fn mean_ivecs(vectorizer: &ItemVectorizer, movies: &[MovieId]) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; vectorizer.dim()];
    for m in movies {
        for (a, x) in acc.iter_mut().zip(vectorizer.ivec(*m)?.to_features()) {
            *a += x;
        }
    }
    let n = movies.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

pub fn compute_profile(
    user: UserId,
    ratings: &[RatingRecord],
    catalog: &Catalog,
    config: IvecConfig,
) -> Result<UserProfile> {
    let (watched_count, profiled) = profiled_watches(user, ratings, catalog)?;
    let vectorizer = ItemVectorizer::new(catalog, config)?;
    let vectors: Vec<EmotionVector> = profiled
        .iter()
        .filter_map(|m| catalog.emotion(*m).copied())
        .collect();
    Ok(UserProfile {
        user_id: user,
        uvec: mean_vectors(&vectors)?,
        wvec: mean_ivecs(&vectorizer, &profiled)?,
        watched_count,
        profiled_count: profiled.len(),
    })
}

/// Rescores `list` by `cosine(wvec, ivec)` and keeps the best `k`.
///
/// Items without an item vector score 0 instead of being dropped.
pub fn rerank(
    wvec: &[f64],
    list: &[ScoredItem],
    catalog: &Catalog,
    config: IvecConfig,
    k: usize,
) -> Result<Vec<ScoredItem>> {
    let vectorizer = ItemVectorizer::new(catalog, config)?;
    if wvec.len() != vectorizer.dim() {
        return Err(Error::Dimension {
            expected: vectorizer.dim(),
            actual: wvec.len(),
        });
    }
    let mut scored = Vec::with_capacity(list.len());
    for item in list {
        let score = match vectorizer.ivec(item.id) {
            Ok(v) => cosine(wvec, &v.to_features())?,
            Err(Error::NotEmotionAware(_) | Error::UnknownMovie(_)) => 0.0,
            Err(e) => return Err(e),
        };
        scored.push(Scored::new(item.id, score));
    }
    Ok(top_k(scored, k))
}

pub fn rerank_top5(
    wvec: &[f64],
    top20: &[ScoredItem],
    catalog: &Catalog,
    config: IvecConfig,
) -> Result<Vec<ScoredItem>> {
    rerank(wvec, top20, catalog, config, RERANK_SIZE)
}

/// Reads a one-row CSV of vector components (header row, then values).
pub fn load_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = reader.records();
    let row = match rows.next() {
        Some(Ok(row)) => row,
        Some(Err(e)) => return Err(Error::parse(path, crate::emotion::csv_line(&e), e.to_string())),
        None => return Err(Error::parse(path, 2, "no values row")),
    };
    if rows.next().is_some() {
        return Err(Error::parse(path, 3, "expected a single values row"));
    }
    row.iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(path, 2, format!("invalid value {f:?}")))
        })
        .collect()
}
