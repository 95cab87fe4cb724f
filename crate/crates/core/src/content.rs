//! Item vectors and the content-based recommenders.
//!
//! * GAR ranks by cosine of binary genre vectors.
//! * EAR ranks by cosine of emotion blocks.
//! * MAR ranks by cosine of the emotion block concatenated with an
//!   `alpha`-scaled genre block.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::emotion::{to_onehot, EmotionVector, OneHotMode, EMOTION_COUNT};
use crate::ingest::{Catalog, MovieRecord};
use crate::similarity::{cosine, top_k, Scored, ScoredItem};
use crate::{Error, MovieId, Result};

/// Sorted genre names of a catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenreVocabulary(Vec<String>);

impl GenreVocabulary {
    pub fn new<I, S>(genres: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v: Vec<String> = genres.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        GenreVocabulary(v)
    }

    pub fn from_catalog(catalog: &Catalog) -> Self {
        GenreVocabulary(catalog.genre_vocabulary())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn genres(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, genre: &str) -> Option<usize> {
        self.0.binary_search_by(|g| g.as_str().cmp(genre)).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenreVector {
    pub bits: Vec<bool>,
}

impl GenreVector {
    pub fn to_features(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}

pub fn build_genre_vector(movie: &MovieRecord, vocab: &GenreVocabulary) -> Result<GenreVector> {
    let mut bits = vec![false; vocab.len()];
    for g in &movie.genres {
        let i = vocab.index_of(g).ok_or_else(|| {
            Error::Schema(format!(
                "genre {g:?} of movie {} is not in the vocabulary",
                movie.movie_id
            ))
        })?;
        bits[i] = true;
    }
    Ok(GenreVector { bits })
}

/// How a movie's emotion distribution enters its item vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase", tag = "kind", content = "tau")]
pub enum EmotionEncoding {
    /// The probabilities themselves.
    #[default]
    Prob,
    /// One-hot on the dominant mood.
    Argmax,
    /// Multi-hot on every mood with probability ≥ tau.
    Threshold(f64),
}

impl EmotionEncoding {
    pub fn validate(self) -> Result<Self> {
        if let EmotionEncoding::Threshold(tau) = self {
            OneHotMode::Threshold(tau).validate()?;
        }
        Ok(self)
    }

    pub fn encode(self, v: &EmotionVector) -> Result<[f64; EMOTION_COUNT]> {
        Ok(match self {
            EmotionEncoding::Prob => *v.values(),
            EmotionEncoding::Argmax => to_onehot(v, OneHotMode::Argmax)?.to_features(),
            EmotionEncoding::Threshold(tau) => to_onehot(v, OneHotMode::Threshold(tau))?.to_features(),
        })
    }
}

impl fmt::Display for EmotionEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmotionEncoding::Prob => f.write_str("prob"),
            EmotionEncoding::Argmax => f.write_str("argmax"),
            EmotionEncoding::Threshold(tau) => write!(f, "threshold({tau})"),
        }
    }
}

/// Parses `prob`, `argmax`, `threshold` (tau 0.2) or `threshold:<tau>`.
impl FromStr for EmotionEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let enc = match s {
            "prob" | "probability" | "continuous" => EmotionEncoding::Prob,
            "argmax" => EmotionEncoding::Argmax,
            "threshold" => EmotionEncoding::Threshold(0.2),
            other => match other.strip_prefix("threshold:").map(str::parse::<f64>) {
                Some(Ok(tau)) => EmotionEncoding::Threshold(tau),
                _ => return Err(Error::Config(format!("unknown encoding {s:?}"))),
            },
        };
        enc.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvecConfig {
    pub encoding: EmotionEncoding,
    pub include_genres: bool,
    /// Scale of the genre block relative to the emotion block.
    pub alpha: f64,
}

impl Default for IvecConfig {
    fn default() -> Self {
        IvecConfig {
            encoding: EmotionEncoding::Prob,
            include_genres: false,
            alpha: 1.0,
        }
    }
}

impl IvecConfig {
    pub fn emotion_only(encoding: EmotionEncoding) -> Self {
        IvecConfig {
            encoding,
            ..Default::default()
        }
    }

    pub fn with_genres(encoding: EmotionEncoding, alpha: f64) -> Self {
        IvecConfig {
            encoding,
            include_genres: true,
            alpha,
        }
    }

    pub fn validate(self) -> Result<Self> {
        self.encoding.validate()?;
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(self)
    }
}

/// A movie's feature vector: emotion block, then the optional genre block.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemVector {
    pub movie_id: MovieId,
    pub emotion: [f64; EMOTION_COUNT],
    /// Genre bits already multiplied by alpha.
    pub genres: Option<Vec<f64>>,
}

impl ItemVector {
    pub fn dim(&self) -> usize {
        EMOTION_COUNT + self.genres.as_ref().map_or(0, Vec::len)
    }

    pub fn to_features(&self) -> Vec<f64> {
        let mut v = self.emotion.to_vec();
        if let Some(g) = &self.genres {
            v.extend_from_slice(g);
        }
        v
    }
}

/// Builds item vectors for one catalog under one configuration.
pub struct ItemVectorizer<'a> {
    catalog: &'a Catalog,
    vocab: GenreVocabulary,
    config: IvecConfig,
}

impl<'a> ItemVectorizer<'a> {
    pub fn new(catalog: &'a Catalog, config: IvecConfig) -> Result<Self> {
        Ok(ItemVectorizer {
            catalog,
            vocab: GenreVocabulary::from_catalog(catalog),
            config: config.validate()?,
        })
    }

    pub fn vocabulary(&self) -> &GenreVocabulary {
        &self.vocab
    }

    pub fn config(&self) -> IvecConfig {
        self.config
    }

    pub fn dim(&self) -> usize {
        EMOTION_COUNT + if self.config.include_genres { self.vocab.len() } else { 0 }
    }

    pub fn ivec(&self, movie_id: MovieId) -> Result<ItemVector> {
        let movie = self
            .catalog
            .movie(movie_id)
            .ok_or(Error::UnknownMovie(movie_id))?;
        let emotion = self
            .catalog
            .emotion(movie_id)
            .ok_or(Error::NotEmotionAware(movie_id))?;
        let genres = if self.config.include_genres {
            let gv = build_genre_vector(movie, &self.vocab)?;
            Some(gv.to_features().into_iter().map(|b| b * self.config.alpha).collect())
        } else {
            None
        };
        Ok(ItemVector {
            movie_id,
            emotion: self.config.encoding.encode(emotion)?,
            genres,
        })
    }
}

pub fn build_ivec(movie_id: MovieId, catalog: &Catalog, config: IvecConfig) -> Result<ItemVector> {
    ItemVectorizer::new(catalog, config)?.ivec(movie_id)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    Ok(())
}

/// Genre-aware recommender over every other movie in the catalog.
pub fn gar_recommend(catalog: &Catalog, seed: MovieId, n: usize) -> Result<Vec<ScoredItem>> {
    check_n(n)?;
    let vocab = GenreVocabulary::from_catalog(catalog);
    let seed_movie = catalog.movie(seed).ok_or(Error::UnknownMovie(seed))?;
    let seed_vec = build_genre_vector(seed_movie, &vocab)?.to_features();
    let mut candidates = Vec::with_capacity(catalog.len());
    for (id, movie) in catalog.movies() {
        if *id == seed {
            continue;
        }
        let v = build_genre_vector(movie, &vocab)?.to_features();
        candidates.push(Scored::new(*id, cosine(&seed_vec, &v)?));
    }
    Ok(top_k(candidates, n))
}

fn rank_emotion_aware(vectorizer: &ItemVectorizer, seed: MovieId, n: usize) -> Result<Vec<ScoredItem>> {
    let seed_vec = vectorizer.ivec(seed)?.to_features();
    let mut candidates = Vec::new();
    for id in vectorizer.catalog.emotion_profiles().keys() {
        if *id == seed {
            continue;
        }
        let v = vectorizer.ivec(*id)?.to_features();
        candidates.push(Scored::new(*id, cosine(&seed_vec, &v)?));
    }
    Ok(top_k(candidates, n))
}

/// Emotion-aware recommender over the emotion-profiled movies.
pub fn ear_recommend(
    catalog: &Catalog,
    seed: MovieId,
    n: usize,
    encoding: EmotionEncoding,
) -> Result<Vec<ScoredItem>> {
    check_n(n)?;
    let vectorizer = ItemVectorizer::new(catalog, IvecConfig::emotion_only(encoding))?;
    rank_emotion_aware(&vectorizer, seed, n)
}

/// Emotion + genre recommender over the emotion-profiled movies.
///
/// The seed needs an emotion profile, and genres unless the catalog has no
/// genres at all.
pub fn mar_recommend(
    catalog: &Catalog,
    seed: MovieId,
    n: usize,
    encoding: EmotionEncoding,
    alpha: f64,
) -> Result<Vec<ScoredItem>> {
    check_n(n)?;
    let vectorizer = ItemVectorizer::new(catalog, IvecConfig::with_genres(encoding, alpha))?;
    let seed_movie = catalog.movie(seed).ok_or(Error::UnknownMovie(seed))?;
    if catalog.emotion(seed).is_none() {
        return Err(Error::NotEmotionAware(seed));
    }
    if seed_movie.genres.is_empty() && !vectorizer.vocabulary().is_empty() {
        return Err(Error::NoGenres(seed));
    }
    rank_emotion_aware(&vectorizer, seed, n)
}
