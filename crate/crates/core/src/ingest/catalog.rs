use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmotionLabelRecord, LinksRecord, MovieRecord, RatingRecord};
use crate::emotion::{EmotionLabel, EmotionVector};
use crate::{Error, MovieId, Result};

pub const CATALOG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionProfile {
    /// Mood as recorded in the source data.
    pub mood: EmotionLabel,
    pub vector: EmotionVector,
}

impl EmotionProfile {
    /// Profile whose mood is the vector's dominant label.
    pub fn from_vector(vector: EmotionVector) -> Self {
        EmotionProfile {
            mood: vector.dominant(),
            vector,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub raw_count: usize,
    pub merged_count: usize,
    /// `(raw_count - merged_count) / raw_count`; zero for an empty catalog.
    pub loss_fraction: f64,
    pub missing_tmdb_link: usize,
    pub missing_emotion_label: usize,
    pub rating_count: usize,
    /// Ratings that reference a movie id absent from the movie table.
    pub orphan_ratings: usize,
}

impl MergeReport {
    fn new(raw_count: usize, merged_count: usize) -> Self {
        let loss_fraction = if raw_count == 0 {
            0.0
        } else {
            (raw_count - merged_count) as f64 / raw_count as f64
        };
        MergeReport {
            raw_count,
            merged_count,
            loss_fraction,
            missing_tmdb_link: 0,
            missing_emotion_label: 0,
            rating_count: 0,
            orphan_ratings: 0,
        }
    }
}

/// Merged movie store. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CatalogDocument")]
pub struct Catalog {
    schema_version: u32,
    movies: BTreeMap<MovieId, MovieRecord>,
    emotion: BTreeMap<MovieId, EmotionProfile>,
    overviews: BTreeMap<MovieId, String>,
    links: BTreeMap<MovieId, LinksRecord>,
    merge_report: MergeReport,
}

#[derive(Deserialize)]
struct CatalogDocument {
    schema_version: u32,
    movies: BTreeMap<MovieId, MovieRecord>,
    emotion: BTreeMap<MovieId, EmotionProfile>,
    #[serde(default)]
    overviews: BTreeMap<MovieId, String>,
    #[serde(default)]
    links: BTreeMap<MovieId, LinksRecord>,
    merge_report: MergeReport,
}

impl TryFrom<CatalogDocument> for Catalog {
    type Error = Error;

    fn try_from(doc: CatalogDocument) -> Result<Self> {
        if doc.schema_version != CATALOG_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "catalog schema version {} is not supported (expected {})",
                doc.schema_version, CATALOG_SCHEMA_VERSION
            )));
        }
        for (key, movie) in &doc.movies {
            if *key != movie.movie_id {
                return Err(Error::Schema(format!(
                    "catalog key {key} holds movie {}",
                    movie.movie_id
                )));
            }
        }
        if let Some(id) = doc.emotion.keys().find(|id| !doc.movies.contains_key(id)) {
            return Err(Error::Schema(format!(
                "emotion profile for movie {id} which is not in the catalog"
            )));
        }
        let report = &doc.merge_report;
        if report.merged_count > report.raw_count || !(0.0..=1.0).contains(&report.loss_fraction) {
            return Err(Error::Schema("inconsistent merge report".into()));
        }
        Ok(Catalog {
            schema_version: doc.schema_version,
            movies: doc.movies,
            emotion: doc.emotion,
            overviews: doc.overviews,
            links: doc.links,
            merge_report: doc.merge_report,
        })
    }
}

impl Catalog {
    pub fn builder() -> CatalogBuilder {
        CatalogBuilder::default()
    }

    pub fn movies(&self) -> &BTreeMap<MovieId, MovieRecord> {
        &self.movies
    }

    pub fn movie(&self, id: MovieId) -> Option<&MovieRecord> {
        self.movies.get(&id)
    }

    pub fn contains(&self, id: MovieId) -> bool {
        self.movies.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.movies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.movies.is_empty()
    }

    pub fn emotion_profiles(&self) -> &BTreeMap<MovieId, EmotionProfile> {
        &self.emotion
    }

    pub fn emotion(&self, id: MovieId) -> Option<&EmotionVector> {
        self.emotion.get(&id).map(|p| &p.vector)
    }

    pub fn overview(&self, id: MovieId) -> Option<&str> {
        self.overviews.get(&id).map(String::as_str)
    }

    pub fn overviews(&self) -> &BTreeMap<MovieId, String> {
        &self.overviews
    }

    pub fn links(&self) -> &BTreeMap<MovieId, LinksRecord> {
        &self.links
    }

    pub fn merge_report(&self) -> &MergeReport {
        &self.merge_report
    }

    pub fn title(&self, id: MovieId) -> &str {
        self.movies.get(&id).map_or("", |m| m.title.as_str())
    }

    /// Sorted set of every genre used in the catalog.
    pub fn genre_vocabulary(&self) -> Vec<String> {
        self.movies
            .values()
            .flat_map(|m| m.genres.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Attaches overviews keyed by TMDb id through the links table.
    pub fn with_overviews(mut self, by_tmdb: &BTreeMap<u32, String>) -> Self {
        for (movie_id, link) in &self.links {
            if let Some(text) = link.tmdb_id.and_then(|t| by_tmdb.get(&t)) {
                self.overviews.insert(*movie_id, text.clone());
            }
        }
        self
    }

    pub fn with_overview(mut self, movie_id: MovieId, text: impl Into<String>) -> Self {
        if self.movies.contains_key(&movie_id) {
            self.overviews.insert(movie_id, text.into());
        }
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Direct construction of a catalog, mainly for tests and synthetic data.
#[derive(Debug, Default)]
pub struct CatalogBuilder {
    movies: BTreeMap<MovieId, MovieRecord>,
    emotion: BTreeMap<MovieId, EmotionProfile>,
    overviews: BTreeMap<MovieId, String>,
    links: BTreeMap<MovieId, LinksRecord>,
}

impl CatalogBuilder {
    pub fn movie(mut self, movie: MovieRecord) -> Self {
        self.movies.insert(movie.movie_id, movie);
        self
    }

    pub fn emotion(mut self, movie_id: impl Into<MovieId>, vector: EmotionVector) -> Self {
        self.emotion
            .insert(movie_id.into(), EmotionProfile::from_vector(vector));
        self
    }

    pub fn overview(mut self, movie_id: impl Into<MovieId>, text: impl Into<String>) -> Self {
        self.overviews.insert(movie_id.into(), text.into());
        self
    }

    pub fn link(mut self, link: LinksRecord) -> Self {
        self.links.insert(link.movie_id, link);
        self
    }

    pub fn build(self) -> Result<Catalog> {
        for id in self.emotion.keys().chain(self.overviews.keys()) {
            if !self.movies.contains_key(id) {
                return Err(Error::UnknownMovie(*id));
            }
        }
        let merge_report = MergeReport::new(self.movies.len(), self.emotion.len());
        Ok(Catalog {
            schema_version: CATALOG_SCHEMA_VERSION,
            movies: self.movies,
            emotion: self.emotion,
            overviews: self.overviews,
            links: self.links,
            merge_report,
        })
    }
}

/// Joins movies to emotion labels through `movieId → tmdbId → tid`.
///
/// Movies that do not resolve stay in the catalog without an emotion profile
/// and are counted as lost in the report.
pub fn merge_catalog(
    movies: Vec<MovieRecord>,
    ratings: &[RatingRecord],
    links: Vec<LinksRecord>,
    labels: &BTreeMap<MovieId, EmotionLabelRecord>,
) -> Catalog {
    let mut movie_map = BTreeMap::new();
    for m in movies {
        movie_map.entry(m.movie_id).or_insert(m);
    }
    let links: BTreeMap<MovieId, LinksRecord> = links
        .into_iter()
        .filter(|l| movie_map.contains_key(&l.movie_id))
        .map(|l| (l.movie_id, l))
        .collect();
    let by_tmdb: HashMap<u32, &EmotionLabelRecord> = labels
        .values()
        .filter_map(|r| r.tmdb_id.map(|t| (t, r)))
        .collect();

    let mut emotion = BTreeMap::new();
    let mut missing_tmdb_link = 0;
    let mut missing_emotion_label = 0;
    for id in movie_map.keys() {
        match links.get(id).and_then(|l| l.tmdb_id) {
            None => missing_tmdb_link += 1,
            Some(tmdb) => match by_tmdb.get(&tmdb) {
                None => missing_emotion_label += 1,
                Some(r) => {
                    emotion.insert(
                        *id,
                        EmotionProfile {
                            mood: r.mood,
                            vector: r.vector,
                        },
                    );
                }
            },
        }
    }

    let mut merge_report = MergeReport::new(movie_map.len(), emotion.len());
    merge_report.missing_tmdb_link = missing_tmdb_link;
    merge_report.missing_emotion_label = missing_emotion_label;
    merge_report.rating_count = ratings.len();
    merge_report.orphan_ratings = ratings
        .iter()
        .filter(|r| !movie_map.contains_key(&r.movie_id))
        .count();
    log::info!(
        "merged {} of {} movies ({:.4} loss)",
        merge_report.merged_count,
        merge_report.raw_count,
        merge_report.loss_fraction
    );

    Catalog {
        schema_version: CATALOG_SCHEMA_VERSION,
        movies: movie_map,
        emotion,
        overviews: BTreeMap::new(),
        links,
        merge_report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emotion::EmotionLabel;

    fn label(tmdb: u32, mid: u32) -> EmotionLabelRecord {
        EmotionLabelRecord {
            tmdb_id: Some(tmdb),
            movie_id: MovieId(mid),
            imdb_id: None,
            mood: EmotionLabel::Joy,
            vector: EmotionVector::pure(EmotionLabel::Joy),
        }
    }

    fn link(mid: u32, tmdb: Option<u32>) -> LinksRecord {
        LinksRecord {
            movie_id: MovieId(mid),
            imdb_id: None,
            tmdb_id: tmdb,
        }
    }

    #[test]
    fn full_coverage_has_no_loss() {
        let movies = (1..=4).map(|i| MovieRecord::new(i, format!("M{i}"), ["Drama"])).collect();
        let links = (1..=4).map(|i| link(i, Some(100 + i))).collect();
        let labels = (1..=4).map(|i| (MovieId(i), label(100 + i, i))).collect();
        let cat = merge_catalog(movies, &[], links, &labels);
        assert_eq!(cat.merge_report().loss_fraction, 0.0);
        assert_eq!(cat.emotion_profiles().len(), 4);
    }

    #[test]
    fn missing_tmdb_ids_are_counted_as_loss() {
        // 10 movies; 3 have no tmdb link; every linked movie has a label.
        let movies = (1..=10).map(|i| MovieRecord::new(i, format!("M{i}"), ["Drama"])).collect();
        let links = (1..=10)
            .map(|i| link(i, if i % 3 == 0 { None } else { Some(500 + i) }))
            .collect();
        let labels = (1..=10).map(|i| (MovieId(i), label(500 + i, i))).collect();
        let ratings = [RatingRecord::new(1, 1, 4.0, 0), RatingRecord::new(1, 99, 3.0, 0)];
        let cat = merge_catalog(movies, &ratings, links, &labels);
        let r = cat.merge_report();
        assert_eq!((r.raw_count, r.merged_count), (10, 7));
        assert!((r.loss_fraction - 0.3).abs() < 1e-15);
        assert_eq!(r.missing_tmdb_link, 3);
        assert_eq!(r.orphan_ratings, 1);
        assert_eq!(cat.emotion_profiles().len(), 7);
        assert_eq!(cat.len(), 10);
        assert!(cat.emotion(MovieId(3)).is_none());
    }

    #[test]
    fn join_goes_through_tmdb_not_mid() {
        let movies = vec![MovieRecord::new(4470, "Ariel (1988)", ["Comedy", "Drama"])];
        let links = vec![link(4470, Some(2))];
        // label row's own mid disagrees; the tmdb link decides
        let labels = [(MovieId(1), label(2, 1))].into_iter().collect();
        let cat = merge_catalog(movies, &[], links, &labels);
        assert!(cat.emotion(MovieId(4470)).is_some());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let cat = Catalog::builder()
            .movie(MovieRecord::new(1, "A, the (1999)", ["Drama"]))
            .movie(MovieRecord::new(2, "B", Vec::<String>::new()))
            .emotion(1, EmotionVector::uniform())
            .overview(1, "An overview.")
            .build()
            .unwrap();
        let json = cat.to_json().unwrap();
        let back: Catalog = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cat);

        let broken = json.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(serde_json::from_str::<Catalog>(&broken).is_err());
    }

    #[test]
    fn builder_rejects_profiles_for_unknown_movies() {
        let res = Catalog::builder().emotion(7, EmotionVector::uniform()).build();
        assert!(matches!(res, Err(Error::UnknownMovie(MovieId(7)))));
    }
}
