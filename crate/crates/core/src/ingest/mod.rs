//! MovieLens-format CSV loading, emotion-label merging and the held-out split.
//!
//! File layouts follow the MovieLens distribution:
//!
//! | file            | header                                  |
//! |-----------------|-----------------------------------------|
//! | `movies.csv`    | `movieId,title,genres`                  |
//! | `ratings.csv`   | `userId,movieId,rating,timestamp`       |
//! | `links.csv`     | `movieId,imdbId,tmdbId`                 |
//!
//! Emotion labels use `tid,mid,iid,mood,neutral,joy,sadness,hate,anger,disgust,surprise`
//! (`appy`/`sad` accepted for `joy`/`sadness`), and optional overviews use
//! `tmdbId,overview`.

mod catalog;
mod split;
pub mod tmdb;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emotion::{csv_line, EmotionLabel, EmotionVector, EMOTION_COUNT};
use crate::{Error, MovieId, Result, UserId};

pub use catalog::{merge_catalog, Catalog, CatalogBuilder, EmotionProfile, MergeReport};
pub use split::{build_test_split, TrainTestSplit};

/// MovieLens marker for a movie without genres.
pub const NO_GENRES: &str = "(no genres listed)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovieRecord {
    pub movie_id: MovieId,
    pub title: String,
    pub genres: BTreeSet<String>,
}

impl MovieRecord {
    pub fn new<I, S>(movie_id: impl Into<MovieId>, title: impl Into<String>, genres: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MovieRecord {
            movie_id: movie_id.into(),
            title: title.into(),
            genres: genres.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub user_id: UserId,
    pub movie_id: MovieId,
    pub rating: f64,
    pub timestamp: i64,
}

impl RatingRecord {
    pub fn new(user_id: u32, movie_id: u32, rating: f64, timestamp: i64) -> Self {
        RatingRecord {
            user_id: UserId(user_id),
            movie_id: MovieId(movie_id),
            rating,
            timestamp,
        }
    }
}

/// True for MovieLens star values: 0.5 to 5.0 in half steps.
pub fn is_valid_rating(r: f64) -> bool {
    (0.5..=5.0).contains(&r) && (r * 2.0).fract() == 0.0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinksRecord {
    pub movie_id: MovieId,
    /// Kept as text; IMDb ids are zero-padded.
    pub imdb_id: Option<String>,
    pub tmdb_id: Option<u32>,
}

/// One row of an emotion-label file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionLabelRecord {
    pub tmdb_id: Option<u32>,
    pub movie_id: MovieId,
    pub imdb_id: Option<String>,
    pub mood: EmotionLabel,
    pub vector: EmotionVector,
}

struct CsvFile<'a> {
    path: &'a Path,
    reader: csv::Reader<File>,
    columns: Vec<usize>,
}

impl<'a> CsvFile<'a> {
    /// Opens `path` and locates `required` columns by case-insensitive name.
    fn open(path: &'a Path, required: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?
            .clone();
        if headers.is_empty() {
            return Err(Error::parse(path, 1, "missing header row"));
        }
        let columns = required
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h.trim().eq_ignore_ascii_case(name))
                    .ok_or_else(|| Error::parse(path, 1, format!("missing column {name:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CsvFile {
            path,
            reader,
            columns,
        })
    }

    /// Calls `f(line, fields)` for every data row, fields ordered as `required`.
    fn for_each_row(mut self, mut f: impl FnMut(u64, Vec<&str>) -> Result<()>) -> Result<()> {
        let mut record = csv::StringRecord::new();
        loop {
            match self.reader.read_record(&mut record) {
                Ok(false) => return Ok(()),
                Ok(true) => {}
                Err(e) => return Err(Error::parse(self.path, csv_line(&e), e.to_string())),
            }
            let line = record.position().map_or(0, |p| p.line());
            let fields = self
                .columns
                .iter()
                .map(|&i| record.get(i).map(str::trim))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::parse(self.path, line, "row has too few fields"))?;
            f(line, fields)?;
        }
    }
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| Error::parse(path, line, format!("invalid {name} {raw:?}: {e}")))
}

fn parse_optional_positive(path: &Path, line: u64, name: &str, raw: &str) -> Result<Option<u32>> {
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<u32>() {
        Ok(v) if v > 0 => Ok(Some(v)),
        _ => Err(Error::parse(path, line, format!("invalid {name} {raw:?}"))),
    }
}

fn parse_genres(raw: &str) -> BTreeSet<String> {
    if raw == NO_GENRES {
        return BTreeSet::new();
    }
    raw.split('|')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_movies(path: impl AsRef<Path>) -> Result<Vec<MovieRecord>> {
    let path = path.as_ref();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    CsvFile::open(path, &["movieId", "title", "genres"])?.for_each_row(|line, f| {
        let movie_id: MovieId = parse_field(path, line, "movieId", f[0])?;
        if !seen.insert(movie_id) {
            return Err(Error::parse(path, line, format!("duplicate movieId {movie_id}")));
        }
        out.push(MovieRecord {
            movie_id,
            title: f[1].to_string(),
            genres: parse_genres(f[2]),
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<Vec<RatingRecord>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    CsvFile::open(path, &["userId", "movieId", "rating", "timestamp"])?.for_each_row(|line, f| {
        let rating: f64 = parse_field(path, line, "rating", f[2])?;
        if !is_valid_rating(rating) {
            return Err(Error::validation(
                format!("{}:{line}", path.display()),
                format!("rating {rating} is not a 0.5-step value in [0.5, 5.0]"),
            ));
        }
        out.push(RatingRecord {
            user_id: parse_field(path, line, "userId", f[0])?,
            movie_id: parse_field(path, line, "movieId", f[1])?,
            rating,
            timestamp: parse_field(path, line, "timestamp", f[3])?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn load_links(path: impl AsRef<Path>) -> Result<Vec<LinksRecord>> {
    let path = path.as_ref();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    CsvFile::open(path, &["movieId", "imdbId", "tmdbId"])?.for_each_row(|line, f| {
        let movie_id: MovieId = parse_field(path, line, "movieId", f[0])?;
        if !seen.insert(movie_id) {
            return Err(Error::parse(path, line, format!("duplicate movieId {movie_id}")));
        }
        let imdb_id = match f[1] {
            "" => None,
            s if s.bytes().all(|b| b.is_ascii_digit()) => Some(s.to_string()),
            s => return Err(Error::parse(path, line, format!("invalid imdbId {s:?}"))),
        };
        out.push(LinksRecord {
            movie_id,
            imdb_id,
            tmdb_id: parse_optional_positive(path, line, "tmdbId", f[2])?,
        });
        Ok(())
    })?;
    Ok(out)
}

const LABEL_ID_COLUMNS: [&str; 4] = ["tid", "mid", "iid", "mood"];

/// Loads an emotion-label file keyed by MovieLens id.
///
/// Every column must be known; each row's vector must sum to one within
/// [`crate::emotion::PARSED_TOLERANCE`].
pub fn load_emotion_labels(path: impl AsRef<Path>) -> Result<BTreeMap<MovieId, EmotionLabelRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?
        .clone();

    // column index for tid, mid, iid, mood, then the seven labels
    let mut id_cols = [None; 4];
    let mut label_cols = [None; EMOTION_COUNT];
    for (i, h) in headers.iter().enumerate() {
        let h = h.trim();
        if let Some(k) = LABEL_ID_COLUMNS.iter().position(|c| h.eq_ignore_ascii_case(c)) {
            id_cols[k] = Some(i);
        } else if let Some(label) = EmotionLabel::parse(h) {
            label_cols[label.index()] = Some(i);
        } else {
            return Err(Error::Schema(format!(
                "{}: unknown column {h:?}",
                path.display()
            )));
        }
    }
    let missing: Vec<&str> = LABEL_ID_COLUMNS
        .iter()
        .zip(id_cols)
        .filter(|(_, c)| c.is_none())
        .map(|(n, _)| *n)
        .chain(
            EmotionLabel::ALL
                .iter()
                .zip(label_cols)
                .filter(|(_, c)| c.is_none())
                .map(|(l, _)| l.name()),
        )
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "{}: missing columns {}",
            path.display(),
            missing.join(", ")
        )));
    }
    let id_cols = id_cols.map(Option::unwrap);
    let label_cols = label_cols.map(Option::unwrap);

    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).map(str::trim).unwrap_or("");

        let tmdb_id = parse_optional_positive(path, line, "tid", field(id_cols[0]))?;
        let movie_id: MovieId = parse_field(path, line, "mid", field(id_cols[1]))?;
        let imdb_id = Some(field(id_cols[2]))
            .filter(|s| !s.is_empty())
            .map(str::to_string);
        let mood = EmotionLabel::parse(field(id_cols[3])).ok_or_else(|| {
            Error::parse(path, line, format!("unknown mood {:?}", field(id_cols[3])))
        })?;
        let mut values = [0.0; EMOTION_COUNT];
        for (label, (v, &col)) in EmotionLabel::ALL.iter().zip(values.iter_mut().zip(&label_cols)) {
            *v = parse_field(path, line, label.name(), field(col))?;
        }
        let vector = EmotionVector::from_parsed(values).map_err(|e| match e {
            Error::Validation { message, .. } => {
                Error::validation(format!("{}:{line} (mid {movie_id})", path.display()), message)
            }
            other => other,
        })?;
        let record = EmotionLabelRecord {
            tmdb_id,
            movie_id,
            imdb_id,
            mood,
            vector,
        };
        if out.insert(movie_id, record).is_some() {
            return Err(Error::parse(path, line, format!("duplicate mid {movie_id}")));
        }
    }
    Ok(out)
}

/// Loads `tmdbId,overview` rows.
pub fn load_overviews(path: impl AsRef<Path>) -> Result<BTreeMap<u32, String>> {
    let path = path.as_ref();
    let mut out = BTreeMap::new();
    CsvFile::open(path, &["tmdbId", "overview"])?.for_each_row(|line, f| {
        let id = parse_optional_positive(path, line, "tmdbId", f[0])?
            .ok_or_else(|| Error::parse(path, line, "empty tmdbId"))?;
        out.insert(id, f[1].to_string());
        Ok(())
    })?;
    Ok(out)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Schema(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_movies<'a>(path: impl AsRef<Path>, movies: impl IntoIterator<Item = &'a MovieRecord>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        w.write_record(["movieId", "title", "genres"])?;
        for m in movies {
            let genres = if m.genres.is_empty() {
                NO_GENRES.to_string()
            } else {
                m.genres.iter().map(String::as_str).collect::<Vec<_>>().join("|")
            };
            w.write_record([m.movie_id.to_string(), m.title.clone(), genres])?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| write_err(path, e))
}

pub fn write_ratings<'a>(path: impl AsRef<Path>, ratings: impl IntoIterator<Item = &'a RatingRecord>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        w.write_record(["userId", "movieId", "rating", "timestamp"])?;
        for r in ratings {
            w.write_record([
                r.user_id.to_string(),
                r.movie_id.to_string(),
                format!("{:.1}", r.rating),
                r.timestamp.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| write_err(path, e))
}

pub fn write_links<'a>(path: impl AsRef<Path>, links: impl IntoIterator<Item = &'a LinksRecord>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        w.write_record(["movieId", "imdbId", "tmdbId"])?;
        for l in links {
            w.write_record([
                l.movie_id.to_string(),
                l.imdb_id.clone().unwrap_or_default(),
                l.tmdb_id.map(|t| t.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| write_err(path, e))
}

/// Writes labels with full float precision so they reload bit-identically.
pub fn write_emotion_labels<'a>(
    path: impl AsRef<Path>,
    labels: impl IntoIterator<Item = &'a EmotionLabelRecord>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        let mut header = LABEL_ID_COLUMNS.to_vec();
        header.extend(EmotionLabel::ALL.iter().map(|l| l.name()));
        w.write_record(&header)?;
        for r in labels {
            let mut row = vec![
                r.tmdb_id.map(|t| t.to_string()).unwrap_or_default(),
                r.movie_id.to_string(),
                r.imdb_id.clone().unwrap_or_default(),
                r.mood.name().to_string(),
            ];
            row.extend(r.vector.values().iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| write_err(path, e))
}

pub fn write_overviews<'a>(path: impl AsRef<Path>, overviews: impl IntoIterator<Item = (&'a u32, &'a String)>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let run = |w: &mut csv::Writer<File>| -> csv::Result<()> {
        w.write_record(["tmdbId", "overview"])?;
        for (id, text) in overviews {
            w.write_record([id.to_string(), text.clone()])?;
        }
        w.flush()?;
        Ok(())
    };
    run(&mut w).map_err(|e| write_err(path, e))
}
