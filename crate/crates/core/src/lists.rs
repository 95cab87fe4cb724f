//! Reading and writing ranked movie-id lists as CSV.
//!
//! Two layouts are accepted. A file whose header has a `movie_id` column is
//! a single list named after the file stem (an optional `score` column is
//! kept). Any other file is read column-wise: each column except `No` and
//! `rank` is one list named by its header, and blank cells are skipped.

use std::path::Path;

use crate::emotion::csv_line;
use crate::ingest::Catalog;
use crate::similarity::{Scored, ScoredItem};
use crate::{Error, MovieId, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedList {
    pub name: String,
    pub items: Vec<ScoredItem>,
}

impl NamedList {
    pub fn ids(&self) -> Vec<MovieId> {
        self.items.iter().map(|s| s.id).collect()
    }
}

pub fn read_lists(path: impl AsRef<Path>) -> Result<Vec<NamedList>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let parse_id = |line: u64, field: &str| -> Result<MovieId> {
        field
            .parse::<MovieId>()
            .map_err(|_| Error::parse(path, line, format!("invalid movie id {field:?}")))
    };

    let single = find("movie_id");
    let score_col = find("score");
    let columns: Vec<usize> = match single {
        Some(c) => vec![c],
        None => (0..headers.len())
            .filter(|i| !["no", "rank"].contains(&headers[*i].to_ascii_lowercase().as_str()))
            .collect(),
    };
    if columns.is_empty() {
        return Err(Error::Schema(format!("{}: no list columns", path.display())));
    }
    let mut lists: Vec<NamedList> = columns
        .iter()
        .map(|c| NamedList {
            name: match single {
                Some(_) => path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                None => headers[*c].clone(),
            },
            items: Vec::new(),
        })
        .collect();

    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?;
        let line = row.position().map_or(i as u64 + 2, |p| p.line());
        for (list, c) in lists.iter_mut().zip(&columns) {
            let field = row.get(*c).unwrap_or("");
            if field.is_empty() {
                continue;
            }
            let id = parse_id(line, field)?;
            let score = match (single, score_col.and_then(|s| row.get(s))) {
                (Some(_), Some(s)) if !s.is_empty() => s
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, line, format!("invalid score {s:?}")))?,
                _ => 0.0,
            };
            list.items.push(Scored::new(id, score));
        }
    }
    Ok(lists)
}

/// Renders `rank,movie_id,title,score` with scores at 6 decimals.
pub fn render_list_csv(items: &[ScoredItem], catalog: &Catalog) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Domain(format!("csv write failed: {e}"));
    w.write_record(["rank", "movie_id", "title", "score"]).map_err(err)?;
    for (i, s) in items.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            s.id.to_string(),
            catalog.title(s.id).to_owned(),
            format!("{:.6}", s.score),
        ])
        .map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Domain(format!("csv write failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::MovieRecord;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn column_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "t.csv", "No,IBCF,EAR\n1,10,20\n2,11,\n3,12,22\n");
        let lists = read_lists(&p).unwrap();
        assert_eq!(lists.len(), 2);
        assert_eq!(lists[0].name, "IBCF");
        assert_eq!(lists[0].ids(), vec![MovieId(10), MovieId(11), MovieId(12)]);
        assert_eq!(lists[1].ids(), vec![MovieId(20), MovieId(22)]);
    }

    #[test]
    fn single_layout_round_trips() {
        let cat = Catalog::builder()
            .movie(MovieRecord::new(5, "Heat, The (1995)", ["Crime"]))
            .movie(MovieRecord::new(9, "Up (2009)", ["Animation"]))
            .build()
            .unwrap();
        let items = vec![Scored::new(MovieId(9), 0.75), Scored::new(MovieId(5), 0.5)];
        let text = render_list_csv(&items, &cat).unwrap();
        assert!(text.contains("\"Heat, The (1995)\",0.500000"));
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "gar.csv", &text);
        let lists = read_lists(&p).unwrap();
        assert_eq!(lists.len(), 1);
        assert_eq!(lists[0].name, "gar");
        assert_eq!(lists[0].items, items);
    }

    #[test]
    fn bad_id_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "x.csv", "movie_id\n3\nabc\n");
        match read_lists(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(read_lists("/nonexistent/list.csv"), Err(Error::Io { .. })));
    }
}
