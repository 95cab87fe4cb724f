//! Sparse rating matrix and the item-based / user-based collaborative filters.
//!
//! Unrated cells count as zero and similarities are the raw cosine of two
//! matrix rows, with no mean-centering.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::ingest::RatingRecord;
use crate::similarity::{cosine_from_parts, top_k, Scored, ScoredItem};
use crate::{Error, MovieId, Result, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Rows are users, columns are movies (UBCF).
    UsersAsRows,
    /// Rows are movies, columns are users (IBCF).
    ItemsAsRows,
}

/// Ratings stored row-major as sorted `(column index, rating)` lists.
#[derive(Debug, Clone)]
pub struct RatingMatrix {
    orientation: Orientation,
    row_ids: Vec<u32>,
    col_ids: Vec<u32>,
    rows: Vec<Vec<(usize, f64)>>,
    norms: Vec<f64>,
    row_pos: HashMap<u32, usize>,
}

/// A row's most similar other rows, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood<Id> {
    pub anchor: Id,
    pub neighbors: Vec<Scored<Id>>,
}

impl RatingMatrix {
    /// Builds the matrix; a re-rated `(user, movie)` keeps the rating with the
    /// latest timestamp (the later record on equal timestamps).
    pub fn build(ratings: &[RatingRecord], orientation: Orientation) -> Self {
        let mut latest: BTreeMap<(u32, u32), (i64, f64)> = BTreeMap::new();
        for r in ratings {
            let key = match orientation {
                Orientation::UsersAsRows => (r.user_id.0, r.movie_id.0),
                Orientation::ItemsAsRows => (r.movie_id.0, r.user_id.0),
            };
            latest
                .entry(key)
                .and_modify(|e| {
                    if r.timestamp >= e.0 {
                        *e = (r.timestamp, r.rating)
                    }
                })
                .or_insert((r.timestamp, r.rating));
        }

        let mut col_ids: Vec<u32> = latest.keys().map(|&(_, c)| c).collect();
        col_ids.sort_unstable();
        col_ids.dedup();
        let col_pos: HashMap<u32, usize> = col_ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();

        let mut row_ids = Vec::new();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        // BTreeMap iteration is row-major with ascending columns
        for (&(row, col), &(_, rating)) in &latest {
            if row_ids.last() != Some(&row) {
                row_ids.push(row);
                rows.push(Vec::new());
            }
            rows.last_mut().unwrap().push((col_pos[&col], rating));
        }
        let norms = rows
            .iter()
            .map(|r| r.iter().fold(0.0, |acc, (_, v)| acc + v * v).sqrt())
            .collect();
        let row_pos = row_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        RatingMatrix {
            orientation,
            row_ids,
            col_ids,
            rows,
            norms,
            row_pos,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn row_ids(&self) -> &[u32] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[u32] {
        &self.col_ids
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.row_ids.is_empty()
    }

    /// Rating at `(row id, column id)`.
    pub fn get(&self, row: u32, col: u32) -> Option<f64> {
        let r = &self.rows[*self.row_pos.get(&row)?];
        let c = self.col_ids.binary_search(&col).ok()?;
        r.binary_search_by_key(&c, |&(i, _)| i).ok().map(|i| r[i].1)
    }

    /// `(column id, rating)` pairs of a row, ascending by column id.
    pub fn row(&self, row: u32) -> Option<impl Iterator<Item = (u32, f64)> + '_> {
        let r = &self.rows[*self.row_pos.get(&row)?];
        Some(r.iter().map(|&(c, v)| (self.col_ids[c], v)))
    }

    fn expect(&self, orientation: Orientation) -> Result<()> {
        if self.orientation != orientation {
            return Err(Error::Config(format!(
                "operation needs a {orientation:?} matrix, this one is {:?}",
                self.orientation
            )));
        }
        Ok(())
    }

    fn row_cosine(&self, a: usize, b: usize) -> f64 {
        let (ra, rb) = (&self.rows[a], &self.rows[b]);
        let (mut i, mut j, mut dot) = (0, 0, 0.0);
        while i < ra.len() && j < rb.len() {
            match ra[i].0.cmp(&rb[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += ra[i].1 * rb[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        cosine_from_parts(dot, self.norms[a], self.norms[b])
    }

    /// Cosine against every other row, best first, truncated to `k`.
    fn neighbors_of(&self, anchor: usize, k: usize) -> Vec<Scored<u32>> {
        let candidates = (0..self.rows.len())
            .filter(|&i| i != anchor)
            .map(|i| Scored::new(self.row_ids[i], self.row_cosine(anchor, i)))
            .collect();
        top_k(candidates, k)
    }
}

fn check_n(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Config(format!("{what} must be at least 1")));
    }
    Ok(())
}

pub fn item_similarity(m: &RatingMatrix, a: MovieId, b: MovieId) -> Result<f64> {
    m.expect(Orientation::ItemsAsRows)?;
    let ia = *m.row_pos.get(&a.0).ok_or(Error::UnknownMovie(a))?;
    let ib = *m.row_pos.get(&b.0).ok_or(Error::UnknownMovie(b))?;
    Ok(m.row_cosine(ia, ib))
}

pub fn user_similarity(m: &RatingMatrix, a: UserId, b: UserId) -> Result<f64> {
    m.expect(Orientation::UsersAsRows)?;
    let ia = *m.row_pos.get(&a.0).ok_or(Error::UnknownUser(a))?;
    let ib = *m.row_pos.get(&b.0).ok_or(Error::UnknownUser(b))?;
    Ok(m.row_cosine(ia, ib))
}

pub fn item_neighborhood(m: &RatingMatrix, seed: MovieId, k: usize) -> Result<Neighborhood<MovieId>> {
    m.expect(Orientation::ItemsAsRows)?;
    let anchor = *m.row_pos.get(&seed.0).ok_or(Error::UnknownMovie(seed))?;
    Ok(Neighborhood {
        anchor: seed,
        neighbors: m
            .neighbors_of(anchor, k)
            .into_iter()
            .map(|s| Scored::new(MovieId(s.id), s.score))
            .collect(),
    })
}

pub fn user_neighborhood(m: &RatingMatrix, active: UserId, k: usize) -> Result<Neighborhood<UserId>> {
    m.expect(Orientation::UsersAsRows)?;
    let anchor = *m.row_pos.get(&active.0).ok_or(Error::UnknownUser(active))?;
    Ok(Neighborhood {
        anchor: active,
        neighbors: m
            .neighbors_of(anchor, k)
            .into_iter()
            .map(|s| Scored::new(UserId(s.id), s.score))
            .collect(),
    })
}

/// Item-based CF: the `n` movies whose rating rows are closest to `seed`'s.
pub fn ibcf_recommend(m: &RatingMatrix, seed: MovieId, n: usize) -> Result<Vec<ScoredItem>> {
    check_n(n, "n")?;
    Ok(item_neighborhood(m, seed, n)?.neighbors)
}

/// User-based CF.
///
/// Takes the `k_neighbors` users closest to `active` and scores every movie
/// they rated that `active` has not by `Σ similarity × neighbor rating`.
pub fn ubcf_recommend(
    m: &RatingMatrix,
    active: UserId,
    n: usize,
    k_neighbors: usize,
) -> Result<Vec<ScoredItem>> {
    check_n(n, "n")?;
    check_n(k_neighbors, "k_neighbors")?;
    m.expect(Orientation::UsersAsRows)?;
    let anchor = *m.row_pos.get(&active.0).ok_or(Error::UnknownUser(active))?;
    let watched = &m.rows[anchor];
    if watched.is_empty() {
        return Err(Error::Domain(format!("user {active} has no ratings")));
    }

    let mut scores: BTreeMap<usize, f64> = BTreeMap::new();
    for neighbor in m.neighbors_of(anchor, k_neighbors) {
        for &(col, rating) in &m.rows[m.row_pos[&neighbor.id]] {
            if watched.binary_search_by_key(&col, |&(c, _)| c).is_err() {
                *scores.entry(col).or_insert(0.0) += neighbor.score * rating;
            }
        }
    }
    let candidates = scores
        .into_iter()
        .map(|(col, s)| Scored::new(MovieId(m.col_ids[col]), s))
        .collect();
    Ok(top_k(candidates, n))
}
