//! Cross-recommender overlap statistics and unseen-set hit checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, MovieId, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub per_algorithm_lists: BTreeMap<String, Vec<MovieId>>,
    pub total_entries: usize,
    pub unique_titles: usize,
    pub duplicate_count: usize,
    pub pairwise_overlap: BTreeMap<String, BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_duplicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duplicate_delta: Option<i64>,
}

/// Counts entries over the multiset union of all lists.
///
/// A duplicate is any entry beyond the first occurrence of its id, so
/// `duplicate_count = total_entries - unique_titles`. Off-diagonal overlap
/// counts distinct shared ids; the diagonal is the list length.
pub fn overlap_report(lists: &BTreeMap<String, Vec<MovieId>>) -> Result<ComparisonReport> {
    if lists.is_empty() {
        return Err(Error::Domain("no lists to compare".into()));
    }
    let total_entries: usize = lists.values().map(Vec::len).sum();
    let unique_titles = lists.values().flatten().collect::<BTreeSet<_>>().len();
    let sets: BTreeMap<&String, HashSet<MovieId>> = lists
        .iter()
        .map(|(k, v)| (k, v.iter().copied().collect()))
        .collect();
    let mut pairwise_overlap = BTreeMap::new();
    for (a, list_a) in lists {
        let row = lists
            .keys()
            .map(|b| {
                let n = if a == b {
                    list_a.len()
                } else {
                    sets[a].intersection(&sets[b]).count()
                };
                (b.clone(), n)
            })
            .collect();
        pairwise_overlap.insert(a.clone(), row);
    }
    Ok(ComparisonReport {
        per_algorithm_lists: lists.clone(),
        total_entries,
        unique_titles,
        duplicate_count: total_entries - unique_titles,
        pairwise_overlap,
        expected_duplicates: None,
        duplicate_delta: None,
    })
}

impl ComparisonReport {
    /// Records an externally claimed duplicate count and the signed
    /// difference `duplicate_count - expected`.
    pub fn with_expected_duplicates(mut self, expected: usize) -> Self {
        self.expected_duplicates = Some(expected);
        self.duplicate_delta = Some(self.duplicate_count as i64 - expected as i64);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let names: Vec<&String> = self.per_algorithm_lists.keys().collect();
        let width = names.iter().map(|n| n.len()).max().unwrap_or(0).max(4);
        let _ = writeln!(out, "total_entries    {}", self.total_entries);
        let _ = writeln!(out, "unique_titles    {}", self.unique_titles);
        let _ = writeln!(out, "duplicate_count  {}", self.duplicate_count);
        if let (Some(e), Some(d)) = (self.expected_duplicates, self.duplicate_delta) {
            let flag = if d == 0 { "match" } else { "MISMATCH" };
            let _ = writeln!(out, "expected         {e} (delta {d:+}, {flag})");
        }
        let _ = writeln!(out);
        let _ = write!(out, "{:width$}", "");
        for n in &names {
            let _ = write!(out, "  {n:>width$}");
        }
        let _ = writeln!(out);
        for a in &names {
            let _ = write!(out, "{a:width$}");
            for b in &names {
                let _ = write!(out, "  {:>width$}", self.pairwise_overlap[*a][*b]);
            }
            let _ = writeln!(out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitCheck {
    pub hits: Vec<MovieId>,
    pub hit_rate: f64,
}

/// Items of `top_list` that appear in `unseen`, in list order.
pub fn hit_check(top_list: &[MovieId], unseen: &[MovieId]) -> HitCheck {
    let unseen: HashSet<MovieId> = unseen.iter().copied().collect();
    let hits: Vec<MovieId> = top_list.iter().copied().filter(|m| unseen.contains(m)).collect();
    let hit_rate = if top_list.is_empty() {
        0.0
    } else {
        hits.len() as f64 / top_list.len() as f64
    };
    HitCheck { hits, hit_rate }
}
