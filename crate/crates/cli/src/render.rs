//! Text and JSON rendering. Floats in tables use fixed decimals so output is
//! byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use emorec::emotion::EmotionLabel;
use emorec::evaluation::{ComparisonReport, HitCheck};
use emorec::ingest::{Catalog, MergeReport};
use emorec::profile::UserProfile;
use emorec::similarity::ScoredItem;
use emorec::{MovieId, UserId};
use serde::Serialize;

pub fn json<T: Serialize + ?Sized>(value: &T) -> emorec::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn merge_report(r: &MergeReport) -> String {
    format!(
        "raw_count             {}\n\
         merged_count          {}\n\
         loss_fraction         {:.4}\n\
         missing_tmdb_link     {}\n\
         missing_emotion_label {}\n\
         rating_count          {}\n\
         orphan_ratings        {}\n",
        r.raw_count,
        r.merged_count,
        r.loss_fraction,
        r.missing_tmdb_link,
        r.missing_emotion_label,
        r.rating_count,
        r.orphan_ratings
    )
}

pub struct RunHeader<'a> {
    pub algorithm: &'a str,
    pub seed: Option<MovieId>,
    pub user: Option<UserId>,
}

#[derive(Serialize)]
pub struct RankedRow<'a> {
    rank: usize,
    movie_id: MovieId,
    title: &'a str,
    score: f64,
}

#[derive(Serialize)]
pub struct RankedJson<'a> {
    algorithm: &'a str,
    seed: Option<MovieId>,
    user: Option<UserId>,
    items: Vec<RankedRow<'a>>,
}

pub fn ranked_json<'a>(h: &RunHeader<'a>, items: &[ScoredItem], catalog: &'a Catalog) -> RankedJson<'a> {
    RankedJson {
        algorithm: h.algorithm,
        seed: h.seed,
        user: h.user,
        items: items
            .iter()
            .enumerate()
            .map(|(i, s)| RankedRow {
                rank: i + 1,
                movie_id: s.id,
                title: catalog.title(s.id),
                score: round6(s.score),
            })
            .collect(),
    }
}

pub fn ranked_table(h: &RunHeader, items: &[ScoredItem], catalog: &Catalog, score_name: &str) -> String {
    let mut out = format!("# {}", h.algorithm);
    if let Some(s) = h.seed {
        let _ = write!(out, " seed={s}");
    }
    if let Some(u) = h.user {
        let _ = write!(out, " user={u}");
    }
    let _ = writeln!(out, "\n{:>4}  {:>8}  {:>10}  title", "rank", "movie_id", score_name);
    for (i, s) in items.iter().enumerate() {
        let _ = writeln!(out, "{:>4}  {:>8}  {:>10.6}  {}", i + 1, s.id, s.score, catalog.title(s.id));
    }
    out
}

pub fn profile_table(p: &UserProfile) -> String {
    let mut out = format!(
        "user {}  watched {}  profiled {}\n\nuvec\n",
        p.user_id, p.watched_count, p.profiled_count
    );
    for label in EmotionLabel::ALL {
        let _ = writeln!(out, "  {:<9} {:.6}", label.name(), p.uvec.get(label));
    }
    let _ = writeln!(out, "\nwvec ({} dims)", p.wvec.len());
    let cells: Vec<String> = p.wvec.iter().map(|x| format!("{x:.6}")).collect();
    for chunk in cells.chunks(7) {
        let _ = writeln!(out, "  {}", chunk.join(" "));
    }
    out
}

pub fn hits_table(hits: &BTreeMap<String, HitCheck>) -> String {
    let mut out = String::from("\nhits against unseen ratings\n");
    for (name, h) in hits {
        let ids: Vec<String> = h.hits.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  {name:<8} {:.6}  [{}]", h.hit_rate, ids.join(" "));
    }
    out
}

#[derive(Serialize)]
pub struct EvaluateJson<'a> {
    #[serde(flatten)]
    pub report: &'a ComparisonReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_checks: Option<&'a BTreeMap<String, HitCheck>>,
}
