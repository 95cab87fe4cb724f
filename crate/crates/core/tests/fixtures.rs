use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use emorec::content::{ear_recommend, EmotionEncoding, IvecConfig};
use emorec::emotion::{dominant_mood, mean_vectors, to_onehot, EmotionLabel, EmotionVector, OneHotMode};
use emorec::evaluation::overlap_report;
use emorec::ingest::{self, merge_catalog, Catalog};
use emorec::lists::read_lists;
use emorec::profile::{compute_profile, load_vector_csv};
use emorec::similarity::inner;
use emorec::{MovieId, UserId};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn table3() -> BTreeMap<MovieId, ingest::EmotionLabelRecord> {
    ingest::load_emotion_labels(root().join("fixtures/table3_emotion_labels.csv")).unwrap()
}

#[test]
fn table3_rows_and_moods() {
    let rows = table3();
    let expected = [
        (4470, 2, EmotionLabel::Disgust),
        (18, 5, EmotionLabel::Disgust),
        (479, 6, EmotionLabel::Hate),
        (260, 11, EmotionLabel::Neutral),
        (6377, 12, EmotionLabel::Surprise),
    ];
    assert_eq!(rows.len(), 5);
    for (mid, tid, mood) in expected {
        let r = &rows[&MovieId(mid)];
        assert_eq!(r.tmdb_id, Some(tid));
        assert_eq!(r.mood, mood);
        assert_eq!(dominant_mood(&r.vector), mood);
    }
    // row sums as published: only row 3 misses 1.0, by 0.001
    let sums: Vec<f64> = expected.iter().map(|(m, _, _)| rows[&MovieId(*m)].vector.sum()).collect();
    for (s, want) in sums.iter().zip([1.0, 1.0, 0.999, 1.0, 1.0]) {
        assert!((s - want).abs() < 1e-12, "{s} vs {want}");
    }
}

#[test]
fn table3_threshold_and_mean() {
    let rows = table3();
    let first = rows[&MovieId(4470)].vector;
    let onehot = to_onehot(&first, OneHotMode::Threshold(0.2)).unwrap();
    assert_eq!(onehot.labels(), vec![EmotionLabel::Disgust]);

    let m = mean_vectors(&[first, rows[&MovieId(18)].vector]).unwrap();
    let want = [0.139, 0.073, 0.127, 0.1015, 0.109, 0.255, 0.1955];
    for (g, w) in m.values().iter().zip(want) {
        assert!((g - w).abs() < 1e-12);
    }
    assert!((inner(first.values(), rows[&MovieId(18)].vector.values()).unwrap() - 0.163054).abs() < 1e-12);
}

#[test]
fn table4_profile_vector() {
    let w = load_vector_csv(root().join("fixtures/table4_wvec.csv")).unwrap();
    let sum: f64 = w.iter().sum();
    assert!((sum - 0.99999968).abs() < 1e-12);
    let v = EmotionVector::new(w.try_into().unwrap(), 1e-6).unwrap();
    assert_eq!(v.dominant(), EmotionLabel::Hate);
    assert_eq!(v.get(EmotionLabel::Hate), 0.2033184);
}

#[test]
fn table5_overlap_against_distinct_count() {
    let lists: BTreeMap<String, Vec<MovieId>> = read_lists(root().join("fixtures/table5_top20.csv"))
        .unwrap()
        .into_iter()
        .map(|l| (l.name.clone(), l.ids()))
        .collect();
    assert_eq!(lists.keys().collect::<Vec<_>>(), ["EAR", "GAR", "IBCF", "MAR", "UBCF"]);
    assert!(lists.values().all(|l| l.len() == 20));
    let distinct: HashSet<MovieId> = lists.values().flatten().copied().collect();
    let report = overlap_report(&lists).unwrap().with_expected_duplicates(35);
    assert_eq!(report.total_entries, 100);
    assert_eq!(report.unique_titles, distinct.len());
    assert_eq!(report.duplicate_count, 100 - distinct.len());
    assert_eq!(report.duplicate_delta, Some(report.duplicate_count as i64 - 35));
    // shared ids: 2879, 5803, 3283 (EAR/MAR), 112897 (GAR/MAR), 2028 (IBCF/UBCF)
    assert_eq!(report.pairwise_overlap["EAR"]["MAR"], 3);
    assert_eq!(report.pairwise_overlap["GAR"]["MAR"], 1);
    assert_eq!(report.pairwise_overlap["IBCF"]["UBCF"], 1);
}

fn mini_catalog() -> (Catalog, Vec<ingest::RatingRecord>) {
    let dir = root().join("data/mini");
    let movies = ingest::load_movies(dir.join("movies.csv")).unwrap();
    let ratings = ingest::load_ratings(dir.join("ratings.csv")).unwrap();
    let links = ingest::load_links(dir.join("links.csv")).unwrap();
    let labels = ingest::load_emotion_labels(dir.join("emotion_labels.csv")).unwrap();
    let overviews = ingest::load_overviews(dir.join("overviews.csv")).unwrap();
    (merge_catalog(movies, &ratings, links, &labels).with_overviews(&overviews), ratings)
}

#[test]
fn mini_dataset_shape() {
    let (catalog, ratings) = mini_catalog();
    assert_eq!(catalog.len(), 120);
    let users: HashSet<UserId> = ratings.iter().map(|r| r.user_id).collect();
    assert_eq!(users.len(), 50);
    let r = catalog.merge_report();
    assert_eq!(r.raw_count - r.merged_count, r.missing_tmdb_link + r.missing_emotion_label);
    assert_eq!(r.orphan_ratings, 0);
    assert!(catalog.movies().values().any(|m| m.genres.is_empty()));
    assert!(catalog.movies().values().any(|m| m.title.contains(',')));
}

#[test]
fn mini_catalog_json_round_trip() {
    let (catalog, _) = mini_catalog();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("catalog.json");
    catalog.save(&p).unwrap();
    let back = Catalog::load(&p).unwrap();
    assert_eq!(back.to_json().unwrap(), catalog.to_json().unwrap());
    assert_eq!(back.movies(), catalog.movies());
    assert_eq!(back.emotion_profiles(), catalog.emotion_profiles());
}

#[test]
fn mini_labels_agree_with_lexicon_baseline() {
    use emorec::emotion::{EmotionLexicon, EmotionProvider};
    let dir = root().join("data/mini");
    let lexicon = EmotionLexicon::load(dir.join("lexicon.csv")).unwrap();
    let overviews = ingest::load_overviews(dir.join("overviews.csv")).unwrap();
    for r in ingest::load_emotion_labels(dir.join("emotion_labels.csv")).unwrap().values() {
        let scored = lexicon.profile(&overviews[&r.tmdb_id.unwrap()]);
        for (a, b) in scored.values().iter().zip(r.vector.values()) {
            assert!((a - b).abs() <= 0.0005 + 1e-12, "movie {}", r.movie_id);
        }
    }
}

#[test]
fn mini_profiles_and_ear_are_consistent() {
    let (catalog, ratings) = mini_catalog();
    let p = compute_profile(UserId(7), &ratings, &catalog, IvecConfig::default()).unwrap();
    assert_eq!(p.wvec, p.uvec.values().to_vec());
    assert!((p.uvec.sum() - 1.0).abs() <= 0.005 + 1e-9);
    let seed = *catalog.emotion_profiles().keys().next().unwrap();
    let a = ear_recommend(&catalog, seed, 20, EmotionEncoding::Argmax).unwrap();
    let b = ear_recommend(&catalog, seed, 20, EmotionEncoding::Argmax).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 20);
}
