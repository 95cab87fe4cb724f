//! Regenerates the bundled synthetic dataset under `data/mini/`.
//!
//! ```text
//! cargo run -p emorec --example make_mini_dataset -- data/mini
//! ```
//!
//! Output is a pure function of the fixed seed below.

use std::collections::BTreeMap;
use std::path::PathBuf;

use emorec::emotion::{lexicon_score, EmotionLabel, EmotionLexicon, EmotionVector, EMOTION_COUNT};
use emorec::ingest::{self, EmotionLabelRecord, LinksRecord, MovieRecord, RatingRecord};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0400;
const USERS: u32 = 50;
const MOVIES: u32 = 120;

const GENRES: [&str; 12] = [
    "Action", "Adventure", "Animation", "Comedy", "Crime", "Drama", "Fantasy", "Horror", "Mystery",
    "Romance", "Sci-Fi", "Thriller",
];

const LEXICON: [(&str, EmotionLabel, f64); 35] = [
    ("family", EmotionLabel::Neutral, 0.5),
    ("town", EmotionLabel::Neutral, 0.5),
    ("journey", EmotionLabel::Neutral, 0.7),
    ("city", EmotionLabel::Neutral, 0.4),
    ("story", EmotionLabel::Neutral, 0.3),
    ("love", EmotionLabel::Joy, 1.0),
    ("friendship", EmotionLabel::Joy, 0.8),
    ("celebrate", EmotionLabel::Joy, 0.9),
    ("wedding", EmotionLabel::Joy, 0.7),
    ("laughter", EmotionLabel::Joy, 0.6),
    ("loss", EmotionLabel::Sadness, 1.0),
    ("grief", EmotionLabel::Sadness, 0.9),
    ("lonely", EmotionLabel::Sadness, 0.8),
    ("farewell", EmotionLabel::Sadness, 0.6),
    ("illness", EmotionLabel::Sadness, 0.7),
    ("revenge", EmotionLabel::Hate, 1.0),
    ("enemy", EmotionLabel::Hate, 0.8),
    ("betrayal", EmotionLabel::Hate, 0.9),
    ("war", EmotionLabel::Hate, 0.7),
    ("cruel", EmotionLabel::Hate, 0.6),
    ("fury", EmotionLabel::Anger, 1.0),
    ("fight", EmotionLabel::Anger, 0.7),
    ("rage", EmotionLabel::Anger, 0.9),
    ("injustice", EmotionLabel::Anger, 0.8),
    ("riot", EmotionLabel::Anger, 0.6),
    ("corrupt", EmotionLabel::Disgust, 0.9),
    ("rotten", EmotionLabel::Disgust, 0.8),
    ("greed", EmotionLabel::Disgust, 0.7),
    ("filth", EmotionLabel::Disgust, 1.0),
    ("scandal", EmotionLabel::Disgust, 0.6),
    ("secret", EmotionLabel::Surprise, 0.8),
    ("mystery", EmotionLabel::Surprise, 0.9),
    ("twist", EmotionLabel::Surprise, 1.0),
    ("stranger", EmotionLabel::Surprise, 0.6),
    ("discovery", EmotionLabel::Surprise, 0.7),
];

const FILLER: [&str; 12] = [
    "a", "the", "young", "old", "detective", "captain", "teacher", "sister", "must", "face", "after",
    "before",
];

const TITLE_WORDS: [&str; 16] = [
    "Night", "River", "Empire", "Garden", "Shadow", "Harbor", "Winter", "Signal", "Crown", "Echo",
    "Orchard", "Mirror", "Lantern", "Summit", "Tide", "Circuit",
];

/// Ids skip a few values so code never assumes they are dense.
fn movie_id(i: u32) -> u32 {
    i + i / 10 * 3 + 1
}

fn title(rng: &mut ChaCha8Rng, i: u32) -> String {
    let a = TITLE_WORDS.choose(rng).unwrap();
    let b = TITLE_WORDS.choose(rng).unwrap();
    let year = rng.random_range(1970..2020);
    match i % 9 {
        0 => format!("{a} of the {b}, The ({year})"),
        4 => format!("\"{a}\" {b} ({year})"),
        _ => format!("{a} {b} {} ({year})", i + 1),
    }
}

fn genres(rng: &mut ChaCha8Rng, i: u32) -> Vec<&'static str> {
    if i == 17 || i == 83 {
        return Vec::new();
    }
    let n = rng.random_range(1..=3);
    let mut g: Vec<&str> = GENRES.choose_multiple(rng, n).copied().collect();
    g.sort_unstable();
    g
}

fn overview(rng: &mut ChaCha8Rng, tone: usize) -> String {
    let mut words = Vec::new();
    for _ in 0..rng.random_range(14..26) {
        let w = if rng.random_bool(0.45) {
            // favour the movie's tone so moods are not uniform
            let idx = if rng.random_bool(0.6) {
                tone * 5 + rng.random_range(0..5)
            } else {
                rng.random_range(0..LEXICON.len())
            };
            LEXICON[idx].0
        } else {
            FILLER.choose(rng).unwrap()
        };
        words.push(w);
    }
    let mut s = words.join(" ");
    s[..1].make_ascii_uppercase();
    s.push('.');
    s
}

fn round3(v: &EmotionVector) -> EmotionVector {
    let mut out = [0.0; EMOTION_COUNT];
    for (o, x) in out.iter_mut().zip(v.values()) {
        *o = (x * 1000.0).round() / 1000.0;
    }
    EmotionVector::from_parsed(out).expect("rounding stays within parse tolerance")
}

fn snap(r: f64) -> f64 {
    ((r * 2.0).round() / 2.0).clamp(0.5, 5.0)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "data/mini".into()).into();
    std::fs::create_dir_all(&out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let lexicon = EmotionLexicon::from_entries(LEXICON.iter().map(|(w, l, x)| (*w, *l, *x)))?;

    let mut movies = Vec::new();
    let mut links = Vec::new();
    let mut overviews = BTreeMap::new();
    let mut labels = Vec::new();
    for i in 0..MOVIES {
        let id = movie_id(i);
        let g = genres(&mut rng, i);
        movies.push(MovieRecord::new(id, title(&mut rng, i), g));
        let tmdb = (i % 29 != 5).then_some(9000 + id * 7);
        links.push(LinksRecord {
            movie_id: id.into(),
            imdb_id: Some(format!("{:07}", 100_000 + id * 13)),
            tmdb_id: tmdb,
        });
        let Some(tmdb) = tmdb else { continue };
        let text = overview(&mut rng, (i as usize * 5 + 3) % EMOTION_COUNT);
        // a handful of titles get an overview but no emotion label
        if i % 37 != 11 {
            let vector = round3(&lexicon_score(&text, &lexicon));
            labels.push(EmotionLabelRecord {
                tmdb_id: Some(tmdb),
                movie_id: id.into(),
                imdb_id: Some(format!("{:07}", 100_000 + id * 13)),
                mood: vector.dominant(),
                vector,
            });
        }
        overviews.insert(tmdb, text);
    }

    let mut ratings = Vec::new();
    let mut ts: i64 = 1_500_000_000;
    for u in 1..=USERS {
        let likes: Vec<&str> = GENRES.choose_multiple(&mut rng, 2).copied().collect();
        let count = rng.random_range(12..=36);
        let picks: Vec<&MovieRecord> = movies.choose_multiple(&mut rng, count).collect();
        for m in picks {
            let fan = m.genres.iter().any(|g| likes.contains(&g.as_str()));
            let base = if fan { 4.0 } else { 2.75 };
            let rating = snap(base + rng.random_range(-1.25..1.25));
            ts += rng.random_range(60..86_400);
            ratings.push(RatingRecord::new(u, m.movie_id.0, rating, ts));
        }
    }
    // a few re-ratings; loaders keep the latest timestamp
    for k in 0..4 {
        let r = ratings[k * 97 % ratings.len()];
        ts += 3600;
        ratings.push(RatingRecord::new(r.user_id.0, r.movie_id.0, snap(6.0 - r.rating), ts));
    }

    // later ratings for user 7, some already in the training set
    let mut extra: Vec<RatingRecord> = ratings.iter().filter(|r| r.user_id.0 == 7).take(3).copied().collect();
    for m in movies.choose_multiple(&mut rng, 10) {
        ts += 7200;
        extra.push(RatingRecord::new(7, m.movie_id.0, snap(rng.random_range(1.0..5.0)), ts));
    }

    ingest::write_movies(out.join("movies.csv"), &movies)?;
    ingest::write_ratings(out.join("ratings.csv"), &ratings)?;
    ingest::write_links(out.join("links.csv"), &links)?;
    ingest::write_emotion_labels(out.join("emotion_labels.csv"), &labels)?;
    ingest::write_overviews(out.join("overviews.csv"), &overviews)?;
    ingest::write_ratings(out.join("extra_ratings.csv"), &extra)?;
    let mut lex = String::from("word,label,weight\n");
    for (w, l, x) in LEXICON {
        lex.push_str(&format!("{w},{l},{x}\n"));
    }
    std::fs::write(out.join("lexicon.csv"), lex)?;

    println!(
        "wrote {} movies, {} ratings, {} labels to {}",
        movies.len(),
        ratings.len(),
        labels.len(),
        out.display()
    );
    Ok(())
}
