//! Emotion labels, emotion distributions and a lexicon-based text scorer.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const EMOTION_COUNT: usize = 7;

/// Sum tolerance for vectors read from 3-decimal data files.
pub const PARSED_TOLERANCE: f64 = 0.005;
/// Sum tolerance for vectors produced by arithmetic inside this crate.
pub const COMPUTED_TOLERANCE: f64 = 1e-9;

/// Mass added to `neutral` before normalizing a lexicon score.
pub const NEUTRAL_SMOOTHING: f64 = 1.0;

/// The seven mood classes, in canonical order.
///
/// The order is significant: it is the column order of every emotion table
/// and the tie-break order for [`dominant_mood`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Neutral,
    Joy,
    Sadness,
    Hate,
    Anger,
    Disgust,
    Surprise,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; EMOTION_COUNT] = [
        EmotionLabel::Neutral,
        EmotionLabel::Joy,
        EmotionLabel::Sadness,
        EmotionLabel::Hate,
        EmotionLabel::Anger,
        EmotionLabel::Disgust,
        EmotionLabel::Surprise,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            EmotionLabel::Neutral => "neutral",
            EmotionLabel::Joy => "joy",
            EmotionLabel::Sadness => "sadness",
            EmotionLabel::Hate => "hate",
            EmotionLabel::Anger => "anger",
            EmotionLabel::Disgust => "disgust",
            EmotionLabel::Surprise => "surprise",
        }
    }

    /// Parses a label name, accepting the `appy` and `sad` spellings used by
    /// some published tables.
    pub fn parse(s: &str) -> Option<Self> {
        let label = match s.trim().to_ascii_lowercase().as_str() {
            "neutral" => EmotionLabel::Neutral,
            "joy" | "appy" => EmotionLabel::Joy,
            "sadness" | "sad" => EmotionLabel::Sadness,
            "hate" => EmotionLabel::Hate,
            "anger" => EmotionLabel::Anger,
            "disgust" => EmotionLabel::Disgust,
            "surprise" => EmotionLabel::Surprise,
            _ => return None,
        };
        Some(label)
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmotionLabel::parse(s).ok_or_else(|| Error::Schema(format!("unknown emotion label {s:?}")))
    }
}

/// A probability distribution over [`EmotionLabel`]s.
///
/// Components are nonnegative and sum to one within the tolerance the vector
/// was validated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmotionComponents", into = "EmotionComponents")]
pub struct EmotionVector([f64; EMOTION_COUNT]);

impl EmotionVector {
    pub fn new(values: [f64; EMOTION_COUNT], tolerance: f64) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::validation(
                "emotion vector",
                format!("{} component is {}", EmotionLabel::ALL[i], values[i]),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::validation(
                "emotion vector",
                format!("components sum to {sum}, expected 1 within {tolerance}"),
            ));
        }
        Ok(EmotionVector(values))
    }

    pub fn from_parsed(values: [f64; EMOTION_COUNT]) -> Result<Self> {
        Self::new(values, PARSED_TOLERANCE)
    }

    pub fn from_computed(values: [f64; EMOTION_COUNT]) -> Result<Self> {
        Self::new(values, COMPUTED_TOLERANCE)
    }

    /// All mass on a single label.
    pub fn pure(label: EmotionLabel) -> Self {
        let mut values = [0.0; EMOTION_COUNT];
        values[label.index()] = 1.0;
        EmotionVector(values)
    }

    pub fn uniform() -> Self {
        EmotionVector([1.0 / EMOTION_COUNT as f64; EMOTION_COUNT])
    }

    pub fn values(&self) -> &[f64; EMOTION_COUNT] {
        &self.0
    }

    pub fn get(&self, label: EmotionLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn dominant(&self) -> EmotionLabel {
        dominant_mood(self)
    }
}

/// Named-field form used for (de)serialization.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct EmotionComponents {
    neutral: f64,
    #[serde(alias = "appy")]
    joy: f64,
    #[serde(alias = "sad")]
    sadness: f64,
    hate: f64,
    anger: f64,
    disgust: f64,
    surprise: f64,
}

impl From<EmotionVector> for EmotionComponents {
    fn from(v: EmotionVector) -> Self {
        let [neutral, joy, sadness, hate, anger, disgust, surprise] = v.0;
        EmotionComponents {
            neutral,
            joy,
            sadness,
            hate,
            anger,
            disgust,
            surprise,
        }
    }
}

impl TryFrom<EmotionComponents> for EmotionVector {
    type Error = Error;

    fn try_from(c: EmotionComponents) -> Result<Self> {
        EmotionVector::from_parsed([
            c.neutral, c.joy, c.sadness, c.hate, c.anger, c.disgust, c.surprise,
        ])
    }
}

/// Label of the largest component; the earliest label wins a tie.
pub fn dominant_mood(v: &EmotionVector) -> EmotionLabel {
    let mut best = 0;
    for (i, &x) in v.0.iter().enumerate().skip(1) {
        if x > v.0[best] {
            best = i;
        }
    }
    EmotionLabel::ALL[best]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "tau")]
pub enum OneHotMode {
    /// Only the dominant mood is set.
    Argmax,
    /// Every label whose probability is at least `tau` is set.
    Threshold(f64),
}

impl OneHotMode {
    pub fn validate(self) -> Result<Self> {
        match self {
            OneHotMode::Threshold(tau) if !(tau > 0.0 && tau < 1.0) => Err(Error::Config(format!(
                "threshold tau must lie in (0, 1), got {tau}"
            ))),
            mode => Ok(mode),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneHotEmotion {
    pub bits: [bool; EMOTION_COUNT],
    pub mode: OneHotMode,
}

impl OneHotEmotion {
    pub fn is_set(&self, label: EmotionLabel) -> bool {
        self.bits[label.index()]
    }

    pub fn labels(&self) -> Vec<EmotionLabel> {
        EmotionLabel::ALL
            .into_iter()
            .filter(|l| self.is_set(*l))
            .collect()
    }

    /// The bits as 0.0/1.0 features.
    pub fn to_features(&self) -> [f64; EMOTION_COUNT] {
        self.bits.map(|b| if b { 1.0 } else { 0.0 })
    }
}

pub fn to_onehot(v: &EmotionVector, mode: OneHotMode) -> Result<OneHotEmotion> {
    let mode = mode.validate()?;
    let mut bits = [false; EMOTION_COUNT];
    match mode {
        OneHotMode::Argmax => bits[dominant_mood(v).index()] = true,
        OneHotMode::Threshold(tau) => {
            for (bit, &x) in bits.iter_mut().zip(v.0.iter()) {
                *bit = x >= tau;
            }
        }
    }
    Ok(OneHotEmotion { bits, mode })
}

/// Componentwise arithmetic mean.
///
/// The mean of distributions is a distribution, so the result is validated
/// against the worst input deviation plus [`COMPUTED_TOLERANCE`].
pub fn mean_vectors(vs: &[EmotionVector]) -> Result<EmotionVector> {
    if vs.is_empty() {
        return Err(Error::Domain(
            "cannot average an empty list of emotion vectors".into(),
        ));
    }
    let mut acc = [0.0; EMOTION_COUNT];
    let mut worst = 0.0f64;
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v.0.iter()) {
            *a += x;
        }
        worst = worst.max((v.sum() - 1.0).abs());
    }
    let n = vs.len() as f64;
    EmotionVector::new(acc.map(|a| a / n), worst + COMPUTED_TOLERANCE)
}

/// Produces an emotion profile for a piece of text.
pub trait EmotionProvider {
    fn profile(&self, text: &str) -> EmotionVector;
}

/// Word → per-label weight table.
#[derive(Debug, Clone, Default)]
pub struct EmotionLexicon {
    entries: HashMap<String, [f64; EMOTION_COUNT]>,
}

impl EmotionLexicon {
    /// Builds a lexicon from `(word, label, weight)` triples. Repeated words
    /// accumulate weight across labels.
    pub fn from_entries<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, EmotionLabel, f64)>,
        S: AsRef<str>,
    {
        let mut map: HashMap<String, [f64; EMOTION_COUNT]> = HashMap::new();
        for (word, label, weight) in entries {
            let word = word.as_ref().trim().to_lowercase();
            if word.is_empty() || !word.chars().all(char::is_alphabetic) {
                return Err(Error::validation(
                    "lexicon",
                    format!("entry {word:?} is not a single alphabetic word"),
                ));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::validation(
                    "lexicon",
                    format!("entry {word:?} has non-positive weight {weight}"),
                ));
            }
            map.entry(word).or_insert([0.0; EMOTION_COUNT])[label.index()] += weight;
        }
        if map.is_empty() {
            return Err(Error::Domain("lexicon is empty".into()));
        }
        Ok(EmotionLexicon { entries: map })
    }

    /// Reads a `word,label,weight` file. A leading header line is allowed.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(file);
        let mut triples = Vec::new();
        for row in reader.records() {
            let row = row.map_err(|e| Error::parse(path, csv_line(&e), e.to_string()))?;
            let line = row.position().map_or(0, |p| p.line());
            if row.len() != 3 {
                return Err(Error::parse(path, line, format!("expected 3 fields, found {}", row.len())));
            }
            if line == 1 && row[0].eq_ignore_ascii_case("word") {
                continue;
            }
            let label = EmotionLabel::parse(&row[1])
                .ok_or_else(|| Error::parse(path, line, format!("unknown emotion label {:?}", &row[1])))?;
            let weight: f64 = row[2]
                .parse()
                .map_err(|_| Error::parse(path, line, format!("invalid weight {:?}", &row[2])))?;
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::parse(path, line, format!("weight must be positive, got {weight}")));
            }
            triples.push((row[0].to_string(), label, weight));
        }
        Self::from_entries(triples)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weights(&self, word: &str) -> Option<&[f64; EMOTION_COUNT]> {
        self.entries.get(word)
    }
}

impl EmotionProvider for EmotionLexicon {
    fn profile(&self, text: &str) -> EmotionVector {
        lexicon_score(text, self)
    }
}

/// Lowercased maximal runs of alphabetic characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Scores `text` by summing lexicon weights of its tokens, adding
/// [`NEUTRAL_SMOOTHING`] to neutral and normalizing.
pub fn lexicon_score(text: &str, lex: &EmotionLexicon) -> EmotionVector {
    let mut acc = [0.0; EMOTION_COUNT];
    acc[EmotionLabel::Neutral.index()] = NEUTRAL_SMOOTHING;
    for token in tokenize(text) {
        if let Some(w) = lex.weights(&token) {
            for (a, x) in acc.iter_mut().zip(w.iter()) {
                *a += x;
            }
        }
    }
    let total: f64 = acc.iter().sum();
    EmotionVector(acc.map(|a| a / total))
}

pub(crate) fn csv_line(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Table rows: neutral, joy, sadness, hate, anger, disgust, surprise.
    const ROWS: [[f64; 7]; 5] = [
        [0.157, 0.086, 0.156, 0.075, 0.085, 0.266, 0.175],
        [0.121, 0.060, 0.098, 0.128, 0.133, 0.244, 0.216],
        [0.075, 0.114, 0.054, 0.433, 0.095, 0.128, 0.100],
        [0.299, 0.262, 0.079, 0.030, 0.017, 0.083, 0.230],
        [0.150, 0.080, 0.055, 0.083, 0.103, 0.153, 0.376],
    ];

    fn row(i: usize) -> EmotionVector {
        EmotionVector::from_parsed(ROWS[i]).unwrap()
    }

    #[test]
    fn label_order_and_aliases() {
        let names: Vec<_> = EmotionLabel::ALL.iter().map(|l| l.name()).collect();
        assert_eq!(
            names,
            ["neutral", "joy", "sadness", "hate", "anger", "disgust", "surprise"]
        );
        assert_eq!(EmotionLabel::parse("appy"), Some(EmotionLabel::Joy));
        assert_eq!(EmotionLabel::parse("SAD"), Some(EmotionLabel::Sadness));
        assert_eq!(EmotionLabel::parse("fear"), None);
    }

    #[test]
    fn dominant_mood_matches_published_rows() {
        let moods = [
            EmotionLabel::Disgust,
            EmotionLabel::Disgust,
            EmotionLabel::Hate,
            EmotionLabel::Neutral,
            EmotionLabel::Surprise,
        ];
        for (i, mood) in moods.iter().enumerate() {
            assert_eq!(dominant_mood(&row(i)), *mood, "row {}", i + 1);
        }
    }

    #[test]
    fn uniform_ties_resolve_to_neutral() {
        assert_eq!(dominant_mood(&EmotionVector::uniform()), EmotionLabel::Neutral);
    }

    #[test]
    fn rejects_bad_sums_and_negatives() {
        assert!(EmotionVector::from_parsed([0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(EmotionVector::from_parsed([1.1, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
        assert!(EmotionVector::from_computed(ROWS[2]).is_err());
        assert!(EmotionVector::from_parsed(ROWS[2]).is_ok());
    }

    #[test]
    fn onehot_argmax_and_threshold() {
        let oh = to_onehot(&row(2), OneHotMode::Argmax).unwrap();
        assert_eq!(oh.labels(), vec![EmotionLabel::Hate]);

        let oh = to_onehot(&row(0), OneHotMode::Threshold(0.2)).unwrap();
        assert_eq!(oh.labels(), vec![EmotionLabel::Disgust]);

        let oh = to_onehot(&EmotionVector::uniform(), OneHotMode::Threshold(0.2)).unwrap();
        assert!(oh.labels().is_empty());
    }

    #[test]
    fn onehot_rejects_bad_tau() {
        for tau in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(matches!(
                to_onehot(&row(0), OneHotMode::Threshold(tau)),
                Err(Error::Config(_))
            ));
        }
    }

    #[test]
    fn mean_of_published_rows() {
        let m = mean_vectors(&[row(0), row(1)]).unwrap();
        let expected = [0.139, 0.073, 0.127, 0.1015, 0.109, 0.255, 0.1955];
        for (got, want) in m.values().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(mean_vectors(&[row(3)]).unwrap(), row(3));
        assert!(matches!(mean_vectors(&[]), Err(Error::Domain(_))));
    }

    fn test_lexicon() -> EmotionLexicon {
        EmotionLexicon::from_entries([
            ("love", EmotionLabel::Joy, 1.0),
            ("murder", EmotionLabel::Hate, 2.0),
            ("murder", EmotionLabel::Anger, 0.5),
            ("tears", EmotionLabel::Sadness, 1.5),
            ("shock", EmotionLabel::Surprise, 0.75),
        ])
        .unwrap()
    }

    #[test]
    fn lexicon_score_empty_text_is_neutral() {
        let v = lexicon_score("", &test_lexicon());
        assert_eq!(v, EmotionVector::pure(EmotionLabel::Neutral));
    }

    #[test]
    fn lexicon_score_single_joy_word() {
        let lex = EmotionLexicon::from_entries([("sunshine", EmotionLabel::Joy, 1.0)]).unwrap();
        let v = lexicon_score("Sunshine!", &lex);
        assert_eq!(v.get(EmotionLabel::Neutral), 0.5);
        assert_eq!(v.get(EmotionLabel::Joy), 0.5);
    }

    #[test]
    fn lexicon_score_matches_token_count_oracle() {
        // Oracle: count each lexicon word's occurrences, multiply by weights.
        let lex = test_lexicon();
        let text = "Murder, LOVE and murder";
        // murder x2 -> hate 4.0, anger 1.0; love x1 -> joy 1.0; neutral 1.0
        let total = 1.0 + 1.0 + 4.0 + 1.0;
        let want = [1.0 / total, 1.0 / total, 0.0, 4.0 / total, 1.0 / total, 0.0, 0.0];
        let got = lexicon_score(text, &lex);
        for (g, w) in got.values().iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn lexicon_rejects_empty_and_bad_weights() {
        let none: Vec<(&str, EmotionLabel, f64)> = vec![];
        assert!(EmotionLexicon::from_entries(none).is_err());
        assert!(EmotionLexicon::from_entries([("x", EmotionLabel::Joy, -1.0)]).is_err());
        assert!(EmotionLexicon::from_entries([("two words", EmotionLabel::Joy, 1.0)]).is_err());
    }

    #[test]
    fn lexicon_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.csv");
        std::fs::write(&path, "word,label,weight\nlove,joy,1.0\nrage,anger,2\nsob,sad,0.5\n").unwrap();
        let lex = EmotionLexicon::load(&path).unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.weights("sob").unwrap()[EmotionLabel::Sadness.index()], 0.5);

        std::fs::write(&path, "love,joy,1.0\nrage,fear,2\n").unwrap();
        match EmotionLexicon::load(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serde_uses_label_names() {
        let json = serde_json::to_string(&row(0)).unwrap();
        assert!(json.starts_with("{\"neutral\":0.157,\"joy\":0.086"));
        let back: EmotionVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, row(0));
        let bad = r#"{"neutral":0.5,"joy":0.1,"sadness":0,"hate":0,"anger":0,"disgust":0,"surprise":0}"#;
        assert!(serde_json::from_str::<EmotionVector>(bad).is_err());
    }

    pub(crate) fn simplex() -> impl Strategy<Value = EmotionVector> {
        prop::array::uniform7(0.0f64..1.0).prop_filter_map("nonzero mass", |raw| {
            let s: f64 = raw.iter().sum();
            (s > 1e-6).then(|| EmotionVector::from_computed(raw.map(|x| x / s)).unwrap())
        })
    }

    proptest! {
        #[test]
        fn argmax_sets_exactly_the_dominant_bit(v in simplex()) {
            let oh = to_onehot(&v, OneHotMode::Argmax).unwrap();
            prop_assert_eq!(oh.labels(), vec![dominant_mood(&v)]);
        }

        #[test]
        fn threshold_bits_follow_tau(v in simplex(), tau in 0.01f64..0.99) {
            let oh = to_onehot(&v, OneHotMode::Threshold(tau)).unwrap();
            for l in EmotionLabel::ALL {
                prop_assert_eq!(oh.is_set(l), v.get(l) >= tau);
            }
        }

        #[test]
        fn mean_stays_on_simplex_and_ignores_order(vs in prop::collection::vec(simplex(), 1..12)) {
            let m = mean_vectors(&vs).unwrap();
            prop_assert!((m.sum() - 1.0).abs() <= COMPUTED_TOLERANCE);
            prop_assert!(m.values().iter().all(|x| *x >= 0.0));
            let mut rev = vs.clone();
            rev.reverse();
            let r = mean_vectors(&rev).unwrap();
            for (a, b) in m.values().iter().zip(r.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn lexicon_score_is_a_distribution(text in "[a-zA-Z ,.!]{0,80}") {
            let lex = test_lexicon();
            let v = lexicon_score(&text, &lex);
            prop_assert!((v.sum() - 1.0).abs() <= COMPUTED_TOLERANCE);
            prop_assert_eq!(v, lexicon_score(&text, &lex));
        }
    }
}
