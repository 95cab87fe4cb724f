//! Inner product, cosine similarity and deterministic top-k selection.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, MovieId, Result};

fn check_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// `Σ xᵢyᵢ`, accumulated left to right.
pub fn inner(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(dot_unchecked(x, y))
}

pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0, |acc, (a, b)| acc + a * b)
}

pub fn norm(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

/// `⟨x, y⟩ / (‖x‖ ‖y‖)`. Zero when either vector has zero norm.
pub fn cosine(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len(x, y)?;
    Ok(cosine_from_parts(dot_unchecked(x, y), norm(x), norm(y)))
}

/// Cosine from a precomputed dot product and norms, with the zero-norm rule.
pub fn cosine_from_parts(dot: f64, norm_x: f64, norm_y: f64) -> f64 {
    if norm_x == 0.0 || norm_y == 0.0 {
        0.0
    } else {
        dot / (norm_x * norm_y)
    }
}

/// An id with a ranking score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scored<Id> {
    #[serde(rename = "item_id")]
    pub id: Id,
    pub score: f64,
}

pub type ScoredItem = Scored<MovieId>;

impl<Id> Scored<Id> {
    pub fn new(id: Id, score: f64) -> Self {
        Scored { id, score }
    }
}

/// Descending score, then ascending id.
pub fn rank_order<Id: Ord>(a: &Scored<Id>, b: &Scored<Id>) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.id.cmp(&b.id))
}

/// The `k` best candidates by [`rank_order`]; all of them if fewer than `k`.
pub fn top_k<Id: Ord>(mut candidates: Vec<Scored<Id>>, k: usize) -> Vec<Scored<Id>> {
    debug_assert!(
        candidates.iter().all(|c| c.score.is_finite()),
        "non-finite score"
    );
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k, rank_order);
        candidates.truncate(k);
    }
    candidates.sort_by(rank_order);
    candidates
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(id: u32, score: f64) -> ScoredItem {
        Scored::new(MovieId(id), score)
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(inner(&[1.0, 2.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            inner(&[1.0], &[1.0, 2.0]),
            Err(Error::Dimension { expected: 1, actual: 2 })
        ));
    }

    #[test]
    fn inner_of_two_published_rows() {
        let a = [0.157, 0.086, 0.156, 0.075, 0.085, 0.266, 0.175];
        let b = [0.121, 0.060, 0.098, 0.128, 0.133, 0.244, 0.216];
        let mut want = 0.0;
        for i in 0..7 {
            want += a[i] * b[i];
        }
        assert_abs_diff_eq!(inner(&a, &b).unwrap(), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, 0.163054, epsilon = 1e-12);
    }

    #[test]
    fn cosine_examples() {
        assert_abs_diff_eq!(cosine(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(cosine(&[1.0, 1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[]).is_err());
    }

    #[test]
    fn top_k_orders_and_truncates() {
        let out = top_k(vec![s(1, 0.2), s(2, 0.9), s(3, 0.5)], 2);
        assert_eq!(out, vec![s(2, 0.9), s(3, 0.5)]);

        let out = top_k(vec![s(4, 0.7), s(2, 0.7), s(9, 0.7), s(1, 0.7)], 4);
        let ids: Vec<u32> = out.iter().map(|x| x.id.0).collect();
        assert_eq!(ids, vec![1, 2, 4, 9]);

        assert_eq!(top_k(vec![s(1, 0.1)], 5).len(), 1);
        assert!(top_k(Vec::<ScoredItem>::new(), 3).is_empty());
    }

    #[test]
    fn top_k_matches_full_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            // coarse scores so ties actually occur
            let items: Vec<ScoredItem> = (0..50)
                .map(|i| s(i + 1, (rng.random_range(0..10) as f64) / 10.0))
                .collect();
            let mut oracle = items.clone();
            oracle.sort_by(|a, b| {
                if a.score != b.score {
                    b.score.partial_cmp(&a.score).unwrap()
                } else {
                    a.id.cmp(&b.id)
                }
            });
            oracle.truncate(20);
            assert_eq!(top_k(items, 20), oracle);
        }
    }

    fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-10.0f64..10.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
            )
        })
    }

    fn unit_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(-1.0f64..1.0, n),
                prop::collection::vec(-1.0f64..1.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_bounded((x, y) in vec_pair()) {
            let a = cosine(&x, &y).unwrap();
            prop_assert_eq!(a, cosine(&y, &x).unwrap());
            prop_assert!(a.abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn cosine_positive_scale_invariant((x, y) in vec_pair(), alpha in 0.01f64..100.0) {
            let scaled: Vec<f64> = x.iter().map(|v| v * alpha).collect();
            let a = cosine(&x, &y).unwrap();
            let b = cosine(&scaled, &y).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn inner_is_additive((x, y) in unit_pair(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<f64> = x.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
            let yz: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
            let lhs = inner(&x, &yz).unwrap();
            let rhs = inner(&x, &y).unwrap() + inner(&x, &z).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn top_k_is_sorted_subset(scores in prop::collection::vec(0.0f64..1.0, 0..60), k in 1usize..30) {
            let items: Vec<ScoredItem> = scores.iter().enumerate().map(|(i, v)| s(i as u32 + 1, *v)).collect();
            let out = top_k(items.clone(), k);
            prop_assert_eq!(out.len(), k.min(items.len()));
            prop_assert!(out.windows(2).all(|w| w[0].score >= w[1].score));
            prop_assert!(out.iter().all(|o| items.contains(o)));
        }
    }
}
