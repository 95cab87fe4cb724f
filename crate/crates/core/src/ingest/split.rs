use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::RatingRecord;
use crate::{Error, MovieId, Result, UserId};

/// Training ratings plus the active user's held-out ("unseen") ratings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTestSplit {
    pub user_id: UserId,
    pub train: Vec<RatingRecord>,
    pub test: Vec<RatingRecord>,
}

impl TrainTestSplit {
    pub fn unseen_movies(&self) -> Vec<MovieId> {
        self.test.iter().map(|r| r.movie_id).collect()
    }
}

/// Collects `user_id`'s rows from `extra`, dropping pairs already present in
/// `train` and repeated pairs (the first occurrence is kept).
pub fn build_test_split(
    train: &[RatingRecord],
    extra: &[RatingRecord],
    user_id: UserId,
) -> Result<TrainTestSplit> {
    if !train.iter().any(|r| r.user_id == user_id) {
        return Err(Error::Domain(format!(
            "user {user_id} has no ratings in the training set"
        )));
    }
    let mut seen: HashSet<(UserId, MovieId)> =
        train.iter().map(|r| (r.user_id, r.movie_id)).collect();
    let test = extra
        .iter()
        .filter(|r| r.user_id == user_id && seen.insert((r.user_id, r.movie_id)))
        .copied()
        .collect();
    Ok(TrainTestSplit {
        user_id,
        train: train.to_vec(),
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn r(u: u32, m: u32) -> RatingRecord {
        RatingRecord::new(u, m, 4.0, 0)
    }

    #[test]
    fn identical_extra_gives_empty_test() {
        let train = vec![r(400, 1), r(400, 2), r(1, 3)];
        let split = build_test_split(&train, &train, UserId(400)).unwrap();
        assert!(split.test.is_empty());
        assert_eq!(split.train, train);
    }

    #[test]
    fn disjoint_extra_with_duplicate() {
        let train = vec![r(400, 1)];
        let extra = vec![r(400, 10), r(400, 11), r(400, 10), r(2, 12), r(400, 13)];
        let split = build_test_split(&train, &extra, UserId(400)).unwrap();
        // set-difference oracle: unique (400, m) in extra minus train
        let oracle: BTreeSet<u32> = extra
            .iter()
            .filter(|x| x.user_id == UserId(400))
            .map(|x| x.movie_id.0)
            .filter(|m| !train.iter().any(|t| t.movie_id.0 == *m))
            .collect();
        assert_eq!(split.test.len(), oracle.len());
        assert_eq!(split.unseen_movies(), vec![MovieId(10), MovieId(11), MovieId(13)]);
    }

    #[test]
    fn user_without_extra_rows() {
        let train = vec![r(400, 1)];
        let split = build_test_split(&train, &[r(5, 9)], UserId(400)).unwrap();
        assert!(split.test.is_empty());
    }

    #[test]
    fn user_absent_from_train_is_an_error() {
        assert!(matches!(
            build_test_split(&[r(1, 1)], &[r(400, 1)], UserId(400)),
            Err(Error::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn split_is_disjoint_and_duplicate_free(
            train in prop::collection::vec((1u32..4, 1u32..20), 1..30),
            extra in prop::collection::vec((1u32..4, 1u32..20), 0..40),
        ) {
            let train: Vec<_> = train.into_iter().map(|(u, m)| r(u, m)).collect();
            let extra: Vec<_> = extra.into_iter().map(|(u, m)| r(u, m)).collect();
            let user = train[0].user_id;
            let split = build_test_split(&train, &extra, user).unwrap();
            let train_keys: HashSet<_> = split.train.iter().map(|x| (x.user_id, x.movie_id)).collect();
            let mut test_keys = HashSet::new();
            for t in &split.test {
                prop_assert_eq!(t.user_id, user);
                prop_assert!(!train_keys.contains(&(t.user_id, t.movie_id)));
                prop_assert!(test_keys.insert(t.movie_id));
            }
        }
    }
}
