//! Emotion-aware movie recommendation.
//!
//! A comparative platform of five recommenders that all rank by cosine
//! similarity:
//!
//! * item-based and user-based collaborative filtering over a sparse rating
//!   matrix ([`cf`]),
//! * genre, emotion and multi-channel (emotion + genre) content-based
//!   recommenders ([`content`]).
//!
//! Movies carry a seven-way emotion distribution ([`emotion::EmotionVector`]);
//! users get a profile that averages the vectors of everything they watched
//! ([`profile`]), which is then used to rerank a top-20 list down to a top-5.

pub mod cf;
pub mod content;
pub mod emotion;
mod error;
pub mod evaluation;
mod ids;
pub mod ingest;
pub mod lists;
pub mod profile;
pub mod similarity;

pub use error::{Error, Result};
pub use ids::{MovieId, UserId};
