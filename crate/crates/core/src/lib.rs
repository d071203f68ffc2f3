//! Measures how lexical and syntactic text features react to random word
//! deletion, and how those changes affect binary text classification.
//!
//! The crate covers the whole analysis: corpus ingestion and subject-aware
//! folds ([`corpus`]), seeded deletions ([`perturb`]), lexical and
//! syntactic feature extraction ([`lexfeat`], [`synfeat`], [`treepat`]),
//! classifiers and cross-validation ([`models`]), vulnerability statistics
//! ([`stats`]), and the batch pipeline with its reports ([`pipeline`],
//! [`report`]).

pub mod corpus;
pub mod features;
pub mod lexfeat;
pub mod models;
pub mod perturb;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synfeat;
pub mod synth;
pub mod treepat;
mod util;

pub use features::{FeatureGroup, FeatureTable, FeatureVector};
