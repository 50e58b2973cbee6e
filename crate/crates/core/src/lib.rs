//! Blocking for entity resolution: schema-aware Attribute Clustering,
//! hierarchical Dynamic blocking, and an ensemble that keeps every Dynamic
//! pair and adds only the pairs AC alone found.
//!
//! The usual flow is [`ingest::load_profiles`], [`corpus::Corpus::prepare`],
//! then [`ac::run`], [`dynamic::run`] or [`ensemble::run`], and finally the
//! metrics in [`eval`].

pub mod ac;
pub mod bench;
pub mod config;
pub mod corpus;
pub mod datagen;
pub mod dynamic;
pub mod ensemble;
pub mod eval;
pub mod exec;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod normalize;
pub mod oracle;
pub mod testkit;

pub use ac::{AcConfig, AcMode};
pub use corpus::Corpus;
pub use dynamic::{DynConfig, NameKeyMode};
pub use ensemble::{EnsembleResult, PairSource};
pub use model::{CandidatePairSet, GoldStandard, IdPair, Profile, ProfileId, Schema};
pub use normalize::NormalizationConfig;
