//! Reliable cross-network profile matching.
//!
//! The crate implements the full pipeline: corpus ingestion, attribute
//! similarity features, ACID property estimation with the recall/precision
//! identities as executable invariants, reliability-preserving evaluation
//! sampling, four classifier families, and the topmatch + confidence
//! abstention scheme for the at-most-one-match case. A synthetic two-network
//! generator with controllable ACID parameters makes every claim testable at
//! desk scale.

pub mod acid;
pub mod blocking;
pub mod classifiers;
pub mod corpus;
pub mod datagen;
pub mod eval;
pub mod features;
pub mod matcher;
pub mod phash;
pub mod rng;
pub mod sampling;
pub mod similarity;
