//! Metamorphic testing of static analyzers: rule catalogs go in, seed
//! programs and semantically equivalent mutants are synthesized, and rules
//! whose detections disagree across a seed and its mutants come out.

pub mod build;
pub mod catalog;
pub mod gateway;
pub mod process;
pub mod prompts;
pub mod seed;
pub mod validation;
pub mod workspace;
pub mod mutation;
pub mod corpus;
pub mod analyzer;
pub mod evaluator;
pub mod config;
pub mod orchestrator;
