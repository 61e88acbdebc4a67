//! De-identification toolkit for clinical free text.
//!
//! The crate provides:
//!
//! * [`corpus`] — document model, deterministic tokenizer, BIO
//!   encoding/repair, standoff and JSONL I/O, corpus splitting;
//! * [`rules`] — an unsupervised rule-based PHI tagger (lookup tables,
//!   decision rules, fuzzy matching) plus tag-set reconciliation;
//! * [`crf`] — feature extraction and a from-scratch linear-chain CRF
//!   with orthant-wise LBFGS training and random hyperparameter search;
//! * [`eval`] — entity-level precision/recall/F1, inter-annotator
//!   agreement, approximate-randomization significance testing and
//!   learning curves;
//! * [`surrogate`] — replacement of PHI with realistic artificial
//!   values (date shifting, character-class substitution, name pools)
//!   with full offset remapping;
//! * [`synth`] — a deterministic synthetic-corpus generator for
//!   desk-scale end-to-end experiments.
//!
//! The `deid` binary wires these together into a pipeline CLI.

pub mod corpus;
pub mod nl;
pub mod rules;
pub mod crf;
pub mod error;
pub mod eval;

pub use error::{DeidError, Result};
