//! Learning probabilistic deterministic finite automata (PDFAs) by red-blue
//! state merging.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the whole learning
//! pipeline:
//!
//! * [`trace`] parses and writes Abbadingo-formatted samples.
//! * [`apta`] builds the augmented prefix tree with its union/find
//!   representatives and occurrence counts.
//! * [`merge`] performs and undoes merges, including the determinization
//!   cascade, and keeps an exact undo log.
//! * [`eval`] holds the pluggable evaluation functions (Alergia,
//!   likelihood-ratio, MDI, AIC) and their shared statistics.
//! * [`redblue`] runs the greedy red-blue loop, [`search`] a beam search
//!   minimizing AIC.
//! * [`pdfa`] and [`inference`] turn the learned tree into a model and use it
//!   for scoring, perplexity and anomaly detection.
//!
//! File formats, configuration and the command line live in the companion
//! `statemerge` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod apta;
pub mod error;
pub mod eval;
pub mod inference;
pub mod merge;
pub mod params;
pub mod pdfa;
pub mod redblue;
pub mod search;
pub mod trace;

mod fnv;

pub use apta::{Apta, Color, Counts, NodeId};
pub use error::{CoreError, ParseError};
pub use eval::{evaluation_by_name, Evaluation, EVALUATION_NAMES};
pub use merge::{merge, undo_merge, MergeLog, MergeOutcome};
pub use params::{EvalParams, Mode};
pub use pdfa::{Pdfa, PdfaState, StateId, Transition};
pub use redblue::{greedy_run, Action, Progress};
pub use search::best_first_search;
pub use trace::{parse_abbadingo, write_abbadingo, Trace, TraceSet};
