//! File formats, configuration, and the command line around
//! [`statemerge_core`].
//!
//! * [`dot`] and [`model`] export learned automata; [`model`] also imports
//!   them for prediction.
//! * [`predict`] writes and re-reads prediction CSVs.
//! * [`config`] merges ini files with flag overrides into a [`RunConfig`].
//! * [`run`] drives batch, search and predict runs.
//! * [`synth`] generates random target automata for experiments, [`harness`]
//!   scores models on external benchmark data.

pub mod config;
pub mod dot;
pub mod fmt;
pub mod harness;
pub mod model;
pub mod predict;
pub mod run;
pub mod synth;

#[cfg(test)]
mod testutil;

pub use config::{load_config, ConfigError, RunConfig};
pub use dot::export_dot;
pub use model::{export_model, import_model, ModelDocument, ModelError};
pub use predict::{parse_predictions, write_predictions};
pub use run::{run, RunError};
pub use statemerge_core;
