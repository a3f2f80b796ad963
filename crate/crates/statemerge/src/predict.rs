//! Prediction CSV: one `[states]; [scores]` row per trace.

use std::fmt::Write;

use statemerge_core::inference::PredictionRecord;
use thiserror::Error;

use crate::fmt::format_g;

pub const PREDICTIONS_HEADER: &str = "state sequence; score sequence";

/// Renders records under the header line. States that were never reached
/// (after a missing transition) print as `-1`.
pub fn write_predictions(records: &[PredictionRecord]) -> String {
    let mut out = String::from(PREDICTIONS_HEADER);
    out.push('\n');
    for r in records {
        out.push('[');
        for (i, s) in r.states.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            match s {
                Some(id) => {
                    let _ = write!(out, "{id}");
                }
                None => out.push_str("-1"),
            }
        }
        out.push_str("]; [");
        for (i, v) in r.scores.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format_g(*v));
        }
        out.push_str("]\n");
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictionsError {
    #[error("missing header line")]
    Header,
    #[error("line {0}: malformed row")]
    Row(usize),
}

fn bracketed(s: &str) -> Option<Vec<&str>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    if inner.is_empty() {
        Some(Vec::new())
    } else {
        Some(inner.split(',').collect())
    }
}

/// Parses a prediction CSV back into `(states, scores)` rows.
#[allow(clippy::type_complexity)]
pub fn parse_predictions(
    text: &str,
) -> Result<Vec<(Vec<Option<u32>>, Vec<f64>)>, PredictionsError> {
    let mut lines = text.lines();
    if lines.next() != Some(PREDICTIONS_HEADER) {
        return Err(PredictionsError::Header);
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let err = || PredictionsError::Row(line_no);
        let (states, scores) = line.split_once(';').ok_or_else(err)?;
        let states = bracketed(states)
            .ok_or_else(err)?
            .into_iter()
            .map(|s| match s.trim() {
                "-1" => Ok(None),
                s => s.parse().map(Some).map_err(|_| err()),
            })
            .collect::<Result<_, _>>()?;
        let scores = bracketed(scores)
            .ok_or_else(err)?
            .into_iter()
            .map(|s| s.trim().parse::<f64>().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        rows.push((states, scores));
    }
    Ok(rows)
}
