//! Evaluation on external benchmark data: PAutomaC-style perplexity and
//! anomaly-detection F1.
//!
//! PAutomaC files carry a `count alphabet` header and `length symbols...`
//! lines without a type label; solution files carry a count line followed by
//! one target probability per test trace. Anomaly test sets use the
//! Abbadingo format with type label 1 for anomalous and 0 for normal traces.

use std::path::Path;

use statemerge_core::inference::{is_anomaly, perplexity, smoothed_log_probability};
use statemerge_core::{parse_abbadingo, CoreError, ParseError, Pdfa, TraceSet};
use thiserror::Error;

use crate::config::RunConfig;
use crate::run::{learn, load_traces, RunError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("solution file: {0}")]
    Solution(String),
    #[error("perplexity: {0}")]
    Perplexity(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Parses a PAutomaC sample (no type labels).
pub fn parse_pautomac(text: &str) -> Result<TraceSet, ParseError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut labelled = String::with_capacity(text.len() + text.len() / 8);
    if let Some(header) = lines.next() {
        labelled.push_str(header);
        labelled.push('\n');
    }
    for line in lines {
        labelled.push_str("1 ");
        labelled.push_str(line.trim());
        labelled.push('\n');
    }
    parse_abbadingo(&labelled)
}

pub fn parse_solution(text: &str) -> Result<Vec<f64>, HarnessError> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| HarnessError::Solution("missing count".into()))?;
    let probs = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| HarnessError::Solution(format!("bad value {t}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if probs.len() != n {
        return Err(HarnessError::Solution(format!(
            "{n} declared, {} found",
            probs.len()
        )));
    }
    Ok(probs)
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_pautomac(path: &Path) -> Result<TraceSet, HarnessError> {
    parse_pautomac(&read(path)?).map_err(|source| HarnessError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Candidate probabilities of a learned model: Laplace smoothing with
/// correction 1 over the whole alphabet.
pub fn candidate_probabilities(pdfa: &Pdfa, test: &TraceSet) -> Vec<f64> {
    test.iter()
        .map(|t| smoothed_log_probability(pdfa, &t.symbols, 1.0).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerplexityReport {
    pub states: usize,
    pub perplexity: f64,
    /// Perplexity of the target itself, the best achievable score.
    pub optimum: f64,
}

pub fn pautomac_perplexity(
    cfg: &RunConfig,
    train: &Path,
    test: &Path,
    solution: &Path,
) -> Result<PerplexityReport, HarnessError> {
    let train = read_pautomac(train)?;
    let test = read_pautomac(test)?;
    let target = parse_solution(&read(solution)?)?;
    let pdfa = learn(cfg, &train, &mut std::io::sink())?;
    let candidate = candidate_probabilities(&pdfa, &test);
    Ok(PerplexityReport {
        states: pdfa.num_states(),
        perplexity: perplexity(&candidate, &target)?,
        optimum: perplexity(&target, &target)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
}

impl Confusion {
    pub fn f1(&self) -> f64 {
        let tp = self.true_positives as f64;
        let denom = 2.0 * tp + self.false_positives as f64 + self.false_negatives as f64;
        if denom == 0.0 {
            0.0
        } else {
            2.0 * tp / denom
        }
    }
}

/// Flags every test trace with [`is_anomaly`] and compares with the labels
/// (1 = anomalous).
pub fn anomaly_confusion(pdfa: &Pdfa, test: &TraceSet) -> Confusion {
    let mut c = Confusion::default();
    for t in test.iter() {
        let flagged = is_anomaly(pdfa, &t.symbols).is_some();
        match (flagged, t.type_label == 1) {
            (true, true) => c.true_positives += 1,
            (true, false) => c.false_positives += 1,
            (false, true) => c.false_negatives += 1,
            (false, false) => c.true_negatives += 1,
        }
    }
    c
}

pub fn anomaly_f1(cfg: &RunConfig, train: &Path, test: &Path) -> Result<Confusion, HarnessError> {
    let train = load_traces(train)?;
    let test = load_traces(test)?;
    let pdfa = learn(cfg, &train, &mut std::io::sink())?;
    Ok(anomaly_confusion(&pdfa, &test))
}
