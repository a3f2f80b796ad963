//! The greedy red-blue merging loop.
//!
//! Red states are the identified part of the automaton, blue states are the
//! non-red targets of red transitions. Each iteration tries merging blue
//! candidates into red states (and, with `blueblue`, into other blue states),
//! performs the highest-scoring consistent merge, or otherwise promotes a blue
//! state to red.

use alloc::vec::Vec;

use crate::apta::{Apta, Color, NodeId};
use crate::eval::Evaluation;
use crate::merge::{merge, undo_merge};
use crate::params::EvalParams;
use crate::pdfa::Pdfa;
use crate::trace::TraceSet;

/// One step of the learner, as reported to a [`Progress`] sink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    /// `node` was colored red; it had `frequency` occurrences.
    Extend { node: NodeId, frequency: u64 },
    /// `blue` was merged into `target`.
    Merge {
        target: NodeId,
        blue: NodeId,
        score: f64,
    },
}

impl Action {
    pub fn is_extend(&self) -> bool {
        matches!(self, Action::Extend { .. })
    }
}

pub trait Progress {
    fn action(&mut self, action: &Action);

    fn finished(&mut self) {}
}

impl Progress for () {
    fn action(&mut self, _: &Action) {}
}

impl Progress for Vec<Action> {
    fn action(&mut self, action: &Action) {
        self.push(*action);
    }
}

/// A candidate merge of `blue` into `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    /// False for red-blue pairs, so they sort before blue-blue pairs.
    pub blue_blue: bool,
    pub blue: NodeId,
    pub target: NodeId,
}

/// True when sinks are on and `q` was reached fewer than `sink_count` times.
pub fn is_sink(apta: &Apta, q: NodeId, params: &EvalParams) -> bool {
    params.sinkson && apta.counts(q).path < params.sink_count
}

/// Non-sink blue states in the active order. With `largestblue` or
/// `shallowfirst` only the single first state is returned.
pub fn blue_order(apta: &Apta, params: &EvalParams) -> Vec<NodeId> {
    let mut blues: Vec<NodeId> = apta
        .blue_states()
        .into_iter()
        .filter(|&b| !is_sink(apta, b, params))
        .collect();
    if params.largestblue {
        blues.sort_by_key(|&b| (core::cmp::Reverse(apta.counts(b).path), b));
        blues.truncate(1);
    } else if params.shallowfirst {
        blues.sort_by_key(|&b| (apta.node(b).depth, b));
        blues.truncate(1);
    }
    blues
}

/// Merge pairs to evaluate this iteration: every considered blue state
/// against every red state, then, with `blueblue`, against the other blue
/// states.
pub fn candidate_order(apta: &Apta, params: &EvalParams) -> Vec<Candidate> {
    let blues = blue_order(apta, params);
    let reds = apta.red_states();
    let mut out = Vec::with_capacity(blues.len() * reds.len());
    for &blue in &blues {
        for &target in &reds {
            out.push(Candidate {
                blue_blue: false,
                blue,
                target,
            });
        }
    }
    if params.blueblue {
        let all_blues: Vec<NodeId> = apta
            .blue_states()
            .into_iter()
            .filter(|&b| !is_sink(apta, b, params))
            .collect();
        for &blue in &blues {
            for &target in all_blues.iter().filter(|&&t| t != blue) {
                out.push(Candidate {
                    blue_blue: true,
                    blue,
                    target,
                });
            }
        }
    }
    out
}

/// Colors `blue` red and refreshes the fringe.
pub fn extend(apta: &mut Apta, blue: NodeId) -> Action {
    let frequency = apta.counts(blue).path;
    apta.set_color(blue, Color::Red);
    apta.recolor();
    Action::Extend {
        node: blue,
        frequency,
    }
}

/// Evaluates every candidate and returns the best consistent one with its
/// score. Leaves the tree unchanged.
pub fn best_merge(
    apta: &mut Apta,
    candidates: &[Candidate],
    eval: &mut dyn Evaluation,
    params: &EvalParams,
) -> Option<(Candidate, f64)> {
    let mut best: Option<(Candidate, f64)> = None;
    for &c in candidates {
        let mut out = merge(apta, c.target, c.blue, eval, params);
        if !out.consistent {
            continue;
        }
        undo_merge(apta, &mut out.log);
        if best.is_none_or(|(_, s)| out.score > s) {
            best = Some((c, out.score));
        }
    }
    best
}

/// Runs the greedy loop on an existing tree until no non-sink blue state is
/// left (or, without `extend`, until no consistent merge exists).
pub fn run_greedy(
    apta: &mut Apta,
    eval: &mut dyn Evaluation,
    params: &EvalParams,
    progress: &mut dyn Progress,
) {
    loop {
        let candidates = candidate_order(apta, params);
        if candidates.is_empty() {
            break;
        }
        match best_merge(apta, &candidates, eval, params) {
            Some((c, _)) => {
                let out = merge(apta, c.target, c.blue, eval, params);
                debug_assert!(out.consistent);
                apta.recolor();
                progress.action(&Action::Merge {
                    target: c.target,
                    blue: c.blue,
                    score: out.score,
                });
            }
            None if params.extend => {
                let blue = candidates[0].blue;
                let action = extend(apta, blue);
                progress.action(&action);
            }
            None => break,
        }
    }
    progress.finished();
}

/// Builds the prefix tree of `ts`, merges greedily, and extracts the model.
pub fn greedy_run(
    ts: &TraceSet,
    eval: &mut dyn Evaluation,
    params: &EvalParams,
    progress: &mut dyn Progress,
) -> Pdfa {
    let mut apta = Apta::build(ts);
    apta.prepare_reference_weights(params.finalprob);
    run_greedy(&mut apta, eval, params, progress);
    Pdfa::from_apta(&apta, params)
}
