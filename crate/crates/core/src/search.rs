//! Beam search over merge sequences, minimizing the AIC of the final model.
//!
//! The search proceeds in layers. Every partial path in the beam is expanded
//! into its consistent merges (as judged by the supplied evaluation function)
//! plus one extension of the first blue state; the `beam_width` best children
//! by current AIC form the next layer. A path without candidates is complete.
//! Only one tree is kept in memory: moving between paths undoes merges back to
//! the common prefix and re-applies the rest.
//!
//! The greedy path is always scored too, so the result is never worse than
//! the greedy learner with the same evaluation function.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::apta::{Apta, Color, NodeId};
use crate::eval::{model_aic, Evaluation};
use crate::merge::{merge, undo_merge, MergeLog};
use crate::params::EvalParams;
use crate::pdfa::Pdfa;
use crate::redblue::{best_merge, candidate_order, Action, Candidate, Progress};
use crate::trace::TraceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SearchAction {
    Merge(Candidate),
    Extend(NodeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode {
    pub path: Vec<SearchAction>,
    /// AIC of the model after applying `path`.
    pub aic: f64,
}

impl SearchNode {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    fn rank(&self, other: &SearchNode) -> Ordering {
        self.aic
            .total_cmp(&other.aic)
            .then(self.path.len().cmp(&other.path.len()))
            .then_with(|| self.path.cmp(&other.path))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: SearchNode,
    pub apta: Apta,
}

struct Applied {
    action: SearchAction,
    log: MergeLog,
    /// Colors changed by the action, with their previous value.
    colors: Vec<(NodeId, Color)>,
}

/// A prefix tree positioned at some path, able to move to any other path.
struct Walker<'a> {
    apta: Apta,
    eval: &'a mut dyn Evaluation,
    params: &'a EvalParams,
    applied: Vec<Applied>,
}

impl Walker<'_> {
    fn colors(&self) -> Vec<Color> {
        self.apta.nodes.iter().map(|n| n.color).collect()
    }

    fn apply(&mut self, action: SearchAction, progress: &mut dyn Progress) {
        let before = self.colors();
        let (log, reported) = match action {
            SearchAction::Merge(c) => {
                let out = merge(&mut self.apta, c.target, c.blue, self.eval, self.params);
                assert!(out.consistent, "replayed merge became inconsistent");
                self.apta.recolor();
                let a = Action::Merge {
                    target: c.target,
                    blue: c.blue,
                    score: out.score,
                };
                (out.log, a)
            }
            SearchAction::Extend(node) => (
                MergeLog::default(),
                crate::redblue::extend(&mut self.apta, node),
            ),
        };
        progress.action(&reported);
        let colors = before
            .into_iter()
            .enumerate()
            .filter(|&(i, c)| self.apta.nodes[i].color != c)
            .map(|(i, c)| (NodeId(i as u32), c))
            .collect();
        self.applied.push(Applied {
            action,
            log,
            colors,
        });
    }

    fn undo(&mut self) {
        let mut last = self.applied.pop().expect("nothing to undo");
        for &(q, c) in &last.colors {
            self.apta.set_color(q, c);
        }
        undo_merge(&mut self.apta, &mut last.log);
    }

    fn goto(&mut self, path: &[SearchAction]) {
        let common = self
            .applied
            .iter()
            .zip(path)
            .take_while(|(a, b)| a.action == **b)
            .count();
        while self.applied.len() > common {
            self.undo();
        }
        for &action in &path[common..] {
            self.apply(action, &mut ());
        }
    }

    /// Children of the current position, or `None` when it is complete.
    fn expand(&mut self, node: &SearchNode) -> Option<Vec<SearchNode>> {
        let candidates = candidate_order(&self.apta, self.params);
        if candidates.is_empty() {
            return None;
        }
        let mut children = Vec::new();
        for &c in &candidates {
            let mut out = merge(&mut self.apta, c.target, c.blue, self.eval, self.params);
            if !out.consistent {
                continue;
            }
            undo_merge(&mut self.apta, &mut out.log);
            let mut path = node.path.clone();
            path.push(SearchAction::Merge(c));
            children.push(SearchNode {
                path,
                aic: node.aic + 2.0 * out.delta.loglik - 2.0 * out.delta.params as f64,
            });
        }
        if !self.params.extend && children.is_empty() {
            return None;
        }
        if self.params.extend {
            let mut path = node.path.clone();
            path.push(SearchAction::Extend(candidates[0].blue));
            children.push(SearchNode {
                path,
                aic: node.aic,
            });
        }
        Some(children)
    }

    /// Follows the greedy choice from the current position to completion.
    fn greedy_path(&mut self) -> SearchNode {
        let start = self.applied.len();
        let mut aic = model_aic(&self.apta, self.params.finalprob);
        loop {
            let candidates = candidate_order(&self.apta, self.params);
            if candidates.is_empty() {
                break;
            }
            let action = match best_merge(&mut self.apta, &candidates, self.eval, self.params) {
                Some((c, _)) => SearchAction::Merge(c),
                None if self.params.extend => SearchAction::Extend(candidates[0].blue),
                None => break,
            };
            if let SearchAction::Merge(c) = action {
                let mut out = merge(&mut self.apta, c.target, c.blue, self.eval, self.params);
                aic += 2.0 * out.delta.loglik - 2.0 * out.delta.params as f64;
                undo_merge(&mut self.apta, &mut out.log);
            }
            self.apply(action, &mut ());
        }
        let path = self.applied[start..].iter().map(|a| a.action).collect();
        SearchNode { path, aic }
    }
}

/// Runs the beam search and returns the best complete path with its tree.
pub fn search(
    ts: &TraceSet,
    eval: &mut dyn Evaluation,
    params: &EvalParams,
    beam_width: usize,
) -> SearchOutcome {
    assert!(beam_width >= 1, "beam width must be at least 1");
    let mut apta = Apta::build(ts);
    apta.prepare_reference_weights(params.finalprob);
    let mut walker = Walker {
        apta,
        eval,
        params,
        applied: Vec::new(),
    };

    let mut best = walker.greedy_path();
    walker.goto(&[]);

    let mut beam = alloc::vec![SearchNode {
        path: Vec::new(),
        aic: model_aic(&walker.apta, params.finalprob),
    }];
    while !beam.is_empty() {
        // Lexicographic order keeps siblings adjacent and switching cheap.
        beam.sort_by(|a, b| a.path.cmp(&b.path));
        let mut next = Vec::new();
        for node in &beam {
            walker.goto(&node.path);
            match walker.expand(node) {
                Some(children) => next.extend(children),
                None => {
                    if node.rank(&best) == Ordering::Less {
                        best = node.clone();
                    }
                }
            }
        }
        next.sort_by(SearchNode::rank);
        next.truncate(beam_width);
        beam = next;
    }

    walker.goto(&best.path);
    SearchOutcome {
        best,
        apta: walker.apta,
    }
}

/// Beam search returning the finalized model.
pub fn best_first_search(
    ts: &TraceSet,
    eval: &mut dyn Evaluation,
    params: &EvalParams,
    beam_width: usize,
) -> Pdfa {
    let out = search(ts, eval, params, beam_width);
    Pdfa::from_apta(&out.apta, params)
}

/// Rebuilds the tree of `path` from scratch, reporting each action.
pub fn replay(
    ts: &TraceSet,
    eval: &mut dyn Evaluation,
    params: &EvalParams,
    path: &[SearchAction],
    progress: &mut dyn Progress,
) -> Apta {
    let mut apta = Apta::build(ts);
    apta.prepare_reference_weights(params.finalprob);
    let mut walker = Walker {
        apta,
        eval,
        params,
        applied: Vec::new(),
    };
    for &action in path {
        walker.apply(action, progress);
    }
    progress.finished();
    walker.apta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Aic;
    use crate::redblue::greedy_run;
    use crate::trace::Trace;
    use alloc::vec;
    use proptest::prelude::*;

    fn sample(traces: &[Vec<u32>]) -> TraceSet {
        TraceSet {
            alphabet_size: 2,
            traces: traces.iter().map(|t| Trace::new(1, t.clone())).collect(),
        }
    }

    fn params() -> EvalParams {
        EvalParams {
            finalprob: true,
            largestblue: false,
            blueblue: true,
            ..EvalParams::default()
        }
    }

    /// Minimum final AIC over every action sequence, by plain recursion and
    /// full recomputation of the model AIC at the leaves.
    fn exhaustive_min(apta: &mut Apta, params: &EvalParams) -> f64 {
        let candidates = candidate_order(apta, params);
        if candidates.is_empty() {
            return model_aic(apta, params.finalprob);
        }
        let mut best = f64::INFINITY;
        let mut any = false;
        for c in candidates.iter() {
            let snapshot = apta.clone();
            let out = merge(apta, c.target, c.blue, &mut Aic::default(), params);
            if out.consistent {
                any = true;
                apta.recolor();
                best = best.min(exhaustive_min(apta, params));
            }
            *apta = snapshot;
        }
        if params.extend {
            let snapshot = apta.clone();
            crate::redblue::extend(apta, candidates[0].blue);
            best = best.min(exhaustive_min(apta, params));
            *apta = snapshot;
        } else if !any {
            best = model_aic(apta, params.finalprob);
        }
        best
    }

    fn small_sample() -> impl Strategy<Value = Vec<Vec<u32>>> {
        prop::collection::vec(prop::collection::vec(0u32..2, 0..3), 1..6)
    }

    #[test]
    fn empty_sample_gives_single_state() {
        let pdfa = best_first_search(&TraceSet::new(2), &mut Aic::default(), &params(), 4);
        assert_eq!(pdfa.num_states(), 1);
    }

    #[test]
    fn incremental_aic_matches_recomputation() {
        let ts = sample(&[vec![0, 0, 1], vec![0, 1], vec![1, 1, 1], vec![0], vec![]]);
        let out = search(&ts, &mut Aic::default(), &params(), 8);
        let full = model_aic(&out.apta, true);
        assert!(
            (out.best.aic - full).abs() < 1e-9,
            "{} vs {}",
            out.best.aic,
            full
        );
    }

    #[test]
    fn replay_reproduces_the_tree() {
        let ts = sample(&[vec![0, 0, 1], vec![0, 1], vec![1, 1, 1], vec![0, 0], vec![]]);
        let out = search(&ts, &mut Aic::default(), &params(), 8);
        let mut actions: Vec<Action> = vec![];
        let replayed = replay(
            &ts,
            &mut Aic::default(),
            &params(),
            &out.best.path,
            &mut actions,
        );
        assert_eq!(replayed.structural_hash(), out.apta.structural_hash());
        assert_eq!(actions.len(), out.best.path.len());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn width_one_equals_greedy_aic(traces in small_sample()) {
            let ts = sample(&traces);
            let p = EvalParams { largestblue: true, blueblue: false, ..params() };
            let greedy = greedy_run(&ts, &mut Aic::default(), &p, &mut ());
            let searched = best_first_search(&ts, &mut Aic::default(), &p, 1);
            prop_assert_eq!(greedy, searched);
        }

        #[test]
        fn wide_beam_is_exhaustive(traces in small_sample()) {
            let ts = sample(&traces);
            let p = params();
            let mut apta = Apta::build(&ts);
            prop_assume!(apta.len() <= 6);
            let oracle = exhaustive_min(&mut apta, &p);
            let out = search(&ts, &mut Aic::default(), &p, 100_000);
            prop_assert!((model_aic(&out.apta, true) - oracle).abs() < 1e-9);
        }

        #[test]
        fn never_worse_than_greedy(traces in small_sample(), width in 1usize..8) {
            let ts = sample(&traces);
            let p = params();
            let mut apta = Apta::build(&ts);
            apta.prepare_reference_weights(true);
            crate::redblue::run_greedy(&mut apta, &mut Aic::default(), &p, &mut ());
            let greedy = model_aic(&apta, true);
            let out = search(&ts, &mut Aic::default(), &p, width);
            prop_assert!(model_aic(&out.apta, true) <= greedy + 1e-9);
        }
    }
}
