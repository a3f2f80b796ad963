//! Merging two states with determinization, and undoing it.
//!
//! A merge points the absorbed state at the surviving one, adds its counts,
//! and then walks the absorbed state's transitions: where both states have a
//! target for a symbol the targets are merged too, otherwise the transition
//! is attached to the survivor. Every change is recorded in a [`MergeLog`]
//! so the merge can be reverted exactly.

use alloc::vec::Vec;

use crate::apta::{Apta, Color, Counts, NodeId, RefWeights};
use crate::eval::{raw_ll_delta, Evaluation};
use crate::params::EvalParams;

#[derive(Debug, Clone, PartialEq)]
enum Step {
    /// `from` was absorbed into `into`; `prior_weights` are `into`'s weights
    /// before absorbing.
    Absorb {
        into: NodeId,
        from: NodeId,
        prior_weights: RefWeights,
    },
    /// `node` gained a transition on `symbol`.
    Attach { node: NodeId, symbol: u32 },
}

/// Reversible record of one applied merge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MergeLog {
    steps: Vec<Step>,
    pairs: Vec<(NodeId, NodeId)>,
}

impl MergeLog {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `(survivor, absorbed)` for every pair merged, in cascade order.
    pub fn pairs(&self) -> &[(NodeId, NodeId)] {
        &self.pairs
    }
}

/// Exact effect of a merge on the model, independent of any evaluation
/// function's thresholds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModelDelta {
    /// Log-likelihood lost (before minus after).
    pub loglik: f64,
    /// Transition parameters removed.
    pub params: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub consistent: bool,
    pub score: f64,
    /// Applied steps; empty when the merge was inconsistent (already rolled
    /// back).
    pub log: MergeLog,
    pub delta: ModelDelta,
}

impl MergeOutcome {
    fn rejected() -> Self {
        MergeOutcome {
            consistent: false,
            score: f64::NEG_INFINITY,
            log: MergeLog::default(),
            delta: ModelDelta::default(),
        }
    }
}

/// Last `n` incoming symbols of a node's tree path, innermost first; `None`
/// past the root.
fn incoming_suffix_matches(apta: &Apta, a: NodeId, b: NodeId, n: u32) -> bool {
    let (mut x, mut y) = (Some(a), Some(b));
    for _ in 0..n {
        let lx = x.and_then(|id| apta.node(id).incoming);
        let ly = y.and_then(|id| apta.node(id).incoming);
        if lx != ly {
            return false;
        }
        if lx.is_none() {
            return true;
        }
        x = x.and_then(|id| apta.node(id).parent);
        y = y.and_then(|id| apta.node(id).parent);
    }
    true
}

struct Frame {
    q: NodeId,
    transitions: Vec<(u32, NodeId)>,
    next: usize,
    depth: u32,
}

struct Cascade<'a> {
    apta: &'a mut Apta,
    eval: &'a mut dyn Evaluation,
    params: &'a EvalParams,
    log: MergeLog,
    delta: ModelDelta,
}

impl Cascade<'_> {
    /// Tests, then applies, one pair. Returns the frame walking `q_prime`'s
    /// transitions.
    fn merge_pair(&mut self, q: NodeId, q_prime: NodeId, depth: u32) -> Option<Frame> {
        debug_assert_ne!(q, q_prime);
        let params = self.params;
        if params.markovian > 0 && !incoming_suffix_matches(self.apta, q, q_prime, params.markovian)
        {
            return None;
        }
        let (nq, np) = (self.apta.node(q), self.apta.node(q_prime));
        if (params.ktail == 0 || depth < params.ktail) && !self.eval.check_pair(nq, np, params) {
            return None;
        }

        let (dl, dp) = raw_ll_delta(&nq.counts, &np.counts, params.finalprob);
        self.delta.loglik += dl;
        self.delta.params += dp;

        let absorbed: Counts = np.counts.clone();
        let absorbed_weights = np.weights.clone();
        let transitions: Vec<(u32, NodeId)> = np.children.iter().map(|(&a, &c)| (a, c)).collect();

        self.apta.node_mut(q_prime).rep = Some(q);
        let survivor = self.apta.node_mut(q);
        let prior_weights = survivor.weights.clone();
        survivor.counts.add(&absorbed);
        survivor.weights.add(&absorbed_weights);
        self.log.steps.push(Step::Absorb {
            into: q,
            from: q_prime,
            prior_weights,
        });
        self.log.pairs.push((q, q_prime));

        Some(Frame {
            q,
            transitions,
            next: 0,
            depth,
        })
    }

    fn run(&mut self, q: NodeId, q_prime: NodeId) -> bool {
        let mut stack = match self.merge_pair(q, q_prime, 0) {
            Some(f) => alloc::vec![f],
            None => return false,
        };
        while let Some(frame) = stack.last_mut() {
            if frame.next == frame.transitions.len() {
                stack.pop();
                continue;
            }
            let (a, raw) = frame.transitions[frame.next];
            frame.next += 1;
            let depth = frame.depth;
            let survivor = self.apta.find(frame.q);
            let incoming = self.apta.find(raw);
            match self.apta.node(survivor).children.get(&a).copied() {
                Some(existing) => {
                    let target = self.apta.find(existing);
                    if target != incoming {
                        match self.merge_pair(target, incoming, depth + 1) {
                            Some(f) => stack.push(f),
                            None => return false,
                        }
                    }
                }
                None => {
                    if self.params.redfixed && self.apta.node(survivor).color == Color::Red {
                        return false;
                    }
                    self.apta.node_mut(survivor).children.insert(a, incoming);
                    self.log.steps.push(Step::Attach {
                        node: survivor,
                        symbol: a,
                    });
                }
            }
        }
        true
    }
}

/// Merges `q_prime` into `q`, determinizing as needed.
///
/// When any pair check, constraint, or the evaluation's final verdict fails,
/// every change is rolled back before returning an inconsistent outcome.
pub fn merge(
    apta: &mut Apta,
    q: NodeId,
    q_prime: NodeId,
    eval: &mut dyn Evaluation,
    params: &EvalParams,
) -> MergeOutcome {
    assert!(apta.is_representative(q) && apta.is_representative(q_prime));
    assert_ne!(q, q_prime, "cannot merge a state with itself");
    eval.reset();
    let mut cascade = Cascade {
        apta,
        eval,
        params,
        log: MergeLog::default(),
        delta: ModelDelta::default(),
    };
    let ok = cascade.run(q, q_prime) && cascade.eval.consistent(params);
    let Cascade {
        apta,
        eval,
        mut log,
        delta,
        ..
    } = cascade;
    if !ok {
        undo_merge(apta, &mut log);
        return MergeOutcome::rejected();
    }
    MergeOutcome {
        consistent: true,
        score: eval.score(params),
        log,
        delta,
    }
}

/// Reverts a merge. Logs must be undone in the reverse order they were
/// applied; the log is left empty.
pub fn undo_merge(apta: &mut Apta, log: &mut MergeLog) {
    while let Some(step) = log.steps.pop() {
        match step {
            Step::Attach { node, symbol } => {
                apta.node_mut(node).children.remove(&symbol);
            }
            Step::Absorb {
                into,
                from,
                prior_weights,
            } => {
                let absorbed = apta.node(from).counts.clone();
                debug_assert_eq!(apta.node(from).rep, Some(into));
                let survivor = apta.node_mut(into);
                survivor.counts.subtract(&absorbed);
                survivor.weights = prior_weights;
                apta.node_mut(from).rep = None;
            }
        }
    }
    log.pairs.clear();
}
