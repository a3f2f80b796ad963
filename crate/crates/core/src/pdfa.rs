//! Finalized, immutable PDFA extracted from a merged prefix tree.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::apta::{Apta, Color, NodeId};
use crate::params::EvalParams;

pub type StateId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub target: StateId,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PdfaState {
    pub final_count: u64,
    pub path_count: u64,
    pub transitions: BTreeMap<u32, Transition>,
    /// Low-frequency state left unmerged, or a state only reachable through
    /// one.
    pub sink: bool,
}

impl PdfaState {
    pub fn transition_total(&self) -> u64 {
        self.transitions.values().map(|t| t.count).sum()
    }

    /// Denominator of the state's distribution.
    pub fn total(&self, finalprob: bool) -> u64 {
        if finalprob {
            self.path_count
        } else {
            self.transition_total()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdfa {
    pub alphabet_size: u32,
    pub finalprob: bool,
    pub start: StateId,
    pub states: BTreeMap<StateId, PdfaState>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdfaDefect {
    MissingStart(StateId),
    DanglingTarget {
        source: StateId,
        symbol: u32,
        target: StateId,
    },
    SymbolOutOfRange {
        source: StateId,
        symbol: u32,
    },
    CountMismatch(StateId),
}

impl Pdfa {
    /// A single state without transitions.
    pub fn single_state(alphabet_size: u32, finalprob: bool) -> Pdfa {
        let mut states = BTreeMap::new();
        states.insert(0, PdfaState::default());
        Pdfa {
            alphabet_size,
            finalprob,
            start: 0,
            states,
        }
    }

    /// Extracts the model reachable from the root. State ids are the ids of
    /// the representative tree nodes. Remaining blue states that are below
    /// the sink threshold, and everything reachable only through them, are
    /// flagged as sinks.
    pub fn from_apta(apta: &Apta, params: &EvalParams) -> Pdfa {
        let root = apta.find(apta.root());
        let mut states = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(root);
        queue.push_back(root);
        while let Some(q) = queue.pop_front() {
            let node = apta.node(q);
            let mut transitions = BTreeMap::new();
            for (&a, &raw) in &node.children {
                let t = apta.find(raw);
                transitions.insert(
                    a,
                    Transition {
                        target: t.0,
                        count: node.counts.symbol(a),
                    },
                );
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
            states.insert(
                q.0,
                PdfaState {
                    final_count: node.counts.fin,
                    path_count: node.counts.path,
                    transitions,
                    sink: false,
                },
            );
        }

        let mut pdfa = Pdfa {
            alphabet_size: apta.alphabet_size,
            finalprob: params.finalprob,
            start: root.0,
            states,
        };
        if params.sinkson {
            let roots: Vec<StateId> = apta
                .blue_states()
                .into_iter()
                .filter(|&b| crate::redblue::is_sink(apta, b, params))
                .map(|b| b.0)
                .collect();
            pdfa.mark_sinks(&roots, |id| apta.node(NodeId(id)).color == Color::Red);
        }
        pdfa
    }

    fn mark_sinks(&mut self, roots: &[StateId], is_red: impl Fn(StateId) -> bool) {
        let mut stack: Vec<StateId> = roots.to_vec();
        while let Some(s) = stack.pop() {
            if is_red(s) {
                continue;
            }
            let state = match self.states.get_mut(&s) {
                Some(st) if !st.sink => st,
                _ => continue,
            };
            state.sink = true;
            stack.extend(state.transitions.values().map(|t| t.target));
        }
    }

    pub fn state(&self, id: StateId) -> Option<&PdfaState> {
        self.states.get(&id)
    }

    pub fn transition(&self, q: StateId, a: u32) -> Option<Transition> {
        self.states
            .get(&q)
            .and_then(|s| s.transitions.get(&a).copied())
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.states.values().map(|s| s.transitions.len()).sum()
    }

    /// Checks determinism-independent structural invariants: start state
    /// exists, targets exist, symbols are in range, and outgoing plus final
    /// counts equal each state's path count.
    pub fn validate(&self) -> Result<(), PdfaDefect> {
        if !self.states.contains_key(&self.start) {
            return Err(PdfaDefect::MissingStart(self.start));
        }
        for (&id, s) in &self.states {
            for (&a, t) in &s.transitions {
                if a >= self.alphabet_size {
                    return Err(PdfaDefect::SymbolOutOfRange {
                        source: id,
                        symbol: a,
                    });
                }
                if !self.states.contains_key(&t.target) {
                    return Err(PdfaDefect::DanglingTarget {
                        source: id,
                        symbol: a,
                        target: t.target,
                    });
                }
            }
            if s.transition_total() + s.final_count != s.path_count {
                return Err(PdfaDefect::CountMismatch(id));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{Trace, TraceSet};
    use alloc::vec;

    #[test]
    fn prefix_tree_extraction_keeps_every_node() {
        let ts = TraceSet {
            alphabet_size: 2,
            traces: vec![Trace::new(1, vec![0, 1]), Trace::new(1, vec![1])],
        };
        let apta = Apta::build(&ts);
        let pdfa = Pdfa::from_apta(&apta, &EvalParams::default());
        assert_eq!(pdfa.num_states(), apta.len());
        assert_eq!(pdfa.num_transitions(), apta.len() - 1);
        pdfa.validate().unwrap();
    }

    #[test]
    fn validate_catches_dangling_target() {
        let mut p = Pdfa::single_state(2, true);
        p.states.get_mut(&0).unwrap().transitions.insert(
            0,
            Transition {
                target: 9,
                count: 0,
            },
        );
        assert_eq!(
            p.validate(),
            Err(PdfaDefect::DanglingTarget {
                source: 0,
                symbol: 0,
                target: 9
            })
        );
    }
}
