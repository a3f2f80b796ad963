//! Random target automata and samplers for synthetic experiments.

use rand::Rng;
use statemerge_core::{Pdfa, Trace, TraceSet};

#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    pub final_prob: f64,
    /// `(symbol, target, probability)`; probabilities plus `final_prob` sum
    /// to one.
    pub transitions: Vec<(u32, usize, f64)>,
}

/// A PDFA with explicit probabilities, used as a data generator and as the
/// ground truth for perplexity.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPdfa {
    pub alphabet_size: u32,
    pub states: Vec<TargetState>,
}

impl TargetPdfa {
    /// A random connected PDFA. Every state is reachable from state 0, has
    /// at least one outgoing symbol, and ends with probability in
    /// `final_range`.
    pub fn random<R: Rng>(
        rng: &mut R,
        num_states: usize,
        alphabet_size: u32,
        final_range: (f64, f64),
    ) -> TargetPdfa {
        assert!(num_states >= 1 && alphabet_size >= 1);
        let mut edges: Vec<Vec<(u32, usize)>> = vec![Vec::new(); num_states];
        // Spanning tree first so that every state is reachable.
        for s in 1..num_states {
            loop {
                let parent = rng.random_range(0..s);
                let a = rng.random_range(0..alphabet_size);
                if edges[parent].iter().all(|&(b, _)| b != a) {
                    edges[parent].push((a, s));
                    break;
                }
                if (0..s).all(|p| edges[p].len() == alphabet_size as usize) {
                    panic!("alphabet too small for {num_states} states");
                }
            }
        }
        for out in edges.iter_mut() {
            for a in 0..alphabet_size {
                if out.iter().all(|&(b, _)| b != a) && rng.random_bool(0.5) {
                    out.push((a, rng.random_range(0..num_states)));
                }
            }
            if out.is_empty() {
                out.push((
                    rng.random_range(0..alphabet_size),
                    rng.random_range(0..num_states),
                ));
            }
            out.sort_unstable();
        }
        let states = edges
            .into_iter()
            .map(|out| {
                let final_prob = rng.random_range(final_range.0..final_range.1);
                let weights: Vec<f64> = out.iter().map(|_| rng.random_range(0.1..1.0)).collect();
                let total: f64 = weights.iter().sum();
                let transitions = out
                    .into_iter()
                    .zip(weights)
                    .map(|((a, t), w)| (a, t, (1.0 - final_prob) * w / total))
                    .collect();
                TargetState {
                    final_prob,
                    transitions,
                }
            })
            .collect();
        TargetPdfa {
            alphabet_size,
            states,
        }
    }

    /// Maximum-likelihood probabilities of a count-based model with final
    /// probabilities. State ids are renumbered densely, start first.
    pub fn from_counts(pdfa: &Pdfa) -> TargetPdfa {
        let mut ids: Vec<u32> = vec![pdfa.start];
        ids.extend(pdfa.states.keys().copied().filter(|&id| id != pdfa.start));
        let index = |id: u32| ids.iter().position(|&x| x == id).expect("known state");
        let states = ids
            .iter()
            .map(|&id| {
                let s = &pdfa.states[&id];
                let n = s.path_count as f64;
                TargetState {
                    final_prob: s.final_count as f64 / n,
                    transitions: s
                        .transitions
                        .iter()
                        .map(|(&a, t)| (a, index(t.target), t.count as f64 / n))
                        .collect(),
                }
            })
            .collect();
        TargetPdfa {
            alphabet_size: pdfa.alphabet_size,
            states,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<u32> {
        let mut q = 0;
        let mut out = Vec::new();
        loop {
            let s = &self.states[q];
            let mut u: f64 = rng.random();
            if u < s.final_prob {
                return out;
            }
            u -= s.final_prob;
            let mut next = None;
            for &(a, t, p) in &s.transitions {
                if u < p {
                    next = Some((a, t));
                    break;
                }
                u -= p;
            }
            // Rounding can leave a sliver past the last transition.
            let (a, t) = next.unwrap_or_else(|| {
                let &(a, t, _) = s.transitions.last().expect("state with transitions");
                (a, t)
            });
            out.push(a);
            q = t;
        }
    }

    pub fn sample_set<R: Rng>(&self, rng: &mut R, n: usize) -> TraceSet {
        TraceSet {
            alphabet_size: self.alphabet_size,
            traces: (0..n).map(|_| Trace::new(1, self.sample(rng))).collect(),
        }
    }

    /// Exact probability of generating `trace`.
    pub fn probability(&self, trace: &[u32]) -> f64 {
        let mut q = 0;
        let mut p = 1.0;
        for &a in trace {
            match self.states[q].transitions.iter().find(|&&(b, _, _)| b == a) {
                Some(&(_, t, pa)) => {
                    p *= pa;
                    q = t;
                }
                None => return 0.0,
            }
        }
        p * self.states[q].final_prob
    }
}
