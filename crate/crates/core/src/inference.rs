//! Using a learned PDFA: per-symbol scores, trace probabilities, perplexity
//! and anomaly verdicts.

use alloc::vec::Vec;

use crate::error::CoreError;
use crate::pdfa::{Pdfa, PdfaState, StateId};

/// States visited and natural-log scores for one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    /// State after each symbol, followed by the end state once more. `None`
    /// once the walk has left the model.
    pub states: Vec<Option<StateId>>,
    /// One score per symbol, plus the final score when the model has final
    /// probabilities. `-inf` for impossible events.
    pub scores: Vec<f64>,
    /// The trace used a symbol outside the model's alphabet.
    pub out_of_alphabet: bool,
}

impl PredictionRecord {
    pub fn log_probability(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Number of smoothed slots of a state: its outgoing symbols plus the final
/// slot when final probabilities are modelled.
fn support(state: &PdfaState, finalprob: bool) -> f64 {
    state.transitions.len() as f64 + if finalprob { 1.0 } else { 0.0 }
}

fn ln_smoothed(count: u64, state: &PdfaState, finalprob: bool, correction: f64) -> f64 {
    let num = count as f64 + correction;
    let den = state.total(finalprob) as f64 + correction * support(state, finalprob);
    if num <= 0.0 || den <= 0.0 {
        f64::NEG_INFINITY
    } else {
        libm::log(num / den)
    }
}

/// Walks `trace` through the model from its start state.
///
/// Each step scores `ln((C(q,a) + c) / (C(q) + c · support(q)))`. A missing
/// transition or an out-of-alphabet symbol scores `-inf`; from there on the
/// walk has no state and every remaining score is `-inf`.
pub fn trace_scores(pdfa: &Pdfa, trace: &[u32], correction: f64) -> PredictionRecord {
    let mut states = Vec::with_capacity(trace.len() + 1);
    let mut scores = Vec::with_capacity(trace.len() + 1);
    let mut out_of_alphabet = false;
    let mut current = Some(pdfa.start);
    for &a in trace {
        if a >= pdfa.alphabet_size {
            out_of_alphabet = true;
        }
        let next = current.and_then(|q| {
            let state = pdfa.state(q)?;
            let t = state.transitions.get(&a)?;
            Some((
                t.target,
                ln_smoothed(t.count, state, pdfa.finalprob, correction),
            ))
        });
        match next {
            Some((target, score)) => {
                scores.push(score);
                current = Some(target);
            }
            None => {
                scores.push(f64::NEG_INFINITY);
                current = None;
            }
        }
        states.push(current);
    }
    // The end state is reported once more, the first state for empty traces.
    states.push(current);
    if pdfa.finalprob {
        let fin = current
            .and_then(|q| pdfa.state(q))
            .map_or(f64::NEG_INFINITY, |s| {
                ln_smoothed(s.final_count, s, true, correction)
            });
        scores.push(fin);
    }
    PredictionRecord {
        states,
        scores,
        out_of_alphabet,
    }
}

/// Natural-log probability of `trace` under full Laplace smoothing, which
/// never returns `-inf` when `correction > 0`.
///
/// Every state's distribution covers the whole alphabet (plus the final
/// slot): `(C(q,a) + c) / (C(q) + c · (|Σ| + 1))`. A symbol without a
/// transition is scored that way and the walk stays in the current state.
/// This is the candidate probability used for perplexity evaluation.
pub fn smoothed_log_probability(pdfa: &Pdfa, trace: &[u32], correction: f64) -> f64 {
    let slots = f64::from(pdfa.alphabet_size) + if pdfa.finalprob { 1.0 } else { 0.0 };
    let mut q = pdfa.start;
    let mut lp = 0.0;
    let step = |count: u64, state: &PdfaState| {
        let den = state.total(pdfa.finalprob) as f64 + correction * slots;
        let num = count as f64 + correction;
        if num <= 0.0 || den <= 0.0 {
            f64::NEG_INFINITY
        } else {
            libm::log(num / den)
        }
    };
    for &a in trace {
        let Some(state) = pdfa.state(q) else {
            return f64::NEG_INFINITY;
        };
        match state.transitions.get(&a) {
            Some(t) => {
                lp += step(t.count, state);
                q = t.target;
            }
            None => lp += step(0, state),
        }
    }
    if pdfa.finalprob {
        if let Some(state) = pdfa.state(q) {
            lp += step(state.final_count, state);
        }
    }
    lp
}

/// Test-set perplexity `2^(-Σ P_T(x) log2 P_C(x))`.
///
/// Both probability lists are normalized over the test set first.
pub fn perplexity(candidate: &[f64], target: &[f64]) -> Result<f64, CoreError> {
    if candidate.len() != target.len() {
        return Err(CoreError::LengthMismatch(candidate.len(), target.len()));
    }
    let sum_c: f64 = candidate.iter().sum();
    let sum_t: f64 = target.iter().sum();
    if candidate.is_empty()
        || sum_c.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater)
        || sum_t.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater)
    {
        return Err(CoreError::EmptyDistribution);
    }
    let mut cross = 0.0;
    for (i, (&pc, &pt)) in candidate.iter().zip(target).enumerate() {
        if pc.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) || !pc.is_finite() {
            return Err(CoreError::ZeroProbability(i));
        }
        let pt = pt / sum_t;
        if pt > 0.0 {
            cross += pt * libm::log2(pc / sum_c);
        }
    }
    Ok(libm::exp2(-cross))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyReason {
    /// The trace tried to take a transition the model does not have.
    MissingTransition,
    /// The trace ended in a state no training trace ended in.
    ZeroFinal,
    /// The trace used a symbol outside the training alphabet.
    UnseenSymbol,
}

impl AnomalyReason {
    pub fn as_str(self) -> &'static str {
        match self {
            AnomalyReason::MissingTransition => "missing_transition",
            AnomalyReason::ZeroFinal => "zero_final",
            AnomalyReason::UnseenSymbol => "unseen_symbol",
        }
    }
}

/// Flags a trace that leaves the model or ends in a never-final state.
pub fn is_anomaly(pdfa: &Pdfa, trace: &[u32]) -> Option<AnomalyReason> {
    let mut q = pdfa.start;
    for &a in trace {
        if a >= pdfa.alphabet_size {
            return Some(AnomalyReason::UnseenSymbol);
        }
        match pdfa.transition(q, a) {
            Some(t) => q = t.target,
            None => return Some(AnomalyReason::MissingTransition),
        }
    }
    match pdfa.state(q) {
        Some(s) if s.final_count > 0 => None,
        _ => Some(AnomalyReason::ZeroFinal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apta::Apta;
    use crate::params::EvalParams;
    use crate::pdfa::Transition;
    use crate::trace::{Trace, TraceSet};
    use alloc::collections::BTreeMap;
    use alloc::vec;
    use proptest::prelude::*;

    /// Start 0 -a-> 1; 1 loops on a and goes to 2 on b; 2 returns to 1 on a,
    /// loops on b and is the only final state.
    pub(crate) fn three_state_model() -> Pdfa {
        let mut states = BTreeMap::new();
        let t = |target, count| Transition { target, count };
        states.insert(
            0,
            PdfaState {
                final_count: 0,
                path_count: 20,
                transitions: [(0, t(1, 20))].into_iter().collect(),
                sink: false,
            },
        );
        states.insert(
            1,
            PdfaState {
                final_count: 0,
                path_count: 50,
                transitions: [(0, t(1, 20)), (1, t(2, 30))].into_iter().collect(),
                sink: false,
            },
        );
        states.insert(
            2,
            PdfaState {
                final_count: 20,
                path_count: 50,
                transitions: [(0, t(1, 10)), (1, t(2, 20))].into_iter().collect(),
                sink: false,
            },
        );
        Pdfa {
            alphabet_size: 2,
            finalprob: true,
            start: 0,
            states,
        }
    }

    #[test]
    fn scores_abab_a() {
        let m = three_state_model();
        m.validate().unwrap();
        let r = trace_scores(&m, &[0, 1, 0, 1, 0], 0.0);
        let states: Vec<StateId> = r.states.iter().map(|s| s.unwrap()).collect();
        assert_eq!(states, vec![1, 2, 1, 2, 1, 1]);
        let expected = [0.0, -0.510826, -1.60944, -0.510826, -1.60944];
        for (s, e) in r.scores.iter().zip(expected) {
            assert!((s - e).abs() < 1e-5, "{s} vs {e}");
        }
        assert_eq!(r.scores[5], f64::NEG_INFINITY);
        assert_eq!(r.scores.len(), 6);
    }

    #[test]
    fn empty_trace_on_final_start() {
        let mut m = Pdfa::single_state(2, true);
        m.states.get_mut(&0).unwrap().final_count = 5;
        m.states.get_mut(&0).unwrap().path_count = 5;
        let r = trace_scores(&m, &[], 0.0);
        assert_eq!(r.scores, vec![0.0]);
        assert_eq!(r.states, vec![Some(0)]);
    }

    #[test]
    fn missing_transition_stops_the_walk() {
        let m = three_state_model();
        let r = trace_scores(&m, &[1, 0], 1.0);
        assert_eq!(r.states, vec![None, None, None]);
        assert!(r.scores.iter().all(|s| *s == f64::NEG_INFINITY));
        let r = trace_scores(&m, &[0, 7], 0.0);
        assert!(r.out_of_alphabet);
    }

    #[test]
    fn smoothing_uses_support_size() {
        let m = three_state_model();
        let r = trace_scores(&m, &[0, 1], 1.0);
        // state 1: (30 + 1) / (50 + 1·3)
        assert!((r.scores[1] - (31.0f64 / 53.0).ln()).abs() < 1e-12);
        // final slot of state 2: (20 + 1) / (50 + 3)
        assert!((r.scores[2] - (21.0f64 / 53.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn prefix_tree_reproduces_empirical_probabilities() {
        let traces: Vec<Vec<u32>> = vec![vec![0, 1], vec![0, 1], vec![0], vec![1, 1, 0], vec![]];
        let ts = TraceSet {
            alphabet_size: 2,
            traces: traces.iter().map(|t| Trace::new(1, t.clone())).collect(),
        };
        let params = EvalParams {
            finalprob: true,
            ..EvalParams::default()
        };
        let pdfa = Pdfa::from_apta(&Apta::build(&ts), &params);
        for t in &traces {
            let n = traces.iter().filter(|u| *u == t).count() as f64;
            let lp = trace_scores(&pdfa, t, 0.0).log_probability();
            assert!((lp - (n / traces.len() as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn smoothed_probability_is_never_zero() {
        let m = three_state_model();
        for t in [&[1u32, 1, 1][..], &[0, 0, 0, 0], &[], &[0, 1, 1, 0, 1]] {
            assert!(smoothed_log_probability(&m, t, 1.0).is_finite());
        }
        // without correction it equals the plain walk on seen paths
        let seen = [0, 1, 0, 1];
        let plain = trace_scores(&m, &seen, 0.0).log_probability();
        assert!((smoothed_log_probability(&m, &seen, 0.0) - plain).abs() < 1e-12);
    }

    #[test]
    fn perplexity_values() {
        assert!((perplexity(&[1.0], &[1.0]).unwrap() - 1.0).abs() < 1e-15);
        let p = perplexity(&[0.25, 0.75], &[0.5, 0.5]).unwrap();
        let hand = libm::exp2(-(0.5 * libm::log2(0.25) + 0.5 * libm::log2(0.75)));
        assert!((p - hand).abs() < 1e-12);
        assert!((p - 2.3094).abs() < 1e-4);
        assert_eq!(
            perplexity(&[0.0, 1.0], &[0.5, 0.5]),
            Err(CoreError::ZeroProbability(0))
        );
        assert_eq!(
            perplexity(&[1.0], &[0.5, 0.5]),
            Err(CoreError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn anomaly_reasons() {
        let m = three_state_model();
        assert_eq!(
            is_anomaly(&m, &[0, 1, 0, 1, 0]),
            Some(AnomalyReason::ZeroFinal)
        );
        assert_eq!(is_anomaly(&m, &[0, 1]), None);
        assert_eq!(is_anomaly(&m, &[1]), Some(AnomalyReason::MissingTransition));
        assert_eq!(is_anomaly(&m, &[0, 5]), Some(AnomalyReason::UnseenSymbol));
    }

    /// Every string over `k` symbols of length at most `max_len`.
    fn all_strings(k: u32, max_len: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &layer {
                for a in 0..k {
                    let mut t: Vec<u32> = s.clone();
                    t.push(a);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// Up to four states over two symbols with consistent counts.
    fn arb_model() -> impl Strategy<Value = Pdfa> {
        (1u32..=4, any::<bool>()).prop_flat_map(|(n, finalprob)| {
            let state = (
                1u64..20,
                prop::collection::btree_map(0u32..2, (0..n, 1u64..20), 0..=2),
            );
            prop::collection::vec(state, n as usize).prop_map(move |raw| {
                let states = raw
                    .into_iter()
                    .enumerate()
                    .map(|(i, (fin, tr))| {
                        let transitions: BTreeMap<u32, Transition> = tr
                            .into_iter()
                            .map(|(a, (target, count))| (a, Transition { target, count }))
                            .collect();
                        let path = fin + transitions.values().map(|t| t.count).sum::<u64>();
                        let s = PdfaState {
                            final_count: fin,
                            path_count: path,
                            transitions,
                            sink: false,
                        };
                        (i as u32, s)
                    })
                    .collect();
                Pdfa {
                    alphabet_size: 2,
                    finalprob,
                    start: 0,
                    states,
                }
            })
        })
    }

    /// Probability as a product of maximum-likelihood estimates read off a
    /// dense table built from the counts.
    fn product_oracle(m: &Pdfa, s: &[u32]) -> f64 {
        let n = m.states.len();
        let mut next = vec![[None; 2]; n];
        let mut prob = vec![[0.0f64; 2]; n];
        let mut fin = vec![0.0f64; n];
        for (&q, st) in &m.states {
            let q = q as usize;
            let denom = if m.finalprob {
                st.path_count
            } else {
                st.path_count - st.final_count
            } as f64;
            for (&a, t) in &st.transitions {
                next[q][a as usize] = Some(t.target as usize);
                prob[q][a as usize] = t.count as f64 / denom;
            }
            fin[q] = st.final_count as f64 / denom;
        }
        let mut q = 0usize;
        let mut p = 1.0;
        for &a in s {
            match next[q][a as usize] {
                Some(t) => {
                    p *= prob[q][a as usize];
                    q = t;
                }
                None => return 0.0,
            }
        }
        if m.finalprob {
            p * fin[q]
        } else {
            p
        }
    }

    proptest! {
        #[test]
        fn scores_match_product_semantics(m in arb_model()) {
            for s in all_strings(2, 6) {
                let got = libm::exp(trace_scores(&m, &s, 0.0).log_probability());
                let want = product_oracle(&m, &s);
                prop_assert!((got - want).abs() < 1e-12, "{:?}: {} vs {}", s, got, want);
            }
        }

        #[test]
        fn finite_support_models_sum_to_one(
            traces in prop::collection::vec(prop::collection::vec(0u32..2, 0..5), 1..12),
        ) {
            let ts = TraceSet {
                alphabet_size: 2,
                traces: traces.iter().map(|t| Trace::new(1, t.clone())).collect(),
            };
            let params = EvalParams { finalprob: true, ..EvalParams::default() };
            let pdfa = Pdfa::from_apta(&Apta::build(&ts), &params);
            let total: f64 = all_strings(2, 4)
                .iter()
                .map(|s| libm::exp(trace_scores(&pdfa, s, 0.0).log_probability()))
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "{}", total);
        }

        #[test]
        fn adding_a_transition_never_creates_anomalies(
            m in arb_model(),
            from in 0u32..4,
            symbol in 0u32..2,
            to in 0u32..4,
        ) {
            let n = m.states.len() as u32;
            let (from, to) = (from % n, to % n);
            let mut grown = m.clone();
            grown
                .states
                .get_mut(&from)
                .unwrap()
                .transitions
                .entry(symbol)
                .or_insert(Transition { target: to, count: 1 });
            for s in all_strings(2, 5) {
                if is_anomaly(&m, &s).is_none() {
                    prop_assert_eq!(is_anomaly(&grown, &s), None);
                }
            }
        }

        #[test]
        fn true_distribution_minimizes_perplexity(
            target in prop::collection::vec(0.01f64..1.0, 2..20),
            noise in prop::collection::vec(prop::collection::vec(0.5f64..2.0, 20), 50),
        ) {
            let best = perplexity(&target, &target).unwrap();
            for factors in &noise {
                let candidate: Vec<f64> =
                    target.iter().zip(factors).map(|(p, f)| p * f).collect();
                prop_assert!(perplexity(&candidate, &target).unwrap() >= best * (1.0 - 1e-12));
            }
        }
    }
}
