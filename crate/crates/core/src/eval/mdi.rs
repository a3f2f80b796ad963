use super::{below_state_count, for_each_symbol, raw_ll_delta, Evaluation};
use crate::apta::{Counts, Node, RefWeights};
use crate::params::EvalParams;

#[inline]
fn ln_ratio(c: u64, t: f64) -> f64 {
    libm::log(c as f64 / t)
}

/// Divergence contribution of merging one pair, weighted by the prefix-tree
/// reference weights of both classes:
/// `Σ_a W_q(a)(ln S_q(a) - ln S_m(a)) + W_q'(a)(ln S_q'(a) - ln S_m(a))`
/// where `m` is the merged state.
pub fn mdi_pair_divergence(
    q: &Counts,
    wq: &RefWeights,
    q_prime: &Counts,
    wp: &RefWeights,
    finalprob: bool,
) -> f64 {
    let tq = q.total(finalprob) as f64;
    let tp = q_prime.total(finalprob) as f64;
    let tm = tq + tp;
    let mut sum = 0.0;
    let mut term = |cq: u64, cp: u64, w_q: f64, w_p: f64| {
        let cm = cq + cp;
        if cm == 0 {
            return;
        }
        let lm = ln_ratio(cm, tm);
        if w_q > 0.0 && cq > 0 {
            sum += w_q * (ln_ratio(cq, tq) - lm);
        }
        if w_p > 0.0 && cp > 0 {
            sum += w_p * (ln_ratio(cp, tp) - lm);
        }
    };
    for_each_symbol(&q.symbols, &q_prime.symbols, |a, cq, cp| {
        term(cq, cp, wq.get(a), wp.get(a))
    });
    if finalprob {
        term(q.fin, q_prime.fin, wq.fin, wp.fin);
    }
    sum
}

/// Divergence per removed parameter must stay below `α`; the score is the
/// remaining slack `α - value`. A merge that removes no parameters is
/// rejected.
pub fn mdi_test(divergence: f64, params_delta: u64, alpha: f64) -> (bool, f64) {
    if params_delta == 0 {
        return (false, f64::NEG_INFINITY);
    }
    let value = divergence / params_delta as f64;
    (value < alpha, alpha - value)
}

#[derive(Debug, Default, Clone)]
pub struct Mdi {
    divergence: f64,
    params: u64,
}

impl Mdi {
    pub fn divergence(&self) -> f64 {
        self.divergence
    }

    pub fn params_delta(&self) -> u64 {
        self.params
    }
}

impl Evaluation for Mdi {
    fn name(&self) -> &'static str {
        "mdi"
    }

    fn reset(&mut self) {
        self.divergence = 0.0;
        self.params = 0;
    }

    fn check_pair(&mut self, q: &Node, q_prime: &Node, params: &EvalParams) -> bool {
        if below_state_count(&q.counts, &q_prime.counts, params) {
            return true;
        }
        self.divergence += mdi_pair_divergence(
            &q.counts,
            &q.weights,
            &q_prime.counts,
            &q_prime.weights,
            params.finalprob,
        );
        self.params += raw_ll_delta(&q.counts, &q_prime.counts, params.finalprob).1;
        true
    }

    fn consistent(&self, params: &EvalParams) -> bool {
        mdi_test(self.divergence, self.params, params.confidence_bound).0
    }

    fn score(&self, params: &EvalParams) -> f64 {
        mdi_test(self.divergence, self.params, params.confidence_bound).1
    }
}
