use super::{ll_delta, Evaluation};
use crate::apta::Node;
use crate::params::EvalParams;

/// A merge is consistent when it lowers the AIC: `2·Δparams - 2·Δloglik > 0`.
/// The score is that AIC decrease.
pub fn aic_test(loglik_delta: f64, params_delta: u64) -> (bool, f64) {
    let gain = 2.0 * params_delta as f64 - 2.0 * loglik_delta;
    (gain > 0.0, gain)
}

#[derive(Debug, Default, Clone)]
pub struct Aic {
    loglik: f64,
    params: u64,
}

impl Evaluation for Aic {
    fn name(&self) -> &'static str {
        "aic"
    }

    fn reset(&mut self) {
        self.loglik = 0.0;
        self.params = 0;
    }

    fn check_pair(&mut self, q: &Node, q_prime: &Node, params: &EvalParams) -> bool {
        let (d, p) = ll_delta(&q.counts, &q_prime.counts, params);
        self.loglik += d;
        self.params += p;
        true
    }

    fn consistent(&self, _params: &EvalParams) -> bool {
        aic_test(self.loglik, self.params).0
    }

    fn score(&self, _params: &EvalParams) -> f64 {
        aic_test(self.loglik, self.params).1
    }
}
