use alloc::vec::Vec;

use super::pooling::pool_sparse;
use super::{below_state_count, Evaluation};
use crate::apta::{Counts, Node};
use crate::params::EvalParams;

/// Outcome of one Hoeffding pair test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTest {
    pub consistent: bool,
    /// Sum of `bound - |difference|` over all performed checks.
    pub margin: f64,
}

impl PairTest {
    const SKIPPED: PairTest = PairTest {
        consistent: true,
        margin: 0.0,
    };
}

/// `sqrt(½ ln(2/α)) · (1/√n + 1/√n')`.
pub fn hoeffding_bound(alpha: f64, n: u64, n_prime: u64) -> f64 {
    libm::sqrt(0.5 * libm::log(2.0 / alpha))
        * (1.0 / libm::sqrt(n as f64) + 1.0 / libm::sqrt(n_prime as f64))
}

/// Alergia's test of two states after two-pool pooling and Laplace
/// correction.
///
/// Every tested slot (surviving symbol, used pool, and the final count with
/// `finalprob`) must differ by less than the Hoeffding bound. Slots are
/// marginal events, so a symbol that is rare in both states is tested in both
/// pools. Pairs where either state is below `state_count`, or has no events,
/// are not tested.
pub fn alergia_pair_test(q: &Counts, q_prime: &Counts, params: &EvalParams) -> PairTest {
    if below_state_count(q, q_prime, params) {
        return PairTest::SKIPPED;
    }
    let n = q.total(params.finalprob);
    let n_prime = q_prime.total(params.finalprob);
    if n == 0 || n_prime == 0 {
        return PairTest::SKIPPED;
    }

    let pooled = pool_sparse(&q.symbols, &q_prime.symbols, params.symbol_count);
    let mut slots: Vec<(u64, u64)> = pooled.slots().collect();
    if params.finalprob {
        slots.push((q.fin, q_prime.fin));
    }

    let c = params.correction;
    let k = slots.len() as f64;
    let denom = n as f64 + c * k;
    let denom_prime = n_prime as f64 + c * k;
    let bound = hoeffding_bound(params.confidence_bound, n, n_prime);

    let mut test = PairTest {
        consistent: true,
        margin: 0.0,
    };
    for (a, b) in slots {
        let diff = libm::fabs((a as f64 + c) / denom - (b as f64 + c) / denom_prime);
        if diff >= bound {
            test.consistent = false;
        }
        test.margin += bound - diff;
    }
    test
}

/// Alergia with the summed-margin score.
#[derive(Debug, Default, Clone)]
pub struct Alergia {
    score: f64,
}

impl Evaluation for Alergia {
    fn name(&self) -> &'static str {
        "alergia"
    }

    fn reset(&mut self) {
        self.score = 0.0;
    }

    fn check_pair(&mut self, q: &Node, q_prime: &Node, params: &EvalParams) -> bool {
        let test = alergia_pair_test(&q.counts, &q_prime.counts, params);
        self.score += test.margin;
        test.consistent
    }

    fn score(&self, _params: &EvalParams) -> f64 {
        self.score
    }
}
