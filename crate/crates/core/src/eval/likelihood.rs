use super::{chi2_sf, ll_delta, Evaluation};
use crate::apta::Node;
use crate::params::EvalParams;

/// Statistics at or below this value count as "no likelihood lost".
const ZERO_STATISTIC: f64 = 1e-12;

/// A single likelihood-ratio test over the whole merge.
///
/// `v = 2 · Δloglik` is compared against a χ² distribution with `Δparams`
/// degrees of freedom. The merge is consistent when the p-value exceeds `α`;
/// the score is `1 - p`. With zero removed parameters there is nothing to
/// trade the lost likelihood against, so only a lossless merge passes.
pub fn likelihood_ratio_test(loglik_delta: f64, params_delta: u64, alpha: f64) -> (bool, f64) {
    let v = (2.0 * loglik_delta).max(0.0);
    if params_delta == 0 {
        return (v <= ZERO_STATISTIC, 0.0);
    }
    let df = u32::try_from(params_delta).unwrap_or(u32::MAX);
    let p = chi2_sf(v, df).unwrap_or(0.0);
    (p > alpha, 1.0 - p)
}

#[derive(Debug, Default, Clone)]
pub struct LikelihoodRatio {
    pub(super) loglik: f64,
    pub(super) params: u64,
}

impl LikelihoodRatio {
    pub fn loglik_delta(&self) -> f64 {
        self.loglik
    }

    pub fn params_delta(&self) -> u64 {
        self.params
    }
}

impl Evaluation for LikelihoodRatio {
    fn name(&self) -> &'static str {
        "likelihoodratio"
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

    fn consistent(&self, params: &EvalParams) -> bool {
        likelihood_ratio_test(self.loglik, self.params, params.confidence_bound).0
    }

    fn score(&self, params: &EvalParams) -> f64 {
        likelihood_ratio_test(self.loglik, self.params, params.confidence_bound).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_merge_passes_with_zero_score() {
        assert_eq!(likelihood_ratio_test(0.0, 5, 0.05), (true, 0.0));
    }

    #[test]
    fn boundary_statistic() {
        // v = 3.841 with one degree of freedom sits just above p = 0.05
        let (ok, score) = likelihood_ratio_test(3.841 / 2.0, 1, 0.05);
        let p = 1.0 - score;
        assert!((p - 0.050_013_684).abs() < 1e-6, "{p}");
        assert!(ok);
        let (ok, _) = likelihood_ratio_test(3.85 / 2.0, 1, 0.05);
        assert!(!ok);
    }

    #[test]
    fn large_loss_rejected() {
        let (ok, score) = likelihood_ratio_test(50.0, 1, 0.05);
        assert!(!ok);
        assert!(score > 0.999_999);
    }

    #[test]
    fn zero_degrees_of_freedom() {
        assert_eq!(likelihood_ratio_test(0.0, 0, 0.05), (true, 0.0));
        assert!(!likelihood_ratio_test(0.1, 0, 0.05).0);
    }
}
