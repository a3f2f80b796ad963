//! Evaluation functions: the consistency check and score that decide which
//! merges happen.
//!
//! The merge engine calls [`Evaluation::check_pair`] for every pair of states
//! merged during a determinization cascade, before their counts are combined.
//! Functions that decide per pair (Alergia) reject there; functions that test
//! the whole merge at once (likelihood-ratio, MDI, AIC) only accumulate and
//! decide in [`Evaluation::consistent`]. Adding a new function means
//! implementing this trait and registering it in [`evaluation_by_name`].

use alloc::boxed::Box;
use alloc::collections::BTreeMap;

use crate::apta::{xlogx_ratio, Apta, Counts, Node};
use crate::params::EvalParams;

mod aic;
mod alergia;
pub mod chi2;
mod likelihood;
mod mdi;
mod pooling;

pub use aic::{aic_test, Aic};
pub use alergia::{alergia_pair_test, hoeffding_bound, Alergia, PairTest};
pub use chi2::chi2_sf;
pub use likelihood::{likelihood_ratio_test, LikelihoodRatio};
pub use mdi::{mdi_pair_divergence, mdi_test, Mdi};
pub use pooling::{pool_counts, PooledCounts};

pub const EVALUATION_NAMES: [&str; 4] = ["alergia", "likelihoodratio", "mdi", "aic"];

pub trait Evaluation {
    fn name(&self) -> &'static str;

    /// Clears all aggregates; called at the start of every merge attempt.
    fn reset(&mut self);

    /// Tests and records one pair of the cascade. Returning `false` aborts the
    /// merge.
    fn check_pair(&mut self, q: &Node, q_prime: &Node, params: &EvalParams) -> bool;

    /// Final verdict once the cascade has completed.
    fn consistent(&self, _params: &EvalParams) -> bool {
        true
    }

    /// Larger is better.
    fn score(&self, params: &EvalParams) -> f64;
}

pub fn evaluation_by_name(name: &str) -> Option<Box<dyn Evaluation>> {
    match name {
        "alergia" => Some(Box::new(Alergia::default())),
        "likelihoodratio" | "likelihood" => Some(Box::new(LikelihoodRatio::default())),
        "mdi" => Some(Box::new(Mdi::default())),
        "aic" => Some(Box::new(Aic::default())),
        _ => None,
    }
}

/// True when either state is too infrequent to be tested.
pub fn below_state_count(q: &Counts, q_prime: &Counts, params: &EvalParams) -> bool {
    q.path < params.state_count || q_prime.path < params.state_count
}

/// Walks the union of the symbol supports of two count maps.
pub(crate) fn for_each_symbol(
    a: &BTreeMap<u32, u64>,
    b: &BTreeMap<u32, u64>,
    mut f: impl FnMut(u32, u64, u64),
) {
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(&(&ka, &ca)), Some(&(&kb, &cb))) => {
                if ka < kb {
                    f(ka, ca, 0);
                    ia.next();
                } else if kb < ka {
                    f(kb, 0, cb);
                    ib.next();
                } else {
                    f(ka, ca, cb);
                    ia.next();
                    ib.next();
                }
            }
            (Some(&(&ka, &ca)), None) => {
                f(ka, ca, 0);
                ia.next();
            }
            (None, Some(&(&kb, &cb))) => {
                f(kb, 0, cb);
                ib.next();
            }
            (None, None) => break,
        }
    }
}

/// Exact change in log-likelihood and parameter count caused by merging two
/// states, ignoring `state_count`.
///
/// The log-likelihood term is `LL(q) + LL(q') - LL(q ∪ q')`, never negative.
/// A parameter disappears for each symbol (and the final slot, with
/// `finalprob`) that is non-zero in both states.
pub fn raw_ll_delta(q: &Counts, q_prime: &Counts, finalprob: bool) -> (f64, u64) {
    let tq = q.total(finalprob) as f64;
    let tp = q_prime.total(finalprob) as f64;
    let tm = tq + tp;
    let mut delta = 0.0;
    let mut params = 0u64;
    let mut term = |cq: u64, cp: u64| {
        if cq > 0 && cp > 0 {
            params += 1;
        }
        delta += xlogx_ratio(cq, tq) + xlogx_ratio(cp, tp) - xlogx_ratio(cq + cp, tm);
    };
    for_each_symbol(&q.symbols, &q_prime.symbols, |_, cq, cp| term(cq, cp));
    if finalprob {
        term(q.fin, q_prime.fin);
    }
    (delta, params)
}

/// Per-pair likelihood contribution; infrequent pairs contribute nothing.
pub fn ll_delta(q: &Counts, q_prime: &Counts, params: &EvalParams) -> (f64, u64) {
    if below_state_count(q, q_prime, params) {
        (0.0, 0)
    } else {
        raw_ll_delta(q, q_prime, params.finalprob)
    }
}

/// Number of transition parameters of the current model.
pub fn model_size(apta: &Apta, finalprob: bool) -> u64 {
    apta.representatives()
        .map(|q| apta.counts(q).parameters(finalprob))
        .sum()
}

/// `2 · size - 2 · LL` of the current model.
pub fn model_aic(apta: &Apta, finalprob: bool) -> f64 {
    2.0 * model_size(apta, finalprob) as f64 - 2.0 * apta.log_likelihood(finalprob)
}
