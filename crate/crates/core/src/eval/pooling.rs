use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::for_each_symbol;

/// Symbol counts of a merge pair after two-pool frequency pooling.
///
/// `pool1` collects every symbol that is infrequent in `q'`, `pool2` every
/// symbol infrequent in `q`. A symbol infrequent in both lands in both pools,
/// so a difference that only one side shows stays visible in one pool.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PooledCounts {
    /// `(count in q, count in q')` summed over the first pool.
    pub pool1: (u64, u64),
    pub pool2: (u64, u64),
    /// Whether any symbol fell into each pool.
    pub pool1_used: bool,
    pub pool2_used: bool,
    /// `(symbol, count in q, count in q')` for symbols frequent in both.
    pub survivors: Vec<(u32, u64, u64)>,
}

impl PooledCounts {
    fn push(&mut self, symbol: u32, cq: u64, cp: u64, threshold: u64) {
        let rare_q = cq < threshold;
        let rare_p = cp < threshold;
        if rare_p {
            self.pool1.0 += cq;
            self.pool1.1 += cp;
            self.pool1_used = true;
        }
        if rare_q {
            self.pool2.0 += cq;
            self.pool2.1 += cp;
            self.pool2_used = true;
        }
        if !rare_q && !rare_p {
            self.survivors.push((symbol, cq, cp));
        }
    }

    /// Pairs of counts to be tested: survivors first, then the used pools.
    pub fn slots(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.survivors
            .iter()
            .map(|&(_, a, b)| (a, b))
            .chain(self.pool1_used.then_some(self.pool1))
            .chain(self.pool2_used.then_some(self.pool2))
    }
}

/// Pools two dense count vectors over the same alphabet.
pub fn pool_counts(counts_q: &[u64], counts_q_prime: &[u64], symbol_count: u64) -> PooledCounts {
    assert_eq!(
        counts_q.len(),
        counts_q_prime.len(),
        "count vectors over different alphabets"
    );
    let mut pooled = PooledCounts::default();
    for (a, (&cq, &cp)) in counts_q.iter().zip(counts_q_prime).enumerate() {
        if cq == 0 && cp == 0 {
            continue;
        }
        pooled.push(a as u32, cq, cp, symbol_count);
    }
    pooled
}

pub(crate) fn pool_sparse(
    q: &BTreeMap<u32, u64>,
    q_prime: &BTreeMap<u32, u64>,
    symbol_count: u64,
) -> PooledCounts {
    let mut pooled = PooledCounts::default();
    for_each_symbol(q, q_prime, |a, cq, cp| pooled.push(a, cq, cp, symbol_count));
    pooled
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn two_pool_table() {
        let q = [5, 5, 5, 2, 2, 1, 0, 0];
        let qp = [0, 0, 1, 2, 2, 5, 5, 5];
        let p = pool_counts(&q, &qp, 5);
        assert_eq!(p.pool1, (19, 5));
        assert_eq!(p.pool2, (5, 19));
        assert!(p.survivors.is_empty());
    }

    #[test]
    fn zero_threshold_pools_nothing() {
        let p = pool_counts(&[3, 0, 1], &[1, 2, 0], 0);
        assert!(!p.pool1_used && !p.pool2_used);
        assert_eq!(p.pool1, (0, 0));
        assert_eq!(p.survivors, vec![(0, 3, 1), (1, 0, 2), (2, 1, 0)]);
    }

    #[test]
    fn sparse_and_dense_agree() {
        let q = [4, 0, 9, 1];
        let qp = [0, 0, 7, 3];
        let sq: BTreeMap<u32, u64> = q
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| (a as u32, c))
            .collect();
        let sp: BTreeMap<u32, u64> = qp
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| (a as u32, c))
            .collect();
        assert_eq!(pool_sparse(&sq, &sp, 3), pool_counts(&q, &qp, 3));
    }

    proptest! {
        #[test]
        fn huge_threshold_pools_whole_rows(
            rows in prop::collection::vec((0u64..50, 0u64..50), 1..12)
        ) {
            let q: Vec<u64> = rows.iter().map(|r| r.0).collect();
            let qp: Vec<u64> = rows.iter().map(|r| r.1).collect();
            let sum_q: u64 = q.iter().sum();
            let sum_p: u64 = qp.iter().sum();
            let p = pool_counts(&q, &qp, 1000);
            prop_assert_eq!(p.pool1, (sum_q, sum_p));
            prop_assert_eq!(p.pool2, (sum_q, sum_p));
            prop_assert!(p.survivors.is_empty());
        }

        #[test]
        fn pools_match_brute_force(
            rows in prop::collection::vec((0u64..12, 0u64..12), 1..12),
            t in 0u64..12,
        ) {
            let q: Vec<u64> = rows.iter().map(|r| r.0).collect();
            let qp: Vec<u64> = rows.iter().map(|r| r.1).collect();
            let p = pool_counts(&q, &qp, t);
            let mut p1 = (0, 0);
            let mut p2 = (0, 0);
            let mut surv = 0;
            for i in 0..q.len() {
                if q[i] == 0 && qp[i] == 0 { continue; }
                if qp[i] < t { p1.0 += q[i]; p1.1 += qp[i]; }
                if q[i] < t { p2.0 += q[i]; p2.1 += qp[i]; }
                if q[i] >= t && qp[i] >= t { surv += 1; }
            }
            prop_assert_eq!(p.pool1, p1);
            prop_assert_eq!(p.pool2, p2);
            prop_assert_eq!(p.survivors.len(), surv);
        }
    }
}
