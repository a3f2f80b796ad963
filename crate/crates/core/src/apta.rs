//! The augmented prefix tree acceptor (APTA).
//!
//! Nodes are never removed. A merge sets the `rep` pointer of the absorbed
//! node and adds its counts to the surviving representative; lookups follow
//! `rep` pointers to the end of the chain. Paths are not compressed, so
//! undoing a merge only has to reset pointers and subtract counts.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::error::CoreError;
use crate::fnv::Fnv64;
use crate::trace::TraceSet;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
    White,
}

/// Occurrence counts of a state: `C(q)`, its final count and `C(q, a)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    /// Traces passing through or ending in the state.
    pub path: u64,
    /// Traces ending in the state.
    pub fin: u64,
    pub symbols: BTreeMap<u32, u64>,
}

impl Counts {
    pub fn symbol(&self, a: u32) -> u64 {
        self.symbols.get(&a).copied().unwrap_or(0)
    }

    /// Sample size behind the state's distribution. With final probabilities
    /// this is `C(q)`; without, endings are not events and only outgoing
    /// symbols count.
    pub fn total(&self, finalprob: bool) -> u64 {
        if finalprob {
            self.path
        } else {
            self.path - self.fin
        }
    }

    /// `Σ_a C(q,a) ln S(q,a)` plus the final term when `finalprob`.
    pub fn log_likelihood(&self, finalprob: bool) -> f64 {
        let total = self.total(finalprob);
        if total == 0 {
            return 0.0;
        }
        let t = total as f64;
        let mut ll = 0.0;
        for &c in self.symbols.values() {
            ll += xlogx_ratio(c, t);
        }
        if finalprob {
            ll += xlogx_ratio(self.fin, t);
        }
        ll
    }

    /// Number of transition parameters: non-zero symbols, plus the final
    /// probability when it is modelled and non-zero.
    pub fn parameters(&self, finalprob: bool) -> u64 {
        let mut n = self.symbols.values().filter(|&&c| c > 0).count() as u64;
        if finalprob && self.fin > 0 {
            n += 1;
        }
        n
    }

    pub(crate) fn add(&mut self, other: &Counts) {
        self.path += other.path;
        self.fin += other.fin;
        for (&a, &c) in &other.symbols {
            *self.symbols.entry(a).or_insert(0) += c;
        }
    }

    pub(crate) fn subtract(&mut self, other: &Counts) {
        self.path -= other.path;
        self.fin -= other.fin;
        for (&a, &c) in &other.symbols {
            let entry = self.symbols.get_mut(&a).expect("subtracting absent symbol");
            *entry -= c;
            if *entry == 0 {
                self.symbols.remove(&a);
            }
        }
    }
}

/// `c · ln(c / t)` with `0 · ln 0 = 0`.
#[inline]
pub(crate) fn xlogx_ratio(c: u64, t: f64) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * libm::log(c / t)
    }
}

/// Normalized symbol and final probabilities of one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub symbols: BTreeMap<u32, f64>,
    pub fin: f64,
}

/// Prefix-tree reference weights `Σ_p C_p(p,a) · S_p(p,a)` over the prefix
/// tree nodes of a class; aggregated alongside the counts for MDI.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RefWeights {
    pub symbols: BTreeMap<u32, f64>,
    pub fin: f64,
}

impl RefWeights {
    pub(crate) fn add(&mut self, other: &RefWeights) {
        self.fin += other.fin;
        for (&a, &w) in &other.symbols {
            *self.symbols.entry(a).or_insert(0.0) += w;
        }
    }

    pub fn get(&self, a: u32) -> f64 {
        self.symbols.get(&a).copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub depth: u32,
    pub parent: Option<NodeId>,
    /// Symbol on the tree edge into this node; `None` for the root.
    pub incoming: Option<u32>,
    /// Outgoing transitions. For a representative this is the transition
    /// function of its whole class; targets must be resolved with
    /// [`Apta::find`].
    pub children: BTreeMap<u32, NodeId>,
    pub rep: Option<NodeId>,
    pub color: Color,
    pub counts: Counts,
    /// Counts of this node alone as built from the sample.
    pub tree_counts: Counts,
    pub weights: RefWeights,
}

impl Node {
    fn new(depth: u32, parent: Option<NodeId>, incoming: Option<u32>) -> Self {
        Node {
            depth,
            parent,
            incoming,
            children: BTreeMap::new(),
            rep: None,
            color: Color::White,
            counts: Counts::default(),
            tree_counts: Counts::default(),
            weights: RefWeights::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Apta {
    pub(crate) nodes: Vec<Node>,
    pub alphabet_size: u32,
}

impl Apta {
    /// Builds the prefix tree of `ts`.
    ///
    /// Node ids follow breadth-first order with children visited by
    /// ascending symbol. The root is red and its children blue.
    pub fn build(ts: &TraceSet) -> Apta {
        // Trie in insertion order first, renumbered breadth-first below.
        let mut trie: Vec<(BTreeMap<u32, usize>, Counts)> =
            vec![(BTreeMap::new(), Counts::default())];
        for trace in &ts.traces {
            let mut cur = 0usize;
            trie[cur].1.path += 1;
            for &a in &trace.symbols {
                *trie[cur].1.symbols.entry(a).or_insert(0) += 1;
                let next = match trie[cur].0.get(&a) {
                    Some(&n) => n,
                    None => {
                        trie.push((BTreeMap::new(), Counts::default()));
                        let n = trie.len() - 1;
                        trie[cur].0.insert(a, n);
                        n
                    }
                };
                cur = next;
                trie[cur].1.path += 1;
            }
            trie[cur].1.fin += 1;
        }

        let mut nodes: Vec<Node> = Vec::with_capacity(trie.len());
        let mut queue = VecDeque::new();
        let mut root = Node::new(0, None, None);
        root.counts = trie[0].1.clone();
        nodes.push(root);
        queue.push_back((0usize, NodeId::ROOT));
        while let Some((old, id)) = queue.pop_front() {
            let depth = nodes[id.index()].depth;
            let kids: Vec<(u32, usize)> = trie[old].0.iter().map(|(&a, &n)| (a, n)).collect();
            for (a, child_old) in kids {
                let cid = NodeId(nodes.len() as u32);
                let mut child = Node::new(depth + 1, Some(id), Some(a));
                child.counts = core::mem::take(&mut trie[child_old].1);
                nodes.push(child);
                nodes[id.index()].children.insert(a, cid);
                queue.push_back((child_old, cid));
            }
        }
        for n in &mut nodes {
            n.tree_counts = n.counts.clone();
        }

        let mut apta = Apta {
            nodes,
            alphabet_size: ts.alphabet_size,
        };
        apta.nodes[0].color = Color::Red;
        apta.recolor();
        apta
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.index()]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Follows representative pointers to the end of the chain.
    pub fn find(&self, mut q: NodeId) -> NodeId {
        while let Some(r) = self.nodes[q.index()].rep {
            q = r;
        }
        q
    }

    pub fn is_representative(&self, q: NodeId) -> bool {
        self.nodes[q.index()].rep.is_none()
    }

    /// Target of the `a` transition out of representative `q`, resolved to
    /// its representative.
    pub fn resolve_transition(&self, q: NodeId, a: u32) -> Option<NodeId> {
        self.nodes[q.index()]
            .children
            .get(&a)
            .map(|&c| self.find(c))
    }

    pub fn counts(&self, q: NodeId) -> &Counts {
        &self.nodes[q.index()].counts
    }

    /// `S(q, ·)` and `F(q)` normalized by `C(q)`.
    pub fn probabilities(&self, q: NodeId) -> Result<Distribution, CoreError> {
        let c = self.counts(q);
        if c.path == 0 {
            return Err(CoreError::EmptyState(q.0));
        }
        let t = c.path as f64;
        Ok(Distribution {
            symbols: c.symbols.iter().map(|(&a, &n)| (a, n as f64 / t)).collect(),
            fin: c.fin as f64 / t,
        })
    }

    pub fn representatives(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(move |&q| self.is_representative(q))
    }

    pub fn red_states(&self) -> Vec<NodeId> {
        self.representatives()
            .filter(|&q| self.nodes[q.index()].color == Color::Red)
            .collect()
    }

    pub fn blue_states(&self) -> Vec<NodeId> {
        self.representatives()
            .filter(|&q| self.nodes[q.index()].color == Color::Blue)
            .collect()
    }

    /// Colors every non-red target of a red state blue and every other
    /// non-red node white.
    pub fn recolor(&mut self) {
        let reds = self.red_states();
        for n in &mut self.nodes {
            if n.color == Color::Blue || (n.rep.is_some() && n.color != Color::Red) {
                n.color = Color::White;
            }
        }
        for r in reds {
            let targets: Vec<NodeId> = self.nodes[r.index()]
                .children
                .values()
                .map(|&c| self.find(c))
                .collect();
            for t in targets {
                let node = &mut self.nodes[t.index()];
                if node.color != Color::Red {
                    node.color = Color::Blue;
                }
            }
        }
    }

    pub(crate) fn set_color(&mut self, q: NodeId, color: Color) {
        self.nodes[q.index()].color = color;
    }

    /// Full-model log-likelihood of the training sample, summed over
    /// representatives.
    pub fn log_likelihood(&self, finalprob: bool) -> f64 {
        self.representatives()
            .map(|q| self.counts(q).log_likelihood(finalprob))
            .sum()
    }

    /// Fills the MDI reference weights `C_p(p,a)² / C_p(p)` from the tree
    /// counts. Must be called before any merge.
    pub fn prepare_reference_weights(&mut self, finalprob: bool) {
        for n in &mut self.nodes {
            debug_assert!(n.rep.is_none());
            let c = &n.tree_counts;
            let total = c.total(finalprob);
            let mut w = RefWeights::default();
            if total > 0 {
                let t = total as f64;
                for (&a, &k) in &c.symbols {
                    let k = k as f64;
                    w.symbols.insert(a, k * k / t);
                }
                if finalprob {
                    let f = c.fin as f64;
                    w.fin = f * f / t;
                }
            }
            n.weights = w;
        }
    }

    /// Hash over representatives, counts, transitions and colors.
    pub fn structural_hash(&self) -> u64 {
        let mut h = Fnv64::default();
        self.alphabet_size.hash(&mut h);
        for n in &self.nodes {
            n.rep.hash(&mut h);
            n.color.hash(&mut h);
            n.counts.hash(&mut h);
            n.children.hash(&mut h);
            n.weights.fin.to_bits().hash(&mut h);
            for (a, w) in &n.weights.symbols {
                a.hash(&mut h);
                w.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    #[cfg(test)]
    pub(crate) fn set_rep_for_test(&mut self, q: NodeId, r: NodeId) {
        self.nodes[q.index()].rep = Some(r);
    }
}
