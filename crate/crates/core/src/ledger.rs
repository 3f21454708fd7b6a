//! Union-find forest with exact running component moments.
//!
//! A [`ComponentLedger`] owns a [`DisjointSetForest`] together with a
//! [`MomentLedger`] holding the power sums `S_k = Σ C_i^k` for `k = 1..=4`,
//! the largest component size, and the number of isolated vertices. Every
//! merge of components of sizes `a` and `b` changes `S_k` by exactly
//! `(a+b)^k - a^k - b^k`, so the sums stay exact without rescanning.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LedgerError {
    #[error("invalid vertex count {0}; need at least one vertex")]
    InvalidSize(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("moment order {0} not tracked (expected 2..=4)")]
    InvalidOrder(u32),
    #[error("exact moment accumulator overflowed")]
    Overflow,
    #[error("invalid size distribution: {0}")]
    InvalidDistribution(String),
}

/// Result of offering one edge to the ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeOutcome {
    /// Two distinct components of the given sizes were joined.
    Merged {
        a: u64,
        b: u64,
    },
    SameComponent,
    Loop,
}

impl MergeOutcome {
    pub fn is_merge(&self) -> bool {
        matches!(self, MergeOutcome::Merged { .. })
    }
}

/// `(a+b)^k - a^k - b^k` for `k` in `2..=4`, via the binomial expansion.
pub fn delta_k(a: u64, b: u64, k: u32) -> Result<u128, LedgerError> {
    let (a, b) = (a as u128, b as u128);
    let mul = |x: u128, y: u128| x.checked_mul(y).ok_or(LedgerError::Overflow);
    let add = |x: u128, y: u128| x.checked_add(y).ok_or(LedgerError::Overflow);
    match k {
        2 => mul(2, mul(a, b)?),
        3 => {
            let ab = mul(a, b)?;
            mul(3, mul(ab, add(a, b)?)?)
        }
        4 => {
            // 4a³b + 6a²b² + 4ab³ = ab(4a² + 6ab + 4b²)
            let ab = mul(a, b)?;
            let inner = add(add(mul(4, mul(a, a)?)?, mul(6, ab)?)?, mul(4, mul(b, b)?)?)?;
            mul(ab, inner)
        }
        other => Err(LedgerError::InvalidOrder(other)),
    }
}

/// Parent links with path compression and sizes stored at the roots.
#[derive(Debug, Clone)]
pub struct DisjointSetForest {
    parent: Vec<u32>,
    comp_size: Vec<u32>,
}

impl DisjointSetForest {
    pub fn new(n: usize) -> Result<Self, LedgerError> {
        if n == 0 || n > u32::MAX as usize {
            return Err(LedgerError::InvalidSize(n));
        }
        Ok(Self {
            parent: (0..n as u32).collect(),
            comp_size: vec![1; n],
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, v: usize) -> usize {
        let mut root = v as u32;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v as u32;
        while cur != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root as usize
    }

    /// Size of the component containing `v`.
    #[inline]
    pub fn size_of(&mut self, v: usize) -> u64 {
        let r = self.find(v);
        self.comp_size[r] as u64
    }

    /// Joins two distinct roots by size; on ties `ra` stays the root.
    fn link_roots(&mut self, ra: usize, rb: usize) -> usize {
        let (keep, drop) = if self.comp_size[ra] >= self.comp_size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[drop] = keep as u32;
        self.comp_size[keep] += self.comp_size[drop];
        keep
    }

    /// Iterates over the sizes of all components (one entry per root).
    pub fn component_sizes(&self) -> impl Iterator<Item = u64> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(v, &p)| p as usize == v)
            .map(move |(v, _)| self.comp_size[v] as u64)
    }
}

/// Exact running statistics of the component structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentLedger {
    /// `S_1..S_4`.
    s_sums: [u128; 4],
    c1_size: u64,
    n1_isolated: u64,
    edge_insertions: u64,
}

impl MomentLedger {
    fn new(n: u64) -> Self {
        let n128 = n as u128;
        Self {
            s_sums: [n128; 4],
            c1_size: 1,
            n1_isolated: n,
            edge_insertions: 0,
        }
    }

    pub fn n(&self) -> u64 {
        self.s_sums[0] as u64
    }

    /// Raw power sum `S_k` for `k` in `1..=4`.
    pub fn s_sum(&self, k: usize) -> u128 {
        assert!((1..=4).contains(&k), "moment order {k} not tracked");
        self.s_sums[k - 1]
    }

    /// Normalised moment `s_k = S_k / n`.
    pub fn s(&self, k: usize) -> f64 {
        self.s_sum(k) as f64 / self.n() as f64
    }

    pub fn c1(&self) -> u64 {
        self.c1_size
    }

    pub fn n1(&self) -> u64 {
        self.n1_isolated
    }

    /// Fraction of isolated vertices.
    pub fn x1(&self) -> f64 {
        self.n1_isolated as f64 / self.n() as f64
    }

    /// Number of `add_edge` calls that passed validation (loops and
    /// intra-component edges included).
    pub fn edge_insertions(&self) -> u64 {
        self.edge_insertions
    }

    fn apply_merge(&mut self, a: u64, b: u64) -> Result<(), LedgerError> {
        for k in 2..=4u32 {
            let d = delta_k(a, b, k)?;
            let slot = &mut self.s_sums[(k - 1) as usize];
            *slot = slot.checked_add(d).ok_or(LedgerError::Overflow)?;
        }
        self.c1_size = self.c1_size.max(a + b);
        self.n1_isolated -= (a == 1) as u64 + (b == 1) as u64;
        Ok(())
    }
}

/// A forest and its moment ledger, mutated together.
#[derive(Debug, Clone)]
pub struct ComponentLedger {
    forest: DisjointSetForest,
    moments: MomentLedger,
}

impl ComponentLedger {
    /// `n` singleton components.
    pub fn new(n: usize) -> Result<Self, LedgerError> {
        let forest = DisjointSetForest::new(n)?;
        Ok(Self {
            forest,
            moments: MomentLedger::new(n as u64),
        })
    }

    pub fn n(&self) -> usize {
        self.forest.len()
    }

    pub fn forest(&self) -> &DisjointSetForest {
        &self.forest
    }

    pub fn moments(&self) -> &MomentLedger {
        &self.moments
    }

    pub fn size_of(&mut self, v: usize) -> u64 {
        self.forest.size_of(v)
    }

    fn check_vertex(&self, v: usize) -> Result<(), LedgerError> {
        if v >= self.n() {
            Err(LedgerError::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<MergeOutcome, LedgerError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        self.moments.edge_insertions += 1;
        if u == v {
            return Ok(MergeOutcome::Loop);
        }
        let (ru, rv) = (self.forest.find(u), self.forest.find(v));
        if ru == rv {
            return Ok(MergeOutcome::SameComponent);
        }
        let a = self.forest.comp_size[ru] as u64;
        let b = self.forest.comp_size[rv] as u64;
        self.moments.apply_merge(a, b)?;
        self.forest.link_roots(ru, rv);
        Ok(MergeOutcome::Merged { a, b })
    }

    pub fn snapshot_distribution(&self) -> SizeDistribution {
        SizeDistribution::from_sizes(self.forest.component_sizes())
            .expect("forest always has at least one component")
    }
}

/// Histogram `size → number of components of that size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeDistribution {
    counts: BTreeMap<u64, u64>,
}

impl SizeDistribution {
    pub fn from_sizes(sizes: impl IntoIterator<Item = u64>) -> Result<Self, LedgerError> {
        let mut counts = BTreeMap::new();
        for s in sizes {
            if s == 0 {
                return Err(LedgerError::InvalidDistribution(
                    "zero component size".into(),
                ));
            }
            *counts.entry(s).or_insert(0) += 1;
        }
        if counts.is_empty() {
            return Err(LedgerError::InvalidDistribution("no components".into()));
        }
        Ok(Self { counts })
    }

    /// Builds from `(size, count)` pairs; repeated sizes are summed.
    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, LedgerError> {
        let mut counts = BTreeMap::new();
        for (size, count) in pairs {
            if size == 0 || count == 0 {
                return Err(LedgerError::InvalidDistribution(format!(
                    "entry {size}:{count} must have size and count ≥ 1"
                )));
            }
            *counts.entry(size).or_insert(0) += count;
        }
        if counts.is_empty() {
            return Err(LedgerError::InvalidDistribution("no components".into()));
        }
        Ok(Self { counts })
    }

    /// `(size, count)` pairs in increasing size order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    pub fn count(&self, size: u64) -> u64 {
        self.counts.get(&size).copied().unwrap_or(0)
    }

    pub fn distinct_sizes(&self) -> usize {
        self.counts.len()
    }

    pub fn components(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Total number of vertices `Σ size·count`.
    pub fn n(&self) -> u64 {
        self.iter().map(|(s, c)| s * c).sum()
    }

    /// Exact power sum `S_k`.
    pub fn s_sum(&self, k: u32) -> u128 {
        self.iter()
            .map(|(s, c)| (s as u128).pow(k) * c as u128)
            .sum()
    }

    /// `s_k = S_k / n`, i.e. `E Z^{k-1}` for the size-biased size `Z`.
    pub fn s(&self, k: u32) -> f64 {
        self.s_sum(k) as f64 / self.n() as f64
    }

    /// `i`-th largest component size (1-based), zero beyond the last.
    pub fn c(&self, i: usize) -> u64 {
        let mut remaining = i as u64;
        for (&s, &c) in self.counts.iter().rev() {
            if remaining <= c {
                return s;
            }
            remaining -= c;
        }
        0
    }

    pub fn c1(&self) -> u64 {
        self.c(1)
    }

    pub fn c2(&self) -> u64 {
        self.c(2)
    }

    pub fn isolated(&self) -> u64 {
        self.count(1)
    }

    /// Law of `Z`: `(size, P(Z = size))` with `P(Z = s) = s·count/n`.
    pub fn size_biased(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let n = self.n() as f64;
        self.iter().map(move |(s, c)| (s, (s * c) as f64 / n))
    }
}

/// Ground-truth statistics from a fresh traversal of an explicit edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceMoments {
    pub s_sums: [u128; 4],
    pub c1: u64,
    pub c2: u64,
    pub n1: u64,
}

/// Labels components by breadth-first search over an adjacency list and
/// takes direct power sums. Independent of the forest and the Δ updates.
pub fn brute_force_moments(edges: &[(usize, usize)], n: usize) -> BruteForceMoments {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0u64;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut s_sums = [0u128; 4];
    for &s in &sizes {
        let mut p = 1u128;
        for slot in s_sums.iter_mut() {
            p *= s as u128;
            *slot += p;
        }
    }
    BruteForceMoments {
        s_sums,
        c1: sizes.first().copied().unwrap_or(0),
        c2: sizes.get(1).copied().unwrap_or(0),
        n1: sizes.iter().filter(|&&s| s == 1).count() as u64,
    }
}
