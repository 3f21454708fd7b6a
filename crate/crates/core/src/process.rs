//! Evolving random graphs: Erdős–Rényi variants, Bohman–Frieze, and the
//! product rule, all driven on top of a [`ComponentLedger`].
//!
//! Process time follows the usual scale: `t` corresponds to `⌊nt/2⌋`
//! attempted insertions, or to `Po((n-1)t/2)` insertions for the
//! continuous-time variant.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::{ComponentLedger, LedgerError, MergeOutcome, SizeDistribution};

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcessError {
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("invalid initial graph spec: {0}")]
    InvalidSpec(String),
    #[error("unknown process `{0}` (expected er, er-wr, er-poisson, bf or product)")]
    UnknownProcess(String),
    #[error("initial graph needs {needed} vertices but only {n} are available")]
    SpecExceedsN { needed: u64, n: usize },
    #[error("graph is complete; no new edge can be drawn without replacement")]
    GraphComplete,
    #[error("need at least two vertices to draw an edge")]
    TooFewVertices,
    #[error("{0:?} is not an Erdős–Rényi variant")]
    NotErKind(ProcessKind),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Seeded generator for replicate `run` of a run family: `seed ⊕ run`.
pub fn replicate_rng(seed: u64, run: u64) -> SimRng {
    SimRng::seed_from_u64(seed ^ run)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessKind {
    /// `G(n, m; F)`: uniformly random new edges, never repeating one.
    #[serde(rename = "er")]
    ErWithoutReplacement,
    /// `G*(n, m; F)`: uniform pairs, duplicates are attempted but inert.
    #[serde(rename = "er-wr")]
    ErWithReplacement,
    /// `G̃(n, t; F)`: a Poisson number of uniform pairs.
    #[serde(rename = "er-poisson")]
    ErPoissonTime,
    #[serde(rename = "bf")]
    BohmanFrieze,
    #[serde(rename = "product")]
    ProductRule,
}

impl ProcessKind {
    pub const ER_VARIANTS: [ProcessKind; 3] = [
        ProcessKind::ErWithoutReplacement,
        ProcessKind::ErWithReplacement,
        ProcessKind::ErPoissonTime,
    ];

    pub fn is_er(self) -> bool {
        Self::ER_VARIANTS.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::ErWithoutReplacement => "er",
            ProcessKind::ErWithReplacement => "er-wr",
            ProcessKind::ErPoissonTime => "er-poisson",
            ProcessKind::BohmanFrieze => "bf",
            ProcessKind::ProductRule => "product",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProcessKind {
    type Err = ProcessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "er" => ProcessKind::ErWithoutReplacement,
            "er-wr" => ProcessKind::ErWithReplacement,
            "er-poisson" => ProcessKind::ErPoissonTime,
            "bf" => ProcessKind::BohmanFrieze,
            "product" => ProcessKind::ProductRule,
            other => return Err(ProcessError::UnknownProcess(other.to_string())),
        })
    }
}

/// Component sizes of the initial graph as `(size, count)` pairs; all other
/// vertices start isolated. Written as `size:count,size:count`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InitialGraphSpec {
    parts: Vec<(u64, u64)>,
}

impl InitialGraphSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(parts: Vec<(u64, u64)>) -> Result<Self, ProcessError> {
        if let Some(&(s, c)) = parts.iter().find(|&&(s, c)| s == 0 || c == 0) {
            return Err(ProcessError::InvalidSpec(format!(
                "part {s}:{c} must have size and count ≥ 1"
            )));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[(u64, u64)] {
        &self.parts
    }

    /// Vertices covered by the listed parts.
    pub fn vertices(&self) -> u64 {
        self.parts.iter().map(|&(s, c)| s * c).sum()
    }

    pub fn check_fits(&self, n: usize) -> Result<(), ProcessError> {
        let needed = self.vertices();
        if needed > n as u64 {
            Err(ProcessError::SpecExceedsN { needed, n })
        } else {
            Ok(())
        }
    }

    /// Exact component-size histogram of the realised initial graph.
    pub fn distribution(&self, n: usize) -> Result<SizeDistribution, ProcessError> {
        self.check_fits(n)?;
        let singles = n as u64 - self.vertices();
        let extra = (singles > 0).then_some((1, singles));
        Ok(SizeDistribution::from_counts(
            self.parts.iter().copied().chain(extra),
        )?)
    }
}

impl FromStr for InitialGraphSpec {
    type Err = ProcessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split(',')
            .map(|item| {
                let (size, count) = item.trim().split_once(':').ok_or_else(|| {
                    ProcessError::InvalidSpec(format!("`{item}` is not size:count"))
                })?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|e| ProcessError::InvalidSpec(format!("`{item}`: {e}")))
                };
                Ok((parse(size)?, parse(count)?))
            })
            .collect::<Result<Vec<_>, ProcessError>>()?;
        Self::new(parts)
    }
}

impl fmt::Display for InitialGraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, c)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}:{c}")?;
        }
        Ok(())
    }
}

/// Realises `spec` as vertex-disjoint paths on consecutive vertex ranges
/// starting at 0. Returns the inserted path edges.
pub fn build_initial_graph(
    spec: &InitialGraphSpec,
    ledger: &mut ComponentLedger,
) -> Result<Vec<(usize, usize)>, ProcessError> {
    spec.check_fits(ledger.n())?;
    let mut edges = Vec::new();
    let mut next = 0usize;
    for &(size, count) in spec.parts() {
        for _ in 0..count {
            for i in 0..size.saturating_sub(1) as usize {
                edges.push((next + i, next + i + 1));
            }
            next += size as usize;
        }
    }
    for &(u, v) in &edges {
        ledger.add_edge(u, v)?;
    }
    Ok(edges)
}

/// Which of the two offered edges an Achlioptas rule inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pick {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleOutcome {
    pub pick: Pick,
    pub merge: MergeOutcome,
}

/// Observables recorded at one instant of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: f64,
    pub m: u64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub c1_frac: f64,
    pub c2_frac: f64,
    pub x1: f64,
}

#[inline]
fn edge_key(u: usize, v: usize) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

/// Bohman–Frieze choice: `e1` iff both its endpoints are isolated.
pub fn bf_choose(ledger: &mut ComponentLedger, e1: (usize, usize), _e2: (usize, usize)) -> Pick {
    if ledger.size_of(e1.0) == 1 && ledger.size_of(e1.1) == 1 {
        Pick::First
    } else {
        Pick::Second
    }
}

/// Product rule: the offered edge with the larger product of endpoint
/// component sizes; ties go to `e1`.
pub fn product_rule_choose(
    ledger: &mut ComponentLedger,
    e1: (usize, usize),
    e2: (usize, usize),
) -> Pick {
    let p1 = ledger.size_of(e1.0) * ledger.size_of(e1.1);
    let p2 = ledger.size_of(e2.0) * ledger.size_of(e2.1);
    if p2 > p1 {
        Pick::Second
    } else {
        Pick::First
    }
}

/// Sample of `Po((n-1)t/2)`, the number of edges arriving by time `t` in
/// the continuous-time process.
pub fn poisson_edge_count<R: Rng + ?Sized>(t: f64, n: usize, rng: &mut R) -> u64 {
    let mean = (n as f64 - 1.0) * t / 2.0;
    poisson_sample(mean, rng)
}

pub(crate) fn poisson_sample<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("finite positive Poisson mean");
    dist.sample(rng) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// Achlioptas rules draw their four vertices independently, so offered
    /// edges may be loops. With `false` each offered edge is resampled
    /// until its endpoints differ.
    pub loops: bool,
    /// Keep the set of distinct present edges. Required by
    /// [`ProcessKind::ErWithoutReplacement`].
    pub track_edges: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            loops: true,
            track_edges: false,
        }
    }
}

impl SimOptions {
    pub fn for_kind(kind: ProcessKind, loops: bool) -> Self {
        Self {
            loops,
            track_edges: kind == ProcessKind::ErWithoutReplacement,
        }
    }
}

/// One live run: a ledger, its generator, and counters.
#[derive(Debug, Clone)]
pub struct Simulation {
    ledger: ComponentLedger,
    rng: SimRng,
    loops: bool,
    attempted: u64,
    edges: Option<HashSet<u64>>,
}

impl Simulation {
    pub fn new(
        n: usize,
        initial: &InitialGraphSpec,
        rng: SimRng,
        opts: SimOptions,
    ) -> Result<Self, ProcessError> {
        let mut ledger = ComponentLedger::new(n)?;
        let initial_edges = build_initial_graph(initial, &mut ledger)?;
        let edges = opts
            .track_edges
            .then(|| initial_edges.iter().map(|&(u, v)| edge_key(u, v)).collect());
        Ok(Self {
            ledger,
            rng,
            loops: opts.loops,
            attempted: 0,
            edges,
        })
    }

    pub fn ledger(&self) -> &ComponentLedger {
        &self.ledger
    }

    pub fn n(&self) -> usize {
        self.ledger.n()
    }

    /// Insertions attempted since the initial graph, duplicates and loops
    /// included.
    pub fn attempted(&self) -> u64 {
        self.attempted
    }

    /// Distinct non-loop edges present (initial edges included), when the
    /// edge log is on.
    pub fn distinct_edges(&self) -> Option<usize> {
        self.edges.as_ref().map(HashSet::len)
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    #[inline]
    fn random_vertex(&mut self) -> usize {
        self.rng.random_range(0..self.ledger.n())
    }

    /// Uniform pair of distinct vertices.
    fn random_pair(&mut self) -> Result<(usize, usize), ProcessError> {
        let n = self.ledger.n();
        if n < 2 {
            return Err(ProcessError::TooFewVertices);
        }
        let u = self.rng.random_range(0..n);
        let mut v = self.rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        Ok((u, v))
    }

    fn offered_edge(&mut self) -> Result<(usize, usize), ProcessError> {
        if self.loops {
            Ok((self.random_vertex(), self.random_vertex()))
        } else {
            self.random_pair()
        }
    }

    fn insert(&mut self, (u, v): (usize, usize)) -> Result<MergeOutcome, ProcessError> {
        let outcome = self.ledger.add_edge(u, v)?;
        self.attempted += 1;
        if let Some(log) = self.edges.as_mut() {
            if u != v {
                log.insert(edge_key(u, v));
            }
        }
        Ok(outcome)
    }

    /// One Erdős–Rényi insertion. The Poisson-time variant inserts a single
    /// uniform pair here; the Poisson count is applied by the caller.
    pub fn er_step(&mut self, kind: ProcessKind) -> Result<MergeOutcome, ProcessError> {
        match kind {
            ProcessKind::ErWithoutReplacement => {
                let n = self.ledger.n() as u64;
                let complete = n * n.saturating_sub(1) / 2;
                let present = self
                    .edges
                    .as_ref()
                    .map(|e| e.len() as u64)
                    .ok_or_else(|| ProcessError::InvalidSchedule("edge log required".into()))?;
                if present >= complete {
                    return Err(ProcessError::GraphComplete);
                }
                let pair = loop {
                    let (u, v) = self.random_pair()?;
                    if !self.edges.as_ref().unwrap().contains(&edge_key(u, v)) {
                        break (u, v);
                    }
                };
                self.insert(pair)
            }
            ProcessKind::ErWithReplacement | ProcessKind::ErPoissonTime => {
                let pair = self.random_pair()?;
                self.insert(pair)
            }
            other => Err(ProcessError::NotErKind(other)),
        }
    }

    pub fn bf_step(&mut self) -> Result<RuleOutcome, ProcessError> {
        let e1 = self.offered_edge()?;
        let e2 = self.offered_edge()?;
        let pick = bf_choose(&mut self.ledger, e1, e2);
        let merge = self.insert(if pick == Pick::First { e1 } else { e2 })?;
        Ok(RuleOutcome { pick, merge })
    }

    pub fn product_rule_step(&mut self) -> Result<RuleOutcome, ProcessError> {
        let e1 = self.offered_edge()?;
        let e2 = self.offered_edge()?;
        let pick = product_rule_choose(&mut self.ledger, e1, e2);
        let merge = self.insert(if pick == Pick::First { e1 } else { e2 })?;
        Ok(RuleOutcome { pick, merge })
    }

    pub fn step(&mut self, kind: ProcessKind) -> Result<MergeOutcome, ProcessError> {
        match kind {
            ProcessKind::BohmanFrieze => self.bf_step().map(|o| o.merge),
            ProcessKind::ProductRule => self.product_rule_step().map(|o| o.merge),
            er => self.er_step(er),
        }
    }

    pub fn advance(&mut self, kind: ProcessKind, steps: u64) -> Result<(), ProcessError> {
        for _ in 0..steps {
            self.step(kind)?;
        }
        Ok(())
    }

    /// Runs until `attempted() == target` (no-op if already past it).
    pub fn advance_to(&mut self, kind: ProcessKind, target: u64) -> Result<(), ProcessError> {
        let steps = target.saturating_sub(self.attempted);
        self.advance(kind, steps)
    }

    /// Adds `Po((n-1)Δt/2)` uniform pairs.
    pub fn advance_poisson(&mut self, dt: f64) -> Result<u64, ProcessError> {
        let count = poisson_edge_count(dt, self.n(), &mut self.rng);
        self.advance(ProcessKind::ErPoissonTime, count)?;
        Ok(count)
    }

    /// Snapshot of the observables, labelled with process time `t`.
    pub fn record(&self, t: f64) -> TraceRecord {
        let m = self.ledger.moments();
        let n = self.n() as f64;
        let c2 = self.ledger.snapshot_distribution().c2();
        TraceRecord {
            t,
            m: self.attempted,
            s2: m.s(2),
            s3: m.s(3),
            s4: m.s(4),
            c1_frac: m.c1() as f64 / n,
            c2_frac: c2 as f64 / n,
            x1: m.x1(),
        }
    }
}

/// Attempted insertions corresponding to process time `t`: `⌊nt/2⌋`.
pub fn steps_for_time(n: usize, t: f64) -> u64 {
    (n as f64 * t / 2.0).floor() as u64
}

/// Nearest insertion index to process time `t`.
pub fn nearest_step(n: usize, t: f64) -> u64 {
    (n as f64 * t / 2.0).round() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ProcessKind,
    pub n: usize,
    pub initial: InitialGraphSpec,
    pub t_end: f64,
    pub record_at: Vec<f64>,
    pub seed: u64,
    pub loops: bool,
}

impl RunConfig {
    pub fn new(kind: ProcessKind, n: usize, t_end: f64, record_at: Vec<f64>, seed: u64) -> Self {
        Self {
            kind,
            n,
            initial: InitialGraphSpec::empty(),
            t_end,
            record_at,
            seed,
            loops: true,
        }
    }

    pub fn with_initial(mut self, initial: InitialGraphSpec) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_loops(mut self, loops: bool) -> Self {
        self.loops = loops;
        self
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(ProcessError::InvalidSchedule(format!(
                "t_end = {}",
                self.t_end
            )));
        }
        if self.record_at.windows(2).any(|w| w[0] > w[1]) {
            return Err(ProcessError::InvalidSchedule(
                "record times must be sorted".into(),
            ));
        }
        if let Some(&t) = self
            .record_at
            .iter()
            .find(|&&t| !(0.0..=self.t_end).contains(&t))
        {
            return Err(ProcessError::InvalidSchedule(format!(
                "record time {t} outside [0, {}]",
                self.t_end
            )));
        }
        Ok(())
    }
}

/// Runs one seeded process and returns a record per entry of `record_at`.
///
/// Discrete-time kinds perform `⌊n·t_end/2⌋` insertions and record at the
/// insertion index nearest to each requested time (the record's `t` is
/// `2m/n`). The Poisson-time kind draws independent Poisson increments
/// between consecutive record times and labels records with the requested
/// time.
pub fn run_process(cfg: &RunConfig) -> Result<Vec<TraceRecord>, ProcessError> {
    cfg.validate()?;
    let rng = SimRng::seed_from_u64(cfg.seed);
    let mut sim = Simulation::new(
        cfg.n,
        &cfg.initial,
        rng,
        SimOptions::for_kind(cfg.kind, cfg.loops),
    )?;
    let mut out = Vec::with_capacity(cfg.record_at.len());
    if cfg.kind == ProcessKind::ErPoissonTime {
        let mut now = 0.0;
        for &t in &cfg.record_at {
            sim.advance_poisson(t - now)?;
            now = t;
            out.push(sim.record(t));
        }
        sim.advance_poisson(cfg.t_end - now)?;
    } else {
        let m_end = steps_for_time(cfg.n, cfg.t_end);
        for &t in &cfg.record_at {
            let m = nearest_step(cfg.n, t).min(m_end);
            sim.advance_to(cfg.kind, m)?;
            out.push(sim.record(2.0 * m as f64 / cfg.n as f64));
        }
        sim.advance_to(cfg.kind, m_end)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(n: usize, seed: u64) -> Simulation {
        Simulation::new(
            n,
            &InitialGraphSpec::empty(),
            SimRng::seed_from_u64(seed),
            SimOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn initial_graph_examples() {
        let spec: InitialGraphSpec = "3:2".parse().unwrap();
        let mut l = ComponentLedger::new(10).unwrap();
        build_initial_graph(&spec, &mut l).unwrap();
        let d = l.snapshot_distribution();
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![(1, 4), (3, 2)]);
        assert!((l.moments().s(2) - 2.2).abs() < 1e-12);
        assert_eq!(spec.distribution(10).unwrap(), d);

        let mut l = ComponentLedger::new(10).unwrap();
        build_initial_graph(&InitialGraphSpec::empty(), &mut l).unwrap();
        assert_eq!(l.moments().s(2), 1.0);

        let mut l = ComponentLedger::new(10).unwrap();
        build_initial_graph(&"10:1".parse().unwrap(), &mut l).unwrap();
        assert_eq!(l.moments().s(2), 10.0);

        let mut l = ComponentLedger::new(10).unwrap();
        let too_big: InitialGraphSpec = "4:3".parse().unwrap();
        assert_eq!(
            build_initial_graph(&too_big, &mut l),
            Err(ProcessError::SpecExceedsN { needed: 12, n: 10 })
        );
    }

    #[test]
    fn spec_parsing() {
        let s: InitialGraphSpec = "3:100, 7:2".parse().unwrap();
        assert_eq!(s.parts(), &[(3, 100), (7, 2)]);
        assert_eq!(s.to_string(), "3:100,7:2");
        assert!("3".parse::<InitialGraphSpec>().is_err());
        assert!("3:0".parse::<InitialGraphSpec>().is_err());
        assert!("x:1".parse::<InitialGraphSpec>().is_err());
        assert_eq!(
            "".parse::<InitialGraphSpec>().unwrap(),
            InitialGraphSpec::empty()
        );
    }

    #[test]
    fn two_vertices_merge_with_replacement() {
        let mut s = sim(2, 1);
        let out = s.er_step(ProcessKind::ErWithReplacement).unwrap();
        assert_eq!(out, MergeOutcome::Merged { a: 1, b: 1 });
        assert_eq!(s.ledger().moments().c1(), 2);
    }

    #[test]
    fn duplicates_count_as_attempts_only() {
        let opts = SimOptions {
            loops: true,
            track_edges: true,
        };
        let mut s = Simulation::new(
            2,
            &InitialGraphSpec::empty(),
            SimRng::seed_from_u64(3),
            opts,
        )
        .unwrap();
        for _ in 0..5 {
            s.er_step(ProcessKind::ErWithReplacement).unwrap();
        }
        assert_eq!(s.attempted(), 5);
        assert_eq!(s.distinct_edges(), Some(1));
    }

    #[test]
    fn without_replacement_never_repeats() {
        let opts = SimOptions::for_kind(ProcessKind::ErWithoutReplacement, true);
        let mut s =
            Simulation::new(6, &"3:1".parse().unwrap(), SimRng::seed_from_u64(9), opts).unwrap();
        assert_eq!(s.distinct_edges(), Some(2));
        for i in 0..13 {
            s.er_step(ProcessKind::ErWithoutReplacement).unwrap();
            assert_eq!(s.distinct_edges(), Some(3 + i));
        }
        assert_eq!(s.distinct_edges(), Some(15));
        assert_eq!(
            s.er_step(ProcessKind::ErWithoutReplacement),
            Err(ProcessError::GraphComplete)
        );
        assert_eq!(s.ledger().moments().c1(), 6);
    }

    #[test]
    fn poisson_counts() {
        let mut rng = SimRng::seed_from_u64(11);
        assert_eq!(poisson_edge_count(0.0, 10_000, &mut rng), 0);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| poisson_edge_count(1.0, 10_000, &mut rng) as f64)
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var =
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        let expected = 4999.5;
        let se = (expected / samples.len() as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean}");
        // sample variance of a Poisson has sd ≈ λ·sqrt(2/N) for large λ
        assert!(
            (var / expected - 1.0).abs() < 5.0 * (2.0 / samples.len() as f64).sqrt(),
            "var {var}"
        );
    }

    #[test]
    fn bf_first_edge_on_fresh_singletons() {
        let mut first = 0;
        let trials = 100_000;
        for seed in 0..trials {
            let mut s = sim(1000, seed);
            if s.bf_step().unwrap().pick == Pick::First {
                first += 1;
            }
        }
        assert_eq!(first, trials);
    }

    #[test]
    fn bf_rule_cases() {
        let mut l = ComponentLedger::new(6).unwrap();
        l.add_edge(0, 1).unwrap();
        assert_eq!(bf_choose(&mut l, (0, 2), (3, 4)), Pick::Second);
        assert_eq!(bf_choose(&mut l, (2, 0), (0, 1)), Pick::Second);
        assert_eq!(bf_choose(&mut l, (2, 3), (0, 1)), Pick::First);
        assert_eq!(bf_choose(&mut l, (2, 2), (0, 4)), Pick::First);
    }

    #[test]
    fn bf_isolated_loop_is_a_noop() {
        // a fresh 1-vertex graph only offers the loop (0, 0)
        let mut s = sim(1, 1);
        let out = s.bf_step().unwrap();
        assert_eq!(
            out,
            RuleOutcome {
                pick: Pick::First,
                merge: MergeOutcome::Loop
            }
        );
        assert_eq!(s.attempted(), 1);
    }

    #[test]
    fn product_rule_cases() {
        let mut l = ComponentLedger::new(10).unwrap();
        for (u, v) in [(2, 3), (3, 4), (4, 5), (6, 7), (7, 8), (8, 9)] {
            l.add_edge(u, v).unwrap();
        }
        assert_eq!(product_rule_choose(&mut l, (0, 1), (2, 6)), Pick::Second);
        assert_eq!(product_rule_choose(&mut l, (2, 0), (6, 1)), Pick::First);
        let mut fresh = ComponentLedger::new(4).unwrap();
        assert_eq!(product_rule_choose(&mut fresh, (0, 1), (2, 3)), Pick::First);
    }

    #[test]
    fn no_loops_mode_never_offers_loops() {
        let opts = SimOptions {
            loops: false,
            track_edges: false,
        };
        let mut s = Simulation::new(
            2,
            &InitialGraphSpec::empty(),
            SimRng::seed_from_u64(5),
            opts,
        )
        .unwrap();
        let out = s.bf_step().unwrap();
        assert_eq!(out.merge, MergeOutcome::Merged { a: 1, b: 1 });
    }

    #[test]
    fn run_is_deterministic_and_counts_steps() {
        let cfg = RunConfig::new(ProcessKind::BohmanFrieze, 1000, 1.0, vec![0.5, 1.0], 7);
        let a = run_process(&cfg).unwrap();
        let b = run_process(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].m, 250);
        assert_eq!(a[1].m, 500);
        assert_eq!(a[1].t, 1.0);
        let other = run_process(&RunConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn run_rejects_bad_schedules() {
        let cfg = RunConfig::new(ProcessKind::ErWithReplacement, 100, 1.0, vec![0.5, 0.2], 1);
        assert!(matches!(
            run_process(&cfg),
            Err(ProcessError::InvalidSchedule(_))
        ));
        let cfg = RunConfig::new(ProcessKind::ErWithReplacement, 100, 1.0, vec![1.5], 1);
        assert!(matches!(
            run_process(&cfg),
            Err(ProcessError::InvalidSchedule(_))
        ));
    }

    #[test]
    fn floor_rounding_of_steps() {
        assert_eq!(steps_for_time(11, 1.0), 5);
        assert_eq!(nearest_step(11, 1.0), 6);
        assert_eq!(steps_for_time(1_000_000, 1.5), 750_000);
    }
}
