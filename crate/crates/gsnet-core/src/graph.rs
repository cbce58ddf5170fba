//! Network topologies, orientations, edge orders and degree distributions.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops, duplicate edges and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parameter(format!("edge ({u},{v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::Parameter(format!("self-loop at {u}")));
            }
            if !sets[u].insert(v) || !sets[v].insert(u) {
                return Err(Error::Parameter(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Graph { adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect() })
    }

    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n] }
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.n_edges());
        for (u, nb) in self.adjacency.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Parses "u v" lines; blank lines and `#` comments are skipped. The
    /// vertex count is one more than the largest id unless `n` is given.
    pub fn from_edge_list(text: &str, n: Option<usize>) -> Result<Self> {
        let edges = parse_pairs(text)?;
        let max_id = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        Graph::new(n.unwrap_or(max_id), &edges)
    }

    pub fn to_edge_list(&self) -> String {
        self.edges().iter().map(|(u, v)| format!("{u} {v}\n")).collect()
    }
}

fn parse_pairs(text: &str) -> Result<Vec<Edge>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => out.push((u, v)),
            _ => return Err(Error::Parse(format!("line {}: expected \"u v\"", lineno + 1))),
        }
    }
    Ok(out)
}

/// Cycle graph on `n` vertices.
pub fn ring(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
    }
    let edges: Vec<Edge> = (0..n).map(|u| (u, (u + 1) % n)).collect();
    Graph::new(n, &edges)
}

/// G(n, p) with p = mean_k / (n - 1).
pub fn erdos_renyi(n: usize, mean_k: f64, seed: u64) -> Result<Graph> {
    let max_k = n.saturating_sub(1) as f64;
    if !(0.0..=max_k).contains(&mean_k) {
        return Err(Error::Parameter(format!("mean degree {mean_k} outside [0, {max_k}]")));
    }
    let p = if n > 1 { mean_k / max_k } else { 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges)
}

const DEGREE_RESAMPLES: usize = 1000;
const REWIRE_TRIES: usize = 100;

/// Configuration model: uniform half-edge matching; self-loops and repeated
/// edges are rewired by random pair swaps and erased if that keeps failing.
pub fn configuration_model(n: usize, dist: &DegreeDistribution, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pmf = dist.pmf();
    let sampler = WeightedIndex::new(&pmf).map_err(|e| Error::UndefinedDistribution(e.to_string()))?;
    let mut degrees = None;
    for _ in 0..DEGREE_RESAMPLES {
        let d: Vec<usize> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        if d.iter().sum::<usize>() % 2 == 0 {
            degrees = Some(d);
            break;
        }
    }
    let degrees = degrees.ok_or_else(|| Error::Generation("no even-sum degree sequence found".into()))?;
    let mut stubs: Vec<usize> = degrees.iter().enumerate().flat_map(|(u, &k)| std::iter::repeat_n(u, k)).collect();
    stubs.shuffle(&mut rng);
    let mut pairs: Vec<Edge> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();

    let key = |e: Edge| (e.0.min(e.1), e.0.max(e.1));
    let mut seen: std::collections::HashMap<Edge, usize> = std::collections::HashMap::new();
    for &e in &pairs {
        *seen.entry(key(e)).or_default() += 1;
    }
    let bad = |e: Edge, seen: &std::collections::HashMap<Edge, usize>| {
        e.0 == e.1 || seen.get(&key(e)).copied().unwrap_or(0) > 1
    };
    let mut erased = vec![false; pairs.len()];
    for i in 0..pairs.len() {
        if !bad(pairs[i], &seen) {
            continue;
        }
        let mut fixed = false;
        for _ in 0..REWIRE_TRIES {
            let k = rng.random_range(0..pairs.len());
            if k == i || erased[k] {
                continue;
            }
            let (a, b) = pairs[i];
            let (c, d) = pairs[k];
            let (e1, e2) = ((a, c), (b, d));
            if e1.0 == e1.1 || e2.0 == e2.1 || key(e1) == key(e2) {
                continue;
            }
            if seen.contains_key(&key(e1)) || seen.contains_key(&key(e2)) {
                continue;
            }
            for old in [pairs[i], pairs[k]] {
                let c = seen.get_mut(&key(old)).expect("tracked edge");
                *c -= 1;
                if *c == 0 {
                    seen.remove(&key(old));
                }
            }
            pairs[i] = e1;
            pairs[k] = e2;
            seen.insert(key(e1), 1);
            seen.insert(key(e2), 1);
            fixed = true;
            break;
        }
        if !fixed {
            let c = seen.get_mut(&key(pairs[i])).expect("tracked edge");
            *c -= 1;
            if *c == 0 {
                seen.remove(&key(pairs[i]));
            }
            erased[i] = true;
        }
    }
    let mut edges: Vec<Edge> =
        pairs.iter().zip(&erased).filter(|(e, &gone)| !gone && e.0 != e.1).map(|(&e, _)| key(e)).collect();
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, &edges)
}

/// A graph whose edges each carry a direction `source -> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    base: Graph,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl OrientedGraph {
    /// Every edge of `base` must appear exactly once among `arcs`.
    pub fn new(base: Graph, arcs: &[Edge]) -> Result<Self> {
        let n = base.n_vertices();
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(s, t) in arcs {
            if s >= n || t >= n || !base.has_edge(s, t) {
                return Err(Error::Parameter(format!("arc {s}->{t} is not an edge")));
            }
            if !seen.insert((s.min(t), s.max(t))) {
                return Err(Error::Parameter(format!("edge ({s},{t}) oriented twice")));
            }
            outgoing[s].push(t);
            incoming[t].push(s);
        }
        if seen.len() != base.n_edges() {
            return Err(Error::Parameter("orientation does not cover every edge".into()));
        }
        outgoing.iter_mut().for_each(|v| v.sort_unstable());
        incoming.iter_mut().for_each(|v| v.sort_unstable());
        Ok(OrientedGraph { base, outgoing, incoming })
    }

    pub fn from_orientation_file(base: Graph, text: &str) -> Result<Self> {
        OrientedGraph::new(base, &parse_pairs(text)?)
    }

    /// Ring with every edge pointing `u -> u+1`.
    pub fn ring_forward(n: usize) -> Result<Self> {
        let arcs: Vec<Edge> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        OrientedGraph::new(ring(n)?, &arcs)
    }

    /// Even ring where every even vertex points at both of its neighbours.
    pub fn ring_alternating(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidSize(format!("alternating ring needs even n, got {n}")));
        }
        let arcs: Vec<Edge> = (0..n).step_by(2).flat_map(|u| [(u, (u + n - 1) % n), (u, (u + 1) % n)]).collect();
        OrientedGraph::new(ring(n)?, &arcs)
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn outgoing(&self, u: usize) -> &[usize] {
        &self.outgoing[u]
    }

    pub fn incoming(&self, u: usize) -> &[usize] {
        &self.incoming[u]
    }

    /// `(i, j)` = (in-degree, out-degree) of `u`.
    pub fn split(&self, u: usize) -> (usize, usize) {
        (self.incoming[u].len(), self.outgoing[u].len())
    }

    pub fn arcs(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> =
            self.outgoing.iter().enumerate().flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t))).collect();
        out.sort_unstable();
        out
    }
}

/// Orients each edge independently with probability 1/2 either way.
pub fn orient_random(g: &Graph, seed: u64) -> OrientedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arcs: Vec<Edge> =
        g.edges().into_iter().map(|(u, v)| if rng.random_bool(0.5) { (u, v) } else { (v, u) }).collect();
    OrientedGraph::new(g.clone(), &arcs).expect("orientation of own edges")
}

/// The order in which edges are created.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrder {
    sequence: Vec<Edge>,
}

impl EdgeOrder {
    /// Validates that `sequence` lists every edge of `g` exactly once.
    pub fn new(g: &Graph, sequence: Vec<Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &sequence {
            if u >= g.n_vertices() || v >= g.n_vertices() || !g.has_edge(u, v) {
                return Err(Error::Parameter(format!("({u},{v}) is not an edge")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Parameter(format!("edge ({u},{v}) listed twice")));
            }
        }
        if seen.len() != g.n_edges() {
            return Err(Error::Parameter("edge order misses edges".into()));
        }
        Ok(EdgeOrder { sequence })
    }

    pub fn canonical(g: &Graph) -> Self {
        EdgeOrder { sequence: g.edges() }
    }

    /// `(0,1), (1,2), ..., (n-1,0)`.
    pub fn ring_sequential(n: usize) -> Self {
        EdgeOrder { sequence: (0..n).map(|u| (u, (u + 1) % n)).collect() }
    }

    /// Every second ring edge first, then the rest.
    pub fn ring_alternate(n: usize) -> Self {
        let mut seq: Vec<Edge> = (0..n).step_by(2).map(|u| (u, (u + 1) % n)).collect();
        seq.extend((1..n).step_by(2).map(|u| (u, (u + 1) % n)));
        EdgeOrder { sequence: seq }
    }

    pub fn random(g: &Graph, seed: u64) -> Self {
        let mut seq = g.edges();
        seq.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        EdgeOrder { sequence: seq }
    }

    pub fn sequence(&self) -> &[Edge] {
        &self.sequence
    }

    /// Position of each edge in the order, keyed by `(min, max)`.
    pub fn positions(&self) -> std::collections::HashMap<Edge, usize> {
        self.sequence.iter().enumerate().map(|(i, &(u, v))| ((u.min(v), u.max(v)), i)).collect()
    }
}

/// Degree law of an uncorrelated random network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DegreeKind {
    Poisson { mean: f64 },
    Pmf { p: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    #[serde(flatten)]
    pub kind: DegreeKind,
    /// Joint law of (in, out) splits, indexed `[i][j]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Vec<Vec<f64>>>,
}

const PMF_TOL: f64 = 1e-12;
const POISSON_TAIL: f64 = 1e-12;

impl DegreeDistribution {
    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(Error::Parameter(format!("Poisson mean {mean}")));
        }
        Ok(DegreeDistribution { kind: DegreeKind::Poisson { mean }, split: None })
    }

    pub fn from_pmf(p: Vec<f64>) -> Result<Self> {
        let d = DegreeDistribution { kind: DegreeKind::Pmf { p }, split: None };
        d.validate()?;
        Ok(d)
    }

    /// Degree-`k` point mass.
    pub fn delta(k: usize) -> Self {
        let mut p = vec![0.0; k + 1];
        p[k] = 1.0;
        DegreeDistribution { kind: DegreeKind::Pmf { p }, split: None }
    }

    pub fn with_split(mut self, split: Vec<Vec<f64>>) -> Result<Self> {
        self.split = Some(split);
        self.validate()?;
        Ok(self)
    }

    /// Parses the JSON form or the shorthand `poisson:<mean>`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(mean) = text.strip_prefix("poisson:") {
            let mean = mean.parse::<f64>().map_err(|e| Error::Parse(format!("poisson mean: {e}")))?;
            return DegreeDistribution::poisson(mean);
        }
        let d: DegreeDistribution = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            DegreeKind::Poisson { mean } => {
                if !(*mean >= 0.0 && mean.is_finite()) {
                    return Err(Error::Parameter(format!("Poisson mean {mean}")));
                }
            }
            DegreeKind::Pmf { p } => {
                if p.iter().any(|&v| !(v >= 0.0)) {
                    return Err(Error::Parameter("negative probability in pmf".into()));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > PMF_TOL {
                    return Err(Error::Parameter(format!("pmf sums to {total}")));
                }
            }
        }
        if let Some(split) = &self.split {
            let pk = self.pmf();
            let kmax = split.len() + split.iter().map(Vec::len).max().unwrap_or(0);
            let mut drift = 0.0;
            for k in 0..kmax.max(pk.len()) {
                let mut marginal = 0.0;
                for (i, row) in split.iter().enumerate() {
                    if let Some(&v) = k.checked_sub(i).and_then(|jj| row.get(jj)) {
                        if v < 0.0 {
                            return Err(Error::Parameter("negative split probability".into()));
                        }
                        marginal += v;
                        drift += (k as f64 - 2.0 * i as f64) * v;
                    }
                }
                let target = pk.get(k).copied().unwrap_or(0.0);
                if (marginal - target).abs() > 1e-9 {
                    return Err(Error::Parameter(format!("split marginal at k={k} is {marginal}, expected {target}")));
                }
            }
            if drift.abs() > 1e-9 {
                return Err(Error::Parameter(format!("mean out minus in degree is {drift}")));
            }
        }
        Ok(())
    }

    pub fn mean_degree(&self) -> f64 {
        match &self.kind {
            DegreeKind::Poisson { mean } => *mean,
            DegreeKind::Pmf { p } => p.iter().enumerate().map(|(k, v)| k as f64 * v).sum(),
        }
    }

    /// Explicit pmf; a Poisson law is cut where the remaining tail is below 1e-12.
    pub fn pmf(&self) -> Vec<f64> {
        match &self.kind {
            DegreeKind::Pmf { p } => p.clone(),
            DegreeKind::Poisson { mean } => {
                let mut out = Vec::new();
                let mut term = (-mean).exp();
                let mut acc = 0.0;
                let mut k = 0usize;
                loop {
                    out.push(term);
                    acc += term;
                    k += 1;
                    if 1.0 - acc < POISSON_TAIL && k as f64 > *mean {
                        break;
                    }
                    term *= mean / k as f64;
                }
                out
            }
        }
    }

    /// Σ p_k x^k.
    pub fn gp(&self, x: f64) -> f64 {
        match &self.kind {
            DegreeKind::Poisson { mean } => (mean * (x - 1.0)).exp(),
            DegreeKind::Pmf { p } => horner(p, x),
        }
    }

    /// Excess-degree generating function Σ r_k x^k, r_k = (k+1) p_{k+1} / <k>.
    pub fn gr(&self, x: f64) -> Result<f64> {
        let mean = self.mean_degree();
        if mean <= 0.0 {
            return Err(Error::UndefinedDistribution("excess degree needs <k> > 0".into()));
        }
        Ok(match &self.kind {
            DegreeKind::Poisson { mean } => (mean * (x - 1.0)).exp(),
            DegreeKind::Pmf { p } => {
                let r: Vec<f64> = p.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v / mean).collect();
                horner(&r, x)
            }
        })
    }

    /// Σ p_{i,j} x^i y^j over (in, out) splits; without an explicit split law
    /// each edge is taken to point either way with probability 1/2.
    pub fn gp2(&self, x: f64, y: f64) -> f64 {
        if let Some(split) = &self.split {
            return split.iter().enumerate().map(|(i, row)| x.powi(i as i32) * horner(row, y)).sum();
        }
        self.gp((x + y) / 2.0)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_shapes() {
        let g = ring(3).unwrap();
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        let g = ring(10).unwrap();
        assert_eq!(g.n_edges(), 10);
        for u in 0..10 {
            assert!(g.has_edge(u, (u + 1) % 10) && g.has_edge(u, (u + 9) % 10));
        }
        assert!(matches!(ring(2), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn erdos_renyi_extremes() {
        assert_eq!(erdos_renyi(100, 0.0, 1).unwrap().n_edges(), 0);
        assert_eq!(erdos_renyi(100, 99.0, 1).unwrap().n_edges(), 4950);
        assert!(erdos_renyi(100, 99.5, 1).is_err());
        assert!(erdos_renyi(100, -1.0, 1).is_err());
    }

    #[test]
    fn erdos_renyi_mean_edge_count() {
        // Edge count is Binomial(4950, 2/99): mean 100, variance 100 * 97/99.
        let draws = 1000;
        let total: usize = (0..draws).map(|s| erdos_renyi(100, 2.0, s).unwrap().n_edges()).sum();
        let mean = total as f64 / draws as f64;
        let stderr = (100.0 * 97.0 / 99.0 / draws as f64).sqrt();
        assert!((mean - 100.0).abs() < 3.0 * stderr, "mean {mean}");
    }

    #[test]
    fn configuration_forced_degrees() {
        let g = configuration_model(10, &DegreeDistribution::delta(2), 7).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 2));
        let g = configuration_model(10, &DegreeDistribution::delta(0), 7).unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn configuration_poisson_histogram() {
        let n = 10_000;
        let dist = DegreeDistribution::poisson(2.0).unwrap();
        let g = configuration_model(n, &dist, 11).unwrap();
        let pmf = dist.pmf();
        let mut hist = vec![0usize; 40];
        for d in g.degrees() {
            hist[d] += 1;
        }
        for k in 0..7 {
            let expect = n as f64 * pmf[k];
            let sigma = (n as f64 * pmf[k] * (1.0 - pmf[k])).sqrt();
            // A handful of erased conflict edges may move a few vertices down one bin.
            assert!((hist[k] as f64 - expect).abs() < 3.0 * sigma + 5.0, "k={k}: {} vs {expect}", hist[k]);
        }
    }

    #[test]
    fn orientation_counts() {
        let o = orient_random(&Graph::empty(5), 3);
        assert!((0..5).all(|u| o.split(u) == (0, 0)));
        let g = ring(3).unwrap();
        let a = orient_random(&g, 42);
        assert_eq!(a, orient_random(&g, 42));
        let (si, sj) = (0..3).fold((0, 0), |(i, j), u| (i + a.split(u).0, j + a.split(u).1));
        assert_eq!((si, sj), (3, 3));
    }

    #[test]
    fn orientation_split_is_binomial() {
        let star = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let trials = 10_000;
        let mut counts = [0usize; 5];
        for s in 0..trials {
            counts[orient_random(&star, s).split(0).1] += 1;
        }
        for (j, &c) in counts.iter().enumerate() {
            let p = [1.0, 4.0, 6.0, 4.0, 1.0][j] / 16.0;
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - trials as f64 * p).abs() < 3.0 * sigma, "j={j}");
        }
    }

    #[test]
    fn generating_functions() {
        let poi = DegreeDistribution::poisson(2.0).unwrap();
        assert!((poi.gp(0.0) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((poi.gr(0.75).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((poi.gp2(1.0, 0.5) - (-0.5f64).exp()).abs() < 1e-15);
        let two = DegreeDistribution::from_pmf(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        assert!((two.gp(0.5) - 5.0 / 16.0).abs() < 1e-15);
        let cyc = DegreeDistribution::delta(2);
        assert!((cyc.gr(0.3).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(cyc.gp2(0.0, 0.0), 0.0);
        assert!((cyc.gp2(0.2, 0.6) - 0.16).abs() < 1e-15);
        assert!(DegreeDistribution::delta(0).gr(0.5).is_err());
    }

    #[test]
    fn split_validation() {
        let d = DegreeDistribution::delta(2);
        assert!(d.clone().with_split(vec![vec![0.0, 0.0, 0.0], vec![0.0, 1.0]]).is_ok());
        assert!(d.clone().with_split(vec![vec![0.0, 0.0, 1.0]]).is_err());
    }

    #[test]
    fn parse_forms() {
        let d = DegreeDistribution::parse(r#"{"kind":"poisson","mean":2.0}"#).unwrap();
        assert_eq!(d.kind, DegreeKind::Poisson { mean: 2.0 });
        let d = DegreeDistribution::parse(r#"{"kind":"pmf","p":[0.5,0.5]}"#).unwrap();
        assert_eq!(d.mean_degree(), 0.5);
        assert_eq!(DegreeDistribution::parse("poisson:3").unwrap().mean_degree(), 3.0);
        assert!(DegreeDistribution::parse(r#"{"kind":"pmf","p":[0.5]}"#).is_err());
    }

    #[test]
    fn edge_list_roundtrip() {
        let g = ring(5).unwrap();
        let back = Graph::from_edge_list(&g.to_edge_list(), None).unwrap();
        assert_eq!(g, back);
        assert!(Graph::from_edge_list("0 0\n", None).is_err());
        assert!(Graph::from_edge_list("0 1 2\n", None).is_err());
        let o = OrientedGraph::from_orientation_file(ring(3).unwrap(), "0 1\n1 2\n2 0\n").unwrap();
        assert_eq!(o, OrientedGraph::ring_forward(3).unwrap());
    }

    #[test]
    fn edge_orders() {
        let g = ring(6).unwrap();
        assert!(EdgeOrder::new(&g, EdgeOrder::ring_alternate(6).sequence().to_vec()).is_ok());
        assert!(EdgeOrder::new(&g, vec![(0, 1)]).is_err());
        let r = EdgeOrder::random(&g, 5);
        assert!(EdgeOrder::new(&g, r.sequence().to_vec()).is_ok());
    }
}
