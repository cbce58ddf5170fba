//! Quenched averages over random networks: closed-form first-order decay
//! rates for uncorrelated degree laws, the mean degree where two protocols
//! swap order, and the Monte Carlo average over sampled graphs.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::correlators::{CorrelatorSpec, Protocol, Purification};
use crate::error::{Error, Result};
use crate::graph::{configuration_model, erdos_renyi, orient_random, DegreeDistribution, DegreeKind, EdgeOrder};
use crate::noise::NoiseModel;
use crate::par::{task_rng, Execution};
use crate::statmech::mc_fidelity_with;

/// Which closed form is used for the bipartite edge terms. The subgraph
/// rate has a single form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    /// Every edge evaluated at the mean insertion time; bipartite B uses
    /// `g_r(3/4) + g_r(1/4)`.
    #[default]
    Equation,
    /// As `Equation` but bipartite B uses `g_r(3/4) + g_r(1/2)`.
    Text,
    /// Averaged over a uniformly random edge order.
    RandomOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    /// Degree law; an explicit `split` fixes the (in, out) law for the
    /// subgraph protocol, otherwise every edge is oriented by a fair coin.
    pub dist: DegreeDistribution,
    pub protocol: Protocol,
    pub noise: NoiseModel,
    pub form: ClosedForm,
}

impl EnsembleSpec {
    pub fn new(dist: DegreeDistribution, protocol: Protocol, noise: NoiseModel) -> Result<Self> {
        dist.validate()?;
        Ok(EnsembleSpec { dist, protocol, noise, form: ClosedForm::default() })
    }

    pub fn with_form(mut self, form: ClosedForm) -> Self {
        self.form = form;
        self
    }

    /// Closed-form first-order decay rate.
    pub fn fbar(&self) -> Result<f64> {
        fbar(self.protocol, &self.dist, self.form)
    }
}

fn excess_term(dist: &DegreeDistribution, f: impl Fn(&DegreeDistribution) -> Result<f64>) -> Result<f64> {
    let mean = dist.mean_degree();
    if mean == 0.0 {
        return Ok(0.0);
    }
    Ok(mean / 2.0 * f(dist)?)
}

pub fn fbar_bipartite_a(dist: &DegreeDistribution) -> Result<f64> {
    let edges = excess_term(dist, |d| {
        let g = d.gr(0.75)?;
        Ok(1.0 - g * g / 4.0)
    })?;
    Ok(15.0 / 4.0 - 1.25 * dist.gp(0.0) - 0.5 * dist.gp(0.5) + edges)
}

/// Mean-insertion-time form; `text` swaps `g_r(1/4)` for `g_r(1/2)`.
pub fn fbar_bipartite_b(dist: &DegreeDistribution, text: bool) -> Result<f64> {
    let second = if text { 0.5 } else { 0.25 };
    let edges = excess_term(dist, |d| {
        let s = d.gr(0.75)? + d.gr(second)?;
        Ok(1.0 - s * s / 16.0)
    })?;
    Ok(7.0 / 4.0 - 0.25 * dist.gp(0.0) + edges)
}

/// Uses the bivariate (in, out) generating function, so the orientation law
/// enters here only.
pub fn fbar_subgraph(dist: &DegreeDistribution) -> Result<f64> {
    let k = dist.mean_degree();
    Ok(5.0 / 8.0 + 17.0 * k / 16.0 + 1.75 * dist.gp2(0.0, 0.0)
        - 1.875 * dist.gp2(1.0, 0.0)
        - 0.5 * (dist.gp2(1.0, 0.5) - dist.gp2(0.5, 0.5)))
}

const QUAD_INTERVALS: usize = 2048;

/// Composite Simpson rule on [0, 1].
fn integrate_unit(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let h = 1.0 / QUAD_INTERVALS as f64;
    let mut s = f(0.0)? + f(1.0)?;
    for i in 1..QUAD_INTERVALS {
        s += f(i as f64 * h)? * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    Ok(s * h / 3.0)
}

/// Bipartite-A rate averaged over a uniformly random edge order. An edge
/// inserted at time `t` finds each other edge of an endpoint already built
/// with probability `t`; the printed form fixes `t = 1/2`.
pub fn fbar_bipartite_a_random_order(dist: &DegreeDistribution) -> Result<f64> {
    let edges = excess_term(dist, |d| {
        let m = integrate_unit(|t| Ok(d.gr(1.0 - t / 2.0)?.powi(2)))?;
        Ok(1.0 - m / 4.0)
    })?;
    Ok(15.0 / 4.0 - 1.25 * dist.gp(0.0) - 0.5 * dist.gp(0.5) + edges)
}

/// Bipartite-B counterpart of [`fbar_bipartite_a_random_order`]; at
/// `t = 1/2` it reduces to [`ClosedForm::Equation`].
pub fn fbar_bipartite_b_random_order(dist: &DegreeDistribution) -> Result<f64> {
    let edges = excess_term(dist, |d| {
        let m = integrate_unit(|t| Ok((d.gr(1.0 - t / 2.0)? + d.gr(t / 2.0)?).powi(2)))?;
        Ok(1.0 - m / 16.0)
    })?;
    Ok(7.0 / 4.0 - 0.25 * dist.gp(0.0) + edges)
}

pub fn fbar(protocol: Protocol, dist: &DegreeDistribution, form: ClosedForm) -> Result<f64> {
    match (protocol, form) {
        (Protocol::BipartiteA, ClosedForm::RandomOrder) => fbar_bipartite_a_random_order(dist),
        (Protocol::BipartiteA, _) => fbar_bipartite_a(dist),
        (Protocol::BipartiteB, ClosedForm::RandomOrder) => fbar_bipartite_b_random_order(dist),
        (Protocol::BipartiteB, _) => fbar_bipartite_b(dist, form == ClosedForm::Text),
        (Protocol::Subgraph, _) => fbar_subgraph(dist),
    }
}

pub const CROSSOVER_RANGE: (f64, f64) = (0.5, 10.0);
pub const CROSSOVER_TOL: f64 = 1e-12;

/// Poisson mean degree where `fbar(a) = fbar(b)`, by bisection over
/// [`CROSSOVER_RANGE`]; `None` without a sign change.
pub fn crossover_mean_degree(a: Protocol, b: Protocol, form: ClosedForm) -> Result<Option<f64>> {
    crossover_mean_degree_tol(a, b, form, CROSSOVER_TOL)
}

pub fn crossover_mean_degree_tol(a: Protocol, b: Protocol, form: ClosedForm, tol: f64) -> Result<Option<f64>> {
    let gap = |k: f64| -> Result<f64> {
        let d = DegreeDistribution::poisson(k)?;
        Ok(fbar(a, &d, form)? - fbar(b, &d, form)?)
    };
    let (mut lo, mut hi) = CROSSOVER_RANGE;
    let (mut g_lo, g_hi) = (gap(lo)?, gap(hi)?);
    if g_lo == 0.0 && g_hi == 0.0 || g_lo * g_hi > 0.0 {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g == 0.0 {
            return Ok(Some(mid));
        }
        if (g < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    /// Mean of the per-graph decay rates.
    pub fbar: f64,
    /// `spread / sqrt(graphs used)`.
    pub stderr: f64,
    /// Sample standard deviation of the per-graph rates.
    pub spread: f64,
    /// `None` for graphs whose estimated fidelity was not positive.
    pub per_graph: Vec<Option<f64>>,
    pub excluded: usize,
    pub n_nodes: usize,
    pub n_samples: u64,
}

/// Streams drawn per graph from its task generator.
struct GraphSeeds {
    graph: u64,
    orientation: u64,
    order: u64,
    samples: u64,
}

impl GraphSeeds {
    fn new(seed: u64, index: u64) -> Self {
        let mut rng = task_rng(seed, index);
        GraphSeeds {
            graph: rng.next_u64(),
            orientation: rng.next_u64(),
            order: rng.next_u64(),
            samples: rng.next_u64(),
        }
    }
}

/// Builds the protocol on one sampled graph with a random orientation and
/// edge order under first-order purification.
pub fn sample_spec(spec: &EnsembleSpec, n_nodes: usize, seed: u64, index: u64) -> Result<CorrelatorSpec> {
    sample_spec_from(spec, n_nodes, &GraphSeeds::new(seed, index))
}

fn sample_spec_from(spec: &EnsembleSpec, n_nodes: usize, seeds: &GraphSeeds) -> Result<CorrelatorSpec> {
    let g = match spec.dist.kind {
        DegreeKind::Poisson { mean } => erdos_renyi(n_nodes, mean, seeds.graph)?,
        DegreeKind::Pmf { .. } => configuration_model(n_nodes, &spec.dist, seeds.graph)?,
    };
    let order = EdgeOrder::random(&g, seeds.order);
    Ok(match spec.protocol {
        Protocol::BipartiteA => CorrelatorSpec::bipartite_a(g, order, Purification::FirstOrder),
        Protocol::BipartiteB => CorrelatorSpec::bipartite_b(g, order, Purification::FirstOrder),
        Protocol::Subgraph => {
            if spec.dist.split.is_some() {
                return Err(Error::Unsupported(
                    "sampling graphs with a prescribed (in, out) law; use random orientation".into(),
                ));
            }
            CorrelatorSpec::subgraph(orient_random(&g, seeds.orientation), order, Purification::FirstOrder)
        }
    })
}

/// Decay rate `-ln F / (N β)` of one protocol instance from sampled
/// configurations; `None` if the estimate of `F` is not positive.
pub fn graph_decay_mc(
    spec: &CorrelatorSpec,
    noise: &NoiseModel,
    n_samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<Option<f64>> {
    let beta = noise.beta();
    if beta == 0.0 {
        return Ok(Some(0.0));
    }
    let model = spec.compile(noise.semantics)?;
    let r = mc_fidelity_with(&model, noise, n_samples, seed, exec)?;
    Ok(match r.fidelity {
        Some(f) if f > 0.0 => Some(-f.ln() / (spec.n() as f64 * beta)),
        _ => None,
    })
}

pub fn mc_ensemble(
    spec: &EnsembleSpec,
    n_graphs: u64,
    n_nodes: usize,
    n_samples: u64,
    seed: u64,
) -> Result<EnsembleResult> {
    mc_ensemble_with(spec, n_graphs, n_nodes, n_samples, seed, Execution::default())
}

/// Graph `i` draws its graph, orientation, edge order and sample seeds from
/// stream `i` of `seed`, so results do not depend on the thread count.
pub fn mc_ensemble_with(
    spec: &EnsembleSpec,
    n_graphs: u64,
    n_nodes: usize,
    n_samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<EnsembleResult> {
    if n_graphs < 2 {
        return Err(Error::Parameter(format!("need at least 2 graphs, got {n_graphs}")));
    }
    if !spec.noise.is_uniform() {
        return Err(Error::Unsupported("ensemble averages assume p1 = p2 = p".into()));
    }
    let per_graph = exec
        .map_indexed(n_graphs, |i| {
            let seeds = GraphSeeds::new(seed, i);
            let cs = sample_spec_from(spec, n_nodes, &seeds)?;
            graph_decay_mc(&cs, &spec.noise, n_samples, seeds.samples, exec)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let used: Vec<f64> = per_graph.iter().flatten().copied().collect();
    let excluded = per_graph.len() - used.len();
    if used.len() < 2 {
        return Err(Error::InputTooNoisy(format!("{excluded} of {n_graphs} fidelity estimates were not positive")));
    }
    let m = used.len() as f64;
    let mean = used.iter().sum::<f64>() / m;
    let spread = (used.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    Ok(EnsembleResult { fbar: mean, stderr: spread / m.sqrt(), spread, per_graph, excluded, n_nodes, n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_network_limits() {
        let d = DegreeDistribution::delta(0);
        assert_abs_diff_eq!(fbar_bipartite_a(&d).unwrap(), 2.0, epsilon = 1e-15);
        for text in [false, true] {
            assert_abs_diff_eq!(fbar_bipartite_b(&d, text).unwrap(), 1.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(fbar_subgraph(&d).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn degree_two_substitutions() {
        let d = DegreeDistribution::delta(2);
        assert_abs_diff_eq!(fbar_bipartite_a(&d).unwrap(), 287.0 / 64.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fbar_bipartite_b(&d, false).unwrap(), 43.0 / 16.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fbar_bipartite_b(&d, true).unwrap(), 679.0 / 256.0, epsilon = 1e-14);
        // one edge in, one out at every node
        let s1 = d.with_split(vec![vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(fbar_subgraph(&s1).unwrap(), 21.0 / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn poisson_rates_use_exponential_generating_functions() {
        let d = DegreeDistribution::poisson(2.0).unwrap();
        let e = |x: f64| (2.0 * (x - 1.0)).exp();
        let a = 15.0 / 4.0 - 1.25 * e(0.0) - 0.5 * e(0.5) + (1.0 - e(0.75).powi(2) / 4.0);
        assert_abs_diff_eq!(fbar_bipartite_a(&d).unwrap(), a, epsilon = 1e-14);
        let s = 5.0 / 8.0 + 17.0 / 8.0 + 1.75 * e(0.0) - 1.875 * e(0.5) - 0.5 * (e(0.75) - e(0.5));
        assert_abs_diff_eq!(fbar_subgraph(&d).unwrap(), s, epsilon = 1e-14);
    }

    #[test]
    fn random_order_poisson_closed_form() {
        // ∫ e^{-kt} dt = (1 - e^{-k}) / k
        for k in [0.5f64, 2.0, 4.0] {
            let d = DegreeDistribution::poisson(k).unwrap();
            let a = 15.0 / 4.0 - 1.25 * (-k).exp() - 0.5 * (-k / 2.0).exp() + k / 2.0 - (1.0 - (-k).exp()) / 8.0;
            assert_abs_diff_eq!(fbar_bipartite_a_random_order(&d).unwrap(), a, epsilon = 1e-12);
            assert!(fbar_bipartite_a_random_order(&d).unwrap() < fbar_bipartite_a(&d).unwrap());
        }
        let ring = DegreeDistribution::delta(2);
        // g_r(x) = x: ∫ (1 - t/2)^2 dt = 7/12, ∫ 1 dt = 1
        assert_abs_diff_eq!(
            fbar_bipartite_a_random_order(&ring).unwrap(),
            29.0 / 8.0 + 1.0 - 7.0 / 48.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(fbar_bipartite_b_random_order(&ring).unwrap(), 7.0 / 4.0 + 15.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn crossover_between_subgraph_and_bipartite_b() {
        let k = crossover_mean_degree(Protocol::Subgraph, Protocol::BipartiteB, ClosedForm::Equation)
            .unwrap()
            .expect("sign change");
        assert!((k - 2.8).abs() < 0.1, "{k}");
        let coarse = crossover_mean_degree_tol(Protocol::Subgraph, Protocol::BipartiteB, ClosedForm::Equation, 1e-5)
            .unwrap()
            .unwrap();
        assert!((coarse - k).abs() < 1e-4);
        assert_eq!(crossover_mean_degree(Protocol::Subgraph, Protocol::Subgraph, ClosedForm::Equation).unwrap(), None);
    }

    #[test]
    fn zero_noise_gives_zero_rate() {
        let spec =
            EnsembleSpec::new(DegreeDistribution::poisson(2.0).unwrap(), Protocol::Subgraph, NoiseModel::noiseless())
                .unwrap();
        let r = mc_ensemble(&spec, 3, 20, 10, 1).unwrap();
        assert_eq!(r.fbar, 0.0);
        assert_eq!(r.excluded, 0);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let spec = EnsembleSpec::new(
            DegreeDistribution::poisson(3.0).unwrap(),
            Protocol::BipartiteA,
            NoiseModel::uniform(1e-2).unwrap(),
        )
        .unwrap();
        let a = mc_ensemble_with(&spec, 4, 30, 300, 9, Execution::Sequential).unwrap();
        let b = mc_ensemble_with(&spec, 4, 30, 300, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
