//! Gate-level simulation of the distribution protocols on small instances,
//! used to check the closed-form correlators.

mod mixture;
mod pauli;

pub use mixture::{MixtureState, MAX_LIVE_QUBITS, MAX_QUBIT_ID};
pub use pauli::{Basis, Pauli};

use serde::Serialize;

use crate::correlators::{incoming_in_order, leaf_label, Config, CorrelatorSpec, LeafRule, Protocol};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::par::Execution;

/// Runs the protocol and returns `<K_x>` for every `x` on the final graph,
/// indexed by `x` read as an integer (bit `u` = node `u`).
pub fn run_protocol(spec: &CorrelatorSpec, noise: &NoiseModel) -> Result<Vec<f64>> {
    run_protocol_with(spec, noise, Execution::default())
}

pub fn run_protocol_with(spec: &CorrelatorSpec, noise: &NoiseModel, exec: Execution) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n();
    if n > MAX_LIVE_QUBITS {
        return Err(Error::SizeLimit(format!("{n} nodes exceed the oracle budget")));
    }
    let mut state = MixtureState::default().with_execution(exec);
    let final_qubit = match spec.protocol {
        Protocol::BipartiteA => bipartite_a(spec, noise, &mut state)?,
        Protocol::BipartiteB => bipartite_b(spec, noise, &mut state)?,
        Protocol::Subgraph => subgraph(spec, noise, &mut state)?,
    };
    state.to_graph_frame()?;
    check_graph(spec, &state, &final_qubit)?;
    (0..1u64 << n)
        .map(|x| {
            let ones = (0..n).filter(|&u| x >> u & 1 == 1).fold(0u64, |m, u| m | 1 << final_qubit[u]);
            state.graph_correlator(ones)
        })
        .collect()
}

fn check_graph(spec: &CorrelatorSpec, state: &MixtureState, final_qubit: &[usize]) -> Result<()> {
    let node_of = |q: usize| final_qubit.iter().position(|&f| f == q);
    for (q, nbrs) in state.graph_adjacency()? {
        let u = node_of(q).ok_or_else(|| Error::Spec(format!("stray qubit {q} at the end")))?;
        let mut got: Vec<usize> = nbrs.iter().filter_map(|&r| node_of(r)).collect();
        got.sort_unstable();
        if got.len() != nbrs.len() || got != spec.graph.neighbors(u) {
            return Err(Error::Spec(format!("node {u} ends with neighbours {got:?}")));
        }
    }
    Ok(())
}

fn table_full(spec: &CorrelatorSpec, j: usize, noise: &NoiseModel) -> Result<Vec<f64>> {
    Ok(spec.purification.table(j, noise)?.to_full())
}

fn check_qubits(count: usize) -> Result<()> {
    if count > MAX_QUBIT_ID {
        return Err(Error::SizeLimit(format!("{count} qubit ids exceed {MAX_QUBIT_ID}")));
    }
    Ok(())
}

/// Hub qubits `0..n`; node `u` uses the Bell pair `(n + 2u, n + 2u + 1)`.
fn bipartite_a(spec: &CorrelatorSpec, noise: &NoiseModel, s: &mut MixtureState) -> Result<Vec<usize>> {
    let n = spec.n();
    check_qubits(3 * n)?;
    let bell = table_full(spec, 1, noise)?;
    for u in 0..n {
        s.add_plus(u)?;
        s.depolarize(u, noise.p1);
    }
    for &(u, v) in spec.edge_order.sequence() {
        s.cphase(u, v, noise.p2, noise.semantics)?;
    }
    for u in 0..n {
        let (hub_side, far) = (n + 2 * u, n + 2 * u + 1);
        s.inject_star(hub_side, &[far], &bell)?;
        s.cphase(u, hub_side, noise.p2, noise.semantics)?;
        s.measure_pauli(u, Basis::X, noise.p1)?;
        s.measure_pauli(hub_side, Basis::X, noise.p1)?;
        s.to_graph_frame()?;
    }
    Ok((0..n).map(|u| n + 2 * u + 1).collect())
}

/// Hub qubits `0..n` paired with remote qubits `n..2n`.
fn bipartite_b(spec: &CorrelatorSpec, noise: &NoiseModel, s: &mut MixtureState) -> Result<Vec<usize>> {
    let n = spec.n();
    check_qubits(2 * n)?;
    let bell = table_full(spec, 1, noise)?;
    for u in 0..n {
        s.inject_star(u, &[n + u], &bell)?;
    }
    for &(u, v) in spec.edge_order.sequence() {
        s.cphase(u, v, noise.p2, noise.semantics)?;
    }
    for u in 0..n {
        s.measure_pauli(u, Basis::X, noise.p1)?;
        s.to_graph_frame()?;
    }
    Ok((n..2 * n).collect())
}

/// Node `u` owns qubit `u` as star center; the leaf it sends along its
/// `k`-th arc is qubit `n + k`.
fn subgraph(spec: &CorrelatorSpec, noise: &NoiseModel, s: &mut MixtureState) -> Result<Vec<usize>> {
    let o = spec.orientation.as_ref().expect("validated");
    let n = spec.n();
    let arcs = o.arcs();
    check_qubits(n + arcs.len())?;
    let leaf_qubit = |from: usize, to: usize| n + arcs.iter().position(|&a| a == (from, to)).expect("arc");
    for u in 0..n {
        let out = o.outgoing(u);
        if !out.is_empty() {
            let leaves: Vec<usize> = out.iter().map(|&w| leaf_qubit(u, w)).collect();
            s.inject_star(u, &leaves, &table_full(spec, out.len(), noise)?)?;
        } else if o.incoming(u).is_empty() {
            s.add_plus(u)?;
            s.depolarize(u, noise.p1);
        }
    }
    let incoming = incoming_in_order(o, &spec.edge_order);
    let mut final_qubit = Vec::with_capacity(n);
    for u in 0..n {
        let inc = &incoming[u];
        let rooted = !o.outgoing(u).is_empty() || inc.is_empty();
        let base = if rooted { u } else { leaf_qubit(inc[0], u) };
        for &v in inc.iter().skip(usize::from(!rooted)) {
            let q = leaf_qubit(v, u);
            s.cphase(base, q, noise.p2, noise.semantics)?;
            s.measure_pauli(q, Basis::Y, noise.p1)?;
            s.to_graph_frame()?;
        }
        final_qubit.push(base);
    }
    Ok(final_qubit)
}

/// Largest disagreement between the oracle and the closed form over all
/// `2^N` configurations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub protocol: Protocol,
    pub n: usize,
    pub max_abs_diff: f64,
    /// Configurations (as integers) differing by more than the tolerance.
    pub failing_configs: Vec<u64>,
}

pub fn oracle_check(spec: &CorrelatorSpec, noise: &NoiseModel, tol: f64) -> Result<OracleReport> {
    let oracle = run_protocol(spec, noise)?;
    let model = spec.compile(noise.semantics)?;
    let n = spec.n();
    let mut max_abs_diff: f64 = 0.0;
    let mut failing_configs = Vec::new();
    for (x, &o) in oracle.iter().enumerate() {
        let closed = model.correlator(&Config::from_u64(n, x as u64), noise)?;
        let d = (closed - o).abs();
        max_abs_diff = max_abs_diff.max(d);
        if d > tol {
            failing_configs.push(x as u64);
        }
    }
    Ok(OracleReport { protocol: spec.protocol, n, max_abs_diff, failing_configs })
}

/// Leaf label the literal reading assigns where it disagrees with the
/// simulated state, per arc `(from, to)`.
pub fn leaf_rule_disagreements(spec: &CorrelatorSpec) -> Vec<(usize, usize)> {
    let Some(o) = spec.orientation.as_ref() else {
        return Vec::new();
    };
    let incoming = incoming_in_order(o, &spec.edge_order);
    o.arcs()
        .into_iter()
        .filter(|&(u, w)| {
            leaf_label(o, &incoming, LeafRule::Physical, u, w) != leaf_label(o, &incoming, LeafRule::Literal, u, w)
        })
        .collect()
}
