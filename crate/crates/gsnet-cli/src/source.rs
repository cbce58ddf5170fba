//! Turns command-line descriptions of graphs, protocols and noise into
//! library objects.

use anyhow::{bail, Context, Result};

use gsnet_core::correlators::{CorrelatorSpec, LeafRule, Model, Purification, RingVariant};
use gsnet_core::graph::{erdos_renyi, orient_random, ring, EdgeOrder, Graph, OrientedGraph};
use gsnet_core::noise::{NoiseModel, Semantics};

use crate::args::{GraphArgs, LeafRuleArg, NoiseArgs, OrderArg, ProtocolArg, PurificationArg, SemanticsArg};

pub enum GraphSource {
    Ring(usize),
    Graph(Graph),
}

pub fn parse_graph(text: &str, seed: u64) -> Result<GraphSource> {
    if let Some(n) = text.strip_prefix("ring:") {
        return Ok(GraphSource::Ring(n.parse().context("ring size")?));
    }
    if let Some(rest) = text.strip_prefix("er:") {
        let (n, k) = rest.split_once(':').context("expected er:N:MEAN_DEGREE")?;
        return Ok(GraphSource::Graph(erdos_renyi(
            n.parse().context("node count")?,
            k.parse().context("mean degree")?,
            seed,
        )?));
    }
    let body = std::fs::read_to_string(text).with_context(|| format!("reading graph file {text}"))?;
    Ok(GraphSource::Graph(Graph::from_edge_list(&body, None)?))
}

pub fn purification(p: PurificationArg) -> Purification {
    match p {
        PurificationArg::Ideal => Purification::Ideal,
        PurificationArg::FirstOrder => Purification::FirstOrder,
    }
}

pub fn semantics(s: SemanticsArg) -> Semantics {
    match s {
        SemanticsArg::Or => Semantics::Or,
        SemanticsArg::ExactXor => Semantics::ExactXor,
    }
}

pub fn leaf_rule(r: LeafRuleArg) -> LeafRule {
    match r {
        LeafRuleArg::Physical => LeafRule::Physical,
        LeafRuleArg::Literal => LeafRule::Literal,
    }
}

pub fn ring_variant(p: ProtocolArg) -> Option<RingVariant> {
    match p {
        ProtocolArg::BipartiteA => Some(RingVariant::BipartiteA),
        ProtocolArg::BipartiteB => Some(RingVariant::BipartiteB),
        ProtocolArg::S1 => Some(RingVariant::S1),
        ProtocolArg::S2 => Some(RingVariant::S2),
        ProtocolArg::Subgraph => None,
    }
}

/// Sweep values from a comma list or `start:stop:count`; must be non-empty
/// and increasing.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, c] = parts[..] else { bail!("sweep {text:?}: expected start:stop:count") };
        let (a, b): (f64, f64) = (a.parse()?, b.parse()?);
        let count: usize = c.parse()?;
        match count {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
        }
    } else {
        text.split(',').map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>()?
    };
    if values.is_empty() {
        bail!("sweep {text:?} is empty");
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("sweep {text:?} is not increasing");
    }
    Ok(values)
}

/// One noise model per swept `p`.
pub fn noise_sweep(args: &NoiseArgs) -> Result<Vec<NoiseModel>> {
    parse_sweep(&args.p)?
        .into_iter()
        .map(|p| {
            Ok(NoiseModel::new(args.p1.unwrap_or(p), args.p2.unwrap_or(p), args.pc, p, semantics(args.semantics))?)
        })
        .collect()
}

pub struct Built {
    pub model: Model,
    pub ring: Option<(RingVariant, usize)>,
}

fn edge_order(g: &Graph, order: OrderArg, seed: u64) -> EdgeOrder {
    match order {
        OrderArg::Canonical => EdgeOrder::canonical(g),
        OrderArg::Random => EdgeOrder::random(g, seed),
    }
}

/// Protocol spec on a general graph. Rings use their sequential edge order.
#[allow(clippy::too_many_arguments)]
pub fn build_spec(
    source: GraphSource,
    protocol: ProtocolArg,
    orientation: Option<&std::path::Path>,
    order: OrderArg,
    pur: Purification,
    rule: LeafRule,
    seed: u64,
) -> Result<CorrelatorSpec> {
    let (g, ring_n) = match source {
        GraphSource::Ring(n) => (ring(n)?, Some(n)),
        GraphSource::Graph(g) => (g, None),
    };
    let order = match ring_n {
        Some(n) if order == OrderArg::Canonical => EdgeOrder::ring_sequential(n),
        _ => edge_order(&g, order, seed),
    };
    let spec = match protocol {
        ProtocolArg::BipartiteA => CorrelatorSpec::bipartite_a(g, order, pur),
        ProtocolArg::BipartiteB => CorrelatorSpec::bipartite_b(g, order, pur),
        ProtocolArg::Subgraph => {
            let o = match orientation {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading orientation file {}", path.display()))?;
                    OrientedGraph::from_orientation_file(g, &text)?
                }
                None => orient_random(&g, seed),
            };
            CorrelatorSpec::subgraph(o, order, pur)
        }
        ProtocolArg::S1 | ProtocolArg::S2 => {
            let Some(n) = ring_n else { bail!("s1 and s2 are ring protocols; use --graph ring:N") };
            ring_variant(protocol).expect("ring protocol").spec(n, pur)?
        }
    };
    Ok(spec.with_leaf_rule(rule))
}

/// Compiled model; bipartite protocols on a ring use the seamless ring model
/// shared with the transfer matrices and generating functions.
pub fn build(args: &GraphArgs, sem: Semantics) -> Result<Built> {
    let source = parse_graph(&args.graph, args.seed)?;
    let pur = purification(args.purification);
    let rule = leaf_rule(args.leaf_rule);
    if let (GraphSource::Ring(n), Some(v)) = (&source, ring_variant(args.protocol)) {
        if args.edge_order == OrderArg::Canonical && args.orientation.is_none() {
            let model = v.model(*n, pur, sem, rule)?;
            return Ok(Built { model, ring: Some((v, *n)) });
        }
    }
    let spec = build_spec(source, args.protocol, args.orientation.as_deref(), args.edge_order, pur, rule, args.seed)?;
    let model = spec.compile(sem)?;
    Ok(Built { model, ring: None })
}
