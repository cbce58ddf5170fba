//! Closed-form stabilizer correlators `<K_x>` of the distributed graph state
//! for the three distribution protocols, and the exponent `H(x)` with
//! `<K_x> ≈ (1 - p)^H(x)`.

mod model;

use num_rational::{BigRational, Rational64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeOrder, Graph, OrientedGraph};
use crate::noise::{NoiseModel, Semantics};

pub use model::Scalar;
pub use model::{Config, Form, Model, Purification, Rate, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Local graph built at a hub, every qubit teleported through a purified
    /// Bell pair with a CPHASE + two X measurements.
    BipartiteA,
    /// Hub halves of the Bell pairs are entangled directly and then measured in X.
    BipartiteB,
    /// Purified GHZ stars along outgoing edges, merged at each node by CPHASE
    /// and Y measurement.
    Subgraph,
}

/// Which bit labels a star leaf that ends up as the working qubit of a node
/// with no outgoing edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeafRule {
    /// That leaf carries the receiving node's bit `x_w`, every other leaf
    /// `x_u ⊕ x_w`. This is what the gate-level simulation produces.
    #[default]
    Physical,
    /// Every leaf carries `x_u ⊕ x_w`.
    Literal,
}

/// Everything that fixes a protocol run apart from the noise rates.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSpec {
    pub protocol: Protocol,
    pub graph: Graph,
    pub orientation: Option<OrientedGraph>,
    pub edge_order: EdgeOrder,
    pub purification: Purification,
    pub leaf_rule: LeafRule,
}

impl CorrelatorSpec {
    pub fn bipartite_a(graph: Graph, edge_order: EdgeOrder, purification: Purification) -> Self {
        CorrelatorSpec {
            protocol: Protocol::BipartiteA,
            graph,
            orientation: None,
            edge_order,
            purification,
            leaf_rule: LeafRule::default(),
        }
    }

    pub fn bipartite_b(graph: Graph, edge_order: EdgeOrder, purification: Purification) -> Self {
        CorrelatorSpec { protocol: Protocol::BipartiteB, ..Self::bipartite_a(graph, edge_order, purification) }
    }

    pub fn subgraph(orientation: OrientedGraph, edge_order: EdgeOrder, purification: Purification) -> Self {
        CorrelatorSpec {
            protocol: Protocol::Subgraph,
            graph: orientation.base().clone(),
            orientation: Some(orientation),
            edge_order,
            purification,
            leaf_rule: LeafRule::default(),
        }
    }

    pub fn with_leaf_rule(mut self, rule: LeafRule) -> Self {
        self.leaf_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.protocol, &self.orientation) {
            (Protocol::Subgraph, None) => return Err(Error::Spec("subgraph protocol needs an orientation".into())),
            (Protocol::Subgraph, Some(o)) if o.base() != &self.graph => {
                return Err(Error::Spec("orientation is for a different graph".into()))
            }
            (Protocol::BipartiteA | Protocol::BipartiteB, Some(_)) => {
                return Err(Error::Spec("bipartite protocols take no orientation".into()))
            }
            _ => {}
        }
        EdgeOrder::new(&self.graph, self.edge_order.sequence().to_vec()).map(|_| ())
    }

    pub fn n(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn compile(&self, semantics: Semantics) -> Result<Model> {
        self.validate()?;
        match self.protocol {
            Protocol::BipartiteA => compile_bipartite_a(self, semantics),
            Protocol::BipartiteB => compile_bipartite_b(self, semantics),
            Protocol::Subgraph => compile_subgraph(self, semantics),
        }
    }
}

fn var(i: usize) -> Form {
    Form::var(i)
}

fn vars(list: &[usize]) -> Vec<Form> {
    list.iter().map(|&v| Form::var(v)).collect()
}

fn compile_bipartite_a(spec: &CorrelatorSpec, sem: Semantics) -> Result<Model> {
    let g = &spec.graph;
    let n = g.n_vertices();
    let mut terms: Vec<Term> = (0..n).map(|u| Term::noise(Rate::P1, vec![var(u)])).collect();
    let mut built: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in spec.edge_order.sequence() {
        terms.push(Term::noise(Rate::P2, edge_forms(u, v, &built, sem)));
        built[u].push(v);
        built[v].push(u);
    }
    for u in 0..n {
        let nb = g.neighbors(u);
        let parity = Form::xor_of(nb.iter().copied());
        terms.push(Term::Purified { center: parity.clone(), leaves: vec![var(u)] });
        let cphase = match sem {
            Semantics::Or => std::iter::once(var(u)).chain(vars(nb)).collect(),
            Semantics::ExactXor => vec![var(u), parity.clone()],
        };
        terms.push(Term::noise(Rate::P2, cphase));
        terms.push(Term::noise(Rate::P1, vec![var(u)]));
        terms.push(Term::noise(Rate::P1, vec![parity]));
    }
    Model::new(n, terms, spec.purification.clone())
}

/// CPHASE noise on a hub edge given the neighbourhoods built so far.
fn edge_forms(u: usize, v: usize, built: &[Vec<usize>], sem: Semantics) -> Vec<Form> {
    match sem {
        Semantics::Or => {
            let mut f = vec![var(u), var(v)];
            f.extend(vars(&built[u]));
            f.extend(vars(&built[v]));
            f
        }
        Semantics::ExactXor => {
            vec![var(u), var(v), Form::xor_of(built[u].iter().copied()), Form::xor_of(built[v].iter().copied())]
        }
    }
}

fn compile_bipartite_b(spec: &CorrelatorSpec, sem: Semantics) -> Result<Model> {
    let g = &spec.graph;
    let n = g.n_vertices();
    let parity: Vec<Form> = (0..n).map(|u| Form::xor_of(g.neighbors(u).iter().copied())).collect();
    let mut terms = Vec::new();
    for u in 0..n {
        terms.push(Term::Purified { center: var(u), leaves: vec![parity[u].clone()] });
        terms.push(Term::noise(Rate::P1, vec![var(u)]));
    }
    let mut built: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in spec.edge_order.sequence() {
        let forms = match sem {
            Semantics::Or => {
                let mut f = vec![var(u), var(v), parity[u].clone(), parity[v].clone()];
                f.extend(vars(&built[u]));
                f.extend(vars(&built[v]));
                f
            }
            Semantics::ExactXor => vec![
                var(u),
                var(v),
                parity[u].xor(&Form::xor_of(built[u].iter().copied())),
                parity[v].xor(&Form::xor_of(built[v].iter().copied())),
            ],
        };
        terms.push(Term::noise(Rate::P2, forms));
        built[u].push(v);
        built[v].push(u);
    }
    Model::new(n, terms, spec.purification.clone())
}

/// Incoming neighbours of every node, sorted by when their edge appears in
/// the edge order.
pub(crate) fn incoming_in_order(o: &OrientedGraph, order: &EdgeOrder) -> Vec<Vec<usize>> {
    let pos = order.positions();
    (0..o.base().n_vertices())
        .map(|u| {
            let mut inc = o.incoming(u).to_vec();
            inc.sort_by_key(|&v| pos[&(u.min(v), u.max(v))]);
            inc
        })
        .collect()
}

/// Bit carried by the leaf that center `u` sent to `w`.
pub(crate) fn leaf_label(o: &OrientedGraph, incoming: &[Vec<usize>], rule: LeafRule, u: usize, w: usize) -> Form {
    let is_base = o.outgoing(w).is_empty() && incoming[w].first() == Some(&u);
    if rule == LeafRule::Physical && is_base {
        var(w)
    } else {
        var(u).xor(&var(w))
    }
}

fn compile_subgraph(spec: &CorrelatorSpec, sem: Semantics) -> Result<Model> {
    let o = spec.orientation.as_ref().expect("validated");
    let n = o.base().n_vertices();
    let incoming = incoming_in_order(o, &spec.edge_order);
    let mut terms = Vec::new();
    for u in 0..n {
        let out = o.outgoing(u);
        let inc = &incoming[u];
        let labels: Vec<Form> = out.iter().map(|&w| leaf_label(o, &incoming, spec.leaf_rule, u, w)).collect();
        if !out.is_empty() {
            terms.push(Term::Purified { center: var(u), leaves: labels.clone() });
        } else if inc.is_empty() {
            terms.push(Term::noise(Rate::P1, vec![var(u)]));
        }
        let skip = usize::from(out.is_empty());
        for (idx, &v) in inc.iter().enumerate().skip(skip) {
            terms.push(Term::noise(Rate::P1, vec![var(u).xor(&var(v))]));
            let forms = match sem {
                Semantics::Or => {
                    let mut f = vec![var(u)];
                    f.extend(vars(out));
                    f.extend(vars(&inc[..=idx]));
                    f
                }
                Semantics::ExactXor => {
                    let z = labels
                        .iter()
                        .fold(Form::xor_of(inc[..idx].iter().copied()), |acc, l| acc.xor(l))
                        .xor(&var(u))
                        .xor(&var(v));
                    vec![var(u), var(v), z]
                }
            };
            terms.push(Term::noise(Rate::P2, forms));
        }
    }
    Model::new(n, terms, spec.purification.clone())
}

/// The four closed-ring configurations with translation-invariant noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingVariant {
    BipartiteA,
    BipartiteB,
    /// Every node sends one leaf forward.
    S1,
    /// Even nodes send a leaf to both neighbours; odd nodes only receive.
    S2,
}

impl RingVariant {
    pub const ALL: [RingVariant; 4] =
        [RingVariant::BipartiteA, RingVariant::BipartiteB, RingVariant::S1, RingVariant::S2];

    pub fn name(self) -> &'static str {
        match self {
            RingVariant::BipartiteA => "bipartite-a",
            RingVariant::BipartiteB => "bipartite-b",
            RingVariant::S1 => "s1",
            RingVariant::S2 => "s2",
        }
    }

    /// General-graph spec on the ring with sequential edge order.
    pub fn spec(self, n: usize, purification: Purification) -> Result<CorrelatorSpec> {
        let order = EdgeOrder::ring_sequential(n);
        let g = crate::graph::ring(n)?;
        Ok(match self {
            RingVariant::BipartiteA => CorrelatorSpec::bipartite_a(g, order, purification),
            RingVariant::BipartiteB => CorrelatorSpec::bipartite_b(g, order, purification),
            RingVariant::S1 => CorrelatorSpec::subgraph(OrientedGraph::ring_forward(n)?, order, purification),
            RingVariant::S2 => CorrelatorSpec::subgraph(OrientedGraph::ring_alternating(n)?, order, purification),
        })
    }

    /// Translation-invariant model. For Bipartite A each hub edge `(u, u+1)`
    /// sees `u-1` already attached to `u` and nothing on `u+1`, i.e. the
    /// sequential order with no seam; the other variants equal their
    /// general-graph spec.
    pub fn model(self, n: usize, purification: Purification, sem: Semantics, leaf_rule: LeafRule) -> Result<Model> {
        match self {
            RingVariant::BipartiteA => {
                if n < 3 {
                    return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
                }
                let g = crate::graph::ring(n)?;
                let mut terms: Vec<Term> = (0..n).map(|u| Term::noise(Rate::P1, vec![var(u)])).collect();
                for u in 0..n {
                    let mut built = vec![Vec::new(); n];
                    built[u].push((u + n - 1) % n);
                    terms.push(Term::noise(Rate::P2, edge_forms(u, (u + 1) % n, &built, sem)));
                }
                let spec = CorrelatorSpec::bipartite_a(g, EdgeOrder::ring_sequential(n), Purification::Ideal);
                let teleport = compile_bipartite_a(&spec, sem)?;
                terms.extend(teleport.terms().iter().skip(2 * n).cloned());
                Model::new(n, terms, purification)
            }
            _ => self.spec(n, purification)?.with_leaf_rule(leaf_rule).compile(sem),
        }
    }
}

fn expect_protocol(spec: &CorrelatorSpec, protocol: Protocol) -> Result<()> {
    if spec.protocol != protocol {
        return Err(Error::Spec(format!("spec is for {:?}, not {:?}", spec.protocol, protocol)));
    }
    Ok(())
}

/// `<K_x>` for any protocol.
pub fn correlator(spec: &CorrelatorSpec, x: &Config, noise: &NoiseModel) -> Result<f64> {
    spec.compile(noise.semantics)?.correlator(x, noise)
}

pub fn correlator_bipartite_a(spec: &CorrelatorSpec, x: &Config, noise: &NoiseModel) -> Result<f64> {
    expect_protocol(spec, Protocol::BipartiteA)?;
    correlator(spec, x, noise)
}

pub fn correlator_bipartite_b(spec: &CorrelatorSpec, x: &Config, noise: &NoiseModel) -> Result<f64> {
    expect_protocol(spec, Protocol::BipartiteB)?;
    correlator(spec, x, noise)
}

pub fn correlator_subgraph(spec: &CorrelatorSpec, x: &Config, noise: &NoiseModel) -> Result<f64> {
    expect_protocol(spec, Protocol::Subgraph)?;
    correlator(spec, x, noise)
}

/// `H(x)` such that `<K_x> = (1-p)^H(x)` up to first order in the purified
/// factors. Needs `p1 = p2 = p` and an exponent form for the purification.
pub fn hamiltonian_exponent(spec: &CorrelatorSpec, x: &Config, noise: &NoiseModel) -> Result<Rational64> {
    if !noise.is_uniform() {
        return Err(Error::Unsupported("H(x) needs p1 = p2 = p".into()));
    }
    let h = spec.compile(noise.semantics)?.hamiltonian(x)?;
    Ok(Rational64::from_integer(h))
}

/// `E_x[H(x)] / N` for uniform `x`, exact.
pub fn first_order_decay(model: &Model) -> Result<BigRational> {
    model.first_order_decay()
}
