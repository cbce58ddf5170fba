use gsnet_core::correlators::{CorrelatorSpec, Purification};
use gsnet_core::correlators::{Protocol, RingVariant};
use gsnet_core::ensemble::*;
use gsnet_core::graph::{ring, DegreeDistribution, EdgeOrder};
use gsnet_core::noise::NoiseModel;
use gsnet_core::par::Execution;
use gsnet_core::statmech::{first_order_decay, mc_fidelity};
use num_traits::ToPrimitive;

const PROTOCOLS: [Protocol; 3] = [Protocol::BipartiteA, Protocol::BipartiteB, Protocol::Subgraph];

/// Exact degree law of G(n, k / (n - 1)).
fn binomial_degrees(n: usize, mean: f64) -> DegreeDistribution {
    let q = mean / (n - 1) as f64;
    let m = n - 1;
    let mut ln_c = 0.0f64;
    let p: Vec<f64> = (0..=m)
        .map(|k| {
            if k > 0 {
                ln_c += ((m - k + 1) as f64).ln() - (k as f64).ln();
            }
            (ln_c + k as f64 * q.ln() + (m - k) as f64 * (-q).ln_1p()).exp()
        })
        .collect();
    let total: f64 = p.iter().sum();
    DegreeDistribution::from_pmf(p.iter().map(|v| v / total).collect()).unwrap()
}

#[test]
fn sampled_networks_match_closed_forms_within_three_sigma() {
    for k in [2.0, 4.0] {
        for protocol in PROTOCOLS {
            let spec = EnsembleSpec::new(
                DegreeDistribution::poisson(k).unwrap(),
                protocol,
                NoiseModel::uniform(1e-3).unwrap(),
            )
            .unwrap();
            let r = mc_ensemble(&spec, 10, 100, 1000, 2024).unwrap();
            let closed = spec.fbar().unwrap();
            assert_eq!(r.excluded, 0);
            assert!(
                (r.fbar - closed).abs() < 3.0 * r.stderr,
                "k={k} {protocol:?}: {} vs {closed} ± {}",
                r.fbar,
                r.stderr
            );
        }
    }
}

/// Exact first-order rates of many large graphs resolve the edge-order
/// average that the ten-graph run cannot.
#[test]
fn random_order_forms_match_exact_graph_averages() {
    let (n, graphs) = (500, 100u64);
    for k in [2.0, 4.0] {
        let law = binomial_degrees(n, k);
        for protocol in [Protocol::BipartiteA, Protocol::BipartiteB] {
            let spec = EnsembleSpec::new(
                DegreeDistribution::poisson(k).unwrap(),
                protocol,
                NoiseModel::uniform(1e-3).unwrap(),
            )
            .unwrap();
            let rates: Vec<f64> = (0..graphs)
                .map(|i| {
                    let model = sample_spec(&spec, n, 11, i).unwrap().compile(spec.noise.semantics).unwrap();
                    first_order_decay(&model).unwrap().to_f64().unwrap()
                })
                .collect();
            let m = graphs as f64;
            let mean = rates.iter().sum::<f64>() / m;
            let se = (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0) / m).sqrt();
            let random_order = fbar(protocol, &law, ClosedForm::RandomOrder).unwrap();
            let mean_position = fbar(protocol, &law, ClosedForm::Equation).unwrap();
            assert!((mean - random_order).abs() < 3.0 * se, "k={k} {protocol:?}: {mean} vs {random_order} ± {se}");
            if protocol == Protocol::BipartiteA {
                assert!((mean - mean_position).abs() > 3.0 * se, "k={k} {protocol:?}: mean-position form not resolved");
            }
        }
    }
}

#[test]
fn equation_reading_of_bipartite_b_is_the_mean_position_limit() {
    // The random-order integrand evaluated at t = 1/2 is the equation form.
    for k in [1.0, 2.0, 3.0, 4.0, 6.0] {
        let d = DegreeDistribution::poisson(k).unwrap();
        let eq = fbar(Protocol::BipartiteB, &d, ClosedForm::Equation).unwrap();
        let text = fbar(Protocol::BipartiteB, &d, ClosedForm::Text).unwrap();
        let exact = fbar(Protocol::BipartiteB, &d, ClosedForm::RandomOrder).unwrap();
        assert!(exact < eq, "k={k}");
        assert!(eq != text);
    }
}

#[test]
fn crossover_is_stable_across_closed_forms() {
    for form in [ClosedForm::Equation, ClosedForm::Text, ClosedForm::RandomOrder] {
        let k = crossover_mean_degree(Protocol::Subgraph, Protocol::BipartiteB, form).unwrap().unwrap();
        assert!((k - 2.8).abs() < 0.1, "{form:?}: {k}");
    }
    // bipartite A stays above bipartite B everywhere on the search range
    assert_eq!(crossover_mean_degree(Protocol::BipartiteB, Protocol::BipartiteA, ClosedForm::Equation).unwrap(), None);
}

#[test]
fn subgraph_against_bipartite_a_agrees_with_sampled_ordering() {
    let root = crossover_mean_degree(Protocol::Subgraph, Protocol::BipartiteA, ClosedForm::Equation).unwrap().unwrap();
    assert!(root > 4.0);
    for k in [2.0, 4.0] {
        let rate = |protocol| {
            let spec = EnsembleSpec::new(
                DegreeDistribution::poisson(k).unwrap(),
                protocol,
                NoiseModel::uniform(1e-3).unwrap(),
            )
            .unwrap();
            mc_ensemble(&spec, 10, 100, 1000, 5).unwrap().fbar
        };
        assert!(rate(Protocol::Subgraph) < rate(Protocol::BipartiteA), "k={k}");
    }
}

#[test]
fn single_cycle_reproduces_ring_monte_carlo() {
    let n = 40;
    let noise = NoiseModel::uniform(2e-3).unwrap();
    let spec = CorrelatorSpec::bipartite_b(ring(n).unwrap(), EdgeOrder::ring_sequential(n), Purification::FirstOrder);
    let via_ensemble = graph_decay_mc(&spec, &noise, 4000, 17, Execution::Parallel).unwrap().unwrap();
    let model = RingVariant::BipartiteB.spec(n, Purification::FirstOrder).unwrap().compile(noise.semantics).unwrap();
    let direct = mc_fidelity(&model, &noise, 4000, 17).unwrap();
    let f = direct.f.unwrap();
    assert!((via_ensemble - f).abs() < 1e-12 * f);
}

#[test]
fn per_graph_spread_shrinks_with_size() {
    let spec = EnsembleSpec::new(
        DegreeDistribution::poisson(2.0).unwrap(),
        Protocol::Subgraph,
        NoiseModel::uniform(1e-3).unwrap(),
    )
    .unwrap();
    let small = mc_ensemble(&spec, 20, 100, 1000, 8).unwrap();
    let large = mc_ensemble(&spec, 20, 400, 1000, 8).unwrap();
    assert!(large.spread < small.spread, "{} vs {}", large.spread, small.spread);
}

#[test]
fn prescribed_split_sampling_is_rejected() {
    let d = DegreeDistribution::delta(2).with_split(vec![vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let spec = EnsembleSpec::new(d, Protocol::Subgraph, NoiseModel::uniform(1e-3).unwrap()).unwrap();
    assert!(mc_ensemble(&spec, 2, 10, 10, 0).is_err());
}
