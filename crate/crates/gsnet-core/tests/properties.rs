use gsnet_core::correlators::{Config, CorrelatorSpec, Purification};
use gsnet_core::graph::{erdos_renyi, orient_random, EdgeOrder, Graph};
use gsnet_core::noise::{NoiseModel, Semantics};
use gsnet_core::par::Execution;
use gsnet_core::purification::{purification_round, CorrelatorTable};
use gsnet_core::statmech::{fidelity_exact, mc_fidelity_with};
use proptest::prelude::*;

#[derive(Debug, Clone, Copy)]
enum Kind {
    A,
    B,
    Subgraph,
}

fn build(kind: Kind, g: Graph, seed: u64, pur: Purification) -> CorrelatorSpec {
    let order = EdgeOrder::random(&g, seed);
    match kind {
        Kind::A => CorrelatorSpec::bipartite_a(g, order, pur),
        Kind::B => CorrelatorSpec::bipartite_b(g, order, pur),
        Kind::Subgraph => CorrelatorSpec::subgraph(orient_random(&g, seed ^ 0x5a5a), order, pur),
    }
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::A), Just(Kind::B), Just(Kind::Subgraph)]
}

fn purification() -> impl Strategy<Value = Purification> {
    prop_oneof![Just(Purification::Ideal), Just(Purification::FirstOrder)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_zero_configuration_is_noiseless(
        kind in kind(), n in 2usize..12, k in 0.0f64..3.0, seed in any::<u64>(),
        p1 in 0.0f64..0.2, p2 in 0.0f64..0.2, p in 0.0f64..0.2, pur in purification(),
    ) {
        let g = erdos_renyi(n, k.min((n - 1) as f64), seed).unwrap();
        let spec = build(kind, g, seed, pur);
        for sem in [Semantics::Or, Semantics::ExactXor] {
            let noise = NoiseModel::new(p1, p2, 0.0, p, sem).unwrap();
            let v = spec.compile(sem).unwrap().correlator(&Config::zeros(n), &noise).unwrap();
            prop_assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn fidelity_decreases_with_noise(
        kind in kind(), n in 2usize..9, seed in any::<u64>(), lo in 0.0f64..0.1, gap in 1e-4f64..0.1,
        pur in purification(),
    ) {
        let g = erdos_renyi(n, 2.0f64.min((n - 1) as f64), seed).unwrap();
        let model = build(kind, g, seed, pur).compile(Semantics::Or).unwrap();
        let f = |p| fidelity_exact(&model, &NoiseModel::uniform(p).unwrap()).unwrap().fidelity.unwrap();
        prop_assert!(f(lo + gap) <= f(lo));
    }

    /// A gate that only fires on a nontrivial restriction fires less often
    /// than one that fires on any set bit.
    #[test]
    fn exact_semantics_never_below_or_semantics(
        kind in kind(), n in 2usize..10, seed in any::<u64>(), x in any::<u64>(), p in 0.0f64..0.2,
    ) {
        let g = erdos_renyi(n, 2.5f64.min((n - 1) as f64), seed).unwrap();
        let spec = build(kind, g, seed, Purification::FirstOrder);
        let cfg = Config::from_u64(n, x & ((1 << n) - 1));
        let noise = NoiseModel::uniform(p).unwrap();
        let or = spec.compile(Semantics::Or).unwrap().correlator(&cfg, &noise).unwrap();
        let xor = spec
            .compile(Semantics::ExactXor)
            .unwrap()
            .correlator(&cfg, &noise.with_semantics(Semantics::ExactXor))
            .unwrap();
        prop_assert!(xor >= or - 1e-15, "xor {} < or {}", xor, or);
    }

    #[test]
    fn monte_carlo_is_reproducible_across_schedules(
        kind in kind(), n in 2usize..40, seed in any::<u64>(), samples in 2u64..3000,
    ) {
        let g = erdos_renyi(n, 2.0f64.min((n - 1) as f64), seed).unwrap();
        let model = build(kind, g, seed, Purification::FirstOrder).compile(Semantics::Or).unwrap();
        let noise = NoiseModel::uniform(0.01).unwrap();
        let a = mc_fidelity_with(&model, &noise, samples, seed, Execution::Sequential).unwrap();
        let b = mc_fidelity_with(&model, &noise, samples, seed, Execution::Parallel).unwrap();
        let c = mc_fidelity_with(&model, &noise, samples, seed, Execution::Parallel).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&b, &c);
    }

    #[test]
    fn random_orientation_and_order_keep_the_graph(n in 2usize..30, k in 0.0f64..4.0, seed in any::<u64>()) {
        let g = erdos_renyi(n, k.min((n - 1) as f64), seed).unwrap();
        let o = orient_random(&g, seed);
        prop_assert_eq!(o.base(), &g);
        prop_assert_eq!(o.arcs().len(), g.n_edges());
        let order = EdgeOrder::random(&g, seed);
        prop_assert!(EdgeOrder::new(&g, order.sequence().to_vec()).is_ok());
    }

    #[test]
    fn purification_keeps_identity_entry_and_bounds(
        j in 1usize..6, p1 in 0.0f64..0.05, p2 in 0.0f64..0.05, err in 0.0f64..0.2,
    ) {
        let t = CorrelatorTable::new(j, {
            let mut r = vec![1.0 - err; j + 1];
            r[0] = 1.0;
            r
        }, vec![1.0 - err; j + 1]).unwrap();
        let out = purification_round(&t, p1, p2).unwrap();
        prop_assert!((out.get(0, 0) - 1.0).abs() < 1e-12);
        for a in 0..2 {
            for &v in out.row(a) {
                prop_assert!(v.abs() <= 1.0 + 1e-12);
            }
        }
    }
}

#[test]
fn ideal_star_is_a_fixed_point_of_noiseless_rounds() {
    for j in 1..=8 {
        let t = CorrelatorTable::ideal(j);
        assert!(purification_round(&t, 0.0, 0.0).unwrap().max_abs_diff(&t) < 1e-15);
    }
}
