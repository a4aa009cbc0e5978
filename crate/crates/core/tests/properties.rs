//! Randomized invariants across modules.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ncgraph::channels::QuantumChannel;
use ncgraph::graphs::{self, Graph};
use ncgraph::linalg::random::random_isometry;
use ncgraph::linalg::ComplexMatrix;
use ncgraph::opsys;
use ncgraph::projections::{is_clique_set, is_independent_set};

fn graph(n: usize, p: f64, seed: u64) -> Graph {
    Graph::random(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn complement_is_an_involution(n in 2usize..6, p in 0.0f64..1.0, seed in any::<u64>()) {
        let s = opsys::from_graph(&graph(n, p, seed));
        let c = opsys::complement(&s);
        prop_assert!(opsys::complement(&c).same_as(&s));
        prop_assert_eq!(s.dim() + c.dim(), n * n + 1);
    }

    #[test]
    fn graph_independent_sets_are_system_independent(n in 2usize..7, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        let s = opsys::from_graph(&g);
        let set = graphs::maximum_independent_set(&g).unwrap();
        let family: Vec<_> = set.iter().map(|&v| ncgraph::linalg::basis_vector(n, v)).collect();
        prop_assert!(is_independent_set(&s, &family, 1e-9).unwrap());
        prop_assert!(is_clique_set(&opsys::complement(&s), &family, 1e-9).unwrap());
    }

    #[test]
    fn alpha_le_theta_le_chi_bar(n in 2usize..8, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        let alpha = graphs::independence_number(&g).unwrap() as f64;
        let theta = graphs::lovasz_theta(&g).unwrap();
        let cover = graphs::chromatic_number(&graphs::complement(&g)).unwrap() as f64;
        prop_assert!(alpha <= theta.value + 1e-6);
        prop_assert!(theta.value <= cover + 1e-6);
        prop_assert!(theta.value <= theta.dual_value.max(theta.value) + 1e-12);
    }

    #[test]
    fn channels_preserve_trace(d in 1usize..5, k in 1usize..4, m in 1usize..4, seed in any::<u64>()) {
        prop_assume!(k * m >= d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_isometry(k * m, d, &mut rng);
        let phi = QuantumChannel::new(ncgraph::channels::unstack(&v, k)).unwrap();
        let rho = ncgraph::linalg::random::random_unit_vector(d, &mut rng);
        let out = phi.apply(&ComplexMatrix::outer(&rho, &rho)).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-9);
        // Kraus products always land in the confusability system.
        prop_assert!(phi.membership_residual(&phi.confusability().unwrap()).unwrap() < 1e-8);
    }

    #[test]
    fn tensor_dimensions_multiply(a in 1usize..3, b in 1usize..3) {
        let s = opsys::s_family(&[a + 1]).unwrap();
        let t = opsys::s_family(&[b + 1]).unwrap();
        let st = opsys::tensor(&s, &t);
        prop_assert_eq!(st.dim(), s.dim() * t.dim());
        prop_assert_eq!(st.dim_h(), s.dim_h() * t.dim_h());
    }
}
