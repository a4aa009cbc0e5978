//! Independent, clique and full families found by frame search, checked
//! against the exact verifiers, and the abelian/clique pairing bound.

use ncgraph::corners::{ap_corner, check_first_sandwich, cp_corner, CornerOptions};
use ncgraph::opsys::{self, OperatorSystem};
use ncgraph::projections::{is_clique_set, is_independent_set, search_clique_set, search_full_family, search_independent_set, FindOptions};

fn main() -> ncgraph::Result<()> {
    let find = FindOptions::new(16, 1);
    // A random 3-dimensional system in M_4.
    let mut rng = ncgraph::projections::search::restart_rng(3, 0);
    let mut mats = vec![ncgraph::linalg::ComplexMatrix::identity(4)];
    mats.push(ncgraph::linalg::random::random_hermitian(4, &mut rng));
    mats.push(ncgraph::linalg::random::random_hermitian(4, &mut rng));
    let s = OperatorSystem::from_spanning(&mats)?;

    for k in 1..=4 {
        let ind = search_independent_set(&s, k, &find);
        let cli = search_clique_set(&s, k, &find);
        let full = search_full_family(&s, k, &find);
        println!(
            "k = {k}: independent {}, clique {}, full {}",
            ind.map(|f| is_independent_set(&s, &f.vectors, 1e-7).unwrap_or(false)).unwrap_or(false),
            cli.map(|f| is_clique_set(&s, &f.vectors, 1e-7).unwrap_or(false)).unwrap_or(false),
            full.is_some(),
        );
    }

    let opts = CornerOptions { samples: 6, find };
    for (name, sys) in [("random", s), ("S_C5", opsys::from_graph(&ncgraph::graphs::Graph::cycle(5)))] {
        let ap = ap_corner(&sys, &opts)?.matrices();
        let cp = cp_corner(&sys, &opts)?.matrices();
        println!("{name}: max Tr(PQ) over {} x {} generators = {:.10}", ap.len(), cp.len(), check_first_sandwich(&ap, &cp));
    }
    Ok(())
}
