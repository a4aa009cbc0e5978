//! Diagonal of an abelian projection of S_G written as a convex combination
//! of independent sets, via the Birkhoff decomposition.

use ncgraph::corners::vp_decompose;
use ncgraph::graphs::Graph;
use ncgraph::projections::sample_graph_abelian;
use ncgraph::solvers::birkhoff_decompose;

fn main() -> ncgraph::Result<()> {
    let m = vec![vec![0.5, 0.5, 0.0], vec![0.25, 0.25, 0.5], vec![0.25, 0.25, 0.5]];
    for t in birkhoff_decompose(&m, 1e-12)? {
        println!("{:.3} × permutation {:?}", t.weight, t.perm);
    }

    let g = Graph::cycle(5);
    let mut rng = ncgraph::projections::search::restart_rng(1, 0);
    let family = sample_graph_abelian(&g, 2, &mut rng).expect("C5 has independent pairs");
    let vp = vp_decompose(&g, &family.projection(), &family.vectors)?;
    println!("\nrank-2 abelian projection of S_C5, residual {:.2e}:", vp.residual);
    for (w, set) in &vp.terms {
        println!("  {w:.4} × {set:?}");
    }
    Ok(())
}
