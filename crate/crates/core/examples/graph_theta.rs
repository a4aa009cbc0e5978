//! Classical graph parameters next to the Lovász number, plus the optimal
//! orthonormal labelling of the pentagon.

use ncgraph::graphs::{self, Graph};

fn main() -> ncgraph::Result<()> {
    let named = [("C5", Graph::cycle(5)), ("C7", Graph::cycle(7)), ("Petersen", Graph::petersen()), ("K4", Graph::complete(4))];
    println!("{:<9} {:>5} {:>10} {:>10} {:>5}", "graph", "alpha", "theta", "omega_f", "chi");
    for (name, g) in &named {
        let theta = graphs::lovasz_theta(g)?;
        println!(
            "{name:<9} {:>5} {:>10.6} {:>10.6} {:>5}",
            graphs::independence_number(g)?,
            theta.value,
            graphs::fractional_clique_number(g)?,
            graphs::chromatic_number(g)?
        );
    }

    let lab = graphs::optimal_labelling(&Graph::cycle(5))?;
    println!("\npentagon labelling value: {:.8} (sqrt 5 = {:.8})", lab.value(), 5f64.sqrt());
    Ok(())
}
