//! Zero-error capacity brackets from independent sets of powers and θ/θ̂.

use ncgraph::capacity::{graph_capacity_bracket, system_capacity_bracket};
use ncgraph::graphs::Graph;
use ncgraph::lovasz::LovaszOptions;
use ncgraph::opsys::{self, OperatorSystem};

fn main() -> ncgraph::Result<()> {
    for (name, g) in [("C5", Graph::cycle(5)), ("C7", Graph::cycle(7)), ("P4", Graph::path(4))] {
        let b = graph_capacity_bracket(&g, 2)?;
        let alphas: Vec<usize> = b.powers.iter().map(|p| p.alpha).collect();
        println!("{name}: α of powers {alphas:?}, capacity in [{:.6}, {:.6}]", b.lower, b.upper);
    }
    let opts = LovaszOptions::default();
    for (name, s) in [("CI_2", OperatorSystem::scalars(2)), ("S_2", opsys::s_family(&[2])?)] {
        let b = system_capacity_bracket(&s, 2, &opts)?;
        let audit = b.audit.as_ref().map(|a| a.passed).unwrap_or(false);
        println!("{name}: capacity in [{:.6}, {:.6}], product certificate audit passed: {audit}", b.lower, b.upper);
    }
    Ok(())
}
