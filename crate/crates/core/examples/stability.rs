//! θ̂ certificates survive amplification and compression, and move little
//! when the system is perturbed.

use ncgraph::graphs::Graph;
use ncgraph::lovasz::{continuity_check, stability_check, LovaszOptions};
use ncgraph::opsys;

fn main() -> ncgraph::Result<()> {
    let opts = LovaszOptions::default();
    let s = opsys::from_graph(&Graph::cycle(5));
    let st = stability_check(&s, 2, &opts)?;
    println!("θ̂ upper: S_C5 {:.8}, M_2(S_C5) {:.8}, passed {}", st.upper_s, st.upper_amplified, st.passed);
    for eps in [1e-4, 1e-3, 1e-2] {
        let c = continuity_check(&s, eps, 0.05, &opts)?;
        println!("ε = {eps:e}: largest shift {:.3e}", c.max_shift);
    }
    Ok(())
}
