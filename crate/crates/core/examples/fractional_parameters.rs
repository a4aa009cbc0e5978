//! ω_f, κ and φ as anti-blocker θ values of the ap, cp and fp corners, on
//! graph systems (where they collapse to LP values) and S-families.

use ncgraph::corners::{kappa_bounds, omega_f_bounds, phi_bounds, CornerOptions};
use ncgraph::graphs::{self, Graph};
use ncgraph::opsys;
use ncgraph::projections::FindOptions;

fn main() -> ncgraph::Result<()> {
    let opts = CornerOptions { samples: 8, find: FindOptions::new(8, 0) };
    for g in [Graph::cycle(5), Graph::path(4), Graph::petersen()] {
        let s = opsys::from_graph(&g);
        println!(
            "n = {:>2}: ω_f {:.6} (LP {:.6}), κ {:.6}, φ {:.6} (LP on complement {:.6})",
            g.n(),
            omega_f_bounds(&s, &opts)?.lower,
            graphs::fractional_clique_number(&g)?,
            kappa_bounds(&s, &opts)?.lower,
            phi_bounds(&s, &opts)?.lower,
            graphs::fractional_clique_number(&graphs::complement(&g))?,
        );
    }
    for sizes in [vec![2], vec![3], vec![2, 2]] {
        let s = opsys::s_family(&sizes)?;
        let k = kappa_bounds(&s, &opts)?;
        let p = phi_bounds(&s, &opts)?;
        println!("S{sizes:?}: κ ∈ [{:.6}, {:.6}], φ ∈ [{:.6}, {:.6}]", k.lower, k.upper, p.lower, p.upper);
    }
    Ok(())
}
