//! Channels and their confusability systems: Kraus freedom, the channel built
//! from a full projection, tensor products, and carrying a channel over to a
//! nearby system.

use ncgraph::channels::{channel_from_full_projection, tensor_channel, transfer_channel, QuantumChannel};
use ncgraph::graphs::{self, Graph};
use ncgraph::opsys;

fn main() -> ncgraph::Result<()> {
    let g = Graph::cycle(5);
    let s = opsys::from_graph(&g);

    let lab = graphs::optimal_labelling(&g)?;
    let phi = ncgraph::channels::channel_from_labelling(&lab)?;
    println!("labelling channel: d = {}, k = {}, {} Kraus operators, in C(S_C5): {}", phi.d(), phi.k(), phi.kraus().len(), phi.is_member_of(&s)?);
    println!("dim S_Φ = {} (dim S_C5 = {})", phi.confusability()?.dim(), s.dim());

    // A maximal clique spans a full projection of S_G.
    let mut q = ncgraph::linalg::ComplexMatrix::zeros(5, 5);
    for v in [0, 1] {
        q[(v, v)] = 1.0.into();
    }
    let full = channel_from_full_projection(&s, &q, None)?;
    println!("full-projection channel in C(S_C5): {}", full.is_member_of(&s)?);

    let id = QuantumChannel::identity(2);
    let prod = tensor_channel(&phi, &id);
    println!("Φ ⊗ id: d = {}, k = {}, in C(S_C5 ⊗ M_2): {}", prod.d(), prod.k(), prod.is_member_of(&opsys::tensor(&s, &ncgraph::opsys::OperatorSystem::full(2)))?);

    let moved = opsys::perturb(&s, 1e-3, 7)?;
    let t = transfer_channel(&phi, &moved)?;
    println!("transferred to a perturbed system: residual {:.2e}", t.channel.membership_residual(&moved)?);
    Ok(())
}
