//! Classical graphs and their exact parameters.

pub mod exact;
pub mod graph;
pub mod io;
pub mod theta;

pub use exact::{
    chromatic_number, clique_number, color_classes, fractional_chromatic_number, fractional_clique_number,
    fvp_membership, independence_number, maximal_cliques, maximal_independent_sets, maximum_clique,
    maximum_independent_set, vp_certificate, vp_membership,
};
pub use graph::{complement, find_isomorphism, is_isomorphic, strong_power, strong_product, Graph};
pub use theta::{labelling_from_clique_cover, lovasz_theta, optimal_labelling, LovaszTheta, OrthogonalLabelling};
