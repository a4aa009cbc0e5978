//! Dense complex linear algebra on `M_d`.

pub mod eig;
pub mod matrix;
pub mod random;
pub mod subspace;

pub use eig::{herm_eig, jacobi_eigen, lambda_max, lambda_min, op_norm, Eigen, HermitianOperator};
pub use matrix::{basis_vector, normalize, vdot, vnorm, ComplexMatrix};
pub use subspace::{
    hs_inner, kron, membership, orth_complement, project_onto, subspace_from_spanning, tensor_subspace,
    OperatorSubspace, MEMBERSHIP_TOL, RANK_TOL,
};
