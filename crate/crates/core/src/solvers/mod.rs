//! LP, SDP and Birkhoff–von Neumann decomposition.

pub mod birkhoff;
pub mod lp;
pub mod sdp;

pub use birkhoff::{birkhoff_decompose, BirkhoffTerm};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Sense};
pub use sdp::{
    dense_or_sparse, solve_block_sdp, solve_lmi, solve_sdp, BlockData, BlockKind, BlockSdp, BlockValue, ConstraintSense, LmiProblem,
    LmiSolution, SdpOptions, SdpSolution, SdpStatus, SemidefiniteProgram,
};
