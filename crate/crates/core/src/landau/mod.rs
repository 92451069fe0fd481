//! The Landau tensor and the discrete metric bracket: dense Landau matrix
//! for arbitrary mobility and the sparse collision operator for `M(f) = f`.

mod dense;
mod linearization;
mod sparse;
mod tensor;

pub use dense::{assemble_landau_dense, bracket_apply, LandauMatrix};
pub use linearization::assemble_collision_jacobian;
pub use sparse::{assemble_sparse_operator, sparse_apply, SparseCollisionOperator};
pub use tensor::{landau_tensor, LandauTensorParams, Mat2};
