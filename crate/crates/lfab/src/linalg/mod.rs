//! Dense and sparse linear-algebra kernels: vectors, column-major dense
//! matrices, CSR sparse matrices, Gram-Schmidt, LU, a Hermitian Jacobi
//! eigensolver, abstract linear operators, and matrix file IO.

pub mod dense;
pub mod eig;
pub mod gram_schmidt;
pub mod io;
pub mod lu;
pub mod operator;
pub mod sparse;
pub mod vector;

pub use dense::DenseMatrix;
pub use gram_schmidt::{gram_schmidt_step, GsStep};
pub use lu::LuFactors;
pub use operator::LinearOperator;
pub use sparse::SparseMatrix;
