//! Approximation of the action of Fréchet derivatives of matrix functions.
//!
//! Given a matrix function `f`, a large sparse matrix `A`, a direction `E`
//! and a vector `b`, this crate approximates the pair
//!
//! ```text
//! v1 ≈ L_f(A, E) b        (the Fréchet derivative of f at A in direction E, applied to b)
//! v2 ≈ f(A) b
//! ```
//!
//! without ever forming `f(A)` or the 2n×2n block embedding explicitly. The
//! central algorithm ([`krylov::modified_arnoldi`]) builds a Krylov basis of
//! the block operator `[[A, E], [0, A]]` acting on `[0; b]`, but keeps the top
//! and bottom halves of the basis *separately orthonormal*, linked by a small
//! triangular coupling matrix. That yields a compressed 2k×2k surrogate whose
//! function evaluation recovers both `v1` and `v2`, with per-vector storage
//! `n` instead of `2n` and exactness on polynomials of degree < k.
//!
//! Reference baselines (block-embedding Arnoldi, finite differences,
//! complex step), dense oracles (block embedding, Daleckii-Krein), adjoint
//! identities, and two applications (network centrality sensitivities and a
//! heat-equation parameter fit) are included, mainly to validate the core
//! method and to exercise it end to end.

pub mod apps;
pub mod error;
pub mod frechet;
pub mod krylov;
pub mod linalg;
pub mod matfunc;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;
