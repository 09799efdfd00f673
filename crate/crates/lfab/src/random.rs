//! Seeded random test instances. Everything here is deterministic in the
//! seed, so CLI runs and tests are reproducible across machines.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard-normal vector.
pub fn normal_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Complex vector with independent standard-normal parts.
pub fn complex_normal_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Dense matrix with standard-normal entries.
pub fn dense_normal(n_rows: usize, n_cols: usize, seed: u64) -> DenseMatrix<f64> {
    let mut rng = rng_for(seed);
    DenseMatrix::from_fn(n_rows, n_cols, |_, _| rng.sample(StandardNormal))
}

/// Sparse matrix with roughly `density * n_rows * n_cols` standard-normal
/// entries at uniformly drawn positions.
pub fn sparse_normal(
    n_rows: usize,
    n_cols: usize,
    density: f64,
    seed: u64,
) -> Result<SparseMatrix<f64>> {
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::invalid("sparse_normal: empty shape"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::invalid(format!(
            "sparse_normal: density {density} not in (0, 1]"
        )));
    }
    let total = n_rows * n_cols;
    let target = ((density * total as f64).ceil() as usize).clamp(1, total);
    let mut rng = rng_for(seed);
    let mut positions: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut attempts = 0usize;
    while positions.len() < target && attempts < 64 * target {
        positions.insert((rng.random_range(0..n_rows), rng.random_range(0..n_cols)));
        attempts += 1;
    }
    let triplets: Vec<(usize, usize, f64)> = positions
        .into_iter()
        .map(|(i, j)| (i, j, rng.sample(StandardNormal)))
        .collect();
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

/// Symmetric sparse matrix: normal entries mirrored across the diagonal.
pub fn symmetric_sparse_normal(n: usize, density: f64, seed: u64) -> Result<SparseMatrix<f64>> {
    let base = sparse_normal(n, n, density / 2.0, seed)?;
    let mut triplets = Vec::new();
    for (i, j, x) in base.triplets() {
        if i == j {
            triplets.push((i, j, x));
        } else {
            triplets.push((i, j, x));
            triplets.push((j, i, x));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

/// Symmetric positive definite sparse matrix: a symmetric normal pattern
/// with the diagonal lifted above the off-diagonal row sums, so every
/// Gershgorin disc sits in `[margin, inf)`.
pub fn spd_sparse_normal(n: usize, density: f64, margin: f64, seed: u64) -> Result<SparseMatrix<f64>> {
    if margin <= 0.0 {
        return Err(Error::invalid("spd_sparse_normal: margin must be positive"));
    }
    let sym = symmetric_sparse_normal(n, density, seed)?;
    let mut row_sums = vec![0.0f64; n];
    let mut triplets = Vec::new();
    for (i, j, x) in sym.triplets() {
        if i != j {
            row_sums[i] += x.abs();
            triplets.push((i, j, x));
        }
    }
    for (i, &s) in row_sums.iter().enumerate() {
        triplets.push((i, i, s + margin));
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}
