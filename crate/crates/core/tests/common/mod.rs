#![allow(dead_code)]

use flipnet_core::{Matrix, Tensor3};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_tensor(dims: [usize; 3], rng: &mut ChaCha8Rng) -> Tensor3 {
    Tensor3::from_fn(dims, |_, _, _| rng.gen_range(-1.0..1.0))
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Orthonormal basis of the column space (thin QR, full column rank assumed).
pub fn orthonormal_basis(m: &Matrix) -> DMatrix<f64> {
    to_na(m).qr().q()
}

/// `sin` of the largest principal angle between two column spaces of equal
/// dimension, bounded above through the Frobenius norm.
pub fn subspace_gap(a: &Matrix, b: &Matrix) -> f64 {
    let qa = orthonormal_basis(a);
    let qb = orthonormal_basis(b);
    let resid = &qb - &qa * (qa.transpose() * &qb);
    resid.norm()
}

/// Random matrix with orthonormal columns.
pub fn random_orthonormal(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let q = orthonormal_basis(&random_matrix(rows, cols, rng));
    Matrix::from_fn(rows, cols, |i, j| q[(i, j)])
}

pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}
