//! Random inputs shared by the unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, CMat};
use crate::tuple::MatrixTuple;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real_mat(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CMat {
    DMatrix::from_fn(n, m, |_, _| linalg::c(rng.sample(StandardNormal)))
}

pub fn complex_mat(n: usize, m: usize, rng: &mut ChaCha8Rng) -> CMat {
    DMatrix::from_fn(n, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_tuple(n: usize, k: usize, rng: &mut ChaCha8Rng) -> MatrixTuple {
    MatrixTuple::new((0..k).map(|_| complex_mat(n, n, rng)).collect()).unwrap()
}

/// `(S, lambdas, S diag(lambda_k) S^{-1})` with `S = I + 0.3 G` (moderate conditioning).
pub fn random_sd(
    n: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> (CMat, Vec<Vec<Complex64>>, MatrixTuple) {
    let s = CMat::identity(n, n) + real_mat(n, n, rng) * linalg::c(0.3);
    let lambdas: Vec<Vec<Complex64>> = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| linalg::c(rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    let a = MatrixTuple::from_diagonalizer(&s, &lambdas).unwrap();
    (s, lambdas, a)
}

/// Dense `I ⊗ X - X^T ⊗ I`.
pub fn kron_sum(x: &CMat) -> CMat {
    let n = x.nrows();
    let eye = CMat::identity(n, n);
    eye.kronecker(x) - x.transpose().kronecker(&eye)
}

/// Orthogonal projection of `b` onto the column span of `m` by normal equations.
pub fn normal_equations_projection(m: &CMat, b: &CMat) -> CMat {
    let g = m.adjoint() * m;
    let coef = g.lu().solve(&(m.adjoint() * b)).expect("full column rank");
    m * coef
}

pub fn rel(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
