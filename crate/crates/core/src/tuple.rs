//! Matrix tuples, the off-diagonal objective and simultaneous-diagonalizability tests.
//!
//! A tuple `(X_1, ..., X_K)` is simultaneously diagonalizable exactly when all
//! members commute pairwise and each member is diagonalizable. Both halves of
//! that test are exposed separately so that callers can report which one failed.

use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};

/// Default tolerance for the commutator and diagonalizability tests.
pub const DEFAULT_SD_TOL: f64 = 1e-8;

/// Floor added to the commutator denominator so zero matrices are handled.
const DEN_FLOOR: f64 = 1e-300;

/// An ordered K-tuple of n x n complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    n: usize,
    mats: Vec<CMat>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::InvalidTuple("tuple must contain at least one matrix".into()))?;
        let n = first.nrows();
        if n == 0 {
            return Err(Error::InvalidTuple(
                "matrix dimension must be positive".into(),
            ));
        }
        for (k, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidTuple(format!(
                    "matrix {k} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if !linalg::is_finite(m) {
                return Err(Error::InvalidTuple(format!(
                    "matrix {k} has non-finite entries"
                )));
            }
        }
        Ok(Self { n, mats })
    }

    /// Builds a tuple from real row-major matrices.
    pub fn from_real(n: usize, rows: &[&[f64]]) -> Result<Self> {
        let mats = rows
            .iter()
            .map(|r| {
                if r.len() != n * n {
                    Err(Error::InvalidTuple(format!(
                        "expected {} entries, got {}",
                        n * n,
                        r.len()
                    )))
                } else {
                    Ok(linalg::real_rows(n, r))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            n,
            mats: vec![CMat::zeros(n, n); k],
        }
    }

    /// `(S diag(l_1) S^{-1}, ..., S diag(l_K) S^{-1})`.
    pub fn from_diagonalizer(s: &CMat, lambdas: &[Vec<Complex64>]) -> Result<Self> {
        let s_inv = linalg::inverse(s)?;
        let mats = lambdas
            .iter()
            .map(|l| s * CMat::from_diagonal(&CVec::from_column_slice(l)) * &s_inv)
            .collect();
        Self::new(mats)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.mats.len()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn into_matrices(self) -> Vec<CMat> {
        self.mats
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMat> {
        self.mats.iter()
    }

    /// `sqrt(sum_k ||X_k||_F^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.mats.iter().map(linalg::frob_sq).sum()
    }

    /// `true` when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.mats.iter().all(|m| m.iter().all(|z| z.im == 0.0))
    }

    pub fn map<F: FnMut(&CMat) -> CMat>(&self, f: F) -> Self {
        Self {
            n: self.n,
            mats: self.mats.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|m| m * Complex64::new(alpha, 0.0))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Self {
        assert_eq!(self.n, other.n, "tuple dimension mismatch");
        assert_eq!(self.k(), other.k(), "tuple length mismatch");
        Self {
            n: self.n,
            mats: self
                .mats
                .iter()
                .zip(&other.mats)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<usize> for MatrixTuple {
    type Output = CMat;
    fn index(&self, k: usize) -> &CMat {
        &self.mats[k]
    }
}

impl<'a> Add<&'a MatrixTuple> for &'a MatrixTuple {
    type Output = MatrixTuple;
    fn add(self, rhs: &MatrixTuple) -> MatrixTuple {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a MatrixTuple> for &'a MatrixTuple {
    type Output = MatrixTuple;
    fn sub(self, rhs: &MatrixTuple) -> MatrixTuple {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &MatrixTuple {
    type Output = MatrixTuple;
    fn mul(self, rhs: f64) -> MatrixTuple {
        self.scale(rhs)
    }
}

/// Outcome of the commuting-and-diagonalizable test.
#[derive(Debug, Clone, PartialEq)]
pub struct SdMembership {
    pub is_commuting: bool,
    pub is_all_diagonalizable: bool,
    pub commutator_residual: f64,
    /// Relative eigen-reconstruction residual per matrix.
    pub diag_residuals: Vec<f64>,
    /// Condition number of each matrix's eigenvector matrix.
    pub eigvec_conds: Vec<f64>,
}

impl SdMembership {
    pub fn is_member(&self) -> bool {
        self.is_commuting && self.is_all_diagonalizable
    }
}

/// A candidate common diagonalizer together with the diagonal factors it induces.
#[derive(Debug, Clone)]
pub struct DiagonalizerResult {
    pub s: CMat,
    /// Diagonal of `S^{-1} X_k S` for every k.
    pub lambdas: Vec<Vec<Complex64>>,
    /// `sum_k off(S^{-1} X_k S)`.
    pub off_value: f64,
    pub cond_s: f64,
}

impl DiagonalizerResult {
    /// Evaluates `S` against `x`, filling in the diagonal factors and diagnostics.
    pub fn evaluate(s: CMat, x: &MatrixTuple) -> Result<Self> {
        let s_inv = linalg::inverse(&s)?;
        let cond_s = linalg::cond2(&s)?;
        let mut lambdas = Vec::with_capacity(x.k());
        let mut off_value = 0.0;
        for xk in x.iter() {
            let d = linalg::conjugate(&s, &s_inv, xk);
            off_value += linalg::off(&d);
            lambdas.push(d.diagonal().iter().copied().collect());
        }
        Ok(Self {
            s,
            lambdas,
            off_value,
            cond_s,
        })
    }

    /// `(S diag(lambda_k) S^{-1})_k`.
    pub fn reconstruct(&self) -> Result<MatrixTuple> {
        MatrixTuple::from_diagonalizer(&self.s, &self.lambdas)
    }
}

/// `f_X(S) = sum_k off(S^{-1} X_k S)`.
pub fn off_objective(x: &MatrixTuple, s: &CMat) -> Result<f64> {
    check_square(s, x.n())?;
    let s_inv = linalg::inverse(s)?;
    Ok(x.iter()
        .map(|xk| linalg::off(&linalg::conjugate(s, &s_inv, xk)))
        .sum())
}

/// Largest relative commutator `||X_k X_l - X_l X_k||_F / (||X_k||_F ||X_l||_F)` over all pairs.
pub fn commutator_residual(x: &MatrixTuple) -> f64 {
    let norms: Vec<f64> = x.iter().map(|m| m.norm()).collect();
    let mut worst = 0.0_f64;
    for k in 0..x.k() {
        for l in (k + 1)..x.k() {
            let c = &x[k] * &x[l] - &x[l] * &x[k];
            worst = worst.max(c.norm() / (norms[k] * norms[l] + DEN_FLOOR));
        }
    }
    worst
}

/// Numerical diagonalizability verdict for one matrix.
#[derive(Debug, Clone)]
pub struct DiagonalizabilityCheck {
    pub diagonalizable: bool,
    pub eigen: linalg::Eigen,
    pub eigvec_cond: f64,
    pub residual: f64,
}

/// Diagonalizable iff the unit-column eigenvector matrix has `cond <= 1/tol` and
/// reconstructs `m` to relative accuracy `tol`.
pub fn check_diagonalizable(m: &CMat, tol: f64) -> Result<DiagonalizabilityCheck> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let eigen = linalg::eig(m)?;
    let eigvec_cond = linalg::cond2(&eigen.vectors)?;
    let well_conditioned = eigvec_cond.is_finite() && eigvec_cond <= 1.0 / tol;
    let m_norm = m.norm();
    let residual = if m_norm == 0.0 {
        0.0
    } else if !well_conditioned {
        f64::INFINITY
    } else {
        let v_inv = linalg::inverse(&eigen.vectors)?;
        let lam = CMat::from_diagonal(&CVec::from_column_slice(&eigen.values));
        (&eigen.vectors * lam * v_inv - m).norm() / m_norm
    };
    let diagonalizable = m_norm == 0.0 || (well_conditioned && residual <= tol);
    Ok(DiagonalizabilityCheck {
        diagonalizable,
        eigen,
        eigvec_cond,
        residual,
    })
}

/// Commuting test plus per-matrix diagonalizability.
pub fn check_sd_membership(x: &MatrixTuple, tol: f64) -> Result<SdMembership> {
    let (mem, _) = check_sd_membership_detailed(x, tol)?;
    Ok(mem)
}

/// As [`check_sd_membership`], also handing back the per-matrix eigendecompositions.
pub fn check_sd_membership_detailed(
    x: &MatrixTuple,
    tol: f64,
) -> Result<(SdMembership, Vec<DiagonalizabilityCheck>)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let commutator = commutator_residual(x);
    let checks = x
        .iter()
        .map(|m| check_diagonalizable(m, tol))
        .collect::<Result<Vec<_>>>()?;
    let mem = SdMembership {
        is_commuting: commutator <= tol,
        is_all_diagonalizable: checks.iter().all(|c| c.diagonalizable),
        commutator_residual: commutator,
        diag_residuals: checks.iter().map(|c| c.residual).collect(),
        eigvec_conds: checks.iter().map(|c| c.eigvec_cond).collect(),
    };
    Ok((mem, checks))
}

/// Essential uniqueness: the n rows `(lambda_p^(1), ..., lambda_p^(K))` are pairwise distinct.
///
/// `lambdas[k][p]` is the p-th eigenvalue of the k-th matrix. Rows closer than
/// `tol * max|lambda|` (Euclidean distance) count as equal.
pub fn check_essential_uniqueness(lambdas: &[Vec<Complex64>], tol: f64) -> bool {
    let Some(first) = lambdas.first() else {
        return true;
    };
    let n = first.len();
    let scale = lambdas
        .iter()
        .flat_map(|l| l.iter())
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max);
    for p in 0..n {
        for q in (p + 1)..n {
            let dist: f64 = lambdas
                .iter()
                .map(|l| (l[p] - l[q]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if dist <= tol * scale {
                return false;
            }
        }
    }
    true
}

/// The n^2 x n Khatri-Rao matrix `S^{-T} ⊙ S`; column j is `vec(s_j r_j)` with
/// `r_j` the j-th row of `S^{-1}`.
pub fn khatri_rao_basis(s: &CMat, s_inv: &CMat) -> CMat {
    let n = s.nrows();
    let mut m = CMat::zeros(n * n, n);
    for j in 0..n {
        for col in 0..n {
            let r = s_inv[(j, col)];
            for row in 0..n {
                m[(col * n + row, j)] = s[(row, j)] * r;
            }
        }
    }
    m
}

/// Orthogonal projection of `x` onto `SD(S)`, the subspace of tuples diagonalized by `s`.
///
/// Solved per matrix as a least-squares problem against `S^{-T} ⊙ S` through a
/// single QR factorization.
pub fn project_onto_sd_of(s: &CMat, x: &MatrixTuple) -> Result<MatrixTuple> {
    let n = x.n();
    check_square(s, n)?;
    let s_inv = linalg::inverse(s)?;
    let kr = khatri_rao_basis(s, &s_inv);
    let qr = kr.clone().qr();
    let r = qr.r();
    let q = qr.q();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].norm()).collect();
    let hi = diag.iter().copied().fold(0.0_f64, f64::max);
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if ratio <= (n * n) as f64 * f64::EPSILON {
        return Err(Error::RankDeficientKhatriRao { ratio });
    }
    let q_h = q.adjoint();
    let mut out = Vec::with_capacity(x.k());
    for xk in x.iter() {
        let rhs = &q_h * linalg::vec_of(xk);
        let coef = r
            .solve_upper_triangular(&rhs)
            .ok_or(Error::RankDeficientKhatriRao { ratio })?;
        out.push(s * CMat::from_diagonal(&coef) * &s_inv);
    }
    MatrixTuple::new(out)
}

fn check_square(s: &CMat, n: usize) -> Result<()> {
    if s.nrows() != n || s.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "diagonalizer is {}x{}, expected {n}x{n}",
            s.nrows(),
            s.ncols()
        )));
    }
    Ok(())
}

/// Diagonal tuple helper used throughout the tests and examples.
pub fn diagonal_tuple(lambdas: &[Vec<f64>]) -> Result<MatrixTuple> {
    MatrixTuple::new(
        lambdas
            .iter()
            .map(|l| {
                DMatrix::from_diagonal(&CVec::from_iterator(
                    l.len(),
                    l.iter().map(|&v| linalg::c(v)),
                ))
            })
            .collect(),
    )
}
