//! Dense complex helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// `true` once every entry is finite.
pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

// Decompositions (SVD, eigen) go through faer. nalgebra's SVD returned
// inaccurate singular vectors on some Cadzow iterates.

fn to_faer(m: &CMat) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn from_faer(m: faer::MatRef<'_, faer::c64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        Complex64::new(z.re, z.im)
    })
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    if !is_finite(m) {
        return Err(Error::SvdFailure);
    }
    let mut s = to_faer(m)
        .singular_values()
        .map_err(|_| Error::SvdFailure)?;
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Thin SVD `m = U diag(s) V^H` with singular values sorted nonincreasing.
pub struct SortedSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v_t: CMat,
}

pub fn svd_sorted(m: &CMat) -> Result<SortedSvd> {
    if !is_finite(m) {
        return Err(Error::SvdFailure);
    }
    let svd = to_faer(m).thin_svd().map_err(|_| Error::SvdFailure)?;
    let sv = svd.S().column_vector();
    let k = sv.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].re.total_cmp(&sv[a].re));
    let (u, v) = (svd.U(), svd.V());
    Ok(SortedSvd {
        u: CMat::from_fn(u.nrows(), k, |i, j| {
            let z = u[(i, order[j])];
            Complex64::new(z.re, z.im)
        }),
        s: order.iter().map(|&j| sv[j].re).collect(),
        v_t: CMat::from_fn(k, v.nrows(), |i, j| {
            let z = v[(j, order[i])];
            Complex64::new(z.re, -z.im)
        }),
    })
}

/// Thin SVD of a real matrix, singular values sorted nonincreasing.
pub fn real_svd_sorted(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::SvdFailure);
    }
    let f = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = f.thin_svd().map_err(|_| Error::SvdFailure)?;
    let sv = svd.S().column_vector();
    let k = sv.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let (u, v) = (svd.U(), svd.V());
    Ok((
        DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, order[j])]),
        order.iter().map(|&j| sv[j]).collect(),
        DMatrix::from_fn(k, v.nrows(), |i, j| v[(j, order[i])]),
    ))
}

/// 2-norm condition number; `inf` for a numerically singular matrix.
pub fn cond2(m: &CMat) -> Result<f64> {
    let s = singular_values(m)?;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        _ => Ok(f64::INFINITY),
    }
}

/// Inverse of a square matrix, refusing matrices singular to working precision.
pub fn inverse(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let cond = cond2(m)?;
    if !(cond.is_finite() && cond * (n as f64) * f64::EPSILON < 1.0) {
        return Err(Error::Singular { cond });
    }
    m.clone().try_inverse().ok_or(Error::Singular { cond })
}

/// `S^{-1} X S`.
pub fn conjugate(s: &CMat, s_inv: &CMat, x: &CMat) -> CMat {
    s_inv * x * s
}

/// Sum of squared off-diagonal magnitudes.
pub fn off(m: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

pub fn frob_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigendecomposition `m V = V diag(values)` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors as columns.
    pub vectors: CMat,
}

/// Eigenvalues and eigenvectors from faer's general complex eigensolver.
/// A defective matrix yields a (numerically) singular eigenvector matrix
/// rather than an error.
pub fn eig(m: &CMat) -> Result<Eigen> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        });
    }
    if !is_finite(m) {
        return Err(Error::EigenFailure);
    }
    let e = to_faer(m).eigen().map_err(|_| Error::EigenFailure)?;
    let s = e.S().column_vector();
    let values: Vec<Complex64> = (0..n).map(|i| Complex64::new(s[i].re, s[i].im)).collect();
    let mut vectors = from_faer(e.U());
    if !(values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && is_finite(&vectors)) {
        return Err(Error::EigenFailure);
    }
    normalize_columns(&mut vectors);
    Ok(Eigen { values, vectors })
}

/// Scale every nonzero column to unit Euclidean norm.
pub fn normalize_columns(m: &mut CMat) {
    for mut col in m.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= Complex64::new(nrm, 0.0);
        }
    }
}

/// Orthonormal basis (as columns) of the `dim` right singular directions of
/// `m` with the smallest singular values.
pub fn smallest_right_singular_basis(m: &CMat, dim: usize) -> Result<CMat> {
    let n = m.ncols();
    let svd = svd_sorted(m)?;
    // thin SVD of a square matrix: v_t is n x n
    let v = svd.v_t.adjoint();
    Ok(v.columns(n - dim, dim).into_owned())
}

/// Column-major vectorization.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVec, n: usize) -> CMat {
    CMat::from_column_slice(n, n, v.as_slice())
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Build an `n x n` complex matrix from real row-major data.
pub fn real_rows(n: usize, data: &[f64]) -> CMat {
    CMat::from_fn(n, n, |i, j| c(data[i * n + j]))
}
