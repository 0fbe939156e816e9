//! Permutation- and scaling-invariant error metrics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::tuple::MatrixTuple;

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
/// potentials). Returns `assignment[row] = col`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays with a virtual column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
}

/// Relative squared errors after column normalization, phase alignment and
/// optimal column matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub err_s: f64,
    pub err_lambda: f64,
    pub err_a: f64,
}

fn unit_columns(s: &CMat) -> Result<CMat> {
    let mut out = s.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let nrm = col.norm();
        if !(nrm > 0.0) {
            return Err(Error::ZeroColumn { index: j });
        }
        col /= Complex64::new(nrm, 0.0);
    }
    Ok(out)
}

/// `cost[i][j] = min_{|c|=1} ||a_i - c b_j||^2 = 2 - 2 |<a_i, b_j>|` for unit columns.
pub fn matching_cost(star: &CMat, hat: &CMat) -> Vec<Vec<f64>> {
    let n = star.ncols();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let ip = star.column(i).dotc(&hat.column(j)).norm();
                    (2.0 - 2.0 * ip).max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Relative S error only (normalization, phase alignment, matching).
pub fn s_error(s_star: &CMat, s_hat: &CMat) -> Option<f64> {
    let norm = |m: &CMat| {
        let mut out = m.clone();
        for mut col in out.column_iter_mut() {
            let nrm = col.norm();
            if !(nrm > 0.0 && nrm.is_finite()) {
                return None;
            }
            col /= Complex64::new(nrm, 0.0);
        }
        Some(out)
    };
    let (a, b) = (norm(s_star)?, norm(s_hat)?);
    let cost = matching_cost(&a, &b);
    let perm = min_cost_assignment(&cost);
    Some((0..cost.len()).map(|i| cost[i][perm[i]]).sum::<f64>() / cost.len() as f64)
}

/// Matches columns of `s_hat` to `s_star` and scores `S`, the diagonal factors and the tuple.
///
/// `perm[i]` is the column of `s_hat` matched with column `i` of `s_star`; the
/// same permutation is applied to the estimated eigenvalues.
pub fn match_and_score(
    s_star: &CMat,
    s_hat: &CMat,
    lambdas_star: &[Vec<Complex64>],
    lambdas_hat: &[Vec<Complex64>],
    a: &MatrixTuple,
    a_tilde: &MatrixTuple,
) -> Result<(Scores, Vec<usize>)> {
    let n = s_star.ncols();
    if s_hat.shape() != s_star.shape() {
        return Err(Error::InvalidArgument("diagonalizer shapes differ".into()));
    }
    let star = unit_columns(s_star)?;
    let hat = unit_columns(s_hat)?;
    let cost = matching_cost(&star, &hat);
    let perm = min_cost_assignment(&cost);
    let err_s = (0..n).map(|i| cost[i][perm[i]]).sum::<f64>() / n as f64;

    let err_lambda = lambdas_star
        .iter()
        .zip(lambdas_hat)
        .map(|(ls, lh)| {
            let den: f64 = ls.iter().map(|z| z.norm_sqr()).sum();
            let num: f64 = (0..n).map(|i| (ls[i] - lh[perm[i]]).norm_sqr()).sum();
            num / den
        })
        .sum();

    let err_a = a
        .iter()
        .zip(a_tilde.iter())
        .map(|(x, y)| (x - y).norm_squared() / x.norm_squared())
        .sum();
    Ok((
        Scores {
            err_s,
            err_lambda,
            err_a,
        },
        perm,
    ))
}
