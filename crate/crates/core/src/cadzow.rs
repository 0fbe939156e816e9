//! Structured low-rank approximation of `Xi(A)` by alternating projections
//! (Cadzow's iteration) between the rank-bounded set and `range(Xi)`.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::kron::{self, StructuredMatrix};
use crate::linalg;
use crate::tuple::MatrixTuple;

/// Stopping rule and rank target for [`cadzow_run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CadzowConfig {
    /// Stop once `||Â(t) - P_L(Â(t))||_F <= epsilon`.
    pub epsilon: f64,
    pub t_max: usize,
    /// Rank bound; `None` means `n^2 - n`.
    pub rank_target: Option<usize>,
}

impl Default for CadzowConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            t_max: 20_000,
            rank_target: None,
        }
    }
}

impl CadzowConfig {
    pub fn validate(&self, n: usize) -> Result<usize> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        let r = self.rank_target.unwrap_or(n * n - n);
        if r > n * n {
            return Err(Error::InvalidArgument(format!(
                "rank target {r} exceeds n^2 = {}",
                n * n
            )));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    IterationCap,
}

/// Residual history of one Cadzow run.
#[derive(Debug, Clone, PartialEq)]
pub struct CadzowTrace {
    /// `residuals[t] = ||Â(t) - P_L(Â(t))||_F`, length `t_end + 1`.
    pub residuals: Vec<f64>,
    pub t_end: usize,
    pub reason: StopReason,
}

impl CadzowTrace {
    /// Indices `t` where `residual(t+1) > residual(t) + slack * residual(0)`.
    pub fn monotonicity_violations(&self, slack: f64) -> Vec<usize> {
        let base = self.residuals.first().copied().unwrap_or(0.0);
        self.residuals
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0] + slack * base)
            .map(|(t, _)| t)
            .collect()
    }
}

/// Best rank-`<= r` Frobenius approximation, with the discarded tail norm.
/// Real inputs are handled in real arithmetic.
pub fn project_low_rank_with_residual(
    h: &StructuredMatrix,
    r: usize,
) -> Result<(StructuredMatrix, f64)> {
    let (rows, cols) = h.data().shape();
    if r > rows.min(cols) {
        return Err(Error::InvalidArgument(format!(
            "rank bound {r} exceeds min dimension {}",
            rows.min(cols)
        )));
    }
    if r == 0 {
        return Ok((StructuredMatrix::zeros(h.n(), h.k()), h.frobenius_norm()));
    }
    let (low, tail) = if h.data().iter().all(|z| z.im == 0.0) {
        let (u, s, v_t) = linalg::real_svd_sorted(&h.data().map(|z| z.re))?;
        let (low, tail) = truncate(&u, &s, &v_t, r);
        (low.map(linalg::c), tail)
    } else {
        let svd = linalg::svd_sorted(h.data())?;
        truncate(&svd.u, &svd.s, &svd.v_t, r)
    };
    Ok((StructuredMatrix::from_dense(h.n(), h.k(), low)?, tail))
}

/// `U_r diag(s_r) V_r^H` and the norm of the discarded singular values.
fn truncate<T>(u: &DMatrix<T>, s: &[f64], v_t: &DMatrix<T>, r: usize) -> (DMatrix<T>, f64)
where
    T: ComplexField<RealField = f64>,
{
    let tail = s[r..].iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut scaled = u.columns(0, r).into_owned();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= T::from_real(s[j]);
    }
    (scaled * v_t.rows(0, r), tail)
}

/// Best rank-`<= r` Frobenius approximation by truncated SVD.
pub fn project_low_rank(h: &StructuredMatrix, r: usize) -> Result<StructuredMatrix> {
    project_low_rank_with_residual(h, r).map(|(m, _)| m)
}

/// Runs `Â(0) = Xi(A)`, `Â(t+1) = P_range ∘ P_L(Â(t))`.
pub fn cadzow_run(a: &MatrixTuple, cfg: &CadzowConfig) -> Result<(StructuredMatrix, CadzowTrace)> {
    cadzow_run_observed(a, cfg, |_, _| {})
}

/// As [`cadzow_run`], calling `observe(t, Â(t))` for every iterate including `t = 0`.
pub fn cadzow_run_observed<F>(
    a: &MatrixTuple,
    cfg: &CadzowConfig,
    mut observe: F,
) -> Result<(StructuredMatrix, CadzowTrace)>
where
    F: FnMut(usize, &StructuredMatrix),
{
    let r = cfg.validate(a.n())?;
    let mut current = kron::build_xi(a);
    let mut residuals = Vec::new();
    let mut t = 0;
    loop {
        observe(t, &current);
        let (low, residual) = project_low_rank_with_residual(&current, r)?;
        residuals.push(residual);
        if residual <= cfg.epsilon {
            return Ok((
                current,
                CadzowTrace {
                    residuals,
                    t_end: t,
                    reason: StopReason::Converged,
                },
            ));
        }
        if t >= cfg.t_max {
            return Ok((
                current,
                CadzowTrace {
                    residuals,
                    t_end: t,
                    reason: StopReason::IterationCap,
                },
            ));
        }
        current = kron::project_onto_xi_range(&low);
        t += 1;
    }
}
