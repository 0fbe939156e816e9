//! Approximate-then-diagonalize-simultaneously driver.
//!
//! 1. Cadzow's iteration pushes `Xi(A)` towards rank `n^2 - n` inside `range(Xi)`.
//! 2. The input is projected onto the fiber of the final iterate.
//! 3. If that tuple is simultaneously diagonalizable it is diagonalized exactly;
//!    otherwise the pseudo common diagonalizer picks the best single-member
//!    diagonalizer and the input is projected onto the tuples it diagonalizes.

use crate::cadzow::{self, CadzowConfig, CadzowTrace};
use crate::dodo;
use crate::error::{Error, Result};
use crate::kron::{self, StructuredMatrix};
use crate::linalg::CMat;
use crate::tuple::{self, DiagonalizerResult, MatrixTuple, SdMembership};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    ExactDodo,
    PcdFallback,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::ExactDodo => "exact_dodo",
            Branch::PcdFallback => "pcd_fallback",
        }
    }
}

/// A diagonalizer estimate derived from one Cadzow iterate.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub branch: Branch,
    /// Simultaneously diagonalizable approximant of the input.
    pub a_tilde: MatrixTuple,
    /// Diagonalizer of `a_tilde`, with `lambdas` the diagonal of `S^{-1} Ã_k S`.
    pub diagonalizer: DiagonalizerResult,
    /// Membership test of the fiber projection that decided the branch.
    pub candidate_check: SdMembership,
    /// Index chosen by the pseudo common diagonalizer, if it ran.
    pub pcd_index: Option<usize>,
}

/// Result of [`atds_solve`].
#[derive(Debug, Clone)]
pub struct AtdsOutcome {
    pub s: CMat,
    pub a_tilde: MatrixTuple,
    pub lambdas: Vec<Vec<num_complex::Complex64>>,
    pub branch: Branch,
    pub cadzow_trace: CadzowTrace,
    pub sd_check: SdMembership,
    pub pcd_index: Option<usize>,
    /// `||A - Ã||_F`.
    pub approximation_error: f64,
    /// `sum_k off(S^{-1} Ã_k S)`.
    pub off_value: f64,
}

/// Pseudo common diagonalizer: among the diagonalizable members of `x`, the
/// eigenvector matrix whose `SD(S)` projection best fits `a_original`.
/// Ties go to the smallest index.
pub fn pcd(x: &MatrixTuple, a_original: &MatrixTuple, tol: f64) -> Result<(CMat, usize)> {
    let (s, l, _) = pcd_scored(x, a_original, tol)?;
    Ok((s, l))
}

/// As [`pcd`], also returning the winning score `||A - P_SD(S)(A)||_F`.
pub fn pcd_scored(
    x: &MatrixTuple,
    a_original: &MatrixTuple,
    tol: f64,
) -> Result<(CMat, usize, f64)> {
    let checks = x
        .iter()
        .map(|m| tuple::check_diagonalizable(m, tol))
        .collect::<Result<Vec<_>>>()?;
    pcd_from_checks(&checks, a_original)
}

fn pcd_from_checks(
    checks: &[tuple::DiagonalizabilityCheck],
    a_original: &MatrixTuple,
) -> Result<(CMat, usize, f64)> {
    let mut best: Option<(CMat, usize, f64)> = None;
    for (k, check) in checks.iter().enumerate() {
        if !check.diagonalizable {
            continue;
        }
        let s = check.eigen.vectors.clone();
        let projected = match tuple::project_onto_sd_of(&s, a_original) {
            Ok(p) => p,
            // dependent eigenvector columns: this candidate cannot define SD(S)
            Err(Error::Singular { .. }) | Err(Error::RankDeficientKhatriRao { .. }) => continue,
            Err(e) => return Err(e),
        };
        let score = (a_original - &projected).frobenius_norm();
        if best.as_ref().map_or(true, |(_, _, b)| score < *b) {
            best = Some((s, k, score));
        }
    }
    best.ok_or(Error::NoDiagonalizableMember)
}

/// Diagonalizer estimate for the iterate `h`, following the same branch rule as
/// the final step of [`atds_solve`].
pub fn estimate_from_iterate(a: &MatrixTuple, h: &StructuredMatrix, tol: f64) -> Result<Estimate> {
    let candidate = kron::project_onto_fiber(a, h)?;
    estimate_from_candidate(a, candidate, tol)
}

fn estimate_from_candidate(a: &MatrixTuple, candidate: MatrixTuple, tol: f64) -> Result<Estimate> {
    let (membership, checks) = tuple::check_sd_membership_detailed(&candidate, tol)?;
    if membership.is_member() {
        match dodo::dodo(&candidate, tol) {
            Ok(diagonalizer) => {
                return Ok(Estimate {
                    branch: Branch::ExactDodo,
                    a_tilde: candidate,
                    diagonalizer,
                    candidate_check: membership,
                    pcd_index: None,
                })
            }
            // the membership test passed but the block structure did not hold at
            // this tolerance; treat the candidate as a non-member
            Err(Error::NotSimultaneouslyDiagonalizable { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let (s, l, _) = pcd_from_checks(&checks, a)?;
    let a_tilde = tuple::project_onto_sd_of(&s, a)?;
    let diagonalizer = DiagonalizerResult::evaluate(s, &a_tilde)?;
    Ok(Estimate {
        branch: Branch::PcdFallback,
        a_tilde,
        diagonalizer,
        candidate_check: membership,
        pcd_index: Some(l),
    })
}

/// Full pipeline: Cadzow, fiber projection, then exact diagonalization or PCD.
pub fn atds_solve(a: &MatrixTuple, cfg: &CadzowConfig, tol: f64) -> Result<AtdsOutcome> {
    atds_solve_observed(a, cfg, tol, |_, _| {})
}

/// As [`atds_solve`], passing every Cadzow iterate `(t, Â(t))` to `observe`.
pub fn atds_solve_observed<F>(
    a: &MatrixTuple,
    cfg: &CadzowConfig,
    tol: f64,
    observe: F,
) -> Result<AtdsOutcome>
where
    F: FnMut(usize, &StructuredMatrix),
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let (h_end, trace) = cadzow::cadzow_run_observed(a, cfg, observe)?;
    let est = estimate_from_iterate(a, &h_end, tol)?;
    let approximation_error = (a - &est.a_tilde).frobenius_norm();
    Ok(AtdsOutcome {
        s: est.diagonalizer.s,
        lambdas: est.diagonalizer.lambdas,
        off_value: est.diagonalizer.off_value,
        a_tilde: est.a_tilde,
        branch: est.branch,
        cadzow_trace: trace,
        sd_check: est.candidate_check,
        pcd_index: est.pcd_index,
        approximation_error,
    })
}
