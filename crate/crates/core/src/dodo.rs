//! Exact simultaneous diagonalization by recursion on eigenvalue groups
//! ("diagonalize one, then diagonalize the others").
//!
//! One non-scalar member is diagonalized with its eigenvalues grouped into
//! contiguous blocks. Every other member is then block diagonal in that basis
//! (commuting matrices preserve each other's eigenspaces), and each block tuple
//! is solved recursively.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tuple::{DiagonalizerResult, MatrixTuple};

/// Default eigenvalue grouping / block-structure tolerance.
pub const DEFAULT_DODO_TOL: f64 = 1e-8;

/// Relative off-diagonal mass below which a matrix counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues grouped into clusters of (numerically) equal values.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGrouping {
    /// Cluster means, in order of each cluster's first member.
    pub values: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    /// `permutation[j]` is the original index placed at position `j`.
    pub permutation: Vec<usize>,
    /// Set when some cluster's diameter exceeds ten link distances.
    pub ill_separated: bool,
}

impl EigenGrouping {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Start offset of each block in the permuted ordering.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.multiplicities
            .iter()
            .map(|&m| {
                let o = acc;
                acc += m;
                o
            })
            .collect()
    }
}

/// Single-linkage clustering with link distance `tol * max(1, max|lambda|)`.
pub fn group_eigenvalues(eigs: &[Complex64], tol: f64) -> Result<EigenGrouping> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let n = eigs.len();
    let scale = eigs.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let link = tol * scale;

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigs[i] - eigs[j]).norm() <= link {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut roots: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(p) => members[p].push(i),
            None => {
                roots.push(r);
                members.push(vec![i]);
            }
        }
    }

    let mut ill_separated = false;
    let mut values = Vec::with_capacity(members.len());
    for group in &members {
        let sum: Complex64 = group.iter().map(|&i| eigs[i]).sum();
        values.push(sum / Complex64::new(group.len() as f64, 0.0));
        for (a, &i) in group.iter().enumerate() {
            for &j in &group[a + 1..] {
                if (eigs[i] - eigs[j]).norm() > 10.0 * link {
                    ill_separated = true;
                }
            }
        }
    }
    Ok(EigenGrouping {
        values,
        multiplicities: members.iter().map(Vec::len).collect(),
        permutation: members.into_iter().flatten().collect(),
        ill_separated,
    })
}

/// Tuning for [`dodo_traced`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DodoOptions {
    /// Eigenvalue link tolerance and relative off-block tolerance.
    pub tol: f64,
    /// Relative off-diagonal mass below which a matrix is treated as diagonal.
    pub diagonal_tol: f64,
}

impl Default for DodoOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_DODO_TOL,
            diagonal_tol: DIAGONAL_TOL,
        }
    }
}

/// Diagnostics of one recursion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DodoTrace {
    /// Number of nested levels that performed a diagonalization (0 if the input was diagonal).
    pub depth: usize,
    /// Largest relative off-block mass observed at any level.
    pub max_off_block: f64,
    /// Block sizes chosen at each diagonalization, tagged with the level (1-based).
    pub splits: Vec<(usize, Vec<usize>)>,
    /// Any grouping along the way was flagged as ill-separated.
    pub ill_separated: bool,
}

/// Common exact diagonalizer of a simultaneously diagonalizable tuple.
pub fn dodo(a: &MatrixTuple, tol: f64) -> Result<DiagonalizerResult> {
    dodo_traced(
        a,
        &DodoOptions {
            tol,
            ..DodoOptions::default()
        },
    )
    .map(|(r, _)| r)
}

/// As [`dodo`], also returning recursion diagnostics.
pub fn dodo_traced(a: &MatrixTuple, opts: &DodoOptions) -> Result<(DiagonalizerResult, DodoTrace)> {
    if !(opts.tol > 0.0 && opts.diagonal_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let mut trace = DodoTrace::default();
    let refs: Vec<f64> = a.iter().map(|m| m.norm()).collect();
    let mut s = solve_block(a.matrices(), &refs, opts, 1, &mut trace)?;
    linalg::normalize_columns(&mut s);
    Ok((DiagonalizerResult::evaluate(s, a)?, trace))
}

fn is_numerically_diagonal(m: &CMat, reference: f64, tol: f64) -> bool {
    linalg::off(m).sqrt() <= tol * m.norm().max(reference)
}

/// `refs[k]` is the norm of the k-th input member. Deep blocks of a member can
/// be pure roundoff, so their mass is measured against the member, not the block.
fn solve_block(
    mats: &[CMat],
    refs: &[f64],
    opts: &DodoOptions,
    level: usize,
    trace: &mut DodoTrace,
) -> Result<CMat> {
    let n = mats[0].nrows();
    if n == 1 {
        return Ok(CMat::identity(1, 1));
    }

    // smallest index whose spectrum actually splits; near-scalar members are
    // diagonal to within the grouping tolerance
    let mut pivot = None;
    for (l, m) in mats.iter().enumerate() {
        if is_numerically_diagonal(m, refs[l], opts.diagonal_tol) {
            continue;
        }
        let mean = m.trace() / Complex64::new(n as f64, 0.0);
        if (m - CMat::identity(n, n) * mean).norm() <= opts.tol * refs[l] {
            continue;
        }
        let eigen = linalg::eig(m)?;
        let grouping = group_eigenvalues(&eigen.values, opts.tol)?;
        if grouping.len() > 1 {
            pivot = Some((l, grouping));
            break;
        }
    }
    let Some((l, grouping)) = pivot else {
        return Ok(CMat::identity(n, n));
    };
    trace.depth = trace.depth.max(level);
    trace.ill_separated |= grouping.ill_separated;
    trace.splits.push((level, grouping.multiplicities.clone()));

    // eigenspace basis per cluster, from the trailing right singular vectors of A_l - mu I
    let mut s0 = CMat::zeros(n, n);
    let offsets = grouping.offsets();
    for (p, (&mu, &mult)) in grouping
        .values
        .iter()
        .zip(&grouping.multiplicities)
        .enumerate()
    {
        let shifted = &mats[l] - CMat::identity(n, n) * mu;
        let basis = linalg::smallest_right_singular_basis(&shifted, mult)?;
        s0.columns_mut(offsets[p], mult).copy_from(&basis);
    }
    let s0_inv = linalg::inverse(&s0)?;

    let d = grouping.len();
    let mut blocks: Vec<Vec<CMat>> = vec![Vec::with_capacity(mats.len()); d];
    for (k, m) in mats.iter().enumerate() {
        if k == l {
            for (p, &mu) in grouping.values.iter().enumerate() {
                let np = grouping.multiplicities[p];
                blocks[p].push(CMat::identity(np, np) * mu);
            }
            continue;
        }
        let b = linalg::conjugate(&s0, &s0_inv, m);
        let mut block_of = vec![0usize; n];
        for (p, &np) in grouping.multiplicities.iter().enumerate() {
            block_of[offsets[p]..offsets[p] + np].fill(p);
            blocks[p].push(b.view((offsets[p], offsets[p]), (np, np)).into_owned());
        }
        let mut off_block = 0.0;
        for j in 0..n {
            for i in 0..n {
                if block_of[i] != block_of[j] {
                    off_block += b[(i, j)].norm_sqr();
                }
            }
        }
        let total = b.norm().max(refs[k]);
        let rel = if total > 0.0 {
            off_block.sqrt() / total
        } else {
            0.0
        };
        trace.max_off_block = trace.max_off_block.max(rel);
        if rel > opts.tol {
            return Err(Error::NotSimultaneouslyDiagonalizable {
                index: k,
                mass: rel,
            });
        }
    }

    let mut inner = CMat::zeros(n, n);
    for (p, block_tuple) in blocks.iter().enumerate() {
        let sp = solve_block(block_tuple, refs, opts, level + 1, trace)?;
        let np = grouping.multiplicities[p];
        inner
            .view_mut((offsets[p], offsets[p]), (np, np))
            .copy_from(&sp);
    }
    Ok(s0 * inner)
}
