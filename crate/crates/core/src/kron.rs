//! The stacked Kronecker-sum map `Xi(X) = [I ⊗ X_k - X_k^T ⊗ I]_k` and the
//! projections built on it.
//!
//! Row/column index `a * n + r` of an n^2 x n^2 slab addresses entry `r` of
//! block `a`, matching column-major `vec`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tuple::MatrixTuple;

/// Default relative threshold for counting singular values.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Default relative round-trip tolerance for [`fiber_representative`].
pub const DEFAULT_RANGE_TOL: f64 = 1e-8;

/// A dense `K n^2 x n^2` matrix, usually (but not necessarily) in the range of `Xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredMatrix {
    n: usize,
    k: usize,
    data: CMat,
}

impl StructuredMatrix {
    pub fn from_dense(n: usize, k: usize, data: CMat) -> Result<Self> {
        if data.nrows() != k * n * n || data.ncols() != n * n {
            return Err(Error::InvalidArgument(format!(
                "structured matrix must be {}x{}, got {}x{}",
                k * n * n,
                n * n,
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { n, k, data })
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            data: CMat::zeros(k * n * n, n * n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn into_data(self) -> CMat {
        self.data
    }

    pub fn slab(&self, k: usize) -> CMat {
        let nn = self.n * self.n;
        self.data.rows(k * nn, nn).into_owned()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Entry `(block_row, inner_row), (block_col, inner_col)` of slab `k`.
    #[inline]
    fn at(&self, k: usize, br: usize, ir: usize, bc: usize, ic: usize) -> Complex64 {
        let n = self.n;
        self.data[(k * n * n + br * n + ir, bc * n + ic)]
    }

    fn write_slab(&mut self, k: usize, y: &CMat) {
        let n = self.n;
        let off = k * n * n;
        for i in 0..n {
            for j in 0..n {
                for r in 0..n {
                    for c in 0..n {
                        let mut v = if i == j {
                            y[(r, c)]
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        if r == c {
                            v -= y[(j, i)];
                        }
                        self.data[(off + i * n + r, j * n + c)] = v;
                    }
                }
            }
        }
    }
}

/// `Xi(X)`, assembled block-wise: block (i, j) of slab k is `X_k - x_ii I` on the
/// diagonal and `-x_ji I` elsewhere. Only copies and subtractions are performed.
pub fn build_xi(x: &MatrixTuple) -> StructuredMatrix {
    let mut h = StructuredMatrix::zeros(x.n(), x.k());
    for (k, xk) in x.iter().enumerate() {
        h.write_slab(k, xk);
    }
    h
}

/// Numerical rank and singular spectrum of a structured matrix.
#[derive(Debug, Clone)]
pub struct RankProfile {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// `sigma_{n^2-n} / sigma_{n^2-n+1}`; `inf` when the latter vanishes.
    pub gap_ratio: f64,
}

/// Counts singular values above `gap_tol * sigma_max`.
pub fn xi_rank_profile(h: &StructuredMatrix, gap_tol: f64) -> Result<RankProfile> {
    if !(gap_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gap_tol must be positive, got {gap_tol}"
        )));
    }
    let s = linalg::singular_values(&h.data)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&v| v > gap_tol * smax).count()
    };
    let r = h.n * h.n - h.n;
    let gap_ratio = if r == 0 || r >= s.len() {
        f64::INFINITY
    } else if s[r] == 0.0 {
        f64::INFINITY
    } else {
        s[r - 1] / s[r]
    };
    Ok(RankProfile {
        rank,
        singular_values: s,
        gap_ratio,
    })
}

/// A member of `Xi^{-1}(H)`: the top-left n x n block of every slab.
pub fn fiber_representative(h: &StructuredMatrix) -> Result<MatrixTuple> {
    fiber_representative_with_tol(h, DEFAULT_RANGE_TOL)
}

/// As [`fiber_representative`] with an explicit round-trip tolerance.
pub fn fiber_representative_with_tol(h: &StructuredMatrix, tol: f64) -> Result<MatrixTuple> {
    let n = h.n;
    let mats: Vec<CMat> = (0..h.k)
        .map(|k| CMat::from_fn(n, n, |r, c| h.at(k, 0, r, 0, c)))
        .collect();
    let rep = MatrixTuple::new(mats)?;
    let h_norm = h.frobenius_norm();
    if h_norm > 0.0 {
        let rel_err = (build_xi(&rep).data - &h.data).norm() / h_norm;
        if !(rel_err <= tol) {
            return Err(Error::NotInRange { rel_err });
        }
    }
    Ok(rep)
}

/// Nearest point of the affine fiber `Xi^{-1}(H)` to `x`: the representative
/// plus the trace-matching multiple of the identity in every slot.
pub fn project_onto_fiber(x: &MatrixTuple, h: &StructuredMatrix) -> Result<MatrixTuple> {
    if x.n() != h.n || x.k() != h.k {
        return Err(Error::InvalidArgument(
            "tuple and structured matrix shapes differ".into(),
        ));
    }
    let rep = fiber_representative(h)?;
    let n = x.n();
    let mats = rep
        .iter()
        .zip(x.iter())
        .map(|(r, xk)| {
            let shift = (xk - r).trace() / Complex64::new(n as f64, 0.0);
            r + CMat::identity(n, n) * shift
        })
        .collect();
    MatrixTuple::new(mats)
}

/// The tuple `Y` with `Xi(Y) = P_range(H)` and `y_nn^(k) = 0`.
///
/// Off-diagonal atoms `Ê(s,t)` are mutually orthogonal with squared norm `2n`.
/// The diagonal atoms `Ê(i,i), i < n` have Gram matrix `2n I - 2 11^T`, whose
/// inverse is `(I + 11^T) / 2n`.
pub fn xi_range_coefficients(h: &StructuredMatrix) -> MatrixTuple {
    let n = h.n;
    let two_n = Complex64::new(2.0 * n as f64, 0.0);
    let mats = (0..h.k)
        .map(|k| {
            let mut y = CMat::zeros(n, n);
            for s in 0..n {
                for t in 0..n {
                    if s == t {
                        continue;
                    }
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..n {
                        acc += h.at(k, a, s, a, t);
                        acc -= h.at(k, t, a, s, a);
                    }
                    y[(s, t)] = acc / two_n;
                }
            }
            if n > 1 {
                let b: Vec<Complex64> = (0..n - 1)
                    .map(|i| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a in 0..n {
                            acc += h.at(k, a, i, a, i);
                            acc -= h.at(k, i, a, i, a);
                        }
                        acc
                    })
                    .collect();
                let total: Complex64 = b.iter().sum();
                for (i, bi) in b.iter().enumerate() {
                    y[(i, i)] = (bi + total) / two_n;
                }
            }
            y
        })
        .collect();
    MatrixTuple::new(mats).expect("coefficients of a finite matrix are finite")
}

/// Orthogonal projection onto `range(Xi)`, slab by slab.
pub fn project_onto_xi_range(h: &StructuredMatrix) -> StructuredMatrix {
    build_xi(&xi_range_coefficients(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{self, rel};
    use crate::tuple::{diagonal_tuple, khatri_rao_basis};
    use proptest::prelude::*;

    fn dense_xi(x: &MatrixTuple) -> CMat {
        let n = x.n();
        let mut out = CMat::zeros(x.k() * n * n, n * n);
        for (k, xk) in x.iter().enumerate() {
            out.rows_mut(k * n * n, n * n)
                .copy_from(&testutil::kron_sum(xk));
        }
        out
    }

    fn unit(n: usize, i: usize, j: usize) -> CMat {
        let mut e = CMat::zeros(n, n);
        e[(i, j)] = linalg::c(1.0);
        e
    }

    /// Columns `vec(Ê(i,j))` for `(i,j) != (n,n)`.
    fn atom_basis(n: usize) -> CMat {
        let atoms: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !(i == n - 1 && j == n - 1))
            .collect();
        let mut b = CMat::zeros(n.pow(4), atoms.len());
        for (c, &(i, j)) in atoms.iter().enumerate() {
            let e = testutil::kron_sum(&unit(n, i, j));
            b.set_column(c, &linalg::vec_of(&e));
        }
        b
    }

    fn dense_range_projection(h: &StructuredMatrix) -> CMat {
        let n = h.n();
        let basis = atom_basis(n);
        let mut out = CMat::zeros(h.k() * n * n, n * n);
        for k in 0..h.k() {
            let slab = h.slab(k);
            let v = CMat::from_column_slice(n.pow(4), 1, linalg::vec_of(&slab).as_slice());
            let p = testutil::normal_equations_projection(&basis, &v);
            out.rows_mut(k * n * n, n * n)
                .copy_from(&CMat::from_column_slice(n * n, n * n, p.as_slice()));
        }
        out
    }

    fn random_structured(n: usize, k: usize, seed: u64) -> StructuredMatrix {
        let mut rng = testutil::rng(seed);
        StructuredMatrix::from_dense(n, k, testutil::complex_mat(k * n * n, n * n, &mut rng))
            .unwrap()
    }

    #[test]
    fn build_matches_dense_kronecker_sum_exactly() {
        for (n, k, seed) in [(2, 1, 0), (3, 2, 1), (4, 3, 2)] {
            let x = testutil::random_tuple(n, k, &mut testutil::rng(seed));
            assert_eq!(build_xi(&x).data(), &dense_xi(&x));
        }
    }

    #[test]
    fn build_small_cases() {
        let eye = MatrixTuple::new(vec![CMat::identity(3, 3)]).unwrap();
        assert_eq!(build_xi(&eye).frobenius_norm(), 0.0);

        let d = diagonal_tuple(&[vec![1.0, 2.0]]).unwrap();
        let expect = CMat::from_diagonal(&crate::linalg::CVec::from_vec(
            [0.0, 1.0, -1.0, 0.0]
                .iter()
                .map(|&v| linalg::c(v))
                .collect(),
        ));
        assert_eq!(build_xi(&d).into_data(), expect);
    }

    #[test]
    fn commuting_members_span_the_nullspace() {
        let mut rng = testutil::rng(7);
        let (s, _, a) = testutil::random_sd(4, 3, &mut rng);
        let h = build_xi(&a);
        for ak in a.iter() {
            let r = h.data() * linalg::vec_of(ak);
            assert!(r.norm() <= 1e-10 * h.frobenius_norm() * ak.norm());
        }
        let s_inv = linalg::inverse(&s).unwrap();
        let kr = khatri_rao_basis(&s, &s_inv);
        for j in 0..4 {
            let col = kr.column(j);
            assert!((h.data() * col).norm() <= 1e-8 * h.frobenius_norm() * col.norm());
        }
    }

    #[test]
    fn rank_of_unique_sd_tuple() {
        for seed in 0..5 {
            let (_, _, a) = testutil::random_sd(4, 2, &mut testutil::rng(seed));
            let p = xi_rank_profile(&build_xi(&a), DEFAULT_GAP_TOL).unwrap();
            assert_eq!(p.rank, 12);
            assert!(p.gap_ratio >= 1e6);
            assert!(p.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_drops_for_repeated_eigenvalue() {
        let mut rng = testutil::rng(8);
        let s = CMat::identity(3, 3) + testutil::real_mat(3, 3, &mut rng) * linalg::c(0.3);
        let lam = vec![vec![linalg::c(1.0), linalg::c(1.0), linalg::c(2.0)]];
        let a = MatrixTuple::from_diagonalizer(&s, &lam).unwrap();
        let p = xi_rank_profile(&build_xi(&a), DEFAULT_GAP_TOL).unwrap();
        assert!(p.rank < 6, "rank {}", p.rank);
    }

    #[test]
    fn rank_of_zero_is_zero() {
        let p = xi_rank_profile(&StructuredMatrix::zeros(3, 2), DEFAULT_GAP_TOL).unwrap();
        assert_eq!(p.rank, 0);
        assert!(xi_rank_profile(&StructuredMatrix::zeros(3, 2), 0.0).is_err());
    }

    #[test]
    fn representative_is_shifted_input() {
        let x = testutil::random_tuple(3, 2, &mut testutil::rng(9));
        let h = build_xi(&x);
        let rep = fiber_representative(&h).unwrap();
        for (r, xk) in rep.iter().zip(x.iter()) {
            let expect = xk - CMat::identity(3, 3) * xk[(0, 0)];
            assert!(rel(r, &expect) < 1e-15);
        }
        assert!(rel(build_xi(&rep).data(), h.data()) < 1e-15);
    }

    #[test]
    fn representative_of_zero() {
        let rep = fiber_representative(&StructuredMatrix::zeros(3, 2)).unwrap();
        assert_eq!(rep.frobenius_norm(), 0.0);
    }

    #[test]
    fn representative_rejects_out_of_range() {
        let x = testutil::random_tuple(3, 1, &mut testutil::rng(10));
        let h = build_xi(&x);
        // component orthogonal to every atom, by Gram-Schmidt against the dense basis
        let basis = atom_basis(3);
        let qr = basis.qr();
        let q = qr.q();
        let v = testutil::complex_mat(81, 1, &mut testutil::rng(11));
        let mut w = &v - &q * (q.adjoint() * &v);
        w /= linalg::c(w.norm());
        for delta in [1e-4, 1e-2, 1.0] {
            let pert =
                CMat::from_column_slice(9, 9, w.as_slice()) * linalg::c(delta * h.frobenius_norm());
            let bad = StructuredMatrix::from_dense(3, 1, h.data() + pert).unwrap();
            assert!(matches!(
                fiber_representative(&bad),
                Err(Error::NotInRange { .. })
            ));
        }
    }

    #[test]
    fn fiber_projection_fixes_fiber_members() {
        let x = testutil::random_tuple(3, 2, &mut testutil::rng(12));
        let z = project_onto_fiber(&x, &build_xi(&x)).unwrap();
        assert!((&z - &x).frobenius_norm() <= 1e-14 * x.frobenius_norm());
    }

    #[test]
    fn fibers_are_closed_under_identity_shifts() {
        let mut rng = testutil::rng(13);
        let x = testutil::random_tuple(3, 2, &mut rng);
        let shift =
            |t: &MatrixTuple| t.map(|m| m + CMat::identity(3, 3) * Complex64::new(1.5, -0.5));
        // X + alpha I lies in the fiber of Xi(X) and is fixed by the projection
        let shifted = shift(&x);
        let fixed = project_onto_fiber(&shifted, &build_xi(&x)).unwrap();
        assert!((&fixed - &shifted).frobenius_norm() <= 1e-13 * shifted.frobenius_norm());
        // for a foreign fiber the projection moves along with the shift
        let h = build_xi(&testutil::random_tuple(3, 2, &mut rng));
        let z1 = project_onto_fiber(&x, &h).unwrap();
        let z2 = project_onto_fiber(&shifted, &h).unwrap();
        assert!((&shift(&z1) - &z2).frobenius_norm() <= 1e-13 * z2.frobenius_norm());
    }

    #[test]
    fn fiber_distance_identity() {
        for seed in 0..10 {
            let mut rng = testutil::rng(200 + seed);
            let x = testutil::random_tuple(4, 3, &mut rng);
            let h = build_xi(&testutil::random_tuple(4, 3, &mut rng));
            let z = project_onto_fiber(&x, &h).unwrap();
            let lhs = (&x - &z).frobenius_norm_sq();
            let rhs = (build_xi(&x).into_data() - h.data()).norm_squared() / 8.0;
            assert!((lhs - rhs).abs() <= 1e-10 * rhs * 8.0);
        }
    }

    #[test]
    fn fiber_projection_rejects_shape_mismatch() {
        let x = testutil::random_tuple(3, 2, &mut testutil::rng(14));
        assert!(project_onto_fiber(&x, &StructuredMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn range_projection_fixes_range() {
        let h = build_xi(&testutil::random_tuple(3, 2, &mut testutil::rng(15)));
        assert!(rel(project_onto_xi_range(&h).data(), h.data()) < 1e-14);
    }

    #[test]
    fn range_projection_kills_orthogonal_content() {
        let basis = atom_basis(3);
        let q = basis.qr().q();
        let v = testutil::complex_mat(81, 1, &mut testutil::rng(16));
        let w = &v - &q * (q.adjoint() * &v);
        let h = StructuredMatrix::from_dense(3, 1, CMat::from_column_slice(9, 9, w.as_slice()))
            .unwrap();
        assert!(project_onto_xi_range(&h).frobenius_norm() <= 1e-13 * h.frobenius_norm());
    }

    #[test]
    fn atom_gram_entries() {
        for n in 2..6 {
            let e: Vec<CMat> = (0..n).map(|i| testutil::kron_sum(&unit(n, i, i))).collect();
            for i in 0..n {
                for j in 0..n {
                    let ip = e[i].dotc(&e[j]).re;
                    let expect = if i == j { 2.0 * n as f64 - 2.0 } else { -2.0 };
                    assert_eq!(ip, expect);
                }
            }
            let off = testutil::kron_sum(&unit(n, 0, 1));
            assert_eq!(off.norm_squared(), 2.0 * n as f64);
            assert_eq!(off.dotc(&testutil::kron_sum(&unit(n, 1, 0))).norm(), 0.0);
            assert_eq!(off.dotc(&e[0]).norm(), 0.0);
        }
    }

    #[test]
    fn range_projection_matches_dense_oracle() {
        for (n, k, seed) in [(2, 1, 20), (3, 2, 21), (4, 2, 22)] {
            let h = random_structured(n, k, seed);
            assert!(
                rel(
                    project_onto_xi_range(&h).data(),
                    &dense_range_projection(&h)
                ) < 1e-10
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn range_projection_is_an_orthogonal_projector(seed in any::<u64>(), n in 2usize..5, k in 1usize..3) {
            let h1 = random_structured(n, k, seed);
            let h2 = random_structured(n, k, seed ^ 0x9e37_79b9);
            let p1 = project_onto_xi_range(&h1);
            let p2 = project_onto_xi_range(&h2);
            let twice = project_onto_xi_range(&p1);
            prop_assert!(rel(twice.data(), p1.data()) < 1e-12);
            let lhs = p1.data().dotc(h2.data());
            let rhs = h1.data().dotc(p2.data());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * h1.frobenius_norm() * h2.frobenius_norm());
            prop_assert!(p1.frobenius_norm() <= h1.frobenius_norm() * (1.0 + 1e-14));
        }

        #[test]
        fn fiber_projection_lands_in_fiber(seed in any::<u64>(), n in 2usize..5, k in 1usize..4) {
            let mut rng = testutil::rng(seed);
            let x = testutil::random_tuple(n, k, &mut rng);
            let h = build_xi(&testutil::random_tuple(n, k, &mut rng));
            let z = project_onto_fiber(&x, &h).unwrap();
            prop_assert!((build_xi(&z).into_data() - h.data()).norm() <= 1e-10 * h.frobenius_norm());
            let again = project_onto_fiber(&z, &h).unwrap();
            prop_assert!((&again - &z).frobenius_norm() <= 1e-12 * z.frobenius_norm());
            for (xk, zk) in x.iter().zip(z.iter()) {
                prop_assert!((xk - zk).trace().norm() <= 1e-12 * xk.norm().max(zk.norm()));
            }
        }

        #[test]
        fn coefficients_rebuild_projection(seed in any::<u64>(), n in 2usize..5) {
            let h = random_structured(n, 2, seed);
            let y = xi_range_coefficients(&h);
            for yk in y.iter() {
                prop_assert_eq!(yk[(n - 1, n - 1)], Complex64::new(0.0, 0.0));
            }
            prop_assert_eq!(build_xi(&y), project_onto_xi_range(&h));
        }
    }
}
