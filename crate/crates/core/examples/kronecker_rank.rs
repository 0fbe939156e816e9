//! The rank of the stacked Kronecker sums detects essential uniqueness: it is
//! n^2 - n exactly when no two eigenvalue rows coincide.
//!
//! cargo run --example kronecker_rank

use atds::kron::{build_xi, xi_rank_profile, DEFAULT_GAP_TOL};
use atds::linalg::c;
use atds::{check_essential_uniqueness, CMat, MatrixTuple};

fn report(label: &str, lambdas: &[Vec<f64>]) -> atds::Result<()> {
    let n = lambdas[0].len();
    let s = CMat::from_fn(n, n, |i, j| {
        c(if i == j {
            2.0
        } else {
            1.0 / (1 + i + 2 * j) as f64
        })
    });
    let lambdas: Vec<_> = lambdas
        .iter()
        .map(|l| l.iter().map(|&x| c(x)).collect::<Vec<_>>())
        .collect();
    let a = MatrixTuple::from_diagonalizer(&s, &lambdas)?;
    let prof = xi_rank_profile(&build_xi(&a), DEFAULT_GAP_TOL)?;
    println!(
        "{label}: rank {} of n^2 - n = {}, gap ratio {:.2e}, unique: {}",
        prof.rank,
        n * n - n,
        prof.gap_ratio,
        check_essential_uniqueness(&lambdas, 1e-8)
    );
    Ok(())
}

fn main() -> atds::Result<()> {
    report(
        "distinct rows        ",
        &[vec![1.0, 2.0, 3.0, 4.0], vec![0.5, 0.5, 1.0, 2.0]],
    )?;
    // rows 0 and 1 agree in both members
    report(
        "one repeated row     ",
        &[vec![1.0, 1.0, 3.0, 4.0], vec![0.5, 0.5, 1.0, 2.0]],
    )?;
    report(
        "tie broken by member 2",
        &[vec![1.0, 1.0, 3.0, 4.0], vec![0.5, 0.7, 1.0, 2.0]],
    )?;
    Ok(())
}
