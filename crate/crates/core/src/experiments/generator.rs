use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::tuple::MatrixTuple;

/// A planted simultaneously diagonalizable tuple `A*_k = S* Λ*_k S*^{-1}`.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub s_star: CMat,
    pub lambdas_star: Vec<Vec<Complex64>>,
    pub a_star: MatrixTuple,
}

/// Prescribed singular values `(kappa - 1)(n - i)/(n - 1) + 1`, `i = 1..n`.
pub fn planted_singular_values(n: usize, kappa: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| (kappa - 1.0) * (n - i) as f64 / (n - 1) as f64 + 1.0)
        .collect()
}

fn normal_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// Standard-normal `S*` with its singular values replaced so that `cond(S*) = kappa`,
/// standard-normal diagonal `Λ*_k`.
pub fn make_ground_truth<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    kappa: f64,
    rng: &mut R,
) -> Result<GroundTruth> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if k < 1 {
        return Err(Error::InvalidArgument("need K >= 1".into()));
    }
    if !(kappa > 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "kappa must exceed 1, got {kappa}"
        )));
    }
    let sigma = planted_singular_values(n, kappa);
    let s_star = loop {
        let g = normal_matrix(n, rng);
        let (u, s, v_t) = linalg::real_svd_sorted(&g)?;
        if s[n - 1] <= 1e-12 {
            continue;
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sigma.clone()));
        break (u * d * v_t).map(linalg::c);
    };
    let lambdas_star: Vec<Vec<Complex64>> = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| linalg::c(rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    let a_star = MatrixTuple::from_diagonalizer(&s_star, &lambdas_star)?;
    Ok(GroundTruth {
        s_star,
        lambdas_star,
        a_star,
    })
}

/// `A_k = A*_k + sigma N_k` with standard-normal `N_k` and `sigma` chosen so that
/// `10 log10(||A*||_F^2 / ||sigma N||_F^2) = snr_db` for the realized draw.
/// `snr_db = +inf` returns `A*` unchanged.
pub fn add_noise<R: Rng + ?Sized>(
    a_star: &MatrixTuple,
    snr_db: f64,
    rng: &mut R,
) -> Result<MatrixTuple> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(format!("invalid SNR {snr_db}")));
    }
    if snr_db == f64::INFINITY {
        return Ok(a_star.clone());
    }
    let n = a_star.n();
    let noise: Vec<CMat> = (0..a_star.k())
        .map(|_| normal_matrix(n, rng).map(linalg::c))
        .collect();
    let noise_norm = noise.iter().map(linalg::frob_sq).sum::<f64>().sqrt();
    let sigma = a_star.frobenius_norm() / (noise_norm * 10f64.powf(snr_db / 20.0));
    MatrixTuple::new(
        a_star
            .iter()
            .zip(&noise)
            .map(|(a, e)| a + e * linalg::c(sigma))
            .collect(),
    )
}
