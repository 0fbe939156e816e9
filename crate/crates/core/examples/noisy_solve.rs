//! Recover a planted diagonalizer from a noisy tuple with ATDS and score it
//! against the ground truth.
//!
//! cargo run --release --example noisy_solve -- [snr_db] [kappa]

use atds::experiments::{add_noise, make_ground_truth, match_and_score, trial_rng};
use atds::tuple::DEFAULT_SD_TOL;
use atds::{atds_solve, CadzowConfig};

fn main() -> atds::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map_or(40.0, |s| s.parse().expect("snr_db"));
    let kappa: f64 = args.next().map_or(5.0, |s| s.parse().expect("kappa"));

    let mut rng = trial_rng(7, 0);
    let truth = make_ground_truth(5, 20, kappa, &mut rng)?;
    let a = add_noise(&truth.a_star, snr_db, &mut rng)?;

    let out = atds_solve(&a, &CadzowConfig::default(), DEFAULT_SD_TOL)?;
    let (scores, perm) = match_and_score(
        &truth.s_star,
        &out.s,
        &truth.lambdas_star,
        &out.lambdas,
        &a,
        &out.a_tilde,
    )?;

    println!("n = 5, K = 20, SNR = {snr_db} dB, cond(S*) = {kappa}");
    println!("branch              {}", out.branch.as_str());
    println!("Cadzow iterations   {}", out.cadzow_trace.t_end);
    println!(
        "final residual      {:.3e}",
        out.cadzow_trace.residuals.last().unwrap()
    );
    println!("|A - A~|_F          {:.3e}", out.approximation_error);
    println!("off(S^-1 A~ S)      {:.3e}", out.off_value);
    println!("column matching     {perm:?}");
    println!(
        "err_S {:.3e}  err_Lambda {:.3e}  err_A {:.3e}",
        scores.err_s, scores.err_lambda, scores.err_a
    );
    Ok(())
}
