//! Residual history of Cadzow's iteration on a perturbed diagonalizable tuple.
//! The residual is nonincreasing and the singular value n^2-n+1 of the iterate
//! collapses towards zero.
//!
//! cargo run --release --example cadzow_trace

use atds::experiments::{add_noise, make_ground_truth, trial_rng};
use atds::kron::{xi_rank_profile, DEFAULT_GAP_TOL};
use atds::{cadzow::cadzow_run_observed, CadzowConfig};

fn main() -> atds::Result<()> {
    let mut rng = trial_rng(3, 0);
    let truth = make_ground_truth(4, 6, 10.0, &mut rng)?;
    let a = add_noise(&truth.a_star, 30.0, &mut rng)?;
    let r = 4 * 4 - 4;

    let mut tail = Vec::new();
    let (_, trace) = cadzow_run_observed(&a, &CadzowConfig::default(), |t, h| {
        if t < 10 || t % 50 == 0 {
            let prof = xi_rank_profile(h, DEFAULT_GAP_TOL).expect("svd");
            tail.push((t, prof.singular_values[r - 1], prof.singular_values[r]));
        }
    })?;

    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "t", "residual", "sigma_r", "sigma_r+1"
    );
    for (t, s_r, s_next) in tail {
        println!(
            "{t:>6} {:>12.4e} {s_r:>12.4e} {s_next:>12.4e}",
            trace.residuals[t]
        );
    }
    println!(
        "stopped after {} iterations ({:?})",
        trace.t_end, trace.reason
    );
    println!(
        "monotonicity violations: {}",
        trace.monotonicity_violations(1e-12).len()
    );
    Ok(())
}
