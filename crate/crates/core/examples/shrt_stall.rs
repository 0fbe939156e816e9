//! A commuting, diagonalizable 2x2 pair on which the shear/rotation baseline
//! cannot move, while ATDS diagonalizes it exactly.
//!
//! cargo run --example shrt_stall

use atds::shrt::ShrtState;
use atds::tuple::DEFAULT_SD_TOL;
use atds::{atds_solve, CadzowConfig, MatrixTuple};

fn main() -> atds::Result<()> {
    // A_1 = [[1, 2], [1, 1]], A_2 = A_1 + I
    let a = MatrixTuple::from_real(2, &[&[1.0, 2.0, 1.0, 1.0], &[2.0, 2.0, 1.0, 2.0]])?;

    let mut state = ShrtState::new(&a)?;
    for sweep in 1..=5 {
        let u = state.pair_update(0, 1);
        println!(
            "sh-rt sweep {sweep}: phi = {}, theta = {}, f = {}",
            u.phi,
            u.theta,
            state.objective()
        );
    }

    let out = atds_solve(&a, &CadzowConfig::default(), DEFAULT_SD_TOL)?;
    println!(
        "ATDS: branch {}, off = {:.2e}",
        out.branch.as_str(),
        out.off_value
    );
    println!(
        "eigenvalues of A_1: {:.6} {:.6}",
        out.lambdas[0][0].re, out.lambdas[0][1].re
    );
    Ok(())
}
