//! Projection onto the tuples diagonalized by a fixed S, and why the set of all
//! simultaneously diagonalizable tuples is not convex.
//!
//! cargo run --example sd_projection

use atds::linalg::c;
use atds::{check_sd_membership, off_objective, project_onto_sd_of, CMat, MatrixTuple};

fn main() -> atds::Result<()> {
    let s = CMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0].map(c));
    let x = MatrixTuple::from_real(2, &[&[1.0, 2.0, 3.0, 4.0], &[0.0, 1.0, -1.0, 0.0]])?;
    let p = project_onto_sd_of(&s, &x)?;
    println!("distance to SD(S)   {:.4}", (&x - &p).frobenius_norm());
    println!("off of projection   {:.2e}", off_objective(&p, &s)?);
    // the residual is orthogonal to SD(S), so projecting again changes nothing
    let again = project_onto_sd_of(&s, &p)?;
    println!("idempotence error   {:.2e}", (&again - &p).frobenius_norm());

    let a = MatrixTuple::from_real(2, &[&[1.0, 1.0, -1.0, 1.0], &[2.0, 2.0, -2.0, 2.0]])?;
    let b = MatrixTuple::from_real(2, &[&[1.0, 1.0, 1.0, 1.0], &[2.0, 2.0, 2.0, 2.0]])?;
    let mid = (&a + &b).scale(0.5);
    for (name, t) in [("A", &a), ("B", &b), ("(A + B) / 2", &mid)] {
        let m = check_sd_membership(t, 1e-8)?;
        println!(
            "{name:<12} commuting {:<5} diagonalizable {:<5} member {}",
            m.is_commuting,
            m.is_all_diagonalizable,
            m.is_member()
        );
    }
    Ok(())
}
