//! Exact simultaneous diagonalization with DODO, including a member with a
//! repeated eigenvalue that forces a second recursion level.
//!
//! cargo run --example exact_diagonalization

use atds::dodo::{dodo_traced, DodoOptions};
use atds::linalg::c;
use atds::{off_objective, CMat, MatrixTuple};

fn main() -> atds::Result<()> {
    let s = CMat::from_row_slice(
        3,
        3,
        &[1.0, 0.3, -0.2, 0.1, 1.0, 0.4, -0.3, 0.2, 1.0].map(c),
    );
    let lambdas = vec![vec![c(1.0), c(1.0), c(2.0)], vec![c(3.0), c(4.0), c(5.0)]];
    let a = MatrixTuple::from_diagonalizer(&s, &lambdas)?;

    let (result, trace) = dodo_traced(&a, &DodoOptions::default())?;
    println!("recursion depth   {}", trace.depth);
    for (level, sizes) in &trace.splits {
        println!("  level {level}: eigenspace sizes {sizes:?}");
    }
    println!("max off-block mass {:.2e}", trace.max_off_block);
    println!("off(S^-1 A S)      {:.2e}", off_objective(&a, &result.s)?);
    println!("cond(S)            {:.3}", result.cond_s);
    for (k, l) in result.lambdas.iter().enumerate() {
        let re: Vec<String> = l.iter().map(|z| format!("{:.6}", z.re)).collect();
        println!("lambda_{} = [{}]", k + 1, re.join(", "));
    }
    Ok(())
}
