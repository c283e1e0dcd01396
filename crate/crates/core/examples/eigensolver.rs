//! Generalized symmetric eigenproblem `H c = e S c` on a small hand-made
//! pair, including the `S`-normalization and residuals of the result.

use h2ion::eigensolver::DEFAULT_TOL;
use h2ion::{solve_generalized, SymMatrix};

fn main() -> h2ion::Result<()> {
    let h = SymMatrix::from_rows(vec![
        vec![-1.0, 0.2, 0.0],
        vec![0.2, -0.5, 0.1],
        vec![0.0, 0.1, 0.3],
    ])?;
    let s = SymMatrix::from_rows(vec![
        vec![1.0, 0.4, 0.1],
        vec![0.4, 1.0, 0.3],
        vec![0.1, 0.3, 1.0],
    ])?;
    let sol = solve_generalized(&h, &s, DEFAULT_TOL)?;
    for k in 0..sol.len() {
        let c = &sol.eigenvectors[k];
        let norm: f64 = (0..3).map(|i| (0..3).map(|j| c[i] * s.get(i, j) * c[j]).sum::<f64>()).sum();
        println!(
            "e{k} = {:>10.6}  c = [{:>8.5}, {:>8.5}, {:>8.5}]  cᵀSc = {norm:.12}  residual {:.1e}",
            sol.eigenvalues[k], c[0], c[1], c[2], sol.residual_norms[k]
        );
    }

    let singular = SymMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]])?;
    match solve_generalized(&SymMatrix::identity(2), &singular, DEFAULT_TOL) {
        Err(e) => println!("singular overlap: {e}"),
        Ok(_) => println!("singular overlap unexpectedly accepted"),
    }
    Ok(())
}
