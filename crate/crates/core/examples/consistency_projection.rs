//! Mapping noisy destination counts onto a consistent, nonnegative vector
//! and shifting it so private counts never undercount.
//!
//!     cargo run --example consistency_projection

use dprl::projection::{finalize_counts, project, ProjectionProblem};

fn main() -> dprl::Result<()> {
    let cases = [
        (vec![3.0, 5.0], 8.0, 1.0),
        (vec![3.0, 5.0], 10.0, 1.0),
        (vec![-1.0, 2.0], 3.0, 2.0),
        (vec![12.5, -0.7, 4.1, 0.2], 11.0, 0.5),
    ];
    let e = 4.0;
    for (dest, total, slack) in cases {
        let problem = ProjectionProblem::new(dest.clone(), total, slack)?;
        let sol = project(&problem);
        let fin = finalize_counts(&sol, e);
        println!("noisy {dest:?}, marginal {total}, slack {slack}");
        println!("  t* = {:.4}, x = {:.4?}", sol.t_star, sol.x);
        println!(
            "  after +E/(2S) with E = {e}: {:.4?}, total {:.4}",
            fin.dest, fin.total
        );
    }
    Ok(())
}
