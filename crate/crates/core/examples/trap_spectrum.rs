//! Lowest eigenvalue of `-Laplacian + V` for the ellipse trap; every excited
//! state multiplier must lie below it.

use gp_excited::field::ProblemParams;
use gp_excited::functionals::lowest_eigenvalue;

fn main() -> gp_excited::Result<()> {
    for (b1, b2) in [(1.2, 1.0), (1.5, 1.0), (2.0, 1.0)] {
        let params = ProblemParams::new(5.0, 2.2, b1, b2, 1.0)?;
        let e = lowest_eigenvalue(&params, 4.0, 127, 1e-10)?;
        println!("b = ({b1}, {b2}): lambda1 = {:.8} after {} iterations", e.value, e.iterations);
    }
    Ok(())
}
