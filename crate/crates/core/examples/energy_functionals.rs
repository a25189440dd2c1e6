//! Energy, Pohozaev functional and gradients of a trial state, with the
//! dilation identities they satisfy.

use gp_excited::field::{Field2D, Grid2D, ProblemParams, Stencil};
use gp_excited::functionals::Functional;
use gp_excited::verify::richardson_derivative;

fn main() -> gp_excited::Result<()> {
    let params = ProblemParams::new(5.85, 2.2, 1.2, 1.0, 1.0)?;
    let f = Functional::new(&params).with_stencil(Stencil::Fourth);
    let grid = Grid2D::centered([1.2, 0.0], 3.0, 127)?;
    let mut u = Field2D::from_fn(grid, |p| (-2.0 * ((p[0] - 1.2).powi(2) + p[1].powi(2))).exp());
    u.normalize();
    let e = f.energy(&u);
    println!("kinetic = {:.10}, potential = {:.10}, interaction = {:.10}", e.kinetic, e.potential, e.interaction);
    println!("E = {:.10}, multiplier = {:.10}", e.total, f.multiplier(&u));
    let q = f.pohozaev_q(&u);
    let dq = richardson_derivative(|s| f.augmented_energy(&u, s), 1e-3);
    println!("Q(u) = {q:.10}, d/ds E(e^s u(e^s .)) at 0 = {dq:.10}");
    let (lhs, rhs) = f.dilation_identity(&u);
    println!("dilation identity: {lhs:.12} = {rhs:.12}");
    let g = f.tangent_gradient(&u);
    println!("tangent gradient is orthogonal to u: <g, u> = {:.2e}", g.dot(&u));
    Ok(())
}
