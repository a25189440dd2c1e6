//! Solves for the excited state at one exponent and prints the report.
//!
//! Usage: `cargo run --release --example excited_state -- [q] [n]`

use std::time::Instant;

use gp_excited::asymptotics::blowup_rescale;
use gp_excited::field::ProblemParams;
use gp_excited::scalar_field::{shoot_soliton, soliton_constants, tau_q};
use gp_excited::solver::{solve, SolveConfig};

fn main() -> gp_excited::Result<()> {
    let mut args = std::env::args().skip(1);
    let q: f64 = args.next().map(|s| s.parse().expect("q")).unwrap_or(2.2);
    let n: usize = args.next().map(|s| s.parse().expect("n")).unwrap_or(255);
    let ground = shoot_soliton(2.0, 1e-15)?;
    let profile = shoot_soliton(q, 1e-15)?;
    let consts = soliton_constants(&profile, &ground);
    let params = ProblemParams::new(consts.a_star / 2.0, q, 1.2, 1.0, 1.0)?;
    println!("tau = {:.6e}", tau_q(params.a, &consts)?);
    let cfg = SolveConfig { n, ..SolveConfig::new(&params) };
    let start = Instant::now();
    let r = solve(&cfg, &params, &profile, &consts)?;
    println!("solved in {:.2?} ({} newton steps)", start.elapsed(), r.iterations);
    println!("mu = {:.10e}  (-(2/q) tau^2 = {:.10e})", r.mu, -2.0 / q * r.tau * r.tau);
    println!("residual: scaled {:.3e}, raw {:.3e}", r.residual_inf, r.residual_raw);
    println!("pohozaev |Q|/K = {:.3e}", r.pohozaev_res);
    println!("center = ({:.15}, {:.3e})", r.center[0], r.center[1]);
    println!("sigma = {:?}", r.sigma);
    println!("tau^2 (E - lower) = {:.6e}  [{}]", r.gap * r.tau * r.tau, r.bracket);
    println!("expected ~ sm/(4 b1^2) = {:.6e}", consts.second_moment / (4.0 * 1.44));
    println!("grad ratio corr = {:.12}, raw = {:.12}", r.grad_sq_corr / r.tau.powi(2), r.grad_sq / r.tau.powi(2));
    println!("min ratio = {:.3e}, mass err = {:.1e}", r.min_ratio, r.mass_err);
    let b = blowup_rescale(&r, &ground, &params)?;
    println!("{b:#?}");
    Ok(())
}
