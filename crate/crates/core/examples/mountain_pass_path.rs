//! Builds the glued scaling path and reports its maximum and energy bracket.
//!
//! Usage: `cargo run --release --example mountain_pass_path -- [q]`

use std::time::Instant;

use gp_excited::field::ProblemParams;
use gp_excited::scalar_field::{shoot_soliton, soliton_constants};
use gp_excited::scaling::{build_path, compact_bump, path_max, PathOptions};

fn main() -> gp_excited::Result<()> {
    let q: f64 = std::env::args().nth(1).map(|s| s.parse().expect("q")).unwrap_or(2.2);
    let ground = shoot_soliton(2.0, 1e-15)?;
    let profile = shoot_soliton(q, 1e-15)?;
    let consts = soliton_constants(&profile, &ground);
    let params = ProblemParams::new(consts.a_star / 2.0, q, 1.2, 1.0, 1.0)?;
    let phi = compact_bump(0.5, 127)?;
    let start = Instant::now();
    let path = build_path(&params, &phi, &profile, &consts, [params.b1 * params.ring, 0.0], PathOptions::default())?;
    let m = path_max(&path)?;
    println!("built and sampled in {:.2?}", start.elapsed());
    println!("tau = {:.6e}, t0 = {:.6}, t1 = {:.6e} (capped: {})", path.tau, path.t0, path.t1, path.t1_capped);
    println!("endpoint energies = {:.6e}, {:.6e}", m.endpoint_energies.0, m.endpoint_energies.1);
    println!("segment maxima = {:?}", m.segment_maxima);
    println!("max on {} at s = {:.6}, t_q - 1 = {:.3e}", m.segment.name(), m.param, m.t_q - 1.0);
    println!("tau^2 (E_max - lower) = {:.6e}", m.scaled_gap);
    println!("proof bound = {:.6e}, stmt bound = {:.6e}", m.scaled_bounds.1, m.scaled_bounds.0);
    println!("segment,param,t,energy,mass,grad_sq");
    for s in m.samples.iter().step_by(8) {
        println!("{},{:.4},{:.6e},{:.6e},{:.6},{:.6e}", s.segment.name(), s.param, s.t, s.energy, s.mass, s.grad_sq);
    }
    Ok(())
}
