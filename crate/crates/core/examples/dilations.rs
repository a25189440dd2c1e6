//! Mass-preserving dilations and the trap-free scaling maximum of the rescaled soliton.

use gp_excited::field::{Grid2D, Stencil};
use gp_excited::scalar_field::{c_tilde, rescaled_soliton_with_tau, shoot_soliton, soliton_constants, tau_q};
use gp_excited::scaling::{scale, vzero_scaled_max};

fn main() -> gp_excited::Result<()> {
    let q = 2.5;
    let ground = shoot_soliton(2.0, 1e-15)?;
    let profile = shoot_soliton(q, 1e-15)?;
    let consts = soliton_constants(&profile, &ground);
    let a = 0.5 * consts.a_star;
    let tau = tau_q(a, &consts)?;
    let grid = Grid2D::centered([0.0, 0.0], 11.0 / tau, 511)?;
    let w = rescaled_soliton_with_tau(&profile, tau, [0.0, 0.0], grid)?;
    println!("tau = {tau:.8}, mass = {:.12}, |grad w|^2 / tau^2 = {:.10}", w.mass(), w.grad_norm_sq_with(Stencil::Fourth) / (tau * tau));
    for t in [0.5, 2.0, 8.0] {
        let wt = scale(&w, t)?;
        let ratio = wt.grad_norm_sq_with(Stencil::Fourth) / w.grad_norm_sq_with(Stencil::Fourth);
        println!("t = {t}: mass {:.12}, kinetic ratio / t^2 = {:.12}", wt.mass(), ratio / (t * t));
    }
    let (t_star, e_max) = vzero_scaled_max(&w, a, q, Stencil::Fourth);
    println!("max_t E_0(w^t) = {e_max:.10} at t = {t_star:.8}; closed form {:.10}", c_tilde(q, tau));
    Ok(())
}
