use gp_excited::scalar_field::{shoot_soliton, soliton_constants};

fn main() -> gp_excited::Result<()> {
    let ground = shoot_soliton(2.0, 1e-15)?;
    println!("q,u0,norm2_sq,a_q_star,r_match,decay_rate,pohozaev_res");
    for q in [2.0, 2.05, 2.1, 2.2, 2.5, 3.0, 4.0] {
        let p = shoot_soliton(q, 1e-15)?;
        let c = soliton_constants(&p, &ground);
        println!("{q},{:.10},{:.10},{:.10},{:.3},{:.5},{:.2e}", c.u0, c.norm2_sq, c.a_q_star, p.r_match, p.decay.1, c.pohozaev_res);
    }
    Ok(())
}
