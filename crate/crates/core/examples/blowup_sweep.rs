//! Continuation sweep toward `q = 2` and the blow-up convergence table.
//!
//! Usage: `cargo run --release --example blowup_sweep -- [q ...]`

use gp_excited::asymptotics::{blowup_rescale, convergence_table};
use gp_excited::field::ProblemParams;
use gp_excited::scalar_field::{shoot_soliton, soliton_constants};
use gp_excited::solver::{continuation_sweep, SolveConfig, SweepPoint};

fn main() -> gp_excited::Result<()> {
    let mut qs: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("q")).collect();
    if qs.is_empty() {
        qs = vec![2.2, 2.1, 2.05];
    }
    let ground = shoot_soliton(2.0, 1e-15)?;
    let points = qs
        .iter()
        .map(|&q| {
            let profile = shoot_soliton(q, 1e-15)?;
            let consts = soliton_constants(&profile, &ground);
            Ok(SweepPoint { profile, consts })
        })
        .collect::<gp_excited::Result<Vec<_>>>()?;
    let params = ProblemParams::new(points[0].consts.a_star / 2.0, qs[0], 1.2, 1.0, 1.0)?;
    let cfg = SolveConfig::new(&params);
    let reports = continuation_sweep(&cfg, &params, &points)?;
    let rows = reports
        .iter()
        .map(|r| blowup_rescale(r, &ground, &params))
        .collect::<gp_excited::Result<Vec<_>>>()?;
    println!("q,tau_q,eps,grad_ratio,ring_defect,mu_scaled,profile_err_L2,beta_hat,bracket_verdict");
    for r in &rows {
        println!(
            "{},{:.6e},{:.6e},{:.12},{:.4e},{:.8},{:.4e},{:.6},{}",
            r.q, r.tau, r.eps, r.grad_ratio, r.ring_defect, r.mu_scaled, r.profile_err_l2, r.beta_hat, r.bracket
        );
    }
    if rows.len() >= 3 {
        let table = convergence_table(rows)?;
        println!("C1 = {:.6}, C2 = {:.6}", table.c1, table.c2);
        for t in &table.trends {
            println!("{}: {} ({})", t.column, if t.ok { "ok" } else { "VIOLATED" }, t.detail);
        }
    }
    Ok(())
}
