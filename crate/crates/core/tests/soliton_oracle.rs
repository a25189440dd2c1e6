mod common;

use common::{oracle_a_q_star, oracle_soliton};
use gp_excited::scalar_field::{decay_fit, shoot_soliton, soliton_constants, tau_q};

#[test]
fn ground_state_matches_heun_oracle() {
    let q = shoot_soliton(2.0, 1e-15).unwrap();
    let o = oracle_soliton(2.0, 1e-4);
    assert!((q.u0 - o.u0).abs() / o.u0 < 1e-5, "{} vs {}", q.u0, o.u0);
    assert!((q.norm2_sq() - o.norm2_sq).abs() / o.norm2_sq < 1e-5, "{} vs {}", q.norm2_sq(), o.norm2_sq);
    assert!((q.grad_sq() - o.grad_sq).abs() / o.grad_sq < 1e-5);
}

#[test]
fn critical_masses_match_oracle() {
    let ground = shoot_soliton(2.0, 1e-15).unwrap();
    for q in [2.1, 2.5, 3.0] {
        let c = soliton_constants(&shoot_soliton(q, 1e-15).unwrap(), &ground);
        let o = oracle_a_q_star(q, 1e-4);
        assert!((c.a_q_star - o).abs() / o < 1e-5, "q = {q}: {} vs {o}", c.a_q_star);
    }
}

#[test]
fn decay_rates_follow_linearization() {
    for (q, rate) in [(2.0, 1.0), (3.0, (2.0f64 / 3.0).sqrt())] {
        let p = shoot_soliton(q, 1e-15).unwrap();
        let (_, delta) = decay_fit(&p).unwrap();
        assert!((delta - rate).abs() < 0.05 * rate, "q = {q}: {delta} vs {rate}");
    }
}

#[test]
fn blowup_scale_grows_toward_two() {
    let ground = shoot_soliton(2.0, 1e-15).unwrap();
    let a = 0.5 * ground.norm2_sq();
    let taus: Vec<f64> = [2.2, 2.1, 2.05]
        .iter()
        .map(|&q| {
            let c = soliton_constants(&shoot_soliton(q, 1e-15).unwrap(), &ground);
            let o = oracle_a_q_star(q, 1e-4);
            let expected = (2.0 * o / (q * a)).powf(1.0 / (q - 2.0));
            let t = tau_q(a, &c).unwrap();
            assert!((t - expected).abs() / expected < 1e-3, "q = {q}: {t} vs {expected}");
            t
        })
        .collect();
    assert!(taus.windows(2).all(|w| w[1] > w[0] && w[0] > 1.0));
}
