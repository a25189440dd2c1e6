mod common;

use std::f64::consts::PI;

use common::fd_derivative;
use gp_excited::field::{Field2D, Grid2D, ProblemParams, Stencil};
use gp_excited::functionals::{Functional, Potential};
use gp_excited::verify::random_smooth_field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian(s: f64, n: usize) -> Field2D {
    let grid = Grid2D::centered([0.0, 0.0], 8.0 * s, n).unwrap();
    Field2D::from_fn(grid, |p| (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * s * s)).exp() / (PI.sqrt() * s))
}

/// Energy terms of the unit-mass Gaussian of width `s` centred at the origin, in closed form
/// except for the angular average of `|x|_b`, done by the periodic trapezoid rule.
fn gaussian_energy(s: f64, params: &ProblemParams) -> (f64, f64, f64) {
    let (b1, b2, a_ring, q) = (params.b1, params.b2, params.ring, params.q);
    let kinetic = 1.0 / (s * s);
    let p = q + 2.0;
    let power = (PI * s * s).powf(-0.5 * p) * 2.0 * PI * s * s / p;
    let m = 4096;
    let ang: f64 = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            (t.cos().powi(2) / (b1 * b1) + t.sin().powi(2) / (b2 * b2)).sqrt()
        })
        .sum::<f64>()
        * 2.0
        * PI
        / m as f64;
    let first = ang * PI.sqrt() * s * s * s / 4.0 / (PI * s * s);
    let second = 0.5 * s * s * (1.0 / (b1 * b1) + 1.0 / (b2 * b2));
    let pot = second - 2.0 * a_ring * first + a_ring * a_ring;
    (kinetic, pot, power)
}

#[test]
fn gaussian_energy_matches_closed_form() {
    let params = ProblemParams::new(3.0, 2.3, 1.3, 0.8, 0.7).unwrap();
    let s = 0.5;
    let u = gaussian(s, 255);
    let (k, v, p) = gaussian_energy(s, &params);
    let f = Functional::new(&params).with_stencil(Stencil::Fourth);
    assert!((u.mass() - 1.0).abs() < 1e-10);
    assert!((f.grad_sq(&u) - k).abs() / k < 1e-4, "{} vs {k}", f.grad_sq(&u));
    assert!((f.potential_mass(&u) - v).abs() / v < 1e-3, "{} vs {v}", f.potential_mass(&u));
    assert!((f.power(&u) - p).abs() / p < 1e-8);
    let e = f.energy(&u).total;
    let expected = 0.5 * k + 0.5 * v - params.a / (params.q + 2.0) * p;
    assert!((e - expected).abs() / expected.abs() < 1e-4);
}

#[test]
fn second_order_stencil_converges_quadratically() {
    let s = 0.5;
    let err = |n: usize| (gaussian(s, n).grad_norm_sq_with(Stencil::Second) - 1.0 / (s * s)).abs();
    let ratio = err(63) / err(127);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn unconstrained_gradient_matches_finite_differences() {
    let params = ProblemParams::new(4.0, 2.2, 1.2, 1.0, 1.0).unwrap();
    let grid = Grid2D::centered([1.2, 0.0], 3.0, 96).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for stencil in [Stencil::Second, Stencil::Fourth] {
        let f = Functional::new(&params).with_stencil(stencil);
        for _ in 0..5 {
            let u = random_smooth_field(&mut rng, grid, 3);
            let v = random_smooth_field(&mut rng, grid, 2);
            let fd = fd_derivative(
                |e| f.energy(&u.with_values(u.values.iter().zip(&v.values).map(|(a, b)| a + e * b).collect())).total,
                1e-3,
            );
            let exact = f.gradient(&u).dot(&v);
            assert!((fd - exact).abs() < 1e-7 * exact.abs().max(1.0), "{fd} vs {exact}");
        }
    }
}

#[test]
fn trap_free_functional_has_no_potential_terms() {
    let params = ProblemParams::new(4.0, 2.2, 1.2, 1.0, 1.0).unwrap();
    let f = Functional::new(&params).with_potential(Potential::Zero);
    let u = gaussian(0.5, 127);
    assert_eq!(f.potential_mass(&u), 0.0);
    assert_eq!(f.pohozaev_q(&u), f.pohozaev_qtilde(&u));
}
