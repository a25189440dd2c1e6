use gp_excited::asymptotics::concentration_point;
use gp_excited::config::{parse_config, RunConfig};
use gp_excited::field::{Field2D, Grid2D};
use gp_excited::scaling::scale;
use proptest::prelude::*;

fn peak(grid: Grid2D, c: [f64; 2], w: f64) -> Field2D {
    Field2D::from_fn(grid, |p| (-((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / (w * w)).exp())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn config_serialization_round_trips(
        q in 2.0001f64..4.0,
        b2 in 0.1f64..2.0,
        extra in 0.01f64..1.0,
        nx in 16usize..600,
        l in 0.5f64..40.0,
        tol in 1e-14f64..1e-2,
        seed in any::<u64>(),
        x0 in -3.0f64..3.0,
    ) {
        let cfg = RunConfig {
            q, b2, b1: b2 + extra, nx, l, tol_residual: tol, seed,
            seed_x0: Some([x0, 0.0]),
            q_schedule: vec![q],
            ..RunConfig::default()
        };
        prop_assert_eq!(parse_config(&cfg.serialize()).unwrap(), cfg);
    }

    #[test]
    fn field_dump_is_bit_exact(nx in 16usize..40, ny in 16usize..40, h in 1e-6f64..1.0, x0 in -5.0f64..5.0, s in any::<u64>()) {
        let grid = Grid2D::new(nx, ny, h, 0.5 * h, [x0, -x0]).unwrap();
        let mut state = s | 1;
        let values = (0..grid.len()).map(|_| {
            state ^= state << 13; state ^= state >> 7; state ^= state << 17;
            f64::from_bits(state >> 2) 
        }).collect();
        let u = Field2D::new(grid, values).unwrap();
        let mut buf = Vec::new();
        u.write_dump(&mut buf).unwrap();
        let back = Field2D::read_dump(&buf[..]).unwrap();
        prop_assert!(back.values.iter().zip(&u.values).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(back.grid, u.grid);
    }

    #[test]
    fn concentration_point_is_translation_equivariant(dx in -0.3f64..0.3, dy in -0.3f64..0.3, shift in -5.0f64..5.0) {
        let grid = Grid2D::centered([0.0, 0.0], 2.0, 101).unwrap();
        let u = peak(grid, [dx, dy], 0.4);
        let p = concentration_point(&u).unwrap();
        let moved = Field2D { grid: grid.translated([shift, -shift]), values: u.values.clone() };
        let pm = concentration_point(&moved).unwrap();
        prop_assert!((pm[0] - p[0] - shift).abs() < 1e-10 && (pm[1] - p[1] + shift).abs() < 1e-10);
        let h = grid.max_spacing();
        prop_assert!((p[0] - dx).abs() < h * h && (p[1] - dy).abs() < h * h);
    }

    #[test]
    fn concentration_point_is_reflection_equivariant(dx in 0.1f64..0.5, dy in -0.3f64..0.3) {
        let grid = Grid2D::centered([0.0, 0.0], 2.0, 101).unwrap();
        let u = peak(grid, [dx, dy], 0.5);
        let p = concentration_point(&u).unwrap();
        let r = concentration_point(&u.reflect_x1()).unwrap();
        prop_assert!((r[0] + p[0]).abs() < 1e-10 && (r[1] - p[1]).abs() < 1e-10);
    }

    #[test]
    fn dilation_preserves_mass(t in 0.05f64..20.0) {
        let grid = Grid2D::centered([0.3, 0.1], 3.0, 64).unwrap();
        let mut u = peak(grid, [0.3, 0.1], 0.6);
        u.normalize();
        let ut = scale(&u, t).unwrap();
        prop_assert!((ut.mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn two_equal_peaks_are_rejected() {
    let grid = Grid2D::centered([0.0, 0.0], 3.0, 121).unwrap();
    let u = Field2D::from_fn(grid, |p| {
        (-((p[0] - 1.5).powi(2) + p[1] * p[1]) / 0.1).exp() + 0.9 * (-((p[0] + 1.5).powi(2) + p[1] * p[1]) / 0.1).exp()
    });
    assert!(matches!(concentration_point(&u), Err(gp_excited::Error::MultiPeak { .. })));
}
