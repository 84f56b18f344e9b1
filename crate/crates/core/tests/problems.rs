use nlheat_core::{exact_1d, exact_2d, TestCase};
use proptest::prelude::*;

fn k(u: f64) -> f64 {
    0.5 * u * u
}

/// `u_t - (k(u) u_x)_x` by central differences with spacing `h`.
fn pde_residual(x: f64, t: f64, h: f64) -> f64 {
    let u = |x: f64, t: f64| exact_1d(x, t, 1.0, 0.5, 2.0);
    let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
    let flux = |a: f64, b: f64| 0.5 * (k(u(a, t)) + k(u(b, t))) * (u(b, t) - u(a, t)) / h;
    let div = (flux(x, x + h) - flux(x - h, x)) / h;
    ut - div
}

#[test]
fn exact_1d_satisfies_the_pde_away_from_the_front() {
    for (x, t) in [(0.2, 0.5), (0.1, 0.3), (0.35, 0.45)] {
        let r1 = pde_residual(x, t, 1e-2).abs();
        let r2 = pde_residual(x, t, 5e-3).abs();
        assert!(r1 / r2 > 3.5, "x={x} t={t}: {r1} {r2}");
    }
}

proptest! {
    #[test]
    fn exact_solutions_are_nonnegative(x in 0.0f64..1.0, y in 0.0f64..1.0, t in 1e-4f64..1.0) {
        prop_assert!(exact_1d(x, t, 1.0, 0.5, 2.0) >= 0.0);
        prop_assert!(exact_2d(x, y, t).unwrap() >= 0.0);
    }
}

#[test]
fn heat2d_sweep_matches_table_layout() {
    let c = TestCase::heat2d();
    assert_eq!(c.t0, 1e-4);
    assert_eq!(c.t_end, 0.0051);
    assert_eq!(c.grids, vec![vec![64, 64], vec![128, 128], vec![256, 256]]);
    for g in &c.grids {
        for &dt in &c.dts {
            assert!(c.expected_row(g, dt, nlheat_core::Scheme::ExpEuler).is_some());
        }
    }
}
