use nalgebra::DVector;
use nlheat_core::linsolve::chebyshev_iterations_for;
use nlheat_core::vecops::norm2;
use nlheat_core::{
    assemble, build_grid, cg_solve, chebyshev_solve, phi_action, phi_dense, Conductivity, DiscreteOperator,
    KrylovConfig, ProblemSpec,
};
use proptest::prelude::*;

fn operator() -> impl Strategy<Value = DiscreteOperator> {
    (1usize..=2, 4usize..24, 0.1f64..2.0, 0.0f64..1.0).prop_flat_map(|(dim, n, k0, b)| {
        let nodes = if dim == 1 { vec![4 * n] } else { vec![n, (n / 2).max(2)] };
        let len: usize = nodes.iter().product();
        prop::collection::vec(0.0f64..1.5, len).prop_map(move |y| {
            let s = ProblemSpec::unit(dim, Conductivity::PowerLaw { k0, sigma: 2.0 }).with_boundary(move |_, _| b);
            let grid = build_grid(&s, &nodes).unwrap();
            assemble(&s, &grid, &y, 0.0).unwrap()
        })
    })
}

fn vector_for(op: &DiscreteOperator, seed: u64, signed: bool) -> Vec<f64> {
    (0..op.dim())
        .map(|i| {
            let u = ((i as u64).wrapping_mul(2654435761).wrapping_add(seed) % 1000) as f64 / 1000.0;
            if signed {
                2.0 * u - 1.0
            } else {
                u
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn phi_action_matches_dense(op in operator(), log_tau in -6.0f64..-2.0, seed in 0u64..10_000) {
        let tau = 10f64.powf(log_tau);
        let v = vector_for(&op, seed, true);
        let cfg = KrylovConfig::with_tol(1e-10);
        let before = op.matvecs();
        let res = phi_action(&op, &v, tau, &cfg).unwrap();
        prop_assert_eq!(res.matvecs, op.matvecs() - before);
        let reference = phi_dense(&(op.matrix.to_dense() * -tau)).unwrap() * DVector::from_column_slice(&v);
        let err = (DVector::from_column_slice(&res.w) - reference).norm();
        let vn = norm2(&v);
        prop_assert!(err <= 1e-10 * vn, "error {} for |v| {}", err, vn);
        prop_assert!(err <= (10.0 * res.est_error).max(1e-12 * vn));
        prop_assert!(norm2(&res.w) <= vn * (1.0 + 1e-10));
    }

    #[test]
    fn phi_action_is_deterministic(op in operator(), seed in 0u64..10_000) {
        let v = vector_for(&op, seed, true);
        let cfg = KrylovConfig::with_tol(1e-6);
        let a = phi_action(&op, &v, 1e-3, &cfg).unwrap();
        let b = phi_action(&op, &v, 1e-3, &cfg).unwrap();
        prop_assert_eq!(a.w, b.w);
        prop_assert_eq!(a.matvecs, b.matvecs);
    }

    #[test]
    fn cg_keeps_nonnegativity_and_norm(op in operator(), dt in 1e-5f64..1e-1, seed in 0u64..10_000) {
        let rhs = vector_for(&op, seed, false);
        let rn = norm2(&rhs);
        let tight = cg_solve(&op, dt, &rhs, 1e-11, 10_000).unwrap();
        prop_assert!(tight.x.iter().all(|&x| x >= -1e-9 * rn));
        for rtol in [1e-3, 1e-6] {
            let rep = cg_solve(&op, dt, &rhs, rtol, 10_000).unwrap();
            prop_assert!(norm2(&rep.x) <= rn * (1.0 + rtol));
            prop_assert!(rep.final_residual_norm <= rtol * rn);
        }
    }

    #[test]
    fn cg_and_chebyshev_agree(op in operator(), dt in 1e-5f64..1e-2, seed in 0u64..10_000) {
        let rhs = vector_for(&op, seed, true);
        let rn = norm2(&rhs);
        let rtol = 1e-8;
        let cg = cg_solve(&op, dt, &rhs, rtol, 10_000).unwrap();
        let n_iter = chebyshev_iterations_for(1.0 + dt * op.norm1(), 1e-8);
        let ch = chebyshev_solve(&op, dt, &rhs, n_iter).unwrap();
        let diff: Vec<f64> = cg.x.iter().zip(&ch.x).map(|(a, b)| a - b).collect();
        // The shifted matrix has smallest eigenvalue 1, so solution error is
        // bounded by the residual norm.
        let allowed = 2.0 * rtol.max(ch.final_residual_norm / rn) * rn;
        prop_assert!(norm2(&diff) <= allowed, "diff {} allowed {}", norm2(&diff), allowed);
    }
}
