//! Generative checks of the exact engine and the walker state.

use erws_core::exact::{baseline_second_moment, sigma2_exact, second_moment_exact, MomentAlgebra};
use erws_core::oracle::iterate_recurrences;
use erws_core::sim::{advance, init_walker, WalkerStream};
use erws_core::Params1D;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params1D> {
    (0.01f64..0.95, -0.95f64..0.95, 0.0f64..1.0)
        .prop_filter_map("admissible", |(r, g, eps)| {
            Params1D::from_gamma(g * (1.0 - r), r, eps.max(1e-3).min(0.999), 0.5).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_iteration(params in params()) {
        let ts = [1u64, 2, 3, 10, 97, 1000, 10_000];
        let table = iterate_recurrences(&params, 10_000, &ts).unwrap();
        for (i, &t) in ts.iter().enumerate() {
            let m2 = second_moment_exact(&params, t).unwrap().value;
            let s2 = sigma2_exact(&params, t).unwrap().value;
            prop_assert!(((m2 - table.m2[i]) / table.m2[i]).abs() < 1e-9, "t={} {} vs {}", t, m2, table.m2[i]);
            prop_assert!((s2 - table.sigma2[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn moments_stay_in_range(params in params()) {
        for t in [1u64, 2, 5, 50, 5000, 1_000_000] {
            let m2 = second_moment_exact(&params, t).unwrap().value;
            prop_assert!(m2 > 0.0);
            let s2 = sigma2_exact(&params, t).unwrap().value;
            prop_assert!(s2 > 0.0 && s2 <= 1.0 + 1e-12);
            if params.eps() + params.r() < 1.0 {
                let lo = params.eps() / (params.eps() + params.r());
                prop_assert!(s2 >= lo - 1e-12);
            }
        }
    }

    #[test]
    fn vanishing_eps_reaches_baseline(g in -0.9f64..0.9, r in 0.05f64..0.9) {
        prop_assume!((2.0 * g + r - 1.0).abs() > 1e-3);
        let algebra = MomentAlgebra::new(1e-12, r, g).unwrap();
        for t in [2u64, 30, 1000, 10_000] {
            let a = algebra.second_moment(t).unwrap().value;
            let b = baseline_second_moment(g, r, t).unwrap().value;
            prop_assert!(((a - b) / b).abs() < 1e-6, "t={} {} vs {}", t, a, b);
        }
    }
}

#[test]
fn walker_state_bounds_over_a_million_steps() {
    let params = Params1D::new(0.6, 0.25, 0.15, 0.3, 0.5).unwrap();
    let mut stream = WalkerStream::new(5, 0);
    let mut steps = 0;
    while steps < 1_000_000 {
        let mut state = init_walker(&params, stream.uniform());
        for _ in 0..10_000 {
            let next = advance(&state, &params, stream.uniform());
            assert!(next.is_valid(), "{next:?}");
            assert_eq!(next.t, state.t + 1);
            assert!((next.x - state.x).abs() <= 1);
            state = next;
            steps += 1;
        }
    }
}
