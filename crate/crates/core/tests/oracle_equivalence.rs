//! Enumeration, recurrence iteration and closed forms agree on small times.

use erws_core::exact::{first_moment, first_moment_2d, second_moment_2d, second_moment_exact};
use erws_core::oracle::{enumerate_exact_2d_all, enumerate_exact_all, iterate_recurrences};
use erws_core::{Params1D, Params2D};
use proptest::prelude::*;

// Parameters on a 1/1000 grid keep the exact rationals small.
fn milli(k: u32) -> f64 {
    k as f64 / 1000.0
}

fn params_1d() -> impl Strategy<Value = Params1D> {
    (1u32..999, 1u32..999, 1u32..999, 1u32..999)
        .prop_filter_map("p, q, r must be admissible", |(p, q, eps, s)| {
            (p + q < 1000).then_some(())?;
            Params1D::new(milli(p), milli(q), milli(1000 - p - q), milli(eps), milli(s)).ok()
        })
}

fn params_2d() -> impl Strategy<Value = Params2D> {
    (1u32..400, 1u32..400, 1u32..400, 1u32..400, 1u32..999)
        .prop_filter_map("admissible 2D law", |(p, q, pp, qp, eps)| {
            let r = 1000i64 - (p + q + pp + qp) as i64;
            (r > 0).then_some(())?;
            Params2D::new(milli(p), milli(q), milli(pp), milli(qp), milli(r as u32), milli(eps), [0.25; 4]).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_recurrence_and_closed_form(params in params_1d()) {
        let exact = enumerate_exact_all(&params, 8, 8).unwrap();
        let ts: Vec<u64> = (1..=8).collect();
        let table = iterate_recurrences(&params, 8, &ts).unwrap();
        for (i, m) in exact.iter().enumerate() {
            let t = m.t as u64;
            prop_assert!((m.m2_f64() - table.m2[i]).abs() < 1e-13);
            prop_assert!((m.m1_f64() - table.m1[i]).abs() < 1e-13);
            let closed = second_moment_exact(&params, t).unwrap().value;
            prop_assert!((m.m2_f64() - closed).abs() < 1e-12, "t={} {} vs {}", t, m.m2_f64(), closed);
            prop_assert!((m.m1_f64() - first_moment(&params, t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn enumeration_2d_matches_closed_form(params in params_2d()) {
        let exact = enumerate_exact_2d_all(&params, 5, 5).unwrap();
        let mirrored = enumerate_exact_2d_all(&params.mirrored(), 5, 5).unwrap();
        for (m, w) in exact.iter().zip(&mirrored) {
            let t = m.t as u64;
            let closed = second_moment_2d(&params, t).unwrap().value;
            prop_assert!((m.m2_f64() - closed).abs() < 1e-12);
            prop_assert!((m.m2_f64() - w.m2_f64()).abs() < 1e-15);
            let mean = first_moment_2d(&params, t).unwrap();
            let got = m.m1_f64();
            prop_assert!((got[0] - mean[0]).abs() < 1e-12 && (got[1] - mean[1]).abs() < 1e-12);
        }
    }
}

#[test]
fn skewed_2d_start_has_rotating_mean() {
    let params = Params2D::from_gammas(0.2, 0.15, 0.3, 0.2, [0.7, 0.1, 0.1, 0.1], 0.5).unwrap();
    let exact = enumerate_exact_2d_all(&params, 5, 5).unwrap();
    for m in &exact {
        let mean = first_moment_2d(&params, m.t as u64).unwrap();
        let got = m.m1_f64();
        assert!((got[0] - mean[0]).abs() < 1e-12 && (got[1] - mean[1]).abs() < 1e-12);
    }
    assert!(exact[4].m1_f64()[1] > 0.1);
}
