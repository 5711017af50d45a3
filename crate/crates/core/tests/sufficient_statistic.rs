//! The reduced-state step law equals the full-history law on every history.

use erws_core::oracle::{
    all_histories_1d, all_histories_2d, conditional_dist_full_history,
    conditional_dist_full_history_2d, exact_law, exact_law_2d,
};
use erws_core::sim::{step_distribution_2d_in, step_distribution_in, WalkerState1D, WalkerState2D};
use erws_core::{Params1D, Params2D};

#[test]
fn every_1d_history_up_to_eight() {
    for params in [
        Params1D::new(0.55, 0.25, 0.2, 0.1, 0.5).unwrap(),
        Params1D::from_gamma(0.49, 0.2, 0.1, 0.5).unwrap(),
        Params1D::new(0.1, 0.7, 0.2, 0.9, 0.3).unwrap(),
    ] {
        let law = exact_law(&params);
        let mut checked = 0;
        for len in 1..=8 {
            for h in all_histories_1d(len) {
                let state = WalkerState1D::from_history(&h);
                assert_eq!(step_distribution_in(&state, &law), conditional_dist_full_history(&h, &law));
                checked += 1;
            }
        }
        assert_eq!(checked, (3usize.pow(9) - 3) / 2);
    }
}

#[test]
fn every_2d_history_up_to_five() {
    for params in [
        Params2D::new(0.35, 0.05, 0.25, 0.15, 0.2, 0.1, [0.25; 4]).unwrap(),
        Params2D::new(0.1, 0.3, 0.05, 0.25, 0.3, 0.6, [0.1, 0.2, 0.3, 0.4]).unwrap(),
    ] {
        let law = exact_law_2d(&params);
        for len in 1..=5 {
            for h in all_histories_2d(len) {
                let state = WalkerState2D::from_history(&h);
                assert_eq!(
                    step_distribution_2d_in(&state, &law),
                    conditional_dist_full_history_2d(&h, &law)
                );
            }
        }
    }
}
