//! Randomized checks of the identities the rest of the crate leans on.

use proptest::prelude::*;

use crate::constructions::theta_greedy;
use crate::report::{bounded_trend, Scale, Verdict};
use crate::sequences::{Tail, WeightSequence};
use crate::weights::{counting_mu, omega_assoc};

/// Nondecreasing log-quotients built from nonnegative increments.
fn log_quotients() -> impl Strategy<Value = Vec<f64>> {
    (-2.0f64..2.0, prop::collection::vec(0.0f64..0.5, 8..60)).prop_map(|(start, steps)| {
        steps
            .iter()
            .scan(start, |acc, d| {
                *acc += d;
                Some(*acc)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn omega_is_the_sup_over_k(lq in log_quotients(), frac in 0.0f64..1.0) {
        let m = WeightSequence::from_log_quotients("p", lq.clone(), Tail::None).unwrap();
        let t = (lq[0] - 1.0 + frac * (lq[lq.len() - 1] - lq[0] + 1.0)).exp();
        let brute = m.log_values().iter().enumerate().map(|(k, lv)| k as f64 * t.ln() - lv).fold(0.0, f64::max);
        let w = omega_assoc(&m, t).unwrap();
        prop_assert!((w - brute).abs() <= 1e-9 * brute.abs().max(1.0), "{} vs {}", w, brute);
    }

    #[test]
    fn counting_matches_definition(lq in log_quotients(), frac in 0.0f64..1.0) {
        let m = WeightSequence::from_log_quotients("p", lq.clone(), Tail::None).unwrap();
        let l = lq[0] + frac * (lq[lq.len() - 1] - lq[0]);
        prop_assert_eq!(counting_mu(&m, l.exp()).unwrap(), lq.iter().filter(|q| **q <= l).count());
    }

    #[test]
    fn omega_nondecreasing(lq in log_quotients(), a in 0.1f64..5.0, b in 0.1f64..5.0) {
        let m = WeightSequence::from_log_quotients("p", lq.clone(), Tail::None).unwrap();
        let top = lq[lq.len() - 1].exp();
        let (s, t) = (a.min(b) / 5.0 * top, a.max(b) / 5.0 * top);
        prop_assert!(omega_assoc(&m, s).unwrap() <= omega_assoc(&m, t).unwrap() + 1e-12);
    }

    #[test]
    fn log_values_are_convex(lq in log_quotients()) {
        let m = WeightSequence::from_log_quotients("p", lq, Tail::None).unwrap();
        let v = m.log_values();
        prop_assert!(v.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= -1e-12));
    }

    #[test]
    fn constant_profile_is_bounded(c in 0.01f64..1e6, n in 4usize..200) {
        let p = vec![c; n];
        prop_assert_eq!(bounded_trend(&p, &p, Scale::Relative), Verdict::HoldsTrend);
    }

    #[test]
    fn theta_is_nondecreasing(alpha in prop::collection::vec(0.0f64..1.0, 16..128)) {
        let k = alpha.len();
        let inv: Vec<f64> = (1..=k).map(|j| 1.0 / j as f64).collect();
        let r = theta_greedy(&alpha, &inv, &inv).unwrap();
        prop_assert!(r.diagnostics.nondecreasing);
        prop_assert!(r.diagnostics.theta_gamma_nonincreasing);
        prop_assert!(r.diagnostics.tail_ratio <= 2.0 + 1e-9);
    }
}
