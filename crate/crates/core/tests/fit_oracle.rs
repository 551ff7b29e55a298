mod support;

use growai_core::decimal::{Tenths, Thousandths};
use growai_core::rubric::{default_weights, Criterion, WeightVector};
use growai_core::weights::{feasible_weights, fit_objective, fit_weights, fit_weights_report, CalibrationObservation};
use proptest::prelude::*;
use support::oracles::{brute_force_fit, continuous_fit, Obs};

fn to_oracle(obs: &[CalibrationObservation]) -> Vec<Obs> {
    obs.iter()
        .map(|o| Obs {
            scores: o.arena_scores.map(|t| i64::from(t.get())),
            target: o.target.0,
        })
        .collect()
}

fn observation(c: Criterion, scores: [u8; 4], target: i64) -> CalibrationObservation {
    CalibrationObservation {
        criterion: c,
        arena_scores: scores.map(|t| Tenths::new(t).unwrap()),
        target: Thousandths(target),
    }
}

#[test]
fn exact_synthesis_recovers_prior_weights() {
    let w = [25i64, 30, 25, 20];
    let scores = [[20, 30, 20, 30], [10, 30, 25, 12], [28, 11, 19, 30], [15, 22, 30, 10], [30, 14, 27, 21]];
    let obs: Vec<_> = scores
        .iter()
        .map(|s| {
            let y: i64 = (0..4).map(|i| w[i] * i64::from(s[i])).sum();
            observation(Criterion::C1, *s, y)
        })
        .collect();
    let (oracle, best) = brute_force_fit(&to_oracle(&obs), [25, 25, 25, 25]);
    assert_eq!(oracle, [25, 30, 25, 20]);
    assert_eq!(best, 0);
    // a different prior must not matter: the optimum is unique
    let prior = WeightVector::new(Criterion::C1, [25, 25, 25, 25]).unwrap();
    assert_eq!(fit_weights(Criterion::C1, &obs, &prior).unwrap().hundredths(), [25, 30, 25, 20]);
}

#[test]
fn all_equal_observation_returns_prior() {
    for c in Criterion::ALL {
        let obs = [observation(c, [24; 4], 2100)];
        assert_eq!(fit_weights(c, &obs, &default_weights(c)).unwrap(), default_weights(c));
    }
}

fn obs_strategy() -> impl Strategy<Value = Vec<CalibrationObservation>> {
    proptest::collection::vec(
        (proptest::array::uniform4(10u8..=30), 1000i64..=3000).prop_map(|(s, t)| observation(Criterion::C3, s, t)),
        1..12,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_matches_brute_force(obs in obs_strategy(), prior_idx in 0usize..1000) {
        let feasible: Vec<_> = feasible_weights().collect();
        let prior = WeightVector::new(Criterion::C3, feasible[prior_idx % feasible.len()]).unwrap();
        let report = fit_weights_report(Criterion::C3, &obs, &prior).unwrap();
        let (oracle, best) = brute_force_fit(&to_oracle(&obs), prior.hundredths().map(i64::from));
        prop_assert_eq!(report.weights.hundredths().map(i64::from), oracle);
        prop_assert_eq!(report.objective, best);
        prop_assert!(report.objective <= report.prior_objective);
    }

    #[test]
    fn grid_optimum_within_one_step_of_continuous(obs in obs_strategy()) {
        let o = to_oracle(&obs);
        let (wc, fc) = continuous_fit(&o);
        let report = fit_weights_report(Criterion::C3, &obs, &default_weights(Criterion::C3)).unwrap();
        let grid = report.objective as f64;
        // lower bound: continuous relaxation
        prop_assert!(fc <= grid + 1e-6 * (1.0 + grid));
        // upper bound: best feasible point within one hundredth of the relaxed optimum
        let near = feasible_weights()
            .filter(|w| w.iter().zip(&wc).all(|(&a, &b)| (f64::from(a) - b).abs() <= 1.0 + 1e-9))
            .map(|w| fit_objective(&w, &obs))
            .min()
            .expect("a grid point lies within one step");
        prop_assert!(report.objective <= near);
    }
}
