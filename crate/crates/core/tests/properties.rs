use proptest::prelude::*;
use tvmdp::controller::{exact_evaluate, run_episode, AgentConfig};
use tvmdp::estimator::{forecast_uncertainty, solve_cmle, uncertainty_intervals, CmleOptions, Transition, TransitionDataset};
use tvmdp::experiment::{generate_scenario, ScenarioSpec};
use tvmdp::model::{validate_instance, UpdateSchedule};
use tvmdp::oracle::solve_oracle;

fn scenario() -> impl Strategy<Value = ScenarioSpec> {
    prop_oneof![
        (0.0..=0.5f64, 0.0..2.0f64).prop_map(|(amplitude, angular_rate)| ScenarioSpec::TwoStateRotating { amplitude, angular_rate }),
        (1usize..=4, 1usize..=3, 0.0..0.3f64, any::<u64>())
            .prop_map(|(n_states, n_actions, drift, seed)| ScenarioSpec::RandomDrift { n_states, n_actions, drift, seed }),
        (2usize..=3, 0.0..=1.0f64, 1usize..8)
            .prop_map(|(side, drift_amplitude, period)| ScenarioSpec::GridworldWind { side, drift_amplitude, period }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_instances_are_valid(spec in scenario(), horizon in 1usize..12) {
        let mdp = generate_scenario(&spec, horizon).unwrap();
        prop_assert!(validate_instance(&mdp).is_valid());
    }

    #[test]
    fn algorithm_never_beats_the_oracle(spec in scenario(), period in 1usize..4, seed in any::<u64>()) {
        let mdp = generate_scenario(&spec, 8).unwrap();
        let schedule = UpdateSchedule::periodic(period, 8).unwrap();
        let ep = run_episode(&mdp, &schedule, &AgentConfig::default(), 0, seed).unwrap();
        let eval = exact_evaluate(&mdp, &ep.executed).unwrap();
        let tables = solve_oracle(&mdp).unwrap();
        for (j, v) in eval.values.iter().zip(tables.optimal_return()) {
            prop_assert!(*j <= v + 1e-9);
        }
        for joints in &eval.joints {
            for mu in joints {
                prop_assert!((mu.total() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn estimates_respect_drift_and_ranges_contain_them(
        obs in proptest::collection::vec((0usize..3, 0usize..2, 0usize..3), 1..6),
        budget in 0.0..0.4f64,
    ) {
        let triples = obs
            .iter()
            .enumerate()
            .map(|(time, &(state, action, next))| Transition { time, state, action, next })
            .collect();
        let data = TransitionDataset::from_triples(3, 2, triples).unwrap();
        let drift = vec![budget; obs.len() + 3];
        let est = solve_cmle(&data, &drift, &CmleOptions::default()).unwrap();
        prop_assert!(est.max_violation(&drift) <= 1e-8);
        let iv = uncertainty_intervals(&data, &drift, &est).unwrap();
        let mut prev = iv.max_diameter();
        for h in 1..3 {
            let f = forecast_uncertainty(&iv, &drift, h).unwrap();
            for s in 0..3 {
                for a in 0..2 {
                    prop_assert!(f.diameter(s, a) + 1e-12 >= iv.diameter(s, a));
                }
            }
            prop_assert!(f.max_diameter() + 1e-12 >= prev);
            prev = f.max_diameter();
        }
        for s in 0..3 {
            for a in 0..2 {
                for y in 0..3 {
                    let (lo, hi) = iv.interval(s, a, y);
                    let p = est.latest().prob(s, a, y);
                    prop_assert!(lo - 1e-8 <= p && p <= hi + 1e-8);
                }
            }
        }
    }
}
