use proptest::prelude::*;
use rand::Rng;
use tvmdp::controller::{exact_evaluate, run_episode, AgentConfig};
use tvmdp::model::MarkovPolicy;
use tvmdp::oracle::{overlap_coefficient, solve_oracle};
use tvmdp::planner::plan;
use tvmdp_verify::instances::{random_instance, random_kernel, random_rewards, random_schedule, rng};
use tvmdp_verify::oracles::{brute_force_overlap, brute_force_plan_value, policy_values, tree_value};

#[test]
fn exact_evaluator_matches_path_enumeration() {
    for seed in 0..25u64 {
        let mut r = rng(seed);
        let (n, m, h) = (r.gen_range(1..=3), r.gen_range(1..=2), r.gen_range(1..=6));
        let mdp = random_instance(&mut r, n, m, h);
        let schedule = random_schedule(&mut r, h);
        let ep = run_episode(&mdp, &schedule, &AgentConfig::default(), 0, seed).unwrap();
        let eval = exact_evaluate(&mdp, &ep.executed).unwrap();
        for s0 in 0..n {
            let tree = tree_value(&mdp, &ep.executed, s0);
            assert!((tree - eval.values[s0]).abs() <= 1e-10, "seed {seed}, s0 {s0}: {tree} vs {}", eval.values[s0]);
        }
    }
}

#[test]
fn greedy_oracle_policy_attains_the_optimal_value() {
    for seed in 0..20u64 {
        let mut r = rng(300 + seed);
        let mdp = random_instance(&mut r, 3, 2, 5);
        let tables = solve_oracle(&mdp).unwrap();
        let actions: Vec<Vec<usize>> = (0..5).map(|t| (0..3).map(|s| tables.greedy_action(t, s)).collect()).collect();
        let v = policy_values(&mdp, &actions);
        for t in 0..=5 {
            for s in 0..3 {
                assert!((v[t][s] - tables.value(t)[s]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn planner_matches_enumeration() {
    for seed in 0..20u64 {
        let mut r = rng(500 + seed);
        let (n, m, h) = (r.gen_range(1..=3), r.gen_range(1..=2), r.gen_range(1..=3));
        let kernel = random_kernel(&mut r, n, m, 0.05);
        let rewards: Vec<_> = (0..h).map(|_| random_rewards(&mut r, n, m)).collect();
        let art = plan(0, &kernel, rewards.clone()).unwrap();
        let bf = brute_force_plan_value(&kernel, &rewards);
        for s in 0..n {
            assert!((art.w[0][s] - bf[s]).abs() <= 1e-12);
        }
    }
}

fn random_policies(r: &mut impl Rng, n: usize, m: usize, h: usize) -> Vec<MarkovPolicy> {
    (0..h)
        .map(|_| {
            let probs = (0..n).flat_map(|_| tvmdp_verify::instances::random_distribution(r, m, 0.0)).collect();
            MarkovPolicy::new(n, m, probs).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_matches_path_enumeration(seed in 0u64..10_000, m in 1usize..=3) {
        let mut r = rng(seed);
        let (n, a, h) = (r.gen_range(1..=3), r.gen_range(1..=2), 4);
        let mdp = random_instance(&mut r, n, a, h);
        let p1 = random_policies(&mut r, n, a, h);
        let p2 = random_policies(&mut r, n, a, h);
        let t = r.gen_range(0..=h - m);
        let lib = overlap_coefficient(&mdp, &p1, &p2, t, m).unwrap();
        let bf = brute_force_overlap(&mdp, &p1, &p2, t, m);
        prop_assert!((lib - bf).abs() <= 1e-12, "{} vs {}", lib, bf);
    }
}
