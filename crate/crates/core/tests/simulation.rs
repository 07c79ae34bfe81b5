use voterbudget::sim::{empirical_transition_row, substream};
use voterbudget::{
    complete_transition_row, estimate_value, general_agent_support_prob, rollout, solve_aggregate,
    step, AggregateAction, Graph, ModelParams, SimConfig, SolverLimits, VectorAction, VectorModel,
    VectorState,
};

fn first_supporters(n: usize, s: usize) -> VectorState {
    VectorState::new(n, (1u64 << s) - 1).unwrap()
}

#[test]
fn per_agent_frequencies_match_exact_probability() {
    let graph = Graph::cycle(6);
    let state = VectorState::parse("110010").unwrap();
    let pay = VectorAction::parse("000100").unwrap();
    let m = 100_000;
    let mut hits = [0usize; 6];
    let mut rng = substream(11, 0);
    for _ in 0..m {
        let next = step(&graph, &state, &pay, &mut rng).unwrap();
        for (i, h) in hits.iter_mut().enumerate() {
            *h += next.get(i) as usize;
        }
    }
    for (i, &h) in hits.iter().enumerate() {
        let p = general_agent_support_prob(&graph, &state, i, pay.get(i)).unwrap();
        let freq = h as f64 / m as f64;
        let band = 3.0 * (p * (1.0 - p) / m as f64).sqrt();
        assert!((freq - p).abs() <= band, "agent {i}: {freq} vs {p}");
    }
}

#[test]
fn empirical_rows_match_aggregate_kernel() {
    let n = 7;
    let graph = Graph::complete_with_self_loops(n);
    let m = 50_000;
    let mut cells = 0;
    let mut inside = 0;
    for s1 in 0..=n {
        for act in [
            AggregateAction::new(0, 0),
            AggregateAction::new(1, 0),
            AggregateAction::new(0, 1),
        ] {
            if !act.fits(n, s1) {
                continue;
            }
            let state = first_supporters(n, s1);
            let pay = voterbudget::sim::lift_action(&state, act).unwrap();
            let cfg = SimConfig::new(m, 100 + s1 as u64).unwrap();
            let emp = empirical_transition_row(&graph, &state, &pay, &cfg)
                .unwrap()
                .lump();
            let exact = complete_transition_row(n, s1, act).unwrap();
            for s2 in 0..=n {
                let p = exact.get(s2);
                let band = 3.0 * (p * (1.0 - p) / m as f64).sqrt();
                cells += 1;
                inside += ((emp.get(s2) - p).abs() <= band) as usize;
            }
        }
    }
    assert!(inside as f64 >= 0.99 * cells as f64, "{inside}/{cells}");
}

#[test]
fn empirical_point_masses_and_uniform_pair() {
    let cfg = SimConfig::new(40_000, 5).unwrap();
    let g = Graph::cycle(5);
    let s = VectorState::parse("01000").unwrap();
    let row = empirical_transition_row(&g, &s, &VectorAction::ones(5), &cfg).unwrap();
    assert_eq!(row.len(), 1);
    assert_eq!(row.get(&VectorState::ones(5)), 1.0);

    let g = Graph::complete_with_self_loops(2);
    let s = VectorState::parse("10").unwrap();
    let row = empirical_transition_row(&g, &s, &VectorAction::zeros(2), &cfg).unwrap();
    let band = 3.0 * (0.25f64 * 0.75 / 40_000.0).sqrt();
    for bits in ["00", "01", "10", "11"] {
        let f = row.get(&VectorState::parse(bits).unwrap());
        assert!((f - 0.25).abs() <= band, "{bits}: {f}");
    }
}

#[test]
fn rollout_edge_cases() {
    let params = ModelParams::new(5, 4, 0.0, 10, 5, 8, 30).unwrap();
    let (_, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    let start = first_supporters(5, 3);
    let r = rollout(&policy, &start, &params, &model, &mut substream(1, 0)).unwrap();
    assert_eq!(r.discounted_reward, 24.0);
    assert_eq!(r.states.len(), 5);
    assert_eq!(r.budget_trajectory.len(), 5);

    let broke = ModelParams::new(5, 4, 0.9, 10, 5, 8, 0).unwrap();
    let (_, policy) = solve_aggregate(&broke, &SolverLimits::default()).unwrap();
    let r = rollout(
        &policy,
        &VectorState::zeros(5),
        &broke,
        &model,
        &mut substream(1, 0),
    )
    .unwrap();
    assert_eq!(r.discounted_reward, 0.0);
    assert_eq!(r.terminal_state, VectorState::zeros(5));
}

#[test]
fn unpaid_unanimity_never_moves() {
    let params = ModelParams::new(6, 6, 0.9, 10, 5, 8, 0).unwrap();
    let (_, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    for start in [VectorState::zeros(6), VectorState::ones(6)] {
        for i in 0..200 {
            let r = rollout(&policy, &start, &params, &model, &mut substream(3, i)).unwrap();
            assert!(r.states.iter().all(|s| *s == start));
        }
    }
}

#[test]
fn reference_value_agrees_with_simulation() {
    let params = ModelParams::reference();
    let (values, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    let cfg = SimConfig::new(100_000, 2024).unwrap();
    let est = estimate_value(&policy, &first_supporters(7, 3), &params, &model, &cfg).unwrap();
    let exact = values.get(0, 3, 30).unwrap();
    assert!(
        (est.mean - exact).abs() <= 3.0 * est.std_error,
        "{} +- {} vs {exact}",
        est.mean,
        est.std_error
    );
}

#[test]
fn budgets_stay_nonnegative_and_follow_dynamics() {
    let params = ModelParams::reference();
    let (_, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    for i in 0..500 {
        let start = first_supporters(7, (i % 8) as usize);
        let r = rollout(&policy, &start, &params, &model, &mut substream(9, i)).unwrap();
        for t in 0..params.horizon {
            let (s, b) = (r.states[t].count_ones(), r.budget_trajectory[t]);
            let act = policy.get(t, s, b).unwrap();
            let spent = act.cost(10, 5);
            assert!(spent <= b);
            assert_eq!(
                r.budget_trajectory[t + 1],
                (b - spent + 8 * s as u64).min(params.budget_cap())
            );
        }
    }
}

#[test]
fn deterministic_instance_has_zero_error() {
    // Enough money to hold every supporter at every epoch from unanimity.
    let params = ModelParams::new(4, 5, 0.9, 10, 5, 8, 4 * 5 * 5).unwrap();
    let (values, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    let cfg = SimConfig::new(1000, 1).unwrap();
    let est = estimate_value(&policy, &VectorState::ones(4), &params, &model, &cfg).unwrap();
    assert_eq!(est.std_error, 0.0);
    assert!((est.mean - values.get(0, 4, params.initial_budget).unwrap()).abs() < 1e-12);
}

#[test]
fn standard_error_shrinks_with_samples() {
    let params = ModelParams::new(7, 6, 0.8, 10, 5, 8, 0).unwrap();
    let (_, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    let start = first_supporters(7, 3);
    let small = estimate_value(
        &policy,
        &start,
        &params,
        &model,
        &SimConfig::new(20_000, 4).unwrap(),
    )
    .unwrap();
    let large = estimate_value(
        &policy,
        &start,
        &params,
        &model,
        &SimConfig::new(40_000, 4).unwrap(),
    )
    .unwrap();
    let ratio = large.std_error / small.std_error;
    assert!(
        (ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.05,
        "ratio {ratio}"
    );
}

#[test]
fn estimates_are_reproducible() {
    let params = ModelParams::reference();
    let (_, policy) = solve_aggregate(&params, &SolverLimits::default()).unwrap();
    let model = VectorModel::complete(&params).unwrap();
    let cfg = SimConfig::new(5_000, 77).unwrap();
    let start = first_supporters(7, 2);
    let a = estimate_value(&policy, &start, &params, &model, &cfg).unwrap();
    let b = estimate_value(&policy, &start, &params, &model, &cfg).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert!(estimate_value(
        &policy,
        &start,
        &params,
        &model,
        &SimConfig::new(1, 1).unwrap()
    )
    .is_err());
}
