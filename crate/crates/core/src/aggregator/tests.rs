use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::home_solver::{solve_home, SolverOptions};
use crate::model::{CapacityPlan, Environment, Heating, HomeSpec, Scenario, UtilityPair};
use crate::reference::{class1, class2, heterogeneous, homogeneous};

fn plain(id: u32, l: f64) -> HomeSpec {
    // a home with only lighting, p_max = l
    HomeSpec {
        id,
        label: "plain".into(),
        lighting: Some(crate::model::Lighting { p_min: l / 2.0, p_max: l }),
        heating: None,
        washing: None,
        t_min: 15.0,
        t_pref: 22.0,
        t_init: 20.0,
        t_max: 26.0,
        heat_vital_floor: 0.0,
    }
}

fn scenario_of(homes: Vec<HomeSpec>, capacity: Vec<f64>) -> Scenario {
    let horizon = capacity.len();
    Scenario::new(homes, 5.0, Environment::constant(horizon, 10.0), capacity).unwrap()
}

#[test]
fn lm_examples() {
    let plan = lm_allocate(&homogeneous(100, 1e5));
    assert!((0..100).all(|h| plan.row(h).iter().all(|c| *c == 1000.0)));

    let plan = lm_allocate(&heterogeneous(100, 5e4));
    assert!((plan.get(0, 0) - 658.8).abs() < 0.1);
    assert!((plan.get(99, 0) - 341.2).abs() < 0.1);
    assert!(plan.is_feasible(&[5e4; 100]));

    let plan = lm_allocate(&homogeneous(1, 1234.5));
    assert_eq!(plan.get(0, 7), 1234.5);
}

#[test]
fn round_robin_examples() {
    let homes = (0..4).map(|i| plain(i, 100.0)).collect();
    let s = scenario_of(homes, vec![250.0, 250.0, 400.0, 0.0, 250.0]);
    let plan = round_robin_init(&s);
    assert_eq!(plan.column(0), vec![100.0, 100.0, 50.0, 0.0]);
    assert_eq!(plan.column(1), vec![100.0, 50.0, 0.0, 100.0]);
    // offset 2 after serving three homes from 3
    assert_eq!(plan.column(2), vec![100.0, 100.0, 100.0, 100.0]);
    assert_eq!(plan.column(3), vec![0.0; 4]);
    // an empty slot leaves the offset where it was
    assert_eq!(plan.column(4), vec![50.0, 0.0, 100.0, 100.0]);

    let s = homogeneous(3, 1e6);
    let plan = round_robin_init(&s);
    assert!((0..3).all(|h| plan.row(h).iter().all(|c| *c == 5600.0)));
}

#[test]
fn step_examples() {
    let g = vec![vec![3.0, 4.0, 0.0], vec![0.0; 3]];
    assert_eq!(step_size(StepRule::Diminishing(1.2e6), 1, &g), Some(1.2e6));
    assert_eq!(step_size(StepRule::Diminishing(1.2e6), 4, &g), Some(6e5));
    assert_eq!(step_size(StepRule::ConstantLength(6000.0), 9, &g), Some(1200.0));
    assert_eq!(step_size(StepRule::ConstantLength(6000.0), 1, &[vec![0.0; 3]]), None);
}

#[test]
fn cap_examples() {
    let b = cap_updates(1e7, &[vec![1.0, 0.0, 5e-5]], 2900.0, &[5e4, 5e4, 400.0]);
    assert_eq!(b, vec![vec![2900.0, 0.0, 400.0]]);
}

#[test]
fn projection_examples() {
    assert_eq!(project_allocation(&[60.0, 40.0], &[30.0, 10.0], 100.0), vec![70.0, 30.0]);
    assert_eq!(project_allocation(&[4.0, 96.0], &[0.0, 20.0], 100.0), vec![4.0, 96.0]);
    assert_eq!(project_allocation(&[1.0, 2.0, 3.0], &[0.0; 3], 6.0), vec![1.0, 2.0, 3.0]);
    // three-way: home 0 protected, the others share the rest
    let out = project_allocation(&[1.0, 50.0, 49.0], &[0.0, 30.0, 10.0], 100.0);
    assert_eq!(out, vec![1.0, 60.0, 39.0]);
    // rounding never lands on a protected home
    let current = [3072.9660128175374, 0.0, 2492.2940581646917];
    let out = project_allocation(&current, &[0.0, 5558.177686924209, 4997.060193657654], current.iter().sum());
    assert_eq!(out[0], current[0]);
}

proptest! {
    #[test]
    fn projection_conserves_budget(
        current in prop::collection::vec(0.0f64..5000.0, 1..40),
        beta_seed in prop::collection::vec(0.0f64..5600.0, 40),
        zero_mask in prop::collection::vec(any::<bool>(), 40),
    ) {
        let n = current.len();
        let beta: Vec<f64> = (0..n).map(|i| if zero_mask[i] { 0.0 } else { beta_seed[i] }).collect();
        let budget: f64 = current.iter().sum();
        let out = project_allocation(&current, &beta, budget);
        let sum: f64 = out.iter().sum();
        prop_assert!((sum - budget).abs() <= 1e-9 * budget.max(1.0));
        prop_assert!(out.iter().all(|v| *v >= 0.0));
        // lambda is common: every home that lost capacity lost beta + the same amount
        let drops: Vec<f64> = (0..n)
            .filter(|&i| out[i] < current[i])
            .map(|i| current[i] + beta[i] - out[i])
            .collect();
        if let Some(first) = drops.first() {
            for d in &drops {
                prop_assert!((d - first).abs() <= 1e-6 * first.max(1.0));
            }
        }
    }

    #[test]
    fn protected_homes_do_not_lose(
        current in prop::collection::vec(0.0f64..100.0, 2..20),
        beta in prop::collection::vec(0.0f64..3000.0, 20),
    ) {
        let n = current.len();
        let beta = &beta[..n];
        let budget: f64 = current.iter().sum();
        let out = project_allocation(&current, beta, budget);
        // a home that would go negative under the plain update is protected
        let lambda_plain = beta.iter().sum::<f64>() / n as f64;
        for h in 0..n {
            if current[h] + beta[h] - lambda_plain < 0.0 {
                prop_assert!(out[h] >= current[h] - 1e-9 * budget.max(1.0));
            }
        }
    }

    #[test]
    fn lm_is_scale_equivariant(scale in 0.1f64..10.0, c in 0.0f64..4e5) {
        let base = heterogeneous(10, c);
        let mut scaled = base.clone();
        for h in &mut scaled.homes {
            for l in h.lighting.iter_mut() { l.p_min *= scale; l.p_max *= scale; }
            for x in h.heating.iter_mut() { x.p_min *= scale; x.p_max *= scale; }
            for w in h.washing.iter_mut() { w.power *= scale; }
        }
        let a = lm_allocate(&base);
        let b = lm_allocate(&scaled);
        for h in 0..10 {
            for t in [0, 50, 99] {
                prop_assert!((a.get(h, t) - b.get(h, t)).abs() <= 1e-9 * c.max(1.0));
            }
        }
    }
}

#[test]
fn abundance_short_circuits() {
    let s = heterogeneous(4, 4.0 * 5600.0);
    let r = sg_run(&s, &SgConfig::sg1());
    assert_eq!(r.trace.iterates.len(), 1);
    let it = &r.trace.iterates[0];
    assert!(it.improved && it.alpha.is_none());
    assert_eq!(r.utility, UtilityPair::new(1200.0, 1200.0));
}

fn assert_trace_feasible(trace: &SgTrace, capacity: &[f64], subscribed: f64) {
    let mut best = None;
    for it in &trace.iterates {
        for t in 0..capacity.len() {
            let budget = capacity[t].min(subscribed);
            assert!((it.plan.slot_total(t) - budget).abs() <= 1e-6, "k {} slot {t}", it.k);
        }
        assert!(it.plan.is_feasible(capacity) || {
            // equality up to rounding of the final sum
            (0..capacity.len()).all(|t| it.plan.slot_total(t) <= capacity[t] + 1e-6)
        });
        assert!((0..it.plan.homes()).all(|h| it.plan.row(h).iter().all(|c| *c >= 0.0)));
        if it.improved {
            if let Some(b) = best {
                assert!(it.total > b);
            }
            best = Some(it.total);
        }
        assert!(it.total <= best.unwrap());
    }
}

#[test]
fn sg_small_runs_are_feasible_and_deterministic() {
    for (s, config) in [
        (homogeneous(6, 6.0 * 400.0), SgConfig::sg1()),
        (heterogeneous(6, 6.0 * 700.0), SgConfig::sg2()),
    ] {
        let config = SgConfig { k_max: 15, ..config };
        let a = sg_run(&s, &config);
        let b = sg_run(&s, &config);
        assert_eq!(a, b);
        assert_trace_feasible(&a.trace, &s.capacity, s.total_subscribed());
        assert_eq!(a.trace.best().unwrap().total, a.utility);
        let check: UtilityPair = a.solutions.iter().map(|x| x.utility).sum();
        assert_eq!(check, a.utility);
        for (h, sol) in a.solutions.iter().enumerate() {
            for t in 0..s.horizon() {
                assert!(sol.schedule.slot_power(t) <= a.plan.get(h, t));
            }
        }
    }
}

/// Two-slot-grid instance with small homes.
fn tiny_home(id: u32, heat_only: bool) -> HomeSpec {
    HomeSpec {
        id,
        label: "tiny".into(),
        lighting: (!heat_only).then_some(crate::model::Lighting { p_min: 50.0, p_max: 150.0 }),
        heating: Some(Heating {
            p_min: 500.0,
            p_max: 700.0,
            f_coeff: 0.004,
            g_coeff: 0.1,
        }),
        washing: None,
        t_min: 15.0,
        t_pref: 22.0,
        t_init: 15.0,
        t_max: 26.0,
        heat_vital_floor: 0.0,
    }
}

#[test]
fn gm_slack_equals_independent_optima() {
    let homes = vec![tiny_home(0, false), tiny_home(1, false)];
    let total = homes.iter().map(HomeSpec::subscribed_power).sum::<f64>();
    let s = scenario_of(homes, vec![total; 3]);
    let gm = gm_solve_tiny(&s, 50.0).unwrap();
    let q = SolverOptions::quantized(50.0);
    let independent: UtilityPair = s
        .homes
        .iter()
        .map(|h| solve_home(h, &[h.subscribed_power(); 3], &s.env, &q).utility)
        .sum();
    assert_eq!(gm.utility, independent);
}

#[test]
fn gm_rolls_heat_between_homes() {
    let homes = vec![tiny_home(0, true), tiny_home(1, true)];
    let s = scenario_of(homes, vec![700.0; 4]);
    let gm = gm_solve_tiny(&s, 50.0).unwrap();
    let heats = |h: usize| -> Vec<bool> {
        gm.solutions[h].schedule.power[1].iter().map(|p| *p > 0.0).collect()
    };
    let (a, b) = (heats(0), heats(1));
    // capacity fits one heater: they never run together and both get turns
    assert!(a.iter().zip(&b).all(|(x, y)| !(*x && *y)));
    assert!(a.iter().any(|x| *x) && b.iter().any(|x| *x));
    // no static split (350 W each) could heat at all
    let lm = lm_allocate(&s);
    let lm_total: UtilityPair = (0..2)
        .map(|h| solve_home(&s.homes[h], lm.row(h), &s.env, &SolverOptions::quantized(50.0)).utility)
        .sum();
    assert!(gm.utility > lm_total);
    assert_eq!(gm.solutions.iter().map(|x| x.utility).sum::<UtilityPair>(), gm.utility);
}

#[test]
fn gm_zero_capacity_is_passive() {
    let mut homes = vec![class1(0), class2(1)];
    for h in &mut homes {
        let w = h.washing.as_mut().unwrap();
        w.duration = 2;
        w.deadline = 3;
    }
    let s = scenario_of(homes, vec![0.0; 3]);
    let gm = gm_solve_tiny(&s, 50.0).unwrap();
    let q = SolverOptions::quantized(50.0);
    let passive: UtilityPair = s.homes.iter().map(|h| solve_home(h, &[0.0; 3], &s.env, &q).utility).sum();
    assert_eq!(gm.utility, passive);
}

#[test]
fn gm_rejects_large_or_off_grid() {
    let s = homogeneous(4, 1e4);
    assert!(matches!(gm_solve_tiny(&s, 50.0), Err(AggregatorError::InstanceTooLarge { .. })));
    let s = scenario_of(vec![plain(0, 130.0)], vec![100.0; 2]);
    assert!(matches!(gm_solve_tiny(&s, 50.0), Err(AggregatorError::OffGrid { .. })));
}

#[test]
fn async_examples() {
    let s = homogeneous(4, 4.0 * 700.0);
    let config = SgConfig::sg1();
    let plan = round_robin_init(&s);
    let ids: Vec<u32> = s.homes.iter().map(|h| h.id).collect();

    // whole fleet: same as the first loop iteration
    let all = async_reallocate(&s, &ids, &plan, &config).unwrap();
    let run = sg_run(&s, &SgConfig { k_max: 2, ..config });
    assert_eq!(all, run.trace.iterates[1].plan);

    // two saturated homes
    let mut p = CapacityPlan::zeros(4, 100);
    for h in 0..4 {
        p.row_mut(h).fill(if h < 2 { 5600.0 } else { 100.0 });
    }
    let s2 = homogeneous(4, 2.0 * 5600.0 + 200.0);
    assert_eq!(async_reallocate(&s2, &[0, 1], &p, &config).unwrap(), p);

    // starving home 2 and saturated home 0
    let moved = async_reallocate(&s2, &[0, 2], &p, &config).unwrap();
    for t in 0..100 {
        assert_eq!(moved.get(0, t) + moved.get(2, t), p.get(0, t) + p.get(2, t));
        assert_eq!(moved.get(1, t), p.get(1, t));
        assert_eq!(moved.get(3, t), p.get(3, t));
    }
    assert!((0..100).any(|t| moved.get(2, t) > p.get(2, t)));

    assert_eq!(async_reallocate(&s2, &[0], &p, &config), Err(AggregatorError::SubsetTooSmall(1)));
    assert_eq!(async_reallocate(&s2, &[0, 9], &p, &config), Err(AggregatorError::UnknownHome(9)));
}
