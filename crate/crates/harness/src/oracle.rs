//! Randomised cross-checks against the exhaustive references.

use dr_core::aggregator::{gm_solve_tiny, lm_allocate, sg_run, AggregatorError, SgConfig, SgTrace};
use dr_core::{
    brute_force_home, evaluate_home, solve_home, Environment, Heating, HomeSchedule, HomeSolution, HomeSpec,
    Lighting, Scenario, SolverOptions, UtilityPair, Washing,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Power grid of the exhaustive references, W.
pub const GRID: f64 = 50.0;

fn grid(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    GRID * rng.random_range(lo..=hi) as f64
}

/// A random home small enough for exhaustive search: two to four slots, a
/// wash cycle of at most two slots and every power range on the 50 W grid.
pub fn shrunken_home(rng: &mut ChaCha8Rng) -> (HomeSpec, Environment, Vec<f64>) {
    let horizon = rng.random_range(2..=4usize);
    let l_min = grid(rng, 1, 2);
    let h_min = grid(rng, 10, 20);
    let duration = rng.random_range(1..=2usize.min(horizon));
    let earliest = rng.random_range(1..=horizon + 1 - duration);
    let deadline = rng.random_range(earliest + duration - 1..=horizon);
    let home = HomeSpec {
        id: 0,
        label: "shrunk".into(),
        lighting: Some(Lighting {
            p_min: l_min,
            p_max: l_min + grid(rng, 0, 8),
        }),
        heating: Some(Heating {
            p_min: h_min,
            p_max: h_min + grid(rng, 0, 12),
            f_coeff: rng.random_range(0.0008..0.003),
            g_coeff: rng.random_range(0.03..0.12),
        }),
        washing: Some(Washing {
            power: grid(rng, 4, 12),
            duration,
            earliest_start: earliest,
            deadline,
        }),
        t_min: 15.0,
        t_pref: 22.0,
        t_init: rng.random_range(12.0..23.0),
        t_max: 26.0,
        heat_vital_floor: 0.0,
    };
    let env = Environment::new((0..horizon).map(|_| rng.random_range(4.0..12.0)).collect(), 1.0);
    let top = home.subscribed_power();
    let caps = (0..horizon)
        .map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.0..top) })
        .collect();
    (home, env, caps)
}

/// A random instance for the joint optimum: one or two homes over two or
/// three slots with appliances drawn independently.
pub fn tiny_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let horizon = rng.random_range(2..=3usize);
    let homes = rng.random_range(1..=2u32);
    let specs: Vec<HomeSpec> = (0..homes)
        .map(|id| {
            let light = rng.random_bool(0.8).then(|| {
                let p_min = grid(rng, 1, 2);
                Lighting {
                    p_min,
                    p_max: p_min + grid(rng, 0, 4),
                }
            });
            let heat = rng.random_bool(0.7).then(|| {
                let p_min = grid(rng, 4, 10);
                Heating {
                    p_min,
                    p_max: p_min + grid(rng, 0, 6),
                    f_coeff: rng.random_range(0.001..0.005),
                    g_coeff: rng.random_range(0.03..0.15),
                }
            });
            let wash = rng.random_bool(0.6).then(|| {
                let duration = rng.random_range(1..=2usize.min(horizon));
                let earliest = rng.random_range(1..=horizon + 1 - duration);
                Washing {
                    power: grid(rng, 2, 8),
                    duration,
                    earliest_start: earliest,
                    deadline: rng.random_range(earliest + duration - 1..=horizon),
                }
            });
            HomeSpec {
                id,
                label: format!("tiny{id}"),
                lighting: light,
                heating: heat,
                washing: wash,
                t_min: 15.0,
                t_pref: 22.0,
                t_init: rng.random_range(13.0..22.0),
                t_max: 26.0,
                heat_vital_floor: 0.0,
            }
        })
        .collect();
    let top: f64 = specs.iter().map(HomeSpec::subscribed_power).sum();
    let capacity = (0..horizon)
        .map(|_| {
            if rng.random_bool(0.5) {
                (rng.random_range(0.0..=top) / GRID).floor() * GRID
            } else {
                rng.random_range(0.0..=top)
            }
        })
        .collect();
    let env = Environment::new((0..horizon).map(|_| rng.random_range(4.0..12.0)).collect(), 1.0);
    Scenario::new(specs, 5.0, env, capacity).expect("generated scenarios are valid")
}

/// Outcome of [`check_home_solver`].
#[derive(Clone, Debug, Default)]
pub struct HomeOracleReport {
    pub cases: usize,
    /// Largest vital gap between the DP and the brute force, in either direction.
    pub worst_gap: f64,
    pub failures: Vec<String>,
}

fn respects_caps(sol: &HomeSolution, home: &HomeSpec, caps: &[f64], env: &Environment) -> bool {
    let fits = (0..caps.len()).all(|t| sol.schedule.slot_power(t) <= caps[t] + 1e-9);
    let valid = evaluate_home(&sol.schedule, home, env).is_ok_and(|e| e.utility == sol.utility);
    fits && valid
}

/// Runs `cases` random shrunken homes through the DP (`opts`) and the
/// brute force on the 50 W grid.
///
/// A case fails when either schedule breaks a limit or does not evaluate to
/// its reported utility, or when the vital utilities differ by more than
/// the temperature-discretisation bound of `opts`.
pub fn check_home_solver(cases: usize, seed: u64, opts: &SolverOptions) -> HomeOracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HomeOracleReport::default();
    for case in 0..cases {
        let (home, env, caps) = shrunken_home(&mut rng);
        report.cases += 1;
        let bf = match brute_force_home(&home, &caps, &env, GRID) {
            Ok(bf) => bf,
            Err(e) => {
                report.failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let dp = solve_home(&home, &caps, &env, opts);
        let bound = opts.vital_discretization_bound(&home, &env);
        let gap = (dp.utility.vital - bf.utility.vital).abs();
        report.worst_gap = report.worst_gap.max(gap);
        if !respects_caps(&dp, &home, &caps, &env) || !respects_caps(&bf, &home, &caps, &env) {
            report.failures.push(format!("case {case}: infeasible schedule"));
        } else if gap > bound {
            report.failures.push(format!(
                "case {case}: dp {:?}, brute force {:?}, bound {bound}",
                dp.utility, bf.utility
            ));
        }
    }
    report
}

/// One tiny instance solved by every scheme.
#[derive(Clone, Debug)]
pub struct TinyComparison {
    pub scenario: Scenario,
    pub gm: UtilityPair,
    pub lm: UtilityPair,
    pub sg1: UtilityPair,
    pub sg2: UtilityPair,
    pub traces: Vec<SgTrace>,
}

/// Solves `scenario` with the joint optimum on the 50 W grid and with LM,
/// SG-1 and SG-2 using homes restricted to the same grid.
pub fn compare_tiny(scenario: &Scenario, sg1: &SgConfig, sg2: &SgConfig) -> Result<TinyComparison, AggregatorError> {
    let opts = SolverOptions::quantized(GRID);
    let gm = gm_solve_tiny(scenario, GRID)?.utility;
    let plan = lm_allocate(scenario);
    let lm = scenario
        .homes
        .iter()
        .enumerate()
        .map(|(h, home)| solve_home(home, plan.row(h), &scenario.env, &opts).utility)
        .sum();
    let mut traces = Vec::new();
    let mut run = |config: &SgConfig| {
        let r = sg_run(scenario, &SgConfig { solver: opts, ..*config });
        traces.push(r.trace);
        r.utility
    };
    let (sg1, sg2) = (run(sg1), run(sg2));
    Ok(TinyComparison {
        scenario: scenario.clone(),
        gm,
        lm,
        sg1,
        sg2,
        traces,
    })
}

/// Utility of the all-off schedule of each home.
pub fn passive_utilities(scenario: &Scenario) -> Vec<UtilityPair> {
    let off = HomeSchedule::all_off(scenario.horizon());
    scenario
        .homes
        .iter()
        .map(|h| evaluate_home(&off, h, &scenario.env).expect("all-off is valid").utility)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_valid_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = tiny_scenario(&mut a);
            assert_eq!(s, tiny_scenario(&mut b));
            assert!(s.homes.len() <= 2 && s.horizon() <= 3);
            let (home, env, caps) = shrunken_home(&mut a);
            assert!(home.validate(env.horizon()).is_ok());
            assert_eq!(caps.len(), env.horizon());
            shrunken_home(&mut b);
        }
    }

    #[test]
    fn small_oracle_run() {
        let r = check_home_solver(10, 1, &SolverOptions::default());
        assert_eq!(r.cases, 10);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
    }

    #[test]
    fn gm_dominates_on_one_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = tiny_scenario(&mut rng);
        let c = compare_tiny(&s, &SgConfig::sg1(), &SgConfig::sg2()).unwrap();
        assert!(c.gm >= c.lm && c.gm >= c.sg1 && c.gm >= c.sg2);
        let passive: UtilityPair = passive_utilities(&s).iter().sum();
        assert!(c.lm >= passive);
    }
}
