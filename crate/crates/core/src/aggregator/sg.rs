use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::lm::round_robin;
use super::projection::project_allocation;
use super::step::{cap_updates, step_size, StepRule};
use super::AggregatorError;
use crate::home_solver::{greedient_home, solve_home, HomeSolution, SolverOptions, DEFAULT_VITAL_WEIGHT};
use crate::model::{CapacityPlan, Environment, HomeSpec, Scenario, UtilityPair};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgConfig {
    pub k_max: usize,
    pub step: StepRule,
    /// Weight `W_v` of a vital unit against a comfort unit in greedients.
    pub vital_weight: f64,
    pub solver: SolverOptions,
}

impl SgConfig {
    pub const A1: f64 = 1.2e6;
    pub const A2: f64 = 6000.0;

    /// Diminishing step `a1 / sqrt(k)`.
    pub fn sg1() -> Self {
        SgConfig {
            k_max: 100,
            step: StepRule::Diminishing(Self::A1),
            vital_weight: DEFAULT_VITAL_WEIGHT,
            solver: SolverOptions::default(),
        }
    }

    /// Constant step length `a2 / ||g||`.
    pub fn sg2() -> Self {
        SgConfig {
            step: StepRule::ConstantLength(Self::A2),
            ..Self::sg1()
        }
    }
}

/// What a home sends back for a proposed limit vector: nothing else about
/// the home ever reaches the aggregator.
#[derive(Clone, Debug, PartialEq)]
pub struct HomeReport {
    pub utility: UtilityPair,
    pub greedients: Vec<f64>,
}

pub trait HomeController {
    fn homes(&self) -> usize;
    fn respond(&mut self, h: usize, caps: &[f64]) -> HomeReport;
}

/// Homes solved in-process. Homes with identical parameters share a cache
/// keyed by the exact limit vector.
pub struct LocalHomes<'a> {
    homes: &'a [HomeSpec],
    env: &'a Environment,
    opts: SolverOptions,
    vital_weight: f64,
    kind: Vec<usize>,
    cache: BTreeMap<(usize, Vec<u64>), HomeReport>,
    solves: usize,
}

impl<'a> LocalHomes<'a> {
    pub fn new(homes: &'a [HomeSpec], env: &'a Environment, opts: SolverOptions, vital_weight: f64) -> Self {
        let kind = (0..homes.len())
            .map(|h| (0..=h).find(|&i| homes[i].same_parameters(&homes[h])).unwrap())
            .collect();
        LocalHomes {
            homes,
            env,
            opts,
            vital_weight,
            kind,
            cache: BTreeMap::new(),
            solves: 0,
        }
    }

    /// Full solution of home `h`; stays on the home side.
    pub fn solution(&self, h: usize, caps: &[f64]) -> HomeSolution {
        solve_home(&self.homes[h], caps, self.env, &self.opts)
    }

    /// Number of subproblems actually solved (cache misses).
    pub fn solves(&self) -> usize {
        self.solves
    }
}

impl HomeController for LocalHomes<'_> {
    fn homes(&self) -> usize {
        self.homes.len()
    }

    fn respond(&mut self, h: usize, caps: &[f64]) -> HomeReport {
        let key = (self.kind[h], caps.iter().map(|c| c.to_bits()).collect::<Vec<u64>>());
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let home = &self.homes[h];
        let sol = solve_home(home, caps, self.env, &self.opts);
        let g = greedient_home(&sol, home, caps, self.env, self.vital_weight);
        let report = HomeReport {
            utility: sol.utility,
            greedients: g.per_slot,
        };
        self.solves += 1;
        self.cache.insert(key, report.clone());
        report
    }
}

/// One iteration of the loop as seen by the aggregator.
#[derive(Clone, Debug, PartialEq)]
pub struct SgIterate {
    pub k: usize,
    /// Step taken after this iterate; `None` when the loop stopped here
    /// because every greedient was zero.
    pub alpha: Option<f64>,
    /// Capped updates `β_ht`, one row per home (empty when `alpha` is `None`).
    pub beta: Vec<Vec<f64>>,
    pub plan: CapacityPlan,
    pub home_utilities: Vec<UtilityPair>,
    pub total: UtilityPair,
    /// This iterate is strictly better than every earlier one.
    pub improved: bool,
    /// Iteration of the best iterate so far.
    pub best_k: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SgTrace {
    pub iterates: Vec<SgIterate>,
}

impl SgTrace {
    pub fn best(&self) -> Option<&SgIterate> {
        let last = self.iterates.last()?;
        self.iterates.iter().find(|it| it.k == last.best_k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgOutcome {
    pub plan: CapacityPlan,
    pub utility: UtilityPair,
    pub best_k: usize,
    pub trace: SgTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgResult {
    pub plan: CapacityPlan,
    pub solutions: Vec<HomeSolution>,
    pub utility: UtilityPair,
    /// Iteration at which the best plan was found (1 = the initial plan).
    pub best_k: usize,
    pub trace: SgTrace,
}

/// Sub-Greedient loop over any set of home controllers.
///
/// `subscribed` holds the contractual limits `L(h)`, which the aggregator
/// knows. The per-slot budget is `min(C(t), sum L)`, the amount the initial
/// plan distributes, and every iterate splits exactly that budget.
pub fn sg_loop<C: HomeController>(
    homes: &mut C,
    subscribed: &[f64],
    capacity: &[f64],
    config: &SgConfig,
) -> SgOutcome {
    assert!(config.k_max >= 1, "k_max must be at least 1");
    assert_eq!(homes.homes(), subscribed.len());
    let n = subscribed.len();
    let mut plan = round_robin(subscribed, capacity);
    let budget: Vec<f64> = (0..capacity.len()).map(|t| plan.slot_total(t)).collect();
    let smallest = subscribed.iter().copied().fold(f64::INFINITY, f64::min);
    let all: Vec<usize> = (0..n).collect();

    let mut trace = SgTrace::default();
    let mut best: Option<(UtilityPair, usize, CapacityPlan)> = None;
    for k in 1..=config.k_max {
        let reports: Vec<HomeReport> = (0..n).map(|h| homes.respond(h, plan.row(h))).collect();
        let home_utilities: Vec<UtilityPair> = reports.iter().map(|r| r.utility).collect();
        let total: UtilityPair = home_utilities.iter().sum();
        let improved = best.as_ref().is_none_or(|b| total > b.0);
        if improved {
            best = Some((total, k, plan.clone()));
        }
        let best_k = best.as_ref().unwrap().1;
        let greedients: Vec<Vec<f64>> = reports.into_iter().map(|r| r.greedients).collect();
        let step = step_size(config.step, k, &greedients);
        let alpha = step.filter(|_| greedients.iter().flatten().any(|g| *g > 0.0));
        let beta = match alpha {
            Some(a) => cap_updates(a, &greedients, smallest, capacity),
            None => Vec::new(),
        };
        let next = if alpha.is_some() && k < config.k_max {
            Some(projected(&plan, &all, &beta, &budget))
        } else {
            None
        };
        trace.iterates.push(SgIterate {
            k,
            alpha,
            beta,
            plan,
            home_utilities,
            total,
            improved,
            best_k,
        });
        match next {
            Some(p) => plan = p,
            None => break,
        }
    }
    let (utility, best_k, plan) = best.expect("at least one iteration runs");
    SgOutcome {
        plan,
        utility,
        best_k,
        trace,
    }
}

/// New plan after projecting `beta` (rows indexed like `members`) onto the
/// per-slot budgets of `members`; other homes are untouched.
fn projected(plan: &CapacityPlan, members: &[usize], beta: &[Vec<f64>], budget: &[f64]) -> CapacityPlan {
    let mut next = plan.clone();
    let mut current = vec![0.0; members.len()];
    let mut b = vec![0.0; members.len()];
    for t in 0..plan.horizon() {
        for (i, &h) in members.iter().enumerate() {
            current[i] = plan.get(h, t);
            b[i] = beta[i][t];
        }
        let column = project_allocation(&current, &b, budget[t]);
        for (i, &h) in members.iter().enumerate() {
            next.set(h, t, column[i]);
        }
    }
    next
}

/// Runs the Sub-Greedient loop on `scenario` with in-process homes.
pub fn sg_run(scenario: &Scenario, config: &SgConfig) -> SgResult {
    let subscribed: Vec<f64> = scenario.homes.iter().map(HomeSpec::subscribed_power).collect();
    let mut homes = LocalHomes::new(&scenario.homes, &scenario.env, config.solver, config.vital_weight);
    let out = sg_loop(&mut homes, &subscribed, &scenario.capacity, config);
    let solutions = (0..scenario.homes.len())
        .map(|h| homes.solution(h, out.plan.row(h)))
        .collect();
    SgResult {
        plan: out.plan,
        solutions,
        utility: out.utility,
        best_k: out.best_k,
        trace: out.trace,
    }
}

/// One Sub-Greedient step restricted to the homes with ids in `subset`.
///
/// The subset's budget at each slot is its current cumulated allocation and
/// `L_m` is the smallest subscribed power within the subset; the step is the
/// first-iteration step of `config`.
pub fn async_reallocate(
    scenario: &Scenario,
    subset: &[u32],
    plan: &CapacityPlan,
    config: &SgConfig,
) -> Result<CapacityPlan, AggregatorError> {
    if subset.len() < 2 {
        return Err(AggregatorError::SubsetTooSmall(subset.len()));
    }
    let (homes, slots) = (scenario.homes.len(), scenario.horizon());
    if plan.homes() != homes || plan.horizon() != slots {
        return Err(AggregatorError::PlanShape {
            got_homes: plan.homes(),
            got_slots: plan.horizon(),
            homes,
            slots,
        });
    }
    let mut members = Vec::with_capacity(subset.len());
    for id in subset {
        let h = scenario
            .homes
            .iter()
            .position(|home| home.id == *id)
            .ok_or(AggregatorError::UnknownHome(*id))?;
        if members.contains(&h) {
            return Err(AggregatorError::RepeatedHome(*id));
        }
        members.push(h);
    }

    let mut local = LocalHomes::new(&scenario.homes, &scenario.env, config.solver, config.vital_weight);
    let greedients: Vec<Vec<f64>> = members
        .iter()
        .map(|&h| local.respond(h, plan.row(h)).greedients)
        .collect();
    let Some(alpha) = step_size(config.step, 1, &greedients) else {
        return Ok(plan.clone());
    };
    let smallest = members
        .iter()
        .map(|&h| scenario.homes[h].subscribed_power())
        .fold(f64::INFINITY, f64::min);
    let budget: Vec<f64> = (0..slots)
        .map(|t| members.iter().map(|&h| plan.get(h, t)).sum())
        .collect();
    let beta = cap_updates(alpha, &greedients, smallest, &budget);
    Ok(projected(plan, &members, &beta, &budget))
}
