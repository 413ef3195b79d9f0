//! The per-home subproblem: schedule one home's appliances under a per-slot
//! power limit so that its total utility is lexicographically maximal.
//!
//! [`solve_home`] is a forward dynamic program over slots whose state is the
//! washing-machine phase and the indoor temperature. Temperatures are kept
//! exactly along each path; states are merged per temperature cell of width
//! [`SolverOptions::temp_grid`] and pruned by dominance (a state with both a
//! lower accumulated utility and a lower temperature can never do better in
//! the remaining slots, because every utility is non-decreasing in
//! temperature).
//!
//! [`brute_force_home`] enumerates every grid-quantized schedule and is the
//! oracle the DP is checked against. [`greedient_home`] derives the per-slot
//! feedback that homes send to the aggregator.

mod brute;
mod dp;
mod greedient;

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{Environment, HomeSchedule, HomeSpec, UtilityPair};

pub use brute::brute_force_home;
pub use greedient::{greedient_home, Greedients, DEFAULT_VITAL_WEIGHT};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Width of the temperature cells used to merge DP states, °C.
    pub temp_grid: f64,
    /// Temperatures above this are merged into the top cell, °C.
    pub temp_ceiling: f64,
    /// Spacing of the extra "raise the temperature to this line" heating
    /// candidates, °C.
    pub heat_target_step: f64,
    /// Restricts every appliance to the power levels of a grid of this many
    /// watts (see [`crate::appliance::power_levels`]). `None` allows any
    /// power in the appliance's range.
    pub power_quantum: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            temp_grid: 0.25,
            temp_ceiling: 40.0,
            heat_target_step: 1.0,
            power_quantum: None,
        }
    }
}

impl SolverOptions {
    pub fn quantized(quantum: f64) -> Self {
        SolverOptions {
            power_quantum: Some(quantum),
            ..SolverOptions::default()
        }
    }

    /// Worst-case vital shortfall caused by merging temperature cells, for a
    /// home over `horizon` slots.
    pub fn vital_discretization_bound(&self, home: &HomeSpec, env: &Environment) -> f64 {
        env.horizon() as f64 * env.max_utility_per_slot * self.temp_grid
            / (home.t_min - home.heat_vital_floor)
    }
}

/// Optimal schedule of one home for a given per-slot limit.
#[derive(Clone, Debug, PartialEq)]
pub struct HomeSolution {
    pub schedule: HomeSchedule,
    pub utility: UtilityPair,
    /// Unused capacity per slot, `caps[t] - sum_a power[a][t] >= 0`.
    pub residual: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolverError {
    #[error("instance too large for exhaustive enumeration: {schedules} schedules (limit {limit})")]
    InstanceTooLarge { schedules: f64, limit: f64 },
    #[error("capacity vector has {got} slots, expected {expected}")]
    Horizon { got: usize, expected: usize },
}

/// Lexicographically optimal schedule of `home` under `caps` (W per slot).
///
/// Ties between equally good schedules are broken deterministically: among
/// states of equal utility the DP keeps the warmer one, and otherwise the
/// first generated, which prefers earlier wash starts and lower heating
/// power.
pub fn solve_home(
    home: &HomeSpec,
    caps: &[f64],
    env: &Environment,
    opts: &SolverOptions,
) -> HomeSolution {
    assert_eq!(caps.len(), env.horizon(), "capacity vector length");
    let schedule = dp::solve(home, caps, env, opts);
    finish(home, caps, env, schedule)
}

/// Utility reached with the full subscribed power in every slot; the
/// normalisation reference for relative utilities.
pub fn max_utility_baseline(home: &HomeSpec, env: &Environment, opts: &SolverOptions) -> UtilityPair {
    let caps = vec![home.subscribed_power(); env.horizon()];
    solve_home(home, &caps, env, opts).utility
}

/// Re-evaluates a finished schedule and computes residual capacity.
fn finish(home: &HomeSpec, caps: &[f64], env: &Environment, mut schedule: HomeSchedule) -> HomeSolution {
    let eval = crate::appliance::evaluate_home(&schedule, home, env)
        .expect("solver produced a schedule violating appliance bounds");
    schedule.temperature = eval.temperature;
    schedule.utility = eval.utility;
    let residual = caps
        .iter()
        .enumerate()
        .map(|(t, c)| c - schedule.slot_power(t))
        .collect();
    HomeSolution {
        utility: eval.utility,
        schedule,
        residual,
    }
}

/// Builds a schedule from per-slot decisions, trimming rounding so that the
/// slot total never exceeds the limit.
pub(crate) fn assemble(
    home: &HomeSpec,
    caps: &[f64],
    heat: &[f64],
    light: &[f64],
    wash_on: &[bool],
) -> HomeSchedule {
    let horizon = caps.len();
    let mut s = HomeSchedule::all_off(horizon);
    let wash_power = home.washing.map_or(0.0, |w| w.power);
    for t in 0..horizon {
        let w = if wash_on[t] { wash_power } else { 0.0 };
        let mut h = heat[t];
        let mut l = light[t];
        while l + h + w > caps[t] {
            let lp = home.lighting.map_or(0.0, |x| x.p_min);
            let hp = home.heating.map_or(0.0, |x| x.p_min);
            if l > 0.0 && l.next_down() >= lp {
                l = l.next_down();
            } else if h > 0.0 && h.next_down() >= hp {
                h = h.next_down();
            } else if l > 0.0 {
                l = 0.0;
            } else {
                h = 0.0;
            }
        }
        s.power[0][t] = l;
        s.active[0][t] = l > 0.0;
        s.power[1][t] = h;
        s.active[1][t] = h > 0.0;
        s.power[2][t] = w;
        s.active[2][t] = wash_on[t];
    }
    s.wash_start = wash_on.iter().position(|on| *on).map(|t| t + 1);
    s
}
