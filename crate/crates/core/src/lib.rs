//! Capacity-constrained demand response over modelled smart homes.
//!
//! An aggregator splits a per-slot power capacity `C(t)` between homes; each
//! home schedules its lighting, heating and washing machine under its share
//! so as to maximise a lexicographic (vital, comfort) utility. Three
//! allocation schemes are provided in [`aggregator`]:
//!
//! * `GM`, the joint optimum, by exhaustive search on tiny instances;
//! * `LM`, a static split proportional to each home's subscribed power;
//! * `SG`, the Sub-Greedient loop, where homes report only their total
//!   utility and a per-slot *greedient* (best utility gain per extra watt)
//!   and the aggregator moves capacity toward the homes that report the
//!   largest gains while staying feasible at every iterate.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command
//! line live in the `dr-harness` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod aggregator;
pub mod appliance;
pub mod home_solver;
pub mod metrics;
pub mod model;
pub mod reference;

pub use aggregator::{
    async_reallocate, gm_solve_tiny, lm_allocate, project_allocation, round_robin_init, sg_run,
    SgConfig, SgTrace, StepRule,
};
pub use appliance::{evaluate_home, heat_step, heat_utility, light_utility, wash_utility};
pub use home_solver::{
    brute_force_home, greedient_home, max_utility_baseline, solve_home, Greedients, HomeSolution,
    SolverOptions,
};
pub use model::{
    utility_add, utility_cmp, ApplianceClass, ApplianceSpec, CapacityPlan, Environment, Heating,
    HomeSchedule, HomeSpec, Lighting, ModelError, Scenario, UtilityPair, Washing,
};
