//! Capacity allocation between homes.
//!
//! * [`lm_allocate`]: static split proportional to subscribed power.
//! * [`sg_run`]: the Sub-Greedient loop. Homes sit behind a
//!   [`HomeController`] and only ever report their utility and per-slot
//!   greedients; the aggregator moves capacity with a capped step and a
//!   per-slot projection that keeps every iterate feasible.
//! * [`gm_solve_tiny`]: the joint optimum by exhaustive search, usable as an
//!   oracle on very small instances.

mod gm;
mod lm;
mod projection;
mod sg;
mod step;

use thiserror::Error;

pub use gm::{gm_solve_tiny, GmSolution, GM_ENUMERATION_LIMIT, GM_LATTICE_LIMIT};
pub use lm::{lm_allocate, round_robin_init};
pub use projection::project_allocation;
pub use sg::{
    async_reallocate, sg_loop, sg_run, HomeController, HomeReport, LocalHomes, SgConfig, SgIterate,
    SgOutcome, SgResult, SgTrace,
};
pub use step::{cap_updates, step_size, StepRule};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum AggregatorError {
    #[error("a local reallocation needs at least two homes, got {0}")]
    SubsetTooSmall(usize),
    #[error("no home with id {0}")]
    UnknownHome(u32),
    #[error("home id {0} listed twice")]
    RepeatedHome(u32),
    #[error("plan is {got_homes}x{got_slots}, expected {homes}x{slots}")]
    PlanShape {
        got_homes: usize,
        got_slots: usize,
        homes: usize,
        slots: usize,
    },
    #[error("instance too large for exhaustive search: {what} = {size} (limit {limit})")]
    InstanceTooLarge {
        what: &'static str,
        size: f64,
        limit: f64,
    },
    #[error("home {home}: {what} = {value} W is not a multiple of the {grid} W grid")]
    OffGrid {
        home: u32,
        what: &'static str,
        value: f64,
        grid: f64,
    },
}

#[cfg(test)]
mod tests;
