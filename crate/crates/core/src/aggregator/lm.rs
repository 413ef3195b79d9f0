use alloc::vec::Vec;

use crate::model::{CapacityPlan, HomeSpec, Scenario};

/// `C_ht = L(h) C(t) / sum_i L(i)`.
pub fn lm_allocate(scenario: &Scenario) -> CapacityPlan {
    let subscribed: Vec<f64> = scenario.homes.iter().map(HomeSpec::subscribed_power).collect();
    proportional(&subscribed, &scenario.capacity)
}

pub(crate) fn proportional(subscribed: &[f64], capacity: &[f64]) -> CapacityPlan {
    let total: f64 = subscribed.iter().sum();
    let mut plan = CapacityPlan::zeros(subscribed.len(), capacity.len());
    if !(total > 0.0) {
        return plan;
    }
    for (t, &c) in capacity.iter().enumerate() {
        let mut column: Vec<f64> = subscribed.iter().map(|l| l * c / total).collect();
        // rounding must never push the slot over its capacity
        let sum: f64 = column.iter().sum();
        if sum > c {
            let i = super::projection::largest(&column);
            column[i] -= sum - c;
        }
        plan.set_column(t, &column);
    }
    plan
}

/// Sequential fill in cyclic order: at each slot homes are served, starting
/// from a rotating offset, with `min(L(h), remaining)` until the slot's
/// capacity runs out. The next slot starts right after the last home served.
pub fn round_robin_init(scenario: &Scenario) -> CapacityPlan {
    let subscribed: Vec<f64> = scenario.homes.iter().map(HomeSpec::subscribed_power).collect();
    round_robin(&subscribed, &scenario.capacity)
}

pub(crate) fn round_robin(subscribed: &[f64], capacity: &[f64]) -> CapacityPlan {
    let homes = subscribed.len();
    let mut plan = CapacityPlan::zeros(homes, capacity.len());
    if homes == 0 {
        return plan;
    }
    let mut offset = 0;
    for (t, &c) in capacity.iter().enumerate() {
        let mut remaining = c;
        let mut served = 0;
        for i in 0..homes {
            if remaining <= 0.0 {
                break;
            }
            let h = (offset + i) % homes;
            let grant = subscribed[h].min(remaining);
            plan.set(h, t, grant);
            remaining -= grant;
            if grant > 0.0 {
                served = i + 1;
            }
        }
        offset = (offset + served) % homes;
    }
    plan
}
