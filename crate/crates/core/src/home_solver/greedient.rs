use alloc::vec;
use alloc::vec::Vec;

use super::HomeSolution;
use crate::appliance::{heat_step, heat_utility, light_value, wash_value};
use crate::model::{ApplianceClass, Environment, HomeSpec, UtilityPair};

/// Weight of one unit of vital utility against one unit of comfort when a
/// utility gain is turned into a scalar.
pub const DEFAULT_VITAL_WEIGHT: f64 = 1000.0;

/// Per-slot greedients of one home.
#[derive(Clone, Debug, PartialEq)]
pub struct Greedients {
    /// `g_ht`: the best scalarised gain per extra watt at each slot.
    pub per_slot: Vec<f64>,
    /// `g_ht^a` per appliance class, indexed by [`ApplianceClass::index`].
    pub per_appliance: Vec<[f64; 3]>,
    /// Extra capacity at which `per_slot` is attained (0 where it is 0).
    /// Stays inside the home: only `per_slot` is reported upstream.
    pub increment: Vec<f64>,
}

impl Greedients {
    pub fn is_zero(&self) -> bool {
        self.per_slot.iter().all(|g| *g == 0.0)
    }
}

struct Best {
    ratio: f64,
    increment: f64,
}

impl Best {
    fn offer(&mut self, gain: UtilityPair, increment: f64, weight: f64) {
        if !(increment > 0.0) {
            return;
        }
        let scalar = gain.scalarize(weight);
        if scalar > 0.0 {
            let ratio = scalar / increment.max(1.0);
            if ratio > self.ratio {
                self.ratio = ratio;
                self.increment = increment;
            }
        }
    }
}

/// Greedients of `solution`, the optimal schedule of `home` under `caps`.
///
/// For each slot and appliance a few extra-capacity candidates are tried,
/// located at the breakpoints of the appliance's utility shape. The
/// appliance gets its current power plus the slot's unused capacity plus the
/// increment, everything else is left unchanged, and the gain per watt is
/// recorded. A washing run may also draw on unused capacity at the other
/// slots of its run, and on lighting power above the lighting minimum
/// there (a comfort-only sacrifice).
pub fn greedient_home(
    solution: &HomeSolution,
    home: &HomeSpec,
    caps: &[f64],
    env: &Environment,
    vital_weight: f64,
) -> Greedients {
    let horizon = caps.len();
    let s = &solution.schedule;
    let residual: Vec<f64> = solution.residual.iter().map(|r| r.max(0.0)).collect();
    let u = env.max_utility_per_slot;
    let light_p = s.power_of(ApplianceClass::Lighting);
    let heat_p = s.power_of(ApplianceClass::Heating);

    let mut per_slot = vec![0.0; horizon];
    let mut per_appliance = vec![[0.0; 3]; horizon];
    let mut increment = vec![0.0; horizon];
    let mut wash_best: Vec<Best> = (0..horizon)
        .map(|_| Best {
            ratio: 0.0,
            increment: 0.0,
        })
        .collect();
    if home.washing.is_some() {
        washing_candidates(solution, home, env, &residual, vital_weight, &mut wash_best);
    }

    for t in 0..horizon {
        let mut light = Best {
            ratio: 0.0,
            increment: 0.0,
        };
        if let Some(l) = &home.lighting {
            let have = light_p[t] + residual[t];
            let now = light_value(light_p[t], l, u);
            for target in [l.p_min, l.p_max] {
                light.offer(light_value(target, l, u) - now, target - have, vital_weight);
            }
        }

        let mut heat = Best {
            ratio: 0.0,
            increment: 0.0,
        };
        if let Some(hs) = &home.heating {
            let have = heat_p[t] + residual[t];
            let temp = s.temperature[t];
            let mut targets = [hs.p_min, hs.p_max, f64::NAN];
            let next_bp = [home.heat_vital_floor, home.t_min, home.t_pref]
                .into_iter()
                .find(|bp| *bp > temp);
            if let Some(bp) = next_bp {
                // temperature at t is affine in the power at t with slope f
                let needed = heat_p[t] + (bp - temp) / hs.f_coeff;
                if needed >= hs.p_min && needed <= hs.p_max {
                    targets[2] = needed;
                }
            }
            for target in targets {
                if target.is_nan() || target <= have {
                    continue;
                }
                let gain = heat_gain(home, env, heat_p, &s.temperature, t, target);
                heat.offer(gain, target - have, vital_weight);
            }
        }

        let wash = &wash_best[t];
        let by_class = [
            (light.ratio, light.increment),
            (heat.ratio, heat.increment),
            (wash.ratio, wash.increment),
        ];
        for (i, (ratio, inc)) in by_class.into_iter().enumerate() {
            per_appliance[t][i] = ratio;
            if ratio > per_slot[t] {
                per_slot[t] = ratio;
                increment[t] = inc;
            }
        }
    }

    Greedients {
        per_slot,
        per_appliance,
        increment,
    }
}

/// Change of total heating utility when the heating power at slot `t`
/// becomes `power`, every other slot unchanged.
fn heat_gain(
    home: &HomeSpec,
    env: &Environment,
    heat_p: &[f64],
    temps: &[f64],
    t: usize,
    power: f64,
) -> UtilityPair {
    let hs = home.heating.as_ref().unwrap();
    let u = env.max_utility_per_slot;
    let mut prev = if t == 0 { home.t_init } else { temps[t - 1] };
    let mut before = UtilityPair::ZERO;
    let mut after = UtilityPair::ZERO;
    for (k, &old) in temps.iter().enumerate().skip(t) {
        let p = if k == t { power } else { heat_p[k] };
        prev = heat_step(prev, p, env.exterior_temp[k], hs.f_coeff, hs.g_coeff);
        before += heat_utility(old, home, u);
        after += heat_utility(prev, home, u);
    }
    after - before
}

fn washing_candidates(
    solution: &HomeSolution,
    home: &HomeSpec,
    env: &Environment,
    residual: &[f64],
    vital_weight: f64,
    best: &mut [Best],
) {
    let w = home.washing.unwrap();
    let horizon = residual.len();
    let Some((first, last)) = w.start_window(horizon) else {
        return;
    };
    let s = &solution.schedule;
    let u = env.max_utility_per_slot;
    let light_p = s.power_of(ApplianceClass::Lighting);
    let own = s.power_of(ApplianceClass::Washing);
    let l_min = home.lighting.map_or(0.0, |l| l.p_min);
    // power usable by the run without touching other appliances
    let free: Vec<f64> = (0..horizon).map(|t| residual[t] + own[t]).collect();
    // plus lighting power above its minimum
    let reclaim: Vec<f64> = (0..horizon)
        .map(|t| if light_p[t] > l_min { light_p[t] - l_min } else { 0.0 })
        .collect();
    let current = s
        .wash_start
        .map_or(UtilityPair::ZERO, |st| wash_value(st, &w, horizon, u));
    let last_start = s.wash_start.map_or(last, |st| st.saturating_sub(1).min(last));

    let light_loss = |t: usize, cut: f64| -> UtilityPair {
        match (&home.lighting, cut > 0.0) {
            (Some(l), true) => {
                light_value(light_p[t], l, u) - light_value(light_p[t] - cut.min(reclaim[t]), l, u)
            }
            _ => UtilityPair::ZERO,
        }
    };

    for start in first..=last_start {
        let block = start - 1..start - 1 + w.duration;
        let short: Vec<usize> = block
            .clone()
            .filter(|&t| free[t] + reclaim[t] < w.power)
            .collect();
        let gain_run = wash_value(start, &w, horizon, u) - current;
        // light cuts at the run's slots when slot `at` receives `extra` watts
        let total_loss = |at: usize, extra: f64| -> UtilityPair {
            block
                .clone()
                .map(|t| {
                    let bonus = if t == at { extra } else { 0.0 };
                    light_loss(t, w.power - free[t] - bonus)
                })
                .sum()
        };
        let mut offer = |at: usize, extra: f64| {
            let gain = gain_run - total_loss(at, extra);
            best[at].offer(gain, extra, vital_weight);
        };
        match short.as_slice() {
            [t] => {
                let t = *t;
                offer(t, w.power - free[t] - reclaim[t]);
                offer(t, w.power - free[t]);
            }
            [] => {
                for t in block.clone() {
                    if free[t] < w.power {
                        offer(t, w.power - free[t]);
                    }
                }
            }
            _ => {}
        }
    }
}
