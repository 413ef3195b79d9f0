use alloc::vec;
use alloc::vec::Vec;

use super::{assemble, finish, HomeSolution, SolverError};
use crate::appliance::{heat_step, heat_utility, light_value, power_levels, wash_value};
use crate::model::{Environment, HomeSpec, UtilityPair};

/// Largest number of (heating sequence, wash start) combinations enumerated.
pub const ENUMERATION_LIMIT: f64 = 1e8;

struct Search<'a> {
    home: &'a HomeSpec,
    caps: &'a [f64],
    env: &'a Environment,
    heat_levels: Vec<f64>,
    light_levels: Vec<f64>,
    wash_power: f64,
    wash_value: UtilityPair,
    wash_slots: Vec<bool>,
    heat: Vec<f64>,
    light: Vec<f64>,
    best: Option<(UtilityPair, Vec<f64>, Vec<f64>, Vec<bool>)>,
}

impl Search<'_> {
    /// Best lighting utility and power for one slot given the power left.
    fn best_light(&self, avail: f64) -> (UtilityPair, f64) {
        let u = self.env.max_utility_per_slot;
        let mut best = (UtilityPair::ZERO, 0.0);
        if let Some(l) = &self.home.lighting {
            for &p in &self.light_levels {
                if p <= avail {
                    let v = light_value(p, l, u);
                    if v > best.0 {
                        best = (v, p);
                    }
                }
            }
        }
        best
    }

    fn walk(&mut self, t: usize, temp: f64, light_sum: UtilityPair, heat_sum: UtilityPair) {
        let horizon = self.caps.len();
        if t == horizon {
            let value = light_sum + heat_sum + self.wash_value;
            if self.best.as_ref().is_none_or(|b| value > b.0) {
                self.best = Some((value, self.heat.clone(), self.light.clone(), self.wash_slots.clone()));
            }
            return;
        }
        let u = self.env.max_utility_per_slot;
        let wash = if self.wash_slots[t] { self.wash_power } else { 0.0 };
        for i in 0..self.heat_levels.len() {
            let h = self.heat_levels[i];
            if h + wash > self.caps[t] {
                continue;
            }
            let (lu, lp) = self.best_light(self.caps[t] - wash - h);
            // the light level must also fit when summed in schedule order
            let (lu, lp) = if lp + h + wash <= self.caps[t] {
                (lu, lp)
            } else {
                (UtilityPair::ZERO, 0.0)
            };
            let (next_temp, hu) = match &self.home.heating {
                Some(hs) => {
                    let nt = heat_step(temp, h, self.env.exterior_temp[t], hs.f_coeff, hs.g_coeff);
                    (nt, heat_utility(nt, self.home, u))
                }
                None => (temp, UtilityPair::ZERO),
            };
            self.heat[t] = h;
            self.light[t] = lp;
            self.walk(t + 1, next_temp, light_sum + lu, heat_sum + hu);
        }
    }
}

/// Exhaustive search over every schedule whose powers lie on the
/// `quantum`-watt grid of each appliance. Lighting is chosen per slot
/// (its utility only depends on its own slot); heating sequences and wash
/// starts are enumerated in full.
pub fn brute_force_home(
    home: &HomeSpec,
    caps: &[f64],
    env: &Environment,
    quantum: f64,
) -> Result<HomeSolution, SolverError> {
    let horizon = env.horizon();
    if caps.len() != horizon {
        return Err(SolverError::Horizon {
            got: caps.len(),
            expected: horizon,
        });
    }
    let heat_levels = home
        .heating
        .map_or_else(|| vec![0.0], |h| power_levels(h.p_min, h.p_max, quantum));
    let light_levels = home
        .lighting
        .map_or_else(|| vec![0.0], |l| power_levels(l.p_min, l.p_max, quantum));

    let mut starts: Vec<Option<usize>> = vec![None];
    if let Some(w) = home.washing {
        if let Some((first, last)) = w.start_window(horizon) {
            starts.extend(
                (first..=last)
                    .filter(|s| caps[s - 1..s - 1 + w.duration].iter().all(|c| *c >= w.power))
                    .map(Some),
            );
        }
    }

    let sequences: f64 = caps
        .iter()
        .map(|c| heat_levels.iter().filter(|h| **h <= *c).count() as f64)
        .product();
    let schedules = sequences * starts.len() as f64;
    if schedules > ENUMERATION_LIMIT {
        return Err(SolverError::InstanceTooLarge {
            schedules,
            limit: ENUMERATION_LIMIT,
        });
    }

    let mut search = Search {
        home,
        caps,
        env,
        heat_levels,
        light_levels,
        wash_power: home.washing.map_or(0.0, |w| w.power),
        wash_value: UtilityPair::ZERO,
        wash_slots: vec![false; horizon],
        heat: vec![0.0; horizon],
        light: vec![0.0; horizon],
        best: None,
    };
    for start in starts {
        search.wash_slots.iter_mut().for_each(|w| *w = false);
        search.wash_value = UtilityPair::ZERO;
        if let (Some(s), Some(w)) = (start, home.washing) {
            for t in s - 1..s - 1 + w.duration {
                search.wash_slots[t] = true;
            }
            search.wash_value = wash_value(s, &w, horizon, env.max_utility_per_slot);
        }
        search.walk(0, home.t_init, UtilityPair::ZERO, UtilityPair::ZERO);
    }
    let (_, heat, light, wash_on) = search.best.expect("the all-off schedule is always feasible");
    let schedule = assemble(home, caps, &heat, &light, &wash_on);
    Ok(finish(home, caps, env, schedule))
}
