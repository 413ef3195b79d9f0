use alloc::vec;
use alloc::vec::Vec;

use super::{assemble, SolverOptions};
use crate::appliance::{heat_step, heat_utility, light_value, power_levels, wash_value};
use crate::model::{Environment, HomeSchedule, HomeSpec, Lighting, UtilityPair};

#[derive(Clone, Copy)]
struct Node {
    parent: u32,
    heat: f64,
    light: f64,
    wash_on: bool,
}

#[derive(Clone, Copy)]
struct State {
    value: UtilityPair,
    temp: f64,
    node: u32,
}

#[derive(Clone, Copy)]
struct Pending {
    value: UtilityPair,
    temp: f64,
    parent: u32,
    heat: f64,
    light: f64,
    wash_on: bool,
}

/// Power a light takes from a remainder `avail`.
#[derive(Clone)]
enum LightRule {
    None,
    Continuous(Lighting),
    Levels(Lighting, Vec<f64>),
}

impl LightRule {
    #[inline]
    fn take(&self, avail: f64) -> f64 {
        match self {
            LightRule::None => 0.0,
            LightRule::Continuous(l) => {
                if avail >= l.p_min {
                    avail.min(l.p_max)
                } else {
                    0.0
                }
            }
            LightRule::Levels(_, levels) => {
                // levels are ascending and start with 0
                let idx = levels.partition_point(|p| *p <= avail);
                levels[idx.saturating_sub(1)]
            }
        }
    }
}

struct Cells {
    lo: f64,
    width: f64,
    count: usize,
}

impl Cells {
    #[inline]
    fn index(&self, temp: f64) -> usize {
        let x = (temp - self.lo) / self.width;
        if x <= 0.0 {
            0
        } else {
            (libm::floor(x) as usize).min(self.count - 1)
        }
    }
}

pub(super) fn solve(
    home: &HomeSpec,
    caps: &[f64],
    env: &Environment,
    opts: &SolverOptions,
) -> HomeSchedule {
    let horizon = caps.len();
    let u = env.max_utility_per_slot;

    let light_rule = match (home.lighting, opts.power_quantum) {
        (None, _) => LightRule::None,
        (Some(l), None) => LightRule::Continuous(l),
        (Some(l), Some(q)) => LightRule::Levels(l, power_levels(l.p_min, l.p_max, q)),
    };
    let heat_levels: Option<Vec<f64>> = match (home.heating, opts.power_quantum) {
        (Some(h), Some(q)) => Some(power_levels(h.p_min, h.p_max, q)),
        _ => None,
    };

    // Washing phases: 0 = not started, k = k slots done, d = finished.
    let (duration, wash_power) = home.washing.map_or((0, 0.0), |w| (w.duration, w.power));
    let phases = if home.washing.is_some() { duration + 1 } else { 1 };
    let mut start_ok = vec![false; horizon];
    if let Some(w) = home.washing {
        if let Some((first, last)) = w.start_window(horizon) {
            for s in first..=last {
                start_ok[s - 1] = caps[s - 1..s - 1 + duration].iter().all(|c| *c >= wash_power);
            }
        }
    }

    let t_lo = env
        .exterior_temp
        .iter()
        .copied()
        .fold(home.t_init, f64::min)
        - 1.0;
    let t_hi = opts.temp_ceiling.max(home.t_init + 1.0);
    let cells = Cells {
        lo: t_lo,
        width: opts.temp_grid,
        count: (libm::ceil((t_hi - t_lo) / opts.temp_grid) as usize).max(1) + 1,
    };

    let mut nodes: Vec<Node> = vec![Node {
        parent: u32::MAX,
        heat: 0.0,
        light: 0.0,
        wash_on: false,
    }];
    let mut frontier: Vec<Vec<State>> = vec![Vec::new(); phases];
    frontier[0].push(State {
        value: UtilityPair::ZERO,
        temp: home.t_init,
        node: 0,
    });
    let mut buckets: Vec<Option<Pending>> = vec![None; phases * cells.count];
    let mut heat_cands: Vec<f64> = Vec::with_capacity(32);

    for t in 0..horizon {
        let t_ext = env.exterior_temp[t];
        let slot = t + 1;
        for phase in 0..phases {
            for st in &frontier[phase] {
                // (wash on this slot, next phase, utility gained by starting)
                let mut options: [(bool, usize, UtilityPair); 2] =
                    [(false, 0, UtilityPair::ZERO); 2];
                let mut n_opt = 0;
                if phase == 0 {
                    options[n_opt] = (false, 0, UtilityPair::ZERO);
                    n_opt += 1;
                    if start_ok[t] {
                        let w = home.washing.as_ref().unwrap();
                        options[n_opt] = (true, 1, wash_value(slot, w, horizon, u));
                        n_opt += 1;
                    }
                } else if phase < duration {
                    options[n_opt] = (true, phase + 1, UtilityPair::ZERO);
                    n_opt += 1;
                } else {
                    options[n_opt] = (false, phase, UtilityPair::ZERO);
                    n_opt += 1;
                }
                for &(wash_on, next_phase, wash_gain) in &options[..n_opt] {
                    let avail = caps[t] - if wash_on { wash_power } else { 0.0 };
                    if avail < 0.0 {
                        continue;
                    }
                    heat_candidates(
                        &mut heat_cands,
                        home,
                        &light_rule,
                        heat_levels.as_deref(),
                        opts,
                        avail,
                        st.temp,
                        t_ext,
                    );
                    let base = st.value + wash_gain;
                    for &h in &heat_cands {
                        let light = light_rule.take(avail - h);
                        let (temp, heat_u) = match home.heating {
                            Some(hs) => {
                                let temp = heat_step(st.temp, h, t_ext, hs.f_coeff, hs.g_coeff);
                                (temp, heat_utility(temp, home, u))
                            }
                            None => (st.temp, UtilityPair::ZERO),
                        };
                        let light_u = match &light_rule {
                            LightRule::None => UtilityPair::ZERO,
                            LightRule::Continuous(l) | LightRule::Levels(l, _) => {
                                light_value(light, l, u)
                            }
                        };
                        let value = base + light_u + heat_u;
                        let slot_idx = next_phase * cells.count + cells.index(temp);
                        let replace = match &buckets[slot_idx] {
                            None => true,
                            Some(old) => {
                                value > old.value || (value == old.value && temp > old.temp)
                            }
                        };
                        if replace {
                            buckets[slot_idx] = Some(Pending {
                                value,
                                temp,
                                parent: st.node,
                                heat: h,
                                light,
                                wash_on,
                            });
                        }
                    }
                }
            }
        }
        // Keep, per phase, the states not dominated by a warmer one.
        for (phase, states) in frontier.iter_mut().enumerate() {
            states.clear();
            let mut best: Option<UtilityPair> = None;
            for cell in (0..cells.count).rev() {
                if let Some(p) = buckets[phase * cells.count + cell].take() {
                    if best.is_none_or(|b| p.value > b) {
                        best = Some(p.value);
                        nodes.push(Node {
                            parent: p.parent,
                            heat: p.heat,
                            light: p.light,
                            wash_on: p.wash_on,
                        });
                        states.push(State {
                            value: p.value,
                            temp: p.temp,
                            node: (nodes.len() - 1) as u32,
                        });
                    }
                }
            }
        }
    }

    // A run still in progress at the horizon is not a valid end state.
    let mut end: Option<State> = None;
    for phase in [0, phases - 1] {
        for st in &frontier[phase] {
            if end.is_none_or(|e| st.value > e.value) {
                end = Some(*st);
            }
        }
    }
    let end = end.expect("the all-off schedule is always reachable");

    let mut heat = vec![0.0; horizon];
    let mut light = vec![0.0; horizon];
    let mut wash_on = vec![false; horizon];
    let mut node = end.node;
    for t in (0..horizon).rev() {
        let n = nodes[node as usize];
        heat[t] = n.heat;
        light[t] = n.light;
        wash_on[t] = n.wash_on;
        node = n.parent;
    }
    assemble(home, caps, &heat, &light, &wash_on)
}

#[allow(clippy::too_many_arguments)]
fn heat_candidates(
    out: &mut Vec<f64>,
    home: &HomeSpec,
    light: &LightRule,
    levels: Option<&[f64]>,
    opts: &SolverOptions,
    avail: f64,
    temp: f64,
    t_ext: f64,
) {
    out.clear();
    out.push(0.0);
    let Some(hs) = home.heating else {
        return;
    };
    let h_max = hs.p_max.min(avail);
    if h_max < hs.p_min {
        return;
    }
    if let Some(levels) = levels {
        out.extend(levels.iter().copied().filter(|p| *p > 0.0 && *p <= avail));
        return;
    }
    out.push(hs.p_min);
    out.push(h_max);
    let mut push = |h: f64| {
        if h > hs.p_min && h < h_max {
            out.push(h);
        }
    };
    // light breakpoints: keep light at full power, or at its minimum
    match light {
        LightRule::Continuous(l) | LightRule::Levels(l, _) => {
            push(avail - l.p_max);
            push(avail - l.p_min);
        }
        LightRule::None => {}
    }
    // heat needed to land exactly on a utility breakpoint or a target line
    let passive = temp + hs.g_coeff * (t_ext - temp);
    let reach = |target: f64| (target - passive) / hs.f_coeff;
    push(reach(home.t_min));
    push(reach(home.t_pref));
    if opts.heat_target_step > 0.0 {
        let lo = passive + hs.f_coeff * hs.p_min;
        let hi = passive + hs.f_coeff * h_max;
        let mut line = libm::ceil(lo / opts.heat_target_step) * opts.heat_target_step;
        while line < hi {
            push(reach(line));
            line += opts.heat_target_step;
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
}
