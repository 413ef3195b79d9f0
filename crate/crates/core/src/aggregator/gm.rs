//! Joint optimum on tiny instances.
//!
//! Every home's grid schedules are enumerated once into a table indexed by
//! the schedule's per-slot power profile (in grid units). A running maximum
//! along each axis turns it into "best utility with profile at most c". The
//! homes are then combined by enumerating how the grid units of each slot
//! are split.

use alloc::vec;
use alloc::vec::Vec;

use super::AggregatorError;
use crate::appliance::{heat_step, heat_utility, light_value, power_levels, wash_value};
use crate::home_solver::HomeSolution;
use crate::model::{CapacityPlan, HomeSchedule, HomeSpec, Scenario, UtilityPair};

/// Largest number of per-home schedules enumerated.
pub const GM_ENUMERATION_LIMIT: f64 = 1e8;
/// Largest profile table per home, and largest number of splits combined.
pub const GM_LATTICE_LIMIT: f64 = 4e6;

const MAX_HOMES: usize = 3;
const MAX_HORIZON: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct GmSolution {
    pub plan: CapacityPlan,
    pub solutions: Vec<HomeSolution>,
    pub utility: UtilityPair,
}

#[derive(Clone, Copy)]
struct Entry {
    value: UtilityPair,
    id: u64,
}

/// Per-slot power choices of one home.
struct Choices {
    heat: Vec<f64>,
    light: Vec<f64>,
    starts: Vec<Option<usize>>,
}

impl Choices {
    fn per_slot(&self) -> u64 {
        (self.heat.len() * self.light.len()) as u64
    }
}

struct Table {
    dims: Vec<usize>,
    strides: Vec<usize>,
    cells: Vec<Option<Entry>>,
}

impl Table {
    fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for t in 1..dims.len() {
            strides[t] = strides[t - 1] * dims[t - 1];
        }
        let size = dims.iter().product();
        Table {
            dims,
            strides,
            cells: vec![None; size],
        }
    }

    fn index(&self, units: &[usize]) -> usize {
        units.iter().zip(&self.strides).map(|(u, s)| u * s).sum()
    }

    fn offer(&mut self, at: usize, value: UtilityPair, id: u64) {
        if self.cells[at].is_none_or(|e| value > e.value) {
            self.cells[at] = Some(Entry { value, id });
        }
    }

    /// Turns "best with profile exactly c" into "best with profile <= c".
    fn close(&mut self) {
        for axis in 0..self.dims.len() {
            let stride = self.strides[axis];
            for i in 0..self.cells.len() {
                if (i / stride) % self.dims[axis] == 0 {
                    continue;
                }
                if let Some(lower) = self.cells[i - stride] {
                    self.offer(i, lower.value, lower.id);
                }
            }
        }
    }

    /// Units of cell `i` along each axis.
    fn units(&self, mut i: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|d| {
                let u = i % d;
                i /= d;
                u
            })
            .collect()
    }
}

fn units_of(watts: f64, grid: f64) -> usize {
    // tolerate representation error on values meant to be grid multiples
    libm::floor(watts / grid + 1e-9) as usize
}

fn check_grid(home: &HomeSpec, grid: f64) -> Result<(), AggregatorError> {
    let mut values = Vec::new();
    if let Some(l) = home.lighting {
        values.push(("lighting p_min", l.p_min));
        values.push(("lighting p_max", l.p_max));
    }
    if let Some(h) = home.heating {
        values.push(("heating p_min", h.p_min));
        values.push(("heating p_max", h.p_max));
    }
    if let Some(w) = home.washing {
        values.push(("washing power", w.power));
    }
    for (what, value) in values {
        let units = value / grid;
        if libm::fabs(units - libm::round(units)) > 1e-9 {
            return Err(AggregatorError::OffGrid {
                home: home.id,
                what,
                value,
                grid,
            });
        }
    }
    Ok(())
}

struct Enumerator<'a> {
    home: &'a HomeSpec,
    scenario: &'a Scenario,
    choices: &'a Choices,
    grid: f64,
    table: Table,
    wash_slots: Vec<bool>,
    units: Vec<usize>,
}

impl Enumerator<'_> {
    fn walk(&mut self, t: usize, temp: f64, light_sum: UtilityPair, heat_sum: UtilityPair, id: u64, wash: UtilityPair) {
        let horizon = self.units.len();
        if t == horizon {
            let at = self.table.index(&self.units);
            self.table.offer(at, light_sum + heat_sum + wash, id);
            return;
        }
        let env = &self.scenario.env;
        let u = env.max_utility_per_slot;
        let w = if self.wash_slots[t] {
            self.home.washing.map_or(0.0, |w| w.power)
        } else {
            0.0
        };
        let limit = self.table.dims[t] - 1;
        let n_light = self.choices.light.len();
        for (hi, &h) in self.choices.heat.iter().enumerate() {
            if units_of(h + w, self.grid) > limit {
                break;
            }
            let (next, hu) = match &self.home.heating {
                Some(hs) => {
                    let nt = heat_step(temp, h, env.exterior_temp[t], hs.f_coeff, hs.g_coeff);
                    (nt, heat_utility(nt, self.home, u))
                }
                None => (temp, UtilityPair::ZERO),
            };
            for (li, &l) in self.choices.light.iter().enumerate() {
                let units = units_of(l + h + w, self.grid);
                if units > limit {
                    break;
                }
                let lu = match &self.home.lighting {
                    Some(spec) => light_value(l, spec, u),
                    None => UtilityPair::ZERO,
                };
                self.units[t] = units;
                let choice = (hi * n_light + li) as u64;
                let id = id * self.choices.per_slot() + choice;
                self.walk(t + 1, next, light_sum + lu, heat_sum + hu, id, wash);
            }
        }
    }
}

/// Profile table of one home over per-slot unit limits `max_units`.
fn home_table(
    home: &HomeSpec,
    scenario: &Scenario,
    grid: f64,
    max_units: &[usize],
) -> Result<(Table, Choices), AggregatorError> {
    let horizon = scenario.horizon();
    let choices = Choices {
        heat: home
            .heating
            .map_or_else(|| vec![0.0], |h| power_levels(h.p_min, h.p_max, grid)),
        light: home
            .lighting
            .map_or_else(|| vec![0.0], |l| power_levels(l.p_min, l.p_max, grid)),
        starts: {
            let mut s = vec![None];
            if let Some((first, last)) = home.washing.and_then(|w| w.start_window(horizon)) {
                s.extend((first..=last).map(Some));
            }
            s
        },
    };
    let fitting = |t: usize| -> f64 {
        let limit = max_units[t] as f64 * grid;
        let pairs = choices
            .heat
            .iter()
            .map(|h| choices.light.iter().filter(|l| *h + **l <= limit).count())
            .sum::<usize>();
        pairs.max(1) as f64
    };
    let schedules = (0..horizon).map(fitting).product::<f64>() * choices.starts.len() as f64;
    if schedules > GM_ENUMERATION_LIMIT {
        return Err(AggregatorError::InstanceTooLarge {
            what: "schedules per home",
            size: schedules,
            limit: GM_ENUMERATION_LIMIT,
        });
    }
    let dims: Vec<usize> = max_units.iter().map(|m| m + 1).collect();
    let cells: f64 = dims.iter().map(|d| *d as f64).product();
    if cells > GM_LATTICE_LIMIT {
        return Err(AggregatorError::InstanceTooLarge {
            what: "profile table cells",
            size: cells,
            limit: GM_LATTICE_LIMIT,
        });
    }
    let mut e = Enumerator {
        home,
        scenario,
        choices: &choices,
        grid,
        table: Table::new(dims),
        wash_slots: vec![false; horizon],
        units: vec![0; horizon],
    };
    let u = scenario.env.max_utility_per_slot;
    for (si, start) in choices.starts.iter().enumerate() {
        e.wash_slots.iter_mut().for_each(|w| *w = false);
        let mut wash = UtilityPair::ZERO;
        if let (Some(s), Some(w)) = (start, home.washing) {
            if max_units[s - 1..s - 1 + w.duration]
                .iter()
                .any(|m| units_of(w.power, grid) > *m)
            {
                continue;
            }
            e.wash_slots[s - 1..s - 1 + w.duration].iter_mut().for_each(|x| *x = true);
            wash = wash_value(*s, &w, horizon, u);
        }
        e.walk(0, home.t_init, UtilityPair::ZERO, UtilityPair::ZERO, si as u64, wash);
    }
    let mut table = e.table;
    table.close();
    Ok((table, choices))
}

fn decode(home: &HomeSpec, choices: &Choices, mut id: u64, horizon: usize) -> HomeSchedule {
    let per_slot = choices.per_slot();
    let mut picks = vec![0u64; horizon];
    for t in (0..horizon).rev() {
        picks[t] = id % per_slot;
        id /= per_slot;
    }
    let start = choices.starts[id as usize];
    let n_light = choices.light.len() as u64;
    let mut s = HomeSchedule::all_off(horizon);
    for t in 0..horizon {
        let h = choices.heat[(picks[t] / n_light) as usize];
        let l = choices.light[(picks[t] % n_light) as usize];
        s.power[0][t] = l;
        s.active[0][t] = l > 0.0;
        s.power[1][t] = h;
        s.active[1][t] = h > 0.0;
    }
    if let (Some(st), Some(w)) = (start, home.washing) {
        for t in st - 1..st - 1 + w.duration {
            s.power[2][t] = w.power;
            s.active[2][t] = true;
        }
        s.wash_start = Some(st);
    }
    s
}

/// Exact lexicographic optimum of the joint problem over grid schedules:
/// every appliance power is a level of its `grid`-watt grid and the homes'
/// total power at each slot stays within `C(t)`.
pub fn gm_solve_tiny(scenario: &Scenario, grid: f64) -> Result<GmSolution, AggregatorError> {
    let horizon = scenario.horizon();
    let n = scenario.homes.len();
    if n > MAX_HOMES || horizon > MAX_HORIZON {
        return Err(AggregatorError::InstanceTooLarge {
            what: "homes x slots",
            size: (n * horizon) as f64,
            limit: (MAX_HOMES * MAX_HORIZON) as f64,
        });
    }
    let total: Vec<usize> = scenario.capacity.iter().map(|c| units_of(*c, grid)).collect();
    let mut tables = Vec::with_capacity(n);
    for home in &scenario.homes {
        check_grid(home, grid)?;
        let own = units_of(home.subscribed_power(), grid);
        let max_units: Vec<usize> = total.iter().map(|c| (*c).min(own)).collect();
        tables.push(home_table(home, scenario, grid, &max_units)?);
    }

    let clip = |units: &[usize], table: &Table| -> usize {
        let u: Vec<usize> = units.iter().zip(&table.dims).map(|(u, d)| (*u).min(d - 1)).collect();
        table.index(&u)
    };
    let sub = |a: &[usize], b: &[usize]| -> Option<Vec<usize>> {
        a.iter().zip(b).map(|(x, y)| x.checked_sub(*y)).collect()
    };
    // cell chosen for each home
    let mut best: Option<(UtilityPair, Vec<usize>)> = None;
    let mut offer = |value: UtilityPair, cells: Vec<usize>| {
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, cells));
        }
    };
    let value = |h: usize, cell: usize| tables[h].0.cells[cell].map(|e| e.value);
    match n {
        0 => offer(UtilityPair::ZERO, Vec::new()),
        1 => {
            let c = clip(&total, &tables[0].0);
            offer(value(0, c).unwrap(), vec![c]);
        }
        _ => {
            let first = &tables[0].0;
            let mut splits = first.cells.len() as f64;
            if n == 3 {
                splits *= tables[1].0.cells.len() as f64;
            }
            if splits > GM_LATTICE_LIMIT * 25.0 {
                return Err(AggregatorError::InstanceTooLarge {
                    what: "capacity splits",
                    size: splits,
                    limit: GM_LATTICE_LIMIT * 25.0,
                });
            }
            for c0 in 0..first.cells.len() {
                let u0 = first.units(c0);
                let Some(rest) = sub(&total, &u0) else { continue };
                let v0 = value(0, c0).unwrap();
                if n == 2 {
                    let c1 = clip(&rest, &tables[1].0);
                    offer(v0 + value(1, c1).unwrap(), vec![c0, c1]);
                } else {
                    for c1 in 0..tables[1].0.cells.len() {
                        let u1 = tables[1].0.units(c1);
                        let Some(rest2) = sub(&rest, &u1) else { continue };
                        let c2 = clip(&rest2, &tables[2].0);
                        offer(v0 + value(1, c1).unwrap() + value(2, c2).unwrap(), vec![c0, c1, c2]);
                    }
                }
            }
        }
    }
    let (utility, cells) = best.expect("the all-off split is always available");

    let mut plan = CapacityPlan::zeros(n, horizon);
    let mut solutions = Vec::with_capacity(n);
    for (h, home) in scenario.homes.iter().enumerate() {
        let (table, choices) = &tables[h];
        let units = table.units(cells[h]);
        for t in 0..horizon {
            let others: f64 = (0..h).map(|i| plan.get(i, t)).sum();
            let limit = if h + 1 == n {
                scenario.capacity[t] - others
            } else {
                units[t] as f64 * grid
            };
            plan.set(h, t, limit);
        }
        let id = table.cells[cells[h]].unwrap().id;
        let mut schedule = decode(home, choices, id, horizon);
        let eval = crate::appliance::evaluate_home(&schedule, home, &scenario.env)
            .expect("enumerated schedules respect appliance bounds");
        schedule.temperature = eval.temperature;
        schedule.utility = eval.utility;
        let residual = (0..horizon).map(|t| plan.get(h, t) - schedule.slot_power(t)).collect();
        solutions.push(HomeSolution {
            utility: eval.utility,
            schedule,
            residual,
        });
    }
    Ok(GmSolution {
        plan,
        solutions,
        utility,
    })
}
