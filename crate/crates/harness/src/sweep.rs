//! Capacity sweeps and their CSV form.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use dr_core::aggregator::{gm_solve_tiny, lm_allocate, sg_run, AggregatorError, SgConfig, SgTrace, StepRule};
use dr_core::metrics::{baselines, relative_utility, ClassUtility, MetricsError};
use dr_core::{solve_home, CapacityPlan, Scenario, SolverOptions, UtilityPair};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: [&str; 7] = [
    "capacity",
    "scheme",
    "class",
    "rel_vital",
    "rel_comfort",
    "iters_to_best",
    "wall_s",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Gm,
    Lm,
    Sg1,
    Sg2,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Gm, Scheme::Lm, Scheme::Sg1, Scheme::Sg2];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gm => "gm",
            Scheme::Lm => "lm",
            Scheme::Sg1 => "sg1",
            Scheme::Sg2 => "sg2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scheme `{s}` (expected gm, lm, sg1 or sg2)"))
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Aggregator(#[from] AggregatorError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Everything a sweep needs besides the scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub sg1: SgConfig,
    pub sg2: SgConfig,
    /// Home solver used by LM and for the normalising baselines.
    pub solver: SolverOptions,
    pub gm_grid: f64,
    /// Record wall-clock seconds; otherwise `wall_s` is 0 so that repeated
    /// runs write identical files.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sg1: SgConfig::sg1(),
            sg2: SgConfig::sg2(),
            solver: SolverOptions::default(),
            gm_grid: 50.0,
            timing: false,
        }
    }
}

impl SweepConfig {
    /// Same iteration budget, step constants, greedient weight and home
    /// solver for both SG variants.
    pub fn with_sg(k_max: usize, a1: f64, a2: f64, vital_weight: f64, solver: SolverOptions) -> Self {
        let sg1 = SgConfig {
            k_max,
            step: StepRule::Diminishing(a1),
            vital_weight,
            solver,
        };
        SweepConfig {
            sg1,
            sg2: SgConfig {
                step: StepRule::ConstantLength(a2),
                ..sg1
            },
            solver,
            ..SweepConfig::default()
        }
    }

    fn sg(&self, scheme: Scheme) -> Option<&SgConfig> {
        match scheme {
            Scheme::Sg1 => Some(&self.sg1),
            Scheme::Sg2 => Some(&self.sg2),
            _ => None,
        }
    }
}

/// One scheme at one capacity.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub scheme: Scheme,
    /// Constant total capacity of every slot, W.
    pub capacity: f64,
    pub total: UtilityPair,
    pub home_utilities: Vec<UtilityPair>,
    /// Iteration of the best SG iterate; 0 for the one-shot schemes.
    pub iters_to_best: usize,
    pub wall_s: f64,
    pub classes: Vec<ClassUtility>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    /// Sorted by scheme, then capacity.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn point(&self, scheme: Scheme, capacity: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.scheme == scheme && p.capacity == capacity)
    }

    pub fn of(&self, scheme: Scheme) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(move |p| p.scheme == scheme)
    }

    pub fn rows(&self) -> Vec<SweepRow> {
        self.points
            .iter()
            .flat_map(|p| {
                p.classes.iter().map(move |c| SweepRow {
                    capacity: round6(p.capacity),
                    scheme: p.scheme,
                    class: c.class.clone(),
                    rel_vital: round6(c.relative_vital),
                    rel_comfort: round6(c.relative_comfort),
                    iters_to_best: p.iters_to_best,
                    wall_s: round6(p.wall_s),
                })
            })
            .collect()
    }
}

/// One CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub capacity: f64,
    pub scheme: Scheme,
    pub class: String,
    pub rel_vital: f64,
    pub rel_comfort: f64,
    pub iters_to_best: usize,
    pub wall_s: f64,
}

/// `x` rounded to six significant digits.
pub fn round6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Per-home utilities under a fixed plan, solving each distinct
/// (parameters, limits) pair once.
pub fn plan_utilities(scenario: &Scenario, plan: &CapacityPlan, opts: &SolverOptions) -> Vec<UtilityPair> {
    let homes = &scenario.homes;
    let mut memo: HashMap<(usize, Vec<u64>), UtilityPair> = HashMap::new();
    (0..homes.len())
        .map(|h| {
            let kind = (0..=h).find(|&i| homes[i].same_parameters(&homes[h])).unwrap();
            let key = (kind, plan.row(h).iter().map(|c| c.to_bits()).collect());
            *memo
                .entry(key)
                .or_insert_with(|| solve_home(&homes[h], plan.row(h), &scenario.env, opts).utility)
        })
        .collect()
}

/// Runs every scheme at every constant capacity, in that order.
///
/// `on_trace` sees the trace of every SG run with its scheme and capacity.
pub fn run_sweep_with(
    scenario: &Scenario,
    schemes: &[Scheme],
    capacities: &[f64],
    config: &SweepConfig,
    on_trace: &mut dyn FnMut(Scheme, f64, &SgTrace),
) -> Result<SweepResult, SweepError> {
    let mut schemes = schemes.to_vec();
    schemes.sort();
    schemes.dedup();
    let mut capacities = capacities.to_vec();
    capacities.sort_by(f64::total_cmp);
    capacities.dedup();

    let base = baselines(&scenario.homes, &scenario.env, &config.solver);
    let mut points = Vec::with_capacity(schemes.len() * capacities.len());
    for &scheme in &schemes {
        for &capacity in &capacities {
            let s = scenario.with_constant_capacity(capacity);
            let start = Instant::now();
            let (home_utilities, iters_to_best) = match scheme {
                Scheme::Gm => {
                    let gm = gm_solve_tiny(&s, config.gm_grid)?;
                    (gm.solutions.iter().map(|x| x.utility).collect(), 0)
                }
                Scheme::Lm => (plan_utilities(&s, &lm_allocate(&s), &config.solver), 0),
                Scheme::Sg1 | Scheme::Sg2 => {
                    let r = sg_run(&s, config.sg(scheme).unwrap());
                    on_trace(scheme, capacity, &r.trace);
                    let best = r.trace.best().expect("a run has iterates");
                    (best.home_utilities.clone(), r.best_k)
                }
            };
            let wall_s = if config.timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            let classes = relative_utility(&home_utilities, &s.homes, &base)?;
            points.push(SweepPoint {
                scheme,
                capacity,
                total: home_utilities.iter().sum(),
                home_utilities,
                iters_to_best,
                wall_s,
                classes,
            });
        }
    }
    Ok(SweepResult { points })
}

pub fn run_sweep(
    scenario: &Scenario,
    schemes: &[Scheme],
    capacities: &[f64],
    config: &SweepConfig,
) -> Result<SweepResult, SweepError> {
    run_sweep_with(scenario, schemes, capacities, config, &mut |_, _, _| {})
}

/// Writes the header and one line per (point, class).
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>, SweepError> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<Result<Vec<SweepRow>, _>>()?;
    Ok(rows)
}
