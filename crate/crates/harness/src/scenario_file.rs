//! JSON scenario documents.
//!
//! ```json
//! {
//!   "horizon": 100,
//!   "slot_minutes": 5,
//!   "exterior_temp": 10,
//!   "capacity": 100000,
//!   "max_utility_per_slot": 1,
//!   "homes": [
//!     {
//!       "count": 100,
//!       "class": "class1",
//!       "lighting": { "p_min": 50, "p_max": 1000 },
//!       "heating": { "p_min": 1000, "p_max": 4000, "f_coeff": 0.0017, "g_coeff": 0.075 },
//!       "washing": { "power": 600, "duration": 8, "earliest_start": 1, "deadline": 100 },
//!       "t_min": 15, "t_pref": 22, "t_init": 22, "t_max": 26
//!     }
//!   ]
//! }
//! ```
//!
//! `exterior_temp` and `capacity` are either one number for every slot or a
//! list with one entry per slot. A home block stands for `count` identical
//! homes (default 1) whose ids run from `id` upwards; without `id`, ids
//! continue after the largest one used so far. `max_utility_per_slot`
//! defaults to 1 and `heat_vital_floor` to 0. Appliances a home does not
//! have are left out.

use std::collections::BTreeMap;

use dr_core::{Environment, Heating, HomeSpec, Lighting, ModelError, Scenario, Washing};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("home block {block}: unknown appliance class `{name}`")]
    UnknownAppliance { block: usize, name: String },
    #[error("{name} has {len} entries, horizon is {horizon}")]
    SeriesLength {
        name: &'static str,
        len: usize,
        horizon: usize,
    },
    #[error("home block {block}: count must be at least 1")]
    EmptyBlock { block: usize },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Series {
    Constant(f64),
    PerSlot(Vec<f64>),
}

impl Series {
    fn expand(&self, name: &'static str, horizon: usize) -> Result<Vec<f64>, ScenarioError> {
        match self {
            Series::Constant(v) => Ok(vec![*v; horizon]),
            Series::PerSlot(v) if v.len() == horizon => Ok(v.clone()),
            Series::PerSlot(v) => Err(ScenarioError::SeriesLength {
                name,
                len: v.len(),
                horizon,
            }),
        }
    }

    fn compact(values: &[f64]) -> Series {
        match values.split_first() {
            Some((first, rest)) if rest.iter().all(|v| v.to_bits() == first.to_bits()) => Series::Constant(*first),
            _ => Series::PerSlot(values.to_vec()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct LightingDoc {
    p_min: f64,
    p_max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct HeatingDoc {
    p_min: f64,
    p_max: f64,
    f_coeff: f64,
    g_coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WashingDoc {
    power: f64,
    duration: usize,
    earliest_start: usize,
    deadline: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct HomeDoc {
    #[serde(default = "one", skip_serializing_if = "is_one")]
    count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u32>,
    #[serde(default = "default_class")]
    class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lighting: Option<LightingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    heating: Option<HeatingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    washing: Option<WashingDoc>,
    t_min: f64,
    t_pref: f64,
    t_init: f64,
    t_max: f64,
    #[serde(default)]
    heat_vital_floor: f64,
    #[serde(flatten, skip_serializing)]
    unknown: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    horizon: usize,
    slot_minutes: f64,
    exterior_temp: Series,
    capacity: Series,
    #[serde(default = "unit")]
    max_utility_per_slot: f64,
    homes: Vec<HomeDoc>,
}

fn one() -> usize {
    1
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

fn unit() -> f64 {
    1.0
}

fn default_class() -> String {
    "home".to_string()
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| ScenarioError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let horizon = doc.horizon;
    if horizon == 0 {
        return Err(ModelError::EmptyHorizon.into());
    }
    let exterior = doc.exterior_temp.expand("exterior_temp", horizon)?;
    let capacity = doc.capacity.expand("capacity", horizon)?;

    let mut homes = Vec::new();
    let mut next_id = 0u32;
    for (block, h) in doc.homes.iter().enumerate() {
        if let Some(name) = h.unknown.keys().next() {
            return Err(ScenarioError::UnknownAppliance {
                block,
                name: name.clone(),
            });
        }
        if h.count == 0 {
            return Err(ScenarioError::EmptyBlock { block });
        }
        let first = h.id.unwrap_or(next_id);
        for i in 0..h.count as u32 {
            homes.push(HomeSpec {
                id: first + i,
                label: h.class.clone(),
                lighting: h.lighting.as_ref().map(|l| Lighting {
                    p_min: l.p_min,
                    p_max: l.p_max,
                }),
                heating: h.heating.as_ref().map(|x| Heating {
                    p_min: x.p_min,
                    p_max: x.p_max,
                    f_coeff: x.f_coeff,
                    g_coeff: x.g_coeff,
                }),
                washing: h.washing.as_ref().map(|w| Washing {
                    power: w.power,
                    duration: w.duration,
                    earliest_start: w.earliest_start,
                    deadline: w.deadline,
                }),
                t_min: h.t_min,
                t_pref: h.t_pref,
                t_init: h.t_init,
                t_max: h.t_max,
                heat_vital_floor: h.heat_vital_floor,
            });
        }
        next_id = next_id.max(first + h.count as u32);
    }
    let env = Environment::new(exterior, doc.max_utility_per_slot);
    Ok(Scenario::new(homes, doc.slot_minutes, env, capacity)?)
}

/// Renders a scenario as a document that parses back to an equal scenario:
/// one block per home, with explicit ids.
pub fn render_scenario(scenario: &Scenario) -> String {
    let homes = scenario
        .homes
        .iter()
        .map(|h| HomeDoc {
            count: 1,
            id: Some(h.id),
            class: h.label.clone(),
            lighting: h.lighting.map(|l| LightingDoc {
                p_min: l.p_min,
                p_max: l.p_max,
            }),
            heating: h.heating.map(|x| HeatingDoc {
                p_min: x.p_min,
                p_max: x.p_max,
                f_coeff: x.f_coeff,
                g_coeff: x.g_coeff,
            }),
            washing: h.washing.map(|w| WashingDoc {
                power: w.power,
                duration: w.duration,
                earliest_start: w.earliest_start,
                deadline: w.deadline,
            }),
            t_min: h.t_min,
            t_pref: h.t_pref,
            t_init: h.t_init,
            t_max: h.t_max,
            heat_vital_floor: h.heat_vital_floor,
            unknown: BTreeMap::new(),
        })
        .collect();
    let doc = ScenarioDoc {
        horizon: scenario.horizon(),
        slot_minutes: scenario.slot_minutes,
        exterior_temp: Series::compact(&scenario.env.exterior_temp),
        capacity: Series::compact(&scenario.capacity),
        max_utility_per_slot: scenario.env.max_utility_per_slot,
        homes,
    };
    serde_json::to_string_pretty(&doc).expect("scenario documents always serialise")
}
