//! The two reference home classes and the scenarios built from them.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Environment, Heating, HomeSpec, Lighting, Scenario, Washing};

pub const HORIZON: usize = 100;
pub const SLOT_MINUTES: f64 = 5.0;
pub const EXTERIOR_TEMP: f64 = 10.0;

fn home(id: u32, label: &str, lighting: Lighting, heating: Heating, washing: Washing) -> HomeSpec {
    HomeSpec {
        id,
        label: String::from(label),
        lighting: Some(lighting),
        heating: Some(heating),
        washing: Some(washing),
        t_min: 15.0,
        t_pref: 22.0,
        t_init: 22.0,
        t_max: 26.0,
        heat_vital_floor: 0.0,
    }
}

/// Class 1 home, `L(h) = 5600 W`.
pub fn class1(id: u32) -> HomeSpec {
    home(
        id,
        "class1",
        Lighting {
            p_min: 50.0,
            p_max: 1000.0,
        },
        Heating {
            p_min: 1000.0,
            p_max: 4000.0,
            f_coeff: 0.0017,
            g_coeff: 0.075,
        },
        Washing {
            power: 600.0,
            duration: 8,
            earliest_start: 1,
            deadline: 100,
        },
    )
}

/// Class 2 home: better insulated and more efficient, `L(h) = 2900 W`.
pub fn class2(id: u32) -> HomeSpec {
    home(
        id,
        "class2",
        Lighting {
            p_min: 50.0,
            p_max: 500.0,
        },
        Heating {
            p_min: 1000.0,
            p_max: 2000.0,
            f_coeff: 0.0008,
            g_coeff: 0.0365,
        },
        Washing {
            power: 400.0,
            duration: 6,
            earliest_start: 1,
            deadline: 100,
        },
    )
}

pub fn environment() -> Environment {
    Environment::constant(HORIZON, EXTERIOR_TEMP)
}

/// `homes` class 1 homes sharing a constant capacity `capacity`.
pub fn homogeneous(homes: usize, capacity: f64) -> Scenario {
    let specs = (0..homes as u32).map(class1).collect();
    Scenario::new(specs, SLOT_MINUTES, environment(), vec![capacity; HORIZON])
        .expect("reference scenario is valid")
}

/// Half class 1, half class 2 (class 1 first).
pub fn heterogeneous(homes: usize, capacity: f64) -> Scenario {
    let half = homes / 2;
    let specs: Vec<HomeSpec> = (0..homes as u32)
        .map(|i| if (i as usize) < half { class1(i) } else { class2(i) })
        .collect();
    Scenario::new(specs, SLOT_MINUTES, environment(), vec![capacity; HORIZON])
        .expect("reference scenario is valid")
}

/// Default sweep: `points` capacities log-spaced over `[1e4, 2e5]`, scaled
/// by `homes / 100`.
pub fn default_capacity_grid(homes: usize, points: usize) -> Vec<f64> {
    log_spaced(1e4 * homes as f64 / 100.0, 2e5 * homes as f64 / 100.0, points)
}

pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => {
            let ratio = libm::log(hi / lo) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo * libm::exp(ratio * i as f64)
                    }
                })
                .collect()
        }
    }
}
