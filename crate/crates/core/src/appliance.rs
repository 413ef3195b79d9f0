//! Appliance utility shapes, indoor temperature dynamics and evaluation of a
//! complete home schedule.

use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{
    ApplianceClass, Environment, Heating, HomeSchedule, HomeSpec, Lighting, UtilityPair, Washing,
};

/// Indoor temperature of a home, °C. Dynamics never clamp it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalState {
    pub temperature: f64,
}

impl ThermalState {
    pub fn step(self, heat_power: f64, t_ext: f64, heating: &Heating) -> ThermalState {
        ThermalState {
            temperature: heat_step(
                self.temperature,
                heat_power,
                t_ext,
                heating.f_coeff,
                heating.g_coeff,
            ),
        }
    }
}

/// One slot of the first-order thermal model.
#[inline]
pub fn heat_step(t_prev: f64, heat_power: f64, t_ext: f64, f_coeff: f64, g_coeff: f64) -> f64 {
    t_prev + f_coeff * heat_power + g_coeff * (t_ext - t_prev)
}

#[inline]
fn clamp01(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum ApplianceError {
    #[error("{class} power {power} W is outside {{0}} U [{p_min}, {p_max}]")]
    Unreachable {
        class: ApplianceClass,
        power: f64,
        p_min: f64,
        p_max: f64,
    },
    #[error("washing start {start} is outside the admissible window [{first}, {last}]")]
    StartOutsideWindow {
        start: usize,
        first: usize,
        last: usize,
    },
}

/// Lighting utility for one slot; `power` must be 0 or within `[p_min, p_max]`.
pub fn light_utility(power: f64, spec: &Lighting, u_max: f64) -> Result<UtilityPair, ApplianceError> {
    if power != 0.0 && !(power >= spec.p_min && power <= spec.p_max) {
        return Err(ApplianceError::Unreachable {
            class: ApplianceClass::Lighting,
            power,
            p_min: spec.p_min,
            p_max: spec.p_max,
        });
    }
    Ok(light_value(power, spec, u_max))
}

/// Unchecked lighting utility, used in the solver inner loops.
#[inline]
pub(crate) fn light_value(power: f64, spec: &Lighting, u_max: f64) -> UtilityPair {
    if power < spec.p_min {
        return UtilityPair::ZERO;
    }
    let comfort = if spec.p_max > spec.p_min {
        clamp01((power - spec.p_min) / (spec.p_max - spec.p_min))
    } else {
        1.0
    };
    UtilityPair::new(u_max, u_max * comfort)
}

/// Heating utility of an indoor temperature: vital grows linearly from the
/// home's vital floor to `t_min`, comfort from `t_min` to `t_pref`. Both stay
/// flat at their maximum above.
#[inline]
pub fn heat_utility(temp: f64, home: &HomeSpec, u_max: f64) -> UtilityPair {
    let floor = home.heat_vital_floor;
    let vital = clamp01((temp - floor) / (home.t_min - floor));
    let comfort = clamp01((temp - home.t_min) / (home.t_pref - home.t_min));
    UtilityPair::new(u_max * vital, u_max * comfort)
}

/// Washing utility, accrued once for the whole run with weight `horizon`.
/// Comfort falls linearly from full at the earliest start to zero at the
/// latest feasible start.
pub fn wash_utility(
    wash_start: Option<usize>,
    spec: &Washing,
    horizon: usize,
    u_max: f64,
) -> Result<UtilityPair, ApplianceError> {
    let Some(start) = wash_start else {
        return Ok(UtilityPair::ZERO);
    };
    let first = spec.earliest_start;
    let last = spec.latest_start();
    if start < first || start > last {
        return Err(ApplianceError::StartOutsideWindow { start, first, last });
    }
    Ok(wash_value(start, spec, horizon, u_max))
}

#[inline]
pub(crate) fn wash_value(start: usize, spec: &Washing, horizon: usize, u_max: f64) -> UtilityPair {
    let weight = u_max * horizon as f64;
    let first = spec.earliest_start;
    let last = spec.latest_start();
    let comfort = if last > first {
        (last - start) as f64 / (last - first) as f64
    } else {
        1.0
    };
    UtilityPair::new(weight, weight * comfort)
}

/// Admissible power levels of an appliance on a grid of `quantum` watts:
/// `{0, p_min, p_min + q, ..., p_max}`.
pub fn power_levels(p_min: f64, p_max: f64, quantum: f64) -> Vec<f64> {
    let mut levels = alloc::vec![0.0];
    let mut k = 0.0;
    loop {
        let p = p_min + k * quantum;
        if p > p_max + 1e-9 {
            break;
        }
        levels.push(p.min(p_max));
        k += 1.0;
    }
    if levels.last().copied() != Some(p_max) {
        levels.push(p_max);
    }
    levels
}

/// Result of evaluating a fixed schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub utility: UtilityPair,
    pub light: UtilityPair,
    pub heat: UtilityPair,
    pub wash: UtilityPair,
    pub temperature: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScheduleError {
    #[error("schedule covers {got} slots, expected {expected}")]
    Horizon { got: usize, expected: usize },
    #[error("{class} at slot {slot}: power {power} W violates its on/off bounds")]
    PowerBounds {
        class: ApplianceClass,
        slot: usize,
        power: f64,
    },
    #[error("{class} at slot {slot} is scheduled but the home has no such appliance")]
    MissingAppliance { class: ApplianceClass, slot: usize },
    #[error("washing activity at slot {slot} does not match the declared start")]
    WashingRun { slot: usize },
    #[error(transparent)]
    Appliance(#[from] ApplianceError),
}

/// Recomputes the temperature trajectory of `schedule` from `home.t_init` and
/// sums every appliance's utility over the horizon.
///
/// The total is `light + heat + wash`, where `light` and `heat` are per-slot
/// sums taken in slot order.
pub fn evaluate_home(
    schedule: &HomeSchedule,
    home: &HomeSpec,
    env: &Environment,
) -> Result<Evaluation, ScheduleError> {
    let horizon = env.horizon();
    for class in ApplianceClass::ALL {
        let got = schedule.power[class.index()].len();
        if got != horizon || schedule.active[class.index()].len() != horizon {
            return Err(ScheduleError::Horizon {
                got,
                expected: horizon,
            });
        }
    }
    check_bounds(schedule, home)?;
    let u = env.max_utility_per_slot;

    let mut light = UtilityPair::ZERO;
    if let Some(spec) = &home.lighting {
        for p in schedule.power_of(ApplianceClass::Lighting) {
            light += light_value(*p, spec, u);
        }
    }

    let mut heat = UtilityPair::ZERO;
    let mut temperature = Vec::with_capacity(horizon);
    let mut temp = home.t_init;
    let heat_power = schedule.power_of(ApplianceClass::Heating);
    for t in 0..horizon {
        let (f, g) = home.heating.map_or((0.0, 0.0), |h| (h.f_coeff, h.g_coeff));
        temp = heat_step(temp, heat_power[t], env.exterior_temp[t], f, g);
        temperature.push(temp);
        if home.heating.is_some() {
            heat += heat_utility(temp, home, u);
        }
    }

    let wash = match &home.washing {
        Some(spec) => wash_utility(schedule.wash_start, spec, horizon, u)?,
        None => UtilityPair::ZERO,
    };

    Ok(Evaluation {
        utility: light + heat + wash,
        light,
        heat,
        wash,
        temperature,
    })
}

fn check_bounds(schedule: &HomeSchedule, home: &HomeSpec) -> Result<(), ScheduleError> {
    let ranges = [
        home.lighting.map(|l| (l.p_min, l.p_max)),
        home.heating.map(|h| (h.p_min, h.p_max)),
        home.washing.map(|w| (w.power, w.power)),
    ];
    for class in ApplianceClass::ALL {
        let i = class.index();
        for (t, (&p, &on)) in schedule.power[i].iter().zip(&schedule.active[i]).enumerate() {
            let slot = t + 1;
            let ok = match (on, ranges[i]) {
                (false, _) => p == 0.0,
                (true, None) => return Err(ScheduleError::MissingAppliance { class, slot }),
                (true, Some((lo, hi))) => p >= lo && p <= hi,
            };
            if !ok {
                return Err(ScheduleError::PowerBounds {
                    class,
                    slot,
                    power: p,
                });
            }
        }
    }
    let wash_active = &schedule.active[ApplianceClass::Washing.index()];
    let run = match (schedule.wash_start, home.washing) {
        (Some(s), Some(w)) => Some((s, s + w.duration - 1)),
        _ => None,
    };
    for (t, &on) in wash_active.iter().enumerate() {
        let slot = t + 1;
        let expected = run.is_some_and(|(a, b)| slot >= a && slot <= b);
        if on != expected {
            return Err(ScheduleError::WashingRun { slot });
        }
    }
    if let (Some(s), Some(w)) = (schedule.wash_start, home.washing) {
        if s + w.duration - 1 > wash_active.len() {
            return Err(ScheduleError::WashingRun {
                slot: wash_active.len(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{class1, class2};
    use alloc::vec;

    const U: f64 = 1.0;

    #[test]
    fn heat_step_examples() {
        let h = class1(0).heating.unwrap();
        let t = heat_step(22.0, 0.0, 10.0, h.f_coeff, h.g_coeff);
        assert!((t - 21.1).abs() < 1e-12);
        assert_eq!(heat_step(10.0, 0.0, 10.0, h.f_coeff, h.g_coeff), 10.0);
        // fixed point T* = T_e + F p / G
        let fixed = 10.0 + h.f_coeff * 1000.0 / h.g_coeff;
        assert!((fixed - 32.6667).abs() < 1e-3);
        assert!((heat_step(fixed, 1000.0, 10.0, h.f_coeff, h.g_coeff) - fixed).abs() < 1e-12);
    }

    #[test]
    fn heat_step_slope_is_f_coeff() {
        let h = class2(0).heating.unwrap();
        let a = heat_step(17.0, 1000.0, 10.0, h.f_coeff, h.g_coeff);
        let b = heat_step(17.0, 2000.0, 10.0, h.f_coeff, h.g_coeff);
        assert!(((b - a) / 1000.0 - h.f_coeff).abs() < 1e-15);
    }

    #[test]
    fn light_examples() {
        let l = class1(0).lighting.unwrap();
        assert_eq!(light_utility(0.0, &l, U).unwrap(), UtilityPair::ZERO);
        assert_eq!(light_utility(50.0, &l, U).unwrap(), UtilityPair::new(1.0, 0.0));
        assert_eq!(light_utility(525.0, &l, U).unwrap(), UtilityPair::new(1.0, 0.5));
        assert!(light_utility(20.0, &l, U).is_err());
        let flat = Lighting {
            p_min: 80.0,
            p_max: 80.0,
        };
        assert_eq!(light_utility(80.0, &flat, U).unwrap(), UtilityPair::new(1.0, 1.0));
    }

    #[test]
    fn heat_examples() {
        let home = class1(0);
        assert_eq!(heat_utility(22.0, &home, U), UtilityPair::new(1.0, 1.0));
        assert_eq!(heat_utility(15.0, &home, U), UtilityPair::new(1.0, 0.0));
        let cold = heat_utility(10.0, &home, U);
        assert!((cold.vital - 2.0 / 3.0).abs() < 1e-15 && cold.comfort == 0.0);
        assert_eq!(heat_utility(30.0, &home, U), UtilityPair::new(1.0, 1.0));
    }

    #[test]
    fn wash_examples() {
        let w = class1(0).washing.unwrap();
        assert_eq!(wash_utility(None, &w, 100, U).unwrap(), UtilityPair::ZERO);
        assert_eq!(wash_utility(Some(1), &w, 100, U).unwrap(), UtilityPair::new(100.0, 100.0));
        assert_eq!(wash_utility(Some(93), &w, 100, U).unwrap(), UtilityPair::new(100.0, 0.0));
        assert!(wash_utility(Some(94), &w, 100, U).is_err());
    }

    #[test]
    fn power_levels_grid() {
        assert_eq!(power_levels(50.0, 200.0, 50.0), vec![0.0, 50.0, 100.0, 150.0, 200.0]);
        assert_eq!(power_levels(50.0, 120.0, 50.0), vec![0.0, 50.0, 100.0, 120.0]);
        assert_eq!(power_levels(600.0, 600.0, 50.0), vec![0.0, 600.0]);
        // a grid coarser than the range keeps only the endpoints
        assert_eq!(power_levels(50.0, 1000.0, 5000.0), vec![0.0, 50.0, 1000.0]);
    }

    /// Direct simulation of the all-off trajectory, independent of
    /// `evaluate_home`.
    fn passive_heat_credit(home: &HomeSpec, env: &Environment) -> UtilityPair {
        let h = home.heating.unwrap();
        let mut temp = home.t_init;
        let mut total = UtilityPair::ZERO;
        for t_ext in &env.exterior_temp {
            temp += h.g_coeff * (t_ext - temp);
            total += heat_utility(temp, home, env.max_utility_per_slot);
        }
        total
    }

    #[test]
    fn all_off_schedule_gets_passive_credit() {
        let home = class1(0);
        let env = Environment::constant(100, 10.0);
        let eval = evaluate_home(&HomeSchedule::all_off(100), &home, &env).unwrap();
        assert_eq!(eval.light, UtilityPair::ZERO);
        assert_eq!(eval.wash, UtilityPair::ZERO);
        assert_eq!(eval.heat, passive_heat_credit(&home, &env));
        assert!((eval.utility.vital - 74.5).abs() < 0.5, "{:?}", eval.utility);
        assert_eq!(eval.utility.comfort, passive_heat_credit(&home, &env).comfort);
        // |T_t - T_e| = |T_0 - T_e| (1 - g)^t
        let g = home.heating.unwrap().g_coeff;
        for (t, temp) in eval.temperature.iter().enumerate() {
            let expect = 12.0 * libm::pow(1.0 - g, (t + 1) as f64);
            assert!((temp - 10.0 - expect).abs() < 1e-9);
        }
    }

    fn full_power(home: &HomeSpec, horizon: usize) -> HomeSchedule {
        let mut s = HomeSchedule::all_off(horizon);
        let l = home.lighting.unwrap();
        let h = home.heating.unwrap();
        let w = home.washing.unwrap();
        for t in 0..horizon {
            s.power[0][t] = l.p_max;
            s.active[0][t] = true;
            s.power[1][t] = h.p_max;
            s.active[1][t] = true;
        }
        for t in w.earliest_start - 1..w.earliest_start - 1 + w.duration {
            s.power[2][t] = w.power;
            s.active[2][t] = true;
        }
        s.wash_start = Some(w.earliest_start);
        s
    }

    #[test]
    fn full_power_schedule_saturates() {
        let home = class1(0);
        let env = Environment::constant(100, 10.0);
        let eval = evaluate_home(&full_power(&home, 100), &home, &env).unwrap();
        assert_eq!(eval.utility, UtilityPair::new(300.0, 300.0));
    }

    #[test]
    fn evaluation_rejects_bad_power() {
        let home = class1(0);
        let env = Environment::constant(4, 10.0);
        let mut s = HomeSchedule::all_off(4);
        s.power[1][2] = 500.0;
        s.active[1][2] = true;
        assert_eq!(
            evaluate_home(&s, &home, &env),
            Err(ScheduleError::PowerBounds {
                class: ApplianceClass::Heating,
                slot: 3,
                power: 500.0
            })
        );
        let mut s = HomeSchedule::all_off(4);
        s.power[0][1] = 10.0;
        assert!(matches!(
            evaluate_home(&s, &home, &env),
            Err(ScheduleError::PowerBounds { .. })
        ));
    }

    #[test]
    fn evaluation_checks_wash_run() {
        let mut home = class1(0);
        home.washing = Some(Washing {
            power: 600.0,
            duration: 2,
            earliest_start: 1,
            deadline: 4,
        });
        let env = Environment::constant(4, 10.0);
        let mut s = HomeSchedule::all_off(4);
        s.wash_start = Some(2);
        s.power[2][1] = 600.0;
        s.active[2][1] = true;
        assert_eq!(
            evaluate_home(&s, &home, &env),
            Err(ScheduleError::WashingRun { slot: 3 })
        );
        s.power[2][2] = 600.0;
        s.active[2][2] = true;
        assert!(evaluate_home(&s, &home, &env).is_ok());
    }

    #[test]
    fn evaluation_is_compositional() {
        let home = class2(0);
        let env = Environment::new(vec![8.0, 9.0, 10.0, 12.0, 11.0, 10.0], 1.0);
        let mut s = HomeSchedule::all_off(6);
        let powers = [(0.0, 1000.0), (120.0, 0.0), (500.0, 1500.0), (0.0, 0.0), (50.0, 2000.0), (75.0, 0.0)];
        for (t, (l, h)) in powers.iter().enumerate() {
            s.power[0][t] = *l;
            s.active[0][t] = *l > 0.0;
            s.power[1][t] = *h;
            s.active[1][t] = *h > 0.0;
        }
        s.wash_start = Some(1);
        for t in 0..6 {
            s.power[2][t] = 400.0;
            s.active[2][t] = true;
        }
        let eval = evaluate_home(&s, &home, &env).unwrap();

        let l = home.lighting.unwrap();
        let h = home.heating.unwrap();
        let light: UtilityPair = s.power[0].iter().map(|p| light_utility(*p, &l, 1.0).unwrap()).sum();
        let mut temp = home.t_init;
        let mut heat = UtilityPair::ZERO;
        for t in 0..6 {
            temp = heat_step(temp, s.power[1][t], env.exterior_temp[t], h.f_coeff, h.g_coeff);
            heat += heat_utility(temp, &home, 1.0);
        }
        let wash = wash_utility(Some(1), &home.washing.unwrap(), 6, 1.0).unwrap();
        assert_eq!(eval.utility, light + heat + wash);
    }
}
