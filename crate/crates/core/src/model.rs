//! Domain types shared by every other module: utility pairs, appliance and
//! home parameters, scenarios, capacity plans and home schedules.
//!
//! Slots are 1-indexed wherever a slot number is part of the data
//! (`earliest_start`, `deadline`, `wash_start`). Per-slot vectors are stored
//! 0-based, so slot `t` lives at index `t - 1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Sub};

use thiserror::Error;

/// A (vital, comfort) utility value.
///
/// Pairs are ordered lexicographically: any vital gain dominates any comfort
/// gain. Both components must be finite; `Ord` relies on it.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UtilityPair {
    pub vital: f64,
    pub comfort: f64,
}

impl UtilityPair {
    pub const ZERO: UtilityPair = UtilityPair {
        vital: 0.0,
        comfort: 0.0,
    };

    pub const fn new(vital: f64, comfort: f64) -> Self {
        UtilityPair { vital, comfort }
    }

    pub fn is_finite(&self) -> bool {
        self.vital.is_finite() && self.comfort.is_finite()
    }

    /// Collapses the pair onto a scalar, `weight * vital + comfort`.
    pub fn scalarize(&self, vital_weight: f64) -> f64 {
        vital_weight * self.vital + self.comfort
    }
}

/// Lexicographic comparison of two utility pairs.
pub fn utility_cmp(a: UtilityPair, b: UtilityPair) -> Ordering {
    a.cmp(&b)
}

/// Element-wise sum of two utility pairs.
pub fn utility_add(a: UtilityPair, b: UtilityPair) -> UtilityPair {
    a + b
}

impl Eq for UtilityPair {}

impl PartialOrd for UtilityPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UtilityPair {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.vital.partial_cmp(&other.vital) {
            Some(Ordering::Equal) | None => self
                .comfort
                .partial_cmp(&other.comfort)
                .unwrap_or(Ordering::Equal),
            Some(ord) => ord,
        }
    }
}

impl Add for UtilityPair {
    type Output = UtilityPair;
    fn add(self, rhs: Self) -> Self {
        UtilityPair::new(self.vital + rhs.vital, self.comfort + rhs.comfort)
    }
}

impl AddAssign for UtilityPair {
    fn add_assign(&mut self, rhs: Self) {
        self.vital += rhs.vital;
        self.comfort += rhs.comfort;
    }
}

impl Sub for UtilityPair {
    type Output = UtilityPair;
    fn sub(self, rhs: Self) -> Self {
        UtilityPair::new(self.vital - rhs.vital, self.comfort - rhs.comfort)
    }
}

impl Sum for UtilityPair {
    fn sum<I: Iterator<Item = UtilityPair>>(iter: I) -> Self {
        iter.fold(UtilityPair::ZERO, |acc, u| acc + u)
    }
}

impl<'a> Sum<&'a UtilityPair> for UtilityPair {
    fn sum<I: Iterator<Item = &'a UtilityPair>>(iter: I) -> Self {
        iter.fold(UtilityPair::ZERO, |acc, u| acc + *u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ApplianceClass {
    Lighting,
    Heating,
    Washing,
}

impl ApplianceClass {
    pub const ALL: [ApplianceClass; 3] = [
        ApplianceClass::Lighting,
        ApplianceClass::Heating,
        ApplianceClass::Washing,
    ];

    pub const fn index(self) -> usize {
        match self {
            ApplianceClass::Lighting => 0,
            ApplianceClass::Heating => 1,
            ApplianceClass::Washing => 2,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            ApplianceClass::Lighting => "lighting",
            ApplianceClass::Heating => "heating",
            ApplianceClass::Washing => "washing",
        }
    }
}

impl core::fmt::Display for ApplianceClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lighting {
    pub p_min: f64,
    pub p_max: f64,
}

/// Electric heating with first-order thermal dynamics
/// `T_t = T_{t-1} + f_coeff * X_t + g_coeff * (T_ext(t) - T_{t-1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Heating {
    pub p_min: f64,
    pub p_max: f64,
    /// °C per watt per slot.
    pub f_coeff: f64,
    /// Fraction of the indoor/outdoor gap closed per slot.
    pub g_coeff: f64,
}

/// A washing machine: one uninterruptible run of `duration` slots at a fixed
/// `power`, starting no earlier than `earliest_start` and finishing by
/// `deadline` (both 1-indexed, inclusive).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Washing {
    pub power: f64,
    pub duration: usize,
    pub earliest_start: usize,
    pub deadline: usize,
}

impl Washing {
    /// Last start slot that still finishes by the deadline.
    pub fn latest_start(&self) -> usize {
        (self.deadline + 1).saturating_sub(self.duration)
    }

    /// Inclusive range of admissible start slots clipped to `horizon`, or
    /// `None` when no run fits.
    pub fn start_window(&self, horizon: usize) -> Option<(usize, usize)> {
        let first = self.earliest_start.max(1);
        let last = self.latest_start().min((horizon + 1).saturating_sub(self.duration));
        if self.duration == 0 || first > last {
            None
        } else {
            Some((first, last))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ApplianceSpec {
    Lighting(Lighting),
    Heating(Heating),
    Washing(Washing),
}

impl ApplianceSpec {
    pub fn class(&self) -> ApplianceClass {
        match self {
            ApplianceSpec::Lighting(_) => ApplianceClass::Lighting,
            ApplianceSpec::Heating(_) => ApplianceClass::Heating,
            ApplianceSpec::Washing(_) => ApplianceClass::Washing,
        }
    }

    pub fn p_min(&self) -> f64 {
        match self {
            ApplianceSpec::Lighting(l) => l.p_min,
            ApplianceSpec::Heating(h) => h.p_min,
            ApplianceSpec::Washing(w) => w.power,
        }
    }

    pub fn p_max(&self) -> f64 {
        match self {
            ApplianceSpec::Lighting(l) => l.p_max,
            ApplianceSpec::Heating(h) => h.p_max,
            ApplianceSpec::Washing(w) => w.power,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomeSpec {
    pub id: u32,
    /// Free-form class label used to aggregate results ("class1", ...).
    pub label: String,
    pub lighting: Option<Lighting>,
    pub heating: Option<Heating>,
    pub washing: Option<Washing>,
    pub t_min: f64,
    pub t_pref: f64,
    pub t_init: f64,
    /// Carried for completeness; no utility shape or constraint uses it.
    pub t_max: f64,
    /// Temperature at which heating vital utility starts to grow.
    pub heat_vital_floor: f64,
}

impl HomeSpec {
    /// Subscribed power `L(h)`: enough for every appliance at full power.
    pub fn subscribed_power(&self) -> f64 {
        self.lighting.map_or(0.0, |l| l.p_max)
            + self.heating.map_or(0.0, |h| h.p_max)
            + self.washing.map_or(0.0, |w| w.power)
    }

    pub fn appliances(&self) -> Vec<ApplianceSpec> {
        let mut out = Vec::with_capacity(3);
        if let Some(l) = self.lighting {
            out.push(ApplianceSpec::Lighting(l));
        }
        if let Some(h) = self.heating {
            out.push(ApplianceSpec::Heating(h));
        }
        if let Some(w) = self.washing {
            out.push(ApplianceSpec::Washing(w));
        }
        out
    }

    /// True when both homes have identical parameters apart from id and label.
    pub fn same_parameters(&self, other: &HomeSpec) -> bool {
        self.lighting == other.lighting
            && self.heating == other.heating
            && self.washing == other.washing
            && self.t_min == other.t_min
            && self.t_pref == other.t_pref
            && self.t_init == other.t_init
            && self.t_max == other.t_max
            && self.heat_vital_floor == other.heat_vital_floor
    }

    /// Checks the per-home invariants against a horizon of `horizon` slots.
    pub fn validate(&self, horizon: usize) -> Result<(), ModelError> {
        let id = self.id;
        let range_ok = |p_min: f64, p_max: f64| {
            p_min.is_finite() && p_max.is_finite() && p_min > 0.0 && p_min <= p_max
        };
        if let Some(l) = self.lighting {
            if !range_ok(l.p_min, l.p_max) {
                return Err(ModelError::PowerRange {
                    home: id,
                    class: ApplianceClass::Lighting,
                });
            }
        }
        if let Some(h) = self.heating {
            if !range_ok(h.p_min, h.p_max) {
                return Err(ModelError::PowerRange {
                    home: id,
                    class: ApplianceClass::Heating,
                });
            }
            if !(h.f_coeff.is_finite() && h.f_coeff > 0.0)
                || !(h.g_coeff.is_finite() && h.g_coeff >= 0.0 && h.g_coeff <= 1.0)
            {
                return Err(ModelError::ThermalCoefficients { home: id });
            }
        }
        if let Some(w) = self.washing {
            if !range_ok(w.power, w.power) {
                return Err(ModelError::PowerRange {
                    home: id,
                    class: ApplianceClass::Washing,
                });
            }
            if w.duration == 0
                || w.earliest_start == 0
                || w.earliest_start + w.duration - 1 > w.deadline
                || w.deadline > horizon
            {
                return Err(ModelError::WashingWindow {
                    home: id,
                    earliest_start: w.earliest_start,
                    duration: w.duration,
                    deadline: w.deadline,
                    horizon,
                });
            }
        }
        let temps = [self.t_min, self.t_pref, self.t_init, self.t_max, self.heat_vital_floor];
        if temps.iter().any(|t| !t.is_finite())
            || !(self.t_min < self.t_pref && self.t_pref <= self.t_max)
            || self.heat_vital_floor >= self.t_min
        {
            return Err(ModelError::Temperatures { home: id });
        }
        Ok(())
    }
}

/// Exogenous per-slot inputs shared by every home.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    /// Exterior temperature per slot, °C; its length is the horizon.
    pub exterior_temp: Vec<f64>,
    /// Scale of the maximal per-slot utility of every appliance.
    pub max_utility_per_slot: f64,
}

impl Environment {
    pub fn new(exterior_temp: Vec<f64>, max_utility_per_slot: f64) -> Self {
        Environment {
            exterior_temp,
            max_utility_per_slot,
        }
    }

    pub fn constant(horizon: usize, exterior_temp: f64) -> Self {
        Environment::new(vec![exterior_temp; horizon], 1.0)
    }

    pub fn horizon(&self) -> usize {
        self.exterior_temp.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub homes: Vec<HomeSpec>,
    pub slot_minutes: f64,
    pub env: Environment,
    /// Total available power per slot, W.
    pub capacity: Vec<f64>,
}

impl Scenario {
    /// Builds a scenario and checks every home and scenario invariant.
    pub fn new(
        homes: Vec<HomeSpec>,
        slot_minutes: f64,
        env: Environment,
        capacity: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let s = Scenario {
            homes,
            slot_minutes,
            env,
            capacity,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn horizon(&self) -> usize {
        self.env.horizon()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let horizon = self.horizon();
        if horizon == 0 {
            return Err(ModelError::EmptyHorizon);
        }
        if self.capacity.len() != horizon {
            return Err(ModelError::SeriesLength {
                name: "capacity",
                len: self.capacity.len(),
                horizon,
            });
        }
        if let Some(t) = self.capacity.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(ModelError::NegativeCapacity { slot: t + 1 });
        }
        if self.env.exterior_temp.iter().any(|t| !t.is_finite()) {
            return Err(ModelError::NonFinite("exterior_temp"));
        }
        let u = self.env.max_utility_per_slot;
        if !(u.is_finite() && u > 0.0) {
            return Err(ModelError::NonFinite("max_utility_per_slot"));
        }
        if !(self.slot_minutes.is_finite() && self.slot_minutes > 0.0) {
            return Err(ModelError::NonFinite("slot_minutes"));
        }
        let mut ids: Vec<u32> = self.homes.iter().map(|h| h.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateHomeId(w[0]));
        }
        for h in &self.homes {
            h.validate(horizon)?;
        }
        Ok(())
    }

    /// Same homes and environment, constant capacity `total` in every slot.
    pub fn with_constant_capacity(&self, total: f64) -> Scenario {
        Scenario {
            capacity: vec![total; self.horizon()],
            ..self.clone()
        }
    }

    pub fn total_subscribed(&self) -> f64 {
        self.homes.iter().map(HomeSpec::subscribed_power).sum()
    }
}

/// Per-home per-slot power limits `C_ht` proposed by the aggregator.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityPlan {
    homes: usize,
    horizon: usize,
    limits: Vec<f64>,
}

impl CapacityPlan {
    pub fn zeros(homes: usize, horizon: usize) -> Self {
        CapacityPlan {
            homes,
            horizon,
            limits: vec![0.0; homes * horizon],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let horizon = rows.first().map_or(0, Vec::len);
        let mut plan = CapacityPlan::zeros(rows.len(), horizon);
        for (h, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), horizon, "ragged capacity plan");
            plan.row_mut(h).copy_from_slice(row);
        }
        plan
    }

    pub fn homes(&self) -> usize {
        self.homes
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Limit of home `h` at 0-based slot index `t`.
    pub fn get(&self, h: usize, t: usize) -> f64 {
        self.limits[h * self.horizon + t]
    }

    pub fn set(&mut self, h: usize, t: usize, value: f64) {
        self.limits[h * self.horizon + t] = value;
    }

    pub fn row(&self, h: usize) -> &[f64] {
        &self.limits[h * self.horizon..(h + 1) * self.horizon]
    }

    pub fn row_mut(&mut self, h: usize) -> &mut [f64] {
        &mut self.limits[h * self.horizon..(h + 1) * self.horizon]
    }

    /// Limits of every home at 0-based slot `t`.
    pub fn column(&self, t: usize) -> Vec<f64> {
        (0..self.homes).map(|h| self.get(h, t)).collect()
    }

    pub fn set_column(&mut self, t: usize, values: &[f64]) {
        for (h, v) in values.iter().enumerate() {
            self.set(h, t, *v);
        }
    }

    pub fn slot_total(&self, t: usize) -> f64 {
        (0..self.homes).map(|h| self.get(h, t)).sum()
    }

    /// Every limit is non-negative and no slot exceeds `capacity`.
    pub fn is_feasible(&self, capacity: &[f64]) -> bool {
        self.limits.iter().all(|c| *c >= 0.0)
            && (0..self.horizon).all(|t| self.slot_total(t) <= capacity[t])
    }
}

/// One home's appliance decisions over the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct HomeSchedule {
    /// Power per appliance class (indexed by [`ApplianceClass::index`]) per slot.
    pub power: [Vec<f64>; 3],
    /// On/off state per appliance class per slot.
    pub active: [Vec<bool>; 3],
    /// Indoor temperature after each slot.
    pub temperature: Vec<f64>,
    /// 1-indexed start slot of the washing run.
    pub wash_start: Option<usize>,
    pub utility: UtilityPair,
}

impl HomeSchedule {
    pub fn all_off(horizon: usize) -> Self {
        HomeSchedule {
            power: [vec![0.0; horizon], vec![0.0; horizon], vec![0.0; horizon]],
            active: [vec![false; horizon], vec![false; horizon], vec![false; horizon]],
            temperature: vec![0.0; horizon],
            wash_start: None,
            utility: UtilityPair::ZERO,
        }
    }

    pub fn horizon(&self) -> usize {
        self.temperature.len()
    }

    pub fn power_of(&self, class: ApplianceClass) -> &[f64] {
        &self.power[class.index()]
    }

    /// Total power drawn at 0-based slot `t`.
    pub fn slot_power(&self, t: usize) -> f64 {
        self.power[0][t] + self.power[1][t] + self.power[2][t]
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ModelError {
    #[error("home {home}: {class} power range must satisfy 0 < p_min <= p_max")]
    PowerRange { home: u32, class: ApplianceClass },
    #[error("home {home}: heating coefficients must satisfy f > 0 and 0 <= g <= 1")]
    ThermalCoefficients { home: u32 },
    #[error(
        "home {home}: washing window does not fit (earliest_start {earliest_start}, \
         duration {duration}, deadline {deadline}, horizon {horizon})"
    )]
    WashingWindow {
        home: u32,
        earliest_start: usize,
        duration: usize,
        deadline: usize,
        horizon: usize,
    },
    #[error("home {home}: temperatures must satisfy floor < t_min < t_pref <= t_max")]
    Temperatures { home: u32 },
    #[error("duplicate home id {0}")]
    DuplicateHomeId(u32),
    #[error("horizon must be at least one slot")]
    EmptyHorizon,
    #[error("{name} has {len} entries, expected {horizon}")]
    SeriesLength {
        name: &'static str,
        len: usize,
        horizon: usize,
    },
    #[error("capacity at slot {slot} is negative or not finite")]
    NegativeCapacity { slot: usize },
    #[error("{0} must be finite and positive")]
    NonFinite(&'static str),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: f64, c: f64) -> UtilityPair {
        UtilityPair::new(v, c)
    }

    #[test]
    fn lexicographic_examples() {
        assert_eq!(utility_cmp(u(1.0, 0.0), u(0.0, 5.0)), Ordering::Greater);
        assert_eq!(utility_cmp(u(2.0, 3.0), u(2.0, 3.0)), Ordering::Equal);
        assert_eq!(utility_cmp(u(2.0, 1.0), u(2.0, 4.0)), Ordering::Less);
    }

    #[test]
    fn addition_examples() {
        assert_eq!(utility_add(u(1.0, 0.5), UtilityPair::ZERO), u(1.0, 0.5));
        assert_eq!(utility_add(u(1.0, 0.5), u(2.0, 0.25)), u(3.0, 0.75));
        let empty: [UtilityPair; 0] = [];
        assert_eq!(empty.iter().sum::<UtilityPair>(), UtilityPair::ZERO);
    }

    #[test]
    fn total_order_on_small_grid() {
        let grid: Vec<UtilityPair> = (0..4)
            .flat_map(|v| (0..4).map(move |c| u(v as f64 * 0.5, c as f64 * 0.5)))
            .collect();
        for a in &grid {
            for b in &grid {
                let ab = a.cmp(b);
                assert_eq!(ab, b.cmp(a).reverse());
                assert_eq!(ab == Ordering::Equal, a == b);
                for c in &grid {
                    if a <= b && b <= c {
                        assert!(a <= c);
                    }
                }
            }
        }
    }

    fn class1(id: u32) -> HomeSpec {
        HomeSpec {
            id,
            label: "class1".into(),
            lighting: Some(Lighting {
                p_min: 50.0,
                p_max: 1000.0,
            }),
            heating: Some(Heating {
                p_min: 1000.0,
                p_max: 4000.0,
                f_coeff: 0.0017,
                g_coeff: 0.075,
            }),
            washing: Some(Washing {
                power: 600.0,
                duration: 8,
                earliest_start: 1,
                deadline: 100,
            }),
            t_min: 15.0,
            t_pref: 22.0,
            t_init: 22.0,
            t_max: 26.0,
            heat_vital_floor: 0.0,
        }
    }

    #[test]
    fn subscribed_power_is_sum_of_maxima() {
        assert_eq!(class1(0).subscribed_power(), 5600.0);
    }

    #[test]
    fn washing_window_must_fit() {
        let mut h = class1(0);
        h.washing = Some(Washing {
            power: 600.0,
            duration: 8,
            earliest_start: 1,
            deadline: 7,
        });
        assert!(matches!(h.validate(100), Err(ModelError::WashingWindow { .. })));
        assert_eq!(
            Washing {
                power: 1.0,
                duration: 8,
                earliest_start: 1,
                deadline: 100
            }
            .start_window(100),
            Some((1, 93))
        );
    }

    #[test]
    fn duplicate_ids_rejected() {
        let env = Environment::constant(100, 10.0);
        let err = Scenario::new(vec![class1(3), class1(3)], 5.0, env, vec![1.0; 100]);
        assert_eq!(err, Err(ModelError::DuplicateHomeId(3)));
    }

    #[test]
    fn plan_feasibility() {
        let mut plan = CapacityPlan::zeros(2, 2);
        plan.set_column(0, &[60.0, 40.0]);
        plan.set_column(1, &[10.0, 0.0]);
        assert!(plan.is_feasible(&[100.0, 10.0]));
        assert!(!plan.is_feasible(&[99.0, 10.0]));
        plan.set(1, 1, -1.0);
        assert!(!plan.is_feasible(&[100.0, 10.0]));
    }
}
