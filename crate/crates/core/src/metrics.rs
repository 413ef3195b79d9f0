//! Utilities relative to the best each class of homes could reach.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::home_solver::{max_utility_baseline, SolverOptions};
use crate::model::{Environment, HomeSpec, UtilityPair};

/// Label of the row aggregating every home when there is more than one class.
pub const ALL_CLASSES: &str = "all";

#[derive(Clone, Debug, PartialEq)]
pub struct ClassUtility {
    pub class: String,
    pub homes: usize,
    pub relative_vital: f64,
    pub relative_comfort: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MetricsError {
    #[error("class {class}: maximal {component} utility is zero")]
    ZeroBaseline { class: String, component: &'static str },
    #[error("{got} utilities for {expected} homes")]
    Length { got: usize, expected: usize },
}

/// Baselines of each home, solving once per distinct parameter set.
pub fn baselines(homes: &[HomeSpec], env: &Environment, opts: &SolverOptions) -> Vec<UtilityPair> {
    let mut out: Vec<UtilityPair> = Vec::with_capacity(homes.len());
    for (i, h) in homes.iter().enumerate() {
        let b = match (0..i).find(|&j| homes[j].same_parameters(h)) {
            Some(j) => out[j],
            None => max_utility_baseline(h, env, opts),
        };
        out.push(b);
    }
    out
}

/// Per-class utility divided by the class's summed baseline, classes in
/// order of first appearance, followed by an [`ALL_CLASSES`] row when the
/// homes span several classes.
pub fn relative_utility(
    utilities: &[UtilityPair],
    homes: &[HomeSpec],
    baselines: &[UtilityPair],
) -> Result<Vec<ClassUtility>, MetricsError> {
    if utilities.len() != homes.len() || baselines.len() != homes.len() {
        return Err(MetricsError::Length {
            got: utilities.len().min(baselines.len()),
            expected: homes.len(),
        });
    }
    let mut classes: Vec<(String, usize, UtilityPair, UtilityPair)> = Vec::new();
    for ((u, b), h) in utilities.iter().zip(baselines).zip(homes) {
        match classes.iter_mut().find(|c| c.0 == h.label) {
            Some(c) => {
                c.1 += 1;
                c.2 += *u;
                c.3 += *b;
            }
            None => classes.push((h.label.clone(), 1, *u, *b)),
        }
    }
    if classes.len() > 1 {
        let total = classes.iter().fold((0, UtilityPair::ZERO, UtilityPair::ZERO), |acc, c| {
            (acc.0 + c.1, acc.1 + c.2, acc.2 + c.3)
        });
        classes.push((String::from(ALL_CLASSES), total.0, total.1, total.2));
    }
    classes
        .into_iter()
        .map(|(class, homes, u, b)| {
            if !(b.vital > 0.0) {
                return Err(MetricsError::ZeroBaseline {
                    class,
                    component: "vital",
                });
            }
            if !(b.comfort > 0.0) {
                return Err(MetricsError::ZeroBaseline {
                    class,
                    component: "comfort",
                });
            }
            Ok(ClassUtility {
                relative_vital: u.vital / b.vital,
                relative_comfort: u.comfort / b.comfort,
                class,
                homes,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;
    use crate::model::HomeSchedule;
    use crate::reference::{class1, class2, environment};

    #[test]
    fn baseline_is_one() {
        let homes = vec![class1(0), class2(1), class1(2)];
        let env = environment();
        let b = baselines(&homes, &env, &SolverOptions::default());
        let rel = relative_utility(&b, &homes, &b).unwrap();
        assert_eq!(rel.len(), 3);
        assert_eq!(rel[0].class, "class1");
        assert_eq!(rel[0].homes, 2);
        assert_eq!(rel[2].class, ALL_CLASSES);
        assert!(rel.iter().all(|r| r.relative_vital == 1.0 && r.relative_comfort == 1.0));
    }

    #[test]
    fn all_off_decay_credit() {
        let homes = vec![class1(0), class1(1)];
        let env = environment();
        let off = crate::appliance::evaluate_home(&HomeSchedule::all_off(100), &homes[0], &env)
            .unwrap()
            .utility;
        let b = baselines(&homes, &env, &SolverOptions::default());
        let rel = relative_utility(&[off, off], &homes, &b).unwrap();
        assert_eq!(rel.len(), 1);
        assert!((rel[0].relative_vital - 0.2467).abs() < 2e-3, "{}", rel[0].relative_vital);
        // the first slots are still above 15 degrees
        assert!(rel[0].relative_comfort < 0.02);

        let lit = off + UtilityPair::new(100.0, 0.0);
        let rel = relative_utility(&[lit, lit], &homes, &b).unwrap();
        assert!((rel[0].relative_vital - 0.58).abs() < 0.01);
    }

    #[test]
    fn zero_baseline_is_an_error() {
        let mut h = class1(0);
        h.lighting = None;
        h.heating = None;
        h.washing = None;
        let env = environment();
        let b = baselines(&[h.clone()], &env, &SolverOptions::default());
        assert!(matches!(
            relative_utility(&[UtilityPair::ZERO], &[h], &b),
            Err(MetricsError::ZeroBaseline { .. })
        ));
    }
}
