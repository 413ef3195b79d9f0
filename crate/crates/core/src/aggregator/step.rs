use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule {
    /// `α_k = a1 / sqrt(k)`.
    Diminishing(f64),
    /// `α_k = a2 / ||g||_2`.
    ConstantLength(f64),
}

/// Step size at iteration `k >= 1`. `None` means the constant-length rule
/// met an all-zero greedient vector, a fixed point.
pub fn step_size(rule: StepRule, k: usize, greedients: &[Vec<f64>]) -> Option<f64> {
    assert!(k >= 1, "iterations are counted from 1");
    match rule {
        StepRule::Diminishing(a1) => Some(a1 / libm::sqrt(k as f64)),
        StepRule::ConstantLength(a2) => {
            let norm = libm::sqrt(greedients.iter().flatten().map(|g| g * g).sum::<f64>());
            if norm > 0.0 {
                Some(a2 / norm)
            } else {
                None
            }
        }
    }
}

/// `β_ht = min(α g_ht, L_m, C(t))` with `L_m` the smallest subscribed power.
pub fn cap_updates(alpha: f64, greedients: &[Vec<f64>], smallest_home: f64, capacity: &[f64]) -> Vec<Vec<f64>> {
    greedients
        .iter()
        .map(|g| {
            g.iter()
                .zip(capacity)
                .map(|(g, c)| (alpha * g).min(smallest_home).min(*c))
                .collect()
        })
        .collect()
}
