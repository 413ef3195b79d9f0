use alloc::vec;
use alloc::vec::Vec;

/// Index of the largest entry (the first one on ties).
pub(crate) fn largest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Adds `β` to `current` and removes a common `λ` so the result sums to
/// `budget`.
///
/// Homes whose value would go negative join a protected set; a protected
/// home receives `max(β - λ, 0)` instead of `β - λ`, so it never ends below
/// its current value. `λ` is found exactly by scanning the breakpoints of
/// the piecewise-linear sum, and the remaining rounding error is put on the
/// largest unprotected entry.
pub fn project_allocation(current: &[f64], beta: &[f64], budget: f64) -> Vec<f64> {
    assert_eq!(current.len(), beta.len());
    let n = current.len();
    if n == 0 {
        return Vec::new();
    }
    let deficit = budget - current.iter().sum::<f64>();
    let mut protected = vec![false; n];
    let mut out = vec![0.0; n];
    loop {
        let lambda = solve_lambda(beta, &protected, deficit);
        let mut changed = false;
        for h in 0..n {
            out[h] = if protected[h] {
                current[h] + (beta[h] - lambda).max(0.0)
            } else {
                current[h] + beta[h] - lambda
            };
            if !protected[h] && out[h] < 0.0 {
                protected[h] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    renormalize(&mut out, &protected, budget);
    out
}

/// Solves `sum_{free} (β_h - λ) + sum_{protected} max(β_h - λ, 0) = deficit`.
fn solve_lambda(beta: &[f64], protected: &[bool], deficit: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free = 0usize;
    let mut breakpoints: Vec<f64> = Vec::new();
    for (b, p) in beta.iter().zip(protected) {
        if *p {
            breakpoints.push(*b);
        } else {
            free_sum += b;
            free += 1;
        }
    }
    breakpoints.sort_by(|a, b| b.total_cmp(a));
    if free == 0 {
        // every home protected: only a non-positive deficit can be met
        return breakpoints.first().copied().unwrap_or(0.0).max(0.0);
    }
    let mut sum = free_sum;
    let mut count = free as f64;
    let mut i = 0;
    loop {
        let lambda = (sum - deficit) / count;
        match breakpoints.get(i) {
            Some(&b) if b > lambda => {
                sum += b;
                count += 1.0;
                i += 1;
            }
            _ => return lambda,
        }
    }
}

fn renormalize(values: &mut [f64], protected: &[bool], budget: f64) {
    for _ in 0..4 {
        let err = budget - values.iter().sum::<f64>();
        if err == 0.0 {
            return;
        }
        let free = (0..values.len())
            .filter(|&i| !protected[i])
            .reduce(|a, b| if values[b] > values[a] { b } else { a });
        let i = free.unwrap_or_else(|| largest(values));
        values[i] = (values[i] + err).max(0.0);
    }
}
