//! Scenario files, capacity sweeps, CSV output and the randomised oracles
//! for `dr-core`.

pub mod oracle;
pub mod scenario_file;
pub mod sweep;
pub mod trace;

pub use scenario_file::{parse_scenario, render_scenario, ScenarioError};
pub use sweep::{read_csv, run_sweep, run_sweep_with, write_csv, Scheme, SweepConfig, SweepResult, SweepRow};
pub use trace::export_trace;

/// Parses a capacity list: comma-separated watts (`1e4,2e4`) or
/// `lo:hi:n` for `n` log-spaced points.
pub fn parse_capacities(text: &str) -> Result<Vec<f64>, String> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x >= 0.0)
            .ok_or_else(|| format!("bad capacity `{s}`"))
    };
    if let Some((range, n)) = text.rsplit_once(':') {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi:n, got `{text}`"))?;
        let (lo, hi) = (number(lo)?, number(hi)?);
        let n: usize = n.trim().parse().map_err(|_| format!("bad point count `{n}`"))?;
        if !(lo > 0.0 && hi >= lo) {
            return Err(format!("log spacing needs 0 < lo <= hi, got `{text}`"));
        }
        return Ok(dr_core::reference::log_spaced(lo, hi, n));
    }
    text.split(',').filter(|s| !s.trim().is_empty()).map(number).collect()
}
