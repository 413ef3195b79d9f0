//! Per-iteration CSV of a Sub-Greedient run.

use std::io::Write;

use dr_core::aggregator::SgTrace;

use crate::sweep::SweepError;

pub const TRACE_HEADER: [&str; 5] = ["k", "alpha", "total_vital", "total_comfort", "best"];

/// One line per iterate. `alpha` is empty on the iterate where the loop
/// stopped because every greedient was zero, and `best` is 1 on iterates
/// that improved on all earlier ones.
pub fn export_trace<W: Write>(trace: &SgTrace, out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for it in &trace.iterates {
        w.write_record([
            it.k.to_string(),
            it.alpha.map(|a| a.to_string()).unwrap_or_default(),
            it.total.vital.to_string(),
            it.total.comfort.to_string(),
            u8::from(it.improved).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
