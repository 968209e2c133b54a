//! Diagnostics CSV: one row of conserved quantities per record, rendered
//! with 17 significant digits so the exact doubles survive a round trip
//! and identical runs produce byte-identical files.

use std::path::Path;

use crate::observables::InvariantRecord;
use crate::Result;

pub const DIAGNOSTICS_HEADER: &str = "t,mass,l2,hamiltonian,hs_half,max_abs";

/// Renders records to CSV text. Pure function of its input: equal record
/// lists give equal strings.
pub fn render_diagnostics(records: &[InvariantRecord]) -> String {
    let mut out = String::with_capacity(32 + 140 * records.len());
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.time, r.mass, r.l2, r.hamiltonian, r.hs_half, r.max_abs
        ));
    }
    out
}

/// Writes the rendered CSV to `path`.
pub fn write_diagnostics(records: &[InvariantRecord], path: &Path) -> Result<()> {
    std::fs::write(path, render_diagnostics(records))?;
    Ok(())
}
