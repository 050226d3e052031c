use std::io::Write;

use super::StepDiagnostics;
use crate::error::{Error, Result};

pub const TRACE_COLUMNS: [&str; 8] = [
    "k",
    "dH",
    "dG",
    "minpivot_IGH",
    "minpivot_IHG",
    "sign_violations_E",
    "sign_violations_F",
    "monotonicity_violations",
];

/// 17 significant digits, enough to round-trip any `f64`.
fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the iteration trace as CSV; `dH` and `dG` are empty at `k = 0`.
pub fn write_trace_csv<W: Write>(trace: &[StepDiagnostics], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Parse(format!("trace export: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS).map_err(io)?;
    for d in trace {
        let opt = |x: Option<f64>| x.map(sig17).unwrap_or_default();
        w.write_record([
            d.k.to_string(),
            opt(d.d_h),
            opt(d.d_g),
            sig17(d.min_pivot_igh),
            sig17(d.min_pivot_ihg),
            d.sign_violations_e.to_string(),
            d.sign_violations_f.to_string(),
            d.monotonicity_violations.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Parse(format!("trace export: {e}")))?;
    Ok(())
}

pub fn trace_csv(trace: &[StepDiagnostics]) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}
