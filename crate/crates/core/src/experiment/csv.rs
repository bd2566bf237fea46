use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::runner::ResultTable;

pub const HEADER: &str = "sweep_var,scheme,B,avg_throughput_bpcu,avg_decoded_msgs,avg_max_delay,\
stderr_throughput,stderr_delay,analytic_throughput,analytic_delay_lower,analytic_delay_upper,trials,seed";

/// Formats like C's `%.9g`: nine significant digits, trailing zeros dropped,
/// exponent notation outside `1e-4 ≤ |x| < 1e9`.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        trim_zeros(format!("{x:.*}", (8 - exp) as usize))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Renders the table as CSV text, one line per row after the header.
pub fn render_csv(table: &ResultTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::param("table", "no rows to write"));
    }
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for r in &table.rows {
        let m = &r.metrics;
        let opt = |x: Option<f64>| x.map(format_g9).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            format_g9(r.sweep_value),
            r.scheme,
            r.b.map(|b| b.to_string()).unwrap_or_default(),
            format_g9(m.avg_throughput_bpcu),
            format_g9(m.avg_decoded_msgs),
            format_g9(m.avg_max_delay_blocks),
            format_g9(m.stderr_throughput),
            format_g9(m.stderr_delay),
            opt(r.analytic.map(|a| a.throughput_bpcu)),
            opt(r.analytic.map(|a| a.delay_lower)),
            opt(r.analytic.map(|a| a.delay_upper)),
            table.trials,
            table.seed,
        )
        .expect("writing to a String");
    }
    Ok(out)
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let text = render_csv(table)?;
    write_file(path, &text)
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
