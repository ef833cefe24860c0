//! Text formats: signal CSV, iteration-trace CSV, and combination CSV.
//!
//! Floating-point values are written with Rust's shortest round-trip
//! `Display`, so files reproduce the exact in-memory doubles and tolerances
//! are never masked by formatting.

use std::fs;
use std::path::Path;

use shiftdeconv_core::combined::ShiftCombination;
use shiftdeconv_core::step::IterationTrace;
use shiftdeconv_core::Signal1D;

use crate::error::CliError;

const SIGNAL_HEADER: &str = "# offset=";

/// Writes a signal: `# offset=<int>` then one value per line.
pub fn write_signal(path: &Path, s: &Signal1D) -> Result<(), CliError> {
    let mut out = String::with_capacity(16 + 24 * s.len());
    out.push_str(SIGNAL_HEADER);
    out.push_str(&s.offset().to_string());
    out.push('\n');
    for v in s.values() {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Reads a signal file, rejecting malformed headers and value lines.
pub fn read_signal(path: &Path) -> Result<Signal1D, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_signal(&text).map_err(|detail| CliError::Format {
        name: "SignalFormat",
        detail: format!("{}: {detail}", path.display()),
    })
}

pub fn parse_signal(text: &str) -> Result<Signal1D, String> {
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    let mut lines = lines.into_iter();
    let header = lines.next().ok_or("empty file")?;
    let offset: i64 = header
        .strip_prefix(SIGNAL_HEADER)
        .ok_or_else(|| format!("first line must start with `{SIGNAL_HEADER}`"))?
        .parse()
        .map_err(|_| "offset is not an integer".to_string())?;
    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        let v: f64 = line
            .parse()
            .map_err(|_| format!("line {}: `{line}` is not a number", idx + 2))?;
        values.push(v);
    }
    Signal1D::new(offset, values).map_err(|e| e.to_string())
}

/// Writes the per-step divergence record: `n,a_n,max_abs_S,max_abs_H`.
pub fn write_trace(path: &Path, trace: &IterationTrace) -> Result<(), CliError> {
    let mut out = String::from("n,a_n,max_abs_S,max_abs_H\n");
    for step in &trace.steps {
        out.push_str(&format!(
            "{},{},{},{}\n",
            step.n, step.a_n, step.max_abs_s, step.max_abs_h
        ));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Writes a solved combination: `# C=<int> L=<int>`, a column header, then
/// one `i,mu_i,e_i` row per shift.
pub fn write_combination(path: &Path, comb: &ShiftCombination) -> Result<(), CliError> {
    let l = comb.half_width() as i64;
    let mut out = format!("# C={} L={}\ni,mu_i,e_i\n", comb.center(), l);
    for (idx, (mu, e)) in comb.mu().iter().zip(comb.target()).enumerate() {
        out.push_str(&format!("{},{},{}\n", idx as i64 - l, mu, e));
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Reads a combination back so it can be re-applied without re-solving.
pub fn read_combination(path: &Path) -> Result<ShiftCombination, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_combination(&text).map_err(|detail| CliError::Format {
        name: "CombinationFormat",
        detail: format!("{}: {detail}", path.display()),
    })
}

pub fn parse_combination(text: &str) -> Result<ShiftCombination, String> {
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    let mut lines = lines.into_iter();
    let header = lines.next().ok_or("empty file")?;
    let rest = header
        .strip_prefix("# C=")
        .ok_or("first line must start with `# C=`")?;
    let (c_text, l_text) = rest.split_once(" L=").ok_or("header must contain ` L=`")?;
    let center: i64 = c_text.parse().map_err(|_| "C is not an integer")?;
    let half_width: usize = l_text.parse().map_err(|_| "L is not an integer")?;

    match lines.next() {
        Some("i,mu_i,e_i") => {}
        _ => return Err("second line must be the column header `i,mu_i,e_i`".into()),
    }

    let mut mu = Vec::new();
    let mut target = Vec::new();
    for (expect, line) in (-(half_width as i64)..).zip(lines) {
        let mut parts = line.split(',');
        let i: i64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format!("bad row `{line}`"))?;
        if i != expect {
            return Err(format!("rows must run -L..L; expected {expect}, got {i}"));
        }
        let mu_i: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format!("bad mu in `{line}`"))?;
        let e_i: f64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format!("bad e in `{line}`"))?;
        mu.push(mu_i);
        target.push(e_i);
    }
    ShiftCombination::from_parts(center, half_width, mu, target).map_err(|e| e.to_string())
}
