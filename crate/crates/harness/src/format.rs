//! Number formatting and the text formats written by the harness.

use std::io::{self, Write};

use sla_esprit::analysis::BoundReport;
use sla_esprit::CMatrix;

/// Significant digits used for every decimal the harness writes.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` like C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    fmt_g_digits(x, SIGNIFICANT_DIGITS)
}

/// Formats `x` like C's `%.{digits}g`: shortest of fixed and scientific
/// notation with trailing zeros removed.
pub fn fmt_g_digits(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Comma-separated list of `%.12g` values.
pub fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_g(v)).collect::<Vec<_>>().join(",")
}

/// Writes `key = value` lines for every field of the report.
pub fn write_bound_report<W: Write + ?Sized>(out: &mut W, report: &BoundReport) -> io::Result<()> {
    for (key, value) in report.fields() {
        writeln!(out, "{key} = {}", fmt_g(value))?;
    }
    Ok(())
}

/// Writes a complex matrix as whitespace-separated `re+imj` cells, one row
/// per line.
pub fn write_complex_matrix<W: Write + ?Sized>(out: &mut W, m: &CMatrix) -> io::Result<()> {
    for i in 0..m.rows() {
        let cells: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| {
                let im = fmt_g(z.im);
                if im.starts_with('-') {
                    format!("{}{}j", fmt_g(z.re), im)
                } else {
                    format!("{}+{}j", fmt_g(z.re), im)
                }
            })
            .collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}
