//! Number formatting and CSV emission.

use std::fmt::Write as _;

/// Significant digits used for every printed or written value.
pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style formatting: fixed notation for decimal exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros removed.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// CSV text with a header row, comma separators and LF line endings.
pub fn csv<R: AsRef<[String]>>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let row = row.as_ref();
        for (k, cell) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(cell);
        }
        out.push('\n');
    }
    out
}

/// Rows `s,t,value` of a row-major `n x n` lattice.
pub fn lattice_csv(n: usize, values: &[f64]) -> String {
    let step = 1.0 / (n - 1) as f64;
    let coord = |i: usize| if i == n - 1 { 1.0 } else { i as f64 * step };
    let mut out = String::with_capacity(values.len() * 40);
    out.push_str("s,t,value\n");
    for i in 0..n {
        for j in 0..n {
            let _ = writeln!(out, "{},{},{}", fmt_g(coord(i)), fmt_g(coord(j)), fmt_g(values[i * n + j]));
        }
    }
    out
}
