//! CSV rendering with fixed 12-significant-digit numbers.

use std::fmt::Write as _;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`-style rendering: trailing zeros dropped, scientific notation
/// outside `[1e-5, 1e12)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT_DIGITS as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Count(usize),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Real(x) => format_sig(x),
            Cell::Count(n) => n.to_string(),
        }
    }
}

/// Comment block (`# ` per line), header row, then data rows; LF endings.
pub fn render_csv(title: &str, config_lines: &[String], header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    writeln!(out, "# {title}").unwrap();
    for line in config_lines {
        writeln!(out, "# {line}").unwrap();
    }
    writeln!(out, "{}", header.join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.render()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}
