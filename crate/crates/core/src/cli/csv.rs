//! Deterministic CSV output: `#` metadata lines, a header, then rows.

use std::io::{self, Write};

/// Significant digits of every numeric cell.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `1e-4 <= |x| < 1e12`.
pub fn format_g(x: f64) -> String {
    format_g_digits(x, SIGNIFICANT_DIGITS)
}

pub fn format_g_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
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
    let p = digits.max(1);
    // round first: the exponent must be read after rounding (9.9999...e2 -> 1e3)
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Number(x) => format_g(*x),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    /// Written verbatim after a `# ` prefix.
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn write_to(&self, w: &mut dyn Write) -> io::Result<()> {
        for line in &self.metadata {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.header.len());
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }
}
