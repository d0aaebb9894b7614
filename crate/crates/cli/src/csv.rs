//! CSV output: `.` decimal point, scientific notation, 12 significant digits.

use std::io::{self, Write};

/// Formats one value; non-finite values print as `nan`, `inf` or `-inf`.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_header<W: Write + ?Sized>(w: &mut W, columns: &[&str]) -> io::Result<()> {
    writeln!(w, "{}", columns.join(","))
}

pub fn write_row<W: Write + ?Sized>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|&x| number(x)).collect();
    writeln!(w, "{}", cells.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number(-6.152063), "-6.15206300000e0");
        assert_eq!(number(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(number(f64::NAN), "nan");
        let mut out = Vec::new();
        write_row(&mut out, &[1.0, f64::NAN]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1.00000000000e0,nan\n");
    }

    #[test]
    fn round_trips_to_twelve_digits() {
        for x in [1.234567890123456e-300, -9.87654321e42, 0.1] {
            let y: f64 = number(x).parse().unwrap();
            assert!((y - x).abs() <= 5e-12 * x.abs());
        }
    }
}
