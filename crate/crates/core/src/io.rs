//! Plain-text column files for grid vectors.

use std::io::{self, Write};

/// Writes `index x value` rows, space separated, 17 significant digits.
pub fn write_columns<W: Write>(mut out: W, x: &[f64], values: &[f64]) -> io::Result<()> {
    if x.len() != values.len() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "column lengths differ"));
    }
    for (i, (x, v)) in x.iter().zip(values).enumerate() {
        writeln!(out, "{} {} {}", i, fmt_f64(*x), fmt_f64(*v))?;
    }
    Ok(())
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_round_trip_exactly() {
        let x = [0.25, 0.5];
        let v = [1.0 / 3.0, -2e-300];
        let mut buf = Vec::new();
        write_columns(&mut buf, &x, &v).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let cols: Vec<&str> = lines[0].split(' ').collect();
        assert_eq!(cols[0], "0");
        assert_eq!(cols[1].parse::<f64>().unwrap(), 0.25);
        assert_eq!(cols[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(lines[1].split(' ').nth(2).unwrap().parse::<f64>().unwrap(), -2e-300);
        assert!(write_columns(Vec::new(), &x, &v[..1]).is_err());
    }
}
