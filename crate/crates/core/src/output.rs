//! Deterministic tabular output shared by the data dumps.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Fixed 17-significant-digit scientific notation, so identical inputs give
/// byte-identical files.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and rows of floats as CSV.
pub fn write_float_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_float_csv_file(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_float_csv(std::io::BufWriter::new(file), header, rows)
}

/// Reads a CSV of floats whose header must equal `header`.
pub fn read_float_csv(path: impl AsRef<Path>, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let found: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found != header {
        return Err(crate::Error::InvalidInput(format!(
            "expected CSV header {header:?}, found {found:?}"
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| {
                    crate::Error::InvalidInput(format!("row {}: `{f}`: {e}", line + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(crate::Error::InvalidInput(format!(
                "row {} has {} fields, expected {}",
                line + 1,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_float(std::f64::consts::PI), "3.1415926535897931e0");
        assert_eq!(format_float(-0.1), "-1.0000000000000001e-1");
        let back: f64 = format_float(0.1 + 0.2).parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let rows = vec![vec![1.0, -2.5e-30], vec![3.0, 4.0]];
        write_float_csv_file(&p, &["a", "b"], &rows).unwrap();
        assert_eq!(read_float_csv(&p, &["a", "b"]).unwrap(), rows);
        assert!(read_float_csv(&p, &["a", "c"]).is_err());
    }
}
