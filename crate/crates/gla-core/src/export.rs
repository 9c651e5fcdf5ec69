//! Deterministic CSV export.
//!
//! All numeric output is formatted with `{:.12e}`, which is locale-free and
//! bit-stable: identical inputs always produce byte-identical files.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Render a table with one header row; every column must have equal length.
pub fn csv_from_columns(headers: &[&str], columns: &[Vec<f64>]) -> Result<String> {
    if headers.len() != columns.len() {
        return Err(Error::InvalidArgument(format!(
            "{} headers for {} columns",
            headers.len(),
            columns.len()
        )));
    }
    let rows = columns.first().map(|c| c.len()).unwrap_or(0);
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidArgument("ragged columns".into()));
    }
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for r in 0..rows {
        for (ci, col) in columns.iter().enumerate() {
            if ci > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.12e}", col[r]));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: &Path, headers: &[&str], columns: &[Vec<f64>]) -> Result<()> {
    let body = csv_from_columns(headers, columns)?;
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(body.as_bytes())
        .map_err(|e| Error::Internal(format!("write {}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_formatting() {
        let c1 = vec![0.1, 2.0 / 3.0];
        let c2 = vec![-1.0, 1e-300];
        let a = csv_from_columns(&["x", "y"], &[c1.clone(), c2.clone()]).unwrap();
        let b = csv_from_columns(&["x", "y"], &[c1, c2]).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("x,y\n"));
        assert!(a.contains("6.666666666667e-1"));
    }

    #[test]
    fn ragged_rejected() {
        assert!(csv_from_columns(&["x", "y"], &[vec![1.0], vec![]]).is_err());
        assert!(csv_from_columns(&["x"], &[vec![1.0], vec![2.0]]).is_err());
    }
}
