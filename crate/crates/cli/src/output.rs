//! Artifact writers. Floats are written with Rust's shortest round-trip
//! formatting, so reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes a headered CSV and returns its path.
pub fn write_csv(dir: &Path, file: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(file);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}

pub fn write_json<V: Serialize>(dir: &Path, file: &str, value: &V) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(file);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_headered_and_plain() {
        let dir = tempfile::tempdir().unwrap();
        let header = vec!["a".to_string(), "b".to_string()];
        let rows = vec![vec![num(1.5e-7), "true".into()], vec![num(1234.0), "false".into()]];
        let path = write_csv(dir.path(), "t.csv", &header, &rows).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text, "a,b\n1.5e-7,true\n1.234e3,false\n");
        let back: f64 = "1.234e3".parse().unwrap();
        assert_eq!(back, 1234.0);
    }

    #[test]
    fn json_lands_in_a_fresh_directory() {
        let dir = tempfile::tempdir().unwrap();
        let nested = dir.path().join("x/y");
        let path = write_json(&nested, "v.json", &serde_json::json!({"k": 1})).unwrap();
        assert!(fs::read_to_string(path).unwrap().contains("\"k\": 1"));
    }
}
