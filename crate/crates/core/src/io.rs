//! Output plumbing: atomic file writes, CSV curves and JSON metadata.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub const ARTIFACT: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reproduction block attached to every output: artifact, version, command
/// line and the validated configuration.
pub fn metadata<C: Serialize>(command: &str, argv: &[String], config: &C) -> Result<Value> {
    Ok(json!({
        "artifact": ARTIFACT,
        "version": VERSION,
        "command": command,
        "argv": argv,
        "config": serde_json::to_value(config)?,
    }))
}

/// Write `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Send to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Two-column CSV with the given header; floats use shortest round-trip form.
pub fn csv_columns(header: [&str; 2], xs: &[f64], ys: &[f64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for (x, y) in xs.iter().zip(ys) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    Ok(w.into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?)
}

/// CSV with a header row and rows already formatted.
pub fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner()
        .map_err(|e| std::io::Error::other(e.to_string()))?)
}

/// `<path>.json` next to a CSV output.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Write a CSV and, when it goes to a file, its JSON sidecar.
pub fn emit_csv(path: Option<&Path>, csv: &[u8], sidecar: &Value) -> Result<()> {
    emit(path, csv)?;
    if let Some(p) = path {
        write_atomic(&sidecar_path(p), &json_bytes(sidecar)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_floats() {
        let xs = [0.1, 1.0 / 3.0, 1e-300, -2.5e17];
        let bytes = csv_columns(["x", "value"], &xs, &xs).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,value"));
        for (line, x) in lines.zip(xs) {
            let (a, _) = line.split_once(',').unwrap();
            assert_eq!(a.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn atomic_write_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("curve.csv");
        emit_csv(Some(&p), b"x,value\n", &json!({"n": 3})).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "x,value\n");
        let side: Value =
            serde_json::from_str(&std::fs::read_to_string(sidecar_path(&p)).unwrap()).unwrap();
        assert_eq!(side["n"], 3);
    }
}
