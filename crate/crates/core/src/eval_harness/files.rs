use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::HarnessError;

/// Writes `bytes` to a temporary sibling of `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(HarnessError::io(dir))?;
    tmp.write_all(bytes).map_err(HarnessError::io(path))?;
    tmp.persist(path).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(HarnessError::io(path))
}

/// `way_id<TAB>v0,v1,...` per line, ascending way id, shortest round-trip
/// decimal formatting.
pub fn write_vector_file(path: &Path, rows: &BTreeMap<i64, Vec<f64>>) -> Result<(), HarnessError> {
    let mut out = String::new();
    for (id, values) in rows {
        out.push_str(&id.to_string());
        out.push('\t');
        // `+ 0.0` folds -0 into 0 so equal vectors print identically.
        let cols: Vec<String> = values.iter().map(|v| (v + 0.0).to_string()).collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_vector_file(path: &Path) -> Result<BTreeMap<i64, Vec<f64>>, HarnessError> {
    let text = read_to_string(path)?;
    let schema = |line: usize, reason: &str| HarnessError::Schema {
        path: path.to_path_buf(),
        reason: format!("line {line}: {reason}"),
    };
    let mut rows = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, values) = line.split_once('\t').ok_or_else(|| schema(i + 1, "missing tab"))?;
        let id: i64 = id.parse().map_err(|_| schema(i + 1, "invalid way id"))?;
        let values = values
            .split(',')
            .map(|v| v.parse::<f64>().map_err(|_| schema(i + 1, "invalid number")))
            .collect::<Result<Vec<_>, _>>()?;
        rows.insert(id, values);
    }
    Ok(rows)
}
