use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Format, RunConfig};
use super::CliError;
use crate::ledger::ledger;

/// 17 significant digits, locale independent.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (k, name) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self.rows.iter().map(|r| number(r[k])).collect();
            map.insert(name.clone(), Value::Array(col));
        }
        Value::Object(map)
    }
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(v.to_string()), Value::Number)
}

fn pretty(v: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.into()))?;
    s.push('\n');
    Ok(s)
}

fn sidecar(command: &str, config: &RunConfig, data: &Path) -> Result<(), CliError> {
    let meta = json!({
        "command": command,
        "library_version": env!("CARGO_PKG_VERSION"),
        "data_file": data.file_name().map(|n| n.to_string_lossy().into_owned()),
        "config": config,
        "conventions": ledger(),
    });
    let mut name = data.as_os_str().to_owned();
    name.push(".meta.json");
    std::fs::write(PathBuf::from(name), pretty(&meta)?)?;
    Ok(())
}

fn target(config: &RunConfig, stem: &str, ext: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&config.output.directory)?;
    Ok(config.output.directory.join(format!("{stem}.{ext}")))
}

/// Writes a table in the configured format with its sidecar.
pub fn write_table(command: &str, config: &RunConfig, stem: &str, table: &Table) -> Result<PathBuf, CliError> {
    let (ext, body) = match config.output.format {
        Format::Csv => ("csv", table.to_csv()),
        Format::Json => ("json", pretty(&table.to_json())?),
    };
    let path = target(config, stem, ext)?;
    std::fs::write(&path, body)?;
    sidecar(command, config, &path)?;
    Ok(path)
}

/// Writes a JSON record with its sidecar.
pub fn write_record(command: &str, config: &RunConfig, stem: &str, record: &impl Serialize) -> Result<PathBuf, CliError> {
    let path = target(config, stem, "json")?;
    std::fs::write(&path, pretty(record)?)?;
    sidecar(command, config, &path)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-4.446), "-4.4459999999999997e0");
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(t.to_csv(), "x,y\n1.0000000000000000e0,5.0000000000000000e-1\n");
        assert_eq!(t.to_json()["y"][0], json!(0.5));
    }
}
