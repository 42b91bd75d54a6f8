//! Run artefacts: CSV tables, the JSON report and the manifest.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// One CSV table. Every column header carries a unit in brackets.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        for h in &self.header {
            if !(h.ends_with(']') && h.contains(" [")) {
                return Err(CliError::Io(format!("{}: column `{h}` lacks a unit", self.name)));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| CliError::io(&self.name, e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(|e| CliError::io(&self.name, e))?;
        }
        w.into_inner().map_err(|e| CliError::io(&self.name, e))
    }
}

/// Everything a pipeline produces.
#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub tables: Vec<Table>,
    pub report: Map<String, Value>,
}

impl Outputs {
    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.report.insert(key.to_string(), value.into());
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.report.get(key).and_then(Value::as_f64)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// JSON number, or null for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct ManifestInfo<'a> {
    pub config_text: &'a str,
    pub registry_version: &'a str,
    pub seed: u64,
    pub scenario: &'a str,
}

/// Writes tables, `report.json` and `manifest.json` under `dir`.
pub fn write_all(dir: &Path, out: &Outputs, info: &ManifestInfo) -> CliResult<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let mut files = Map::new();
    let mut written = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> CliResult<()> {
        let path = dir.join(&name);
        fs::write(&path, &bytes).map_err(|e| CliError::io(path.display(), e))?;
        files.insert(name.clone(), Value::String(sha256_hex(&bytes)));
        written.push(name);
        Ok(())
    };
    for t in &out.tables {
        emit(format!("{}.csv", t.name), t.to_csv()?)?;
    }
    let mut report = serde_json::to_vec_pretty(&Value::Object(out.report.clone())).map_err(|e| CliError::io("report.json", e))?;
    report.push(b'\n');
    emit("report.json".into(), report)?;

    let mut manifest = Map::new();
    manifest.insert("tool".into(), Value::String(env!("CARGO_PKG_NAME").into()));
    manifest.insert("tool_version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    manifest.insert("core_version".into(), Value::String(molspin_version().into()));
    manifest.insert("registry_version".into(), Value::String(info.registry_version.into()));
    manifest.insert("config_sha256".into(), Value::String(sha256_hex(info.config_text.as_bytes())));
    manifest.insert("scenario".into(), Value::String(info.scenario.into()));
    manifest.insert("seed".into(), Value::from(info.seed));
    manifest.insert("files".into(), Value::Object(files));
    let mut bytes = serde_json::to_vec_pretty(&Value::Object(manifest)).map_err(|e| CliError::io("manifest.json", e))?;
    bytes.push(b'\n');
    let path = dir.join("manifest.json");
    fs::write(&path, &bytes).map_err(|e| CliError::io(path.display(), e))?;
    written.push("manifest.json".into());
    Ok(written)
}

fn molspin_version() -> &'static str {
    // both crates are versioned together
    env!("CARGO_PKG_VERSION")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitless_header_is_refused() {
        let mut t = Table::new("x", &["B [G]", "gap"]);
        t.push(vec![1.0.into(), 2.0.into()]);
        assert!(t.to_csv().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new("x", &["B [G]", "label [text]"]);
        t.push(vec![0.1.into(), Cell::Text("|0̃0,1/2⟩".into())]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "B [G],label [text]\n1e-1,\"|0̃0,1/2⟩\"\n");
    }

    #[test]
    fn digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
