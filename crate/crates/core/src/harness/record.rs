//! In-memory CSV tables and the manifest written next to them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Result, SpecError};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}").unwrap(),
            Cell::Float(x) => write!(out, "{x:e}").unwrap(),
            Cell::Text(s) => out.push_str(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// A CSV file held in memory. Floats render with `{:e}`, the shortest
/// representation that parses back exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    fn index(&self, column: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == column)
            .unwrap_or_else(|| panic!("{} has no column {column}", self.name))
    }

    /// A numeric column. Panics if the column is missing or textual.
    pub fn column(&self, column: &str) -> Vec<f64> {
        let i = self.index(column);
        self.rows.iter().map(|r| r[i].as_f64().expect("numeric column")).collect()
    }

    /// Rows whose text column `key` equals `value`.
    pub fn filter(&self, key: &str, value: &str) -> Table {
        let i = self.index(key);
        Table {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows: self.rows.iter().filter(|r| r[i].as_str() == Some(value)).cloned().collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                c.render(&mut s);
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Completed,
    /// The first sweep member that produced non-finite values.
    BlowUp { run: String, t: f64 },
}

/// Everything one experiment produced.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    pub outcome: RunOutcome,
    pub wall_time: f64,
}

impl RunRecord {
    pub fn table(&self, name: &str) -> &Table {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .unwrap_or_else(|| panic!("no table {name}"))
    }

    /// 0 on completion, 3 on blow-up.
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            RunOutcome::Completed => 0,
            RunOutcome::BlowUp { .. } => 3,
        }
    }

    /// Writes every table as `<name>` under `dir`, then `manifest.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| SpecError::Io(format!("{}: {e}", dir.display())))?;
        let mut digests = Vec::with_capacity(self.tables.len());
        for t in &self.tables {
            let text = t.to_csv();
            let path = dir.join(&t.name);
            fs::write(&path, &text).map_err(|e| SpecError::Io(format!("{}: {e}", path.display())))?;
            digests.push((t.name.as_str(), sha256_hex(text.as_bytes())));
        }
        let path = dir.join("manifest.txt");
        fs::write(&path, self.manifest(&digests)).map_err(|e| SpecError::Io(format!("{}: {e}", path.display())))?;
        Ok(())
    }

    fn manifest(&self, digests: &[(&str, String)]) -> String {
        let mut m = String::new();
        writeln!(m, "version={}", env!("CARGO_PKG_VERSION")).unwrap();
        for (k, v) in self.config.entries() {
            writeln!(m, "config.{k}={v}").unwrap();
        }
        match &self.outcome {
            RunOutcome::Completed => writeln!(m, "outcome=completed").unwrap(),
            RunOutcome::BlowUp { run, t } => {
                writeln!(m, "outcome=blowup").unwrap();
                writeln!(m, "blowup.run={run}").unwrap();
                writeln!(m, "blowup.t={t:e}").unwrap();
            }
        }
        for (name, d) in digests {
            writeln!(m, "sha256.{name}={d}").unwrap();
        }
        writeln!(m, "wall_time_s={:.3}", self.wall_time).unwrap();
        m
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
