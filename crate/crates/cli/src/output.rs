use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::failure::Failure;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Default)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Failure::Invalid(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| Failure::Invalid(format!("csv: {e}")))
    }
}

/// What a subcommand produced: both renderings plus the verdict.
pub struct Report {
    pub json: String,
    pub table: Table,
    /// Set when a check did not pass.
    pub failure: Option<Failure>,
}

impl Report {
    pub fn new(value: &impl Serialize, table: Table) -> Result<Self, Failure> {
        let json = serde_json::to_string_pretty(value).map_err(|e| Failure::Invalid(format!("json: {e}")))?;
        Ok(Self {
            json,
            table,
            failure: None,
        })
    }

    pub fn fail_if(mut self, failed: bool, message: impl FnOnce() -> String) -> Self {
        if failed && self.failure.is_none() {
            self.failure = Some(Failure::Verification(message()));
        }
        self
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), Failure> {
        let bytes = match format {
            Format::Json => {
                let mut b = self.json.clone().into_bytes();
                b.push(b'\n');
                b
            }
            Format::Csv => self.table.to_bytes()?,
        };
        match out {
            Some(path) => std::fs::write(path, bytes)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }
}
