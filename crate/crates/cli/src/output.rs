//! CSV artifacts: a provenance comment line, a header row, then data rows.
//! The whole table is buffered and written once at the end of a run.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;

pub struct Table {
    writer: csv::Writer<Vec<u8>>,
    columns: usize,
}

impl Table {
    pub fn new(command: &str, scenario_hash: &str, header: &[&str]) -> Self {
        let mut buf = Vec::new();
        // Comment line first so that plain CSV readers can skip it with `#`.
        writeln!(buf, "# hqst {command} scenario={scenario_hash} units: rates in gamma2, times in 1/gamma2")
            .expect("writing to memory");
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        writer.write_record(header).expect("writing to memory");
        Self { writer, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "row width must match the header");
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self, path: Option<&PathBuf>) -> anyhow::Result<()> {
        let bytes = self.writer.into_inner().map_err(|e| anyhow::anyhow!("flushing CSV: {e}"))?;
        match path {
            Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
            None => std::io::stdout().lock().write_all(&bytes).context("writing to stdout"),
        }
    }
}

/// Shortest representation that round-trips, switching to exponent notation
/// for very small and very large magnitudes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
