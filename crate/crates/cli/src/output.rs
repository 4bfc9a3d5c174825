//! Deterministic output writers: the primary spectrum table (CSV or JSON),
//! the crosscheck discrepancy table, and the metadata sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{OutputFormat, RunConfig};

pub const CSV_SCHEMA: &str = "stark-spectra.csv/1";
pub const CSV_HEADER: &str = "g,level_index,energy,parity,photon_content,source";

/// One output row; parity and photon stay empty where they do not apply.
#[derive(Debug, Clone)]
pub struct Row {
    pub g: f64,
    pub level_index: usize,
    pub energy: f64,
    pub parity: Option<i8>,
    pub photon_content: Option<f64>,
    pub source: &'static str,
}

/// 17 significant digits, enough to round-trip any f64 exactly.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_rows(path: &Path, format: OutputFormat, rows: &[Row]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => {
            writeln!(w, "# schema: {CSV_SCHEMA}")?;
            writeln!(w, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    fmt_num(r.g),
                    r.level_index,
                    fmt_num(r.energy),
                    r.parity.map(|p| p.to_string()).unwrap_or_default(),
                    r.photon_content.map(fmt_num).unwrap_or_default(),
                    r.source
                )?;
            }
        }
        OutputFormat::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "g": r.g,
                        "level_index": r.level_index,
                        "energy": r.energy,
                        "parity": r.parity,
                        "photon_content": r.photon_content,
                        "source": r.source,
                    })
                })
                .collect();
            let doc = serde_json::json!({ "schema": "stark-spectra.json/1", "rows": items });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

/// One line of the crosscheck discrepancy table.
#[derive(Debug, Clone)]
pub struct Discrepancy {
    pub section: &'static str,
    pub g: f64,
    pub level: usize,
    pub reference: f64,
    pub candidate: f64,
    pub tolerance: f64,
}

impl Discrepancy {
    pub fn abs_diff(&self) -> f64 {
        (self.reference - self.candidate).abs()
    }

    /// Relative to the reference, floored at the unit energy scale so levels
    /// passing through zero do not blow the ratio up.
    pub fn rel_diff(&self) -> f64 {
        self.abs_diff() / self.reference.abs().max(1.0)
    }

    pub fn flagged(&self, relative: bool) -> bool {
        if relative {
            self.rel_diff() > self.tolerance
        } else {
            self.abs_diff() > self.tolerance
        }
    }
}

pub fn write_discrepancies(
    path: &Path,
    rows: &[Discrepancy],
    relative_sections: &[&str],
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# schema: stark-spectra.diff/1")?;
    writeln!(
        w,
        "section,g,level,reference,candidate,abs_diff,rel_diff,flag"
    )?;
    for r in rows {
        let relative = relative_sections.contains(&r.section);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.section,
            fmt_num(r.g),
            r.level,
            fmt_num(r.reference),
            fmt_num(r.candidate),
            fmt_num(r.abs_diff()),
            fmt_num(r.rel_diff()),
            if r.flagged(relative) { 1 } else { 0 }
        )?;
    }
    w.flush()
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_os_string();
    os.push(".meta.json");
    PathBuf::from(os)
}

/// Writes `<out>.meta.json` with the resolved config and run metadata.
pub fn write_sidecar(
    config: &RunConfig,
    runtime: serde_json::Value,
    wall_time_ms: u128,
) -> std::io::Result<()> {
    let doc = serde_json::json!({
        "schema": "stark-spectra.meta/1",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.describe(),
        "runtime": runtime,
        "wall_time_ms": wall_time_ms,
    });
    let mut w = BufWriter::new(File::create(sidecar_path(&config.out_path))?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_num(0.19), "1.9000000000000000e-1");
        assert_eq!(fmt_num(-3.5), "-3.5000000000000000e0");
        // 17 significant digits round-trip any f64 exactly
        for x in [0.1 + 0.2, 1.0 / 3.0, -0.55, 1e-300, 6.02e23] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }
}
