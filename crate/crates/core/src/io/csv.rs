//! Time-series CSV files. Floats are written in the shortest exponent form
//! that round-trips, so identical runs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{EnergyRecord, RegularityRecord};
use crate::twin::GronwallRow;

pub const ENERGY_COLUMNS: [&str; 10] =
    ["t", "e_kin", "f_free", "e_total", "diss_visc", "diss_rot", "balance_residual", "l2_q", "l4_q", "l6_q"];
pub const REGULARITY_COLUMNS: [&str; 7] = ["t", "phi", "phi1", "phi2", "f", "g", "bg_ratio"];
pub const GRONWALL_COLUMNS: [&str; 3] = ["t", "delta_e", "k_strong"];

pub trait CsvRow {
    const COLUMNS: &'static [&'static str];
    fn values(&self) -> Vec<f64>;
}

impl CsvRow for EnergyRecord {
    const COLUMNS: &'static [&'static str] = &ENERGY_COLUMNS;
    fn values(&self) -> Vec<f64> {
        vec![
            self.t,
            self.e_kin,
            self.f_free,
            self.e_total,
            self.diss_visc,
            self.diss_rot,
            self.balance_residual,
            self.l2_q,
            self.l4_q,
            self.l6_q,
        ]
    }
}

impl CsvRow for RegularityRecord {
    const COLUMNS: &'static [&'static str] = &REGULARITY_COLUMNS;
    fn values(&self) -> Vec<f64> {
        vec![self.t, self.phi, self.phi1, self.phi2, self.f, self.g, self.bg_ratio]
    }
}

impl CsvRow for GronwallRow {
    const COLUMNS: &'static [&'static str] = &GRONWALL_COLUMNS;
    fn values(&self) -> Vec<f64> {
        vec![self.t, self.delta_e, self.k_strong]
    }
}

pub struct CsvWriter<W: Write> {
    out: W,
}

impl CsvWriter<BufWriter<File>> {
    pub fn create<R: CsvRow>(path: impl AsRef<Path>) -> std::io::Result<Self> {
        CsvWriter::new::<R>(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> CsvWriter<W> {
    /// Writes the header for rows of type `R`.
    pub fn new<R: CsvRow>(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{}", R::COLUMNS.join(","))?;
        Ok(CsvWriter { out })
    }

    pub fn write<R: CsvRow>(&mut self, row: &R) -> std::io::Result<()> {
        let line: Vec<String> = row.values().iter().map(|v| format!("{v:e}")).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Writes all `rows` to `path` with a header.
pub fn write_csv<R: CsvRow>(path: impl AsRef<Path>, rows: &[R]) -> std::io::Result<()> {
    let mut w = CsvWriter::create::<R>(path)?;
    for r in rows {
        w.write(r)?;
    }
    w.flush()
}
