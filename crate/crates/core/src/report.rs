//! CSV output. Reals are written with 17 significant digits in exponent
//! form, so equal inputs give byte-identical files.

use std::io::Write;

use crate::error::{Error, Result};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// A header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

/// One comparison of a measured quantity with its prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaRow {
    pub lemma: &'static str,
    pub fixture: String,
    /// `key=value` pairs joined by `;`.
    pub parameters: String,
    pub measured: f64,
    pub predicted: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

pub const LEMMA_HEADER: [&str; 8] = [
    "lemma",
    "fixture",
    "parameters",
    "measured",
    "predicted",
    "abs_err",
    "rel_err",
    "pass",
];

pub fn lemma_table(rows: &[LemmaRow]) -> Table {
    let mut t = Table::new(&LEMMA_HEADER);
    for r in rows {
        t.push(vec![
            r.lemma.to_string(),
            r.fixture.clone(),
            r.parameters.clone(),
            fmt_real(r.measured),
            fmt_real(r.predicted),
            fmt_real(r.abs_err),
            fmt_real(r.rel_err),
            fmt_flag(r.pass),
        ]);
    }
    t
}
