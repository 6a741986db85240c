//! Per-check verification records and their CSV / JSON serialization.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub check_id: String,
    pub params: Value,
    pub value: (f64, f64),
    pub oracle: Option<(f64, f64)>,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

impl ReportRow {
    /// A row comparing `value` with `oracle`, passing when `abs_err <= tol`.
    pub fn compare(check_id: &str, params: Value, value: Complex64, oracle: Complex64, tol: f64) -> Self {
        let abs_err = (value - oracle).norm();
        let rel_err = if oracle.norm() > 0.0 { abs_err / oracle.norm() } else { abs_err };
        Self {
            check_id: check_id.to_string(),
            params,
            value: (value.re, value.im),
            oracle: Some((oracle.re, oracle.im)),
            abs_err,
            rel_err,
            pass: abs_err <= tol,
        }
    }

    /// As [`ReportRow::compare`] but judged on the relative error.
    pub fn compare_rel(check_id: &str, params: Value, value: Complex64, oracle: Complex64, tol: f64) -> Self {
        let mut r = Self::compare(check_id, params, value, oracle, f64::INFINITY);
        r.pass = r.rel_err <= tol;
        r
    }

    /// A measured quantity with an upper bound; `oracle` holds the bound.
    pub fn bound(check_id: &str, params: Value, measured: f64, bound: f64) -> Self {
        Self {
            check_id: check_id.to_string(),
            params,
            value: (measured, 0.0),
            oracle: Some((bound, 0.0)),
            abs_err: (measured - bound).max(0.0),
            rel_err: if bound != 0.0 { measured / bound } else { measured },
            pass: measured <= bound,
        }
    }

    /// A measured quantity with no oracle; `pass` is decided by the caller.
    pub fn measurement(check_id: &str, params: Value, value: Complex64, pass: bool) -> Self {
        Self {
            check_id: check_id.to_string(),
            params,
            value: (value.re, value.im),
            oracle: None,
            abs_err: 0.0,
            rel_err: 0.0,
            pass,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "check_id", "params_json", "value_re", "value_im", "oracle_re", "oracle_im", "abs_err",
            "rel_err", "pass",
        ])
        .map_err(csv_err)?;
        for r in &self.rows {
            let (ore, oim) = match r.oracle {
                Some((a, b)) => (fmt_f64(a), fmt_f64(b)),
                None => (String::new(), String::new()),
            };
            wr.write_record([
                r.check_id.clone(),
                r.params.to_string(),
                fmt_f64(r.value.0),
                fmt_f64(r.value.1),
                ore,
                oim,
                fmt_f64(r.abs_err),
                fmt_f64(r.rel_err),
                r.pass.to_string(),
            ])
            .map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}
