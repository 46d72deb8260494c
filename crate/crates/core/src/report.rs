//! Serialization of bound reports as JSON and CSV.
//!
//! CSV columns are fixed: `method, problem, n, m, family_size, epsilon,
//! lambda, eta, numerator, denominator, bound, witness_x, flags`. Floats are
//! written in shortest round-trip form; `flags` are joined with `;`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, Method};
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 13] = [
    "method",
    "problem",
    "n",
    "m",
    "family_size",
    "epsilon",
    "lambda",
    "eta",
    "numerator",
    "denominator",
    "bound",
    "witness_x",
    "flags",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub method: Method,
    pub problem: String,
    pub n: usize,
    pub m: usize,
    pub family_size: usize,
    pub epsilon: f64,
    pub lambda: Option<f64>,
    pub eta: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub bound: f64,
    pub witness_x: usize,
    pub flags: String,
}

impl From<&BoundReport> for CsvRow {
    fn from(r: &BoundReport) -> Self {
        Self {
            method: r.method,
            problem: r.problem.clone(),
            n: r.input_size,
            m: r.output_size,
            family_size: r.family_size,
            epsilon: r.epsilon,
            lambda: r.lambda_threshold,
            eta: r.eta,
            numerator: r.numerator,
            denominator: r.denominator,
            bound: r.bound,
            witness_x: r.witness_x,
            flags: r.flags.join(";"),
        }
    }
}

pub fn write_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in reports {
        w.serialize(CsvRow::from(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

pub fn to_csv(reports: &[BoundReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(reports: &[BoundReport], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(reports),
        Format::Csv => to_csv(reports),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{additive_bound, hybrid_bound, search_additive};
    use crate::problems::build_search;

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(to_csv(&[]).unwrap(), CSV_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn rows_round_trip() {
        let p = build_search(4).unwrap();
        let adv = search_additive(4).unwrap();
        let mut reports: Vec<BoundReport> = (0..11)
            .map(|i| hybrid_bound(&adv, &p, i as f64 * 0.07, -1.0 / 3.0).unwrap())
            .collect();
        reports.push(additive_bound(&adv, &p, 0.3).unwrap());
        let text = to_csv(&reports).unwrap();
        let rows = read_csv(&text).unwrap();
        assert_eq!(rows.len(), 12);
        for (row, rep) in rows.iter().zip(&reports) {
            assert_eq!(row, &CsvRow::from(rep));
        }
        assert!(rows[..11].windows(2).all(|w| w[0].epsilon < w[1].epsilon));
        assert_eq!(rows[11].flags, "method vacuous");
        assert!(rows[11].lambda.is_none());
    }
}
