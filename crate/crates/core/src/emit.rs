//! CSV and JSON output of [`MetricRecord`]s.

use crate::error::{Error, Result};
use crate::sweep::MetricRecord;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidConfig(format!("unknown output format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: [&str; 9] = ["parameter", "value", "quantity", "analytic", "mc_mean", "mc_ci", "seed", "xi_db", "error"];

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        x.to_string()
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(records: &[MetricRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.parameter.clone(),
            num(r.value),
            r.quantity.clone(),
            opt_num(r.analytic),
            opt_num(r.mc_mean),
            opt_num(r.mc_ci),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            num(r.xi_db),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[MetricRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_records<W: Write>(records: &[MetricRecord], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(records, out),
    }
}

fn parse_opt<T: FromStr>(field: &str, what: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| Error::InvalidConfig(format!("bad {what} field {field:?}")))
}

fn parse_req<T: FromStr>(field: &str, what: &str) -> Result<T> {
    parse_opt(field, what)?.ok_or_else(|| Error::InvalidConfig(format!("missing {what} field")))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidConfig(format!("unexpected CSV header {header:?}")));
    }
    rd.records()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            let f = |i: usize| row.get(i).unwrap_or("");
            Ok(MetricRecord {
                parameter: f(0).to_string(),
                value: parse_req(f(1), "value")?,
                quantity: f(2).to_string(),
                analytic: parse_opt(f(3), "analytic")?,
                mc_mean: parse_opt(f(4), "mc_mean")?,
                mc_ci: parse_opt(f(5), "mc_ci")?,
                seed: parse_opt(f(6), "seed")?,
                xi_db: parse_req(f(7), "xi_db")?,
                error: Some(f(8).to_string()).filter(|s| !s.is_empty()),
            })
        })
        .collect()
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<MetricRecord>> {
    serde_json::from_reader(input).map_err(|e| Error::InvalidConfig(e.to_string()))
}

pub fn read_records<R: Read>(format: Format, input: R) -> Result<Vec<MetricRecord>> {
    match format {
        Format::Csv => read_csv(input),
        Format::Json => read_json(input),
    }
}

/// Write `records` to `destination`, or to stdout when it is `None`.
pub fn emit(records: &[MetricRecord], format: Format, destination: Option<&Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidConfig("nothing to emit".into()));
    }
    match destination {
        Some(path) => {
            let context = |e: Error| match e {
                Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
                e => e,
            };
            let file = std::fs::File::create(path).map_err(|e| context(e.into()))?;
            let mut out = std::io::BufWriter::new(file);
            write_records(records, format, &mut out).map_err(context)?;
            out.flush().map_err(|e| context(e.into()))
        }
        None => write_records(records, format, std::io::stdout().lock()),
    }
}
