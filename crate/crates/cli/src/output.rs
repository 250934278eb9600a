//! Reports and data tables with 17-significant-digit floats.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::spec::{CliError, DataFormat, EXIT_BREAKDOWN, EXIT_CHECK_FAILED};

/// `{:.16e}`: 17 significant digits, enough for a lossless round trip.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Pretty JSON with every float in `{:.16e}` form; non-finite values
/// become `null` before they reach the formatter.
struct Sig17<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_float(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// One declared check against a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, relation: "<=", tolerance, passed: value <= tolerance }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, relation: "<", tolerance, passed: value < tolerance }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, relation: ">=", tolerance, passed: value >= tolerance }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, relation: ">", tolerance, passed: value > tolerance }
    }

    /// A yes/no condition, recorded as `1 == 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: "==",
            tolerance: 1.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

/// Space-separated float list, for vector-valued columns.
pub fn joined(values: &[f64]) -> Cell {
    Cell::Text(values.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(" "))
}

/// A fixed-column data table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => fmt_float(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum J<'a> {
            F(f64),
            I(i64),
            S(&'a str),
            N(Option<()>),
        }
        let records: Vec<Vec<(&str, J)>> = self
            .rows
            .iter()
            .map(|row| {
                self.header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| {
                        let v = match c {
                            Cell::Float(v) => J::F(*v),
                            Cell::Int(v) => J::I(*v),
                            Cell::Text(s) => J::S(s),
                            Cell::Empty => J::N(None),
                        };
                        (*h, v)
                    })
                    .collect()
            })
            .collect();
        struct Record<'a>(&'a [(&'a str, J<'a>)]);
        impl Serialize for Record<'_> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    m.serialize_entry(k, v)?;
                }
                m.end()
            }
        }
        let wrapped: Vec<Record> = records.iter().map(|r| Record(r)).collect();
        to_json(&wrapped)
    }
}

/// Fixed envelope shared by every command; keys serialize in this order.
#[derive(Serialize)]
pub struct Report<'a, P: Serialize, S: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub spec: &'a P,
    pub checks: &'a [Check],
    pub summary: &'a S,
    pub passed: bool,
    pub exit_code: i32,
}

/// Everything a command produces.
pub struct Outcome {
    pub report: String,
    pub table: Table,
    pub passed: bool,
    /// The run ended in a numerical breakdown that it reports rather than
    /// propagates (flow stopped by CFL, self-intersection, ...).
    pub breakdown: bool,
    pub headline: String,
}

pub fn exit_code(passed: bool, breakdown: bool) -> i32 {
    if breakdown {
        EXIT_BREAKDOWN
    } else if passed {
        0
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn outcome<P: Serialize, S: Serialize>(
    command: &str,
    spec: &P,
    checks: Vec<Check>,
    summary: &S,
    table: Table,
    breakdown: bool,
) -> Outcome {
    let passed = checks.iter().all(|c| c.passed);
    let report = Report {
        tool: "hypercurv",
        version: env!("CARGO_PKG_VERSION"),
        command,
        spec,
        checks: &checks,
        summary,
        passed,
        exit_code: exit_code(passed, breakdown),
    };
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let headline = if failed.is_empty() {
        format!("{command}: {} checks passed", checks.len())
    } else {
        format!("{command}: {} of {} checks failed: {}", failed.len(), checks.len(), failed.join(", "))
    };
    Outcome { report: to_json(&report), table, passed, breakdown, headline }
}

pub fn write_outputs(out: &Path, outcome: &Outcome, format: DataFormat) -> Result<(), CliError> {
    let io_err = |e: io::Error, p: &Path| CliError::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(out).map_err(|e| io_err(e, out))?;
    let report = out.join("report.json");
    fs::write(&report, &outcome.report).map_err(|e| io_err(e, &report))?;
    let (name, body) = match format {
        DataFormat::Csv => ("data.csv", outcome.table.to_csv()),
        DataFormat::Json => ("data.json", outcome.table.to_json()),
    };
    let data = out.join(name);
    fs::write(&data, body).map_err(|e| io_err(e, &data))?;
    Ok(())
}
