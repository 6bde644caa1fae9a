//! Tables and their CSV / JSON renderings.
//!
//! Floats are written as `{:.16e}` (17 significant digits) in both formats so reruns are
//! byte-identical and every value round-trips exactly.

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{LabError, LabResult};

/// Version of every table layout documented in `docs/output-schemas.md`.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    /// Empty in CSV, `null` in JSON.
    Missing,
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
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

/// `{:.16e}`, or `NaN` / `inf` / `-inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Missing => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(_) | Cell::Missing => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for table {}",
            self.name
        );
        self.rows.push(row);
    }

    fn write_csv(&self, command: &str, w: &mut impl Write) -> LabResult<()> {
        writeln!(
            w,
            "# kpzlab {command} {} schema_version={SCHEMA_VERSION}",
            self.name
        )?;
        let mut cw = csv::Writer::from_writer(w);
        let err = |e: csv::Error| LabError::Io(std::io::Error::other(e));
        cw.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            cw.write_record(row.iter().map(Cell::csv)).map_err(err)?;
        }
        cw.flush()?;
        Ok(())
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Everything one command emits. The first table is the primary output.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        doc.insert("command".into(), Value::from(self.command));
        doc.insert("config".into(), self.config.clone());
        for t in &self.tables {
            doc.insert(t.name.into(), t.json());
        }
        Value::Object(doc)
    }

    /// Paths that [`Report::write`] produces for `out`.
    pub fn paths(&self, out: &Path, format: Format) -> Vec<PathBuf> {
        match format {
            Format::Json => vec![out.to_path_buf()],
            Format::Csv => self
                .tables
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    if i == 0 {
                        out.to_path_buf()
                    } else {
                        sibling(out, t.name, format)
                    }
                })
                .collect(),
        }
    }

    /// Writes to `out`, or to stdout when `out` is `None`.
    ///
    /// JSON is one document. CSV puts each extra table next to the primary file as
    /// `<stem>_<table>.csv`; on stdout the tables follow each other.
    pub fn write(&self, out: Option<&Path>, format: Format) -> LabResult<()> {
        match out {
            None => {
                let stdout = std::io::stdout();
                let mut w = stdout.lock();
                self.render(&mut w, format)
            }
            Some(path) => match format {
                Format::Json => {
                    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                    self.render(&mut f, format)?;
                    f.flush()?;
                    Ok(())
                }
                Format::Csv => {
                    for (t, p) in self.tables.iter().zip(self.paths(path, format)) {
                        let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
                        t.write_csv(self.command, &mut f)?;
                        f.flush()?;
                    }
                    Ok(())
                }
            },
        }
    }

    /// Renders to any writer; CSV tables are separated by a blank line.
    pub fn render(&self, w: &mut impl Write, format: Format) -> LabResult<()> {
        match format {
            Format::Json => {
                let mut ser =
                    serde_json::Serializer::with_formatter(&mut *w, FullPrecision::default());
                self.to_json()
                    .serialize(&mut ser)
                    .map_err(|e| LabError::Io(e.into()))?;
                writeln!(w)?;
            }
            Format::Csv => {
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(w)?;
                    }
                    t.write_csv(self.command, w)?;
                }
            }
        }
        Ok(())
    }
}

/// Pretty JSON with floats written as `{:.16e}`.
#[derive(Default)]
struct FullPrecision(PrettyFormatter<'static>);

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(format_float(v).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn sibling(out: &Path, name: &str, format: Format) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}_{name}.{}", format.extension()))
}
