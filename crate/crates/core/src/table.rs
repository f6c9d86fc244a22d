//! Flat result tables shared by every subcommand, with CSV and JSON codecs.
//!
//! CSV layout: `# key: value` metadata lines, a header row, then one record
//! per line (LF endings). Floats are written in Rust's shortest round-trip
//! form, so parsing a written table gives back identical values. JSON mirrors
//! the same content as `{"meta": {..}, "columns": [..], "records": [{..}]}`.

use std::fmt;
use std::io::Write;

use serde_json::{Map, Number, Value as Json};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
    /// A field that does not apply to the record.
    Empty,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(i) => Some(i as f64),
            Value::Num(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn parse_field(field: &str) -> Value {
        if field.is_empty() {
            return Value::Empty;
        }
        match field {
            "true" => return Value::Bool(true),
            "false" => return Value::Bool(false),
            _ => {}
        }
        if let Ok(i) = field.parse::<i64>() {
            return Value::Int(i);
        }
        match field.parse::<f64>() {
            Ok(x) => Value::Num(x),
            Err(_) => Value::Text(field.to_string()),
        }
    }

    fn to_json(&self) -> Result<Json> {
        Ok(match self {
            Value::Int(i) => Json::from(*i),
            Value::Num(x) => Json::Number(
                Number::from_f64(*x).ok_or_else(|| Error::Format(format!("{x} has no JSON form")))?,
            ),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
            Value::Empty => Json::Null,
        })
    }

    fn from_json(v: &Json) -> Result<Value> {
        Ok(match v {
            Json::Null => Value::Empty,
            Json::Bool(b) => Value::Bool(*b),
            Json::Number(n) => match n.as_i64() {
                Some(i) => Value::Int(i),
                None => Value::Num(
                    n.as_f64().ok_or_else(|| Error::Format(format!("number {n} out of range")))?,
                ),
            },
            Json::String(s) => Value::Text(s.clone()),
            other => return Err(Error::Format(format!("nested value {other} in a record"))),
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            // Debug is the shortest representation that parses back exactly.
            Value::Num(x) => write!(f, "{x:?}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
            Value::Empty => Ok(()),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<u8> for Value {
    fn from(i: u8) -> Self {
        Value::Int(i as i64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: &str, value: impl fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Format(format!(
                "row has {} fields, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name; empty fields are skipped.
    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .column_index(name)
            .ok_or_else(|| Error::Format(format!("no column '{name}'")))?;
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            match &row[i] {
                Value::Empty => {}
                v => out.push(v.as_f64().ok_or_else(|| {
                    Error::Format(format!("non-numeric value '{v}' in column '{name}'"))
                })?),
            }
        }
        Ok(out)
    }

    fn check_columns(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Format("a table needs at least one column".into()));
        }
        // The header row would read back as a metadata line.
        if self.columns[0].starts_with('#') {
            return Err(Error::Format(format!("first column '{}' starts with '#'", self.columns[0])));
        }
        for (i, c) in self.columns.iter().enumerate() {
            if self.columns[..i].contains(c) {
                return Err(Error::Format(format!("duplicate column '{c}'")));
            }
        }
        Ok(())
    }

    fn check_meta(&self) -> Result<()> {
        for (i, (k, v)) in self.meta.iter().enumerate() {
            if self.meta[..i].iter().any(|(other, _)| other == k) {
                return Err(Error::Format(format!("duplicate metadata key '{k}'")));
            }
            let bad_key = k.is_empty() || k.contains([':', '\n', '\r']) || k.trim() != k;
            if bad_key || v.contains(['\n', '\r']) || v.trim() != v {
                return Err(Error::Format(format!("metadata entry '{k}: {v}' cannot be written")));
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.check_meta()?;
        self.check_columns()?;
        for (k, v) in &self.meta {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.to_string())).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        self.check_meta()?;
        self.check_columns()?;
        let meta: Map<String, Json> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), Json::String(v.clone())))
            .collect();
        let mut records = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut rec = Map::new();
            for (c, v) in self.columns.iter().zip(row) {
                rec.insert(c.clone(), v.to_json()?);
            }
            records.push(Json::Object(rec));
        }
        let doc = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "records": records,
        });
        serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn to_string(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn parse(format: Format, text: &str) -> Result<Table> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Json => parse_json(text),
    }
}

/// Reads the CSV layout produced by [`Table::write_csv`].
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut meta = Vec::new();
    let mut rest = text;
    while rest.starts_with('#') {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        let body = line.trim_end_matches('\r')[1..].trim();
        let (k, v) = body
            .split_once(':')
            .ok_or_else(|| Error::Format(format!("comment line '{line}' is not 'key: value'")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Format("empty metadata key".into()));
        }
        meta.push((k.to_string(), v.trim().to_string()));
        rest = tail;
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
    let columns: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if columns.iter().all(String::is_empty) {
        return Err(Error::Format("missing header row".into()));
    }
    let mut table = Table { meta, columns, rows: Vec::new() };
    table.check_columns()?;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        table.push_row(record.iter().map(Value::parse_field).collect())?;
    }
    Ok(table)
}

/// Reads the JSON layout produced by [`Table::write_json`].
pub fn parse_json(text: &str) -> Result<Table> {
    let doc: Json = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| Error::Format("top level is not an object".into()))?;

    let mut meta = Vec::new();
    match obj.get("meta") {
        None | Some(Json::Null) => {}
        Some(Json::Object(m)) => {
            for (k, v) in m {
                let v = match v {
                    Json::String(s) => s.clone(),
                    other => other.to_string(),
                };
                meta.push((k.clone(), v));
            }
        }
        Some(_) => return Err(Error::Format("'meta' is not an object".into())),
    }

    let columns: Vec<String> = obj
        .get("columns")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Format("missing 'columns' array".into()))?
        .iter()
        .map(|c| c.as_str().map(str::to_string))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Format("column names must be strings".into()))?;
    let records = obj
        .get("records")
        .and_then(Json::as_array)
        .ok_or_else(|| Error::Format("missing 'records' array".into()))?;
    let mut table = Table { meta, columns, rows: Vec::with_capacity(records.len()) };
    table.check_columns()?;
    for (n, rec) in records.iter().enumerate() {
        let rec = rec
            .as_object()
            .ok_or_else(|| Error::Format(format!("record {n} is not an object")))?;
        if rec.len() != table.columns.len() {
            return Err(Error::Format(format!("record {n} has {} fields", rec.len())));
        }
        let row = table
            .columns
            .iter()
            .map(|c| {
                rec.get(c)
                    .ok_or_else(|| Error::Format(format!("record {n} lacks '{c}'")))
                    .and_then(Value::from_json)
            })
            .collect::<Result<Vec<_>>>()?;
        table.rows.push(row);
    }
    Ok(table)
}
