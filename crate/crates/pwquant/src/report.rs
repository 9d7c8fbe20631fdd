//! Command output: one JSON document, plus a flat table for `--format csv`.

use pwquant_core::Rational;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub doc: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    /// A report whose CSV form is a single row of the document's scalar fields.
    pub fn single(doc: Map<String, Value>) -> Self {
        let columns: Vec<String> = doc.keys().cloned().collect();
        let row = doc.values().map(cell).collect();
        Report {
            doc: Value::Object(doc),
            columns,
            rows: vec![row],
        }
    }

    /// A report built from rows of identically keyed objects; the JSON form
    /// is `meta` with the rows under `rows`.
    pub fn table(mut meta: Map<String, Value>, rows: Vec<Map<String, Value>>) -> Self {
        let columns: Vec<String> = rows
            .first()
            .map(|r| r.keys().cloned().collect())
            .unwrap_or_default();
        let cells = rows
            .iter()
            .map(|r| columns.iter().map(|c| cell(&r[c])).collect())
            .collect();
        meta.insert(
            "rows".into(),
            Value::Array(rows.into_iter().map(Value::Object).collect()),
        );
        Report {
            doc: Value::Object(meta),
            columns,
            rows: cells,
        }
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.doc).expect("values are serializable");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                Ok(String::from_utf8(bytes).expect("csv of utf-8 input"))
            }
        }
    }
}

/// Flattens a JSON value to one CSV cell; arrays become space-separated.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Inserts `key` as a `num/den` string and `key_float` as its nearest float.
pub fn put_rational(map: &mut Map<String, Value>, key: &str, value: &Rational) {
    map.insert(key.into(), json!(value.to_string()));
    map.insert(format!("{key}_float"), json!(value.to_f64()));
}

pub fn put_optional_rational(map: &mut Map<String, Value>, key: &str, value: Option<&Rational>) {
    match value {
        Some(v) => put_rational(map, key, v),
        None => {
            map.insert(key.into(), Value::Null);
            map.insert(format!("{key}_float"), Value::Null);
        }
    }
}

pub fn rationals(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|v| json!(v.to_string())).collect())
}

pub fn floats(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|v| json!(v.to_f64())).collect())
}
