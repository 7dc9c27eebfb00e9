//! Flat records shared by the CSV and JSON writers.

use std::io::Write;

use serde_json::{Map, Value};

use crate::VERSION_TAG;

/// One output row: named parameters followed by the fixed result columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    pub params: Vec<(String, Value)>,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub reference: Option<f64>,
    pub deviation: Option<f64>,
}

impl Record {
    pub fn new(quantity: &str) -> Self {
        Record {
            params: vec![("quantity".into(), Value::from(quantity))],
            ..Default::default()
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.push((key.into(), v.into()));
        self
    }

    pub fn params(mut self, kv: &[(String, Value)]) -> Self {
        self.params.extend_from_slice(kv);
        self
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn stderr(mut self, v: f64) -> Self {
        self.stderr = Some(v);
        self
    }

    /// Sets the reference and the signed deviation `value − reference`.
    pub fn reference(mut self, r: f64) -> Self {
        self.reference = Some(r);
        if let Some(v) = self.value {
            self.deviation = Some(v - r);
        }
        self
    }

    pub fn deviation(mut self, d: f64) -> Self {
        self.deviation = Some(d);
        self
    }
}

const FIXED: [&str; 6] = ["value", "stderr", "reference", "deviation", "seed", "version"];

/// Union of parameter names in first-seen order.
fn param_columns(records: &[Record]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in records {
        for (k, _) in &r.params {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

/// Shortest round-trip form, switching to exponent notation at the extremes.
fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-6..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn num(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn write_csv<W: Write>(out: W, records: &[Record], seed: u64) -> std::io::Result<()> {
    let cols = param_columns(records);
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = cols
        .iter()
        .map(|c| format!("param.{c}"))
        .chain(FIXED.iter().map(|s| s.to_string()))
        .collect();
    w.write_record(&header)?;
    for r in records {
        let mut row: Vec<String> = cols
            .iter()
            .map(|c| r.params.iter().find(|(k, _)| k == c).map(|(_, v)| cell(v)).unwrap_or_default())
            .collect();
        row.extend([
            num(r.value),
            num(r.stderr),
            num(r.reference),
            num(r.deviation),
            seed.to_string(),
            VERSION_TAG.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()
}

fn json_num(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => Value::from(x),
        Some(x) => Value::from(x.to_string()),
        None => Value::Null,
    }
}

pub fn to_json(records: &[Record], seed: u64, config: Value) -> Value {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let mut m = Map::new();
            for (k, v) in &r.params {
                m.insert(format!("param.{k}"), v.clone());
            }
            m.insert("value".into(), json_num(r.value));
            m.insert("stderr".into(), json_num(r.stderr));
            m.insert("reference".into(), json_num(r.reference));
            m.insert("deviation".into(), json_num(r.deviation));
            m.insert("seed".into(), Value::from(seed));
            m.insert("version".into(), Value::from(VERSION_TAG));
            Value::Object(m)
        })
        .collect();
    let mut top = Map::new();
    top.insert("version".into(), Value::from(VERSION_TAG));
    top.insert("config".into(), config);
    top.insert("records".into(), Value::Array(rows));
    Value::Object(top)
}
