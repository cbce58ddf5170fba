//! JSON and CSV emission. Both formats carry the version, seed and the parsed
//! command line, and contain nothing that varies between identical runs.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::{json, Map, Value};

use gsnet_core::statmech::{DecayResult, Method};

use crate::args::Format;

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Fixed CSV columns of a fidelity or decay record.
pub const RECORD_COLUMNS: [&str; 7] = ["p", "N", "F", "beta_f", "f", "stderr", "method"];

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub p: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "F")]
    pub fidelity: Option<f64>,
    pub beta_f: f64,
    pub f: Option<f64>,
    pub stderr: Option<f64>,
    pub method: &'static str,
    #[serde(flatten, skip_serializing_if = "Map::is_empty")]
    pub extra: Map<String, Value>,
}

pub fn method_tag(m: Method) -> &'static str {
    match m {
        Method::Exact => "exact",
        Method::TransferMatrix => "transfer",
        Method::MonteCarlo => "mc",
        Method::GeneratingFunction => "genfunc",
        Method::FirstOrder => "first-order",
        Method::MeanField => "mean-field",
        Method::ClosedForm => "closed-form",
    }
}

impl Record {
    pub fn from_decay(p: f64, r: &DecayResult) -> Self {
        Record {
            p,
            n: r.n,
            fidelity: r.fidelity,
            beta_f: r.beta_f,
            f: r.f,
            stderr: r.stderr,
            method: method_tag(r.method),
            extra: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

pub enum Body {
    Records(Vec<Record>),
    /// Rows of flat objects sharing their keys.
    Rows(Vec<Value>),
    /// A single object; CSV keeps its scalar fields.
    Object(Value),
}

pub struct Report {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
    pub body: Body,
}

impl Report {
    fn to_json(&self) -> Value {
        let body = match &self.body {
            Body::Records(r) => json!({ "records": r }),
            Body::Rows(rows) => json!({ "records": rows }),
            Body::Object(v) => json!({ "result": v }),
        };
        let mut out = json!({
            "version": VERSION,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
        });
        out.as_object_mut().expect("object").extend(body.as_object().expect("object").clone());
        out
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)?;
            }
            Format::Csv => self.write_csv(out)?,
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "# version={VERSION} command={} seed={}", self.command, opt(self.seed))?;
        writeln!(out, "# config={}", serde_json::to_string(&self.config)?)?;
        let mut w = csv::Writer::from_writer(out);
        match &self.body {
            Body::Records(records) => {
                w.write_record(RECORD_COLUMNS)?;
                for r in records {
                    w.write_record([
                        r.p.to_string(),
                        r.n.to_string(),
                        opt(r.fidelity),
                        r.beta_f.to_string(),
                        opt(r.f),
                        opt(r.stderr),
                        r.method.to_string(),
                    ])?;
                }
            }
            Body::Rows(rows) => {
                let columns: Vec<String> = rows
                    .first()
                    .and_then(Value::as_object)
                    .map(|o| o.iter().filter(|(_, v)| is_scalar(v)).map(|(k, _)| k.clone()).collect())
                    .unwrap_or_default();
                w.write_record(&columns)?;
                for row in rows {
                    w.write_record(columns.iter().map(|c| cell(&row[c])))?;
                }
            }
            Body::Object(v) => {
                let fields: Vec<(&String, &Value)> =
                    v.as_object().map(|o| o.iter().filter(|(_, v)| is_scalar(v)).collect()).unwrap_or_default();
                w.write_record(fields.iter().map(|(k, _)| k.as_str()))?;
                w.write_record(fields.iter().map(|(_, v)| cell(v)))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
