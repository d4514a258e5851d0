//! Metric and model files written by the commands.
//!
//! Every file starts with the resolved config: JSON files embed it under a
//! `config` key, JSONL files carry it as the first record and CSV files as
//! a leading `# config {...}` comment line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fedapa_core::model::ModelParams;
use fedapa_core::orchestrator::RoundRecord;
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct OutputError {
    pub path: String,
    pub source: std::io::Error,
}

fn create(path: &Path) -> Result<BufWriter<File>, OutputError> {
    File::create(path).map(BufWriter::new).map_err(|source| OutputError {
        path: path.display().to_string(),
        source,
    })
}

/// Line-oriented writer that remembers its path for error messages.
pub struct TextFile {
    path: PathBuf,
    w: BufWriter<File>,
}

impl TextFile {
    pub fn create(path: &Path) -> Result<Self, OutputError> {
        Ok(TextFile {
            path: path.to_path_buf(),
            w: create(path)?,
        })
    }

    fn err(&self, source: std::io::Error) -> OutputError {
        OutputError {
            path: self.path.display().to_string(),
            source,
        }
    }

    pub fn line(&mut self, s: &str) -> Result<(), OutputError> {
        self.w
            .write_all(s.as_bytes())
            .and_then(|_| self.w.write_all(b"\n"))
            .map_err(|e| self.err(e))
    }

    pub fn finish(mut self) -> Result<(), OutputError> {
        self.w.flush().map_err(|e| self.err(e))
    }
}

/// CSV with the config comment line and a header row.
pub fn csv_file(path: &Path, config: &Map<String, Value>, header: &[&str]) -> Result<TextFile, OutputError> {
    let mut f = TextFile::create(path)?;
    f.line(&format!("# config {}", Value::Object(config.clone())))?;
    f.line(&header.join(","))?;
    Ok(f)
}

/// The config header record of a metrics file.
pub fn config_record(config: &Map<String, Value>) -> String {
    json!({ "type": "config", "config": config }).to_string()
}

/// One round as a JSONL line, `type` first and the record fields in
/// declaration order.
pub fn round_record(r: &RoundRecord) -> String {
    let mut m = Map::new();
    m.insert("type".into(), json!("round"));
    if let Value::Object(fields) = serde_json::to_value(r).expect("round records serialize") {
        m.extend(fields);
    }
    Value::Object(m).to_string()
}

/// `x` exactly as serde_json prints it, so that the summary matches the
/// metrics file.
pub fn num(x: f64) -> String {
    Value::from(x).to_string()
}

/// The one-line run summary.
pub fn summary_line(r: &RoundRecord) -> String {
    format!(
        "round={} mean_acc={} weighted_acc={} transmitted={}",
        r.round,
        num(r.mean_acc),
        num(r.weighted_acc),
        r.cumulative_transmitted
    )
}

/// Weight matrix after one round as an M x M CSV.
pub fn write_weights(
    path: &Path,
    config: &Map<String, Value>,
    weights: &[Vec<f64>],
) -> Result<(), OutputError> {
    let header: Vec<String> = (0..weights.len()).map(|j| format!("a{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut f = csv_file(path, config, &header)?;
    for row in weights {
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        f.line(&cells.join(","))?;
    }
    f.finish()
}

/// Final per-client models with their layouts.
pub fn write_models(
    path: &Path,
    config: &Map<String, Value>,
    models: &[ModelParams],
) -> Result<(), OutputError> {
    let clients: Vec<Value> = models
        .iter()
        .enumerate()
        .map(|(i, m)| {
            json!({
                "client": i,
                "theta": { "layout": m.theta.layout(), "values": m.theta.values() },
                "phi": { "layout": m.phi.layout(), "values": m.phi.values() },
            })
        })
        .collect();
    let doc = json!({ "config": config, "models": clients });
    let mut f = TextFile::create(path)?;
    f.line(&doc.to_string())?;
    f.finish()
}
