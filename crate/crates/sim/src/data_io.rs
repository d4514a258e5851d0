//! Dataset CSV files and partition JSON files.
//!
//! CSV layout: one header row, feature columns first, and a final column
//! named `label` holding integer class indices.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fedapa_core::data::{Dataset, PartitionResult};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: row {row}: {message}")]
    Row {
        path: String,
        row: u64,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] fedapa_core::Error),
}

fn csv_error(path: &Path, e: csv::Error) -> DataError {
    let path = path.display().to_string();
    match e.position() {
        Some(p) => DataError::Row {
            path,
            row: p.line(),
            message: e.to_string(),
        },
        None => match e.into_kind() {
            csv::ErrorKind::Io(source) => DataError::Io { path, source },
            other => DataError::Format {
                path,
                message: format!("{other:?}"),
            },
        },
    }
}

/// Load a dataset. `num_classes` of `None` takes one more than the largest
/// label. Rows are numbered by file line, header included.
pub fn load_csv(path: &Path, num_classes: Option<usize>) -> Result<Dataset, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let format = |message: &str| DataError::Format {
        path: path.display().to_string(),
        message: message.to_string(),
    };
    if header.iter().next_back() != Some("label") {
        return Err(format("the last column must be named `label`"));
    }
    let dim = header.len() - 1;
    if dim == 0 {
        return Err(format("no feature columns"));
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = rec.position().map_or(0, |p| p.line());
        let fail = |message: String| DataError::Row {
            path: path.display().to_string(),
            row,
            message,
        };
        if rec.len() != dim + 1 {
            return Err(fail(format!("expected {} fields, found {}", dim + 1, rec.len())));
        }
        for (j, field) in rec.iter().take(dim).enumerate() {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| fail(format!("column {}: `{field}` is not a number", &header[j])))?;
            if !x.is_finite() {
                return Err(fail(format!("column {}: non-finite value", &header[j])));
            }
            features.push(x);
        }
        let raw = rec[dim].trim();
        let y: usize = raw
            .parse()
            .map_err(|_| fail(format!("label `{raw}` is not a nonnegative integer")))?;
        if let Some(c) = num_classes {
            if y >= c {
                return Err(fail(format!("label {y} is not below the {c} classes")));
            }
        }
        labels.push(y);
    }
    if labels.is_empty() {
        return Err(format("no data rows"));
    }
    let classes = num_classes.unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));
    Ok(Dataset::new(features, labels, dim, classes)?)
}

/// Write a dataset with columns `x0..x{d-1},label`. Floats use the shortest
/// representation that reads back to the same value.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<(), DataError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header: Vec<String> = (0..ds.input_dim()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for i in 0..ds.len() {
        let mut rec: Vec<String> = ds.row(i).iter().map(|x| x.to_string()).collect();
        rec.push(ds.label(i).to_string());
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Client id to index list, in client order.
pub fn partition_json(p: &PartitionResult) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = p
        .shards
        .iter()
        .enumerate()
        .map(|(i, s)| (i.to_string(), serde_json::json!(s)))
        .collect();
    serde_json::Value::Object(map)
}

/// Partition file: `{"config": ..., "partition": {"0": [...], ...}}`.
pub fn write_partition(
    p: &PartitionResult,
    config: &serde_json::Map<String, serde_json::Value>,
    path: &Path,
) -> Result<(), DataError> {
    let io = |source| DataError::Io {
        path: path.display().to_string(),
        source,
    };
    let doc = serde_json::json!({ "config": config, "partition": partition_json(p) });
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    serde_json::to_writer(&mut w, &doc).map_err(|e| io(e.into()))?;
    w.write_all(b"\n").map_err(io)?;
    w.flush().map_err(io)
}

/// Read the `partition` member of a partition file.
pub fn read_partition(path: &Path) -> Result<PartitionResult, DataError> {
    let format = |message: String| DataError::Format {
        path: path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    #[derive(serde::Deserialize)]
    struct Doc {
        partition: BTreeMap<String, Vec<usize>>,
    }
    let doc: Doc = serde_json::from_str(&text).map_err(|e| format(e.to_string()))?;
    let map: BTreeMap<usize, Vec<usize>> = doc
        .partition
        .into_iter()
        .map(|(k, v)| k.parse().map(|k| (k, v)))
        .collect::<Result<_, _>>()
        .map_err(|_| format("client ids must be integers".into()))?;
    if map.keys().copied().ne(0..map.len()) {
        return Err(format("client ids must be 0..M without gaps".into()));
    }
    Ok(PartitionResult {
        shards: map.into_values().collect(),
    })
}
