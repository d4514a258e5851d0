//! Flat key/value experiment configuration.
//!
//! A config file is TOML whose keys, after flattening `[section]` tables into
//! dotted names, must all come from [`KEYS`]. Anything missing keeps the
//! default from [`ExperimentConfig::default`]. Overrides from the command
//! line use the same key names and win over the file.

use std::collections::BTreeMap;
use std::path::Path;

use fedapa_core::data::SyntheticSpec;
use fedapa_core::fl::{SignConvention, Strategy};
use fedapa_core::orchestrator::{DataSource, ExperimentConfig, PartitionSpec};
use serde_json::{json, Map, Value as Json};
use toml::Value;

/// Every accepted key, in the order used when the resolved config is printed.
pub const KEYS: &[&str] = &[
    "strategy",
    "sign_convention",
    "pms",
    "eta",
    "mu",
    "ablate_clip",
    "ablate_self_weight",
    "ablate_normalize",
    "clients",
    "rounds",
    "local_epochs",
    "batch_size",
    "lr",
    "momentum",
    "participation_fraction",
    "seed",
    "dataset.kind",
    "dataset.path",
    "dataset.clusters",
    "dataset.samples_per_client",
    "dataset.input_dim",
    "dataset.classes",
    "dataset.cluster_shift",
    "partition.kind",
    "partition.alpha",
    "partition.classes_per_client",
    "split.train_fraction",
    "output.dir",
    "output.weight_snapshots",
];

const SECTIONS: &[&str] = &["dataset", "partition", "split", "output"];

const DEFAULT_ALPHA: f64 = 0.1;
const DEFAULT_CLASSES_PER_CLIENT: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {expected}, found {found}")]
    Type {
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("key `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("override `{0}` is not of the form key=value")]
    Override(String),
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Flattened key/value pairs from a file and overrides.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, Value>,
}

impl RawConfig {
    /// Parse TOML text. Unknown keys are rejected here.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            ConfigError::Syntax(e.message().to_string())
        })?;
        let mut raw = RawConfig::default();
        for (k, v) in table {
            match v {
                Value::Table(inner) if SECTIONS.contains(&k.as_str()) => {
                    for (k2, v2) in inner {
                        raw.set(&format!("{k}.{k2}"), v2)?;
                    }
                }
                Value::Table(_) => return Err(ConfigError::UnknownKey(k)),
                other => raw.set(&k, other)?,
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: Value) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    /// Apply a `key=value` override. The value is read as a TOML value
    /// when possible and as a bare string otherwise.
    pub fn set_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (key, text) = spec
            .split_once('=')
            .ok_or_else(|| ConfigError::Override(spec.to_string()))?;
        let key = key.trim();
        let text = text.trim();
        let value = format!("v = {text}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(text.to_string()));
        self.set(key, value)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    /// Resolve against the defaults.
    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let syn = match &cfg.data {
            DataSource::Synthetic(s) => s.clone(),
            DataSource::Csv { .. } => unreachable!("default data source is synthetic"),
        };

        if let Some(s) = self.string("strategy")? {
            cfg.strategy.strategy = match s.as_str() {
                "fedapa" => Strategy::FedApa,
                "fedavg" => Strategy::FedAvg,
                "local_only" => Strategy::LocalOnly,
                _ => return Err(bad("strategy", format!("`{s}` is not one of fedapa, fedavg, local_only"))),
            };
        }
        if let Some(s) = self.string("sign_convention")? {
            cfg.strategy.sign_convention = match s.as_str() {
                "surrogate_descent" => SignConvention::SurrogateDescent,
                "literal_paper" => SignConvention::LiteralPaper,
                _ => {
                    return Err(bad(
                        "sign_convention",
                        format!("`{s}` is not one of surrogate_descent, literal_paper"),
                    ))
                }
            };
        }
        set_opt(&mut cfg.strategy.pms, self.boolean("pms")?);
        if let Some(eta) = self.float("eta")? {
            if !(eta >= 0.0) {
                return Err(bad("eta", format!("must be nonnegative, got {eta}")));
            }
            cfg.strategy.eta = eta;
        }
        if let Some(mu) = self.float("mu")? {
            if !(0.0..=1.0).contains(&mu) {
                return Err(bad("mu", format!("must be in [0, 1], got {mu}")));
            }
            cfg.strategy.mu = mu;
        }
        set_opt(&mut cfg.strategy.ablation.clip, self.boolean("ablate_clip")?);
        set_opt(&mut cfg.strategy.ablation.self_weight, self.boolean("ablate_self_weight")?);
        set_opt(&mut cfg.strategy.ablation.normalize, self.boolean("ablate_normalize")?);

        set_opt(&mut cfg.clients, self.positive("clients")?);
        set_opt(&mut cfg.rounds, self.positive("rounds")?);
        set_opt(&mut cfg.local.epochs, self.count("local_epochs")?);
        set_opt(&mut cfg.local.batch_size, self.positive("batch_size")?);
        if let Some(lr) = self.float("lr")? {
            if !(lr >= 0.0) {
                return Err(bad("lr", format!("must be nonnegative, got {lr}")));
            }
            cfg.local.lr = lr;
        }
        if let Some(m) = self.float("momentum")? {
            if !(0.0..1.0).contains(&m) {
                return Err(bad("momentum", format!("must be in [0, 1), got {m}")));
            }
            cfg.local.momentum = m;
        }
        if let Some(p) = self.float("participation_fraction")? {
            if !(p > 0.0 && p <= 1.0) {
                return Err(bad("participation_fraction", format!("must be in (0, 1], got {p}")));
            }
            cfg.participation_fraction = p;
        }
        if let Some(seed) = self.count("seed")? {
            cfg.master_seed = seed as u64;
        }

        let kind = self.string("dataset.kind")?.unwrap_or_else(|| "synthetic".into());
        let input_dim = self.positive("dataset.input_dim")?;
        let classes = self.positive("dataset.classes")?;
        match kind.as_str() {
            "synthetic" => {
                if self.get("dataset.path").is_some() {
                    return Err(bad("dataset.path", "only valid with dataset.kind = \"csv\""));
                }
                let clusters = self.positive("dataset.clusters")?.unwrap_or(syn.clusters);
                if cfg.clients % clusters != 0 {
                    return Err(bad(
                        "dataset.clusters",
                        format!("{} clients cannot be split evenly into {clusters} clusters", cfg.clients),
                    ));
                }
                let shift = self.float("dataset.cluster_shift")?.unwrap_or(syn.cluster_shift);
                if !shift.is_finite() {
                    return Err(bad("dataset.cluster_shift", "must be finite"));
                }
                let spec = SyntheticSpec {
                    clusters,
                    clients_per_cluster: cfg.clients / clusters,
                    classes: classes.unwrap_or(syn.classes),
                    samples_per_client: self
                        .positive("dataset.samples_per_client")?
                        .unwrap_or(syn.samples_per_client),
                    input_dim: input_dim.unwrap_or(syn.input_dim),
                    cluster_shift: shift,
                    class_sep: syn.class_sep,
                    noise: syn.noise,
                };
                cfg.model.input_dim = spec.input_dim;
                cfg.model.num_classes = spec.classes;
                cfg.data = DataSource::Synthetic(spec);
            }
            "csv" => {
                for key in ["dataset.clusters", "dataset.samples_per_client", "dataset.cluster_shift"] {
                    if self.get(key).is_some() {
                        return Err(bad(key, "only valid with dataset.kind = \"synthetic\""));
                    }
                }
                let path = self
                    .string("dataset.path")?
                    .ok_or_else(|| bad("dataset.path", "required when dataset.kind = \"csv\""))?;
                // Zero means "take it from the file".
                cfg.model.input_dim = input_dim.unwrap_or(0);
                cfg.model.num_classes = classes.unwrap_or(0);
                cfg.data = DataSource::Csv { path };
            }
            _ => return Err(bad("dataset.kind", format!("`{kind}` is not one of synthetic, csv"))),
        }

        let pkind = self.string("partition.kind")?;
        let alpha = self.float("partition.alpha")?;
        let cpc = self.positive("partition.classes_per_client")?;
        cfg.partition = match pkind.as_deref().unwrap_or("by_client") {
            "by_client" => PartitionSpec::ByClient,
            "dirichlet" => {
                let alpha = alpha.unwrap_or(DEFAULT_ALPHA);
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(bad("partition.alpha", format!("must be positive, got {alpha}")));
                }
                PartitionSpec::Dirichlet { alpha }
            }
            "pathological" => {
                let c = cpc.unwrap_or(DEFAULT_CLASSES_PER_CLIENT);
                if cfg.model.num_classes > 0 && c > cfg.model.num_classes {
                    return Err(bad(
                        "partition.classes_per_client",
                        format!("{c} exceeds the {} classes", cfg.model.num_classes),
                    ));
                }
                PartitionSpec::Pathological { classes_per_client: c }
            }
            other => {
                return Err(bad(
                    "partition.kind",
                    format!("`{other}` is not one of by_client, dirichlet, pathological"),
                ))
            }
        };
        if alpha.is_some() && !matches!(cfg.partition, PartitionSpec::Dirichlet { .. }) {
            return Err(bad("partition.alpha", "only valid with partition.kind = \"dirichlet\""));
        }
        if cpc.is_some() && !matches!(cfg.partition, PartitionSpec::Pathological { .. }) {
            return Err(bad(
                "partition.classes_per_client",
                "only valid with partition.kind = \"pathological\"",
            ));
        }

        if let Some(f) = self.float("split.train_fraction")? {
            if !(f > 0.0 && f < 1.0) {
                return Err(bad("split.train_fraction", format!("must be in (0, 1), got {f}")));
            }
            cfg.train_fraction = f;
        }
        if let Some(dir) = self.string("output.dir")? {
            cfg.output.dir = dir;
        }
        set_opt(&mut cfg.output.weight_snapshots, self.boolean("output.weight_snapshots")?);
        Ok(cfg)
    }

    fn typed<T>(
        &self,
        key: &str,
        expected: &'static str,
        f: impl Fn(&Value) -> Option<T>,
    ) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => f(v).map(Some).ok_or_else(|| ConfigError::Type {
                key: key.to_string(),
                expected,
                found: describe(v),
            }),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>, ConfigError> {
        self.typed(key, "a string", |v| v.as_str().map(str::to_string))
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.typed(key, "a boolean", Value::as_bool)
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.typed(key, "a number", |v| match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        })
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.typed(key, "a nonnegative integer", |v| {
            v.as_integer().and_then(|i| usize::try_from(i).ok())
        })
    }

    fn positive(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.count(key)? {
            Some(0) => Err(bad(key, "must be at least 1")),
            n => Ok(n),
        }
    }
}

fn set_opt<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn describe(v: &Value) -> String {
    match v {
        Value::String(s) => format!("string \"{s}\""),
        Value::Integer(i) => format!("integer {i}"),
        Value::Float(f) => format!("float {f}"),
        Value::Boolean(b) => format!("boolean {b}"),
        Value::Datetime(d) => format!("datetime {d}"),
        Value::Array(_) => "an array".into(),
        Value::Table(_) => "a table".into(),
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::FedApa => "fedapa",
        Strategy::FedAvg => "fedavg",
        Strategy::LocalOnly => "local_only",
    }
}

/// The resolved config as flat keys, in [`KEYS`] order. Keys that do not
/// apply to the chosen data source or partition are left out.
pub fn flat_config(cfg: &ExperimentConfig) -> Map<String, Json> {
    let mut m = Map::new();
    let s = &cfg.strategy;
    m.insert("strategy".into(), json!(strategy_name(s.strategy)));
    m.insert(
        "sign_convention".into(),
        json!(match s.sign_convention {
            SignConvention::SurrogateDescent => "surrogate_descent",
            SignConvention::LiteralPaper => "literal_paper",
        }),
    );
    m.insert("pms".into(), json!(s.pms));
    m.insert("eta".into(), json!(s.eta));
    m.insert("mu".into(), json!(s.mu));
    m.insert("ablate_clip".into(), json!(s.ablation.clip));
    m.insert("ablate_self_weight".into(), json!(s.ablation.self_weight));
    m.insert("ablate_normalize".into(), json!(s.ablation.normalize));
    m.insert("clients".into(), json!(cfg.clients));
    m.insert("rounds".into(), json!(cfg.rounds));
    m.insert("local_epochs".into(), json!(cfg.local.epochs));
    m.insert("batch_size".into(), json!(cfg.local.batch_size));
    m.insert("lr".into(), json!(cfg.local.lr));
    m.insert("momentum".into(), json!(cfg.local.momentum));
    m.insert("participation_fraction".into(), json!(cfg.participation_fraction));
    m.insert("seed".into(), json!(cfg.master_seed));
    match &cfg.data {
        DataSource::Synthetic(d) => {
            m.insert("dataset.kind".into(), json!("synthetic"));
            m.insert("dataset.clusters".into(), json!(d.clusters));
            m.insert("dataset.samples_per_client".into(), json!(d.samples_per_client));
            m.insert("dataset.input_dim".into(), json!(d.input_dim));
            m.insert("dataset.classes".into(), json!(d.classes));
            m.insert("dataset.cluster_shift".into(), json!(d.cluster_shift));
        }
        DataSource::Csv { path } => {
            m.insert("dataset.kind".into(), json!("csv"));
            m.insert("dataset.path".into(), json!(path));
            m.insert("dataset.input_dim".into(), json!(cfg.model.input_dim));
            m.insert("dataset.classes".into(), json!(cfg.model.num_classes));
        }
    }
    match &cfg.partition {
        PartitionSpec::ByClient => {
            m.insert("partition.kind".into(), json!("by_client"));
        }
        PartitionSpec::Dirichlet { alpha } => {
            m.insert("partition.kind".into(), json!("dirichlet"));
            m.insert("partition.alpha".into(), json!(alpha));
        }
        PartitionSpec::Pathological { classes_per_client } => {
            m.insert("partition.kind".into(), json!("pathological"));
            m.insert("partition.classes_per_client".into(), json!(classes_per_client));
        }
    }
    m.insert("split.train_fraction".into(), json!(cfg.train_fraction));
    m.insert("output.dir".into(), json!(cfg.output.dir));
    m.insert("output.weight_snapshots".into(), json!(cfg.output.weight_snapshots));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RawConfig::parse("").unwrap().resolve().unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn sections_and_dotted_keys_agree() {
        let a = RawConfig::parse("[dataset]\nclasses = 5\n[partition]\nkind = \"dirichlet\"\nalpha = 0.5\n").unwrap();
        let b = RawConfig::parse("dataset.classes = 5\npartition.kind = \"dirichlet\"\npartition.alpha = 0.5\n").unwrap();
        assert_eq!(a, b);
        let cfg = a.resolve().unwrap();
        assert_eq!(cfg.model.num_classes, 5);
        assert_eq!(cfg.partition, PartitionSpec::Dirichlet { alpha: 0.5 });
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = RawConfig::parse("etaa = 0.1").unwrap_err();
        assert_eq!(e.to_string(), "unknown key `etaa`");
        let e = RawConfig::parse("[dataset]\nshape = 3").unwrap_err();
        assert!(e.to_string().contains("`dataset.shape`"));
        let e = RawConfig::parse("[model]\nx = 1").unwrap_err();
        assert!(e.to_string().contains("`model`"));
    }

    #[test]
    fn overrides_parse_values() {
        let mut raw = RawConfig::default();
        raw.set_override("eta=0.05").unwrap();
        raw.set_override("strategy=fedavg").unwrap();
        raw.set_override("pms = false").unwrap();
        let cfg = raw.resolve().unwrap();
        assert_eq!(cfg.strategy.eta, 0.05);
        assert_eq!(cfg.strategy.strategy, Strategy::FedAvg);
        assert!(!cfg.strategy.pms);
        assert!(matches!(raw.set_override("eta"), Err(ConfigError::Override(_))));
    }

    #[test]
    fn bad_values_name_their_key() {
        for (text, key) in [
            ("mu = 1.5", "mu"),
            ("eta = \"fast\"", "eta"),
            ("clients = 0", "clients"),
            ("clients = 10", "dataset.clusters"),
            ("partition.alpha = 0.3", "partition.alpha"),
            ("dataset.kind = \"csv\"", "dataset.path"),
        ] {
            let e = RawConfig::parse(text).unwrap().resolve().unwrap_err();
            assert!(e.to_string().contains(&format!("`{key}`")), "{text}: {e}");
        }
    }

    #[test]
    fn flat_config_round_trips() {
        let mut raw = RawConfig::parse("strategy = \"local_only\"\npartition.kind = \"pathological\"\n").unwrap();
        raw.set_override("seed=9").unwrap();
        let cfg = raw.resolve().unwrap();
        let flat = flat_config(&cfg);
        let mut again = RawConfig::default();
        for (k, v) in &flat {
            let t = match v {
                Json::String(s) => Value::String(s.clone()),
                Json::Bool(b) => Value::Boolean(*b),
                Json::Number(n) if n.is_u64() => Value::Integer(n.as_u64().unwrap() as i64),
                Json::Number(n) => Value::Float(n.as_f64().unwrap()),
                _ => unreachable!(),
            };
            again.set(k, t).unwrap();
        }
        assert_eq!(again.resolve().unwrap(), cfg);
        let order: Vec<&str> = flat.keys().map(String::as_str).collect();
        let mut sorted = order.clone();
        sorted.sort_by_key(|k| KEYS.iter().position(|x| x == k));
        assert_eq!(order, sorted);
    }
}
