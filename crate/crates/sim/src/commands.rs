//! The `run`, `ablate`, `sweep-mu` and `validate-config` commands.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fedapa_core::data::{Dataset, PartitionResult};
use fedapa_core::fl::{Ablation, Strategy};
use fedapa_core::orchestrator::{build_partition, synthesize, DataSource, ExperimentConfig, RoundRecord, Simulation};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{flat_config, strategy_name, ConfigError, RawConfig};
use crate::data_io::{load_csv, partition_json, write_partition, DataError};
use crate::exec::RayonExecutor;
use crate::output::{self, csv_file, num, OutputError, TextFile};

/// Self-weights swept by default.
pub const DEFAULT_MU_VALUES: [f64; 5] = [0.0, 0.3, 0.5, 0.7, 1.0];

/// Flags shared by all commands. `seed` and `out` win over both the file
/// and `set`; `set` wins over the file.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub set: Vec<String>,
    /// Worker threads for local updates; 0 picks the machine default.
    pub threads: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Core(#[from] fedapa_core::Error),
    #[error("cannot start worker threads: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// 2 for configuration problems, 1 for everything that fails later.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// File, then overrides, then the dedicated flags.
pub fn resolve(opts: &Options) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = match &opts.config {
        Some(p) => RawConfig::load(p)?,
        None => RawConfig::default(),
    };
    for s in &opts.set {
        raw.set_override(s)?;
    }
    let mut cfg = raw.resolve()?;
    if let Some(seed) = opts.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.output.dir = out.display().to_string();
    }
    Ok(cfg)
}

/// Load or generate the data and cut it into shards. For CSV sources the
/// model dimensions are filled in from the file.
pub fn prepare(mut cfg: ExperimentConfig) -> Result<(ExperimentConfig, Dataset, PartitionResult), CliError> {
    let ds = match &cfg.data {
        DataSource::Synthetic(_) => synthesize(&cfg)?.0,
        DataSource::Csv { path } => {
            let classes = (cfg.model.num_classes > 0).then_some(cfg.model.num_classes);
            let ds = load_csv(Path::new(path), classes)?;
            if cfg.model.input_dim > 0 && cfg.model.input_dim != ds.input_dim() {
                return Err(ConfigError::Value {
                    key: "dataset.input_dim".into(),
                    message: format!("{} does not match the {} feature columns of {path}", cfg.model.input_dim, ds.input_dim()),
                }
                .into());
            }
            cfg.model.input_dim = ds.input_dim();
            cfg.model.num_classes = ds.num_classes();
            ds
        }
    };
    let partition = build_partition(&cfg, &ds)?;
    Ok((cfg, ds, partition))
}

/// SHA-256 of the partition file body, hex encoded.
pub fn partition_hash(p: &PartitionResult) -> String {
    let digest = Sha256::digest(partition_json(p).to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn make_dir(dir: &Path) -> Result<(), OutputError> {
    std::fs::create_dir_all(dir).map_err(|source| OutputError {
        path: dir.display().to_string(),
        source,
    })
}

/// Run one experiment and write its files under `output.dir`:
/// `metrics.jsonl`, `models.json`, `partition.json`, `timings.csv` and,
/// when enabled, `weights/round_NNNN.csv`. Prints the summary line and
/// returns the last round record.
pub fn cmd_run(opts: &Options, stdout: &mut dyn Write) -> Result<RoundRecord, CliError> {
    let (cfg, ds, partition) = prepare(resolve(opts)?)?;
    let flat = flat_config(&cfg);
    let out = PathBuf::from(&cfg.output.dir);
    make_dir(&out)?;
    write_partition(&partition, &flat, &out.join("partition.json"))?;
    let exec = RayonExecutor::new(opts.threads)?;
    let mut sim = Simulation::new(cfg.clone(), ds, partition)?;

    let mut metrics = TextFile::create(&out.join("metrics.jsonl"))?;
    metrics.line(&output::config_record(&flat))?;
    let mut timings = csv_file(&out.join("timings.csv"), &flat, &["round", "seconds", "threads"])?;
    if cfg.output.weight_snapshots {
        make_dir(&out.join("weights"))?;
    }
    let mut last = None;
    while !sim.is_finished() {
        let start = Instant::now();
        let mut rec = sim.run_round(&exec)?;
        rec.duration_secs = start.elapsed().as_secs_f64();
        metrics.line(&output::round_record(&rec))?;
        timings.line(&format!("{},{},{}", rec.round, rec.duration_secs, exec.threads()))?;
        if cfg.output.weight_snapshots {
            let path = out.join("weights").join(format!("round_{:04}.csv", rec.round));
            output::write_weights(&path, &flat, &sim.weight_matrix())?;
        }
        last = Some(rec);
    }
    metrics.finish()?;
    timings.finish()?;
    output::write_models(&out.join("models.json"), &flat, &sim.final_models()?)?;

    let last = last.expect("at least one round");
    let _ = writeln!(stdout, "{}", output::summary_line(&last));
    Ok(last)
}

/// One row of the ablation table.
#[derive(Clone, Debug)]
pub struct Variant {
    pub name: &'static str,
    pub strategy: Strategy,
    pub pms: bool,
    pub ablation: Ablation,
}

/// The five post-processing variants followed by the three strategy rows.
pub fn ablation_variants(pms: bool) -> Vec<Variant> {
    let apa = |name, ablation| Variant {
        name,
        strategy: Strategy::FedApa,
        pms,
        ablation,
    };
    let only = |clip, self_weight, normalize| Ablation {
        clip,
        self_weight,
        normalize,
    };
    vec![
        apa("full", Ablation::NONE),
        apa("w/o clipping", only(true, false, false)),
        apa("w/o self-weight", only(false, true, false)),
        apa("w/o normalization", only(false, false, true)),
        apa("w/o all", Ablation::ALL),
        Variant {
            name: "fedavg",
            strategy: Strategy::FedAvg,
            pms: false,
            ablation: Ablation::NONE,
        },
        Variant {
            name: "apa full sharing",
            strategy: Strategy::FedApa,
            pms: false,
            ablation: Ablation::NONE,
        },
        Variant {
            name: "apa+pms",
            strategy: Strategy::FedApa,
            pms: true,
            ablation: Ablation::NONE,
        },
    ]
}

/// Outcome of one configuration averaged over seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub mean_acc: f64,
    pub weighted_acc: f64,
    pub transmitted: u64,
    pub partition_hash: String,
}

type Prepared = (ExperimentConfig, Dataset, PartitionResult);

fn prepare_seeds(base: &ExperimentConfig, seeds: u64) -> Result<Vec<Prepared>, CliError> {
    (0..seeds.max(1))
        .map(|k| {
            let mut c = base.clone();
            c.master_seed = base.master_seed.wrapping_add(k);
            prepare(c)
        })
        .collect()
}

fn run_over_seeds(
    prepared: &[Prepared],
    exec: &RayonExecutor,
    tweak: impl Fn(&mut ExperimentConfig),
) -> Result<Outcome, CliError> {
    let (mut acc, mut wacc, mut sent) = (0.0, 0.0, 0);
    let mut hasher = Sha256::new();
    for (cfg, ds, partition) in prepared {
        let mut c = cfg.clone();
        tweak(&mut c);
        hasher.update(partition_json(partition).to_string().as_bytes());
        let mut sim = Simulation::new(c, ds.clone(), partition.clone())?;
        let last = sim.run(exec)?.pop().expect("at least one round");
        acc += last.mean_acc;
        wacc += last.weighted_acc;
        sent += last.cumulative_transmitted;
    }
    let n = prepared.len() as f64;
    let partition_hash = if prepared.len() == 1 {
        partition_hash(&prepared[0].2)
    } else {
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    };
    Ok(Outcome {
        mean_acc: acc / n,
        weighted_acc: wacc / n,
        transmitted: sent / prepared.len() as u64,
        partition_hash,
    })
}

/// Run the eight ablation variants on identical data and write
/// `ablation.csv`. With `seeds > 1` every number is a mean over the seeds
/// `seed, seed + 1, ...`.
pub fn cmd_ablate(opts: &Options, seeds: u64, stdout: &mut dyn Write) -> Result<Vec<(Variant, Outcome)>, CliError> {
    let base = resolve(opts)?;
    let prepared = prepare_seeds(&base, seeds)?;
    let flat = flat_config(&prepared[0].0);
    let exec = RayonExecutor::new(opts.threads)?;
    let out = PathBuf::from(&base.output.dir);
    make_dir(&out)?;
    let mut csv = csv_file(
        &out.join("ablation.csv"),
        &flat,
        &[
            "variant",
            "strategy",
            "pms",
            "ablate_clip",
            "ablate_self_weight",
            "ablate_normalize",
            "seeds",
            "mean_acc",
            "weighted_acc",
            "transmitted",
            "partition_hash",
        ],
    )?;
    let mut rows = Vec::new();
    for v in ablation_variants(base.strategy.pms) {
        let o = run_over_seeds(&prepared, &exec, |c| {
            c.strategy.strategy = v.strategy;
            c.strategy.pms = v.pms;
            c.strategy.ablation = v.ablation;
        })?;
        let strategy = strategy_name(v.strategy);
        csv.line(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            v.name,
            strategy,
            v.pms,
            v.ablation.clip,
            v.ablation.self_weight,
            v.ablation.normalize,
            prepared.len(),
            num(o.mean_acc),
            num(o.weighted_acc),
            o.transmitted,
            o.partition_hash
        ))?;
        let _ = writeln!(stdout, "{:<18} mean_acc={:.4} weighted_acc={:.4}", v.name, o.mean_acc, o.weighted_acc);
        rows.push((v, o));
    }
    csv.finish()?;
    Ok(rows)
}

/// One FedAPA run per self-weight; writes `sweep_mu.csv`.
pub fn cmd_sweep_mu(
    opts: &Options,
    values: &[f64],
    seeds: u64,
    stdout: &mut dyn Write,
) -> Result<Vec<(f64, Outcome)>, CliError> {
    if let Some(bad) = values.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(ConfigError::Value {
            key: "mu".into(),
            message: format!("sweep value {bad} is outside [0, 1]"),
        }
        .into());
    }
    let base = resolve(opts)?;
    let prepared = prepare_seeds(&base, seeds)?;
    let flat = flat_config(&prepared[0].0);
    let exec = RayonExecutor::new(opts.threads)?;
    let out = PathBuf::from(&base.output.dir);
    make_dir(&out)?;
    let mut csv = csv_file(&out.join("sweep_mu.csv"), &flat, &["mu", "mean_acc", "weighted_acc"])?;
    let mut rows = Vec::new();
    for &mu in values {
        let o = run_over_seeds(&prepared, &exec, |c| {
            c.strategy.strategy = Strategy::FedApa;
            c.strategy.mu = mu;
        })?;
        csv.line(&format!("{},{},{}", num(mu), num(o.mean_acc), num(o.weighted_acc)))?;
        let _ = writeln!(stdout, "mu={mu} mean_acc={:.4}", o.mean_acc);
        rows.push((mu, o));
    }
    csv.finish()?;
    Ok(rows)
}

/// Print the resolved config as flat keys.
pub fn cmd_validate(opts: &Options, stdout: &mut dyn Write) -> Result<Map<String, Value>, CliError> {
    let flat = flat_config(&resolve(opts)?);
    let _ = writeln!(
        stdout,
        "{}",
        serde_json::to_string_pretty(&Value::Object(flat.clone())).expect("config serializes")
    );
    Ok(flat)
}
