//! Experiment configuration and the deterministic round engine.
//!
//! [`Simulation`] owns the data, the client states and the server. Each call
//! to [`Simulation::run_round`] samples clients, hands their local updates
//! to a [`ClientExecutor`] (sequential here, multi-threaded in the std
//! companion crate), applies the server update in ascending client order
//! and evaluates every client.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    make_clustered_synthetic, partition_by_client, partition_dirichlet, partition_pathological,
    split_train_test, Dataset, PartitionResult, ShardSplit, SyntheticSpec,
};
use crate::error::invalid;
use crate::fl::{
    client_update, fedavg_aggregate, in_round, ClientReturn, ClientState, DriftCheck,
    LocalTraining, ServerState, Strategy, StrategyConfig,
};
use crate::model::{cross_entropy, ModelParams, ModelSpec, MomentumState};
use crate::numerics::ParamVector;
use crate::seed::{self, domain};
use crate::{Error, Result};

/// Where the data comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Synthetic(SyntheticSpec),
    /// Loaded by the caller; the core crate only records the path.
    Csv { path: String },
}

/// How the dataset is cut into client shards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionSpec {
    /// Contiguous per-client blocks of the synthetic generator.
    ByClient,
    Dirichlet { alpha: f64 },
    Pathological { classes_per_client: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: String,
    pub weight_snapshots: bool,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub data: DataSource,
    pub partition: PartitionSpec,
    pub train_fraction: f64,
    pub clients: usize,
    pub rounds: usize,
    pub local: LocalTraining,
    pub participation_fraction: f64,
    pub strategy: StrategyConfig,
    pub master_seed: u64,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    /// The standard clustered benchmark with the default protocol settings:
    /// 50 rounds, 2 local epochs, batch 64, lr 0.01, momentum 0.9, full
    /// participation, η = 0.01, μ = 0.5.
    fn default() -> Self {
        ExperimentConfig {
            model: ModelSpec {
                input_dim: 64,
                hidden_dims: vec![32, 16],
                num_classes: 8,
            },
            data: DataSource::Synthetic(SyntheticSpec {
                clusters: 3,
                clients_per_cluster: 4,
                classes: 8,
                samples_per_client: 200,
                input_dim: 64,
                cluster_shift: 1.0,
                class_sep: 3.0,
                noise: 5.0,
            }),
            partition: PartitionSpec::ByClient,
            train_fraction: 5.0 / 6.0,
            clients: 12,
            rounds: 50,
            local: LocalTraining::default(),
            participation_fraction: 1.0,
            strategy: StrategyConfig::default(),
            master_seed: 0,
            output: OutputSpec {
                dir: String::from("out"),
                weight_snapshots: false,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(invalid!("rounds must be at least 1"));
        }
        if self.clients == 0 {
            return Err(invalid!("clients must be at least 1"));
        }
        if !(self.participation_fraction > 0.0 && self.participation_fraction <= 1.0) {
            return Err(invalid!(
                "participation_fraction must be in (0, 1], got {}",
                self.participation_fraction
            ));
        }
        if self.local.batch_size == 0 {
            return Err(invalid!("batch_size must be positive"));
        }
        if !(self.local.lr >= 0.0) || !self.local.lr.is_finite() {
            return Err(invalid!("lr must be finite and nonnegative"));
        }
        if !(0.0..1.0).contains(&self.local.momentum) {
            return Err(invalid!("momentum must be in [0, 1)"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid!("train_fraction must be in (0, 1)"));
        }
        ModelSpec::new(
            self.model.input_dim,
            self.model.hidden_dims.clone(),
            self.model.num_classes,
        )?;
        self.strategy.validate()?;
        if let DataSource::Synthetic(s) = &self.data {
            if s.input_dim != self.model.input_dim || s.classes != self.model.num_classes {
                return Err(invalid!("synthetic data dimensions disagree with the model"));
            }
            if self.partition == PartitionSpec::ByClient && s.num_clients() != self.clients {
                return Err(invalid!(
                    "{} clusters x {} clients per cluster != {} clients",
                    s.clusters,
                    s.clients_per_cluster,
                    self.clients
                ));
            }
        }
        Ok(())
    }
}

/// Generate the synthetic dataset of `cfg`. Returns the cluster of each
/// generated client as well.
pub fn synthesize(cfg: &ExperimentConfig) -> Result<(Dataset, Vec<usize>)> {
    match &cfg.data {
        DataSource::Synthetic(s) => make_clustered_synthetic(s, cfg.master_seed),
        DataSource::Csv { .. } => Err(invalid!("CSV data must be loaded by the caller")),
    }
}

/// Cut `ds` into `cfg.clients` shards.
pub fn build_partition(cfg: &ExperimentConfig, ds: &Dataset) -> Result<PartitionResult> {
    let p = match &cfg.partition {
        PartitionSpec::ByClient => {
            let per = match &cfg.data {
                DataSource::Synthetic(s) => s.samples_per_client,
                DataSource::Csv { .. } => ds.len() / cfg.clients,
            };
            partition_by_client(ds, cfg.clients, per)?
        }
        PartitionSpec::Dirichlet { alpha } => {
            partition_dirichlet(ds, cfg.clients, *alpha, cfg.master_seed)?
        }
        PartitionSpec::Pathological { classes_per_client } => {
            partition_pathological(ds, cfg.clients, *classes_per_client, cfg.master_seed)?
        }
    };
    p.validate(ds.len())?;
    Ok(p)
}

/// `⌈fraction · m⌉` distinct clients drawn uniformly, sorted ascending.
pub fn sample_clients<R: Rng + ?Sized>(m: usize, fraction: f64, rng: &mut R) -> Vec<usize> {
    let k = (libm::ceil(fraction * m as f64) as usize).clamp(1.min(m), m);
    let mut ids = rand::seq::index::sample(rng, m, k).into_vec();
    ids.sort_unstable();
    ids
}

/// Accuracy and mean cross-entropy on `test`; argmax ties go to the lowest class.
pub fn evaluate(spec: &ModelSpec, params: &ModelParams, ds: &Dataset, test: &[usize]) -> Result<(f64, f64)> {
    if test.is_empty() {
        return Err(Error::Empty("test split"));
    }
    let mut correct = 0usize;
    let mut loss = 0.0;
    for &i in test {
        let probs = spec.forward(params, ds.row(i))?;
        let y = ds.label(i);
        if argmax(&probs) == y {
            correct += 1;
        }
        loss += cross_entropy(&probs, y)?;
    }
    let n = test.len() as f64;
    Ok((correct as f64 / n, loss / n))
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

/// `Σ (n_i / N) acc_i`.
pub fn weighted_accuracy(accs: &[f64], sizes: &[usize]) -> Result<f64> {
    if accs.len() != sizes.len() {
        return Err(Error::DimensionMismatch {
            context: "weighted_accuracy",
            expected: accs.len(),
            actual: sizes.len(),
        });
    }
    if sizes.contains(&0) || accs.is_empty() {
        return Err(invalid!("weighted accuracy needs positive sizes"));
    }
    let total: usize = sizes.iter().sum();
    Ok(accs
        .iter()
        .zip(sizes)
        .fold(0.0, |acc, (a, &n)| acc + a * (n as f64 / total as f64)))
}

/// Parameters one client moves per round, download plus upload.
pub fn comm_count(spec: &ModelSpec, pms: bool) -> usize {
    2 * if pms { spec.extractor_len() } else { spec.total_len() }
}

/// Metrics of one communication round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub round: usize,
    pub sampled: Vec<usize>,
    pub client_acc: Vec<f64>,
    pub client_loss: Vec<f64>,
    /// Train loss after local training; `None` for clients that sat out.
    pub train_loss: Vec<Option<f64>>,
    pub mean_acc: f64,
    pub weighted_acc: f64,
    pub mean_loss: f64,
    pub transmitted: u64,
    pub cumulative_transmitted: u64,
    pub drift_bound_ok: bool,
    pub drift: Vec<DriftCheck>,
    /// Wall-clock seconds; kept out of the serialized record so that
    /// metric files are reproducible byte for byte.
    #[serde(skip)]
    pub duration_secs: f64,
}

/// Shared inputs of every local update in one round.
#[derive(Clone, Copy, Debug)]
pub struct JobContext<'a> {
    pub spec: &'a ModelSpec,
    pub ds: &'a Dataset,
    pub local: &'a LocalTraining,
    pub pms: bool,
    pub round: usize,
}

/// One pending local update.
#[derive(Debug)]
pub struct ClientJob<'a> {
    pub client: usize,
    pub download: ParamVector,
    pub state: &'a mut ClientState,
    pub ctx: JobContext<'a>,
}

impl ClientJob<'_> {
    pub fn run(self) -> Result<ClientReturn> {
        let c = self.ctx;
        client_update(c.spec, &self.download, c.pms, self.state, c.ds, c.round, c.local)
    }
}

/// Runs a batch of independent local updates.
///
/// Implementations must return results in job order. Each job is a pure
/// function of its inputs, so any scheduling gives identical results.
pub trait ClientExecutor {
    fn run_all(&self, jobs: Vec<ClientJob<'_>>) -> Vec<Result<ClientReturn>>;
}

/// Runs jobs one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl ClientExecutor for Sequential {
    fn run_all(&self, jobs: Vec<ClientJob<'_>>) -> Vec<Result<ClientReturn>> {
        jobs.into_iter().map(ClientJob::run).collect()
    }
}

/// A full experiment in progress.
#[derive(Clone, Debug)]
pub struct Simulation {
    cfg: ExperimentConfig,
    spec: ModelSpec,
    ds: Dataset,
    partition: PartitionResult,
    clients: Vec<ClientState>,
    server: ServerState,
    /// FedAvg global model (shared part).
    global: Option<ParamVector>,
    /// Shared part each client currently evaluates with.
    personalized: Vec<ParamVector>,
    round: usize,
    cumulative: u64,
}

impl Simulation {
    /// Set up clients and server.
    ///
    /// All clients start from one model drawn from the master seed, so that
    /// extractors and heads agree at round zero.
    pub fn new(cfg: ExperimentConfig, ds: Dataset, partition: PartitionResult) -> Result<Self> {
        cfg.validate()?;
        let spec = ModelSpec::new(
            cfg.model.input_dim,
            cfg.model.hidden_dims.clone(),
            cfg.model.num_classes,
        )?;
        if ds.input_dim() != spec.input_dim || ds.num_classes() > spec.num_classes {
            return Err(invalid!(
                "dataset ({} features, {} classes) does not fit the model ({} inputs, {} classes)",
                ds.input_dim(),
                ds.num_classes(),
                spec.input_dim,
                spec.num_classes
            ));
        }
        if partition.num_clients() != cfg.clients {
            return Err(Error::DimensionMismatch {
                context: "partition shards",
                expected: cfg.clients,
                actual: partition.num_clients(),
            });
        }
        partition.validate(ds.len())?;

        let m = cfg.clients;
        let init = spec.init(&mut seed::rng(seed::mix(cfg.master_seed, domain::INIT, 0)));
        let mut clients = Vec::with_capacity(m);
        let mut shared = Vec::with_capacity(m);
        for (i, shard) in partition.shards.iter().enumerate() {
            let cseed = seed::client_seed(cfg.master_seed, i);
            let split: ShardSplit = split_train_test(&ds, shard, cfg.train_fraction, cseed)?;
            shared.push(if cfg.strategy.pms { init.theta.clone() } else { init.omega() });
            clients.push(ClientState {
                phi: init.phi.clone(),
                momentum: MomentumState::zeros(spec.full_layout()),
                split,
                seed: cseed,
            });
        }
        let server = ServerState::new(shared.clone())?;
        let global = match cfg.strategy.strategy {
            Strategy::FedAvg => {
                let refs: Vec<&ParamVector> = shared.iter().collect();
                let sizes: Vec<usize> = clients.iter().map(|c| c.split.train.len()).collect();
                Some(fedavg_aggregate(&refs, &sizes)?)
            }
            _ => None,
        };
        let personalized = match &global {
            Some(g) => vec![g.clone(); m],
            None => shared,
        };
        Ok(Simulation {
            cfg,
            spec,
            ds,
            partition,
            clients,
            server,
            global,
            personalized,
            round: 0,
            cumulative: 0,
        })
    }

    /// Build data and partition from the config (synthetic sources only).
    pub fn from_config(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let (ds, _) = synthesize(&cfg)?;
        let partition = build_partition(&cfg, &ds)?;
        Self::new(cfg, ds, partition)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn dataset(&self) -> &Dataset {
        &self.ds
    }

    pub fn partition(&self) -> &PartitionResult {
        &self.partition
    }

    pub fn server(&self) -> &ServerState {
        &self.server
    }

    pub fn clients(&self) -> &[ClientState] {
        &self.clients
    }

    /// Rounds completed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn is_finished(&self) -> bool {
        self.round >= self.cfg.rounds
    }

    /// Current weight matrix (rows `A_i`).
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        self.server.weight_matrix()
    }

    /// Shard sizes `|D_i|`.
    pub fn shard_sizes(&self) -> Vec<usize> {
        self.partition.shards.iter().map(Vec::len).collect()
    }

    /// The model client `i` is evaluated with: its personalized shared part,
    /// plus its own head under partial sharing.
    pub fn client_model(&self, i: usize) -> Result<ModelParams> {
        let shared = self.personalized.get(i).ok_or(Error::OutOfRange {
            context: "client_model",
            index: i,
            len: self.personalized.len(),
        })?;
        if self.cfg.strategy.pms {
            Ok(ModelParams {
                theta: shared.clone(),
                phi: self.clients[i].phi.clone(),
            })
        } else {
            ModelParams::from_omega(&self.spec, shared)
        }
    }

    /// Final personalized models of every client.
    pub fn final_models(&self) -> Result<Vec<ModelParams>> {
        (0..self.cfg.clients).map(|i| self.client_model(i)).collect()
    }

    /// Test accuracy and loss of every client.
    pub fn evaluate_all(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut accs = Vec::with_capacity(self.clients.len());
        let mut losses = Vec::with_capacity(self.clients.len());
        for (i, c) in self.clients.iter().enumerate() {
            let (a, l) = evaluate(&self.spec, &self.client_model(i)?, &self.ds, &c.split.test)?;
            accs.push(a);
            losses.push(l);
        }
        Ok((accs, losses))
    }

    fn download(&self, i: usize) -> Result<ParamVector> {
        match self.cfg.strategy.strategy {
            Strategy::FedApa => self.server.fedapa_aggregate(i),
            Strategy::LocalOnly => self.server.theta_store.column(i).cloned(),
            Strategy::FedAvg => self.global.clone().ok_or(Error::Empty("FedAvg global model")),
        }
    }

    /// Run one communication round.
    pub fn run_round<E: ClientExecutor + ?Sized>(&mut self, exec: &E) -> Result<RoundRecord> {
        let t = self.round + 1;
        self.step(t, exec).map_err(|e| in_round(t, e))
    }

    fn step<E: ClientExecutor + ?Sized>(&mut self, t: usize, exec: &E) -> Result<RoundRecord> {
        let m = self.cfg.clients;
        let mut rng = seed::rng(seed::round_seed(self.cfg.master_seed, t));
        let sampled = sample_clients(m, self.cfg.participation_fraction, &mut rng);

        let downloads = sampled
            .iter()
            .map(|&i| self.download(i))
            .collect::<Result<Vec<_>>>()?;
        let ctx = JobContext {
            spec: &self.spec,
            ds: &self.ds,
            local: &self.cfg.local,
            pms: self.cfg.strategy.pms,
            round: t,
        };
        let mut jobs = Vec::with_capacity(sampled.len());
        let mut dl = downloads.into_iter();
        let mut next = sampled.iter().peekable();
        for (i, state) in self.clients.iter_mut().enumerate() {
            if next.peek() == Some(&&i) {
                next.next();
                jobs.push(ClientJob {
                    client: i,
                    download: dl.next().ok_or(Error::Empty("downloads"))?,
                    state,
                    ctx,
                });
            }
        }
        let results = exec.run_all(jobs);
        if results.len() != sampled.len() {
            return Err(invalid!("executor returned {} results for {} jobs", results.len(), sampled.len()));
        }
        let mut returns = Vec::with_capacity(sampled.len());
        let mut train_loss = vec![None; m];
        for (&i, r) in sampled.iter().zip(results) {
            let r = r?;
            train_loss[i] = Some(r.train_loss);
            returns.push((i, r.upload));
        }

        let mut drift = Vec::new();
        match self.cfg.strategy.strategy {
            Strategy::FedApa => {
                drift = self.server.server_round_fedapa(&self.cfg.strategy, &returns)?;
                for &i in &sampled {
                    self.personalized[i] = self.server.fedapa_aggregate(i)?;
                }
            }
            Strategy::LocalOnly => {
                for (i, up) in returns {
                    self.server.theta_store.set_column(i, up.clone())?;
                    self.personalized[i] = up;
                }
                self.server.round += 1;
            }
            Strategy::FedAvg => {
                let refs: Vec<&ParamVector> = returns.iter().map(|(_, p)| p).collect();
                let sizes: Vec<usize> = sampled
                    .iter()
                    .map(|&i| self.clients[i].split.train.len())
                    .collect();
                let g = fedavg_aggregate(&refs, &sizes)?;
                for (i, up) in returns {
                    self.server.theta_store.set_column(i, up)?;
                }
                self.personalized = vec![g.clone(); m];
                self.global = Some(g);
                self.server.round += 1;
            }
        }

        let transmitted = match self.cfg.strategy.strategy {
            Strategy::LocalOnly => 0,
            _ => (comm_count(&self.spec, self.cfg.strategy.pms) * sampled.len()) as u64,
        };
        self.cumulative += transmitted;

        let (client_acc, client_loss) = self.evaluate_all()?;
        let sizes = self.shard_sizes();
        let mean_acc = client_acc.iter().sum::<f64>() / m as f64;
        let mean_loss = client_loss.iter().sum::<f64>() / m as f64;
        let weighted_acc = weighted_accuracy(&client_acc, &sizes)?;
        self.round = t;
        Ok(RoundRecord {
            round: t,
            sampled,
            client_acc,
            client_loss,
            train_loss,
            mean_acc,
            weighted_acc,
            mean_loss,
            transmitted,
            cumulative_transmitted: self.cumulative,
            drift_bound_ok: drift.iter().all(|d| d.step_ok),
            drift,
            duration_secs: 0.0,
        })
    }

    /// Run all remaining rounds.
    pub fn run<E: ClientExecutor + ?Sized>(&mut self, exec: &E) -> Result<Vec<RoundRecord>> {
        let mut out = Vec::with_capacity(self.cfg.rounds.saturating_sub(self.round));
        while !self.is_finished() {
            out.push(self.run_round(exec)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.rounds = 3;
        cfg.model.input_dim = 4;
        cfg.model.hidden_dims = vec![6];
        cfg.model.num_classes = 3;
        cfg.clients = 4;
        cfg.data = DataSource::Synthetic(SyntheticSpec {
            clusters: 2,
            clients_per_cluster: 2,
            classes: 3,
            samples_per_client: 24,
            input_dim: 4,
            cluster_shift: 1.0,
            class_sep: 1.0,
            noise: 0.5,
        });
        cfg
    }

    #[test]
    fn sample_examples() {
        let mut rng = seed::rng(1);
        assert_eq!(sample_clients(20, 1.0, &mut rng), (0..20).collect::<Vec<_>>());
        let s = sample_clients(20, 0.6, &mut rng);
        assert_eq!(s.len(), 12);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_clients(7, 0.01, &mut rng).len(), 1);
        let a = sample_clients(20, 0.6, &mut seed::rng(seed::round_seed(3, 4)));
        let b = sample_clients(20, 0.6, &mut seed::rng(seed::round_seed(3, 4)));
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_accuracy_examples() {
        assert!((weighted_accuracy(&[0.2, 0.4, 0.9], &[5, 5, 5]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(weighted_accuracy(&[1.0, 0.0], &[1, 3]).unwrap(), 0.25);
        assert_eq!(weighted_accuracy(&[0.7], &[10]).unwrap(), 0.7);
        assert!(weighted_accuracy(&[0.7], &[10, 2]).is_err());
        assert!(weighted_accuracy(&[0.7], &[0]).is_err());
    }

    #[test]
    fn comm_count_examples() {
        let spec = ModelSpec::new(4, vec![8], 3).unwrap();
        assert_eq!(comm_count(&spec, true), 80);
        assert_eq!(comm_count(&spec, false), 134);
    }

    #[test]
    fn evaluate_examples() {
        let ds = Dataset::new(vec![1.0, -1.0, 2.0, 0.5], vec![0, 1, 1, 0], 1, 2).unwrap();
        let spec = ModelSpec::new(1, vec![2], 2).unwrap();
        let zero = ModelParams {
            theta: ParamVector::zeros(spec.extractor_layout()),
            phi: ParamVector::zeros(spec.head_layout()),
        };
        // uniform output: ties go to class 0, which is half of this set
        let (acc, loss) = evaluate(&spec, &zero, &ds, &[0, 1, 2, 3]).unwrap();
        assert_eq!(acc, 0.5);
        assert!((loss - libm::log(2.0)).abs() < 1e-15);
        let (acc, _) = evaluate(&spec, &zero, &ds, &[0, 1, 2]).unwrap();
        assert!((acc - 1.0 / 3.0).abs() < 1e-15);
        assert!(evaluate(&spec, &zero, &ds, &[]).is_err());
    }

    #[test]
    fn evaluate_perfect_model() {
        // hidden unit = relu(x); head logit_1 = 100 * h - 50, logit_0 = 0
        let ds = Dataset::new(vec![0.0, 1.0, 0.0, 1.0], vec![0, 1, 0, 1], 1, 2).unwrap();
        let spec = ModelSpec::new(1, vec![1], 2).unwrap();
        let params = ModelParams {
            theta: ParamVector::new(vec![1.0, 0.0], spec.extractor_layout()).unwrap(),
            phi: ParamVector::new(vec![0.0, 100.0, 0.0, -50.0], spec.head_layout()).unwrap(),
        };
        let (acc, loss) = evaluate(&spec, &params, &ds, &[0, 1, 2, 3]).unwrap();
        assert_eq!(acc, 1.0);
        assert!(loss < 1e-20);
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let mut c = ExperimentConfig::default();
        c.rounds = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.participation_fraction = 0.0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.clients = 10;
        assert!(c.validate().is_err());
    }

    #[test]
    fn rounds_are_deterministic() {
        let mut a = Simulation::from_config(small_cfg()).unwrap();
        let mut b = Simulation::from_config(small_cfg()).unwrap();
        let ra = a.run(&Sequential).unwrap();
        let rb = b.run(&Sequential).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(ra.len(), 3);
        assert_eq!(a.weight_matrix(), b.weight_matrix());
    }

    #[test]
    fn transmitted_counts() {
        for (strategy, pms) in [
            (Strategy::FedApa, true),
            (Strategy::FedApa, false),
            (Strategy::FedAvg, false),
            (Strategy::LocalOnly, true),
        ] {
            let mut cfg = small_cfg();
            cfg.strategy.strategy = strategy;
            cfg.strategy.pms = pms;
            let mut sim = Simulation::from_config(cfg).unwrap();
            let per = comm_count(sim.spec(), pms) as u64;
            let mut total = 0;
            for r in sim.run(&Sequential).unwrap() {
                let want = if strategy == Strategy::LocalOnly {
                    0
                } else {
                    per * r.sampled.len() as u64
                };
                assert_eq!(r.transmitted, want);
                total += want;
                assert_eq!(r.cumulative_transmitted, total);
            }
        }
    }

    #[test]
    fn round_errors_carry_index() {
        let mut sim = Simulation::from_config(small_cfg()).unwrap();
        struct Broken;
        impl ClientExecutor for Broken {
            fn run_all(&self, _: Vec<ClientJob<'_>>) -> Vec<Result<ClientReturn>> {
                Vec::new()
            }
        }
        match sim.run_round(&Broken) {
            Err(Error::Round { round: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
