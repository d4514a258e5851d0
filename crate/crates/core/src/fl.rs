//! The aggregation protocol: client local update, server-side adaptive
//! personalized aggregation, and the FedAvg / local-only baselines.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ShardSplit};
use crate::error::invalid;
use crate::model::{sgd_momentum_step, ModelParams, ModelSpec, MomentumState};
use crate::numerics::{delta, linear_combination, norm_slice, ParamMatrix, ParamVector};
use crate::seed::{self, domain};
use crate::{Error, Result};

/// Aggregation strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    FedApa,
    FedAvg,
    LocalOnly,
}

/// Sign of the weight update.
///
/// The gradient of the surrogate `½‖Θ A_i − θ_i‖²` with respect to `A_i`
/// is `−Θᵀ Δθ_i`, so descending it means adding `η Θᵀ Δθ_i`. The
/// published formula subtracts it; both are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// `A_i ← A_i + η Θᵀ Δθ_i` (gradient descent on the surrogate).
    SurrogateDescent,
    /// `A_i ← A_i − η Θᵀ Δθ_i` (formula as printed).
    LiteralPaper,
}

/// Which post-processing steps are switched off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ablation {
    pub clip: bool,
    pub self_weight: bool,
    pub normalize: bool,
}

impl Ablation {
    pub const NONE: Ablation = Ablation {
        clip: false,
        self_weight: false,
        normalize: false,
    };
    pub const ALL: Ablation = Ablation {
        clip: true,
        self_weight: true,
        normalize: true,
    };

    /// Full pipeline: every row ends up on the probability simplex.
    pub fn is_none(&self) -> bool {
        *self == Self::NONE
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    pub eta: f64,
    pub mu: f64,
    pub sign_convention: SignConvention,
    /// Partial model sharing: only the extractor leaves the client.
    pub pms: bool,
    pub ablation: Ablation,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            strategy: Strategy::FedApa,
            eta: 0.01,
            mu: 0.5,
            sign_convention: SignConvention::SurrogateDescent,
            pms: true,
            ablation: Ablation::NONE,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(invalid!("eta must be a finite nonnegative number, got {}", self.eta));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(invalid!("mu must be in [0, 1], got {}", self.mu));
        }
        Ok(())
    }
}

/// Aggregation weights `A_i` of one client.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub owner: usize,
    pub a: Vec<f64>,
}

impl WeightVector {
    /// `e_i`: full self-weight, nothing from anyone else.
    pub fn identity(owner: usize, m: usize) -> Self {
        let mut a = vec![0.0; m];
        a[owner] = 1.0;
        WeightVector { owner, a }
    }

    /// Entries in `[0, 1]` summing to one within `tol`.
    pub fn is_distribution(&self, tol: f64) -> bool {
        self.a.iter().all(|&x| (0.0..=1.0).contains(&x))
            && (self.a.iter().sum::<f64>() - 1.0).abs() <= tol
    }
}

/// Raw weight update `A_i ± η Θᵀ Δθ_i`, before post-processing.
pub fn update_weights(
    a: &[f64],
    store: &ParamMatrix,
    delta_i: &ParamVector,
    eta: f64,
    sign: SignConvention,
) -> Result<Vec<f64>> {
    if a.len() != store.num_columns() {
        return Err(Error::DimensionMismatch {
            context: "update_weights",
            expected: store.num_columns(),
            actual: a.len(),
        });
    }
    let grad = store.transpose_mul(delta_i)?;
    let s = match sign {
        SignConvention::SurrogateDescent => eta,
        SignConvention::LiteralPaper => -eta,
    };
    Ok(a.iter().zip(&grad).map(|(x, g)| x + s * g).collect())
}

/// Clip to `[0, 1]`, set the self-weight to `mu`, divide by the sum; each
/// step is skipped when ablated.
pub fn postprocess(raw: Vec<f64>, i: usize, mu: f64, ablation: Ablation) -> Result<WeightVector> {
    let mut a = raw;
    if i >= a.len() {
        return Err(Error::OutOfRange {
            context: "postprocess owner",
            index: i,
            len: a.len(),
        });
    }
    if !ablation.clip {
        for x in &mut a {
            *x = x.clamp(0.0, 1.0);
        }
    }
    if !ablation.self_weight {
        a[i] = mu;
    }
    if !ablation.normalize {
        let s: f64 = a.iter().sum();
        if s == 0.0 || !s.is_finite() {
            return Err(Error::ZeroWeightSum { client: i });
        }
        for x in &mut a {
            *x /= s;
        }
    }
    Ok(WeightVector { owner: i, a })
}

/// FedAvg: size-weighted mean `Σ_j (n_j / N) θ_j` over the participants.
pub fn fedavg_aggregate(thetas: &[&ParamVector], sizes: &[usize]) -> Result<ParamVector> {
    if thetas.is_empty() {
        return Err(Error::Empty("fedavg participants"));
    }
    if thetas.len() != sizes.len() {
        return Err(Error::DimensionMismatch {
            context: "fedavg sizes",
            expected: thetas.len(),
            actual: sizes.len(),
        });
    }
    let weights = size_weights(sizes)?;
    linear_combination(thetas.iter().copied().zip(weights))
}

/// `n_j / Σ n`.
pub fn size_weights(sizes: &[usize]) -> Result<Vec<f64>> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return Err(invalid!("shard sizes sum to zero"));
    }
    Ok(sizes.iter().map(|&n| n as f64 / total as f64).collect())
}

/// Per-client record of the weight-drift checks made during one server update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftCheck {
    pub client: usize,
    /// `‖A_raw − A_prev‖`.
    pub step: f64,
    /// `η ‖Θ‖_F ‖Δθ_i‖`.
    pub step_bound: f64,
    pub step_ok: bool,
    /// `‖A_raw − e_i‖`.
    pub drift: f64,
    /// `‖A_prev − e_i‖ + 2 η Max ‖Θ‖_F` with the running maximum parameter norm.
    pub drift_bound: f64,
    pub drift_ok: bool,
    /// Post-processing hit an all-zero row and the previous weights were kept.
    pub degenerate: bool,
}

/// Slack allowed on the drift inequalities.
pub const DRIFT_SLACK: f64 = 1e-12;

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + DRIFT_SLACK * rhs.max(1.0)
}

/// Server state: the latest shared parameters of every client and one
/// weight vector per client.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServerState {
    pub theta_store: ParamMatrix,
    pub weights: Vec<WeightVector>,
    pub round: usize,
    pub max_param_norm: f64,
}

impl ServerState {
    /// Store the initial parameters; every weight vector starts at `e_i`.
    pub fn new(initial: Vec<ParamVector>) -> Result<Self> {
        let theta_store = ParamMatrix::new(initial)?;
        let m = theta_store.num_columns();
        let max_param_norm = theta_store.max_column_norm();
        Ok(ServerState {
            weights: (0..m).map(|i| WeightVector::identity(i, m)).collect(),
            theta_store,
            round: 0,
            max_param_norm,
        })
    }

    pub fn num_clients(&self) -> usize {
        self.weights.len()
    }

    /// Personalized parameters `θ̄_i = Σ_j a_{i,j} θ_j`.
    pub fn fedapa_aggregate(&self, i: usize) -> Result<ParamVector> {
        let w = self.weights.get(i).ok_or(Error::OutOfRange {
            context: "fedapa_aggregate client",
            index: i,
            len: self.weights.len(),
        })?;
        self.theta_store.weighted_sum(&w.a)
    }

    /// Rows of the weight matrix.
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        self.weights.iter().map(|w| w.a.clone()).collect()
    }

    /// One server update from the parameters returned by the sampled clients.
    ///
    /// All personalized parameters and weight updates of the round use the
    /// store as it was when the round began; uploaded columns are written
    /// back afterwards. Clients are handled in ascending index order.
    pub fn server_round_fedapa(
        &mut self,
        cfg: &StrategyConfig,
        returns: &[(usize, ParamVector)],
    ) -> Result<Vec<DriftCheck>> {
        if returns.is_empty() {
            return Err(Error::Empty("sampled clients"));
        }
        let mut order: Vec<&(usize, ParamVector)> = returns.iter().collect();
        order.sort_by_key(|(i, _)| *i);
        let m = self.num_clients();
        if let Some((i, _)) = order.iter().find(|(i, _)| *i >= m) {
            return Err(Error::OutOfRange {
                context: "server_round client",
                index: *i,
                len: m,
            });
        }
        if order.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid!("a client returned parameters twice in one round"));
        }

        for (_, theta) in &order {
            self.max_param_norm = self.max_param_norm.max(theta.norm2());
        }
        let fro = self.theta_store.frobenius_norm();
        let mut checks = Vec::with_capacity(order.len());
        let mut next = Vec::with_capacity(order.len());
        for &&(i, ref theta_i) in &order {
            let theta_bar = self.fedapa_aggregate(i)?;
            let d = delta(theta_i, &theta_bar)?;
            let prev = &self.weights[i].a;
            let raw = update_weights(prev, &self.theta_store, &d, cfg.eta, cfg.sign_convention)?;
            if let Some(index) = raw.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    context: "aggregation weights",
                    index,
                });
            }

            let step = norm_slice(&diff(&raw, prev));
            let step_bound = cfg.eta * fro * d.norm2();
            let e_i = WeightVector::identity(i, m).a;
            let drift = norm_slice(&diff(&raw, &e_i));
            let drift_bound =
                norm_slice(&diff(prev, &e_i)) + 2.0 * cfg.eta * self.max_param_norm * fro;

            let (row, degenerate) = match postprocess(raw, i, cfg.mu, cfg.ablation) {
                Ok(w) => (w, false),
                Err(Error::ZeroWeightSum { .. }) => (self.weights[i].clone(), true),
                Err(e) => return Err(e),
            };
            checks.push(DriftCheck {
                client: i,
                step,
                step_bound,
                step_ok: within(step, step_bound),
                drift,
                drift_bound,
                drift_ok: within(drift, drift_bound),
                degenerate,
            });
            next.push(row);
        }
        for row in next {
            let i = row.owner;
            self.weights[i] = row;
        }
        for (i, theta) in order {
            self.theta_store.set_column(*i, theta.clone())?;
        }
        self.round += 1;
        Ok(checks)
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Client-side optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalTraining {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub momentum: f64,
    /// Zero the momentum buffer at the start of every round.
    pub reset_momentum: bool,
}

impl Default for LocalTraining {
    fn default() -> Self {
        LocalTraining {
            epochs: 2,
            batch_size: 64,
            lr: 0.01,
            momentum: 0.9,
            reset_momentum: false,
        }
    }
}

/// What a client keeps between rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClientState {
    /// Private head. Overwritten by the download when the whole model is shared.
    pub phi: ParamVector,
    pub momentum: MomentumState,
    pub split: ShardSplit,
    pub seed: u64,
}

/// Result of one local update.
#[derive(Clone, Debug, PartialEq)]
pub struct ClientReturn {
    /// The shared part after training: `θ_i` under partial sharing, else `ω_i`.
    pub upload: ParamVector,
    /// Mean loss over the train split after training.
    pub train_loss: f64,
}

/// Local training: take the download, run `epochs` passes of mini-batch
/// SGD with momentum over the train split, and return the shared part.
///
/// With `pms` the download is the extractor and the head comes from
/// `state`; otherwise the download is the whole model `ω`.
pub fn client_update(
    spec: &ModelSpec,
    download: &ParamVector,
    pms: bool,
    state: &mut ClientState,
    ds: &Dataset,
    round: usize,
    opts: &LocalTraining,
) -> Result<ClientReturn> {
    if state.split.train.is_empty() {
        return Err(Error::Empty("client train split"));
    }
    if opts.batch_size == 0 {
        return Err(invalid!("batch size must be positive"));
    }
    let params = if pms {
        ModelParams {
            theta: download.clone(),
            phi: state.phi.clone(),
        }
    } else {
        ModelParams::from_omega(spec, download)?
    };
    let mut omega = params.omega();
    if *omega.layout() != spec.full_layout() {
        return Err(Error::LayoutMismatch("client download"));
    }
    if opts.reset_momentum {
        state.momentum.reset();
    }

    let round_seed = seed::mix(state.seed, domain::EPOCH, round as u64);
    let mut order = state.split.train.clone();
    for epoch in 0..opts.epochs {
        let mut rng = seed::rng(seed::mix(round_seed, domain::EPOCH, epoch as u64));
        order.shuffle(&mut rng);
        for chunk in order.chunks(opts.batch_size) {
            let current = ModelParams::from_omega(spec, &omega)?;
            let batch = ds.batch(chunk);
            let grad = spec.backward(&current, &batch)?;
            sgd_momentum_step(&mut omega, &grad, &mut state.momentum, opts.lr, opts.momentum)?;
        }
    }

    let trained = ModelParams::from_omega(spec, &omega)?;
    let (train_loss, _) = spec.loss_and_grad(&trained, &ds.batch(&state.split.train))?;
    state.phi = trained.phi.clone();
    let upload = if pms { trained.theta } else { omega };
    Ok(ClientReturn { upload, train_loss })
}

/// Wrap a per-round error with its round index.
pub(crate) fn in_round(round: usize, e: Error) -> Error {
    Error::Round {
        round,
        source: Box::new(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::from_flat(v.to_vec()).unwrap()
    }

    fn store(cols: &[&[f64]]) -> ParamMatrix {
        ParamMatrix::new(cols.iter().map(|c| pv(c)).collect()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn update_weights_examples() {
        let s = store(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let d = delta(&pv(&[1.0, 0.4]), &pv(&[1.0, 0.0])).unwrap();
        let sd = update_weights(&[1.0, 0.0], &s, &d, 0.1, SignConvention::SurrogateDescent).unwrap();
        let lp = update_weights(&[1.0, 0.0], &s, &d, 0.1, SignConvention::LiteralPaper).unwrap();
        assert!(close(&sd, &[1.0, 0.08], 1e-15));
        assert!(close(&lp, &[1.0, -0.08], 1e-15));

        let zero = pv(&[0.0, 0.0]);
        for sign in [SignConvention::SurrogateDescent, SignConvention::LiteralPaper] {
            assert_eq!(update_weights(&[0.3, 0.7], &s, &zero, 0.5, sign).unwrap(), vec![0.3, 0.7]);
        }
        assert!(update_weights(&[1.0], &s, &zero, 0.1, SignConvention::SurrogateDescent).is_err());
    }

    #[test]
    fn postprocess_examples() {
        let w = postprocess(vec![1.0, 0.08], 0, 0.5, Ablation::NONE).unwrap();
        assert!(close(&w.a, &[0.5 / 0.58, 0.08 / 0.58], 1e-15));
        assert!(close(&w.a, &[0.862_069, 0.137_931], 1e-6));

        let w = postprocess(vec![-0.3, 1.4, 0.2], 1, 0.5, Ablation::NONE).unwrap();
        assert!(close(&w.a, &[0.0, 0.5 / 0.7, 0.2 / 0.7], 1e-15));
        assert!(close(&w.a, &[0.0, 0.714_285, 0.285_714], 1e-6));

        let raw = vec![-0.3, 1.4, 0.2];
        let w = postprocess(raw.clone(), 1, 0.5, Ablation::ALL).unwrap();
        assert_eq!(w.a, raw);
    }

    #[test]
    fn postprocess_single_ablations() {
        let raw = vec![-0.3, 1.4, 0.2];
        let no_clip = Ablation { clip: true, ..Ablation::NONE };
        let w = postprocess(raw.clone(), 1, 0.5, no_clip).unwrap();
        assert!(close(&w.a, &[-0.3 / 0.4, 0.5 / 0.4, 0.2 / 0.4], 1e-15));
        let no_self = Ablation { self_weight: true, ..Ablation::NONE };
        let w = postprocess(raw.clone(), 1, 0.5, no_self).unwrap();
        assert!(close(&w.a, &[0.0, 1.0 / 1.2, 0.2 / 1.2], 1e-15));
        let no_norm = Ablation { normalize: true, ..Ablation::NONE };
        let w = postprocess(raw, 1, 0.5, no_norm).unwrap();
        assert_eq!(w.a, vec![0.0, 0.5, 0.2]);
    }

    #[test]
    fn postprocess_zero_sum() {
        assert_eq!(
            postprocess(vec![-1.0, 0.5, -2.0], 1, 0.0, Ablation::NONE).unwrap_err(),
            Error::ZeroWeightSum { client: 1 }
        );
        assert!(postprocess(vec![1.0], 3, 0.5, Ablation::NONE).is_err());
    }

    #[test]
    fn fedavg_examples() {
        let a = pv(&[1.0, 0.0]);
        let b = pv(&[0.0, 2.0]);
        assert_eq!(fedavg_aggregate(&[&a, &b], &[5, 5]).unwrap().values(), &[0.5, 1.0]);
        let z = pv(&[0.0, 0.0]);
        let f = pv(&[4.0, 4.0]);
        assert_eq!(fedavg_aggregate(&[&z, &f], &[1, 3]).unwrap().values(), &[3.0, 3.0]);
        assert_eq!(fedavg_aggregate(&[&a], &[7]).unwrap(), a);
        assert_eq!(fedavg_aggregate(&[], &[]).unwrap_err(), Error::Empty("fedavg participants"));
    }

    #[test]
    fn aggregate_examples() {
        let mut s = ServerState::new(vec![pv(&[1.0, 0.0]), pv(&[0.0, 2.0])]).unwrap();
        assert_eq!(s.fedapa_aggregate(1).unwrap(), pv(&[0.0, 2.0]));
        s.weights[0].a = vec![0.5, 0.5];
        assert_eq!(s.fedapa_aggregate(0).unwrap().values(), &[0.5, 1.0]);
        assert!(s.fedapa_aggregate(2).is_err());
    }

    #[test]
    fn server_round_two_client_toy() {
        // Composed by hand: aggregate -> delta -> surrogate update -> postprocess.
        let mut s = ServerState::new(vec![pv(&[1.0, 0.0]), pv(&[0.0, 2.0])]).unwrap();
        let cfg = StrategyConfig {
            eta: 0.1,
            ..StrategyConfig::default()
        };
        let checks = s.server_round_fedapa(&cfg, &[(0, pv(&[1.0, 0.4]))]).unwrap();
        assert!(close(&s.weights[0].a, &[0.5 / 0.58, 0.08 / 0.58], 1e-15));
        assert_eq!(s.weights[1].a, vec![0.0, 1.0]);
        assert_eq!(s.theta_store.column(0).unwrap(), &pv(&[1.0, 0.4]));
        assert_eq!(s.round, 1);
        let c = &checks[0];
        assert!((c.step - 0.08).abs() < 1e-15);
        assert!((c.step_bound - 0.1 * 5f64.sqrt() * 0.4).abs() < 1e-15);
        assert!(c.step_ok && c.drift_ok && !c.degenerate);
    }

    #[test]
    fn server_round_eta_zero_only_reapplies_postprocessing() {
        let mut s = ServerState::new(vec![pv(&[1.0, 0.0]), pv(&[0.0, 2.0]), pv(&[1.0, 1.0])]).unwrap();
        s.weights[0].a = vec![0.2, 0.3, 0.5];
        let cfg = StrategyConfig {
            eta: 0.0,
            ..StrategyConfig::default()
        };
        s.server_round_fedapa(&cfg, &[(0, pv(&[3.0, 3.0])), (2, pv(&[0.0, 0.0]))]).unwrap();
        let want = postprocess(vec![0.2, 0.3, 0.5], 0, 0.5, Ablation::NONE).unwrap();
        assert_eq!(s.weights[0], want);
        assert_eq!(s.weights[2], postprocess(vec![0.0, 0.0, 1.0], 2, 0.5, Ablation::NONE).unwrap());
        assert_eq!(s.weights[1], WeightVector::identity(1, 3));
    }

    #[test]
    fn server_round_zero_delta_is_raw_fixed_point() {
        let cols = vec![pv(&[1.0, 0.0]), pv(&[0.0, 2.0])];
        let mut s = ServerState::new(cols).unwrap();
        s.weights[0].a = vec![0.6, 0.4];
        s.weights[1].a = vec![0.25, 0.75];
        let before = s.weight_matrix();
        let returns: Vec<_> = (0..2).map(|i| (i, s.fedapa_aggregate(i).unwrap())).collect();
        let checks = s.server_round_fedapa(&StrategyConfig::default(), &returns).unwrap();
        for c in &checks {
            assert_eq!(c.step, 0.0);
        }
        // raw update is a fixed point; only post-processing moved the rows
        for (i, row) in before.into_iter().enumerate() {
            let want = postprocess(row, i, 0.5, Ablation::NONE).unwrap();
            assert_eq!(s.weights[i], want);
        }
    }

    #[test]
    fn server_round_rejects_bad_returns() {
        let mut s = ServerState::new(vec![pv(&[1.0]), pv(&[2.0])]).unwrap();
        let cfg = StrategyConfig::default();
        assert!(s.server_round_fedapa(&cfg, &[]).is_err());
        assert!(s.server_round_fedapa(&cfg, &[(5, pv(&[1.0]))]).is_err());
        assert!(s.server_round_fedapa(&cfg, &[(0, pv(&[1.0])), (0, pv(&[1.0]))]).is_err());
        assert!(s.server_round_fedapa(&cfg, &[(0, pv(&[1.0, 2.0]))]).is_err());
    }

    #[test]
    fn zero_sum_row_keeps_previous_weights() {
        let mut s = ServerState::new(vec![pv(&[1.0]), pv(&[1.0])]).unwrap();
        let cfg = StrategyConfig {
            mu: 0.0,
            eta: 1.0,
            ..StrategyConfig::default()
        };
        // Θᵀ Δθ = (-5, -5): every raw entry clips to zero and μ = 0.
        let checks = s.server_round_fedapa(&cfg, &[(0, pv(&[-4.0]))]).unwrap();
        assert!(checks[0].degenerate);
        assert_eq!(s.weights[0], WeightVector::identity(0, 2));
    }

    #[test]
    fn strategy_config_validation() {
        assert!(StrategyConfig::default().validate().is_ok());
        let bad_mu = StrategyConfig { mu: 1.5, ..StrategyConfig::default() };
        assert!(bad_mu.validate().is_err());
        let bad_eta = StrategyConfig { eta: f64::NAN, ..StrategyConfig::default() };
        assert!(bad_eta.validate().is_err());
    }

    #[test]
    fn weight_vector_identity() {
        let w = WeightVector::identity(2, 4);
        assert_eq!(w.a, vec![0.0, 0.0, 1.0, 0.0]);
        assert!(w.is_distribution(0.0));
    }
}
