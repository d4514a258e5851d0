use fedapa_core::data::{make_clustered_synthetic, partition_by_client, split_train_test, SyntheticSpec};
use fedapa_core::fl::{client_update, ClientState, LocalTraining, Strategy};
use fedapa_core::model::{sgd_momentum_step, ModelParams, ModelSpec, MomentumState};
use fedapa_core::orchestrator::{DataSource, ExperimentConfig, Sequential, Simulation};
use fedapa_core::seed;

fn small_cfg() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.rounds = 4;
    cfg.model.input_dim = 5;
    cfg.model.hidden_dims = vec![8, 6];
    cfg.model.num_classes = 3;
    cfg.clients = 6;
    cfg.participation_fraction = 0.6;
    cfg.data = DataSource::Synthetic(SyntheticSpec {
        clusters: 3,
        clients_per_cluster: 2,
        classes: 3,
        samples_per_client: 30,
        input_dim: 5,
        cluster_shift: 1.0,
        class_sep: 1.5,
        noise: 0.5,
    });
    cfg
}

struct Fixture {
    spec: ModelSpec,
    ds: fedapa_core::data::Dataset,
    state: ClientState,
    init: ModelParams,
}

fn fixture() -> Fixture {
    let spec = ModelSpec::new(3, vec![5], 2).unwrap();
    let syn = SyntheticSpec {
        clusters: 1,
        clients_per_cluster: 1,
        classes: 2,
        samples_per_client: 24,
        input_dim: 3,
        cluster_shift: 0.0,
        class_sep: 1.0,
        noise: 0.3,
    };
    let (ds, _) = make_clustered_synthetic(&syn, 4).unwrap();
    let shard: Vec<usize> = (0..ds.len()).collect();
    let split = split_train_test(&ds, &shard, 5.0 / 6.0, 4).unwrap();
    let init = spec.init(&mut seed::rng(12));
    let state = ClientState {
        phi: init.phi.clone(),
        momentum: MomentumState::zeros(spec.full_layout()),
        split,
        seed: 99,
    };
    Fixture { spec, ds, state, init }
}

#[test]
fn zero_epochs_return_the_download() {
    let mut f = fixture();
    let opts = LocalTraining {
        epochs: 0,
        ..LocalTraining::default()
    };
    let out = client_update(&f.spec, &f.init.theta, true, &mut f.state, &f.ds, 1, &opts).unwrap();
    assert_eq!(out.upload.values(), f.init.theta.values());
    assert_eq!(f.state.phi.values(), f.init.phi.values());
}

#[test]
fn zero_learning_rate_changes_nothing() {
    let mut f = fixture();
    let opts = LocalTraining {
        epochs: 3,
        batch_size: 5,
        lr: 0.0,
        ..LocalTraining::default()
    };
    let out = client_update(&f.spec, &f.init.theta, true, &mut f.state, &f.ds, 1, &opts).unwrap();
    assert_eq!(out.upload.values(), f.init.theta.values());
    assert_eq!(f.state.phi.values(), f.init.phi.values());
}

#[test]
fn one_full_batch_epoch_is_one_sgd_step() {
    let mut f = fixture();
    let opts = LocalTraining {
        epochs: 1,
        batch_size: 1000,
        lr: 0.05,
        momentum: 0.0,
        reset_momentum: false,
    };
    let batch = f.ds.batch(&f.state.split.train);
    let grad = f.spec.backward(&f.init, &batch).unwrap();
    let mut omega = f.init.omega();
    let mut mom = MomentumState::zeros(f.spec.full_layout());
    sgd_momentum_step(&mut omega, &grad, &mut mom, 0.05, 0.0).unwrap();
    let want = ModelParams::from_omega(&f.spec, &omega).unwrap();

    let out = client_update(&f.spec, &f.init.theta, true, &mut f.state, &f.ds, 1, &opts).unwrap();
    // Shuffling only reorders the batch mean, so agreement is up to rounding.
    for (a, b) in out.upload.values().iter().zip(want.theta.values()) {
        assert!((a - b).abs() <= 1e-12);
    }
    for (a, b) in f.state.phi.values().iter().zip(want.phi.values()) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn client_update_is_deterministic_and_round_dependent() {
    let f = fixture();
    let opts = LocalTraining {
        batch_size: 4,
        ..LocalTraining::default()
    };
    let run = |round| {
        let mut s = f.state.clone();
        client_update(&f.spec, &f.init.theta, true, &mut s, &f.ds, round, &opts).unwrap()
    };
    assert_eq!(run(1).upload, run(1).upload);
    assert_ne!(run(1).upload, run(2).upload);
}

#[test]
fn untrained_baseline_when_nothing_moves() {
    let mut cfg = small_cfg();
    cfg.rounds = 1;
    cfg.local.epochs = 0;
    cfg.strategy.eta = 0.0;
    let mut sim = Simulation::from_config(cfg.clone()).unwrap();
    let (acc0, loss0) = sim.evaluate_all().unwrap();
    let recs = sim.run(&Sequential).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].client_acc, acc0);
    assert_eq!(recs[0].client_loss, loss0);
    for (i, row) in sim.weight_matrix().iter().enumerate() {
        let mut e = vec![0.0; cfg.clients];
        e[i] = 1.0;
        assert_eq!(row, &e);
    }
}

#[test]
fn fedavg_with_one_client_is_local_training() {
    let mut cfg = small_cfg();
    cfg.clients = 1;
    cfg.participation_fraction = 1.0;
    let syn = SyntheticSpec {
        clusters: 1,
        clients_per_cluster: 1,
        classes: 3,
        samples_per_client: 40,
        input_dim: 5,
        cluster_shift: 0.0,
        class_sep: 1.5,
        noise: 0.5,
    };
    cfg.data = DataSource::Synthetic(syn);
    let run = |strategy| {
        let mut c = cfg.clone();
        c.strategy.strategy = strategy;
        let mut sim = Simulation::from_config(c).unwrap();
        let recs = sim.run(&Sequential).unwrap();
        (recs, sim.final_models().unwrap())
    };
    let (avg, avg_models) = run(Strategy::FedAvg);
    let (loc, loc_models) = run(Strategy::LocalOnly);
    assert_eq!(avg_models, loc_models);
    for (a, l) in avg.iter().zip(&loc) {
        assert_eq!(a.client_acc, l.client_acc);
        assert_eq!(a.client_loss, l.client_loss);
        assert_eq!(a.train_loss, l.train_loss);
    }
}

#[test]
fn server_never_sees_heads_under_partial_sharing() {
    let mut sim = Simulation::from_config(small_cfg()).unwrap();
    sim.run(&Sequential).unwrap();
    let spec = sim.spec().clone();
    assert_eq!(*sim.server().theta_store.layout(), spec.extractor_layout());
    assert_ne!(*sim.server().theta_store.layout(), spec.full_layout());

    let mut cfg = small_cfg();
    cfg.strategy.pms = false;
    let sim = Simulation::from_config(cfg).unwrap();
    assert_eq!(*sim.server().theta_store.layout(), spec.full_layout());
}

#[test]
fn stale_columns_change_only_for_participants() {
    let mut sim = Simulation::from_config(small_cfg()).unwrap();
    for _ in 0..4 {
        let before = sim.server().theta_store.clone();
        let rec = sim.run_round(&Sequential).unwrap();
        for j in 0..6 {
            let same = before.column(j).unwrap() == sim.server().theta_store.column(j).unwrap();
            assert!(rec.sampled.contains(&j) || same, "client {j} changed while idle");
        }
    }
}

#[test]
fn every_round_keeps_rows_on_the_simplex_and_drift_bounded() {
    let mut cfg = small_cfg();
    cfg.rounds = 12;
    let mut sim = Simulation::from_config(cfg).unwrap();
    let mut max_norm = 0.0;
    while !sim.is_finished() {
        let rec = sim.run_round(&Sequential).unwrap();
        assert!(rec.drift_bound_ok);
        assert!(rec.drift.iter().all(|d| d.drift_ok && !d.degenerate));
        assert!(sim.server().weights.iter().all(|w| w.is_distribution(1e-9)));
        assert!(sim.server().max_param_norm >= max_norm);
        max_norm = sim.server().max_param_norm;
    }
}

#[test]
fn explicit_partition_matches_from_config() {
    let cfg = small_cfg();
    let syn = match &cfg.data {
        DataSource::Synthetic(s) => s.clone(),
        _ => unreachable!(),
    };
    let (ds, _) = make_clustered_synthetic(&syn, cfg.master_seed).unwrap();
    let p = partition_by_client(&ds, 6, 30).unwrap();
    let mut a = Simulation::new(cfg.clone(), ds, p).unwrap();
    let mut b = Simulation::from_config(cfg).unwrap();
    assert_eq!(a.run(&Sequential).unwrap(), b.run(&Sequential).unwrap());
}

#[test]
fn master_seed_changes_sampling() {
    let mut cfg = small_cfg();
    let a = Simulation::from_config(cfg.clone()).unwrap().run(&Sequential).unwrap();
    cfg.master_seed = 7;
    let b = Simulation::from_config(cfg).unwrap().run(&Sequential).unwrap();
    let sa: Vec<_> = a.iter().map(|r| r.sampled.clone()).collect();
    let sb: Vec<_> = b.iter().map(|r| r.sampled.clone()).collect();
    assert_ne!(sa, sb);
}
