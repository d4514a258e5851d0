//! Datasets, synthetic clustered benchmarks and non-IID partitioning.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::seed::{self, domain};
use crate::{Error, Result};

/// Row-major feature matrix with integer class labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    input_dim: usize,
    num_classes: usize,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        labels: Vec<usize>,
        input_dim: usize,
        num_classes: usize,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(invalid!("dataset needs at least one feature column"));
        }
        if features.len() != labels.len() * input_dim {
            return Err(Error::DimensionMismatch {
                context: "dataset features",
                expected: labels.len() * input_dim,
                actual: features.len(),
            });
        }
        if let Some(i) = labels.iter().position(|&y| y >= num_classes) {
            return Err(Error::OutOfRange {
                context: "dataset label",
                index: labels[i],
                len: num_classes,
            });
        }
        if let Some(index) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "dataset features",
                index,
            });
        }
        Ok(Dataset {
            features,
            labels,
            input_dim,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// `(features, label)` pairs for the given indices.
    pub fn batch(&self, idx: &[usize]) -> Vec<(&[f64], usize)> {
        idx.iter().map(|&i| (self.row(i), self.labels[i])).collect()
    }

    /// Indices of each class, in ascending order.
    fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); self.num_classes];
        for (i, &y) in self.labels.iter().enumerate() {
            by_class[y].push(i);
        }
        by_class
    }
}

/// Parameters of the clustered synthetic benchmark.
///
/// Each class `c` has a base mean `μ_c ~ N(0, class_sep² I)`. Cluster `k`
/// draws a permutation `π_k` of the classes and places its class `c` at
/// `(1 - s) μ_c + s μ_{π_k(c)}` with `s = cluster_shift`, so at `s = 1` the
/// same input region carries different labels in different clusters.
/// Samples are the class mean plus `N(0, noise² I)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub clusters: usize,
    pub clients_per_cluster: usize,
    pub classes: usize,
    pub samples_per_client: usize,
    pub input_dim: usize,
    pub cluster_shift: f64,
    pub class_sep: f64,
    pub noise: f64,
}

impl SyntheticSpec {
    pub fn num_clients(&self) -> usize {
        self.clusters * self.clients_per_cluster
    }
}

/// Generate the clustered benchmark.
///
/// Rows are grouped by client: client `i` owns rows
/// `i * samples_per_client .. (i + 1) * samples_per_client`, and its labels
/// cycle through the classes. Returns the dataset and the cluster of each client.
pub fn make_clustered_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<(Dataset, Vec<usize>)> {
    if spec.clusters == 0
        || spec.clients_per_cluster == 0
        || spec.classes == 0
        || spec.samples_per_client == 0
        || spec.input_dim == 0
    {
        return Err(invalid!("synthetic dataset counts must be positive: {spec:?}"));
    }
    if !spec.cluster_shift.is_finite() || !(spec.noise >= 0.0) || !(spec.class_sep >= 0.0) {
        return Err(invalid!("synthetic dataset scales must be finite and nonnegative"));
    }
    let mut rng = seed::rng(seed::mix(seed, domain::DATA, 0));
    let d = spec.input_dim;
    let c = spec.classes;
    let gauss = |rng: &mut rand_chacha::ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };

    let base: Vec<Vec<f64>> = (0..c)
        .map(|_| (0..d).map(|_| spec.class_sep * gauss(&mut rng)).collect())
        .collect();
    let s = spec.cluster_shift;
    let mut means = Vec::with_capacity(spec.clusters);
    for _ in 0..spec.clusters {
        let mut perm: Vec<usize> = (0..c).collect();
        perm.shuffle(&mut rng);
        let m: Vec<Vec<f64>> = (0..c)
            .map(|k| {
                base[k]
                    .iter()
                    .zip(&base[perm[k]])
                    .map(|(a, b)| (1.0 - s) * a + s * b)
                    .collect()
            })
            .collect();
        means.push(m);
    }

    let n_clients = spec.num_clients();
    let n = n_clients * spec.samples_per_client;
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    let mut assignment = Vec::with_capacity(n_clients);
    for client in 0..n_clients {
        let cluster = client / spec.clients_per_cluster;
        assignment.push(cluster);
        for j in 0..spec.samples_per_client {
            let y = j % c;
            labels.push(y);
            for v in &means[cluster][y] {
                features.push(v + spec.noise * gauss(&mut rng));
            }
        }
    }
    let ds = Dataset::new(features, labels, d, c)?;
    Ok((ds, assignment))
}

/// Disjoint client shards of a parent dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub shards: Vec<Vec<usize>>,
}

impl PartitionResult {
    pub fn num_clients(&self) -> usize {
        self.shards.len()
    }

    /// Check disjointness, nonemptiness and bounds against a parent of size `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (i, shard) in self.shards.iter().enumerate() {
            if shard.is_empty() {
                return Err(invalid!("shard {i} is empty"));
            }
            for &k in shard {
                if k >= n {
                    return Err(Error::OutOfRange {
                        context: "partition index",
                        index: k,
                        len: n,
                    });
                }
                if seen[k] {
                    return Err(invalid!("index {k} appears in more than one shard"));
                }
                seen[k] = true;
            }
        }
        Ok(())
    }
}

/// Contiguous blocks of `per_client` rows, as produced by [`make_clustered_synthetic`].
pub fn partition_by_client(ds: &Dataset, clients: usize, per_client: usize) -> Result<PartitionResult> {
    if clients == 0 || per_client == 0 || clients * per_client > ds.len() {
        return Err(invalid!(
            "cannot cut {clients} blocks of {per_client} rows from {} rows",
            ds.len()
        ));
    }
    Ok(PartitionResult {
        shards: (0..clients)
            .map(|i| (i * per_client..(i + 1) * per_client).collect())
            .collect(),
    })
}

/// Split `total` into integer parts proportional to `weights`, conserving the total.
/// Leftover units go to the largest fractional remainders, ties to the lowest index.
pub fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() {
        return Vec::new();
    }
    if !(sum > 0.0) {
        let mut out = vec![0; weights.len()];
        out[0] = total;
        return out;
    }
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut out: Vec<usize> = quotas.iter().map(|q| libm::floor(*q) as usize).collect();
    let assigned: usize = out.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - libm::floor(quotas[a]);
        let rb = quotas[b] - libm::floor(quotas[b]);
        rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    // float floors can overshoot by at most rounding noise; clamp defensively
    let mut remaining = total.saturating_sub(assigned);
    for &k in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        out[k] += 1;
        remaining -= 1;
    }
    while out.iter().sum::<usize>() > total {
        let k = (0..out.len()).max_by_key(|&k| out[k]).unwrap_or(0);
        out[k] -= 1;
    }
    out
}

fn dirichlet<R: Rng + ?Sized>(alpha: f64, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    let gamma = Gamma::new(alpha, 1.0).map_err(|e| invalid!("Dir({alpha}): {e}"))?;
    for _ in 0..1000 {
        let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let s: f64 = draws.iter().sum();
        if s > 0.0 && s.is_finite() {
            return Ok(draws.into_iter().map(|g| g / s).collect());
        }
    }
    // every gamma draw underflowed: fall back to a point mass
    let mut p = vec![0.0; k];
    p[rng.random_range(0..k)] = 1.0;
    Ok(p)
}

const DIRICHLET_RESAMPLES: usize = 100;

/// Practical non-IID partition.
///
/// For every class a proportion vector over the clients is drawn from
/// `Dir(alpha)` and the class's (shuffled) samples are cut accordingly with
/// largest-remainder rounding. If some client ends up with no samples the
/// whole allocation is redrawn, up to 100 times; clients that are still empty
/// then receive one sample each, taken round-robin from the largest shards.
pub fn partition_dirichlet(ds: &Dataset, clients: usize, alpha: f64, seed: u64) -> Result<PartitionResult> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid!("Dirichlet concentration must be positive, got {alpha}"));
    }
    if clients == 0 {
        return Err(invalid!("need at least one client"));
    }
    if ds.len() < clients {
        return Err(invalid!("{} samples cannot fill {clients} nonempty shards", ds.len()));
    }
    let mut rng = seed::rng(seed::mix(seed, domain::PARTITION, 0));
    let mut by_class = ds.class_indices();
    for idx in &mut by_class {
        idx.shuffle(&mut rng);
    }

    let mut shards = Vec::new();
    for attempt in 0..DIRICHLET_RESAMPLES {
        shards = vec![Vec::new(); clients];
        for idx in &by_class {
            if idx.is_empty() {
                continue;
            }
            let p = dirichlet(alpha, clients, &mut rng)?;
            let counts = largest_remainder(&p, idx.len());
            let mut at = 0;
            for (shard, n) in shards.iter_mut().zip(counts) {
                shard.extend_from_slice(&idx[at..at + n]);
                at += n;
            }
        }
        if shards.iter().all(|s| !s.is_empty()) || attempt + 1 == DIRICHLET_RESAMPLES {
            break;
        }
    }
    for empty in 0..clients {
        if shards[empty].is_empty() {
            let donor = (0..clients).max_by_key(|&k| (shards[k].len(), usize::MAX - k)).unwrap_or(0);
            let moved = shards[donor].pop().ok_or(Error::Empty("donor shard"))?;
            shards[empty].push(moved);
        }
    }
    for s in &mut shards {
        s.sort_unstable();
    }
    Ok(PartitionResult { shards })
}

/// Pathological non-IID partition: every client holds exactly `c` classes.
///
/// Classes are assigned round-robin over a seed-shuffled class list, so
/// client `i` gets list entries `i*c .. i*c + c` (mod C). Each class is then
/// split among its holders with `Dir(0.5)` proportions and a floor of 10%
/// (or `1/holders` when there are more than ten), every holder keeping at
/// least one sample.
pub fn partition_pathological(ds: &Dataset, clients: usize, c: usize, seed: u64) -> Result<PartitionResult> {
    let n_classes = ds.num_classes();
    if c == 0 || c > n_classes {
        return Err(invalid!("classes per client must be in 1..={n_classes}, got {c}"));
    }
    if clients == 0 {
        return Err(invalid!("need at least one client"));
    }
    let mut rng = seed::rng(seed::mix(seed, domain::PARTITION, 1));
    let mut order: Vec<usize> = (0..n_classes).collect();
    order.shuffle(&mut rng);

    let mut holders = vec![Vec::new(); n_classes];
    for client in 0..clients {
        for k in 0..c {
            holders[order[(client * c + k) % n_classes]].push(client);
        }
    }

    let mut by_class = ds.class_indices();
    let mut shards = vec![Vec::new(); clients];
    for (class, idx) in by_class.iter_mut().enumerate() {
        let h = &holders[class];
        if h.is_empty() {
            continue;
        }
        if h.len() > idx.len() {
            return Err(invalid!(
                "class {class} has {} samples but {} holders",
                idx.len(),
                h.len()
            ));
        }
        idx.shuffle(&mut rng);
        let floor = (0.1f64).min(1.0 / h.len() as f64);
        let raw = dirichlet(0.5, h.len(), &mut rng)?;
        let p: Vec<f64> = raw
            .iter()
            .map(|q| floor + (1.0 - floor * h.len() as f64) * q)
            .collect();
        let mut counts = largest_remainder(&p, idx.len());
        while let Some(z) = counts.iter().position(|&n| n == 0) {
            let donor = (0..counts.len()).max_by_key(|&k| counts[k]).unwrap_or(0);
            counts[donor] -= 1;
            counts[z] += 1;
        }
        let mut at = 0;
        for (&client, n) in h.iter().zip(counts) {
            shards[client].extend_from_slice(&idx[at..at + n]);
            at += n;
        }
    }
    if let Some(i) = shards.iter().position(Vec::is_empty) {
        return Err(invalid!("client {i} received no samples"));
    }
    for s in &mut shards {
        s.sort_unstable();
    }
    Ok(PartitionResult { shards })
}

/// Train/test indices of one shard.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardSplit {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl ShardSplit {
    pub fn len(&self) -> usize {
        self.train.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Seeded train/test split of one shard.
///
/// The train count is `round(train_fraction * n)` clamped to `1..n`. When
/// every class in the shard has at least two samples the split is
/// stratified: the train count is spread over classes by largest remainder
/// and every class keeps at least one sample on each side.
pub fn split_train_test(ds: &Dataset, shard: &[usize], train_fraction: f64, seed: u64) -> Result<ShardSplit> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(invalid!("train fraction must be in (0, 1), got {train_fraction}"));
    }
    let n = shard.len();
    if n < 2 {
        return Err(invalid!("cannot split a shard of {n} samples"));
    }
    let mut rng = seed::rng(seed::mix(seed, domain::SPLIT, 0));
    let n_train = (libm::round(train_fraction * n as f64) as usize).clamp(1, n - 1);

    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &i in shard {
        let y = ds.label(i);
        match groups.iter_mut().find(|(c, _)| *c == y) {
            Some((_, g)) => g.push(i),
            None => groups.push((y, vec![i])),
        }
    }
    groups.sort_by_key(|(c, _)| *c);

    let (mut train, mut test) = (Vec::with_capacity(n_train), Vec::with_capacity(n - n_train));
    if groups.iter().all(|(_, g)| g.len() >= 2) && n_train >= groups.len() && n - n_train >= groups.len() {
        let sizes: Vec<f64> = groups.iter().map(|(_, g)| g.len() as f64).collect();
        let mut k = largest_remainder(&sizes, n_train);
        // every class keeps one sample on each side
        loop {
            let low = (0..k.len()).find(|&j| k[j] == 0);
            let high = (0..k.len()).find(|&j| k[j] == groups[j].1.len());
            match (low, high) {
                (Some(j), _) => {
                    let donor = (0..k.len())
                        .filter(|&d| k[d] > 1)
                        .max_by_key(|&d| k[d])
                        .ok_or(Error::Empty("stratified donor"))?;
                    k[donor] -= 1;
                    k[j] += 1;
                }
                (None, Some(j)) => {
                    let taker = (0..k.len())
                        .filter(|&d| k[d] + 1 < groups[d].1.len())
                        .max_by_key(|&d| groups[d].1.len() - k[d])
                        .ok_or(Error::Empty("stratified taker"))?;
                    k[j] -= 1;
                    k[taker] += 1;
                }
                (None, None) => break,
            }
        }
        for ((_, g), kt) in groups.iter_mut().zip(k) {
            g.shuffle(&mut rng);
            train.extend_from_slice(&g[..kt]);
            test.extend_from_slice(&g[kt..]);
        }
    } else {
        let mut all = shard.to_vec();
        all.shuffle(&mut rng);
        train.extend_from_slice(&all[..n_train]);
        test.extend_from_slice(&all[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(ShardSplit { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labelled(labels: Vec<usize>, classes: usize) -> Dataset {
        let n = labels.len();
        Dataset::new((0..n).map(|i| i as f64).collect(), labels, 1, classes).unwrap()
    }

    fn spec(clusters: usize, per: usize, shift: f64) -> SyntheticSpec {
        SyntheticSpec {
            clusters,
            clients_per_cluster: per,
            classes: 4,
            samples_per_client: 40,
            input_dim: 6,
            cluster_shift: shift,
            class_sep: 1.0,
            noise: 1.0,
        }
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![1.0, 2.0], vec![0, 1], 1, 2).is_ok());
        assert!(Dataset::new(vec![1.0, 2.0], vec![0, 2], 1, 2).is_err());
        assert!(Dataset::new(vec![1.0], vec![0, 1], 1, 2).is_err());
        assert!(Dataset::new(vec![], vec![], 0, 2).is_err());
        assert!(Dataset::new(vec![f64::INFINITY], vec![0], 1, 2).is_err());
    }

    #[test]
    fn synthetic_bookkeeping() {
        let (ds, assign) = make_clustered_synthetic(&spec(3, 4, 1.0), 1).unwrap();
        assert_eq!(assign.len(), 12);
        for k in 0..3 {
            assert_eq!(assign.iter().filter(|&&a| a == k).count(), 4);
        }
        assert_eq!(ds.len(), 12 * 40);
        assert_eq!(ds.input_dim(), 6);
        let p = partition_by_client(&ds, 12, 40).unwrap();
        p.validate(ds.len()).unwrap();
        assert!(make_clustered_synthetic(&spec(0, 4, 1.0), 1).is_err());
    }

    #[test]
    fn synthetic_is_seed_deterministic() {
        let a = make_clustered_synthetic(&spec(2, 2, 0.7), 99).unwrap();
        let b = make_clustered_synthetic(&spec(2, 2, 0.7), 99).unwrap();
        let c = make_clustered_synthetic(&spec(2, 2, 0.7), 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn largest_remainder_conserves() {
        assert_eq!(largest_remainder(&[1.0, 1.0, 1.0], 10), vec![4, 3, 3]);
        assert_eq!(largest_remainder(&[0.5, 0.25, 0.25], 4), vec![2, 1, 1]);
        assert_eq!(largest_remainder(&[0.0, 0.0], 3), vec![3, 0]);
        assert_eq!(largest_remainder(&[0.2, 0.8], 0), vec![0, 0]);
    }

    #[test]
    fn dirichlet_single_client() {
        let ds = labelled((0..30).map(|i| i % 3).collect(), 3);
        let p = partition_dirichlet(&ds, 1, 0.5, 3).unwrap();
        assert_eq!(p.shards, vec![(0..30).collect::<Vec<_>>()]);
    }

    #[test]
    fn dirichlet_rejects_bad_alpha() {
        let ds = labelled(vec![0, 1, 0, 1], 2);
        assert!(partition_dirichlet(&ds, 2, 0.0, 1).is_err());
        assert!(partition_dirichlet(&ds, 2, -1.0, 1).is_err());
        assert!(partition_dirichlet(&ds, 5, 1.0, 1).is_err());
    }

    #[test]
    fn dirichlet_tiny_alpha_still_nonempty() {
        let ds = labelled((0..40).map(|i| i % 2).collect(), 2);
        for seed in 0..20 {
            let p = partition_dirichlet(&ds, 10, 0.01, seed).unwrap();
            p.validate(ds.len()).unwrap();
            assert_eq!(p.shards.iter().map(Vec::len).sum::<usize>(), 40);
        }
    }

    #[test]
    fn pathological_examples() {
        let ds = labelled((0..200).map(|i| i % 10).collect(), 10);
        let p = partition_pathological(&ds, 5, 2, 7).unwrap();
        let sets = label_sets(&ds, &p);
        assert!(sets.iter().all(|s| s.len() == 2));
        for class in 0..10 {
            assert_eq!(sets.iter().filter(|s| s.contains(&class)).count(), 1);
        }

        let p = partition_pathological(&ds, 4, 10, 7).unwrap();
        assert!(label_sets(&ds, &p).iter().all(|s| s.len() == 10));

        let p = partition_pathological(&ds, 20, 2, 7).unwrap();
        let sets = label_sets(&ds, &p);
        for class in 0..10 {
            assert_eq!(sets.iter().filter(|s| s.contains(&class)).count(), 4);
        }
        p.validate(ds.len()).unwrap();
    }

    #[test]
    fn pathological_floor_and_errors() {
        let ds = labelled((0..400).map(|i| i % 2).collect(), 2);
        let p = partition_pathological(&ds, 4, 1, 3).unwrap();
        // each class (200 samples) shared by two holders, each >= 10%
        for s in &p.shards {
            assert!(s.len() >= 20, "{}", s.len());
        }
        assert!(partition_pathological(&ds, 4, 3, 3).is_err());
        assert!(partition_pathological(&ds, 4, 0, 3).is_err());
        let tiny = labelled(vec![0, 1], 2);
        assert!(partition_pathological(&tiny, 4, 1, 3).is_err());
    }

    fn label_sets(ds: &Dataset, p: &PartitionResult) -> Vec<Vec<usize>> {
        p.shards
            .iter()
            .map(|s| {
                let mut l: Vec<usize> = s.iter().map(|&i| ds.label(i)).collect();
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect()
    }

    #[test]
    fn split_examples() {
        let ds = labelled((0..12).map(|i| i % 2).collect(), 2);
        let shard: Vec<usize> = (0..12).collect();
        let s = split_train_test(&ds, &shard, 5.0 / 6.0, 1).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (10, 2));
        // stratified: one test sample per class
        let mut test_labels: Vec<_> = s.test.iter().map(|&i| ds.label(i)).collect();
        test_labels.sort_unstable();
        assert_eq!(test_labels, vec![0, 1]);
        assert_eq!(s, split_train_test(&ds, &shard, 5.0 / 6.0, 1).unwrap());

        assert!(split_train_test(&ds, &[3], 0.5, 1).is_err());
        assert!(split_train_test(&ds, &shard, 1.0, 1).is_err());
        assert!(split_train_test(&ds, &shard, 0.0, 1).is_err());
    }

    #[test]
    fn split_unstratified_fallback() {
        // class 2 has a single sample
        let ds = labelled(vec![0, 0, 1, 1, 2, 0, 1], 3);
        let shard: Vec<usize> = (0..7).collect();
        let s = split_train_test(&ds, &shard, 0.5, 4).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(s.train.len(), 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn partitions_are_disjoint_and_exhaustive(
            m in 1usize..12,
            alpha in 0.05f64..20.0,
            c in 1usize..6,
            seed in any::<u64>(),
        ) {
            let ds = labelled((0..300).map(|i| (i * 7) % 5).collect(), 5);
            let p = partition_dirichlet(&ds, m, alpha, seed).unwrap();
            p.validate(ds.len()).unwrap();
            let mut all: Vec<usize> = p.shards.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..300).collect::<Vec<_>>());

            let q = partition_pathological(&ds, m, c, seed).unwrap();
            q.validate(ds.len()).unwrap();
            for s in label_sets(&ds, &q) {
                prop_assert_eq!(s.len(), c);
            }
        }

        #[test]
        fn split_is_disjoint_and_exhaustive(
            labels in prop::collection::vec(0usize..4, 2..60),
            frac in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let ds = labelled(labels.clone(), 4);
            let shard: Vec<usize> = (0..labels.len()).collect();
            let s = split_train_test(&ds, &shard, frac, seed).unwrap();
            prop_assert!(!s.train.is_empty() && !s.test.is_empty());
            let mut all = s.train.clone();
            all.extend_from_slice(&s.test);
            all.sort_unstable();
            prop_assert_eq!(all, shard);
        }
    }
}
