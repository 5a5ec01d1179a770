//! Positive/negative sampling, AUC, cross-validation over β, and the
//! end-to-end experiment protocol.
//!
//! Slices are 0-based. For a label slice `L`, candidates are the `(σ, ṽ)`
//! pairs of the snapshot at `L - 1`, and a candidate is positive when
//! `σ ∪ {ṽ}` arrives in slice `L`. The estimator index covers the origin
//! slices `[L - 2 - p, L - 2]`, whose labels all precede `L`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{baseline_score, Method};
use crate::complex::ComplexSnapshot;
use crate::error::{Error, Result};
use crate::estimator::{estimate_or_fallback, Counts, FallbackPolicy, FeatureIndex, KernelParams};
use crate::feature::FeatureVector;
use crate::ingestion::Filtration;
use crate::simplex::{Simplex, VertexId};
use crate::tracker::{FeatureConfig, FeatureTracker};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub simplex: Simplex,
    pub candidate: VertexId,
    pub origin_slice: usize,
    pub label: Label,
    pub feature: FeatureVector,
}

/// One `(σ, ṽ)` pair of the origin snapshot with its feature and label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub simplex: Simplex,
    pub candidate: VertexId,
    pub feature: FeatureVector,
    pub positive: bool,
}

/// Everything needed to score one label slice.
#[derive(Clone, Debug)]
pub struct Fold {
    pub label_slice: usize,
    /// Estimator index over origin slices before `label_slice - 1`; `None`
    /// when the fold was prepared for sampling only.
    pub index: Option<FeatureIndex>,
    /// Snapshot at `label_slice - 1`.
    pub snapshot: ComplexSnapshot,
    /// All candidate pairs of the snapshot, sorted by `(σ, ṽ)`.
    pub population: Vec<Candidate>,
}

impl Fold {
    /// Prepares the label slice `label` with an index over a window of
    /// `window` extra slices (`None` for all history).
    pub fn prepare(f: &Filtration, label: usize, window: Option<usize>, cfg: FeatureConfig) -> Result<Self> {
        if label < 2 {
            return Err(Error::InsufficientSlices {
                needed: 3,
                got: label + 1,
            });
        }
        let last = label - 2;
        let first = window.map_or(0, |p| last.saturating_sub(p));
        Self::replay(f, label, Some((first, last)), cfg)
    }

    /// Prepares only the candidate population for `label`.
    pub fn population_only(f: &Filtration, label: usize, cfg: FeatureConfig) -> Result<Self> {
        if label == 0 {
            return Err(Error::InsufficientSlices { needed: 2, got: 1 });
        }
        Self::replay(f, label, None, cfg)
    }

    fn replay(f: &Filtration, label: usize, window: Option<(usize, usize)>, cfg: FeatureConfig) -> Result<Self> {
        if label >= f.num_slices() {
            return Err(Error::LabelSliceMissing(label));
        }
        let origin = label - 1;
        let first = window.map_or(origin, |w| w.0);
        let mut tracker = FeatureTracker::new(cfg);
        let mut cube: HashMap<FeatureVector, Counts> = HashMap::new();
        for t in 0..=origin {
            tracker.apply_slice(f.arrivals(t), t >= first);
            if let Some((first, last)) = window {
                if (first..=last).contains(&t) {
                    for (key, &n) in tracker.histogram() {
                        cube.entry(key.clone()).or_default().possible += n;
                    }
                    for (_, _, fv) in tracker.realized(f.arrivals(t + 1)) {
                        cube.get_mut(&fv).expect("realized pair is a possible pair").realized += 1;
                    }
                }
            }
        }
        let positives: HashSet<(Simplex, VertexId)> = tracker
            .realized(f.arrivals(label))
            .into_iter()
            .map(|(s, v, _)| (s, v))
            .collect();
        let population = tracker
            .pairs()
            .into_iter()
            .map(|(simplex, candidate, feature)| {
                let positive = positives.contains(&(simplex.clone(), candidate));
                Candidate {
                    simplex,
                    candidate,
                    feature,
                    positive,
                }
            })
            .collect();
        let index = window.map(|(first, last)| FeatureIndex::from_cube(cube, last, last - first, cfg));
        Ok(Fold {
            label_slice: label,
            index,
            snapshot: tracker.complex().clone(),
            population,
        })
    }

    pub fn positive_count(&self) -> usize {
        self.population.iter().filter(|c| c.positive).count()
    }

    /// `n` positives and `n` negatives drawn uniformly without replacement.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<LabeledSample>> {
        if n == 0 {
            return Err(Error::InvalidConfig("n_per_class must be at least 1".into()));
        }
        let (pos, neg): (Vec<&Candidate>, Vec<&Candidate>) = self.population.iter().partition(|c| c.positive);
        if pos.len() < n {
            return Err(Error::InsufficientPositives {
                available: pos.len(),
                requested: n,
            });
        }
        if neg.len() < n {
            return Err(Error::InsufficientNegatives {
                available: neg.len(),
                requested: n,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(2 * n);
        for (group, label) in [(pos, Label::Positive), (neg, Label::Negative)] {
            for i in sample_indices(&mut rng, group.len(), n) {
                let c = group[i];
                out.push(LabeledSample {
                    simplex: c.simplex.clone(),
                    candidate: c.candidate,
                    origin_slice: self.label_slice - 1,
                    label,
                    feature: c.feature.clone(),
                });
            }
        }
        Ok(out)
    }

    /// Scores samples with the kernel estimator or a baseline heuristic.
    pub fn score(&self, samples: &[LabeledSample], method: Method, params: KernelParams) -> Result<Vec<f64>> {
        match method {
            Method::Ours => {
                let index = self
                    .index
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("fold was prepared without an index".into()))?;
                samples
                    .iter()
                    .map(|s| estimate_or_fallback(index, &s.feature, params, FallbackPolicy::BaseRate))
                    .collect()
            }
            _ => Ok(samples
                .iter()
                .map(|s| baseline_score(method, &self.snapshot, &s.simplex, s.candidate))
                .collect()),
        }
    }
}

/// Balanced sample for the final slice of `f`, with candidates from the
/// k-balls of d-simplices in the previous snapshot.
pub fn sample_candidates(
    f: &Filtration,
    d: usize,
    k: usize,
    n_per_class: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>> {
    let label = f.num_slices().saturating_sub(1);
    Fold::population_only(f, label, FeatureConfig::new(d, k))?.sample(n_per_class, seed)
}

/// Mann-Whitney AUC with ties counted as one half.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(scores.len(), labels.len()));
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateLabels);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their average
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum += avg * order[i..=j].iter().filter(|&&o| labels[o].is_positive()).count() as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

fn labels_of(samples: &[LabeledSample]) -> Vec<Label> {
    samples.iter().map(|s| s.label).collect()
}

/// Settings shared by the sampler and the estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub features: FeatureConfig,
    pub delta: u64,
    pub n_per_class: usize,
    /// Extra origin slices before the newest one; `None` uses all history.
    pub window: Option<usize>,
    pub seed: u64,
}

fn fold_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rand::RngCore::next_u64(&mut rng)
}

/// Selects β by K-fold validation: fold `j` uses slice `T - 1 - j` as the
/// label slice. Returns the β with the highest mean fold AUC, preferring the
/// smaller β on ties. Folds without enough positives are skipped.
pub fn cross_validate_beta(f: &Filtration, betas: &[f64], folds: usize, cfg: &SamplerConfig) -> Result<f64> {
    Ok(cross_validate_beta_detailed(f, betas, folds, cfg)?.0)
}

/// As [`cross_validate_beta`], also returning the mean AUC per β in
/// ascending β order.
pub fn cross_validate_beta_detailed(
    f: &Filtration,
    betas: &[f64],
    folds: usize,
    cfg: &SamplerConfig,
) -> Result<(f64, Vec<(f64, f64)>)> {
    if betas.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut grid = betas.to_vec();
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    if grid.len() == 1 {
        return Ok((grid[0], vec![(grid[0], f64::NAN)]));
    }
    if folds < 2 {
        return Err(Error::InvalidConfig(format!("K must be at least 2, got {folds}")));
    }
    let t = f.num_slices();
    if t < folds + 3 {
        return Err(Error::InsufficientSlices {
            needed: folds + 3,
            got: t,
        });
    }
    let mut sums = vec![0.0; grid.len()];
    let mut used = 0;
    let mut last_err = None;
    for j in 1..=folds {
        let fold = Fold::prepare(f, t - 1 - j, cfg.window, cfg.features)?;
        let samples = match fold.sample(cfg.n_per_class, fold_seed(cfg.seed, j as u64)) {
            Ok(s) => s,
            Err(e @ (Error::InsufficientPositives { .. } | Error::InsufficientNegatives { .. })) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let labels = labels_of(&samples);
        for (i, &beta) in grid.iter().enumerate() {
            let scores = fold.score(&samples, Method::Ours, KernelParams::new(beta, cfg.delta)?)?;
            sums[i] += auc(&scores, &labels)?;
        }
        used += 1;
    }
    if used == 0 {
        return Err(last_err.expect("every fold was skipped for a reason"));
    }
    let means: Vec<(f64, f64)> = grid.iter().zip(&sums).map(|(&b, &s)| (b, s / used as f64)).collect();
    let mut best = means[0];
    for &m in &means[1..] {
        if m.1 > best.1 {
            best = m;
        }
    }
    Ok((best.0, means))
}

/// Flat experiment configuration, readable from `key=value` lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: Option<String>,
    pub slices: usize,
    pub d: usize,
    pub k: usize,
    pub max_dim: Option<usize>,
    pub delta: u64,
    /// Fixed β; when absent β is chosen by cross-validation over `beta_grid`.
    pub beta: Option<f64>,
    pub beta_grid: Vec<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub n_per_class: usize,
    pub window: Option<usize>,
    pub method: Method,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data: None,
            slices: 20,
            d: 1,
            k: 1,
            max_dim: None,
            delta: 1,
            beta: None,
            beta_grid: vec![0.01, 0.1, 1.0, 10.0],
            folds: 3,
            repeats: 10,
            n_per_class: 100,
            window: None,
            method: Method::Ours,
            seed: 0,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|e| Error::Parse(format!("{key}: {x:?}: {e}")))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn features(&self) -> FeatureConfig {
        let cfg = FeatureConfig::new(self.d, self.k);
        match self.max_dim {
            Some(m) => cfg.with_max_dim(m),
            None => cfg,
        }
    }

    pub fn sampler(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            features: self.features(),
            delta: self.delta,
            n_per_class: self.n_per_class,
            window: self.window,
            seed,
        }
    }

    /// Applies one `key=value` setting. Keys use the CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e| Error::Parse(format!("{key}: {v:?}: {e}")))
        }
        let v = value.trim();
        match key.trim().trim_start_matches("--") {
            "data" => self.data = Some(v.to_string()),
            "T" => self.slices = num(key, v)?,
            "d" => self.d = num(key, v)?,
            "k" => self.k = num(key, v)?,
            "D" => self.max_dim = Some(num(key, v)?),
            "delta" => self.delta = num(key, v)?,
            "beta" => self.beta = Some(num(key, v)?),
            "beta-grid" | "beta_grid" => self.beta_grid = parse_list(key, v)?,
            "K" => self.folds = num(key, v)?,
            "repeats" => self.repeats = num(key, v)?,
            "n-per-class" | "n_per_class" => self.n_per_class = num(key, v)?,
            "window" | "p" => self.window = Some(num(key, v)?),
            "method" => self.method = v.parse()?,
            "seed" => self.seed = num(key, v)?,
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines; blank lines and `#` comments are ignored.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {line:?}")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.n_per_class == 0 {
            return Err(Error::InvalidConfig("n_per_class must be at least 1".into()));
        }
        if self.beta.is_none() && self.method == Method::Ours && self.beta_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(b) = self.beta {
            KernelParams::new(b, self.delta)?;
        }
        for &b in &self.beta_grid {
            KernelParams::new(b, self.delta)?;
        }
        if self.features().max_dim == 0 {
            return Err(Error::InvalidConfig("D must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: Method,
    pub auc: f64,
    pub auc_std: f64,
    pub auc_per_repeat: Vec<f64>,
    /// Mean wall-clock seconds per repeat for index building and scoring.
    pub runtime_seconds: f64,
    /// Most frequently selected β, smallest on ties; absent for baselines.
    pub beta_selected: Option<f64>,
    pub betas_per_repeat: Vec<f64>,
    pub n_samples: usize,
    pub repeats: usize,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "method\tauc\tauc_std\truntime_s\tbeta\tn_samples\trepeats").unwrap();
        let beta = self.beta_selected.map_or("-".to_string(), |b| b.to_string());
        writeln!(
            out,
            "{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}\t{}",
            self.method, self.auc, self.auc_std, self.runtime_seconds, beta, self.n_samples, self.repeats
        )
        .unwrap();
        out
    }
}

fn mode_smallest(values: &[f64]) -> Option<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut best: Option<(f64, usize)> = None;
    for group in sorted.chunk_by(|a, b| a == b) {
        if best.is_none_or(|(_, n)| group.len() > n) {
            best = Some((group[0], group.len()));
        }
    }
    best.map(|b| b.0)
}

/// Runs the protocol on the final slice of `f` for `cfg.repeats` repeats.
pub fn run_experiment(f: &Filtration, cfg: &ExperimentConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let t = f.num_slices();
    let label = t
        .checked_sub(1)
        .ok_or(Error::InsufficientSlices { needed: 3, got: t })?;
    let mut aucs = Vec::with_capacity(cfg.repeats);
    let mut betas = Vec::new();
    let mut elapsed = 0.0;
    let mut n_samples = 0;
    for r in 0..cfg.repeats {
        let seed = fold_seed(cfg.seed, 1000 + r as u64);
        let start = Instant::now();
        let beta = match (cfg.method, cfg.beta) {
            (Method::Ours, Some(b)) => Some(b),
            (Method::Ours, None) => Some(cross_validate_beta(f, &cfg.beta_grid, cfg.folds, &cfg.sampler(seed))?),
            _ => None,
        };
        let fold = if cfg.method == Method::Ours {
            Fold::prepare(f, label, cfg.window, cfg.features())?
        } else {
            Fold::population_only(f, label, cfg.features())?
        };
        let samples = fold.sample(cfg.n_per_class, seed)?;
        let params = KernelParams::new(beta.unwrap_or(0.0), cfg.delta)?;
        let scores = fold.score(&samples, cfg.method, params)?;
        let a = auc(&scores, &labels_of(&samples))?;
        elapsed += start.elapsed().as_secs_f64();
        aucs.push(a);
        betas.extend(beta);
        n_samples = samples.len();
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    let var = aucs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / aucs.len() as f64;
    Ok(EvalReport {
        method: cfg.method,
        auc: mean,
        auc_std: var.sqrt(),
        auc_per_repeat: aucs,
        runtime_seconds: elapsed / cfg.repeats as f64,
        beta_selected: mode_smallest(&betas),
        betas_per_repeat: betas,
        n_samples,
        repeats: cfg.repeats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Negative as N, Positive as P};

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0.9, 0.8, 0.1, 0.2], &[P, P, N, N]).unwrap(), 1.0);
        assert_eq!(auc(&[0.3; 4], &[P, N, P, N]).unwrap(), 0.5);
        assert_eq!(auc(&[0.9, 0.8, 0.4], &[P, N, P]).unwrap(), 0.5);
        assert_eq!(auc(&[0.1, 0.2], &[P, P]), Err(Error::DegenerateLabels));
    }

    #[test]
    fn auc_is_rank_based_and_complements() {
        let scores = [0.1, 0.5, 0.3, 0.9, 0.7, 0.2];
        let labels = [N, P, N, P, N, P];
        let a = auc(&scores, &labels).unwrap();
        let cubed: Vec<f64> = scores.iter().map(|x: &f64| x.powi(3) + 4.0).collect();
        assert_eq!(auc(&cubed, &labels).unwrap(), a);
        let neg: Vec<f64> = scores.iter().map(|x| -x).collect();
        assert!((auc(&neg, &labels).unwrap() + a - 1.0).abs() < 1e-15);
    }

    fn toy() -> Filtration {
        Filtration::from_slices(vec![
            vec![s(&[1, 2]), s(&[2, 3]), s(&[1, 3]), s(&[3, 4])],
            vec![s(&[4, 5]), s(&[2, 4])],
            vec![s(&[1, 2, 3]), s(&[5, 6])],
        ])
    }

    #[test]
    fn sampling_is_balanced_and_deterministic() {
        let f = toy();
        let a = sample_candidates(&f, 1, 1, 2, 9).unwrap();
        assert_eq!(a, sample_candidates(&f, 1, 1, 2, 9).unwrap());
        assert_eq!(a.iter().filter(|x| x.label == P).count(), 2);
        assert_eq!(a.iter().filter(|x| x.label == N).count(), 2);
        for x in &a {
            assert_eq!(x.origin_slice, 1);
            let tau = x.simplex.with_vertex(x.candidate);
            assert_eq!(x.label == P, f.contains_at(2, &tau) && !f.contains_at(1, &tau));
        }
        assert_eq!(
            sample_candidates(&f, 1, 1, 4, 9),
            Err(Error::InsufficientPositives {
                available: 3,
                requested: 4
            })
        );
    }

    #[test]
    fn nothing_arrives_means_no_positives() {
        let f = Filtration::from_slices(vec![vec![s(&[1, 2]), s(&[2, 3])], vec![s(&[7])]]);
        assert!(matches!(
            sample_candidates(&f, 1, 1, 1, 0),
            Err(Error::InsufficientPositives { available: 0, .. })
        ));
    }

    #[test]
    fn cv_grid_rules() {
        let f = toy();
        let cfg = ExperimentConfig::default().sampler(0);
        assert_eq!(cross_validate_beta(&f, &[], 3, &cfg), Err(Error::EmptyGrid));
        assert_eq!(cross_validate_beta(&f, &[0.5], 3, &cfg).unwrap(), 0.5);
    }

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::from_kv("# table row\nT=12\nd = 2\nbeta-grid=0.1,1\nmethod=aa\n").unwrap();
        assert_eq!(cfg.slices, 12);
        assert_eq!(cfg.d, 2);
        assert_eq!(cfg.beta_grid, vec![0.1, 1.0]);
        assert_eq!(cfg.method, Method::Aa);
        assert!(ExperimentConfig::from_kv("bogus=1").is_err());
        assert!(ExperimentConfig::from_kv("T").is_err());
    }

    #[test]
    fn mode_prefers_smaller_on_ties() {
        assert_eq!(mode_smallest(&[1.0, 0.1, 1.0, 0.1]), Some(0.1));
        assert_eq!(mode_smallest(&[10.0, 1.0, 10.0]), Some(10.0));
        assert_eq!(mode_smallest(&[]), None);
    }
}
