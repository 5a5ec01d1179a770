//! Filtrations drawn from a known arrival probability `g(F)`, and Monte Carlo
//! checks that the estimator recovers it.
//!
//! At each slice every candidate `(d+1)`-simplex `τ` not yet present gets a
//! single uniform draw `U`. Each representation `(σ, ṽ)` of `τ` fires when
//! `U < g(F(σ, ṽ))`, so the per-pair firing probability is exactly `g`, and
//! `τ` arrives at the next slice when any representation fires.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_or_fallback, Counts, FallbackPolicy, FeatureIndex, KernelParams};
use crate::feature::FeatureVector;
use crate::ingestion::Filtration;
use crate::simplex::{Simplex, VertexId};
use crate::stats::{ks_test_normal, mean_std, KsResult};
use crate::tracker::{FeatureConfig, FeatureTracker};

/// A known arrival probability as a function of the feature vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GroundTruth {
    Constant(f64),
    /// `high` when the co-occurrence score is at least `threshold`, else `low`.
    ScoreStep {
        threshold: u64,
        low: f64,
        high: f64,
    },
    /// Zero once the ball holds a 2-simplex; otherwise
    /// `rate * h / (h + 1) * 2 / edges`, with `h` the score and `edges` the
    /// ball's edge count. Needs `D >= 3`.
    StarClosure {
        rate: f64,
    },
}

impl GroundTruth {
    pub fn eval(&self, f: &FeatureVector) -> f64 {
        let v = f.values();
        match *self {
            GroundTruth::Constant(p) => p,
            GroundTruth::ScoreStep { threshold, low, high } => {
                if f.score() >= threshold {
                    high
                } else {
                    low
                }
            }
            GroundTruth::StarClosure { rate } => {
                if v.len() < 5 || v[3] > 0 || v[2] == 0 {
                    return 0.0;
                }
                let h = f.score() as f64;
                (rate * h / (h + 1.0) * 2.0 / v[2] as f64).clamp(0.0, 1.0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let probs: &[f64] = match self {
            GroundTruth::Constant(p) => &[*p],
            GroundTruth::ScoreStep { low, high, .. } => &[*low, *high],
            GroundTruth::StarClosure { rate } => &[*rate],
        };
        if probs.iter().all(|p| (0.0..=1.0).contains(p)) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("ground truth {self:?} leaves [0, 1]")))
        }
    }
}

/// How the initial snapshot, and any background arrivals, are produced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Seeding {
    /// Erdős-Rényi edges over `n_vertices` at slice 0 only.
    RandomGraph { edge_prob: f64 },
    /// `per_slice` fresh disjoint stars at every slice. Each star has between
    /// `min_leaves` and `max_leaves` spokes, every spoke arriving `w` times
    /// for one `w` per star drawn from `1..=max_multiplicity`.
    Stars {
        per_slice: usize,
        min_leaves: usize,
        max_leaves: usize,
        max_multiplicity: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    /// Vertex pool for [`Seeding::RandomGraph`]; stars always use fresh vertices.
    pub n_vertices: usize,
    pub slices: usize,
    pub d: usize,
    pub k: usize,
    pub max_dim: usize,
    pub ground_truth: GroundTruth,
    pub seeding: Seeding,
    pub seed: u64,
}

impl SyntheticConfig {
    /// Star-seeded family with `d = 1`, `k = 1`, `D = 3`, in which every
    /// representation of a candidate shares the same `g`.
    pub fn star_family(slices: usize, seed: u64) -> Self {
        SyntheticConfig {
            n_vertices: 0,
            slices,
            d: 1,
            k: 1,
            max_dim: 3,
            ground_truth: GroundTruth::StarClosure { rate: 0.6 },
            seeding: Seeding::Stars {
                per_slice: 6,
                min_leaves: 2,
                max_leaves: 4,
                max_multiplicity: 3,
            },
            seed,
        }
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig::new(self.d, self.k).with_max_dim(self.max_dim)
    }

    fn validate(&self) -> Result<()> {
        if self.slices < 2 {
            return Err(Error::InvalidConfig(
                "a synthetic filtration needs at least 2 slices".into(),
            ));
        }
        self.ground_truth.validate()?;
        match self.seeding {
            Seeding::RandomGraph { edge_prob } if !(0.0..=1.0).contains(&edge_prob) => {
                Err(Error::InvalidConfig(format!("edge_prob {edge_prob} outside [0, 1]")))
            }
            Seeding::Stars {
                per_slice,
                min_leaves,
                max_leaves,
                max_multiplicity,
            } if per_slice == 0 || min_leaves < 1 || max_leaves < min_leaves || max_multiplicity == 0 => {
                Err(Error::InvalidConfig(format!("bad star seeding {:?}", self.seeding)))
            }
            _ => Ok(()),
        }
    }

    fn with_slices_and_seed(&self, slices: usize, seed: u64) -> Self {
        SyntheticConfig { slices, seed, ..*self }
    }
}

/// One representation's draw, recorded by [`generate_with_trace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDraw {
    pub slice: usize,
    pub feature: FeatureVector,
    pub g: f64,
    pub fired: bool,
}

fn seed_arrivals(
    cfg: &SyntheticConfig,
    slice: usize,
    rng: &mut ChaCha8Rng,
    next_vertex: &mut VertexId,
) -> Vec<Simplex> {
    let mut out = Vec::new();
    match cfg.seeding {
        Seeding::RandomGraph { edge_prob } => {
            if slice == 0 {
                let n = cfg.n_vertices as VertexId;
                for a in 0..n {
                    for b in a + 1..n {
                        if rng.gen_bool(edge_prob) {
                            out.push(Simplex::from_sorted(&[a, b]));
                        }
                    }
                }
            }
        }
        Seeding::Stars {
            per_slice,
            min_leaves,
            max_leaves,
            max_multiplicity,
        } => {
            for _ in 0..per_slice {
                let m = rng.gen_range(min_leaves..=max_leaves) as VertexId;
                let w = rng.gen_range(1..=max_multiplicity);
                let center = *next_vertex;
                *next_vertex += m + 1;
                for leaf in center + 1..=center + m {
                    for _ in 0..w {
                        out.push(Simplex::from_sorted(&[center, leaf]));
                    }
                }
            }
        }
    }
    out
}

pub fn generate(cfg: &SyntheticConfig) -> Result<Filtration> {
    Ok(run(cfg, false, false)?.filtration)
}

/// As [`generate`], also returning every representation's draw.
pub fn generate_with_trace(cfg: &SyntheticConfig) -> Result<(Filtration, Vec<PairDraw>)> {
    let out = run(cfg, true, false)?;
    Ok((out.filtration, out.draws))
}

/// As [`generate`], also returning the index over every labelled slice, the
/// same as `build_index(f, T - 2, T - 2, ..)` but without replaying the
/// filtration.
pub fn generate_with_index(cfg: &SyntheticConfig) -> Result<(Filtration, FeatureIndex)> {
    let out = run(cfg, false, true)?;
    let last = cfg.slices - 2;
    let index = FeatureIndex::from_cube(out.cube, last, last, cfg.features());
    Ok((out.filtration, index))
}

struct RunOutput {
    filtration: Filtration,
    draws: Vec<PairDraw>,
    cube: HashMap<FeatureVector, Counts>,
}

fn run(cfg: &SyntheticConfig, trace: bool, count: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut next_vertex: VertexId = 0;
    let mut pending = seed_arrivals(cfg, 0, &mut rng, &mut next_vertex);
    if !pending.iter().any(|s| s.len() > cfg.d) {
        return Err(Error::DegenerateStart(cfg.d));
    }
    let mut tracker = FeatureTracker::new(cfg.features());
    // d-simplices with at least one candidate of positive g
    let mut live: BTreeMap<Simplex, Vec<(VertexId, FeatureVector, f64)>> = BTreeMap::new();
    let mut slices = Vec::with_capacity(cfg.slices);
    let mut draws = Vec::new();
    let mut cube: HashMap<FeatureVector, Counts> = HashMap::new();
    for t in 0..cfg.slices {
        tracker.apply_slice(&pending, true);
        slices.push(std::mem::take(&mut pending));
        if t + 1 == cfg.slices {
            break;
        }
        if count {
            for (key, &n) in tracker.histogram() {
                cube.entry(key.clone()).or_default().possible += n;
            }
        }
        for s in tracker.changed() {
            let e = tracker.entry(s).expect("changed simplex has an entry");
            let cands: Vec<_> = e
                .cands
                .iter()
                .filter_map(|&(v, h)| {
                    let f = e.feature(h);
                    let g = cfg.ground_truth.eval(&f);
                    (g > 0.0).then_some((v, f, g))
                })
                .collect();
            if cands.is_empty() {
                live.remove(s);
            } else {
                live.insert(s.clone(), cands);
            }
        }
        let mut taus: BTreeMap<Simplex, Vec<(&FeatureVector, f64)>> = BTreeMap::new();
        for (s, cands) in &live {
            for (v, f, g) in cands {
                let tau = s.with_vertex(*v);
                if !tracker.complex().contains(&tau) {
                    taus.entry(tau).or_default().push((f, *g));
                }
            }
        }
        for (tau, reps) in taus {
            let u: f64 = rng.gen();
            if trace {
                draws.extend(reps.iter().map(|&(f, g)| PairDraw {
                    slice: t,
                    feature: f.clone(),
                    g,
                    fired: u < g,
                }));
            }
            if reps.iter().any(|&(_, g)| u < g) {
                pending.push(tau);
            }
        }
        pending.extend(seed_arrivals(cfg, t + 1, &mut rng, &mut next_vertex));
        if count {
            for (_, _, fv) in tracker.realized(&pending) {
                cube.get_mut(&fv).expect("realized pair is a possible pair").realized += 1;
            }
        }
    }
    Ok(RunOutput {
        filtration: Filtration::from_slices(slices),
        draws,
        cube,
    })
}

/// Bandwidth as a function of the number of slices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BetaSchedule {
    Fixed(f64),
    /// `β = T^-a`.
    Power(f64),
}

impl BetaSchedule {
    pub fn at(&self, slices: usize) -> f64 {
        match *self {
            BetaSchedule::Fixed(b) => b,
            BetaSchedule::Power(a) => (slices as f64).powf(-a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    pub replicates: usize,
    pub beta: BetaSchedule,
    pub delta: u64,
    /// Number of probed features.
    pub probes: usize,
}

impl MonteCarloOptions {
    /// `β = 1/T`, three probes.
    pub fn consistency(replicates: usize) -> Self {
        MonteCarloOptions {
            replicates,
            beta: BetaSchedule::Power(1.0),
            delta: 1,
            probes: 3,
        }
    }

    /// `β = T^-0.6`, one probe.
    pub fn normality(replicates: usize) -> Self {
        MonteCarloOptions {
            replicates,
            beta: BetaSchedule::Power(0.6),
            delta: 1,
            probes: 1,
        }
    }
}

fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.gen()
}

/// Index over every labelled slice of a generated filtration.
pub fn full_index(cfg: &SyntheticConfig) -> Result<FeatureIndex> {
    Ok(generate_with_index(cfg)?.1)
}

/// The `count` most frequent features with positive `g` in a pilot run.
pub fn pilot_probes(cfg: &SyntheticConfig, count: usize) -> Result<Vec<FeatureVector>> {
    let pilot = cfg.with_slices_and_seed(cfg.slices, derive_seed(cfg.seed, u64::MAX));
    let index = full_index(&pilot)?;
    let mut feats: Vec<(&FeatureVector, u64)> = index
        .iter()
        .filter(|(f, _)| cfg.ground_truth.eval(f) > 0.0)
        .map(|(f, c)| (f, c.possible))
        .collect();
    feats.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if feats.is_empty() {
        return Err(Error::DegenerateDistribution);
    }
    Ok(feats.into_iter().take(count).map(|(f, _)| f.clone()).collect())
}

fn replicate_estimates(
    cfg: &SyntheticConfig,
    slices: usize,
    replicate: usize,
    probes: &[FeatureVector],
    params: KernelParams,
) -> Result<Vec<f64>> {
    let seed = derive_seed(cfg.seed, ((slices as u64) << 32) | replicate as u64);
    let index = full_index(&cfg.with_slices_and_seed(slices, seed))?;
    probes
        .iter()
        .map(|p| estimate_or_fallback(&index, p, params, FallbackPolicy::BaseRate))
        .collect()
}

fn map_replicates<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub slices: usize,
    pub beta: f64,
    pub mean_abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub probes: Vec<FeatureVector>,
    pub truth: Vec<f64>,
    pub rows: Vec<ConsistencyRow>,
}

impl ConsistencyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("T,mean_abs_error\n");
        for r in &self.rows {
            writeln!(out, "{},{}", r.slices, r.mean_abs_error).unwrap();
        }
        out
    }
}

/// Mean over replicates and probes of `|g̃_T(F) - g(F)|` for each `T`.
pub fn consistency_experiment(
    cfg: &SyntheticConfig,
    t_grid: &[usize],
    opts: &MonteCarloOptions,
) -> Result<ConsistencyReport> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "T grid must be non-empty and strictly ascending".into(),
        ));
    }
    if opts.replicates == 0 {
        return Err(Error::InvalidConfig("at least one replicate is required".into()));
    }
    let top = *t_grid.last().expect("non-empty grid");
    let probes = pilot_probes(&cfg.with_slices_and_seed(top, cfg.seed), opts.probes)?;
    let truth: Vec<f64> = probes.iter().map(|p| cfg.ground_truth.eval(p)).collect();
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let params = KernelParams::new(opts.beta.at(t), opts.delta)?;
        let per_rep = map_replicates(opts.replicates, |r| replicate_estimates(cfg, t, r, &probes, params))?;
        let total: f64 = per_rep
            .iter()
            .flat_map(|est| est.iter().zip(&truth).map(|(e, g)| (e - g).abs()))
            .sum();
        rows.push(ConsistencyRow {
            slices: t,
            beta: params.beta,
            mean_abs_error: total / (opts.replicates * probes.len()) as f64,
        });
    }
    Ok(ConsistencyReport { probes, truth, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub probe: FeatureVector,
    pub truth: f64,
    pub beta: f64,
    /// `√T (g̃_T(F) - g(F))` per replicate.
    pub z: Vec<f64>,
    pub ks: KsResult,
    pub empirical_variance: f64,
}

impl NormalityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("replicate,z_value\n");
        for (i, z) in self.z.iter().enumerate() {
            writeln!(out, "{i},{z}").unwrap();
        }
        out
    }
}

/// KS test of the standardized `√T (g̃_T(F) - g(F))` against `N(0, 1)` at the
/// most frequent pilot feature.
pub fn normality_experiment(cfg: &SyntheticConfig, opts: &MonteCarloOptions) -> Result<NormalityReport> {
    if opts.replicates < 2 {
        return Err(Error::InvalidConfig("at least two replicates are required".into()));
    }
    let probe = pilot_probes(cfg, 1)?.remove(0);
    let truth = cfg.ground_truth.eval(&probe);
    let t = cfg.slices;
    let params = KernelParams::new(opts.beta.at(t), opts.delta)?;
    let probes = [probe.clone()];
    let root_t = (t as f64).sqrt();
    let z = map_replicates(opts.replicates, |r| {
        Ok(root_t * (replicate_estimates(cfg, t, r, &probes, params)?[0] - truth))
    })?;
    let (mean, std) = mean_std(&z);
    if std.is_nan() || std <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let standardized: Vec<f64> = z.iter().map(|x| (x - mean) / std).collect();
    Ok(NormalityReport {
        probe,
        truth,
        beta: params.beta,
        ks: ks_test_normal(&standardized),
        empirical_variance: std * std,
        z,
    })
}
