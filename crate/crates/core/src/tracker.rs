//! Slice-by-slice maintenance of every `(σ, ṽ)` feature in a filtration.
//!
//! A d-simplex's features depend only on its k-ball, the faces spanned by the
//! ball, and co-occurrence weights between ball vertices. After a slice is
//! applied, only simplices with a vertex within distance k of an arriving
//! vertex can change, so only those are recomputed. The tracker also keeps
//! the per-slice histogram of possible features up to date by delta.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::complex::ComplexSnapshot;
use crate::cooccurrence::CoOccurrenceStore;
use crate::feature::FeatureVector;
use crate::neighborhood::bfs_within;
use crate::simplex::{for_each_combination, Simplex, VertexId};

/// Query dimension `d`, ball radius `k`, and face-vector length parameter `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FeatureConfig {
    pub d: usize,
    pub k: usize,
    pub max_dim: usize,
}

impl FeatureConfig {
    /// `D = d + 2` by default.
    pub fn new(d: usize, k: usize) -> Self {
        FeatureConfig { d, k, max_dim: d + 2 }
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    pub fn feature_len(&self) -> usize {
        self.max_dim + 2
    }
}

/// Distinct faces of the complex per dimension, indexed by vertex.
#[derive(Clone, Debug, Default)]
struct FaceIndex {
    seen: Vec<HashSet<Simplex>>,
    by_vertex: Vec<HashMap<VertexId, Vec<Simplex>>>,
}

impl FaceIndex {
    fn new(top: usize) -> Self {
        FaceIndex {
            seen: vec![HashSet::default(); top + 1],
            by_vertex: vec![HashMap::default(); top + 1],
        }
    }

    fn top(&self) -> usize {
        self.seen.len() - 1
    }

    /// Records every face of `s` up to the top dimension.
    fn add(&mut self, s: &Simplex) {
        let top = self.top().min(s.dimension());
        for j in 0..=top {
            let (seen, by_vertex) = (&mut self.seen[j], &mut self.by_vertex[j]);
            for_each_combination(s.vertices(), j + 1, |c| {
                let f = Simplex::from_sorted(c);
                if seen.contains(&f) {
                    return;
                }
                for v in c {
                    by_vertex.entry(*v).or_default().push(f.clone());
                }
                seen.insert(f);
            });
        }
    }

    fn with_vertex(&self, j: usize, v: VertexId) -> &[Simplex] {
        self.by_vertex[j].get(&v).map_or(&[], |x| x.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Entry {
    pub nbhd: Vec<u64>,
    /// Candidates sorted by vertex id, with their scores.
    pub cands: Vec<(VertexId, u64)>,
}

impl Entry {
    pub fn feature(&self, score: u64) -> FeatureVector {
        let mut v = Vec::with_capacity(self.nbhd.len() + 1);
        v.extend_from_slice(&self.nbhd);
        v.push(score);
        FeatureVector(v)
    }

    pub fn score_of(&self, v: VertexId) -> Option<u64> {
        self.cands
            .binary_search_by_key(&v, |c| c.0)
            .ok()
            .map(|i| self.cands[i].1)
    }
}

pub struct FeatureTracker {
    cfg: FeatureConfig,
    complex: ComplexSnapshot,
    store: CoOccurrenceStore,
    faces: FaceIndex,
    entries: HashMap<Simplex, Entry>,
    histogram: HashMap<FeatureVector, u64>,
    tracking: bool,
    slices_applied: usize,
    changed: Vec<Simplex>,
}

impl FeatureTracker {
    pub fn new(cfg: FeatureConfig) -> Self {
        let top = cfg.d.max(cfg.max_dim.saturating_sub(1));
        FeatureTracker {
            cfg,
            complex: ComplexSnapshot::new(),
            store: CoOccurrenceStore::new(),
            faces: FaceIndex::new(top),
            entries: HashMap::default(),
            histogram: HashMap::default(),
            tracking: false,
            slices_applied: 0,
            changed: Vec::new(),
        }
    }

    pub fn config(&self) -> FeatureConfig {
        self.cfg
    }

    pub fn complex(&self) -> &ComplexSnapshot {
        &self.complex
    }

    pub fn store(&self) -> &CoOccurrenceStore {
        &self.store
    }

    /// Index of the most recently applied slice.
    pub fn current_slice(&self) -> Option<usize> {
        self.slices_applied.checked_sub(1)
    }

    /// Possible-pair counts per feature at the current slice.
    pub fn histogram(&self) -> &HashMap<FeatureVector, u64> {
        assert!(self.tracking, "histogram requested before tracking started");
        &self.histogram
    }

    /// Simplices whose entry was created or changed by the last slice.
    pub(crate) fn changed(&self) -> &[Simplex] {
        &self.changed
    }

    pub(crate) fn entry(&self, s: &Simplex) -> Option<&Entry> {
        self.entries.get(s)
    }

    /// Every `(σ, ṽ, F)` at the current slice, sorted.
    pub fn pairs(&self) -> Vec<(Simplex, VertexId, FeatureVector)> {
        let mut out: Vec<_> = self
            .entries
            .iter()
            .flat_map(|(s, e)| e.cands.iter().map(move |&(v, h)| (s.clone(), v, e.feature(h))))
            .collect();
        out.sort();
        out
    }

    /// Applies the next slice. Features are only maintained once `track` is
    /// first passed as true; earlier slices just grow the complex.
    pub fn apply_slice(&mut self, arrivals: &[Simplex], track: bool) {
        let d = self.cfg.d;
        for s in arrivals {
            if self.complex.insert(s) {
                self.faces.add(s);
            }
            self.store.add(s);
        }
        self.slices_applied += 1;
        self.changed.clear();
        if !track && !self.tracking {
            return;
        }
        if !self.tracking {
            self.tracking = true;
            let all: Vec<Simplex> = self.faces.seen[d].iter().cloned().collect();
            self.refresh(all);
            return;
        }
        let touched: HashSet<VertexId> = arrivals.iter().flat_map(|s| s.vertices().iter().copied()).collect();
        let near = bfs_within(&self.complex, touched, self.cfg.k);
        let mut dirty: HashSet<Simplex> = HashSet::default();
        for v in &near {
            for s in self.faces.with_vertex(d, *v) {
                dirty.insert(s.clone());
            }
        }
        self.refresh(dirty.into_iter().collect());
    }

    fn refresh(&mut self, dirty: Vec<Simplex>) {
        let this = &*self;
        #[cfg(feature = "parallel")]
        let fresh: Vec<(Simplex, Entry)> = if dirty.len() > 64 {
            dirty
                .into_par_iter()
                .map(|s| {
                    let e = this.compute(&s);
                    (s, e)
                })
                .collect()
        } else {
            dirty
                .into_iter()
                .map(|s| {
                    let e = this.compute(&s);
                    (s, e)
                })
                .collect()
        };
        #[cfg(not(feature = "parallel"))]
        let fresh: Vec<(Simplex, Entry)> = dirty
            .into_iter()
            .map(|s| {
                let e = this.compute(&s);
                (s, e)
            })
            .collect();
        for (s, e) in fresh {
            if let Some(old) = self.entries.get(&s) {
                if *old == e {
                    continue;
                }
                for &(_, h) in &old.cands {
                    let key = old.feature(h);
                    let n = self.histogram.get_mut(&key).expect("counted feature");
                    *n -= 1;
                    if *n == 0 {
                        self.histogram.remove(&key);
                    }
                }
            }
            for &(_, h) in &e.cands {
                *self.histogram.entry(e.feature(h)).or_insert(0) += 1;
            }
            self.changed.push(s.clone());
            self.entries.insert(s, e);
        }
    }

    fn compute(&self, s: &Simplex) -> Entry {
        let ball = bfs_within(&self.complex, s.vertices().iter().copied(), self.cfg.k);
        let dims = self.cfg.max_dim;
        let mut nbhd = vec![0u64; dims + 1];
        nbhd[0] = 1;
        if dims >= 1 {
            nbhd[1] = ball.len() as u64;
        }
        for j in 1..dims {
            let mut count = 0u64;
            for &v in &ball {
                for f in self.faces.with_vertex(j, v) {
                    let vs = f.vertices();
                    if vs[0] == v && vs[1..].iter().all(|x| ball.contains(x)) {
                        count += 1;
                    }
                }
            }
            nbhd[j + 1] = count;
        }
        let mut cands: Vec<(VertexId, u64)> = ball
            .iter()
            .copied()
            .filter(|v| !s.contains_vertex(*v))
            .map(|v| (v, self.store.score_unchecked(s, v)))
            .collect();
        cands.sort_unstable();
        Entry { nbhd, cands }
    }

    /// Features of pairs whose (d+1)-simplex is new in `next` relative to the
    /// current complex, one entry per `(σ, ṽ)`.
    pub fn realized(&self, next: &[Simplex]) -> Vec<(Simplex, VertexId, FeatureVector)> {
        let d = self.cfg.d;
        let mut taus: HashSet<Simplex> = HashSet::default();
        for a in next {
            if a.len() < d + 2 {
                continue;
            }
            for_each_combination(a.vertices(), d + 2, |c| {
                let tau = Simplex::from_sorted(c);
                if !taus.contains(&tau) && !self.complex.contains(&tau) {
                    taus.insert(tau);
                }
            });
        }
        let mut out = Vec::new();
        for tau in &taus {
            let vs = tau.vertices();
            for i in 0..vs.len() {
                let v = vs[i];
                let rest: Vec<VertexId> = [&vs[..i], &vs[i + 1..]].concat();
                let sigma = Simplex::from_sorted(&rest);
                if let Some(e) = self.entries.get(&sigma) {
                    if let Some(h) = e.score_of(v) {
                        out.push((sigma, v, e.feature(h)));
                    }
                }
            }
        }
        out.sort();
        out
    }
}
