//! Pairwise co-occurrence weights accumulated over the arrival history.

use rustc_hash::FxHashMap as HashMap;

use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoOccurrenceStore {
    weights: HashMap<(VertexId, VertexId), u64>,
    last_updated_slice: Option<usize>,
}

#[inline]
fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CoOccurrenceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_updated_slice(&self) -> Option<usize> {
        self.last_updated_slice
    }

    /// Each arriving d-simplex adds `d` to every vertex pair inside it.
    pub fn record_arrivals(&mut self, arrivals: &[Simplex], slice: usize) -> Result<()> {
        let expected = self.last_updated_slice.map_or(0, |s| s + 1);
        if slice != expected {
            return Err(Error::SliceOrderViolation { expected, got: slice });
        }
        for s in arrivals {
            self.add(s);
        }
        self.last_updated_slice = Some(slice);
        Ok(())
    }

    pub(crate) fn add(&mut self, s: &Simplex) {
        let d = s.dimension() as u64;
        if d == 0 {
            return;
        }
        let vs = s.vertices();
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                *self.weights.entry((a, b)).or_insert(0) += d;
            }
        }
    }

    pub fn weight(&self, a: VertexId, b: VertexId) -> u64 {
        self.weights.get(&key(a, b)).copied().unwrap_or(0)
    }

    pub fn pair_count(&self) -> usize {
        self.weights.len()
    }

    /// `h(s, v) = Σ_i weight(s_i, v)`.
    pub fn score(&self, s: &Simplex, v: VertexId) -> Result<u64> {
        if s.contains_vertex(v) {
            return Err(Error::VertexAlreadyMember(v));
        }
        Ok(self.score_unchecked(s, v))
    }

    pub(crate) fn score_unchecked(&self, s: &Simplex, v: VertexId) -> u64 {
        s.vertices().iter().map(|&u| self.weight(u, v)).sum()
    }
}
