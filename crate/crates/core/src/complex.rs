//! Graph simplicial complexes stored by their maximal simplices.
//!
//! Faces are never materialized: a simplex belongs to the complex iff it is a
//! subset of some maximal simplex. The 1-skeleton is kept alongside as an
//! adjacency map since reachability queries need it on every lookup.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::{Deserialize, Serialize};

use crate::simplex::{for_each_combination, Simplex, VertexId};

/// Face counts `(f_{-1}, f_0, ..., f_{D-1})`, zero padded to a fixed length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceVector(pub Vec<u64>);

impl FaceVector {
    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    /// `D`, the number of face dimensions recorded after the empty face.
    pub fn max_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertex_count(&self) -> u64 {
        self.0.get(1).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ComplexSnapshot {
    facets: Vec<Option<Simplex>>,
    incidence: HashMap<VertexId, Vec<usize>>,
    adjacency: HashMap<VertexId, BTreeSet<VertexId>>,
    live: usize,
}

impl PartialEq for ComplexSnapshot {
    fn eq(&self, other: &Self) -> bool {
        self.live == other.live && self.maximal() == other.maximal()
    }
}

impl Eq for ComplexSnapshot {}

impl ComplexSnapshot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(simplices: I) -> Self {
        let mut c = Self::new();
        for s in simplices {
            c.insert(&s);
        }
        c
    }

    /// Maximal simplices in sorted order.
    pub fn maximal(&self) -> Vec<Simplex> {
        let mut out: Vec<Simplex> = self.facets.iter().flatten().cloned().collect();
        out.sort();
        out
    }

    pub fn maximal_iter(&self) -> impl Iterator<Item = &Simplex> {
        self.facets.iter().flatten()
    }

    pub fn facet_count(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.adjacency.keys().copied().collect()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adjacency.contains_key(&v)
    }

    /// Neighbors of `v` in the 1-skeleton; empty for unknown vertices.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn neighbor_set(&self, v: VertexId) -> Option<&BTreeSet<VertexId>> {
        self.adjacency.get(&v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency.get(&v).map_or(0, |s| s.len())
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Maximal simplices that contain `v`.
    pub fn facets_containing(&self, v: VertexId) -> impl Iterator<Item = &Simplex> + '_ {
        self.incidence
            .get(&v)
            .into_iter()
            .flat_map(move |ids| ids.iter().filter_map(move |&i| self.facets[i].as_ref()))
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        // scan the facets of the rarest vertex
        let mut best: Option<&Vec<usize>> = None;
        for v in s.vertices() {
            let Some(ids) = self.incidence.get(v) else {
                return false;
            };
            if best.is_none_or(|b| ids.len() < b.len()) {
                best = Some(ids);
            }
        }
        best.into_iter()
            .flatten()
            .filter_map(|&i| self.facets[i].as_ref())
            .any(|m| s.is_face_of(m))
    }

    /// Adds `s` and all of its faces. Returns `false` when `s` was already present.
    pub fn insert(&mut self, s: &Simplex) -> bool {
        if self.contains(s) {
            return false;
        }
        let mut absorbed: HashSet<usize> = HashSet::default();
        for v in s.vertices() {
            if let Some(ids) = self.incidence.get(v) {
                for &i in ids {
                    if let Some(m) = &self.facets[i] {
                        if m.is_face_of(s) {
                            absorbed.insert(i);
                        }
                    }
                }
            }
        }
        for i in absorbed {
            let m = self.facets[i].take().expect("absorbed facet is live");
            for v in m.vertices() {
                if let Some(ids) = self.incidence.get_mut(v) {
                    ids.retain(|&j| j != i);
                }
            }
            self.live -= 1;
        }
        let id = self.facets.len();
        let vs = s.vertices();
        for (i, &a) in vs.iter().enumerate() {
            self.incidence.entry(a).or_default().push(id);
            let nb = self.adjacency.entry(a).or_default();
            for &b in &vs[i + 1..] {
                nb.insert(b);
            }
            for &b in &vs[..i] {
                nb.insert(b);
            }
        }
        self.facets.push(Some(s.clone()));
        self.live += 1;
        true
    }

    /// Returns a copy with `s` inserted.
    pub fn with_inserted(&self, s: &Simplex) -> Self {
        let mut c = self.clone();
        c.insert(s);
        c
    }

    /// All distinct `dim`-faces of the complex.
    pub fn simplices_of_dim(&self, dim: usize) -> BTreeSet<Simplex> {
        let mut out = BTreeSet::new();
        for m in self.maximal_iter() {
            if m.len() > dim {
                for_each_combination(m.vertices(), dim + 1, |c| {
                    out.insert(Simplex::from_sorted(c));
                });
            }
        }
        out
    }

    /// Face vector of length `max_dim + 1`.
    pub fn f_vector(&self, max_dim: usize) -> FaceVector {
        let mut counts = vec![0u64; max_dim + 1];
        counts[0] = 1;
        for k in 0..max_dim {
            counts[k + 1] = match k {
                0 => self.vertex_count() as u64,
                1 => self.edge_count() as u64,
                _ => self.simplices_of_dim(k).len() as u64,
            };
        }
        FaceVector(counts)
    }

    /// Complex induced on `vertices`: every face whose vertices all lie in the set.
    pub fn induced(&self, vertices: &HashSet<VertexId>) -> ComplexSnapshot {
        let mut pieces: Vec<Simplex> = Vec::new();
        let mut seen: HashSet<usize> = HashSet::default();
        for v in vertices {
            for &i in self.incidence.get(v).into_iter().flatten() {
                if !seen.insert(i) {
                    continue;
                }
                if let Some(m) = &self.facets[i] {
                    let kept: Vec<VertexId> = m.vertices().iter().copied().filter(|x| vertices.contains(x)).collect();
                    if !kept.is_empty() {
                        pieces.push(Simplex::from_sorted(&kept));
                    }
                }
            }
        }
        // larger pieces first so smaller ones are dropped as faces
        pieces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut out = ComplexSnapshot::new();
        for p in &pieces {
            out.insert(p);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    const A: u32 = 1;
    const B: u32 = 2;
    const C: u32 = 3;
    const D: u32 = 4;

    #[test]
    fn insert_absorbs_and_ignores_faces() {
        let mut c = ComplexSnapshot::new();
        c.insert(&s(&[A, B, C]));
        assert_eq!(c.maximal(), vec![s(&[A, B, C])]);
        assert!(!c.insert(&s(&[A, B])));
        assert_eq!(c.maximal(), vec![s(&[A, B, C])]);

        let mut e = ComplexSnapshot::new();
        e.insert(&s(&[A, B]));
        e.insert(&s(&[A, B, C]));
        assert_eq!(e.maximal(), vec![s(&[A, B, C])]);
        assert_eq!(e.facet_count(), 1);
    }

    #[test]
    fn contains_distinguishes_open_and_closed_triangle() {
        let closed = ComplexSnapshot::from_simplices([s(&[A, B, C])]);
        assert!(closed.contains(&s(&[B, C])));
        let open = ComplexSnapshot::from_simplices([s(&[A, B]), s(&[B, C]), s(&[A, C])]);
        assert!(!open.contains(&s(&[A, B, C])));
        assert!(open.contains(&s(&[A, C])));
        assert!(!ComplexSnapshot::new().contains(&s(&[A])));
    }

    #[test]
    fn simplices_of_dim_dedups_shared_faces() {
        let c = ComplexSnapshot::from_simplices([s(&[A, B, C])]);
        assert_eq!(
            c.simplices_of_dim(1).into_iter().collect::<Vec<_>>(),
            vec![s(&[A, B]), s(&[A, C]), s(&[B, C])]
        );
        let two = ComplexSnapshot::from_simplices([s(&[A, B, C]), s(&[B, C, D])]);
        assert_eq!(two.simplices_of_dim(1).len(), 5);
        let edge = ComplexSnapshot::from_simplices([s(&[A, B])]);
        assert!(edge.simplices_of_dim(2).is_empty());
    }

    #[test]
    fn f_vector_small_cases() {
        let v = ComplexSnapshot::from_simplices([s(&[7])]);
        assert_eq!(v.f_vector(3).0, vec![1, 1, 0, 0]);
        let t = ComplexSnapshot::from_simplices([s(&[A, B, C])]);
        assert_eq!(t.f_vector(3).0, vec![1, 3, 3, 1]);
        assert_eq!(ComplexSnapshot::new().f_vector(2).0, vec![1, 0, 0]);
        // a 5-vertex facet only reports faces up to dimension D-1
        let big = ComplexSnapshot::from_simplices([s(&[1, 2, 3, 4, 5])]);
        assert_eq!(big.f_vector(3).0, vec![1, 5, 10, 10]);
    }

    #[test]
    fn induced_keeps_only_faces_inside() {
        let c = ComplexSnapshot::from_simplices([s(&[1, 2, 3]), s(&[3, 4])]);
        let sub = c.induced(&[1, 2, 4].into_iter().collect());
        assert_eq!(sub.maximal(), vec![s(&[1, 2]), s(&[4])]);
    }
}
