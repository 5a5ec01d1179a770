//! k-balls in the 1-skeleton and the sub-complex they span.

use std::collections::{BTreeSet, VecDeque};

use rustc_hash::FxHashSet as HashSet;

use crate::complex::{ComplexSnapshot, FaceVector};
use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KBall {
    pub center: Simplex,
    pub radius: usize,
    pub members: BTreeSet<VertexId>,
}

impl KBall {
    /// Ball members that are not vertices of the center.
    pub fn candidates(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members
            .iter()
            .copied()
            .filter(|v| !self.center.contains_vertex(*v))
    }

    pub fn member_set(&self) -> HashSet<VertexId> {
        self.members.iter().copied().collect()
    }
}

/// Multi-source BFS to depth `k`; sources are included.
pub(crate) fn bfs_within<I>(c: &ComplexSnapshot, sources: I, k: usize) -> HashSet<VertexId>
where
    I: IntoIterator<Item = VertexId>,
{
    let mut seen: HashSet<VertexId> = HashSet::default();
    let mut queue: VecDeque<(VertexId, usize)> = VecDeque::new();
    for s in sources {
        if seen.insert(s) {
            queue.push_back((s, 0));
        }
    }
    while let Some((v, depth)) = queue.pop_front() {
        if depth == k {
            continue;
        }
        for w in c.neighbors(v) {
            if seen.insert(w) {
                queue.push_back((w, depth + 1));
            }
        }
    }
    seen
}

pub fn k_ball_vertex(c: &ComplexSnapshot, v: VertexId, k: usize) -> Result<BTreeSet<VertexId>> {
    if !c.has_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    Ok(bfs_within(c, [v], k).into_iter().collect())
}

/// Union of the vertex balls around each vertex of `s`.
pub fn k_ball_simplex(c: &ComplexSnapshot, s: &Simplex, k: usize) -> Result<KBall> {
    if !c.contains(s) {
        return Err(Error::SimplexNotPresent(s.to_string()));
    }
    let members = bfs_within(c, s.vertices().iter().copied(), k).into_iter().collect();
    Ok(KBall {
        center: s.clone(),
        radius: k,
        members,
    })
}

/// The complex induced on the k-ball of `s`.
pub fn sub_complex(c: &ComplexSnapshot, s: &Simplex, k: usize) -> Result<ComplexSnapshot> {
    let ball = k_ball_simplex(c, s, k)?;
    Ok(c.induced(&ball.member_set()))
}

/// Face vector of the sub-complex spanned by the k-ball of `s`.
pub fn neighborhood_feature(c: &ComplexSnapshot, s: &Simplex, k: usize, max_dim: usize) -> Result<FaceVector> {
    Ok(sub_complex(c, s, k)?.f_vector(max_dim))
}
