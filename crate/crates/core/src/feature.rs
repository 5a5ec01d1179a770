//! Feature vectors: neighborhood face vector followed by the co-occurrence score.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{ComplexSnapshot, FaceVector};
use crate::cooccurrence::CoOccurrenceStore;
use crate::error::{Error, Result};
use crate::neighborhood::{k_ball_simplex, KBall};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<u64>);

impl FeatureVector {
    pub fn from_parts(nbhd: &FaceVector, score: u64) -> Self {
        let mut v = Vec::with_capacity(nbhd.0.len() + 1);
        v.extend_from_slice(&nbhd.0);
        v.push(score);
        FeatureVector(v)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The trailing co-occurrence score.
    pub fn score(&self) -> u64 {
        *self.0.last().expect("feature vectors are non-empty")
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for FeatureVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("feature entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureVector(values))
    }
}

pub fn l1_distance(a: &FeatureVector, b: &FeatureVector) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(l1_unchecked(&a.0, &b.0))
}

#[inline]
pub(crate) fn l1_unchecked(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum()
}

/// Neighborhood and ball of `s`, reusable across all candidates of `s`.
pub struct SimplexContext {
    pub ball: KBall,
    pub nbhd: FaceVector,
}

impl SimplexContext {
    pub fn new(c: &ComplexSnapshot, s: &Simplex, k: usize, max_dim: usize) -> Result<Self> {
        let ball = k_ball_simplex(c, s, k)?;
        let nbhd = c.induced(&ball.member_set()).f_vector(max_dim);
        Ok(SimplexContext { ball, nbhd })
    }

    pub fn feature(&self, store: &CoOccurrenceStore, v: VertexId) -> Result<FeatureVector> {
        if self.ball.center.contains_vertex(v) {
            return Err(Error::VertexAlreadyMember(v));
        }
        if !self.ball.members.contains(&v) {
            return Err(Error::CandidateOutsideBall(v));
        }
        Ok(FeatureVector::from_parts(
            &self.nbhd,
            store.score_unchecked(&self.ball.center, v),
        ))
    }
}

/// `F_t(s, v)` for a single candidate.
pub fn extract(
    c: &ComplexSnapshot,
    store: &CoOccurrenceStore,
    s: &Simplex,
    v: VertexId,
    k: usize,
    max_dim: usize,
) -> Result<FeatureVector> {
    if s.contains_vertex(v) {
        return Err(Error::VertexAlreadyMember(v));
    }
    SimplexContext::new(c, s, k, max_dim)?.feature(store, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;
    use proptest::prelude::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn worked_example_feature_with_empty_history() {
        let g = worked_example();
        let st = CoOccurrenceStore::new();
        for v in [5, 7, 15] {
            let f = extract(&g, &st, &s(&[9, 10]), v, 1, 3).unwrap();
            assert_eq!(f.0, vec![1, 10, 11, 2, 0]);
        }
        assert_eq!(
            extract(&g, &st, &s(&[9, 10]), 1, 1, 3),
            Err(Error::CandidateOutsideBall(1))
        );
        assert_eq!(
            extract(&g, &st, &s(&[9, 10]), 9, 1, 3),
            Err(Error::VertexAlreadyMember(9))
        );
    }

    #[test]
    fn isomorphic_contexts_share_features() {
        let a = ComplexSnapshot::from_simplices([s(&[1, 2, 3])]);
        let b = ComplexSnapshot::from_simplices([s(&[7, 8, 9])]);
        let st = CoOccurrenceStore::new();
        assert_eq!(
            extract(&a, &st, &s(&[1, 2]), 3, 1, 3).unwrap(),
            extract(&b, &st, &s(&[8, 9]), 7, 1, 3).unwrap()
        );
    }

    #[test]
    fn l1_examples_and_parse() {
        let a = FeatureVector(vec![1, 2, 0]);
        let b = FeatureVector(vec![1, 0, 1]);
        assert_eq!(l1_distance(&a, &a).unwrap(), 0);
        assert_eq!(l1_distance(&a, &b).unwrap(), 3);
        assert_eq!(l1_distance(&b, &a).unwrap(), 3);
        assert_eq!(
            l1_distance(&a, &FeatureVector(vec![1])),
            Err(Error::DimensionMismatch(3, 1))
        );
        assert_eq!(a.to_string(), "1,2,0");
        assert_eq!("1,2,0".parse::<FeatureVector>().unwrap(), a);
        assert!("1,x".parse::<FeatureVector>().is_err());
    }

    proptest! {
        #[test]
        fn l1_is_a_metric(
            a in prop::collection::vec(0u64..20, 5),
            b in prop::collection::vec(0u64..20, 5),
            c in prop::collection::vec(0u64..20, 5),
        ) {
            let (a, b, c) = (FeatureVector(a), FeatureVector(b), FeatureVector(c));
            let ab = l1_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, l1_distance(&b, &a).unwrap());
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(ab <= l1_distance(&a, &c).unwrap() + l1_distance(&c, &b).unwrap());
        }
    }
}
