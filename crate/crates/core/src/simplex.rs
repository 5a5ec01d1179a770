use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type VertexId = u32;

/// A simplex as its strictly ascending vertex list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex(SmallVec<[VertexId; 4]>);

impl Simplex {
    /// Sorts and deduplicates `vertices`.
    pub fn new<I: IntoIterator<Item = VertexId>>(vertices: I) -> Result<Self> {
        let mut v: SmallVec<[VertexId; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(Error::InvalidSimplex);
        }
        v.sort_unstable();
        v.dedup();
        Ok(Simplex(v))
    }

    /// Caller guarantees `v` is non-empty and strictly ascending.
    pub(crate) fn from_sorted(v: &[VertexId]) -> Self {
        debug_assert!(!v.is_empty() && v.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(v))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Subset test on sorted vertex lists.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    /// `self ∪ {v}`.
    pub fn with_vertex(&self, v: VertexId) -> Simplex {
        let mut out = self.0.clone();
        if let Err(pos) = out.binary_search(&v) {
            out.insert(pos, v);
        }
        Simplex(out)
    }

    /// All faces with `dim + 1` vertices, in lexicographic order.
    pub fn faces(&self, dim: isize) -> Result<Vec<Simplex>> {
        if dim < 0 || dim as usize > self.dimension() {
            return Err(Error::InvalidDimension {
                dim,
                max: self.dimension(),
            });
        }
        let mut out = Vec::new();
        for_each_combination(&self.0, dim as usize + 1, |c| out.push(Simplex::from_sorted(c)));
        Ok(out)
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn is_sorted_subset(small: &[VertexId], big: &[VertexId]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut it = big.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// Calls `f` with every `size`-subset of `items` in lexicographic order.
pub(crate) fn for_each_combination<T: Copy, F: FnMut(&[T])>(items: &[T], size: usize, mut f: F) {
    let n = items.len();
    if size == 0 || size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        let mut i = size;
        while i > 0 && idx[i - 1] == i - 1 + n - size {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
        for j in (i - 1)..size {
            buf[j] = items[idx[j]];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> u64 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: u64 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u64 / (i + 1) as u64;
        }
        acc
    }

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn make_simplex_sorts_and_dedups() {
        let a = s(&[10, 9]);
        assert_eq!(a.vertices(), &[9, 10]);
        assert_eq!(a.dimension(), 1);
        assert_eq!(s(&[5]).dimension(), 0);
        let c = s(&[3, 1, 3, 2]);
        assert_eq!(c.vertices(), &[1, 2, 3]);
        assert_eq!(c.dimension(), 2);
        assert_eq!(Simplex::new(Vec::new()), Err(Error::InvalidSimplex));
    }

    #[test]
    fn faces_lexicographic() {
        // A=1, B=2, C=3
        let abc = s(&[1, 2, 3]);
        assert_eq!(abc.faces(1).unwrap(), vec![s(&[1, 2]), s(&[1, 3]), s(&[2, 3])]);
        assert_eq!(s(&[1, 2]).faces(1).unwrap(), vec![s(&[1, 2])]);
        assert_eq!(s(&[1, 2, 3, 4]).faces(2).unwrap().len(), 4);
        assert!(matches!(abc.faces(3), Err(Error::InvalidDimension { .. })));
        assert!(matches!(abc.faces(-1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn subset_and_extension() {
        assert!(s(&[2, 4]).is_face_of(&s(&[1, 2, 3, 4])));
        assert!(!s(&[2, 5]).is_face_of(&s(&[1, 2, 3, 4])));
        assert!(!s(&[0]).is_face_of(&s(&[1, 2])));
        assert_eq!(s(&[1, 3]).with_vertex(2), s(&[1, 2, 3]));
        assert_eq!(s(&[1, 3]).with_vertex(3), s(&[1, 3]));
    }

    #[test]
    fn combination_counts_match_binomial() {
        let items: Vec<u32> = (0..7).collect();
        for k in 0..=8 {
            let mut n = 0u64;
            for_each_combination(&items, k, |_| n += 1);
            let expected = if k == 0 { 0 } else { binomial(7, k) };
            assert_eq!(n, expected, "k={k}");
        }
    }
}
