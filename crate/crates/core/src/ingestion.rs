//! Timestamped-simplex datasets and time-sliced filtrations.
//!
//! Input follows the three-file layout used by the public higher-order
//! datasets: `*-nverts.txt` (vertex count per simplex), `*-simplices.txt`
//! (flattened vertex ids) and `*-times.txt` (one timestamp per simplex).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use crate::complex::ComplexSnapshot;
use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArrivalLog {
    pub arrivals: Vec<(i64, Simplex)>,
}

impl ArrivalLog {
    /// Stable sort by timestamp.
    pub fn new(mut arrivals: Vec<(i64, Simplex)>) -> Self {
        arrivals.sort_by_key(|(t, _)| *t);
        ArrivalLog { arrivals }
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        let mut v: Vec<VertexId> = self
            .arrivals
            .iter()
            .flat_map(|(_, s)| s.vertices().iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// One line per arrival: `timestamp v1 v2 ... vk`.
    pub fn to_normalized(&self) -> String {
        let mut out = String::new();
        for (t, s) in &self.arrivals {
            write!(out, "{t}").unwrap();
            for v in s.vertices() {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_normalized(text: &str) -> Result<Self> {
        let mut arrivals = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let t = parse_int::<i64>(toks.next().unwrap_or_default(), n + 1)?;
            let vs = toks
                .map(|x| parse_int::<VertexId>(x, n + 1))
                .collect::<Result<Vec<_>>>()?;
            let s = Simplex::new(vs)
                .map_err(|_| Error::MalformedDataset(format!("line {}: arrival without vertices", n + 1)))?;
            arrivals.push((t, s));
        }
        Ok(ArrivalLog::new(arrivals))
    }

    /// The three-file layout as strings `(nverts, simplices, times)`.
    pub fn to_three_files(&self) -> (String, String, String) {
        let (mut nv, mut sx, mut tm) = (String::new(), String::new(), String::new());
        for (t, s) in &self.arrivals {
            writeln!(nv, "{}", s.len()).unwrap();
            for v in s.vertices() {
                writeln!(sx, "{v}").unwrap();
            }
            writeln!(tm, "{t}").unwrap();
        }
        (nv, sx, tm)
    }
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    tok.parse::<T>()
        .map_err(|e| Error::Parse(format!("token {tok:?} near line {line}: {e}")))
}

fn read_ints<T: std::str::FromStr, R: Read>(r: R, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let mut out = Vec::new();
    for (n, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        for tok in line.split_whitespace() {
            out.push(parse_int::<T>(tok, n + 1).map_err(|e| Error::Parse(format!("{what}: {e}")))?);
        }
    }
    Ok(out)
}

/// Decodes the three parallel streams into a timestamp-sorted log.
pub fn parse_dataset<A: Read, B: Read, C: Read>(nverts: A, simplices: B, times: C) -> Result<ArrivalLog> {
    let nverts: Vec<usize> = read_ints(nverts, "nverts")?;
    let flat: Vec<VertexId> = read_ints(simplices, "simplices")?;
    let times: Vec<i64> = read_ints(times, "times")?;
    let total: usize = nverts.iter().sum();
    if total != flat.len() {
        return Err(Error::MalformedDataset(format!(
            "vertex counts sum to {total} but the simplices file has {} entries",
            flat.len()
        )));
    }
    if nverts.len() != times.len() {
        return Err(Error::MalformedDataset(format!(
            "{} simplices but {} timestamps",
            nverts.len(),
            times.len()
        )));
    }
    let mut arrivals = Vec::with_capacity(nverts.len());
    let mut pos = 0;
    for (i, (&n, &t)) in nverts.iter().zip(&times).enumerate() {
        let s = Simplex::new(flat[pos..pos + n].iter().copied())
            .map_err(|_| Error::MalformedDataset(format!("simplex {i} has no vertices")))?;
        pos += n;
        arrivals.push((t, s));
    }
    Ok(ArrivalLog::new(arrivals))
}

pub fn load_dataset(
    nverts_path: impl AsRef<Path>,
    simplices_path: impl AsRef<Path>,
    times_path: impl AsRef<Path>,
) -> Result<ArrivalLog> {
    let open = |p: &Path| fs::File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())));
    parse_dataset(
        open(nverts_path.as_ref())?,
        open(simplices_path.as_ref())?,
        open(times_path.as_ref())?,
    )
}

/// Loads `<prefix>-nverts.txt`, `<prefix>-simplices.txt`, `<prefix>-times.txt`.
pub fn load_prefix(prefix: impl AsRef<Path>) -> Result<ArrivalLog> {
    let [a, b, c] = dataset_files(prefix.as_ref());
    load_dataset(a, b, c)
}

pub fn dataset_files(prefix: &Path) -> [PathBuf; 3] {
    let p = prefix.to_string_lossy();
    [
        PathBuf::from(format!("{p}-nverts.txt")),
        PathBuf::from(format!("{p}-simplices.txt")),
        PathBuf::from(format!("{p}-times.txt")),
    ]
}

/// Nested snapshots G_0 ⊆ G_1 ⊆ ... built from per-slice arrival lists.
///
/// Snapshots are rebuilt on demand from the arrivals; containment queries at
/// any slice go through a per-vertex arrival index instead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Filtration {
    slice_arrivals: Vec<Vec<Simplex>>,
    by_vertex: HashMap<VertexId, Vec<(usize, usize, usize)>>,
}

impl Filtration {
    pub fn from_slices(slices: Vec<Vec<Simplex>>) -> Self {
        let mut f = Filtration::default();
        for s in slices {
            f.push_slice(s);
        }
        f
    }

    pub fn push_slice(&mut self, arrivals: Vec<Simplex>) {
        let t = self.slice_arrivals.len();
        for (i, s) in arrivals.iter().enumerate() {
            for v in s.vertices() {
                self.by_vertex.entry(*v).or_default().push((t, i, s.len()));
            }
        }
        self.slice_arrivals.push(arrivals);
    }

    pub fn num_slices(&self) -> usize {
        self.slice_arrivals.len()
    }

    pub fn arrivals(&self, t: usize) -> &[Simplex] {
        &self.slice_arrivals[t]
    }

    pub fn slice_sizes(&self) -> Vec<usize> {
        self.slice_arrivals.iter().map(Vec::len).collect()
    }

    pub fn total_arrivals(&self) -> usize {
        self.slice_arrivals.iter().map(Vec::len).sum()
    }

    /// Cumulative snapshot after slice `t`.
    pub fn snapshot(&self, t: usize) -> ComplexSnapshot {
        let mut c = ComplexSnapshot::new();
        for slice in &self.slice_arrivals[..=t] {
            for s in slice {
                c.insert(s);
            }
        }
        c
    }

    /// Every cumulative snapshot, in order.
    pub fn snapshots(&self) -> Vec<ComplexSnapshot> {
        let mut c = ComplexSnapshot::new();
        let mut out = Vec::with_capacity(self.num_slices());
        for slice in &self.slice_arrivals {
            for s in slice {
                c.insert(s);
            }
            out.push(c.clone());
        }
        out
    }

    /// First slice whose snapshot contains `s`.
    pub fn birth_slice(&self, s: &Simplex) -> Option<usize> {
        let rare = s
            .vertices()
            .iter()
            .map(|v| self.by_vertex.get(v))
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .min_by_key(|l| l.len())?;
        rare.iter()
            .filter(|&&(_, _, len)| len >= s.len())
            .filter(|&&(t, i, _)| s.is_face_of(&self.slice_arrivals[t][i]))
            .map(|&(t, _, _)| t)
            .min()
    }

    pub fn contains_at(&self, t: usize, s: &Simplex) -> bool {
        self.birth_slice(s).is_some_and(|b| b <= t)
    }
}

/// Splits the log into `num_slices` contiguous groups of near-equal count;
/// the first `len % num_slices` groups take one extra arrival.
pub fn slice(log: &ArrivalLog, num_slices: usize) -> Result<Filtration> {
    if num_slices < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 slices, got {num_slices}"
        )));
    }
    if log.is_empty() || num_slices > log.len() {
        return Err(Error::TooManySlices {
            slices: num_slices,
            arrivals: log.len(),
        });
    }
    let base = log.len() / num_slices;
    let extra = log.len() % num_slices;
    let mut slices = Vec::with_capacity(num_slices);
    let mut it = log.arrivals.iter().map(|(_, s)| s.clone());
    for i in 0..num_slices {
        let n = base + usize::from(i < extra);
        slices.push(it.by_ref().take(n).collect());
    }
    Ok(Filtration::from_slices(slices))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn decodes_three_files() {
        let log = parse_dataset("2\n3\n".as_bytes(), "1\n2\n1\n2\n3\n".as_bytes(), "10\n20\n".as_bytes()).unwrap();
        assert_eq!(log.arrivals, vec![(10, s(&[1, 2])), (20, s(&[1, 2, 3]))]);
        let empty = parse_dataset("".as_bytes(), "".as_bytes(), "".as_bytes()).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn stable_sort_on_unsorted_times() {
        let log = parse_dataset("1 1 1".as_bytes(), "5 6 7".as_bytes(), "30 10 30".as_bytes()).unwrap();
        let order: Vec<u32> = log.arrivals.iter().map(|(_, s)| s.vertices()[0]).collect();
        assert_eq!(order, vec![6, 5, 7]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse_dataset("3".as_bytes(), "1 2".as_bytes(), "1".as_bytes()),
            Err(Error::MalformedDataset(_))
        ));
        assert!(matches!(
            parse_dataset("1".as_bytes(), "x".as_bytes(), "1".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_dataset("1 1".as_bytes(), "1 2".as_bytes(), "1".as_bytes()),
            Err(Error::MalformedDataset(_))
        ));
    }

    fn log_of(n: usize) -> ArrivalLog {
        ArrivalLog::new((0..n).map(|i| (i as i64, s(&[i as u32, i as u32 + 1]))).collect())
    }

    #[test]
    fn slicing_remainder_rule() {
        assert_eq!(slice(&log_of(10), 5).unwrap().slice_sizes(), vec![2; 5]);
        assert_eq!(slice(&log_of(11), 5).unwrap().slice_sizes(), vec![3, 2, 2, 2, 2]);
        assert!(matches!(slice(&log_of(3), 5), Err(Error::TooManySlices { .. })));
        assert!(slice(&log_of(3), 1).is_err());
    }

    #[test]
    fn birth_slice_and_containment() {
        let f = Filtration::from_slices(vec![
            vec![s(&[1, 2])],
            vec![s(&[2, 3]), s(&[1, 2])],
            vec![s(&[1, 2, 3])],
        ]);
        assert_eq!(f.birth_slice(&s(&[1, 2])), Some(0));
        assert_eq!(f.birth_slice(&s(&[1, 3])), Some(2));
        assert_eq!(f.birth_slice(&s(&[4])), None);
        assert!(!f.contains_at(1, &s(&[1, 2, 3])));
        assert!(f.contains_at(2, &s(&[1, 2, 3])));
        let snaps = f.snapshots();
        assert_eq!(snaps[1], f.snapshot(1));
        assert_eq!(snaps[2].maximal(), vec![s(&[1, 2, 3])]);
    }

    #[test]
    fn normalized_round_trip() {
        let log = parse_dataset("2 3 1".as_bytes(), "4 3 1 2 3 9".as_bytes(), "5 1 5".as_bytes()).unwrap();
        let text = log.to_normalized();
        assert_eq!(text, "1 1 2 3\n5 3 4\n5 9\n");
        assert_eq!(ArrivalLog::from_normalized(&text).unwrap(), log);
    }
}
