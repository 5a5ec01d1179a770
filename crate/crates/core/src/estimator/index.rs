use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::FeatureVector;
use crate::ingestion::Filtration;
use crate::tracker::{FeatureConfig, FeatureTracker};

/// Possible / realized pair counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub possible: u64,
    pub realized: u64,
}

impl Counts {
    fn add(&mut self, other: Counts) {
        self.possible += other.possible;
        self.realized += other.realized;
    }
}

/// Counts gathered at one slice `t`, labelled by arrivals at `t + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SliceTable {
    pub slice: usize,
    pub cube: HashMap<FeatureVector, Counts>,
}

/// Aggregated counts over the window `[last - p, last]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureIndex {
    cube: HashMap<FeatureVector, Counts>,
    pub last_slice: usize,
    pub window: usize,
    pub dims: FeatureConfig,
    totals: Counts,
}

impl FeatureIndex {
    pub fn from_tables<'a, I>(tables: I, last_slice: usize, window: usize, dims: FeatureConfig) -> Self
    where
        I: IntoIterator<Item = &'a SliceTable>,
    {
        let mut cube: HashMap<FeatureVector, Counts> = HashMap::new();
        for t in tables {
            for (f, c) in &t.cube {
                cube.entry(f.clone()).or_default().add(*c);
            }
        }
        Self::from_cube(cube, last_slice, window, dims)
    }

    pub fn from_cube(
        cube: HashMap<FeatureVector, Counts>,
        last_slice: usize,
        window: usize,
        dims: FeatureConfig,
    ) -> Self {
        let mut totals = Counts::default();
        for c in cube.values() {
            totals.add(*c);
        }
        FeatureIndex {
            cube,
            last_slice,
            window,
            dims,
            totals,
        }
    }

    pub fn get(&self, f: &FeatureVector) -> Counts {
        self.cube.get(f).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureVector, &Counts)> {
        self.cube.iter()
    }

    pub fn len(&self) -> usize {
        self.cube.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cube.is_empty()
    }

    pub fn totals(&self) -> Counts {
        self.totals
    }

    /// `realized_total / possible_total`, 0 for an empty index.
    pub fn base_rate(&self) -> f64 {
        if self.totals.possible == 0 {
            0.0
        } else {
            self.totals.realized as f64 / self.totals.possible as f64
        }
    }

    /// Header line followed by `features TAB possible TAB realized`, sorted by feature.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# T={} p={} d={} k={} D={}\n",
            self.last_slice, self.window, self.dims.d, self.dims.k, self.dims.max_dim
        );
        let mut keys: Vec<&FeatureVector> = self.cube.keys().collect();
        keys.sort();
        for f in keys {
            let c = self.cube[f];
            writeln!(out, "{f}\t{}\t{}", c.possible, c.realized).unwrap();
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty index dump".into()))?;
        let mut fields: HashMap<&str, usize> = HashMap::new();
        for tok in header.trim_start_matches('#').split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {tok:?}")))?;
            let v = v
                .parse()
                .map_err(|e| Error::Parse(format!("header field {tok:?}: {e}")))?;
            fields.insert(k, v);
        }
        let field = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("header is missing {k}")))
        };
        let dims = FeatureConfig {
            d: field("d")?,
            k: field("k")?,
            max_dim: field("D")?,
        };
        let mut cube = HashMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad index record {line:?}")));
            }
            let f: FeatureVector = parts[0].parse()?;
            let num = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("count {s:?}: {e}")))
            };
            let c = Counts {
                possible: num(parts[1])?,
                realized: num(parts[2])?,
            };
            if c.possible == 0 || c.realized > c.possible {
                return Err(Error::Parse(format!("inconsistent counts in {line:?}")));
            }
            cube.insert(f, c);
        }
        Ok(Self::from_cube(cube, field("T")?, field("p")?, dims))
    }
}

fn check_window(f: &Filtration, last: usize, window: usize) -> Result<()> {
    if window > last {
        return Err(Error::InvalidConfig(format!(
            "window {window} reaches before slice 0 (last slice {last})"
        )));
    }
    if last + 1 >= f.num_slices() {
        return Err(Error::LabelSliceMissing(last + 1));
    }
    Ok(())
}

/// Per-slice tables for `t' ∈ [last - window, last]`.
pub fn build_slice_tables(f: &Filtration, last: usize, window: usize, dims: FeatureConfig) -> Result<Vec<SliceTable>> {
    check_window(f, last, window)?;
    let first = last - window;
    let mut tracker = FeatureTracker::new(dims);
    let mut tables = Vec::with_capacity(window + 1);
    for t in 0..=last {
        tracker.apply_slice(f.arrivals(t), t >= first);
        if t < first {
            continue;
        }
        let mut cube: HashMap<FeatureVector, Counts> = tracker
            .histogram()
            .iter()
            .map(|(k, &n)| {
                (
                    k.clone(),
                    Counts {
                        possible: n,
                        realized: 0,
                    },
                )
            })
            .collect();
        for (_, _, fv) in tracker.realized(f.arrivals(t + 1)) {
            cube.get_mut(&fv).expect("realized pair is a possible pair").realized += 1;
        }
        tables.push(SliceTable { slice: t, cube });
    }
    Ok(tables)
}

/// Feature index over `t' ∈ [last - window, last]`, labelled by slice `t' + 1`.
pub fn build_index(f: &Filtration, last: usize, window: usize, dims: FeatureConfig) -> Result<FeatureIndex> {
    check_window(f, last, window)?;
    let first = last - window;
    let mut tracker = FeatureTracker::new(dims);
    let mut cube: HashMap<FeatureVector, Counts> = HashMap::new();
    for t in 0..=last {
        tracker.apply_slice(f.arrivals(t), t >= first);
        if t < first {
            continue;
        }
        for (k, &n) in tracker.histogram() {
            cube.entry(k.clone()).or_default().possible += n;
        }
        for (_, _, fv) in tracker.realized(f.arrivals(t + 1)) {
            cube.get_mut(&fv).expect("realized pair is a possible pair").realized += 1;
        }
    }
    Ok(FeatureIndex::from_cube(cube, last, window, dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::Simplex;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn no_arrivals_means_no_realized() {
        let f = Filtration::from_slices(vec![vec![s(&[1, 2]), s(&[2, 3])], vec![s(&[3, 4])], vec![s(&[4, 5])]]);
        let idx = build_index(&f, 1, 1, FeatureConfig::new(1, 1)).unwrap();
        assert!(!idx.is_empty());
        assert!(idx.iter().all(|(_, c)| c.realized == 0 && c.possible >= 1));
    }

    #[test]
    fn closing_triangle_is_positive() {
        let f = Filtration::from_slices(vec![vec![s(&[1, 2]), s(&[2, 3]), s(&[1, 3])], vec![s(&[1, 2, 3])]]);
        let idx = build_index(&f, 0, 0, FeatureConfig::new(1, 1)).unwrap();
        // three (σ, ṽ) representations of the new triangle, all with the same feature
        assert_eq!(
            idx.totals(),
            Counts {
                possible: 3,
                realized: 3
            }
        );
    }

    #[test]
    fn window_errors() {
        let f = Filtration::from_slices(vec![vec![s(&[1, 2])], vec![s(&[2, 3])]]);
        assert_eq!(
            build_index(&f, 1, 0, FeatureConfig::new(1, 1)),
            Err(Error::LabelSliceMissing(2))
        );
        assert!(matches!(
            build_index(&f, 0, 1, FeatureConfig::new(1, 1)),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn tables_sum_to_index_and_dump_round_trips() {
        let f = Filtration::from_slices(vec![
            vec![s(&[1, 2]), s(&[2, 3])],
            vec![s(&[1, 2, 3]), s(&[3, 4])],
            vec![s(&[2, 3, 4]), s(&[4, 5])],
            vec![s(&[3, 4, 5])],
        ]);
        let dims = FeatureConfig::new(1, 1);
        let idx = build_index(&f, 2, 2, dims).unwrap();
        let tables = build_slice_tables(&f, 2, 2, dims).unwrap();
        assert_eq!(tables.len(), 3);
        assert_eq!(FeatureIndex::from_tables(&tables, 2, 2, dims), idx);
        let back = FeatureIndex::load(&idx.dump()).unwrap();
        assert_eq!(back, idx);
        assert!(idx.dump().starts_with("# T=2 p=2 d=1 k=1 D=3\n"));
    }
}
