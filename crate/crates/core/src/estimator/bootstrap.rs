//! Moving-block bootstrap over time slices for interval estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator::index::SliceTable;
use crate::estimator::kernel::KernelParams;
use crate::feature::{l1_unchecked, FeatureVector};

pub const MIN_SLICES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapOptions {
    pub resamples: usize,
    /// Consecutive slices per block.
    pub block_len: usize,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            resamples: 500,
            block_len: 1,
            seed: 0,
        }
    }
}

/// Per-slice sums needed to evaluate the estimator at one query.
#[derive(Clone, Copy, Default)]
struct Summary {
    exact_r: f64,
    exact_p: f64,
    ball_r: f64,
    ball_p: f64,
    all_r: f64,
    all_p: f64,
}

impl Summary {
    fn of(table: &SliceTable, f: &FeatureVector, delta: u64) -> Self {
        let mut s = Summary::default();
        for (k, c) in &table.cube {
            let (r, p) = (c.realized as f64, c.possible as f64);
            s.all_r += r;
            s.all_p += p;
            let dist = l1_unchecked(k.values(), f.values());
            if dist == 0 {
                s.exact_r += r;
                s.exact_p += p;
            }
            if dist <= delta {
                s.ball_r += r;
                s.ball_p += p;
            }
        }
        s
    }

    fn add(&mut self, o: &Summary) {
        self.exact_r += o.exact_r;
        self.exact_p += o.exact_p;
        self.ball_r += o.ball_r;
        self.ball_p += o.ball_p;
        self.all_r += o.all_r;
        self.all_p += o.all_p;
    }

    fn estimate(&self, beta: f64) -> f64 {
        let den = self.exact_p + beta * self.ball_p;
        if den > 0.0 {
            ((self.exact_r + beta * self.ball_r) / den).clamp(0.0, 1.0)
        } else if self.all_p > 0.0 {
            self.all_r / self.all_p
        } else {
            0.0
        }
    }
}

/// Percentile interval at `level` for the estimate at `f`, resampling whole
/// slices in blocks. The interval always contains the full-sample estimate.
pub fn confidence_interval(
    tables: &[SliceTable],
    f: &FeatureVector,
    params: KernelParams,
    level: f64,
    opts: BootstrapOptions,
) -> Result<(f64, f64)> {
    if tables.len() < MIN_SLICES {
        return Err(Error::InsufficientSlices {
            needed: MIN_SLICES,
            got: tables.len(),
        });
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidConfig(format!("level must be in [0, 1), got {level}")));
    }
    let summaries: Vec<Summary> = tables.iter().map(|t| Summary::of(t, f, params.delta)).collect();
    let mut full = Summary::default();
    summaries.iter().for_each(|s| full.add(s));
    let point = full.estimate(params.beta);
    if level == 0.0 || opts.resamples == 0 {
        return Ok((point, point));
    }
    let n = summaries.len();
    let block = opts.block_len.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats: Vec<f64> = (0..opts.resamples)
        .map(|_| {
            let mut acc = Summary::default();
            let mut taken = 0;
            while taken < n {
                let start = rng.gen_range(0..=n - block);
                for s in &summaries[start..start + block.min(n - taken)] {
                    acc.add(s);
                }
                taken += block;
            }
            acc.estimate(params.beta)
        })
        .collect();
    stats.sort_by(|a, b| a.total_cmp(b));
    let alpha = (1.0 - level) / 2.0;
    let lo = quantile(&stats, alpha);
    let hi = quantile(&stats, 1.0 - alpha);
    Ok((lo.min(point), hi.max(point)))
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::index::Counts;

    fn table(slice: usize, entries: &[(&[u64], u64, u64)]) -> SliceTable {
        SliceTable {
            slice,
            cube: entries
                .iter()
                .map(|(f, p, r)| {
                    (
                        FeatureVector(f.to_vec()),
                        Counts {
                            possible: *p,
                            realized: *r,
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn degenerate_index_gives_unit_interval() {
        let tables: Vec<SliceTable> = (0..6).map(|t| table(t, &[(&[1, 2], 3, 3)])).collect();
        let f = FeatureVector(vec![1, 2]);
        let ci = confidence_interval(&tables, &f, KernelParams::default(), 0.9, BootstrapOptions::default()).unwrap();
        assert_eq!(ci, (1.0, 1.0));
    }

    #[test]
    fn zero_level_is_point_interval_and_contains_estimate() {
        let tables: Vec<SliceTable> = (0..8).map(|t| table(t, &[(&[1, 2], 4, (t % 3) as u64)])).collect();
        let f = FeatureVector(vec![1, 2]);
        let p = KernelParams::new(0.0, 1).unwrap();
        let (a, b) = confidence_interval(&tables, &f, p, 0.0, BootstrapOptions::default()).unwrap();
        assert_eq!(a, b);
        let (lo, hi) = confidence_interval(&tables, &f, p, 0.9, BootstrapOptions::default()).unwrap();
        assert!(lo <= a && a <= hi && lo < hi);
    }

    #[test]
    fn too_few_slices() {
        let tables: Vec<SliceTable> = (0..4).map(|t| table(t, &[(&[1], 1, 0)])).collect();
        assert_eq!(
            confidence_interval(
                &tables,
                &FeatureVector(vec![1]),
                KernelParams::default(),
                0.9,
                BootstrapOptions::default()
            ),
            Err(Error::InsufficientSlices { needed: 5, got: 4 })
        );
    }
}
