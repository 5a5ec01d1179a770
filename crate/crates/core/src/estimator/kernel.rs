use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::index::FeatureIndex;
use crate::feature::{l1_distance, l1_unchecked, FeatureVector};

/// Bandwidth `beta` and L1 radius `delta` of the discrete kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub beta: f64,
    pub delta: u64,
}

impl KernelParams {
    pub fn new(beta: f64, delta: u64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        Ok(KernelParams { beta, delta })
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { beta: 1.0, delta: 1 }
    }
}

/// Number of non-negative integer vectors within L1 distance `delta` of `f`.
pub fn lattice_ball_size(f: &FeatureVector, delta: u64) -> u128 {
    let delta = delta as usize;
    // ways[r] = number of partial vectors using exactly r units of distance
    let mut ways = vec![0u128; delta + 1];
    ways[0] = 1;
    for &x in f.values() {
        let mut next = vec![0u128; delta + 1];
        for (used, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            next[used] += w;
            for r in 1..=(delta - used) {
                let moves = if x >= r as u64 { 2 } else { 1 };
                next[used + r] = next[used + r].saturating_add(w.saturating_mul(moves));
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// `(1[F = F'] + beta * 1[|F - F'|_1 <= delta]) / (1 + beta * |ball(F, delta)|)`.
pub fn kernel(f: &FeatureVector, g: &FeatureVector, params: KernelParams) -> Result<f64> {
    let dist = l1_distance(f, g)?;
    let num = f64::from(u8::from(dist == 0)) + if dist <= params.delta { params.beta } else { 0.0 };
    let norm = 1.0 + params.beta * lattice_ball_size(f, params.delta) as f64;
    Ok(num / norm)
}

/// Kernel-smoothed arrival probability at `f`, computed from aggregated counts.
///
/// The kernel's normalizing constant depends only on the query and cancels
/// between numerator and denominator, leaving
/// `(r(F) + beta * Σ r(s)) / (p(F) + beta * Σ p(s))` over stored `s` within
/// `delta` of `F`.
pub fn estimate(index: &FeatureIndex, f: &FeatureVector, params: KernelParams) -> Result<f64> {
    if let Some((k, _)) = index.iter().next() {
        if k.len() != f.len() {
            return Err(Error::DimensionMismatch(f.len(), k.len()));
        }
    }
    let (mut num, mut den) = (0.0f64, 0.0f64);
    let exact = index.get(f);
    num += exact.realized as f64;
    den += exact.possible as f64;
    if params.beta > 0.0 {
        let (mut r, mut p) = (0u64, 0u64);
        for (key, c) in index.iter() {
            if l1_unchecked(key.values(), f.values()) <= params.delta {
                r += c.realized;
                p += c.possible;
            }
        }
        num += params.beta * r as f64;
        den += params.beta * p as f64;
    }
    if den <= 0.0 {
        return Err(Error::InsufficientData {
            fallback: index.base_rate(),
        });
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// What to do when the kernel support at a query is empty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FallbackPolicy {
    #[default]
    BaseRate,
    Error,
}

pub fn estimate_or_fallback(
    index: &FeatureIndex,
    f: &FeatureVector,
    params: KernelParams,
    policy: FallbackPolicy,
) -> Result<f64> {
    match (estimate(index, f, params), policy) {
        (Err(Error::InsufficientData { fallback }), FallbackPolicy::BaseRate) => Ok(fallback),
        (r, _) => r,
    }
}
