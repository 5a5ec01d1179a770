//! Brute-force oracles that materialize every face explicitly and share no
//! code with the library's complex, tracker or index.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::Rng;
use simplex_forecast::{Filtration, Simplex};

pub type Faces = BTreeSet<Vec<u32>>;

pub fn subsets(vs: &[u32]) -> Vec<Vec<u32>> {
    let n = vs.len();
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| vs[i]).collect())
        .collect()
}

/// Every face of every arrival in slices `0..=t`.
pub fn closure(slices: &[Vec<Vec<u32>>], t: usize) -> Faces {
    let mut out = Faces::new();
    for slice in &slices[..=t] {
        for a in slice {
            out.extend(subsets(a));
        }
    }
    out
}

pub fn ball(faces: &Faces, sigma: &[u32], k: usize) -> BTreeSet<u32> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for f in faces.iter().filter(|f| f.len() == 2) {
        adj.entry(f[0]).or_default().push(f[1]);
        adj.entry(f[1]).or_default().push(f[0]);
    }
    let mut seen: BTreeSet<u32> = sigma.iter().copied().collect();
    let mut queue: VecDeque<(u32, usize)> = sigma.iter().map(|&v| (v, 0)).collect();
    while let Some((v, dist)) = queue.pop_front() {
        if dist == k {
            continue;
        }
        for &w in adj.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                queue.push_back((w, dist + 1));
            }
        }
    }
    seen
}

/// Co-occurrence weight of each pair after slices `0..=t`.
pub fn weights(slices: &[Vec<Vec<u32>>], t: usize) -> HashMap<(u32, u32), u64> {
    let mut w = HashMap::new();
    for slice in &slices[..=t] {
        for a in slice {
            let dim = (a.len() - 1) as u64;
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    *w.entry((a[i], a[j])).or_insert(0) += dim;
                }
            }
        }
    }
    w
}

pub fn feature(
    faces: &Faces,
    w: &HashMap<(u32, u32), u64>,
    sigma: &[u32],
    v: u32,
    k: usize,
    max_dim: usize,
) -> Vec<u64> {
    let b = ball(faces, sigma, k);
    let mut f = vec![0u64; max_dim + 1];
    f[0] = 1;
    for face in faces.iter().filter(|x| x.iter().all(|u| b.contains(u))) {
        if face.len() <= max_dim {
            f[face.len()] += 1;
        }
    }
    let h = sigma
        .iter()
        .map(|&u| w.get(&(u.min(v), u.max(v))).copied().unwrap_or(0))
        .sum();
    f.push(h);
    f
}

/// `(σ, ṽ, F, positive)` for every pair of the snapshot at `origin`,
/// labelled by arrivals at `origin + 1`.
pub fn population(
    slices: &[Vec<Vec<u32>>],
    origin: usize,
    d: usize,
    k: usize,
    max_dim: usize,
) -> Vec<(Vec<u32>, u32, Vec<u64>, bool)> {
    let now = closure(slices, origin);
    let next = closure(slices, origin + 1);
    let w = weights(slices, origin);
    let mut out = Vec::new();
    for sigma in now.iter().filter(|f| f.len() == d + 1) {
        for v in ball(&now, sigma, k) {
            if sigma.contains(&v) {
                continue;
            }
            let mut tau = sigma.clone();
            tau.push(v);
            tau.sort_unstable();
            let positive = next.contains(&tau) && !now.contains(&tau);
            out.push((sigma.clone(), v, feature(&now, &w, sigma, v, k, max_dim), positive));
        }
    }
    out
}

/// Possible and realized counts per feature over origins `[last - window, last]`.
pub fn index(
    slices: &[Vec<Vec<u32>>],
    last: usize,
    window: usize,
    d: usize,
    k: usize,
    max_dim: usize,
) -> BTreeMap<Vec<u64>, (u64, u64)> {
    let mut cube = BTreeMap::new();
    for t in last - window..=last {
        for (_, _, f, positive) in population(slices, t, d, k, max_dim) {
            let e = cube.entry(f).or_insert((0, 0));
            e.0 += 1;
            e.1 += u64::from(positive);
        }
    }
    cube
}

/// Random arrivals over at most `n` vertices, each of 1 to `max_size` vertices.
pub fn random_slices<R: Rng>(rng: &mut R, n: u32, slices: usize, max_size: usize) -> Vec<Vec<Vec<u32>>> {
    (0..slices)
        .map(|_| {
            (0..rng.gen_range(1..=5))
                .map(|_| {
                    let size = rng.gen_range(1..=max_size);
                    let mut a: Vec<u32> = (0..size).map(|_| rng.gen_range(0..n)).collect();
                    a.sort_unstable();
                    a.dedup();
                    a
                })
                .collect()
        })
        .collect()
}

pub fn to_filtration(slices: &[Vec<Vec<u32>>]) -> Filtration {
    Filtration::from_slices(
        slices
            .iter()
            .map(|s| s.iter().map(|a| Simplex::new(a.iter().copied()).unwrap()).collect())
            .collect(),
    )
}
