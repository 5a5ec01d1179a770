use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplex_forecast::{confidence_interval, BootstrapOptions, Counts, FeatureVector, KernelParams, SliceTable};

fn tables(rng: &mut ChaCha8Rng, g: f64, slices: usize) -> Vec<SliceTable> {
    (0..slices)
        .map(|slice| {
            let possible = rng.gen_range(20..60);
            let realized = (0..possible).filter(|_| rng.gen_bool(g)).count() as u64;
            let mut cube = HashMap::default();
            cube.insert(FeatureVector(vec![1, 3, 2, 4]), Counts { possible, realized });
            SliceTable { slice, cube }
        })
        .collect()
}

#[test]
fn ninety_percent_interval_covers_the_truth() {
    let g = 0.3;
    let f = FeatureVector(vec![1, 3, 2, 4]);
    let params = KernelParams::new(1.0, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let runs = 200;
    let covered = (0..runs)
        .filter(|&i| {
            let t = tables(&mut rng, g, 20);
            let opts = BootstrapOptions {
                resamples: 400,
                seed: i,
                ..BootstrapOptions::default()
            };
            let (lo, hi) = confidence_interval(&t, &f, params, 0.9, opts).unwrap();
            lo <= g && g <= hi
        })
        .count();
    assert!(covered >= 160, "covered {covered}/{runs}");
}

#[test]
fn wider_level_gives_wider_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = tables(&mut rng, 0.5, 12);
    let f = FeatureVector(vec![1, 3, 2, 4]);
    let params = KernelParams::new(0.5, 1).unwrap();
    let opts = BootstrapOptions::default();
    let (a, b) = confidence_interval(&t, &f, params, 0.5, opts).unwrap();
    let (c, d) = confidence_interval(&t, &f, params, 0.95, opts).unwrap();
    assert!(c <= a && b <= d);
    let (p, q) = confidence_interval(&t, &f, params, 0.0, opts).unwrap();
    assert_eq!(p, q);
    assert!(a <= p && p <= b);
}
