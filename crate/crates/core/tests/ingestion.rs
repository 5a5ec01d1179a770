use std::fs;

use proptest::prelude::*;
use simplex_forecast::{load_prefix, slice, ArrivalLog, Simplex};

fn log_strategy() -> impl Strategy<Value = ArrivalLog> {
    prop::collection::vec((0i64..50, prop::collection::btree_set(0u32..20, 1..5)), 1..60)
        .prop_map(|v| ArrivalLog::new(v.into_iter().map(|(t, s)| (t, Simplex::new(s).unwrap())).collect()))
}

proptest! {
    #[test]
    fn slicing_preserves_every_arrival_in_order(log in log_strategy(), t in 2usize..10) {
        prop_assume!(t <= log.len());
        let f = slice(&log, t).unwrap();
        prop_assert_eq!(f.num_slices(), t);
        let sizes = f.slice_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let flat: Vec<Simplex> = (0..t).flat_map(|i| f.arrivals(i).to_vec()).collect();
        let want: Vec<Simplex> = log.arrivals.iter().map(|(_, s)| s.clone()).collect();
        prop_assert_eq!(flat, want);
    }

    #[test]
    fn snapshots_only_grow(log in log_strategy(), t in 2usize..6) {
        prop_assume!(t <= log.len());
        let f = slice(&log, t).unwrap();
        let snaps = f.snapshots();
        for w in snaps.windows(2) {
            for s in w[0].maximal() {
                prop_assert!(w[1].contains(&s));
            }
        }
        for i in 0..t {
            for s in f.arrivals(i) {
                prop_assert!(f.birth_slice(s).unwrap() <= i);
                prop_assert!(f.contains_at(i, s));
            }
        }
    }

    #[test]
    fn three_file_round_trip(log in log_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let (nverts, simplices, times) = log.to_three_files();
        let prefix = dir.path().join("toy");
        for (suffix, body) in [("nverts", nverts), ("simplices", simplices), ("times", times)] {
            fs::write(dir.path().join(format!("toy-{suffix}.txt")), body).unwrap();
        }
        prop_assert_eq!(load_prefix(&prefix).unwrap(), log.clone());
        prop_assert_eq!(ArrivalLog::from_normalized(&log.to_normalized()).unwrap(), log);
    }
}

#[test]
fn too_many_slices_is_an_error() {
    let log = ArrivalLog::new(vec![(0, Simplex::new([1, 2]).unwrap())]);
    assert!(slice(&log, 2).is_err());
    assert!(slice(&log, 1).is_err());
}

#[test]
fn missing_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_prefix(dir.path().join("absent")).is_err());
}
