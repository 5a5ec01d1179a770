//! Small hand-built complexes used by tests, the CLI smoke paths and the web demo.

use crate::complex::ComplexSnapshot;
use crate::simplex::Simplex;

fn build(list: &[&[u32]]) -> ComplexSnapshot {
    ComplexSnapshot::from_simplices(
        list.iter()
            .map(|v| Simplex::new(v.iter().copied()).expect("non-empty fixture simplex")),
    )
}

const PREVIOUS: &[&[u32]] = &[
    &[6, 9, 10],
    &[9, 10, 13],
    &[5, 9],
    &[8, 9],
    &[10, 11],
    &[10, 14],
    &[10, 15],
    &[1, 5],
    &[2, 8],
    &[3, 7],
    &[3, 4, 14],
    &[11, 12],
    &[12, 15, 16],
    &[13, 16],
];

/// The worked-example graph around edge `[9,10]`: vertex balls
/// `{9,13,8,5,6,10}` and `{10,14,13,9,6,7,11,15}`, with two 2-simplices
/// inside the ball of `[9,10]` and more structure outside it.
pub fn worked_example() -> ComplexSnapshot {
    let mut c = worked_example_previous();
    c.insert(&Simplex::new([7, 10]).expect("edge"));
    c
}

/// The same graph one slice earlier, before edge `[7,10]` arrived.
pub fn worked_example_previous() -> ComplexSnapshot {
    build(PREVIOUS)
}
