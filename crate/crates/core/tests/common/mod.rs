#![allow(dead_code)]

use cantor_core::{BitString, EventuallyPeriodic, FinSupPermutation, OutputTable};
use proptest::prelude::*;

pub fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..=max_len).prop_map(BitString::from_bits)
}

pub fn nonempty_bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 1..=max_len).prop_map(BitString::from_bits)
}

pub fn real() -> impl Strategy<Value = EventuallyPeriodic> {
    (bits(8), nonempty_bits(4)).prop_map(|(h, p)| EventuallyPeriodic::new(h, p).unwrap())
}

/// A pair that differs only on a finite set of positions.
pub fn tail_equal_pair() -> impl Strategy<Value = (EventuallyPeriodic, EventuallyPeriodic)> {
    (real(), prop::collection::btree_set(0usize..12, 0..5)).prop_map(|(x, flips)| {
        let y = flips.iter().fold(x.clone(), |acc, &i| acc.with_bit(i, !acc.at(i)));
        (x, y)
    })
}

/// A permutation of `0..k`, fixing everything above.
pub fn perm_below(k: usize) -> impl Strategy<Value = FinSupPermutation> {
    Just((0..k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|images| FinSupPermutation::from_images(&images).unwrap())
}

/// A table reading at most `max_arity` positions below `bound`.
pub fn table(bound: usize, max_arity: usize) -> impl Strategy<Value = OutputTable> {
    prop::collection::btree_set(0..bound, 0..=max_arity).prop_flat_map(|uses| {
        let uses: Vec<usize> = uses.into_iter().collect();
        let rows = 1usize << uses.len();
        prop::collection::vec(any::<bool>(), rows).prop_map(move |t| OutputTable::new(uses.clone(), t).unwrap())
    })
}

/// `X` restricted to positions below `len`.
pub fn prefix_bits(x: &EventuallyPeriodic, len: usize) -> Vec<bool> {
    (0..len).map(|i| x.at(i)).collect()
}

/// Every permutation of `0..5`.
pub fn family() -> Vec<FinSupPermutation> {
    FinSupPermutation::all_with_support_below(5)
}
