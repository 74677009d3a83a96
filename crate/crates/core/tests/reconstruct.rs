mod common;

use cantor_core::reconstruct::{conjugate_shift, reconstruct_tables, verify_conjugacy, ConjugateDirection};
use cantor_core::tt::tt_compose;
use cantor_core::{HomeoPair, OutputTable, TruthTableFunctional, Window};
use common::{perm_below, real};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tables_round_trip(theta in perm_below(8)) {
        let pair = HomeoPair::from_permutation(&theta, Window::new(16).unwrap()).unwrap();
        let phi = conjugate_shift(&pair, 16, ConjugateDirection::InverseShiftForward).unwrap();
        prop_assert!(verify_conjugacy(&pair, &phi, Window::new(8).unwrap()).unwrap());
        let table0 = pair.forward().table(0).unwrap().into_owned();
        let tables = reconstruct_tables(&phi, table0, 8).unwrap();
        for (n, t) in tables.iter().enumerate() {
            let expected = pair.forward().table(n).unwrap();
            prop_assert_eq!(t, expected.as_ref());
        }
    }

    #[test]
    fn conjugate_acts_like_the_composite(theta in perm_below(8), x in real()) {
        let pair = HomeoPair::from_permutation(&theta, Window::new(16).unwrap()).unwrap();
        let phi = conjugate_shift(&pair, 8, ConjugateDirection::ForwardShiftInverse).unwrap();
        // Θ(S★(Θ⁻¹(X))) computed one stage at a time
        let inner = pair.backward();
        let shifted = |p: usize| inner.apply(&x, p + 1).unwrap();
        for n in 0..8 {
            let expected = pair.forward().apply_with(n, shifted).unwrap();
            prop_assert_eq!(phi.apply(&x, n).unwrap(), expected);
        }
    }
}

#[test]
fn pair_and_reconstruction_is_an_implication_of_conjunctions() {
    let phi = TruthTableFunctional::pair_and();
    let table0 = OutputTable::new(vec![2, 3], vec![true, false, true, true]).unwrap();
    let tables = reconstruct_tables(&phi, table0, 4).unwrap();
    for (n, t) in tables.iter().enumerate().skip(1) {
        let width = 1 << n;
        let lo = 2 * width;
        assert_eq!(t.uses(), &(lo..lo + 2 * width).collect::<Vec<_>>()[..]);
        let expected = OutputTable::from_fn(t.uses().to_vec(), |bits| {
            let (left, right) = bits.split_at(width);
            !left.iter().all(|&b| b) || right.iter().all(|&b| b)
        })
        .unwrap();
        assert_eq!(t, &expected);
    }
    // the recursion agrees with composing the pair-and functional directly
    let twice = tt_compose(&TruthTableFunctional::from_tables(vec![tables[1].clone()]), &phi, 1).unwrap();
    assert_eq!(twice.table(0).unwrap().as_ref(), &tables[2]);
}
