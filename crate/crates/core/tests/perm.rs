mod common;

use cantor_core::perm::{conjugate_successor, induced_map, recover_inverse};
use cantor_core::FinSupPermutation;
use common::{perm_below, real};
use proptest::prelude::*;

proptest! {
    #[test]
    fn recursion_recovers_the_inverse(theta in perm_below(8), m in 1usize..=16) {
        let k = conjugate_successor(&theta, m);
        let brute: Vec<usize> = (0..m).map(|j| (0..).find(|&i| theta.apply(i) == j).unwrap()).collect();
        let result = recover_inverse(&k, theta.apply_inverse(0), m);
        if brute.iter().all(|&v| v < m) {
            prop_assert_eq!(result.unwrap(), brute);
        } else {
            let is_out_of_window = matches!(result, Err(cantor_core::perm::PermError::OutOfWindow { .. }));
            prop_assert!(is_out_of_window);
        }
    }

    #[test]
    fn conjugate_successor_is_injective(theta in perm_below(8)) {
        let mut k = conjugate_successor(&theta, 24);
        k.sort_unstable();
        k.dedup();
        prop_assert_eq!(k.len(), 24);
    }

    #[test]
    fn inverse_and_compose(theta in perm_below(8), phi in perm_below(6)) {
        prop_assert!(theta.compose(&theta.inverse()).is_identity());
        let both = theta.compose(&phi);
        for n in 0..12 {
            prop_assert_eq!(both.apply(n), theta.apply(phi.apply(n)));
            prop_assert_eq!(both.apply_inverse(n), phi.apply_inverse(theta.apply_inverse(n)));
        }
    }

    #[test]
    fn induced_maps_invert(theta in perm_below(8), x in real()) {
        let back = induced_map(&theta.inverse(), &induced_map(&theta, &x));
        prop_assert_eq!(&back, &x);
        let image = induced_map(&theta, &x);
        for n in 0..24 {
            prop_assert_eq!(image.at(n), x.at(theta.apply(n)));
        }
    }

    #[test]
    fn json_round_trips(theta in perm_below(8)) {
        let text = serde_json::to_string(&theta.to_json()).unwrap();
        let back = FinSupPermutation::try_from(serde_json::from_str::<cantor_core::perm::PermutationJson>(&text).unwrap()).unwrap();
        prop_assert_eq!(back, theta);
    }
}

#[test]
fn whole_family_recovers() {
    for theta in common::family() {
        let k = conjugate_successor(&theta, 10);
        assert_eq!(recover_inverse(&k, theta.apply_inverse(0), 10).unwrap(), theta.inverse_table(10));
    }
}
