use std::collections::BTreeSet;

use adfam::sets::{self, FinSet, Horizon, TreeCode};
use adfam::Error;
use proptest::prelude::*;

const H: usize = 150;

fn horizon() -> Horizon {
    Horizon::new(H).unwrap()
}

fn fin(xs: &BTreeSet<usize>) -> FinSet {
    FinSet::from_elems(horizon(), xs.iter().copied()).unwrap()
}

fn elems() -> impl Strategy<Value = BTreeSet<usize>> {
    prop::collection::btree_set(0..H, 0..40)
}

fn set_of(s: &FinSet) -> BTreeSet<usize> {
    s.iter().collect()
}

proptest! {
    #[test]
    fn algebra_matches_btreeset(a in elems(), b in elems()) {
        let (fa, fb) = (fin(&a), fin(&b));
        prop_assert_eq!(set_of(&(&fa | &fb)), &a | &b);
        prop_assert_eq!(set_of(&(&fa & &fb)), &a & &b);
        prop_assert_eq!(set_of(&(&fa - &fb)), &a - &b);
        prop_assert_eq!(fa.is_subset(&fb), a.is_subset(&b));
        prop_assert_eq!(fa.intersects(&fb), !a.is_disjoint(&b));
        prop_assert_eq!(fa.len(), a.len());
        prop_assert_eq!(fa.min_elem(), a.first().copied());
        prop_assert_eq!(fa.max_elem(), a.last().copied());
    }

    #[test]
    fn below_and_above_split(a in elems(), m in 0..=H) {
        let fa = fin(&a);
        let (lo, hi) = (fa.below(m), fa.above(m));
        prop_assert!(lo.iter().all(|x| x < m));
        prop_assert!(hi.iter().all(|x| x >= m));
        prop_assert_eq!(&(&lo | &hi), &fa);
        prop_assert!(lo.is_disjoint(&hi));
    }

    #[test]
    fn join_matches_formula(a in elems(), b in elems(), c in elems(), d in elems()) {
        let got = sets::join(&fin(&a), &fin(&b), &fin(&c), &fin(&d)).unwrap();
        let left: BTreeSet<usize> = &(&a - &b) & &(&d - &c);
        let right: BTreeSet<usize> = &(&b - &a) & &(&c - &d);
        prop_assert_eq!(set_of(&got), &left | &right);
    }

    #[test]
    fn delta_system_is_verified(family in prop::collection::vec(prop::collection::btree_set(0..24usize, 0..6), 2..14)) {
        let sets: Vec<FinSet> = family
            .iter()
            .map(|s| FinSet::from_elems(Horizon::new(24).unwrap(), s.iter().copied()).unwrap())
            .collect();
        if let Some(d) = sets::delta_system(&sets, 2).unwrap() {
            prop_assert!(d.verify(&sets));
            for (k, &i) in d.petals.iter().enumerate() {
                for &j in &d.petals[k + 1..] {
                    let common: BTreeSet<usize> = &family[i] & &family[j];
                    prop_assert_eq!(&common, &set_of(&d.root));
                }
            }
        }
    }

    #[test]
    fn tree_code_round_trips(depth in 1usize..=20, raw in any::<usize>()) {
        let code = TreeCode::new(depth).unwrap();
        let n = raw % code.size();
        let t = code.string(n).unwrap();
        prop_assert!(t.len() < depth);
        prop_assert_eq!(code.index(&t).unwrap(), n);
    }
}

#[test]
fn horizon_mismatch_is_reported() {
    let a = FinSet::empty(Horizon::new(8).unwrap());
    let b = FinSet::empty(Horizon::new(9).unwrap());
    assert!(matches!(a.try_union(&b), Err(Error::HorizonMismatch { left: 8, right: 9 })));
    assert!(matches!(
        FinSet::from_elems(Horizon::new(8).unwrap(), [8]),
        Err(Error::OutOfRange { element: 8, horizon: 8 })
    ));
}

#[test]
fn sunflower_of_pairs_through_a_point() {
    let h = Horizon::new(16).unwrap();
    let sets: Vec<FinSet> = (1..7).map(|k| FinSet::from_elems(h, [0, k]).unwrap()).collect();
    let d = sets::delta_system(&sets, 6).unwrap().expect("six petals share the root {0}");
    assert_eq!(d.root.to_vec(), vec![0]);
    assert_eq!(d.petals.len(), 6);
}

#[test]
fn tree_code_orders_by_length_then_value() {
    let code = TreeCode::new(4).unwrap();
    let order: Vec<String> = (0..code.size()).map(|n| code.string(n).unwrap()).collect();
    assert_eq!(order[..7], ["", "0", "1", "00", "01", "10", "11"]);
    assert!(code.index("0101").is_err());
    assert!(code.index("2").is_err());
}
