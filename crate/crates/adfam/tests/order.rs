mod common;

use adfam::families::{self, Family};
use adfam::order::{self, Condition, Labels};
use adfam::sampling::{self, ConditionShape};
use adfam::sets::Horizon;
use adfam::Error;
use common::sides_of;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn luzin() -> Family {
    families::build_luzin(10, 3).unwrap()
}

fn embeddable() -> Family {
    families::build_r_embeddable(12, Horizon::new(100).unwrap(), 6, 5).unwrap()
}

fn draw(family: &Family, seed: u64, count: usize) -> Vec<Condition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| sampling::random_condition(family, &mut rng, &ConditionShape::default()))
        .collect()
}

fn labels(xs: &[usize]) -> Labels {
    xs.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compatibility_matches_oracle(seed in any::<u64>()) {
        for family in [luzin(), embeddable()] {
            let members = common::member_lists(&family);
            let h = family.horizon().get();
            let cs = draw(&family, seed, 12);
            for p in &cs {
                for q in &cs {
                    let want = common::compatible(&sides_of(&members, h, p), &sides_of(&members, h, q));
                    prop_assert_eq!(order::compatible(p, q).unwrap(), want);
                    prop_assert_eq!(order::compatible(q, p).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn meet_is_a_common_extension(seed in any::<u64>()) {
        let family = luzin();
        let cs = draw(&family, seed, 10);
        for p in &cs {
            for q in &cs {
                match order::meet(&family, p, q) {
                    Ok(r) => {
                        prop_assert!(order::extends(&r, p) && order::extends(&r, q));
                        prop_assert!(order::is_centered(&[p, q]));
                    }
                    Err(Error::Incompatible) => prop_assert!(!order::compatible(p, q).unwrap()),
                    Err(e) => prop_assert!(false, "unexpected error {}", e),
                }
            }
        }
    }

    #[test]
    fn raising_the_bound_keeps_both_sides(seed in any::<u64>(), extra in 0usize..20) {
        let family = embeddable();
        for p in draw(&family, seed, 8) {
            let r = order::raise_bound(&family, &p, p.m() + extra).unwrap();
            prop_assert_eq!(r.a_set(), p.a_set());
            prop_assert_eq!(r.b_set(), p.b_set());
            prop_assert!(order::extends(&r, &p) && order::extends(&p, &r));
        }
    }

    #[test]
    fn centered_classes_are_pairwise_compatible(seed in any::<u64>()) {
        let family = embeddable();
        let members = common::member_lists(&family);
        let h = family.horizon().get();
        let cs = draw(&family, seed, 60);
        let coloring = order::centered_decomposition(&family, &cs).unwrap();
        prop_assert!(coloring.verified);
        for class in coloring.classes() {
            let sides: Vec<_> = class.iter().map(|&i| sides_of(&members, h, &cs[i])).collect();
            prop_assert!(common::centered(&sides.iter().collect::<Vec<_>>()));
        }
        for (c, p) in coloring.dictionary.iter().enumerate() {
            prop_assert!(p.is_disjoint(), "class {} has overlapping intervals", c);
        }
    }

    #[test]
    fn thinning_preserves_the_compatibility_pattern(seed in any::<u64>()) {
        let family = luzin();
        let cs = draw(&family, seed, 24);
        let t = match order::thin_normalize(&family, &cs) {
            Ok(t) => t,
            Err(Error::Construction(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(order::batch_bullets_hold(&family, &t.batch));
        prop_assert_eq!(t.gamma.len(), t.batch.conditions.len());
        for (x, &i) in t.gamma.iter().enumerate() {
            for (y, &j) in t.gamma.iter().enumerate() {
                prop_assert_eq!(
                    order::compatible(&cs[i], &cs[j]).unwrap(),
                    order::compatible(&t.batch.conditions[x], &t.batch.conditions[y]).unwrap()
                );
            }
        }
    }

    #[test]
    fn luzin_classes_are_antichains(seed in any::<u64>(), count in 2usize..40) {
        let family = families::build_luzin(48, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = family.intersection_ceiling();
        let cs = sampling::essentially_distinct(&family, count, m, 2, &mut rng).unwrap();
        let coloring = order::luzin_antichain_decomposition(&family, &cs).unwrap();
        prop_assert!(coloring.verified);
        prop_assert!(order::classes_are(&cs, &coloring.colors, false));
    }
}

#[test]
fn validity_errors_name_the_problem() {
    let family = luzin();
    let h = family.horizon();
    let empty = adfam::sets::FinSet::empty(h);
    assert!(matches!(
        order::make_condition(&family, labels(&[0]), labels(&[0]), 0, empty.clone(), empty.clone()),
        Err(Error::LabelOverlap { index: 0 })
    ));
    // Members 0 and 3 share a point, so at m = 0 the sides overlap.
    let shared = family.ad_bound(0, 3);
    assert!(shared > 0);
    assert!(matches!(
        order::generator_condition(&family, labels(&[0]), labels(&[3]), 0),
        Err(Error::Overlap { .. })
    ));
    assert!(order::generator_condition(&family, labels(&[0]), labels(&[3]), shared).is_ok());
    assert!(order::generator_condition(&family, labels(&[99]), labels(&[]), 0).is_err());
}

#[test]
fn conditions_from_different_families_do_not_mix() {
    let (f, g) = (luzin(), families::build_luzin(11, 3).unwrap());
    let p = order::empty_condition(&f);
    let q = order::empty_condition(&g);
    assert!(matches!(order::compatible(&p, &q), Err(Error::CrossFamily)));
}

#[test]
fn steprans_generators_are_pairwise_incompatible() {
    let seeds = families::random_seeds(7, 20, 8).unwrap();
    let family = families::build_steprans(7, &seeds).unwrap();
    let cs: Vec<Condition> = (0..20)
        .map(|k| order::generator_condition(&family, labels(&[2 * k]), labels(&[2 * k + 1]), 0).unwrap())
        .collect();
    let matrix = order::compatibility_matrix(&cs).unwrap();
    for (i, row) in matrix.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            assert_eq!(c, i == j, "({i}, {j})");
        }
    }
}

#[test]
fn antichain_decomposition_needs_shared_corrections() {
    let family = families::build_luzin(12, 3).unwrap();
    let m = family.intersection_ceiling();
    let p = order::generator_condition(&family, labels(&[0]), labels(&[1]), m).unwrap();
    let q = order::generator_condition(&family, labels(&[2]), labels(&[3]), m - 1).unwrap();
    assert!(matches!(
        order::luzin_antichain_decomposition(&family, &[p.clone(), q]),
        Err(Error::Precondition(_))
    ));
    let r = order::generator_condition(&family, labels(&[0]), labels(&[4]), m).unwrap();
    assert!(matches!(
        order::luzin_antichain_decomposition(&family, &[p.clone(), r]),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        order::centered_decomposition(&family, &[p]),
        Err(Error::MissingMetadata { .. })
    ));
}

#[test]
fn thinning_keeps_an_already_normal_batch() {
    let seeds = families::random_seeds(6, 12, 2).unwrap();
    let family = families::build_steprans(6, &seeds).unwrap();
    let cs: Vec<Condition> = (0..12)
        .map(|k| order::generator_condition(&family, labels(&[2 * k]), labels(&[2 * k + 1]), 0).unwrap())
        .collect();
    let t = order::thin_normalize(&family, &cs).unwrap();
    assert_eq!(t.gamma, (0..12).collect::<Vec<_>>());
    assert_eq!(t.batch.route, order::ThinRoute::DeltaRoots);
    assert_eq!((t.batch.k, t.batch.l, t.batch.m), (1, 1, 0));
    assert!(order::batch_bullets_hold(&family, &t.batch));
}

#[test]
fn identical_conditions_thin_to_the_empty_condition() {
    let family = luzin();
    let p = order::generator_condition(&family, labels(&[1]), labels(&[2]), family.ad_bound(1, 2)).unwrap();
    let t = order::thin_normalize(&family, &vec![p; 5]).unwrap();
    assert_eq!(t.gamma.len(), 5);
    assert_eq!(t.batch.route, order::ThinRoute::ConstantSide);
    assert!(t.batch.conditions.iter().all(Condition::is_empty));
}
