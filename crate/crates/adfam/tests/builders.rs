use std::collections::{BTreeMap, BTreeSet};

use adfam::builders::{self, ApproxCondition, Arity, Sides};
use adfam::families::{self, Metadata};
use adfam::order;
use adfam::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain copy of a condition: `(n, arity, index ↦ sides)`.
#[derive(Clone, Debug)]
struct Plain {
    n: usize,
    k: usize,
    sides: BTreeMap<usize, Vec<BTreeSet<usize>>>,
}

fn plain(p: &ApproxCondition) -> Plain {
    Plain {
        n: p.n(),
        k: p.arity().get(),
        sides: p.indices().map(|xi| (xi, p.sides(xi).unwrap().clone())).collect(),
    }
}

fn crosses(k: usize, i: usize, j: usize) -> bool {
    if k == 3 {
        i != j
    } else {
        (i == 3) != (j == 3)
    }
}

/// Clauses (2)–(4), written out directly.
fn valid(p: &Plain) -> bool {
    let below = p.sides.values().flatten().flatten().all(|&x| x < p.n);
    let disjoint = p.sides.values().all(|s| {
        (0..p.k).all(|i| (i + 1..p.k).all(|j| s[i].intersection(&s[j]).next().is_none()))
    });
    let idx: Vec<&usize> = p.sides.keys().collect();
    let cross = idx.iter().enumerate().all(|(t, xi)| {
        idx[t + 1..].iter().all(|eta| {
            let (s, u) = (&p.sides[xi], &p.sides[eta]);
            (0..p.k).any(|i| (0..p.k).any(|j| crosses(p.k, i, j) && s[i].intersection(&u[j]).next().is_some()))
        })
    });
    below && disjoint && cross
}

/// Clauses (5)–(7): `r ≤ p`.
fn extends(r: &Plain, p: &Plain) -> bool {
    let union = |c: &Plain, xi: usize| -> BTreeSet<usize> { c.sides[&xi].iter().flatten().copied().collect() };
    r.n >= p.n
        && p.sides.keys().all(|xi| r.sides.contains_key(xi))
        && p.sides.iter().all(|(xi, ps)| {
            (0..p.k).all(|i| r.sides[xi][i].iter().filter(|&&x| x < p.n).copied().collect::<BTreeSet<_>>() == ps[i])
        })
        && p.sides.keys().all(|&xi| {
            p.sides.keys().filter(|&&eta| eta != xi).all(|&eta| union(r, xi).intersection(&union(r, eta)).all(|&x| x < p.n))
        })
}

fn restrict(g: &ApproxCondition, keep: &BTreeSet<usize>) -> ApproxCondition {
    let sides: BTreeMap<usize, Sides> = keep.iter().map(|&xi| (xi, g.sides(xi).unwrap().clone())).collect();
    ApproxCondition::new(g.n(), g.arity(), sides).unwrap()
}

fn sides(lists: &[&[usize]]) -> Sides {
    lists.iter().map(|l| l.iter().copied().collect()).collect()
}

#[test]
fn amalgamating_two_singletons() {
    let p = ApproxCondition::new(1, Arity::Three, [(0, sides(&[&[0], &[], &[]]))].into()).unwrap();
    let q = ApproxCondition::new(1, Arity::Three, [(1, sides(&[&[], &[0], &[]]))].into()).unwrap();
    let r = builders::amalgamate_3luzin(&p, &q).unwrap();
    assert_eq!(r.n(), 2);
    assert_eq!(r.sides(0).unwrap(), &sides(&[&[0, 1], &[], &[]]));
    assert_eq!(r.sides(1).unwrap(), &sides(&[&[], &[0, 1], &[]]));
    assert!(r.extends(&p) && r.extends(&q));
}

#[test]
fn amalgamating_two_by_two_in_four_sides() {
    let g = builders::grow_condition(Arity::Four, 4, 7).unwrap();
    let p = restrict(&g, &[0, 1].into());
    let q = restrict(&g, &[2, 3].into());
    let r = builders::amalgamate_4family(&p, &q).unwrap();
    assert_eq!(r.n(), g.n() + 4);
    // Fresh points in lexicographic order of (ξ, η): (0,2), (0,3), (1,2), (1,3).
    let n = g.n();
    for (t, (xi, eta)) in [(0, 2), (0, 3), (1, 2), (1, 3)].into_iter().enumerate() {
        assert!(r.side(xi, 0).unwrap().contains(&(n + t)));
        assert!(r.side(eta, 3).unwrap().contains(&(n + t)));
    }
    assert!(valid(&plain(&r)));
}

#[test]
fn nested_conditions_amalgamate_to_the_larger() {
    let g = builders::grow_condition(Arity::Three, 5, 1).unwrap();
    let small = restrict(&g, &[1, 3].into());
    assert_eq!(builders::amalgamate_3luzin(&g, &small).unwrap(), g);
    assert_eq!(builders::amalgamate_3luzin(&small, &g).unwrap(), g);
}

#[test]
fn amalgamation_preconditions() {
    let p = ApproxCondition::singleton(2, Arity::Three, 0);
    let q = ApproxCondition::singleton(3, Arity::Three, 1);
    assert!(matches!(builders::amalgamate_3luzin(&p, &q), Err(Error::Precondition(_))));
    let four = ApproxCondition::singleton(2, Arity::Four, 1);
    assert!(matches!(builders::amalgamate_3luzin(&p, &four), Err(Error::Precondition(_))));
    let a = ApproxCondition::new(2, Arity::Three, [(0, sides(&[&[0], &[], &[]]))].into()).unwrap();
    let b = ApproxCondition::new(2, Arity::Three, [(0, sides(&[&[1], &[], &[]]))].into()).unwrap();
    assert!(builders::amalgamate_3luzin(&a, &b).is_err());
}

#[test]
fn invalid_conditions_name_their_clause() {
    let out_of_range = ApproxCondition::new(1, Arity::Three, [(0, sides(&[&[1], &[], &[]]))].into());
    assert!(matches!(out_of_range, Err(Error::Precondition(m)) if m.contains("(2)")));
    let overlapping = ApproxCondition::new(2, Arity::Three, [(0, sides(&[&[0], &[0], &[]]))].into());
    assert!(matches!(overlapping, Err(Error::Precondition(m)) if m.contains("(3)")));
    let apart = ApproxCondition::new(
        2,
        Arity::Four,
        [(0, sides(&[&[0], &[], &[], &[]])), (1, sides(&[&[1], &[], &[], &[]]))].into(),
    );
    assert!(matches!(apart, Err(Error::Precondition(m)) if m.contains("(4)")));
    assert!(Arity::try_from(5).is_err());
}

#[test]
fn randomized_amalgamations_satisfy_every_clause() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..500 {
        let arity = if round % 2 == 0 { Arity::Three } else { Arity::Four };
        let steps = rng.gen_range(1..9);
        let g = builders::grow_condition(arity, steps, rng.gen()).unwrap();
        let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<usize> { (0..steps).filter(|_| rng.gen_bool(0.5)).collect() };
        let (p, q) = (restrict(&g, &pick(&mut rng)), restrict(&g, &pick(&mut rng)));
        let r = match arity {
            Arity::Three => builders::amalgamate_3luzin(&p, &q),
            Arity::Four => builders::amalgamate_4family(&p, &q),
        }
        .unwrap();
        let (pp, pq, pr) = (plain(&p), plain(&q), plain(&r));
        let only_p = pp.sides.keys().filter(|xi| !pq.sides.contains_key(xi)).count();
        let only_q = pq.sides.keys().filter(|xi| !pp.sides.contains_key(xi)).count();
        assert!(valid(&pr), "round {round}: amalgam invalid");
        assert!(extends(&pr, &pp) && extends(&pr, &pq), "round {round}: not a common extension");
        assert_eq!(r.extends(&p), extends(&pr, &pp));
        assert_eq!(pr.n, g.n() + only_p * only_q, "round {round}: wrong number of fresh points");
        assert_eq!(pr.sides.len(), pp.sides.keys().chain(pq.sides.keys()).collect::<BTreeSet<_>>().len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grown_conditions_are_valid(steps in 0usize..20, seed in any::<u64>(), four in any::<bool>()) {
        let arity = if four { Arity::Four } else { Arity::Three };
        let g = builders::grow_condition(arity, steps, seed).unwrap();
        prop_assert!(valid(&plain(&g)));
        prop_assert_eq!(g.n(), steps * steps.saturating_sub(1) / 2);
        prop_assert_eq!(g.len(), steps);
        prop_assert_eq!(builders::grown_horizon(arity, steps), g.n() + arity.get() * steps);
    }

    #[test]
    fn grown_three_families_carry_a_gap_at_zero(steps in 1usize..14, seed in any::<u64>()) {
        let f = builders::grow_family(Arity::Three, steps, seed).unwrap();
        prop_assert_eq!(f.len(), 3 * steps);
        let columns = builders::grown_columns(Arity::Three, steps);
        let verdict = families::check_n_luzin_gap(&f, &columns, 0).unwrap();
        prop_assert!(verdict.is_gap(), "{:?}", verdict);
    }

    #[test]
    fn grown_four_families_give_antichains(steps in 2usize..12, seed in any::<u64>()) {
        let f = builders::grow_family(Arity::Four, steps, seed).unwrap();
        let rho: Vec<_> = (0..steps)
            .map(|xi| order::generator_condition(&f, [4 * xi, 4 * xi + 1, 4 * xi + 2].into(), [4 * xi + 3].into(), 0).unwrap())
            .collect();
        for i in 0..steps {
            for j in i + 1..steps {
                prop_assert!(!order::compatible(&rho[i], &rho[j]).unwrap());
            }
        }
    }
}

#[test]
fn two_steps_of_three_sides() {
    let f = builders::grow_family(Arity::Three, 2, 0).unwrap();
    assert_eq!(f.len(), 6);
    let columns = builders::grown_columns(Arity::Three, 2);
    assert_eq!(columns, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
    assert!(families::check_n_luzin_gap(&f, &columns, 0).unwrap().is_gap());
    assert_eq!(f.metadata(), &Metadata::Grown { arity: 3, steps: 2, seed: 0 });
}

#[test]
fn one_step_has_only_private_points() {
    let f = builders::grow_family(Arity::Four, 1, 9).unwrap();
    assert_eq!(f.len(), 4);
    assert_eq!(f.horizon().get(), 4);
    assert!(f.members().iter().all(|m| m.len() == 1));
    assert_eq!(f.intersection_ceiling(), 0);
}

#[test]
fn oversized_growth_is_refused() {
    assert!(matches!(builders::grow_family(Arity::Four, 10_000, 0), Err(Error::Capacity(_))));
    assert!(builders::grow_condition(Arity::Three, builders::MAX_STEPS + 1, 0).is_err());
}
