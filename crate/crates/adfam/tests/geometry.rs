mod common;

use adfam::families::{self, Family};
use adfam::geometry::{self, f_of, Norm, Pairing, SphereVector, Tail};
use adfam::numeric::{self, CertifiedReal, Precision, Q};
use adfam::order;
use adfam::sampling::{self, ConditionShape};
use adfam::sets::Horizon;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = Q> {
    (-1000i64..=1000, 1i64..=97).prop_map(|(n, d)| numeric::q(n, d))
}

fn vector(h: usize) -> impl Strategy<Value = SphereVector> {
    (
        prop::collection::vec((-16i64..=16).prop_map(|n| numeric::q(n, 16)), h),
        prop::option::of((0usize..4, (-16i64..=16).prop_map(|n| numeric::q(n, 16)))),
    )
        .prop_map(|(coords, tail)| SphereVector::new(coords, tail.map_or(Tail::Zero, |t| Tail::from_terms([t]))))
}

fn embeddable() -> Family {
    families::build_r_embeddable(10, Horizon::new(80).unwrap(), 6, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_bounds_enclose(x in rational().prop_map(|x| x.abs()), bits in 1u32..80) {
        let (lo, hi) = numeric::sqrt_bounds(&x, bits);
        prop_assert!(&lo * &lo <= x && x <= &hi * &hi);
        prop_assert!(&hi - &lo <= numeric::pow2_neg(bits) * numeric::qi(2));
    }

    #[test]
    fn interval_arithmetic_contains_the_exact_result(
        x in rational(), y in rational(), wx in 0i64..5, wy in 0i64..5
    ) {
        let ix = CertifiedReal::new(&x - numeric::q(wx, 7), &x + numeric::q(wx, 7));
        let iy = CertifiedReal::new(&y - numeric::q(wy, 5), &y + numeric::q(wy, 5));
        prop_assert!(ix.add(&iy).contains(&(&x + &y)));
        prop_assert!(ix.sub(&iy).contains(&(&x - &y)));
        prop_assert!(ix.mul(&iy).contains(&(&x * &y)));
        prop_assert!(ix.square().contains(&(&x * &x)));
        prop_assert!(ix.abs().contains(&x.abs()));
        prop_assert!(ix.max(&iy).contains(&x.clone().max(y.clone())));
        let root = ix.abs().sqrt(30);
        prop_assert!(root.lo() * root.lo() <= x.abs() && x.abs() <= root.hi() * root.hi());
    }

    #[test]
    fn sup_distance_is_a_metric(u in vector(12), v in vector(12), w in vector(12)) {
        let d = |a: &SphereVector, b: &SphereVector| geometry::dist_inf(a, b).unwrap();
        prop_assert_eq!(d(&u, &v), d(&v, &u));
        prop_assert!(d(&u, &u).is_zero());
        prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w));
    }

    #[test]
    fn renormed_norm_is_certified(v in vector(20), bits in 8u32..40) {
        let r = geometry::norm_inf2_bits(&v, bits);
        let sup = geometry::sup_norm(&v);
        let t = geometry::weighted_dot(v.coords(), v.coords());
        let (lo_t, hi_t) = (r.lo() - &sup, r.hi() - &sup);
        prop_assert!(!lo_t.is_positive() || &lo_t * &lo_t <= t);
        prop_assert!(&hi_t * &hi_t >= t);
    }

    #[test]
    fn normalization_reaches_the_unit_sphere(v in vector(16)) {
        prop_assume!(!v.is_zero());
        prop_assert_eq!(geometry::sup_norm(&v.normalize_sup()), numeric::qi(1));
        let n = geometry::norm_inf2_bits(&v.normalize_inf2(40).unwrap(), 40);
        prop_assert!(n.contains(&numeric::qi(1)) || (n.midpoint() - numeric::qi(1)).abs() < numeric::pow2_neg(30));
    }

    #[test]
    fn distances_of_condition_vectors_are_integers(seed in any::<u64>()) {
        let family = embeddable();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs: Vec<_> = (0..10).map(|_| sampling::random_condition(&family, &mut rng, &ConditionShape::default())).collect();
        for p in &cs {
            for q in &cs {
                let d = geometry::dist_inf(&f_of(p), &f_of(q)).unwrap();
                let compat = order::compatible(p, q).unwrap();
                prop_assert!(d == numeric::qi(2) || (compat && d <= numeric::qi(1)));
                prop_assert_eq!(compat, d <= numeric::qi(1));
            }
        }
    }

    #[test]
    fn spheres_inequality_holds(seed in any::<u64>(), norm_inf2 in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let norm = if norm_inf2 { Norm::Inf2 } else { Norm::Inf };
        let x = sampling::random_vector(12, &mut rng, 8);
        let y = sampling::random_vector(12, &mut rng, 8);
        prop_assume!(!x.is_zero() && !y.is_zero());
        let scale = |v: &SphereVector, k: i64| v.normalize_sup().scale(&numeric::q(k, 32));
        let (x, y) = if norm_inf2 { (scale(&x, 5), scale(&y, 9)) } else { (scale(&x, 11), scale(&y, 27)) };
        let check = geometry::spheres_check(&x, &y, norm, &Precision::bits(20)).unwrap();
        prop_assert!(check.holds, "{:?}", check);
    }

    #[test]
    fn two_conditions_contain_each_other(seed in any::<u64>()) {
        let family = embeddable();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = numeric::q(1, 4);
        let f = sampling::random_combination(&family, &mut rng, 3, 2, 4).unwrap();
        let g = sampling::random_combination(&family, &mut rng, 3, 2, 4).unwrap();
        prop_assert!(geometry::two_conditions_check(&family, &f, &eps).unwrap());
        prop_assert_ne!(geometry::function_distance_check(&family, &f, &g, &eps).unwrap(), Some(false));
    }

    #[test]
    fn tail_mass_is_small_past_the_window(seed in any::<u64>(), m in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = sampling::random_vector(32, &mut rng, 8).coords().to_vec();
        for x in coords.iter_mut().take(m + 1) {
            *x = Q::zero();
        }
        let v = SphereVector::new(coords, Tail::Zero);
        let (t, ok) = geometry::t_norm_small(&v, m, &Precision::bits(30)).unwrap();
        prop_assert!(ok);
        prop_assert!(t.lo() <= &geometry::sup_norm(&v));
    }
}

#[test]
fn rational_parsing() {
    let p = numeric::parse_rational;
    assert_eq!(p("1e-6").unwrap(), numeric::q(1, 1_000_000));
    assert_eq!(p("0.25").unwrap(), numeric::q(1, 4));
    assert_eq!(p(" 3/4 ").unwrap(), numeric::q(3, 4));
    assert_eq!(p("-2").unwrap(), numeric::qi(-2));
    assert_eq!(p("2.5E1").unwrap(), numeric::qi(25));
    assert!(p("1/0").is_err());
    assert!(p("abc").is_err());
    assert_eq!(numeric::decimal(&numeric::q(-1, 3), 2), "-0.34");
    assert_eq!(numeric::decimal(&numeric::q(1, 8), 3), "0.125");
}

#[test]
fn certified_comparisons_decide_or_abstain() {
    let x = CertifiedReal::new(numeric::q(1, 3), numeric::q(1, 2));
    assert!(x.ge(&numeric::q(1, 4)).is_true());
    assert!(!x.ge(&numeric::q(3, 4)).is_true());
    assert_eq!(x.ge(&numeric::q(2, 5)), numeric::Decision::Undecided);
    assert!(CertifiedReal::new(numeric::qi(-1), numeric::qi(1)).recip().is_err());
}

#[test]
fn symptom_bound_gives_three_halves() {
    let mut coords = vec![Q::zero(); 16];
    coords[10] = numeric::qi(1);
    let x = SphereVector::new(coords.clone(), Tail::Zero);
    coords[10] = numeric::qi(-1);
    let y = SphereVector::new(coords, Tail::Zero);
    let check = geometry::symptom_renorm_check(&x, &y, &numeric::q(2, 3), &Precision::bits(24)).unwrap();
    assert!(check.holds);
    assert!(check.lhs.lo() >= &numeric::q(3, 2));
    // A vector with a heavy head violates the T-norm premise.
    let mut heavy = vec![numeric::qi(1); 16];
    heavy[1] = numeric::qi(-1);
    let z = SphereVector::new(heavy, Tail::Zero);
    assert!(geometry::symptom_renorm_check(&z, &y, &numeric::q(2, 3), &Precision::bits(24)).is_err());
}

#[test]
fn renorm_bound_on_a_steprans_antichain() {
    let seeds = families::random_seeds(9, 8, 3).unwrap();
    let family = families::build_steprans(9, &seeds).unwrap();
    let m = 3;
    let p = order::generator_condition(&family, [0].into(), [1].into(), m + 1).unwrap();
    let q = order::generator_condition(&family, [1].into(), [0].into(), m + 1).unwrap();
    assert!(!order::compatible(&p, &q).unwrap());
    let precision = Precision::new(numeric::q(1, 1_000_000)).unwrap();
    let r = geometry::renorm_separation_check(&p, &q, m, &precision).unwrap();
    assert!(r.holds);
    assert_eq!(r.bound, numeric::q(3, 2));
    assert!(r.distance.width() <= numeric::q(1, 1_000_000));
    assert!(geometry::renorm_separation_check(&p, &p, m, &precision).is_err());
}

#[test]
fn pairings_are_validated() {
    assert!(Pairing::new(6, vec![0, 2], vec![1, 2]).is_err());
    assert!(Pairing::new(6, vec![0, 0], vec![1, 3]).is_err());
    assert!(Pairing::new(6, vec![0], vec![9]).is_err());
    let pairing = Pairing::consecutive(7);
    assert_eq!(pairing.len(), 3);
    assert_eq!(pairing.pair(2), (4, 5));

    let seeds = families::random_seeds(6, 4, 2).unwrap();
    let family = families::build_steprans(6, &seeds).unwrap();
    let vs = geometry::pairing_vectors(&family, &Pairing::consecutive(family.len()), None).unwrap();
    assert_eq!(vs.len(), 4);
    for (_, v) in &vs {
        assert_eq!(geometry::sup_norm(v), numeric::qi(1));
    }
    // Steprans pairs split every prefix, so they only agree up to the root.
    let agreeing = geometry::pairing_vectors(&family, &Pairing::consecutive(family.len()), Some(0)).unwrap();
    assert!(agreeing.is_empty());
}

#[test]
fn sphere_vectors_round_trip_through_json() {
    let v = SphereVector::new(
        vec![numeric::q(1, 3), numeric::qi(-1), Q::zero()],
        Tail::from_terms([(2, numeric::q(-5, 7))]),
    );
    assert_eq!(SphereVector::from_json(&v.to_json().unwrap()).unwrap(), v);
    assert!(SphereVector::from_json("{\"coords\": [1]}").is_err());
}
