//! Seeded random conditions and vectors.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::geometry::{combination_vector, SphereVector, Tail};
use crate::numeric::{self, Q};
use crate::order::{self, Condition, Labels};
use crate::sets::FinSet;

/// Shape of randomly drawn conditions.
#[derive(Clone, Debug)]
pub struct ConditionShape {
    /// Largest number of generators per side.
    pub max_labels: usize,
    /// Largest amount added to the smallest valid bound.
    pub extra_m: usize,
    /// Corrections are drawn below `min(m, correction_window)`.
    pub correction_window: usize,
}

impl Default for ConditionShape {
    fn default() -> Self {
        ConditionShape {
            max_labels: 2,
            extra_m: 4,
            correction_window: 8,
        }
    }
}

fn random_labels(rng: &mut impl Rng, n: usize, a_len: usize, b_len: usize) -> (Labels, Labels) {
    let picked = sample(rng, n, (a_len + b_len).min(n)).into_vec();
    let a = picked[..a_len.min(picked.len())].iter().copied().collect();
    let b = picked[a_len.min(picked.len())..].iter().copied().collect();
    (a, b)
}

/// A valid condition: the bound sits at or above every generator intersection.
pub fn random_condition(family: &Family, rng: &mut impl Rng, shape: &ConditionShape) -> Condition {
    let n = family.len();
    let h = family.horizon();
    let a_len = rng.gen_range(0..=shape.max_labels.min(n));
    let b_len = rng.gen_range(0..=shape.max_labels.min(n - a_len));
    let (a, b) = random_labels(rng, n, a_len, b_len);
    let gens: Vec<usize> = a.iter().chain(&b).copied().collect();
    let m = (family.bound_among(&gens) + rng.gen_range(0..=shape.extra_m)).min(h.get());
    let window = m.min(shape.correction_window);
    let (mut e, mut f) = (FinSet::empty(h), FinSet::empty(h));
    for x in 0..window {
        match rng.gen_range(0..3) {
            1 => {
                e.insert(x);
            }
            2 => {
                f.insert(x);
            }
            _ => {}
        }
    }
    order::make_condition(family, a, b, m, e, f).expect("bound covers every generator intersection")
}

/// `count` conditions with nonempty sides, pairwise distinct `a`'s and
/// pairwise distinct `b`'s, all with `(m, ∅, ∅)`.
pub fn essentially_distinct(
    family: &Family,
    count: usize,
    m: usize,
    max_labels: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Condition>> {
    let n = family.len();
    if n < 2 || max_labels == 0 {
        return Err(Error::InvalidArgument("need two members and one label per side".into()));
    }
    let mut seen_a: BTreeSet<Labels> = BTreeSet::new();
    let mut seen_b: BTreeSet<Labels> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::Construction(format!(
                "found only {} of {count} essentially distinct conditions",
                out.len()
            )));
        }
        let k = max_labels.min(n / 2);
        let a_len = rng.gen_range(1..=k);
        let b_len = rng.gen_range(1..=k);
        let (a, b) = random_labels(rng, n, a_len, b_len);
        if seen_a.contains(&a) || seen_b.contains(&b) {
            continue;
        }
        let gens: Vec<usize> = a.iter().chain(&b).copied().collect();
        if family.bound_among(&gens) > m {
            continue;
        }
        let p = order::generator_condition(family, a.clone(), b.clone(), m)?;
        seen_a.insert(a);
        seen_b.insert(b);
        out.push(p);
    }
    Ok(out)
}

/// A condition whose sides avoid `{0, …, m}`: generators only, bound above `m`.
pub fn q_m_condition(family: &Family, m: usize, max_labels: usize, rng: &mut impl Rng) -> Result<Condition> {
    let n = family.len();
    for _ in 0..10_000 {
        let a_len = rng.gen_range(1..=max_labels.min(n - 1).max(1));
        let b_len = rng.gen_range(0..=max_labels.min(n - a_len));
        let (a, b) = random_labels(rng, n, a_len, b_len);
        let gens: Vec<usize> = a.iter().chain(&b).copied().collect();
        let bound = family.bound_among(&gens).max(m + 1).min(family.horizon().get());
        let p = order::generator_condition(family, a, b, bound)?;
        if !p.a_set().is_empty() {
            return Ok(p);
        }
    }
    Err(Error::Construction(format!("no nonempty condition avoids {{0, …, {m}}}")))
}

/// Random rational in `[-1, 1]` with denominator at most `den`.
pub fn random_unit_rational(rng: &mut impl Rng, den: i64) -> Q {
    let d = rng.gen_range(1..=den);
    numeric::q(rng.gen_range(-d..=d), d)
}

/// `Σ r_j 1_{A_j} + finite part`, scaled into the unit ball of the sup norm.
pub fn random_combination(
    family: &Family,
    rng: &mut impl Rng,
    terms: usize,
    finite: usize,
    den: i64,
) -> Result<SphereVector> {
    let n = family.len();
    let members = sample(rng, n, terms.min(n)).into_vec();
    let coefs: Vec<(usize, Q)> = members
        .into_iter()
        .map(|j| (j, random_unit_rational(rng, den)))
        .collect();
    let window = family.horizon().get().min(16);
    let extra: Vec<(usize, Q)> = (0..finite)
        .map(|_| (rng.gen_range(0..window), random_unit_rational(rng, den)))
        .collect();
    let v = combination_vector(family, &coefs, &extra)?;
    let s = crate::geometry::sup_norm(&v);
    Ok(if s > numeric::qi(1) { v.scale(&s.recip()) } else { v })
}

/// Random vector on `[0, h)` with zero tail and entries in `[-1, 1]`.
pub fn random_vector(h: usize, rng: &mut impl Rng, den: i64) -> SphereVector {
    SphereVector::new((0..h).map(|_| random_unit_rational(rng, den)).collect(), Tail::Zero)
}
