//! Finite amalgamation of approximation conditions, and families grown by
//! repeated amalgamation.
//!
//! A condition is `(n, a, (A^0(ξ), …, A^{k-1}(ξ) : ξ ∈ a))` with every side a
//! subset of `[0, n)`. Two conditions with the same `n` that agree on their
//! common indices amalgamate by adding one fresh point `k_{ξ,η}` for each
//! `ξ` only in the first and `η` only in the second.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, Metadata, BIT_BUDGET};
use crate::sets::{FinSet, Horizon};

/// Number of sides per index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Arity {
    /// Any two distinct indices meet in two distinct sides.
    Three,
    /// Any two distinct indices meet between a side below 3 and side 3.
    Four,
}

impl Arity {
    pub fn get(self) -> usize {
        match self {
            Arity::Three => 3,
            Arity::Four => 4,
        }
    }

    /// Whether a point in side `i` of one index and side `j` of another
    /// realizes the cross clause.
    pub fn crossing(self, i: usize, j: usize) -> bool {
        match self {
            Arity::Three => i != j && i < 3 && j < 3,
            Arity::Four => (i < 3 && j == 3) || (i == 3 && j < 3),
        }
    }

    /// Sides receiving the fresh point `k_{ξ,η}`: `ξ` from the first condition, `η` from the second.
    pub fn fresh_sides(self) -> (usize, usize) {
        match self {
            Arity::Three => (0, 1),
            Arity::Four => (0, 3),
        }
    }

    fn crossings(self) -> Vec<(usize, usize)> {
        let k = self.get();
        (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.crossing(i, j))
            .collect()
    }
}

impl TryFrom<usize> for Arity {
    type Error = Error;

    fn try_from(k: usize) -> Result<Self> {
        match k {
            3 => Ok(Arity::Three),
            4 => Ok(Arity::Four),
            _ => Err(Error::InvalidArgument(format!("arity {k} is not 3 or 4"))),
        }
    }
}

impl From<Arity> for usize {
    fn from(a: Arity) -> usize {
        a.get()
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

pub type Sides = Vec<BTreeSet<usize>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxCondition {
    n: usize,
    arity: Arity,
    sides: BTreeMap<usize, Sides>,
}

impl ApproxCondition {
    /// Validates clauses (2)–(4).
    pub fn new(n: usize, arity: Arity, sides: BTreeMap<usize, Sides>) -> Result<Self> {
        let p = ApproxCondition { n, arity, sides };
        p.validate()?;
        Ok(p)
    }

    /// `(n, ∅)`.
    pub fn empty(n: usize, arity: Arity) -> Self {
        ApproxCondition {
            n,
            arity,
            sides: BTreeMap::new(),
        }
    }

    /// `(n, {ξ})` with every side of `ξ` empty.
    pub fn singleton(n: usize, arity: Arity, xi: usize) -> Self {
        let mut sides = BTreeMap::new();
        sides.insert(xi, vec![BTreeSet::new(); arity.get()]);
        ApproxCondition { n, arity, sides }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.sides.keys().copied()
    }

    pub fn contains(&self, xi: usize) -> bool {
        self.sides.contains_key(&xi)
    }

    pub fn sides(&self, xi: usize) -> Option<&Sides> {
        self.sides.get(&xi)
    }

    pub fn side(&self, xi: usize, i: usize) -> Option<&BTreeSet<usize>> {
        self.sides.get(&xi).and_then(|s| s.get(i))
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    fn union_at(&self, xi: usize) -> BTreeSet<usize> {
        self.sides[&xi].iter().flatten().copied().collect()
    }

    /// Checks clauses (2)–(4), naming the first failure.
    pub fn validate(&self) -> Result<()> {
        let k = self.arity.get();
        for (&xi, s) in &self.sides {
            if s.len() != k {
                return Err(Error::Precondition(format!("index {xi} has {} sides, expected {k}", s.len())));
            }
            if let Some(x) = s.iter().flatten().find(|&&x| x >= self.n) {
                return Err(Error::Precondition(format!("clause (2): {x} in a side of {xi} is not below {}", self.n)));
            }
            for i in 0..k {
                for j in i + 1..k {
                    if !s[i].is_disjoint(&s[j]) {
                        return Err(Error::Precondition(format!("clause (3): sides {i} and {j} of {xi} meet")));
                    }
                }
            }
        }
        let crossings = self.arity.crossings();
        let idx: Vec<usize> = self.indices().collect();
        for (t, &xi) in idx.iter().enumerate() {
            for &eta in &idx[t + 1..] {
                let (s, u) = (&self.sides[&xi], &self.sides[&eta]);
                if !crossings.iter().any(|&(i, j)| !s[i].is_disjoint(&u[j])) {
                    return Err(Error::Precondition(format!("clause (4): indices {xi} and {eta} never cross")));
                }
            }
        }
        Ok(())
    }

    /// `self ≤ q`: clauses (5)–(7).
    pub fn extends(&self, q: &ApproxCondition) -> bool {
        if self.arity != q.arity || self.n < q.n || !q.indices().all(|xi| self.contains(xi)) {
            return false;
        }
        let restricts = q.sides.iter().all(|(xi, qs)| {
            self.sides[xi]
                .iter()
                .zip(qs)
                .all(|(ps, qs)| ps.iter().filter(|&&x| x < q.n).eq(qs.iter()))
        });
        if !restricts {
            return false;
        }
        let idx: Vec<usize> = q.indices().collect();
        idx.iter().enumerate().all(|(t, &xi)| {
            let ux = self.union_at(xi);
            idx[t + 1..]
                .iter()
                .all(|&eta| ux.intersection(&self.union_at(eta)).all(|&x| x < q.n))
        })
    }
}

fn check_amalgamable(p: &ApproxCondition, q: &ApproxCondition, arity: Arity) -> Result<()> {
    if p.arity != arity || q.arity != arity {
        return Err(Error::Precondition(format!("both conditions must have arity {arity}")));
    }
    if p.n != q.n {
        return Err(Error::Precondition(format!("heights differ: {} vs {}", p.n, q.n)));
    }
    p.validate()?;
    q.validate()?;
    for (xi, s) in &p.sides {
        if q.sides.get(xi).is_some_and(|t| t != s) {
            return Err(Error::Precondition(format!("conditions disagree at common index {xi}")));
        }
    }
    Ok(())
}

/// Common extension with the fresh point `k_{ξ,η}` placed in side
/// `place(ξ, η).0` of `ξ ∈ a_p∖a_q` and side `.1` of `η ∈ a_q∖a_p`.
/// Fresh points are `n, n+1, …` in lexicographic order of `(ξ, η)`.
fn amalgamate_with(
    p: &ApproxCondition,
    q: &ApproxCondition,
    mut place: impl FnMut(usize, usize) -> (usize, usize),
) -> ApproxCondition {
    let only_p: Vec<usize> = p.indices().filter(|xi| !q.contains(*xi)).collect();
    let only_q: Vec<usize> = q.indices().filter(|xi| !p.contains(*xi)).collect();
    if only_q.is_empty() {
        return p.clone();
    }
    if only_p.is_empty() {
        return q.clone();
    }
    let mut sides = p.sides.clone();
    for (&eta, s) in &q.sides {
        sides.entry(eta).or_insert_with(|| s.clone());
    }
    let mut next = p.n;
    for &xi in &only_p {
        for &eta in &only_q {
            let (i, j) = place(xi, eta);
            sides.get_mut(&xi).expect("p index")[i].insert(next);
            sides.get_mut(&eta).expect("q index")[j].insert(next);
            next += 1;
        }
    }
    ApproxCondition {
        n: next,
        arity: p.arity,
        sides,
    }
}

/// Amalgamation for the three-sided conditions; fresh points go to side 0 on
/// the `p` part and side 1 on the `q` part.
pub fn amalgamate_3luzin(p: &ApproxCondition, q: &ApproxCondition) -> Result<ApproxCondition> {
    check_amalgamable(p, q, Arity::Three)?;
    Ok(amalgamate_with(p, q, |_, _| Arity::Three.fresh_sides()))
}

/// Amalgamation for the four-sided conditions; fresh points go to side 0 on
/// the `p` part and side 3 on the `q` part.
pub fn amalgamate_4family(p: &ApproxCondition, q: &ApproxCondition) -> Result<ApproxCondition> {
    check_amalgamable(p, q, Arity::Four)?;
    Ok(amalgamate_with(p, q, |_, _| Arity::Four.fresh_sides()))
}

/// Largest number of steps allowed by the signature.
pub const MAX_STEPS: usize = 10_000;

/// Ground size of a grown family: fresh points plus one private point per member.
pub fn grown_horizon(arity: Arity, steps: usize) -> usize {
    steps * steps.saturating_sub(1) / 2 + arity.get() * steps
}

/// Grows `(n, {0, …, steps−1})` one index at a time, amalgamating with a
/// fresh singleton and choosing the crossing sides at random; then member
/// `arity·ξ + i` is `A^i(ξ)` plus one private point.
pub fn grow_condition(arity: Arity, steps: usize, seed: u64) -> Result<ApproxCondition> {
    if steps > MAX_STEPS {
        return Err(Error::InvalidArgument(format!("steps {steps} exceed {MAX_STEPS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let crossings = arity.crossings();
    let mut p = ApproxCondition::empty(0, arity);
    for s in 0..steps {
        let q = ApproxCondition::singleton(p.n, arity, s);
        p = amalgamate_with(&p, &q, |_, _| crossings[rng.gen_range(0..crossings.len())]);
    }
    Ok(p)
}

pub fn grow_family(arity: Arity, steps: usize, seed: u64) -> Result<Family> {
    let horizon = grown_horizon(arity, steps);
    let count = arity.get() * steps;
    if count.saturating_mul(horizon) > BIT_BUDGET {
        return Err(Error::Capacity(format!(
            "{count} members over horizon {horizon} exceed the bit budget"
        )));
    }
    let p = grow_condition(arity, steps, seed)?;
    p.validate()?;
    let h = Horizon::new(horizon.max(1))?;
    let members = (0..steps)
        .flat_map(|xi| (0..arity.get()).map(move |i| (xi, i)))
        .enumerate()
        .map(|(t, (xi, i))| {
            let side = p.side(xi, i).expect("grown index");
            FinSet::from_elems(h, side.iter().copied().chain([p.n + t]))
        })
        .collect::<Result<Vec<_>>>()?;
    Family::new(h, members, Metadata::Grown { arity: arity.get(), steps, seed })
}

/// Columns `i = 0, …, arity−1` of a grown family: column `i` lists member `arity·ξ + i`.
pub fn grown_columns(arity: Arity, steps: usize) -> Vec<Vec<usize>> {
    (0..arity.get())
        .map(|i| (0..steps).map(|xi| arity.get() * xi + i).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n: usize, arity: Arity, xi: usize, sides: &[&[usize]]) -> ApproxCondition {
        let s = sides.iter().map(|v| v.iter().copied().collect()).collect();
        ApproxCondition::new(n, arity, [(xi, s)].into()).unwrap()
    }

    #[test]
    fn disjoint_singletons_get_one_fresh_point() {
        let p = single(2, Arity::Three, 0, &[&[0], &[1], &[]]);
        let q = single(2, Arity::Three, 1, &[&[], &[], &[0, 1]]);
        let r = amalgamate_3luzin(&p, &q).unwrap();
        assert_eq!(r.n(), 3);
        assert!(r.side(0, 0).unwrap().contains(&2));
        assert!(r.side(1, 1).unwrap().contains(&2));
        assert!(r.extends(&p) && r.extends(&q));
    }

    #[test]
    fn arity_round_trips_through_json() {
        let p = single(1, Arity::Four, 3, &[&[0], &[], &[], &[]]);
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"arity\":4"));
        assert_eq!(serde_json::from_str::<ApproxCondition>(&text).unwrap(), p);
    }
}
