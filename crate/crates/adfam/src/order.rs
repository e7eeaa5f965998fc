//! Conditions of the splitting order, compatibility, thinning, and the two
//! decomposition algorithms.
//!
//! A condition is `p = (A_p, B_p)` with `A_p = (⋃a ∖ [0,m)) ∪ E` and
//! `B_p = (⋃b ∖ [0,m)) ∪ F`. Compatibility is decided in two stages: labels
//! first (a generator on opposite sides means the infinite tails meet), then
//! an exact bit test on the materialized sets.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::numeric::{self, Q};
use crate::search::{self, Adjacency};
use crate::sets::FinSet;

/// A set of member indices.
pub type Labels = BTreeSet<usize>;

/// An element of the splitting order over one family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Condition {
    #[serde(skip)]
    family: u64,
    a: Labels,
    b: Labels,
    m: usize,
    e: FinSet,
    f: FinSet,
    #[serde(rename = "A")]
    a_set: FinSet,
    #[serde(rename = "B")]
    b_set: FinSet,
}

impl Condition {
    pub fn a(&self) -> &Labels {
        &self.a
    }

    pub fn b(&self) -> &Labels {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn e(&self) -> &FinSet {
        &self.e
    }

    pub fn f(&self) -> &FinSet {
        &self.f
    }

    /// Materialized `A_p`.
    pub fn a_set(&self) -> &FinSet {
        &self.a_set
    }

    /// Materialized `B_p`.
    pub fn b_set(&self) -> &FinSet {
        &self.b_set
    }

    pub fn family_id(&self) -> u64 {
        self.family
    }

    pub fn is_empty(&self) -> bool {
        self.a_set.is_empty() && self.b_set.is_empty() && self.a.is_empty() && self.b.is_empty()
    }

    /// `A_p ∪ B_p`.
    pub fn support(&self) -> FinSet {
        &self.a_set | &self.b_set
    }

    /// The same condition with `A` and `B` exchanged.
    pub fn swapped(&self) -> Condition {
        Condition {
            family: self.family,
            a: self.b.clone(),
            b: self.a.clone(),
            m: self.m,
            e: self.f.clone(),
            f: self.e.clone(),
            a_set: self.b_set.clone(),
            b_set: self.a_set.clone(),
        }
    }

    /// `(m, E, F)`, the data shared by a thinned batch.
    pub fn correction_key(&self) -> (usize, Vec<usize>, Vec<usize>) {
        (self.m, self.e.to_vec(), self.f.to_vec())
    }
}

/// Builds and validates a condition.
pub fn make_condition(
    family: &Family,
    a: Labels,
    b: Labels,
    m: usize,
    e: FinSet,
    f: FinSet,
) -> Result<Condition> {
    let h = family.horizon();
    if let Some(&i) = a.iter().chain(&b).find(|&&i| i >= family.len()) {
        return Err(Error::InvalidArgument(format!("member index {i} out of range")));
    }
    if let Some(&i) = a.intersection(&b).next() {
        return Err(Error::LabelOverlap { index: i });
    }
    if m > h.get() {
        return Err(Error::InvalidArgument(format!("bound {m} exceeds horizon {h}")));
    }
    if e.horizon() != h || f.horizon() != h {
        return Err(Error::HorizonMismatch {
            left: h.get(),
            right: if e.horizon() != h { e.horizon() } else { f.horizon() }.get(),
        });
    }
    if e.bound() > m || f.bound() > m {
        return Err(Error::InvalidArgument(format!(
            "corrections must lie below the bound {m}"
        )));
    }
    if let Some(x) = (&e & &f).min_elem() {
        return Err(Error::Overlap { element: x });
    }
    let a_set = &family.union_of(&a).above(m) | &e;
    let b_set = &family.union_of(&b).above(m) | &f;
    if let Some(x) = (&a_set & &b_set).min_elem() {
        return Err(Error::Overlap { element: x });
    }
    Ok(Condition {
        family: family.fingerprint(),
        a,
        b,
        m,
        e,
        f,
        a_set,
        b_set,
    })
}

/// `(⋃a ∖ m, ⋃b ∖ m)` with no corrections.
pub fn generator_condition(family: &Family, a: Labels, b: Labels, m: usize) -> Result<Condition> {
    let h = family.horizon();
    make_condition(family, a, b, m, FinSet::empty(h), FinSet::empty(h))
}

/// The condition `(∅, ∅)`.
pub fn empty_condition(family: &Family) -> Condition {
    generator_condition(family, Labels::new(), Labels::new(), 0).expect("empty condition is valid")
}

/// Rewrites `p` with the bound raised to `m_new`, moving the materialized
/// points below it into the corrections; `A_p` and `B_p` are unchanged.
pub fn raise_bound(family: &Family, p: &Condition, m_new: usize) -> Result<Condition> {
    let m_new = m_new.max(p.m);
    make_condition(
        family,
        p.a.clone(),
        p.b.clone(),
        m_new,
        p.a_set.below(m_new),
        p.b_set.below(m_new),
    )
}

fn same_family(p: &Condition, q: &Condition) -> Result<()> {
    if p.family != q.family {
        return Err(Error::CrossFamily);
    }
    Ok(())
}

/// Two-stage compatibility test.
pub fn compatible(p: &Condition, q: &Condition) -> Result<bool> {
    same_family(p, q)?;
    Ok(compatible_unchecked(p, q))
}

pub(crate) fn compatible_unchecked(p: &Condition, q: &Condition) -> bool {
    if !p.a.is_disjoint(&q.b) || !q.a.is_disjoint(&p.b) {
        return false;
    }
    p.a_set.is_disjoint(&q.b_set) && q.a_set.is_disjoint(&p.b_set)
}

/// `r ≤ p`: `r` extends `p` on labels and on both materialized sides.
pub fn extends(r: &Condition, p: &Condition) -> bool {
    r.family == p.family
        && p.a.is_subset(&r.a)
        && p.b.is_subset(&r.b)
        && p.a_set.is_subset(&r.a_set)
        && p.b_set.is_subset(&r.b_set)
}

/// The canonical common extension `(A_p ∪ A_q, B_p ∪ B_q)`.
pub fn meet(family: &Family, p: &Condition, q: &Condition) -> Result<Condition> {
    if !compatible(p, q)? {
        return Err(Error::Incompatible);
    }
    let m = p.m.max(q.m);
    let a_set = &p.a_set | &q.a_set;
    let b_set = &p.b_set | &q.b_set;
    make_condition(
        family,
        &p.a | &q.a,
        &p.b | &q.b,
        m,
        a_set.below(m),
        b_set.below(m),
    )
}

pub fn essentially_distinct(p: &Condition, q: &Condition) -> bool {
    p.a != q.a && p.b != q.b
}

/// `⋃A_p ∩ ⋃B_p = ∅` over the whole set.
pub fn is_centered(conditions: &[&Condition]) -> bool {
    let Some(first) = conditions.first() else {
        return true;
    };
    let mut a = FinSet::empty(first.a_set.horizon());
    let mut b = a.clone();
    let (mut la, mut lb) = (Labels::new(), Labels::new());
    for p in conditions {
        a.union_with(&p.a_set);
        b.union_with(&p.b_set);
        la.extend(&p.a);
        lb.extend(&p.b);
    }
    la.is_disjoint(&lb) && a.is_disjoint(&b)
}

/// Pairwise compatibility matrix.
pub fn compatibility_matrix(conditions: &[Condition]) -> Result<Vec<Vec<bool>>> {
    for p in conditions {
        same_family(&conditions[0], p)?;
    }
    Ok(conditions
        .iter()
        .map(|p| conditions.iter().map(|q| compatible_unchecked(p, q)).collect())
        .collect())
}

/// The compatibility graph (edge = compatible).
pub fn compatibility_graph(conditions: &[Condition]) -> Adjacency {
    Adjacency::from_fn(conditions.len(), |i, j| {
        compatible_unchecked(&conditions[i], &conditions[j])
    })
}

/// Which branch of the thinning produced the batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThinRoute {
    /// One side's generator sets are constant; every replacement is `(∅, ∅)`.
    ConstantSide,
    /// Δ-systems on both sides with pairwise disjoint remainders.
    DeltaRoots,
}

/// Replacement conditions sharing `(k, l, m, E, F)` with pairwise disjoint generators.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizedBatch {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub e: FinSet,
    pub f: FinSet,
    pub a: Vec<Labels>,
    pub b: Vec<Labels>,
    pub conditions: Vec<Condition>,
    pub route: ThinRoute,
}

/// Largest batch found by [`thin_normalize`] and its replacements.
#[derive(Clone, Debug, Serialize)]
pub struct Thinned {
    pub gamma: Vec<usize>,
    pub batch: NormalizedBatch,
}

/// Root pairs tried per bucket in the Δ-system branch.
const ROOT_CANDIDATES: usize = 16;

/// Finds a large sub-batch whose compatibility pattern is carried by
/// conditions with common corrections and pairwise disjoint generators.
///
/// The batch is the largest found, not a guaranteed maximum; compatibility
/// on it is re-verified before returning.
pub fn thin_normalize(family: &Family, conditions: &[Condition]) -> Result<Thinned> {
    if conditions.len() < 2 {
        return Err(Error::Construction("thinning needs at least two conditions".into()));
    }
    for p in conditions {
        if p.family != family.fingerprint() {
            return Err(Error::CrossFamily);
        }
    }
    let raised = conditions
        .iter()
        .map(|p| {
            let gens: Vec<usize> = p.a.iter().chain(&p.b).copied().collect();
            raise_bound(family, p, family.bound_among(&gens))
        })
        .collect::<Result<Vec<_>>>()?;

    // Keyed by (m, E, F, |a|, |b|).
    type BucketKey = (usize, Vec<usize>, Vec<usize>, usize, usize);
    let mut buckets: BTreeMap<BucketKey, Vec<usize>> = BTreeMap::new();
    for (i, p) in raised.iter().enumerate() {
        let (m, e, f) = p.correction_key();
        buckets.entry((m, e, f, p.a.len(), p.b.len())).or_default().push(i);
    }

    let mut best: Option<(Vec<usize>, ThinRoute, Labels, Labels)> = None;
    for members in buckets.values() {
        let constant = constant_side(&raised, members);
        let delta = delta_roots(&raised, members);
        let pick = match delta {
            Some((g, ra, rb)) if g.len() > constant.len() => (g, ThinRoute::DeltaRoots, ra, rb),
            _ => (constant, ThinRoute::ConstantSide, Labels::new(), Labels::new()),
        };
        if best.as_ref().is_none_or(|b| pick.0.len() > b.0.len()) {
            best = Some(pick);
        }
    }
    let (gamma, route, root_a, root_b) = best.expect("at least one bucket");
    if gamma.len() < 2 {
        return Err(Error::Construction("no batch of size at least 2 found".into()));
    }

    let h = family.horizon();
    let batch = match route {
        ThinRoute::ConstantSide => {
            let empty = empty_condition(family);
            NormalizedBatch {
                k: 0,
                l: 0,
                m: 0,
                e: FinSet::empty(h),
                f: FinSet::empty(h),
                a: vec![Labels::new(); gamma.len()],
                b: vec![Labels::new(); gamma.len()],
                conditions: vec![empty; gamma.len()],
                route,
            }
        }
        ThinRoute::DeltaRoots => {
            let first = &raised[gamma[0]];
            let (m, e, f) = (first.m, first.e.clone(), first.f.clone());
            let a: Vec<Labels> = gamma.iter().map(|&i| &raised[i].a - &root_a).collect();
            let b: Vec<Labels> = gamma.iter().map(|&i| &raised[i].b - &root_b).collect();
            let conditions = a
                .iter()
                .zip(&b)
                .map(|(a, b)| make_condition(family, a.clone(), b.clone(), m, e.clone(), f.clone()))
                .collect::<Result<Vec<_>>>()?;
            NormalizedBatch {
                k: a[0].len(),
                l: b[0].len(),
                m,
                e,
                f,
                a,
                b,
                conditions,
                route,
            }
        }
    };
    let before: Vec<Condition> = gamma.iter().map(|&i| conditions[i].clone()).collect();
    if compatibility_matrix(&before)? != compatibility_matrix(&batch.conditions)? {
        return Err(Error::Construction(
            "thinned batch changed the compatibility pattern".into(),
        ));
    }
    if !batch_bullets_hold(family, &batch) {
        return Err(Error::Construction("thinned batch fails its normal form".into()));
    }
    Ok(Thinned { gamma, batch })
}

/// Checks the normal form of a batch: materialization, generator intersections
/// below `m`, and pairwise disjoint generator sets.
pub fn batch_bullets_hold(family: &Family, batch: &NormalizedBatch) -> bool {
    let n = batch.conditions.len();
    (0..n).all(|x| {
        let p = &batch.conditions[x];
        let gens: Vec<usize> = batch.a[x].iter().chain(&batch.b[x]).copied().collect();
        p.a_set == &family.union_of(&batch.a[x]).above(batch.m) | &batch.e
            && p.b_set == &family.union_of(&batch.b[x]).above(batch.m) | &batch.f
            && batch.a[x].len() == batch.k
            && batch.b[x].len() == batch.l
            && batch.a[x].is_disjoint(&batch.b[x])
            && family.bound_among(&gens) <= batch.m
            && (x + 1..n).all(|y| {
                let ux: Labels = &batch.a[x] | &batch.b[x];
                let uy: Labels = &batch.a[y] | &batch.b[y];
                ux.is_disjoint(&uy)
            })
    }) && batch.e.is_disjoint(&batch.f)
        && batch.e.bound() <= batch.m
        && batch.f.bound() <= batch.m
}

fn constant_side(raised: &[Condition], members: &[usize]) -> Vec<usize> {
    let mut by_a: BTreeMap<&Labels, Vec<usize>> = BTreeMap::new();
    let mut by_b: BTreeMap<&Labels, Vec<usize>> = BTreeMap::new();
    for &i in members {
        by_a.entry(&raised[i].a).or_default().push(i);
        by_b.entry(&raised[i].b).or_default().push(i);
    }
    by_a.into_values()
        .chain(by_b.into_values())
        .max_by_key(|g| (g.len(), std::cmp::Reverse(g[0])))
        .unwrap_or_default()
}

fn delta_roots(raised: &[Condition], members: &[usize]) -> Option<(Vec<usize>, Labels, Labels)> {
    let mut counts: BTreeMap<(Labels, Labels), usize> = BTreeMap::new();
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            let key = (&raised[i].a & &raised[j].a, &raised[i].b & &raised[j].b);
            *counts.entry(key).or_default() += 1;
        }
    }
    let mut roots: Vec<((Labels, Labels), usize)> = counts.into_iter().collect();
    roots.sort_by_key(|(_, c)| std::cmp::Reverse(*c));
    let mut best: Option<(Vec<usize>, Labels, Labels)> = None;
    for ((ra, rb), _) in roots.into_iter().take(ROOT_CANDIDATES) {
        let eligible: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| ra.is_subset(&raised[i].a) && rb.is_subset(&raised[i].b))
            .collect();
        let rest: Vec<Labels> = eligible
            .iter()
            .map(|&i| &(&raised[i].a - &ra) | &(&raised[i].b - &rb))
            .collect();
        let g = Adjacency::from_fn(eligible.len(), |x, y| {
            let (p, q) = (&raised[eligible[x]], &raised[eligible[y]]);
            (&p.a & &q.a) == ra && (&p.b & &q.b) == rb && rest[x].is_disjoint(&rest[y])
        });
        let clique = if g.len() <= search::EXACT_CLIQUE_LIMIT {
            search::max_clique_exact(&g).expect("within the exact limit")
        } else {
            search::max_clique_greedy(&g)
        };
        let gamma: Vec<usize> = clique.iter().map(|&x| eligible[x]).collect();
        if best.as_ref().is_none_or(|b| gamma.len() > b.0.len()) {
            best = Some((gamma, ra, rb));
        }
    }
    best
}

/// Finite union of closed rational intervals, sorted and pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalUnion(Vec<(Q, Q)>);

impl IntervalUnion {
    pub fn new(mut parts: Vec<(Q, Q)>) -> Self {
        parts.sort();
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(parts.len());
        for (lo, hi) in parts {
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        IntervalUnion(out)
    }

    pub fn parts(&self) -> &[(Q, Q)] {
        &self.0
    }

    pub fn contains(&self, x: &Q) -> bool {
        let k = self.0.partition_point(|(lo, _)| lo <= x);
        k > 0 && x <= &self.0[k - 1].1
    }

    pub fn intersects(&self, other: &IntervalUnion) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            if a.0 <= b.1 && b.0 <= a.1 {
                return true;
            }
            if a.1 < b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::new(self.0.iter().chain(&other.0).cloned().collect())
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(lo, hi)| {
            [numeric::RationalPair::from(lo), numeric::RationalPair::from(hi)]
        }))
    }
}

/// A color of the σ-centered decomposition: `U ∩ V = ∅`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IntervalPair {
    pub u: IntervalUnion,
    pub v: IntervalUnion,
}

impl IntervalPair {
    pub fn is_disjoint(&self) -> bool {
        !self.u.intersects(&self.v)
    }

    /// Interval-level compatibility of two colors.
    pub fn compatible_with(&self, other: &IntervalPair) -> bool {
        !self.u.intersects(&other.v) && !other.u.intersects(&self.v)
    }
}

/// A class assignment with its interval dictionary.
#[derive(Clone, Debug, Serialize)]
pub struct CenteredColoring {
    pub colors: Vec<usize>,
    pub dictionary: Vec<IntervalPair>,
    pub verified: bool,
}

impl CenteredColoring {
    pub fn class_count(&self) -> usize {
        self.dictionary.len()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        search::classes(&self.colors)
    }
}

/// Neighborhood radius levels tried before falling back to point intervals.
const MAX_RADIUS_LEVEL: u32 = 256;

struct Neighborhoods<'a> {
    values: &'a [Q],
    centers: Vec<Q>,
    base_radius: Q,
    /// Per member, ground elements by increasing distance to the center.
    by_distance: Vec<Vec<(Q, usize)>>,
}

impl<'a> Neighborhoods<'a> {
    fn new(family: &'a Family) -> Result<Self> {
        let emb = family
            .embedding()
            .ok_or(Error::MissingMetadata { expected: "r_embeddable" })?;
        let centers: Vec<Q> = emb.limits.iter().map(|l| l.center()).collect();
        let mut sorted = centers.clone();
        sorted.sort();
        let gap = sorted
            .windows(2)
            .map(|w| &w[1] - &w[0])
            .min()
            .unwrap_or_else(|| numeric::qi(1));
        let mut base_radius = numeric::qi(1);
        while base_radius > &gap / numeric::qi(4) {
            base_radius /= numeric::qi(2);
        }
        let by_distance = centers
            .iter()
            .map(|c| {
                let mut d: Vec<(Q, usize)> = emb
                    .values
                    .iter()
                    .enumerate()
                    .map(|(n, v)| ((v - c).abs(), n))
                    .collect();
                d.sort();
                d
            })
            .collect();
        Ok(Neighborhoods {
            values: &emb.values,
            centers,
            base_radius,
            by_distance,
        })
    }

    /// The widest dyadic neighborhood of member `j`'s limit whose ground
    /// values all belong to `side`.
    fn interval(&self, j: usize, side: &FinSet) -> Option<(Q, Q)> {
        let nearest_bad = self.by_distance[j]
            .iter()
            .find(|(_, n)| !side.contains(*n))
            .map(|(d, _)| d.clone());
        let mut r = self.base_radius.clone();
        for _ in 0..MAX_RADIUS_LEVEL {
            if nearest_bad.as_ref().is_none_or(|d| &r < d) {
                let c = &self.centers[j];
                return Some((c - &r, c + &r));
            }
            r /= numeric::qi(2);
        }
        None
    }

    fn cover(&self, labels: &Labels, side: &FinSet) -> IntervalUnion {
        let mut parts: Vec<(Q, Q)> = labels.iter().filter_map(|&j| self.interval(j, side)).collect();
        let covered = IntervalUnion::new(parts.clone());
        for n in side.iter() {
            let v = &self.values[n];
            if !covered.contains(v) {
                parts.push((v.clone(), v.clone()));
            }
        }
        IntervalUnion::new(parts)
    }

    fn pair(&self, p: &Condition) -> IntervalPair {
        IntervalPair {
            u: self.cover(&p.a, &p.a_set),
            v: self.cover(&p.b, &p.b_set),
        }
    }

    fn values_inside(&self, set: &FinSet, u: &IntervalUnion) -> bool {
        set.iter().all(|n| u.contains(&self.values[n]))
    }
}

/// σ-centered decomposition for a family with a rational embedding.
///
/// Each condition gets the pair `(U, V)` of neighborhoods of its generators'
/// limits, shrunk until they only capture values of its own side, plus
/// point intervals for the remaining values. Pairs are then merged by a
/// coloring of the interval-level conflict graph (exact for at most 16
/// distinct pairs), and each class is re-verified.
pub fn centered_decomposition(family: &Family, conditions: &[Condition]) -> Result<CenteredColoring> {
    let hoods = Neighborhoods::new(family)?;
    for p in conditions {
        if p.family != family.fingerprint() {
            return Err(Error::CrossFamily);
        }
    }
    let pairs: Vec<IntervalPair> = conditions.iter().map(|p| hoods.pair(p)).collect();
    let mut keys: Vec<IntervalPair> = pairs.clone();
    keys.sort();
    keys.dedup();
    let key_index: BTreeMap<&IntervalPair, usize> =
        keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let conflicts = Adjacency::from_fn(keys.len(), |i, j| !keys[i].compatible_with(&keys[j]));
    let key_colors = if keys.len() <= search::EXACT_COLOR_LIMIT {
        search::color_exact(&conflicts)?
    } else {
        search::color_dsatur(&conflicts)
    };
    let count = key_colors.iter().max().map_or(0, |c| c + 1);
    let empty = IntervalUnion::new(Vec::new());
    let mut dictionary = vec![
        IntervalPair {
            u: empty.clone(),
            v: empty
        };
        count
    ];
    for (k, &c) in key_colors.iter().enumerate() {
        dictionary[c] = IntervalPair {
            u: dictionary[c].u.union(&keys[k].u),
            v: dictionary[c].v.union(&keys[k].v),
        };
    }
    let colors: Vec<usize> = pairs.iter().map(|p| key_colors[key_index[p]]).collect();
    let verified = dictionary.iter().all(IntervalPair::is_disjoint)
        && conditions.iter().zip(&colors).all(|(p, &c)| {
            hoods.values_inside(&p.a_set, &dictionary[c].u)
                && hoods.values_inside(&p.b_set, &dictionary[c].v)
        })
        && classes_are(conditions, &colors, true);
    Ok(CenteredColoring {
        colors,
        dictionary,
        verified,
    })
}

/// True when every class is pairwise compatible (`want_compatible`) or
/// pairwise incompatible (otherwise).
pub fn classes_are(conditions: &[Condition], colors: &[usize], want_compatible: bool) -> bool {
    search::classes(colors).iter().all(|class| {
        class.iter().enumerate().all(|(k, &i)| {
            class[k + 1..]
                .iter()
                .all(|&j| compatible_unchecked(&conditions[i], &conditions[j]) == want_compatible)
        })
    })
}

/// Antichain coloring with its provenance.
#[derive(Clone, Debug, Serialize)]
pub struct AntichainColoring {
    pub colors: Vec<usize>,
    /// Index ranges `[lo, hi]` of generator blocks.
    pub blocks: Vec<(usize, usize)>,
    /// True when the block algorithm failed verification and greedy coloring was used.
    pub fallback: bool,
    pub verified: bool,
}

impl AntichainColoring {
    pub fn class_count(&self) -> usize {
        self.colors.iter().max().map_or(0, |c| c + 1)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        search::classes(&self.colors)
    }
}

/// Splits essentially distinct conditions over a Luzin family into antichains.
///
/// With `α = max a_p` and `β = max b_p`, the index spans `[min, max]` of all
/// conditions are merged into blocks. The `n`-th condition of every block
/// forms layer `n`; within a layer, blocks are visited in order and each
/// condition takes the least color not used by the earlier conditions `p'`
/// for which `f_α` dips to `≤ m` somewhere on the block of `p'`.
pub fn luzin_antichain_decomposition(family: &Family, conditions: &[Condition]) -> Result<AntichainColoring> {
    let witness = family
        .luzin_witness()
        .ok_or(Error::MissingMetadata { expected: "luzin" })?;
    let Some(first) = conditions.first() else {
        return Ok(AntichainColoring {
            colors: Vec::new(),
            blocks: Vec::new(),
            fallback: false,
            verified: true,
        });
    };
    for (i, p) in conditions.iter().enumerate() {
        if p.family != family.fingerprint() {
            return Err(Error::CrossFamily);
        }
        if p.a.is_empty() || p.b.is_empty() {
            return Err(Error::Precondition(format!("condition {i} has an empty side")));
        }
        if p.correction_key() != first.correction_key() {
            return Err(Error::Precondition(format!(
                "condition {i} does not share (m, E, F) with condition 0"
            )));
        }
        for (j, q) in conditions[..i].iter().enumerate() {
            if !essentially_distinct(p, q) {
                return Err(Error::Precondition(format!(
                    "conditions {j} and {i} are not essentially distinct"
                )));
            }
        }
    }
    let m = first.m;
    let alpha: Vec<usize> = conditions.iter().map(|p| *p.a.last().unwrap()).collect();
    let beta: Vec<usize> = conditions.iter().map(|p| *p.b.last().unwrap()).collect();

    let mut spans: Vec<(usize, usize)> = alpha
        .iter()
        .zip(&beta)
        .map(|(&x, &y)| (x.min(y), x.max(y)))
        .collect();
    spans.sort();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in spans {
        match blocks.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => blocks.push((lo, hi)),
        }
    }
    let block_of = |i: usize| blocks.partition_point(|b| b.1 < alpha[i].min(beta[i]));
    let mut per_block: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for i in 0..conditions.len() {
        per_block[block_of(i)].push(i);
    }

    let dips = |i: usize, block: usize| {
        let (lo, hi) = blocks[block];
        (lo..=hi).any(|xi| witness.f(alpha[i], xi).is_none_or(|v| v <= m))
    };
    let layers = per_block.iter().map(Vec::len).max().unwrap_or(0);
    let mut colors = vec![0usize; conditions.len()];
    let mut offset = 0;
    for layer in 0..layers {
        let mut placed: Vec<(usize, usize)> = Vec::new();
        let mut used = 0;
        for (block, members) in per_block.iter().enumerate() {
            let Some(&i) = members.get(layer) else {
                continue;
            };
            let excluded: BTreeSet<usize> = placed
                .iter()
                .filter(|&&(j, _)| dips(i, block_of(j)))
                .map(|&(j, _)| colors[j])
                .collect();
            let c = (offset..).find(|c| !excluded.contains(c)).unwrap();
            colors[i] = c;
            used = used.max(c + 1 - offset);
            placed.push((i, block));
        }
        offset += used;
    }
    let mut coloring = AntichainColoring {
        colors,
        blocks,
        fallback: false,
        verified: false,
    };
    coloring.verified = classes_are(conditions, &coloring.colors, false);
    if !coloring.verified {
        let g = compatibility_graph(conditions);
        coloring.colors = search::color_dsatur(&g);
        coloring.fallback = true;
        coloring.verified = classes_are(conditions, &coloring.colors, false);
    }
    Ok(coloring)
}

/// Values of the embedding on a set (used by reports).
pub fn embedded_values(family: &Family, set: &FinSet) -> Option<Vec<Q>> {
    let e = family.embedding()?;
    Some(set.iter().map(|n| e.values[n].clone()).collect())
}

/// True when no value of `set` is zero-distance from any limit center (sanity
/// check for the neighborhood construction).
pub fn values_avoid_centers(family: &Family) -> bool {
    let Some(e) = family.embedding() else {
        return true;
    };
    e.limits
        .iter()
        .all(|l| e.values.iter().all(|v| !(v - l.center()).is_zero()))
}
