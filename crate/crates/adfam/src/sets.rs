//! Set arithmetic over a finite ground interval `[0, H)`.
//!
//! [`FinSet`] is a bitset that remembers its horizon. The binary operators
//! `|`, `&` and `-` on references panic when horizons differ, the same way
//! slice indexing panics out of bounds; [`join`] and the `try_` helpers
//! report the mismatch as an error instead.

use std::collections::HashMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::search::{self, Adjacency};

/// Size of the ground interval `[0, H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Horizon(usize);

impl Horizon {
    pub fn new(h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        Ok(Horizon(h))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A subset of `[0, H)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    horizon: usize,
    words: Vec<u64>,
}

impl FinSet {
    pub fn empty(horizon: Horizon) -> Self {
        FinSet {
            horizon: horizon.0,
            words: vec![0; horizon.0.div_ceil(64)],
        }
    }

    /// The initial segment `[0, m)` (clamped to the horizon).
    pub fn initial(horizon: Horizon, m: usize) -> Self {
        let mut s = FinSet::empty(horizon);
        for x in 0..m.min(horizon.0) {
            s.insert(x);
        }
        s
    }

    pub fn from_elems(horizon: Horizon, elems: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = FinSet::empty(horizon);
        for x in elems {
            if x >= horizon.0 {
                return Err(Error::OutOfRange {
                    element: x,
                    horizon: horizon.0,
                });
            }
            s.insert(x);
        }
        Ok(s)
    }

    pub fn horizon(&self) -> Horizon {
        Horizon(self.horizon)
    }

    /// Inserts `x`; panics if `x` is outside the horizon.
    pub fn insert(&mut self, x: usize) -> bool {
        assert!(x < self.horizon, "element {x} outside horizon {}", self.horizon);
        let w = &mut self.words[x / 64];
        let fresh = *w >> (x % 64) & 1 == 0;
        *w |= 1 << (x % 64);
        fresh
    }

    pub fn remove(&mut self, x: usize) -> bool {
        if x >= self.horizon {
            return false;
        }
        let w = &mut self.words[x / 64];
        let had = *w >> (x % 64) & 1 == 1;
        *w &= !(1 << (x % 64));
        had
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.horizon && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| k * 64 + b)
        })
    }

    pub fn min_elem(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|k| k * 64 + self.words[k].trailing_zeros() as usize)
    }

    pub fn max_elem(&self) -> Option<usize> {
        self.words
            .iter()
            .rposition(|&w| w != 0)
            .map(|k| k * 64 + 63 - self.words[k].leading_zeros() as usize)
    }

    /// Smallest `m` with the set inside `[0, m)`.
    pub fn bound(&self) -> usize {
        self.max_elem().map_or(0, |x| x + 1)
    }

    /// `self ∩ [0, m)`.
    pub fn below(&self, m: usize) -> FinSet {
        let mut s = self.clone();
        if m >= self.horizon {
            return s;
        }
        s.words[m / 64] &= (1u64 << (m % 64)) - 1;
        for w in &mut s.words[m / 64 + 1..] {
            *w = 0;
        }
        s
    }

    /// `self ∖ [0, m)`.
    pub fn above(&self, m: usize) -> FinSet {
        let head = self.below(m);
        self - &head
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &FinSet) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_disjoint(&self, other: &FinSet) -> bool {
        !self.intersects(other)
    }

    pub fn try_union(&self, other: &FinSet) -> Result<FinSet> {
        same_horizon(self, other)?;
        Ok(self | other)
    }

    pub fn try_intersection(&self, other: &FinSet) -> Result<FinSet> {
        same_horizon(self, other)?;
        Ok(self & other)
    }

    pub fn try_difference(&self, other: &FinSet) -> Result<FinSet> {
        same_horizon(self, other)?;
        Ok(self - other)
    }

    pub fn union_with(&mut self, other: &FinSet) {
        self.check(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Moves the set to a new horizon; fails if an element would fall outside.
    pub fn rehorizon(&self, horizon: Horizon) -> Result<FinSet> {
        FinSet::from_elems(horizon, self.iter())
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn check(&self, other: &FinSet) {
        assert_eq!(
            self.horizon, other.horizon,
            "FinSet horizon mismatch ({} vs {})",
            self.horizon, other.horizon
        );
    }

    fn zip_with(&self, other: &FinSet, op: impl Fn(u64, u64) -> u64) -> FinSet {
        self.check(other);
        FinSet {
            horizon: self.horizon,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }
}

/// Checks that two sets share a horizon.
pub fn same_horizon(a: &FinSet, b: &FinSet) -> Result<()> {
    if a.horizon != b.horizon {
        return Err(Error::HorizonMismatch {
            left: a.horizon,
            right: b.horizon,
        });
    }
    Ok(())
}

impl BitOr for &FinSet {
    type Output = FinSet;
    fn bitor(self, rhs: &FinSet) -> FinSet {
        self.zip_with(rhs, |a, b| a | b)
    }
}

impl BitAnd for &FinSet {
    type Output = FinSet;
    fn bitand(self, rhs: &FinSet) -> FinSet {
        self.zip_with(rhs, |a, b| a & b)
    }
}

impl Sub for &FinSet {
    type Output = FinSet;
    fn sub(self, rhs: &FinSet) -> FinSet {
        self.zip_with(rhs, |a, b| a & !b)
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for FinSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// `((A∖B) ∩ (D∖C)) ∪ ((B∖A) ∩ (C∖D))`.
pub fn join(a: &FinSet, b: &FinSet, c: &FinSet, d: &FinSet) -> Result<FinSet> {
    same_horizon(a, b)?;
    same_horizon(a, c)?;
    same_horizon(a, d)?;
    Ok(&(&(a - b) & &(d - c)) | &(&(b - a) & &(c - d)))
}

/// A Δ-system: every two petals intersect exactly in `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSystem {
    pub root: FinSet,
    pub petals: Vec<usize>,
}

impl DeltaSystem {
    /// Re-checks the defining property against `sets`.
    pub fn verify(&self, sets: &[FinSet]) -> bool {
        self.petals.iter().enumerate().all(|(k, &i)| {
            self.petals[k + 1..]
                .iter()
                .all(|&j| &sets[i] & &sets[j] == self.root)
        })
    }
}

/// Sets up to this count are searched exhaustively.
pub const DELTA_EXHAUSTIVE_LIMIT: usize = 20;

/// Finds a Δ-system with at least `target` petals, or `None`.
///
/// Exhaustive (largest system over all candidate roots) for at most
/// [`DELTA_EXHAUSTIVE_LIMIT`] sets, greedy by root frequency beyond.
pub fn delta_system(sets: &[FinSet], target: usize) -> Result<Option<DeltaSystem>> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("delta_system needs at least one set".into()));
    }
    if target < 2 {
        return Err(Error::InvalidArgument("delta_system target must be at least 2".into()));
    }
    for s in &sets[1..] {
        same_horizon(&sets[0], s)?;
    }
    let found = if sets.len() <= DELTA_EXHAUSTIVE_LIMIT {
        delta_exhaustive(sets)
    } else {
        delta_greedy(sets, target)
    };
    Ok(found.filter(|d| d.petals.len() >= target))
}

/// Candidate roots in order of first occurrence, with their pair counts.
fn candidate_roots(sets: &[FinSet]) -> Vec<(FinSet, usize)> {
    let mut order: Vec<FinSet> = Vec::new();
    let mut counts: HashMap<FinSet, usize> = HashMap::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let r = &sets[i] & &sets[j];
            let c = counts.entry(r.clone()).or_insert(0);
            if *c == 0 {
                order.push(r);
            }
            *c += 1;
        }
    }
    order
        .into_iter()
        .map(|r| {
            let c = counts[&r];
            (r, c)
        })
        .collect()
}

fn delta_exhaustive(sets: &[FinSet]) -> Option<DeltaSystem> {
    let mut best: Option<DeltaSystem> = None;
    for (root, _) in candidate_roots(sets) {
        let eligible: Vec<usize> = (0..sets.len()).filter(|&i| root.is_subset(&sets[i])).collect();
        let g = Adjacency::from_fn(eligible.len(), |x, y| {
            &sets[eligible[x]] & &sets[eligible[y]] == root
        });
        let clique = search::max_clique_exact(&g).expect("at most 20 vertices");
        if best.as_ref().is_none_or(|b| clique.len() > b.petals.len()) {
            best = Some(DeltaSystem {
                root: root.clone(),
                petals: clique.iter().map(|&k| eligible[k]).collect(),
            });
        }
    }
    best
}

fn delta_greedy(sets: &[FinSet], target: usize) -> Option<DeltaSystem> {
    let mut roots = candidate_roots(sets);
    // Stable sort keeps first-occurrence order among equal counts.
    roots.sort_by_key(|(_, c)| std::cmp::Reverse(*c));
    let mut best: Option<DeltaSystem> = None;
    for (root, _) in roots {
        let mut used = FinSet::empty(root.horizon());
        let mut petals = Vec::new();
        for (i, s) in sets.iter().enumerate() {
            if !root.is_subset(s) {
                continue;
            }
            let petal = s - &root;
            if petal.is_disjoint(&used) {
                used.union_with(&petal);
                petals.push(i);
            }
        }
        if best.as_ref().is_none_or(|b| petals.len() > b.petals.len()) {
            best = Some(DeltaSystem { root, petals });
        }
        if best.as_ref().is_some_and(|b| b.petals.len() >= target) {
            break;
        }
    }
    best
}

/// Breadth-first numbering of binary strings shorter than `depth`.
///
/// `""` is 0, `"0"` is 1, `"1"` is 2, `"00"` is 3, and in general a string of
/// length `L` with binary value `v` sits at `2^L - 1 + v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeCode {
    depth: usize,
}

impl TreeCode {
    pub const MAX_DEPTH: usize = 32;

    pub fn new(depth: usize) -> Result<Self> {
        if depth == 0 || depth > Self::MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "tree depth {depth} outside 1..={}",
                Self::MAX_DEPTH
            )));
        }
        Ok(TreeCode { depth })
    }

    pub fn depth(self) -> usize {
        self.depth
    }

    /// Number of codes, `2^depth - 1`.
    pub fn size(self) -> usize {
        (1usize << self.depth) - 1
    }

    pub fn index(self, t: &str) -> Result<usize> {
        if t.len() >= self.depth {
            return Err(Error::InvalidArgument(format!(
                "string of length {} does not fit depth {}",
                t.len(),
                self.depth
            )));
        }
        let mut v = 0usize;
        for ch in t.chars() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::InvalidArgument(format!("non-binary character {other:?}")))
                }
            };
            v = v << 1 | bit;
        }
        Ok((1usize << t.len()) - 1 + v)
    }

    pub fn string(self, n: usize) -> Result<String> {
        if n >= self.size() {
            return Err(Error::InvalidArgument(format!(
                "index {n} outside the depth-{} tree",
                self.depth
            )));
        }
        let len = (usize::BITS - (n + 1).leading_zeros() - 1) as usize;
        let v = n + 1 - (1 << len);
        Ok((0..len)
            .rev()
            .map(|k| if v >> k & 1 == 1 { '1' } else { '0' })
            .collect())
    }
}
