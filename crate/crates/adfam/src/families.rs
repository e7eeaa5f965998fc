//! Finite almost disjoint families: constructors, certificates, file format,
//! and the n-Luzin-gap test.
//!
//! # Truncation contract
//!
//! A member of a [`Family`] stands for an infinite subset of ℕ. At finite
//! scale every pairwise intersection lies strictly below the family's
//! intersection ceiling `M`, and every member owns at least one element
//! `≥ M`. Elements at or above `M` therefore behave like the disjoint infinite
//! tails of the members.
//!
//! Where a construction would leave a member without such an element (the
//! tree-based and fresh-point constructions), each member receives a few
//! private *tail elements* placed above every shared element. They play the
//! part of the portion of the member beyond the horizon.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, Q};
use crate::sets::{FinSet, Horizon, TreeCode};

/// Private tail elements per member for fresh-point constructions.
pub const LUZIN_TAIL: usize = 8;
/// Largest `members × horizon` bit budget accepted by constructors.
pub const BIT_BUDGET: usize = 1 << 30;

/// An indexed list of members with a tight almost-disjointness certificate.
#[derive(Clone, Debug)]
pub struct Family {
    horizon: Horizon,
    members: Vec<FinSet>,
    ad_bound: Vec<Vec<usize>>,
    ceiling: usize,
    metadata: Metadata,
    fingerprint: u64,
}

/// How a family was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metadata {
    Raw,
    Steprans(StepransData),
    REmbeddable(RationalEmbedding),
    Luzin(LuzinWitness),
    Cohen { base: Box<Metadata>, bits: Vec<usize> },
    Grown { arity: usize, steps: usize, seed: u64 },
}

impl Metadata {
    pub fn kind(&self) -> &'static str {
        match self {
            Metadata::Raw => "raw",
            Metadata::Steprans(_) => "steprans",
            Metadata::REmbeddable(_) => "r_embeddable",
            Metadata::Luzin(_) => "luzin",
            Metadata::Cohen { .. } => "cohen",
            Metadata::Grown { .. } => "grown",
        }
    }
}

/// Member `2k + i` is `A^i` of seed `k`; tail elements start at `tail_start`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepransData {
    pub depth: usize,
    pub seeds: Vec<String>,
    pub tail_start: usize,
}

impl StepransData {
    /// `(seed index, side)` of a member.
    pub fn role(&self, member: usize) -> (usize, usize) {
        (member / 2, member % 2)
    }
}

/// Injective rational values on the ground interval, converging along each
/// member toward a certified irrational limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalEmbedding {
    #[serde(with = "numeric::pair_vec")]
    pub values: Vec<Q>,
    pub limits: Vec<LimitInterval>,
}

/// `lo ≤ √prime ≤ hi` with `hi - lo ≤ 2^-32`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitInterval {
    pub prime: u64,
    #[serde(with = "numeric::pair")]
    pub lo: Q,
    #[serde(with = "numeric::pair")]
    pub hi: Q,
}

impl LimitInterval {
    pub fn center(&self) -> Q {
        (&self.lo + &self.hi) / numeric::qi(2)
    }
}

/// `maps[η][ξ] = max(A_ξ ∩ A_η)` for `ξ < η`, `None` when disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LuzinWitness {
    pub maps: Vec<Vec<Option<usize>>>,
    pub multiplicity: usize,
}

impl LuzinWitness {
    pub fn compute(members: &[FinSet]) -> Self {
        let maps: Vec<Vec<Option<usize>>> = (0..members.len())
            .map(|eta| {
                (0..eta)
                    .map(|xi| (&members[xi] & &members[eta]).max_elem())
                    .collect()
            })
            .collect();
        let multiplicity = maps
            .iter()
            .map(|row| {
                let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                for v in row.iter().flatten() {
                    *counts.entry(*v).or_default() += 1;
                }
                counts.values().copied().max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
            .max(1);
        LuzinWitness { maps, multiplicity }
    }

    /// `f_η(ξ)`.
    pub fn f(&self, eta: usize, xi: usize) -> Option<usize> {
        self.maps.get(eta).and_then(|row| row.get(xi)).copied().flatten()
    }
}

/// Outcome of an almost-disjointness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AdVerdict {
    Certificate { ad_bound: Vec<Vec<usize>>, ceiling: usize },
    Violation(AdViolation),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdViolation {
    /// The recomputed intersection bound exceeds the stored one.
    AboveClaimedBound { i: usize, j: usize, bound: usize, claimed: usize },
    /// The intersection swallows all of a member, so it is not finite in the proxy sense.
    Unbounded { i: usize, j: usize, bound: usize },
    EmptyMember { member: usize },
    /// The member has no element at or above the intersection ceiling.
    NoTail { member: usize, ceiling: usize },
}

impl std::fmt::Display for AdViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdViolation::AboveClaimedBound { i, j, bound, claimed } => write!(
                f,
                "members {i} and {j} intersect up to {bound}, above the claimed bound {claimed}"
            ),
            AdViolation::Unbounded { i, j, bound } => write!(
                f,
                "members {i} and {j} intersect up to {bound}, covering a whole member"
            ),
            AdViolation::EmptyMember { member } => write!(f, "member {member} is empty"),
            AdViolation::NoTail { member, ceiling } => write!(
                f,
                "member {member} has no element at or above the ceiling {ceiling}"
            ),
        }
    }
}

fn tight_bounds(members: &[FinSet]) -> Vec<Vec<usize>> {
    let n = members.len();
    let mut b = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = (&members[i] & &members[j]).bound();
            b[i][j] = v;
            b[j][i] = v;
        }
    }
    b
}

/// Recomputes the tight bound matrix of `members` and checks the tail proxy.
pub fn verify_members(members: &[FinSet]) -> AdVerdict {
    let bounds = tight_bounds(members);
    for (i, m) in members.iter().enumerate() {
        if m.is_empty() {
            return AdVerdict::Violation(AdViolation::EmptyMember { member: i });
        }
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let b = bounds[i][j];
            if b > members[i].max_elem().unwrap() || b > members[j].max_elem().unwrap() {
                return AdVerdict::Violation(AdViolation::Unbounded { i, j, bound: b });
            }
        }
    }
    let ceiling = bounds.iter().flatten().copied().max().unwrap_or(0);
    for (i, m) in members.iter().enumerate() {
        if m.max_elem().unwrap() < ceiling {
            return AdVerdict::Violation(AdViolation::NoTail { member: i, ceiling });
        }
    }
    AdVerdict::Certificate {
        ad_bound: bounds,
        ceiling,
    }
}

/// Recomputes every pairwise intersection and compares with the stored bounds.
pub fn verify_ad(family: &Family) -> AdVerdict {
    let verdict = verify_members(&family.members);
    if let AdVerdict::Certificate { ad_bound, .. } = &verdict {
        for (i, row) in ad_bound.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b > family.ad_bound[i][j] {
                    return AdVerdict::Violation(AdViolation::AboveClaimedBound {
                        i,
                        j,
                        bound: b,
                        claimed: family.ad_bound[i][j],
                    });
                }
            }
        }
    }
    verdict
}

fn fingerprint(horizon: Horizon, members: &[FinSet]) -> u64 {
    const PRIME: u64 = 0x100000001b3;
    let mut h: u64 = 0xcbf29ce484222325;
    let mut feed = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    feed(horizon.get() as u64);
    for m in members {
        feed(u64::MAX);
        for x in m.iter() {
            feed(x as u64);
        }
    }
    h
}

impl Family {
    /// Certifies `members` and wraps them into a family.
    pub fn new(horizon: Horizon, members: Vec<FinSet>, metadata: Metadata) -> Result<Self> {
        for m in &members {
            if m.horizon() != horizon {
                return Err(Error::HorizonMismatch {
                    left: horizon.get(),
                    right: m.horizon().get(),
                });
            }
        }
        match verify_members(&members) {
            AdVerdict::Violation(v) => Err(Error::NotAlmostDisjoint(v.to_string())),
            AdVerdict::Certificate { ad_bound, ceiling } => Ok(Family {
                horizon,
                fingerprint: fingerprint(horizon, &members),
                members,
                ad_bound,
                ceiling,
                metadata,
            }),
        }
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &FinSet {
        &self.members[i]
    }

    pub fn members(&self) -> &[FinSet] {
        &self.members
    }

    /// `m[i][j]`: members `i` and `j` intersect inside `[0, m[i][j])`.
    pub fn ad_bound(&self, i: usize, j: usize) -> usize {
        self.ad_bound[i][j]
    }

    pub fn ad_bounds(&self) -> &[Vec<usize>] {
        &self.ad_bound
    }

    pub fn intersection_ceiling(&self) -> usize {
        self.ceiling
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    /// Identifies the family in conditions built over it.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn luzin_witness(&self) -> Option<&LuzinWitness> {
        match &self.metadata {
            Metadata::Luzin(w) => Some(w),
            _ => None,
        }
    }

    pub fn embedding(&self) -> Option<&RationalEmbedding> {
        match &self.metadata {
            Metadata::REmbeddable(e) => Some(e),
            _ => None,
        }
    }

    pub fn steprans(&self) -> Option<&StepransData> {
        match &self.metadata {
            Metadata::Steprans(s) => Some(s),
            _ => None,
        }
    }

    /// Union of the listed members.
    pub fn union_of<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> FinSet {
        let mut u = FinSet::empty(self.horizon);
        for &i in indices {
            u.union_with(&self.members[i]);
        }
        u
    }

    /// Largest pairwise bound among the listed members.
    pub fn bound_among(&self, indices: &[usize]) -> usize {
        let mut b = 0;
        for (k, &i) in indices.iter().enumerate() {
            for &j in &indices[k + 1..] {
                b = b.max(self.ad_bound[i][j]);
            }
        }
        b
    }

    /// Serializes to the JSON family format, including the certificate block.
    pub fn to_json(&self) -> Result<String> {
        let file = FamilyFile {
            horizon: self.horizon.get(),
            members: self.members.iter().map(FinSet::to_vec).collect(),
            metadata: self.metadata.clone(),
            certificate: Some(CertificateBlock {
                ceiling: self.ceiling,
                ad_bound: self.ad_bound.clone(),
            }),
        };
        Ok(serde_json::to_string_pretty(&file)? + "\n")
    }

    /// Parses and certifies a JSON family; metadata is re-derived and checked.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)?;
        let horizon = Horizon::new(file.horizon)?;
        let members = file
            .members
            .iter()
            .map(|m| FinSet::from_elems(horizon, m.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        let family = Family::new(horizon, members, file.metadata)?;
        if let Some(cert) = file.certificate {
            if cert.ceiling != family.ceiling || cert.ad_bound != family.ad_bound {
                return Err(Error::NotAlmostDisjoint(
                    "stored certificate differs from the recomputed one".into(),
                ));
            }
        }
        family.check_metadata()?;
        Ok(family)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Family::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Re-derives construction metadata and compares it with the members.
    pub fn check_metadata(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::NotAlmostDisjoint(format!("metadata check: {msg}")));
        match &self.metadata {
            Metadata::Raw | Metadata::Grown { .. } => Ok(()),
            Metadata::Steprans(data) => {
                let rebuilt = build_steprans(data.depth, &data.seeds)?;
                if rebuilt.members != self.members {
                    return fail("members differ from the seeds' prefix sets".into());
                }
                Ok(())
            }
            Metadata::Luzin(w) => {
                if &LuzinWitness::compute(&self.members) != w {
                    return fail("Luzin witness differs from the members".into());
                }
                Ok(())
            }
            Metadata::REmbeddable(e) => check_embedding(self, e).or_else(fail),
            Metadata::Cohen { bits, .. } => {
                let bits = FinSet::from_elems(self.horizon, bits.iter().copied())?;
                if self.members.iter().any(|m| !m.is_subset(&bits)) {
                    return fail("a member leaves the refining set".into());
                }
                Ok(())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyFile {
    horizon: usize,
    members: Vec<Vec<usize>>,
    metadata: Metadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateBlock>,
}

#[derive(Serialize, Deserialize)]
struct CertificateBlock {
    ceiling: usize,
    ad_bound: Vec<Vec<usize>>,
}

fn check_budget(members: usize, horizon: usize) -> Result<()> {
    if members.saturating_mul(horizon) > BIT_BUDGET {
        return Err(Error::Capacity(format!(
            "{members} members over horizon {horizon} exceed the bit budget"
        )));
    }
    Ok(())
}

/// The tree-branch family: for each seed `x`, `A_x^i = {t : t⌢i ⊆ x}` with
/// prefixes numbered by [`TreeCode`], plus one private tail element per member.
pub fn build_steprans(depth: usize, seeds: &[String]) -> Result<Family> {
    if !(2..=24).contains(&depth) {
        return Err(Error::InvalidArgument(format!("depth {depth} outside 2..=24")));
    }
    let code = TreeCode::new(depth)?;
    let tail_start = code.size();
    let horizon = Horizon::new(tail_start + 2 * seeds.len())?;
    check_budget(2 * seeds.len(), horizon.get())?;
    let mut seen = BTreeSet::new();
    let mut members = Vec::with_capacity(2 * seeds.len());
    for (k, x) in seeds.iter().enumerate() {
        if x.len() != depth || !x.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidArgument(format!(
                "seed {x:?} is not a binary string of length {depth}"
            )));
        }
        if !x.contains('0') || !x.contains('1') {
            return Err(Error::InvalidArgument(format!(
                "seed {x:?} must contain both bits"
            )));
        }
        if !seen.insert(x.as_str()) {
            return Err(Error::DuplicateSeed(x.clone()));
        }
        let mut sides = [FinSet::empty(horizon), FinSet::empty(horizon)];
        for len in 0..depth {
            let side = (x.as_bytes()[len] - b'0') as usize;
            sides[side].insert(code.index(&x[..len])?);
        }
        for (i, mut s) in sides.into_iter().enumerate() {
            s.insert(tail_start + 2 * k + i);
            members.push(s);
        }
    }
    Family::new(
        horizon,
        members,
        Metadata::Steprans(StepransData {
            depth,
            seeds: seeds.to_vec(),
            tail_start,
        }),
    )
}

/// `count` distinct random seeds of length `depth`, each containing both bits.
pub fn random_seeds(depth: usize, count: usize, rng_seed: u64) -> Result<Vec<String>> {
    if !(2..=62).contains(&depth) || (count as u128) > (1u128 << depth) - 2 {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {count} distinct seeds of length {depth}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: u64 = rng.gen::<u64>() & ((1u64 << depth) - 1);
        if v == 0 || v == (1u64 << depth) - 1 || !seen.insert(v) {
            continue;
        }
        out.push(format!("{v:0depth$b}"));
    }
    Ok(out)
}

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    let mut n = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= n).all(|&p| !n.is_multiple_of(p)) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// Certified `[lo, hi] ∋ √p` with width at most `2^-64`.
pub fn sqrt_limit(p: u64) -> LimitInterval {
    let (lo, hi) = numeric::sqrt_bounds(&numeric::qi(p as i64), 64);
    LimitInterval { prime: p, lo, hi }
}

/// Continued-fraction convergents of `√p` (p not a square), starting from `a_0`.
pub fn sqrt_convergents(p: u64) -> impl Iterator<Item = Q> {
    let a0 = (p as u128).sqrt() as u64;
    let big = |v: u64| BigInt::from(v);
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let (mut h_prev, mut h) = (BigInt::one(), big(a0));
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    let mut first = true;
    std::iter::from_fn(move || {
        if first {
            first = false;
            return Some(Q::new(h.clone(), k.clone()));
        }
        m = d * a - m;
        d = (p - m * m) / d;
        a = (a0 + m) / d;
        let h_next = big(a) * &h + &h_prev;
        let k_next = big(a) * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        Some(Q::new(h.clone(), k.clone()))
    })
}

/// Disjoint blocks of length `block_length`; block `j` is valued by
/// convergents of `√p_j` (a seeded starting offset, skipping values already
/// taken); ground elements outside every block get negative integers.
pub fn build_r_embeddable(
    count: usize,
    horizon: Horizon,
    block_length: usize,
    rng_seed: u64,
) -> Result<Family> {
    if block_length == 0 {
        return Err(Error::InvalidArgument("block length must be positive".into()));
    }
    if count * block_length > horizon.get() {
        return Err(Error::Capacity(format!(
            "{count} blocks of length {block_length} exceed horizon {horizon}"
        )));
    }
    check_budget(count, horizon.get())?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let ps = primes(count);
    let mut used: BTreeSet<Q> = BTreeSet::new();
    let mut values = Vec::with_capacity(horizon.get());
    let mut members = Vec::with_capacity(count);
    for &p in &ps {
        let offset = rng.gen_range(1..=3);
        let start = values.len();
        for v in sqrt_convergents(p).skip(offset) {
            if values.len() == start + block_length {
                break;
            }
            if used.insert(v.clone()) {
                values.push(v);
            }
        }
        members.push(FinSet::from_elems(horizon, start..start + block_length)?);
    }
    for n in values.len()..horizon.get() {
        values.push(-numeric::qi(n as i64 + 1));
    }
    let limits = ps.iter().map(|&p| sqrt_limit(p)).collect();
    Family::new(
        horizon,
        members,
        Metadata::REmbeddable(RationalEmbedding { values, limits }),
    )
}

/// Exact `|x − √p| < |y − √p|` for non-square `p`:
/// the sign of `(x − y)(x + y − 2√p)` decides.
fn closer_to_sqrt(x: &Q, y: &Q, p: &Q) -> bool {
    let d = x - y;
    let s = (x + y) / numeric::qi(2);
    let above = !s.is_negative() && &(&s * &s) > p;
    let below = s.is_negative() || &(&s * &s) < p;
    (d.is_positive() && below) || (d.is_negative() && above)
}

fn check_embedding(family: &Family, e: &RationalEmbedding) -> std::result::Result<(), String> {
    if e.values.len() != family.horizon.get() || e.limits.len() != family.len() {
        return Err("embedding size does not match the family".into());
    }
    let distinct: BTreeSet<&Q> = e.values.iter().collect();
    if distinct.len() != e.values.len() {
        return Err("values are not injective".into());
    }
    let width_cap = numeric::pow2_neg(32);
    for (j, lim) in e.limits.iter().enumerate() {
        let p = numeric::qi(lim.prime as i64);
        if lim.lo.is_negative() || &lim.lo * &lim.lo > p || &lim.hi * &lim.hi < p {
            return Err(format!("limit {j} does not enclose √{}", lim.prime));
        }
        if &lim.hi - &lim.lo > width_cap {
            return Err(format!("limit {j} is wider than 2^-32"));
        }
        for other in &e.limits[..j] {
            if !(lim.hi < other.lo || other.hi < lim.lo) {
                return Err(format!("limit {j} overlaps an earlier limit"));
            }
        }
        let vals: Vec<&Q> = family.members[j].iter().map(|n| &e.values[n]).collect();
        if vals.windows(2).any(|w| !closer_to_sqrt(w[1], w[0], &p)) {
            return Err(format!("values of member {j} do not approach its limit"));
        }
    }
    Ok(())
}

/// The fresh-point Luzin construction. Columns `c < base_columns` are
/// `{c, c + base_columns}`; member `η ≥ base_columns` meets each `ξ < η` in
/// one fresh element, taken in increasing order; every member then receives
/// [`LUZIN_TAIL`] private tail elements.
pub fn build_luzin(count: usize, base_columns: usize) -> Result<Family> {
    if base_columns < 2 || count < base_columns {
        return Err(Error::InvalidArgument(format!(
            "need count ≥ base_columns ≥ 2, got {count} and {base_columns}"
        )));
    }
    let shared: usize = (base_columns..count).sum();
    let total = 2 * base_columns + shared + LUZIN_TAIL * count;
    check_budget(count, total)?;
    let horizon = Horizon::new(total)?;
    let mut members = vec![FinSet::empty(horizon); count];
    for (c, m) in members.iter_mut().enumerate().take(base_columns) {
        m.insert(c);
        m.insert(c + base_columns);
    }
    let mut next = 2 * base_columns;
    for eta in base_columns..count {
        for xi in 0..eta {
            members[xi].insert(next);
            members[eta].insert(next);
            next += 1;
        }
    }
    for m in members.iter_mut() {
        for _ in 0..LUZIN_TAIL {
            m.insert(next);
            next += 1;
        }
    }
    let witness = LuzinWitness::compute(&members);
    Family::new(horizon, members, Metadata::Luzin(witness))
}

/// Intersects every member with `bits`; fails listing the members left
/// without an element at or above the new intersection ceiling.
pub fn cohen_refine(base: &Family, bits: &FinSet) -> Result<Family> {
    if bits.horizon() != base.horizon {
        return Err(Error::HorizonMismatch {
            left: base.horizon.get(),
            right: bits.horizon().get(),
        });
    }
    let members: Vec<FinSet> = base.members.iter().map(|m| m & bits).collect();
    let ceiling = tight_bounds(&members)
        .iter()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0);
    let killed: Vec<usize> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.max_elem().is_none_or(|x| x < ceiling))
        .map(|(i, _)| i)
        .collect();
    if !killed.is_empty() {
        return Err(Error::RefinementKilled { members: killed });
    }
    Family::new(
        base.horizon,
        members,
        Metadata::Cohen {
            base: Box::new(base.metadata.clone()),
            bits: bits.to_vec(),
        },
    )
}

/// Seeded fair coin flips over the horizon.
pub fn random_bits(horizon: Horizon, rng_seed: u64) -> FinSet {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut s = FinSet::empty(horizon);
    for n in 0..horizon.get() {
        if rng.gen::<bool>() {
            s.insert(n);
        }
    }
    s
}

/// `n` columns of equal length `L`; row `α` is `(columns[0][α], …, columns[n-1][α])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuzinGap {
    pub columns: Vec<Vec<usize>>,
    pub m: usize,
}

impl LuzinGap {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GapVerdict {
    Gap { m: usize },
    /// `clause` 1: row `alpha` has columns meeting at or above `m`;
    /// clause 2: rows `alpha`, `beta` only cross-meet below `m`.
    NotGap { clause: u8, alpha: usize, beta: usize },
}

impl GapVerdict {
    pub fn is_gap(self) -> bool {
        matches!(self, GapVerdict::Gap { .. })
    }
}

fn check_columns(family: &Family, columns: &[Vec<usize>]) -> Result<()> {
    if columns.len() < 2 {
        return Err(Error::InvalidArgument("a gap needs at least two columns".into()));
    }
    let len = columns[0].len();
    if len == 0 || columns.iter().any(|c| c.len() != len) {
        return Err(Error::InvalidArgument("columns must share a positive length".into()));
    }
    let mut seen = BTreeSet::new();
    for &i in columns.iter().flatten() {
        if i >= family.len() {
            return Err(Error::InvalidArgument(format!("member index {i} out of range")));
        }
        if !seen.insert(i) {
            return Err(Error::InvalidArgument(format!(
                "member {i} appears in more than one place"
            )));
        }
    }
    Ok(())
}

/// Exhaustive test of both gap clauses at witness `m`.
pub fn check_n_luzin_gap(family: &Family, columns: &[Vec<usize>], m: usize) -> Result<GapVerdict> {
    check_columns(family, columns)?;
    let rows = columns[0].len();
    let n = columns.len();
    let b = |i: usize, alpha: usize| columns[i][alpha];
    for alpha in 0..rows {
        for i in 0..n {
            for j in i + 1..n {
                if family.ad_bound(b(i, alpha), b(j, alpha)) > m {
                    return Ok(GapVerdict::NotGap {
                        clause: 1,
                        alpha,
                        beta: alpha,
                    });
                }
            }
        }
    }
    for alpha in 0..rows {
        for beta in alpha + 1..rows {
            let crosses = (0..n).any(|i| {
                (0..n).any(|j| i != j && family.ad_bound(b(i, alpha), b(j, beta)) > m)
            });
            if !crosses {
                return Ok(GapVerdict::NotGap {
                    clause: 2,
                    alpha,
                    beta,
                });
            }
        }
    }
    Ok(GapVerdict::Gap { m })
}

/// Smallest witness `m ≤ ceiling`, if any.
pub fn find_gap_witness(family: &Family, columns: &[Vec<usize>]) -> Result<Option<usize>> {
    check_columns(family, columns)?;
    for m in 0..=family.intersection_ceiling() {
        if check_n_luzin_gap(family, columns, m)?.is_gap() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Keeps the largest group of rows whose first `traced` columns have equal
/// traces below `m_new` (earliest row breaks ties), and moves the witness to `m_new`.
pub fn restrict_to_traces(family: &Family, gap: &LuzinGap, traced: usize, m_new: usize) -> LuzinGap {
    let mut groups: BTreeMap<Vec<Vec<usize>>, Vec<usize>> = BTreeMap::new();
    for alpha in 0..gap.rows() {
        let key = gap.columns[..traced]
            .iter()
            .map(|c| family.member(c[alpha]).below(m_new).to_vec())
            .collect();
        groups.entry(key).or_default().push(alpha);
    }
    let best = groups
        .into_values()
        .max_by_key(|rows| (rows.len(), std::cmp::Reverse(rows[0])))
        .unwrap_or_default();
    LuzinGap {
        columns: gap
            .columns
            .iter()
            .map(|c| best.iter().map(|&a| c[a]).collect())
            .collect(),
        m: m_new,
    }
}

/// Pads an n-gap with `k - n` columns of spare members, raises the witness
/// to cover the new same-row intersections, and filters rows by traces.
pub fn extend_gap(family: &Family, gap: &LuzinGap, k: usize) -> Result<LuzinGap> {
    let n = gap.columns.len();
    if !check_n_luzin_gap(family, &gap.columns, gap.m)?.is_gap() {
        return Err(Error::Precondition("input is not a gap at its witness".into()));
    }
    if k < n {
        return Err(Error::InvalidArgument(format!("cannot shrink an {n}-gap to {k}")));
    }
    if k == n {
        return Ok(gap.clone());
    }
    let rows = gap.rows();
    let used: BTreeSet<usize> = gap.columns.iter().flatten().copied().collect();
    let spare: Vec<usize> = (0..family.len()).filter(|i| !used.contains(i)).collect();
    let need = (k - n) * rows;
    if spare.len() < need {
        return Err(Error::Precondition(format!(
            "{need} spare members needed, {} available",
            spare.len()
        )));
    }
    let mut columns = gap.columns.clone();
    for c in 0..k - n {
        columns.push(spare[c * rows..(c + 1) * rows].to_vec());
    }
    let mut m_new = gap.m;
    for j in n..k {
        for i in 0..j {
            for (&x, &y) in columns[i].iter().zip(&columns[j]) {
                m_new = m_new.max(family.ad_bound(x, y));
            }
        }
    }
    let padded = LuzinGap { columns, m: gap.m };
    let out = restrict_to_traces(family, &padded, n, m_new);
    if rows >= 2 && out.rows() < 2 {
        return Err(Error::Construction(
            "trace filtering left fewer than two rows".into(),
        ));
    }
    match check_n_luzin_gap(family, &out.columns, out.m)? {
        GapVerdict::Gap { .. } => Ok(out),
        GapVerdict::NotGap { clause, alpha, beta } => Err(Error::Construction(format!(
            "extended columns fail clause {clause} at rows {alpha}, {beta}"
        ))),
    }
}
