//! Independent oracles: plain bitsets and small integer vectors, no use of
//! the library's set algebra, compatibility test or norms.
#![allow(dead_code)]

use std::collections::BTreeSet;

use adfam::families::Family;
use adfam::order::Condition;

/// Plain word bitset over `[0, len)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits(pub Vec<u64>);

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    pub fn from_iter(len: usize, xs: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::empty(len);
        for x in xs {
            b.0[x / 64] |= 1 << (x % 64);
        }
        b
    }

    pub fn has(&self, x: usize) -> bool {
        self.0[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn or(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }

    pub fn meets(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// Members as plain element lists.
pub fn member_lists(family: &Family) -> Vec<Vec<usize>> {
    (0..family.len()).map(|i| family.member(i).iter().collect()).collect()
}

/// `A = (⋃a ∖ m) ∪ E`, `B = (⋃b ∖ m) ∪ F`, recomputed from raw fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sides {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub aset: Bits,
    pub bset: Bits,
}

pub fn sides_of(members: &[Vec<usize>], h: usize, p: &Condition) -> Sides {
    let side = |labels: &BTreeSet<usize>, corr: Vec<usize>| {
        let mut xs: Vec<usize> = labels
            .iter()
            .flat_map(|&j| members[j].iter().copied())
            .filter(|&x| x >= p.m())
            .collect();
        xs.extend(corr);
        Bits::from_iter(h, xs)
    };
    Sides {
        a: p.a().clone(),
        b: p.b().clone(),
        aset: side(p.a(), p.e().iter().collect()),
        bset: side(p.b(), p.f().iter().collect()),
    }
}

/// Labels first, then ground points.
pub fn compatible(p: &Sides, q: &Sides) -> bool {
    p.a.is_disjoint(&q.b) && q.a.is_disjoint(&p.b) && !p.aset.meets(&q.bset) && !q.aset.meets(&p.bset)
}

/// Union test for a whole family of conditions.
pub fn centered(cs: &[&Sides]) -> bool {
    let Some(first) = cs.first() else { return true };
    let mut a = Bits::empty(first.aset.0.len() * 64);
    let mut b = a.clone();
    let (mut la, mut lb): (BTreeSet<usize>, BTreeSet<usize>) = (BTreeSet::new(), BTreeSet::new());
    for c in cs {
        a = a.or(&c.aset);
        b = b.or(&c.bset);
        la.extend(&c.a);
        lb.extend(&c.b);
    }
    la.is_disjoint(&lb) && !a.meets(&b)
}

/// `f_p` as integers: coordinates in `{-1, 0, 1}` and one coefficient per member.
pub fn indicator(s: &Sides, h: usize, members: usize) -> (Vec<i8>, Vec<i8>) {
    let coords = (0..h)
        .map(|n| i8::from(s.aset.has(n)) - i8::from(s.bset.has(n)))
        .collect();
    let tail = (0..members)
        .map(|j| i8::from(s.a.contains(&j)) - i8::from(s.b.contains(&j)))
        .collect();
    (coords, tail)
}

/// Sup distance of two integer vectors with integer tails.
pub fn sup_distance(u: &(Vec<i8>, Vec<i8>), v: &(Vec<i8>, Vec<i8>)) -> i8 {
    u.0.iter()
        .zip(&v.0)
        .chain(u.1.iter().zip(&v.1))
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or(0)
}

/// Largest subset (by brute force over bitmasks) satisfying `ok`.
pub fn brute_max(n: usize, ok: impl Fn(u32) -> bool) -> usize {
    assert!(n <= 20);
    (0u32..(1 << n)).filter(|&s| ok(s)).map(|s| s.count_ones() as usize).max().unwrap_or(0)
}

/// Elements of a bitmask.
pub fn elems(s: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| s >> i & 1 == 1)
}

/// Largest clique of a boolean adjacency matrix, by Bron–Kerbosch with pivoting.
pub fn max_clique_size(adj: &[Vec<bool>]) -> usize {
    fn go(adj: &[Vec<bool>], r: usize, p: Vec<usize>, mut x: Vec<usize>, best: &mut usize) {
        if p.is_empty() {
            if x.is_empty() {
                *best = (*best).max(r);
            }
            return;
        }
        if r + p.len() <= *best {
            return;
        }
        let pivot = *p.iter().chain(&x).max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
        let mut rest = p.clone();
        for v in p.into_iter().filter(|&v| !adj[pivot][v]) {
            let np = rest.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
            go(adj, r + 1, np, nx, best);
            rest.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut best = 0;
    go(adj, 0, (0..adj.len()).collect(), Vec::new(), &mut best);
    best
}
