//! Passing between conditions and vectors: `f_p`, the thresholded
//! conditions `p(f, ε)` and `p[f, ε]`, and pairings.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{SphereVector, Tail};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::numeric::{self, Q};
use crate::order::{self, Condition, Labels};
use crate::sets::FinSet;

/// `+1` on `A_p`, `−1` on `B_p`, with tail `+1` on `a_p` and `−1` on `b_p`.
pub fn f_of(p: &Condition) -> SphereVector {
    let h = p.a_set().horizon().get();
    let mut coords = vec![Q::zero(); h];
    for n in p.a_set().iter() {
        coords[n] = numeric::qi(1);
    }
    for n in p.b_set().iter() {
        coords[n] = numeric::qi(-1);
    }
    let tail = Tail::from_terms(
        p.a().iter()
            .map(|&j| (j, numeric::qi(1)))
            .chain(p.b().iter().map(|&j| (j, numeric::qi(-1)))),
    );
    SphereVector::new(coords, tail)
}

/// `Σ r_j 1_{A_j}` plus a finitely supported part.
pub fn combination_vector(family: &Family, terms: &[(usize, Q)], finite: &[(usize, Q)]) -> Result<SphereVector> {
    let h = family.horizon().get();
    let tail = Tail::from_terms(terms.iter().cloned());
    let mut coords = vec![Q::zero(); h];
    for t in tail.terms() {
        if t.0 >= family.len() {
            return Err(Error::InvalidArgument(format!("member index {} out of range", t.0)));
        }
        for n in family.member(t.0).iter() {
            coords[n] += &t.1;
        }
    }
    for (n, x) in finite {
        if *n >= h {
            return Err(Error::OutOfRange { element: *n, horizon: h });
        }
        coords[*n] += x;
    }
    Ok(SphereVector::new(coords, tail))
}

/// Limits along members and the point above which `f` agrees with its
/// combination part and each point meets at most one tail member.
#[derive(Clone, Debug)]
pub struct Structure {
    pub limits: BTreeMap<usize, Q>,
    pub m: usize,
}

impl Structure {
    pub fn limit(&self, member: usize) -> Q {
        self.limits.get(&member).cloned().unwrap_or_else(Q::zero)
    }
}

pub fn structure(family: &Family, f: &SphereVector) -> Result<Structure> {
    let h = family.horizon().get();
    if f.horizon() != h {
        return Err(Error::HorizonMismatch { left: h, right: f.horizon() });
    }
    let mut limits = BTreeMap::new();
    for t in f.tail().terms() {
        if t.0 >= family.len() {
            return Err(Error::Precondition(format!(
                "tail refers to member {} of a {}-member family",
                t.0,
                family.len()
            )));
        }
        limits.insert(t.0, t.1.clone());
    }
    let mut g = vec![Q::zero(); h];
    for (&j, r) in &limits {
        for n in family.member(j).iter() {
            g[n] += r;
        }
    }
    let finite_bound = (0..h).rev().find(|&n| g[n] != f.coords()[n]).map_or(0, |n| n + 1);
    let members: Vec<usize> = limits.keys().copied().collect();
    Ok(Structure {
        m: finite_bound.max(family.bound_among(&members)),
        limits,
    })
}

fn set_where(f: &SphereVector, pred: impl Fn(&Q) -> bool) -> FinSet {
    let h = crate::sets::Horizon::new(f.horizon().max(1)).expect("positive");
    FinSet::from_elems(h, (0..f.horizon()).filter(|&n| pred(&f.coords()[n]))).expect("in range")
}

/// `p(f, ε)`: `A = {f ≥ ε/2}`, `B = {f ≤ −ε/2}`, assembled from the
/// combination structure of `f`.
pub fn cond_from_function(family: &Family, f: &SphereVector, eps: &Q) -> Result<Condition> {
    if !eps.is_positive() || eps > &numeric::qi(1) {
        return Err(Error::InvalidArgument("ε must lie in (0, 1]".into()));
    }
    let s = structure(family, f)?;
    let half = eps / numeric::qi(2);
    let a: Labels = s.limits.iter().filter(|(_, r)| **r >= half).map(|(&j, _)| j).collect();
    let b: Labels = s.limits.iter().filter(|(_, r)| **r <= -&half).map(|(&j, _)| j).collect();
    let a_set = set_where(f, |x| x >= &half);
    let b_set = set_where(f, |x| x <= &-&half);
    let p = order::make_condition(family, a, b, s.m, a_set.below(s.m), b_set.below(s.m))?;
    if p.a_set() != &a_set || p.b_set() != &b_set {
        return Err(Error::Construction("thresholded sets differ from the assembled condition".into()));
    }
    Ok(p)
}

/// `p[f, ε]`: points of members with limit `≥ 1−ε` where `f > 1−2ε`, and
/// symmetrically for `B`, each side minus the other.
pub fn cond_from_limits(family: &Family, f: &SphereVector, eps: &Q) -> Result<Condition> {
    if !eps.is_positive() || eps >= &numeric::q(1, 2) {
        return Err(Error::InvalidArgument("ε must lie in (0, 1/2)".into()));
    }
    let s = structure(family, f)?;
    let one = numeric::qi(1);
    let a: Labels = s.limits.iter().filter(|(_, r)| **r >= &one - eps).map(|(&j, _)| j).collect();
    let b: Labels = s.limits.iter().filter(|(_, r)| **r <= eps - &one).map(|(&j, _)| j).collect();
    let hi = &one - eps * numeric::qi(2);
    let lo = -&hi;
    let ua = family.union_of(&a);
    let ub = family.union_of(&b);
    let raw_a = &ua & &set_where(f, |x| x > &hi);
    let raw_b = &ub & &set_where(f, |x| x < &lo);
    let a_set = &raw_a - &raw_b;
    let b_set = &raw_b - &raw_a;
    let p = order::make_condition(family, a, b, s.m, a_set.below(s.m), b_set.below(s.m))?;
    if p.a_set() != &a_set || p.b_set() != &b_set {
        return Err(Error::Construction("limit clauses differ from the assembled condition".into()));
    }
    Ok(p)
}

/// Index `α ↦ (plus[α], minus[α])` with all members distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pairing {
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl Pairing {
    pub fn new(family_len: usize, plus: Vec<usize>, minus: Vec<usize>) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::InvalidArgument("pairing sides differ in length".into()));
        }
        let mut seen = BTreeSet::new();
        for (alpha, (&x, &y)) in plus.iter().zip(&minus).enumerate() {
            if x == y {
                return Err(Error::InvalidArgument(format!("pair {alpha} repeats member {x}")));
            }
            for i in [x, y] {
                if i >= family_len {
                    return Err(Error::InvalidArgument(format!("member index {i} out of range")));
                }
                if !seen.insert(i) {
                    return Err(Error::InvalidArgument(format!("member {i} used by two pairs")));
                }
            }
        }
        Ok(Pairing { plus, minus })
    }

    /// `α ↦ (2α, 2α+1)`.
    pub fn consecutive(family_len: usize) -> Self {
        let k = family_len / 2;
        Pairing {
            plus: (0..k).map(|a| 2 * a).collect(),
            minus: (0..k).map(|a| 2 * a + 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    pub fn pair(&self, alpha: usize) -> (usize, usize) {
        (self.plus[alpha], self.minus[alpha])
    }
}

/// `1_{plus(α)} − 1_{minus(α)}` for each `α`; with `agree = Some(m)` only the
/// pairs whose members coincide on `{0, …, m}` are kept.
pub fn pairing_vectors(family: &Family, pairing: &Pairing, agree: Option<usize>) -> Result<Vec<(usize, SphereVector)>> {
    let mut out = Vec::new();
    for alpha in 0..pairing.len() {
        let (x, y) = pairing.pair(alpha);
        if x >= family.len() || y >= family.len() {
            return Err(Error::InvalidArgument(format!("pair {alpha} is out of range")));
        }
        if let Some(m) = agree {
            if family.member(x).below(m + 1) != family.member(y).below(m + 1) {
                continue;
            }
        }
        let v = combination_vector(family, &[(x, numeric::qi(1)), (y, numeric::qi(-1))], &[])?;
        out.push((alpha, v));
    }
    Ok(out)
}
