//! Exact vectors over a finite horizon with a symbolic tail, the sup norm,
//! and the renorming `‖f‖∞,2 = ‖f‖∞ + ‖T f‖` where
//! `T f = (f(n) / √(2^{n+1}))_n`.
//!
//! Coordinates are exact rationals. The tail describes the values beyond the
//! horizon as a combination `Σ r_j 1_{A_j}` of family members; beyond the
//! intersection ceiling each point lies in at most one member, so the tail
//! takes exactly the values `r_j` (and 0). Square roots are certified
//! intervals; comparisons refine the precision until they are decided.

mod bridge;
mod lemmas;
mod separation;
mod suite;

pub use bridge::*;
pub use lemmas::*;
pub use separation::*;
pub use suite::*;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, CertifiedReal, Decision, Precision, Q};

/// Largest working precision tried by certified comparisons.
pub const MAX_BITS: u32 = 1024;

/// One tail term `r · 1_{A_member}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term(pub usize, #[serde(with = "numeric::pair")] pub Q);

/// Values beyond the horizon.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    #[default]
    Zero,
    /// Sorted by member, no repeated members, no zero coefficients.
    Combination { terms: Vec<Term> },
}

impl Tail {
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Q)>) -> Tail {
        let mut merged: std::collections::BTreeMap<usize, Q> = Default::default();
        for (j, r) in terms {
            *merged.entry(j).or_insert_with(Q::zero) += r;
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(j, r)| Term(j, r))
            .collect();
        if terms.is_empty() {
            Tail::Zero
        } else {
            Tail::Combination { terms }
        }
    }

    pub fn terms(&self) -> &[Term] {
        match self {
            Tail::Zero => &[],
            Tail::Combination { terms } => terms,
        }
    }

    /// `max |r_j|`.
    pub fn bound(&self) -> Q {
        self.terms()
            .iter()
            .map(|t| t.1.abs())
            .max()
            .unwrap_or_else(Q::zero)
    }

    fn combine(&self, other: &Tail, sign: &Q) -> Tail {
        Tail::from_terms(
            self.terms()
                .iter()
                .map(|t| (t.0, t.1.clone()))
                .chain(other.terms().iter().map(|t| (t.0, &t.1 * sign))),
        )
    }
}

/// A vector with exact coordinates on `[0, H)` and a symbolic tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereVector {
    #[serde(with = "numeric::pair_vec")]
    coords: Vec<Q>,
    tail: Tail,
}

impl SphereVector {
    pub fn new(coords: Vec<Q>, tail: Tail) -> Self {
        let tail = Tail::from_terms(tail.terms().iter().map(|t| (t.0, t.1.clone())));
        SphereVector { coords, tail }
    }

    pub fn zero(horizon: usize) -> Self {
        SphereVector {
            coords: vec![Q::zero(); horizon],
            tail: Tail::Zero,
        }
    }

    pub fn horizon(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_zero(&self) -> bool {
        self.tail == Tail::Zero && self.coords.iter().all(Zero::is_zero)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: SphereVector = serde_json::from_str(text)?;
        Ok(SphereVector::new(v.coords, v.tail))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    fn check_horizon(&self, other: &SphereVector) -> Result<()> {
        if self.horizon() != other.horizon() {
            return Err(Error::HorizonMismatch {
                left: self.horizon(),
                right: other.horizon(),
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &SphereVector) -> Result<SphereVector> {
        self.check_horizon(other)?;
        Ok(SphereVector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
            tail: self.tail.combine(&other.tail, &-numeric::qi(1)),
        })
    }

    pub fn add(&self, other: &SphereVector) -> Result<SphereVector> {
        self.check_horizon(other)?;
        Ok(SphereVector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
            tail: self.tail.combine(&other.tail, &numeric::qi(1)),
        })
    }

    pub fn scale(&self, c: &Q) -> SphereVector {
        SphereVector::new(
            self.coords.iter().map(|x| x * c).collect(),
            Tail::from_terms(self.tail.terms().iter().map(|t| (t.0, &t.1 * c))),
        )
    }

    /// `v / ‖v‖∞`; the zero vector is returned unchanged.
    pub fn normalize_sup(&self) -> SphereVector {
        let s = sup_norm(self);
        if s.is_zero() {
            self.clone()
        } else {
            self.scale(&s.recip())
        }
    }

    /// A rational multiple of `v` whose `‖·‖∞,2` norm is within `2^-bits` of 1.
    pub fn normalize_inf2(&self, bits: u32) -> Result<SphereVector> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        let norm = norm_inf2_bits(self, bits + 4);
        let c = numeric::dyadic_floor(&norm.midpoint().recip(), bits + 4 + norm_exponent(&norm));
        Ok(self.scale(&c))
    }
}

fn norm_exponent(x: &CertifiedReal) -> u32 {
    // Extra bits so the rounded scale factor keeps relative accuracy for large norms.
    let hi = x.hi().ceil().to_integer();
    hi.bits() as u32
}

/// Exact `max(|coords|, |tail coefficients|)`.
pub fn sup_norm(v: &SphereVector) -> Q {
    v.coords
        .iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Q::zero)
        .max(v.tail.bound())
}

/// Exact `Σ_{n<H} u(n) v(n) / 2^{n+1}`, computed over one common denominator.
pub fn weighted_dot(u: &[Q], v: &[Q]) -> Q {
    let h = u.len().min(v.len());
    let mut l = BigInt::one();
    for x in u[..h].iter().chain(&v[..h]) {
        if !x.is_zero() {
            l = l.lcm(x.denom());
        }
    }
    let mut acc = BigInt::zero();
    for n in 0..h {
        if u[n].is_zero() || v[n].is_zero() {
            continue;
        }
        let a = u[n].numer() * (&l / u[n].denom());
        let b = v[n].numer() * (&l / v[n].denom());
        acc += (a * b) << (h - n - 1);
    }
    Q::new(acc, (&l * &l) << h)
}

/// `[0, B² 2^-H]`, enclosing the weighted square sum beyond the horizon.
fn tail_enclosure(bound: &Q, horizon: usize) -> Q {
    bound * bound * numeric::pow2_neg(horizon as u32)
}

/// `‖T v‖` at a fixed working precision.
pub fn weighted_l2_bits(v: &SphereVector, bits: u32) -> CertifiedReal {
    let s = weighted_dot(&v.coords, &v.coords);
    let t = tail_enclosure(&v.tail.bound(), v.horizon());
    CertifiedReal::new(s.clone(), s + t).sqrt(bits)
}

/// `‖T v‖` with endpoints within the requested precision of the enclosure.
pub fn weighted_l2(v: &SphereVector, precision: &Precision) -> CertifiedReal {
    weighted_l2_bits(v, precision.grid_bits())
}

pub fn norm_inf2_bits(v: &SphereVector, bits: u32) -> CertifiedReal {
    weighted_l2_bits(v, bits).add(&CertifiedReal::exact(sup_norm(v)))
}

pub fn norm_inf2(v: &SphereVector, precision: &Precision) -> CertifiedReal {
    norm_inf2_bits(v, precision.grid_bits())
}

pub fn dist_inf(u: &SphereVector, v: &SphereVector) -> Result<Q> {
    Ok(sup_norm(&u.sub(v)?))
}

pub fn dist_inf2(u: &SphereVector, v: &SphereVector, precision: &Precision) -> Result<CertifiedReal> {
    Ok(norm_inf2(&u.sub(v)?, precision))
}

/// Which norm a distance is measured in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    Inf,
    Inf2,
}

/// Distance at a working precision (exact for the sup norm).
pub fn distance_bits(u: &SphereVector, v: &SphereVector, norm: Norm, bits: u32) -> Result<CertifiedReal> {
    let d = u.sub(v)?;
    Ok(match norm {
        Norm::Inf => CertifiedReal::exact(sup_norm(&d)),
        Norm::Inf2 => norm_inf2_bits(&d, bits),
    })
}

/// `‖u/α − v/β‖` for positive interval scalars `α`, `β`.
pub fn scaled_distance_bits(
    u: &SphereVector,
    alpha: &CertifiedReal,
    v: &SphereVector,
    beta: &CertifiedReal,
    norm: Norm,
    bits: u32,
) -> Result<CertifiedReal> {
    u.check_horizon(v)?;
    let guard = bits + 8;
    let ia = alpha.recip()?.round_outward(guard);
    let ib = beta.recip()?.round_outward(guard);
    let diff = |x: &Q, y: &Q| ia.scale(x).sub(&ib.scale(y)).abs();

    let mut sup = CertifiedReal::zero();
    for (x, y) in u.coords.iter().zip(&v.coords) {
        sup = sup.max(&diff(x, y));
    }
    let zero = Q::zero();
    let mut tail_sup = CertifiedReal::zero();
    let (tu, tv) = (u.tail.terms(), v.tail.terms());
    let members: std::collections::BTreeSet<usize> = tu.iter().chain(tv).map(|t| t.0).collect();
    for j in members {
        let cu = tu.iter().find(|t| t.0 == j).map_or(&zero, |t| &t.1);
        let cv = tv.iter().find(|t| t.0 == j).map_or(&zero, |t| &t.1);
        tail_sup = tail_sup.max(&diff(cu, cv));
    }
    sup = sup.max(&tail_sup).round_outward(guard);
    if norm == Norm::Inf {
        return Ok(sup);
    }

    let suu = weighted_dot(&u.coords, &u.coords);
    let suv = weighted_dot(&u.coords, &v.coords);
    let svv = weighted_dot(&v.coords, &v.coords);
    let quad = ia
        .square()
        .scale(&suu)
        .sub(&ia.mul(&ib).scale(&(suv * numeric::qi(2))))
        .add(&ib.square().scale(&svv));
    let lo = if quad.lo().is_negative() { Q::zero() } else { quad.lo().clone() };
    let hi = quad.hi() + tail_enclosure(tail_sup.hi(), u.horizon());
    let hi = if hi < lo { lo.clone() } else { hi };
    let l2 = CertifiedReal::new(lo, hi).sqrt(bits);
    Ok(sup.add(&l2).round_outward(guard))
}

/// Distance between `u/‖u‖` and `v/‖v‖` in the chosen norm.
pub fn normalized_distance_bits(u: &SphereVector, v: &SphereVector, norm: Norm, bits: u32) -> Result<CertifiedReal> {
    let (nu, nv) = match norm {
        Norm::Inf => (CertifiedReal::exact(sup_norm(u)), CertifiedReal::exact(sup_norm(v))),
        Norm::Inf2 => (norm_inf2_bits(u, bits + 8), norm_inf2_bits(v, bits + 8)),
    };
    scaled_distance_bits(u, &nu, v, &nv, norm, bits)
}

/// Evaluates at increasing precision until `test` decides; errors with the
/// last interval if it never does.
pub fn certify(
    start_bits: u32,
    context: impl Fn() -> String,
    mut eval: impl FnMut(u32) -> Result<CertifiedReal>,
    test: impl Fn(&CertifiedReal) -> Decision,
) -> Result<(bool, CertifiedReal)> {
    let mut bits = start_bits.max(16);
    loop {
        let value = eval(bits)?;
        match test(&value) {
            Decision::True => return Ok((true, value)),
            Decision::False => return Ok((false, value)),
            Decision::Undecided if bits < MAX_BITS => bits = (bits * 2).min(MAX_BITS),
            Decision::Undecided => return Err(value.undecided(context())),
        }
    }
}

/// Evaluates at increasing precision until the width is at most `width`.
pub fn refine_to_width(
    start_bits: u32,
    width: &Q,
    mut eval: impl FnMut(u32) -> Result<CertifiedReal>,
) -> Result<CertifiedReal> {
    let mut bits = start_bits.max(16);
    loop {
        let value = eval(bits)?;
        if &value.width() <= width || bits >= MAX_BITS {
            return Ok(value);
        }
        bits = (bits * 2).min(MAX_BITS);
    }
}
