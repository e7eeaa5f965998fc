//! Exact rationals and certified real intervals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `2^-k` as an exact rational.
pub fn pow2_neg(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Largest multiple of `2^-bits` that is `≤ x`.
pub fn dyadic_floor(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits as usize;
    let n = (x.numer() * &scale).div_floor(x.denom());
    Q::new(n, scale)
}

/// Smallest multiple of `2^-bits` that is `≥ x`.
pub fn dyadic_ceil(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits as usize;
    let n = (x.numer() * &scale).div_ceil(x.denom());
    Q::new(n, scale)
}

/// Lower and upper dyadic bounds on `√x`, each within `2^-bits` of it.
pub fn sqrt_bounds(x: &Q, bits: u32) -> (Q, Q) {
    assert!(!x.is_negative(), "square root of a negative rational");
    if let Some(r) = exact_sqrt(x) {
        return (r.clone(), r);
    }
    let scale4 = BigInt::one() << (2 * bits as usize);
    let scaled = x * Q::from_integer(scale4);
    let lo_int = to_biguint(&scaled.floor().to_integer());
    let hi_int = to_biguint(&scaled.ceil().to_integer());
    let lo_root = lo_int.sqrt();
    let mut hi_root = hi_int.sqrt();
    if &hi_root * &hi_root < hi_int {
        hi_root += 1u32;
    }
    let den = BigInt::one() << bits as usize;
    (
        Q::new(BigInt::from(lo_root), den.clone()),
        Q::new(BigInt::from(hi_root), den),
    )
}

/// `√x` when `x` is the square of a rational.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    let n = to_biguint(x.numer());
    let d = to_biguint(x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == n && &rd * &rd == d).then(|| Q::new(BigInt::from(rn), BigInt::from(rd)))
}

fn to_biguint(n: &BigInt) -> BigUint {
    n.to_biguint().expect("nonnegative integer")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("not a finite number: {x}")))
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `1e-6` or `0.25`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Q::from_integer(n));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Q::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-shift) as usize))
    })
}

/// Renders a rational as a fixed-point decimal with `digits` places (truncated toward −∞).
pub fn decimal(x: &Q, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let n = (x.numer() * &scale).div_floor(x.denom());
    let (sign, mag) = if n.sign() == Sign::Minus {
        ("-", -n)
    } else {
        ("", n)
    };
    let (int, frac) = mag.div_rem(&scale);
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
}

/// Three-valued outcome of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    True,
    False,
    Undecided,
}

impl Decision {
    pub fn is_true(self) -> bool {
        self == Decision::True
    }
}

/// Closed rational interval `[lo, hi]` known to contain a real value.
#[derive(Clone, PartialEq, Eq)]
pub struct CertifiedReal {
    lo: Q,
    hi: Q,
}

impl CertifiedReal {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "empty interval");
        CertifiedReal { lo, hi }
    }

    pub fn exact(x: Q) -> Self {
        CertifiedReal {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        CertifiedReal::exact(Q::zero())
    }

    pub fn lo(&self) -> &Q {
        &self.lo
    }

    pub fn hi(&self) -> &Q {
        &self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, o: &CertifiedReal) -> CertifiedReal {
        CertifiedReal::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &CertifiedReal) -> CertifiedReal {
        CertifiedReal::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> CertifiedReal {
        CertifiedReal::new(-&self.hi, -&self.lo)
    }

    pub fn scale(&self, c: &Q) -> CertifiedReal {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            CertifiedReal::new(a, b)
        } else {
            CertifiedReal::new(b, a)
        }
    }

    pub fn mul(&self, o: &CertifiedReal) -> CertifiedReal {
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        CertifiedReal::new(lo, hi)
    }

    pub fn square(&self) -> CertifiedReal {
        let a = self.abs();
        CertifiedReal::new(&a.lo * &a.lo, &a.hi * &a.hi)
    }

    /// `1/x`; fails if the interval touches zero.
    pub fn recip(&self) -> Result<CertifiedReal> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(Error::Undecided {
                context: "reciprocal of an interval containing 0".into(),
                lo: self.lo.to_string(),
                hi: self.hi.to_string(),
            });
        }
        Ok(CertifiedReal::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn abs(&self) -> CertifiedReal {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            CertifiedReal::new(Q::zero(), (-&self.lo).max(self.hi.clone()))
        }
    }

    pub fn max(&self, o: &CertifiedReal) -> CertifiedReal {
        CertifiedReal::new(
            (&self.lo).max(&o.lo).clone(),
            (&self.hi).max(&o.hi).clone(),
        )
    }

    /// Certified square root, each endpoint within `2^-bits`.
    pub fn sqrt(&self, bits: u32) -> CertifiedReal {
        let lo = if self.lo.is_positive() {
            sqrt_bounds(&self.lo, bits).0
        } else {
            Q::zero()
        };
        let hi = if self.hi.is_positive() {
            sqrt_bounds(&self.hi, bits).1
        } else {
            Q::zero()
        };
        CertifiedReal::new(lo, hi)
    }

    /// Widens the endpoints outward onto the `2^-bits` grid.
    pub fn round_outward(&self, bits: u32) -> CertifiedReal {
        CertifiedReal::new(dyadic_floor(&self.lo, bits), dyadic_ceil(&self.hi, bits))
    }

    pub fn cmp_rational(&self, x: &Q) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn ge(&self, x: &Q) -> Decision {
        if &self.lo >= x {
            Decision::True
        } else if &self.hi < x {
            Decision::False
        } else {
            Decision::Undecided
        }
    }

    pub fn gt(&self, x: &Q) -> Decision {
        if &self.lo > x {
            Decision::True
        } else if &self.hi <= x {
            Decision::False
        } else {
            Decision::Undecided
        }
    }

    pub fn le(&self, x: &Q) -> Decision {
        self.neg().ge(&-x)
    }

    pub fn lt(&self, x: &Q) -> Decision {
        self.neg().gt(&-x)
    }

    pub fn undecided(&self, context: impl Into<String>) -> Error {
        Error::Undecided {
            context: context.into(),
            lo: decimal(&self.lo, 12),
            hi: decimal(&self.hi, 12),
        }
    }
}

impl fmt::Debug for CertifiedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", decimal(&self.lo, 12), decimal(&self.hi, 12))
    }
}

/// Requested absolute precision for certified square roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Precision(Q);

impl Precision {
    pub fn new(eps: Q) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        Ok(Precision(eps))
    }

    /// `2^-bits` precision.
    pub fn bits(bits: u32) -> Self {
        Precision(pow2_neg(bits))
    }

    pub fn value(&self) -> &Q {
        &self.0
    }

    /// Grid bits making two endpoint roundings fit in the requested width.
    pub fn grid_bits(&self) -> u32 {
        let mut k = 1u32;
        while pow2_neg(k) * qi(2) > self.0 {
            k += 1;
        }
        k
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(pow2_neg(40))
    }
}

/// Serde adapter writing a rational as `[num, den]`, with integers that do not
/// fit in `i64` written as decimal strings.
pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalPair::from(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        RationalPair::deserialize(d).and_then(|p| p.to_q().map_err(de::Error::custom))
    }
}

/// Rational as a two-element JSON array.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPair(pub BigInt, pub BigInt);

impl From<&Q> for RationalPair {
    fn from(x: &Q) -> Self {
        RationalPair(x.numer().clone(), x.denom().clone())
    }
}

impl RationalPair {
    pub fn to_q(&self) -> std::result::Result<Q, String> {
        if self.1.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Q::new(self.0.clone(), self.1.clone()))
    }
}

fn int_to_json<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

struct JsonInt(BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        int_to_json(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(BigInt::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonInt, E> {
                v.parse().map(JsonInt).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for RationalPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (JsonInt(self.0.clone()), JsonInt(self.1.clone())).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RationalPair;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [numerator, denominator] pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<RationalPair, A::Error> {
                let n: JsonInt = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let d: JsonInt = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                Ok(RationalPair(n.0, d.0))
            }
        }
        d.deserialize_seq(V)
    }
}

/// Serde adapter for `Vec<Q>` as a list of pairs.
pub mod pair_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(RationalPair::from))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let pairs = Vec::<RationalPair>::deserialize(d)?;
        pairs
            .iter()
            .map(|p| p.to_q().map_err(de::Error::custom))
            .collect()
    }
}

/// Serializes a certified interval as `{"lo": [n,d], "hi": [n,d], "lo_decimal": .., "hi_decimal": ..}`.
impl Serialize for CertifiedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CertifiedReal", 4)?;
        st.serialize_field("lo", &RationalPair::from(&self.lo))?;
        st.serialize_field("hi", &RationalPair::from(&self.hi))?;
        st.serialize_field("lo_decimal", &decimal(&self.lo, 12))?;
        st.serialize_field("hi_decimal", &decimal(&self.hi, 12))?;
        st.end()
    }
}
