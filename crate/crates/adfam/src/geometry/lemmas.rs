//! The quantitative renorming inequalities as checkable predicates.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{
    certify, cond_from_function, cond_from_limits, dist_inf, f_of, norm_inf2_bits,
    normalized_distance_bits, refine_to_width, sup_norm, weighted_l2_bits, Norm, SphereVector,
};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::numeric::{self, CertifiedReal, Decision, Precision, Q};
use crate::order::{self, Condition};

/// Both sides of an inequality `lhs ≤ rhs` (or `lhs ≥ rhs`) with the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub lhs: CertifiedReal,
    pub rhs: CertifiedReal,
    pub holds: bool,
}

/// Decides `lhs ≤ rhs + slack`, refining until the intervals separate.
fn certify_le(
    precision: &Precision,
    context: &str,
    mut eval: impl FnMut(u32) -> Result<(CertifiedReal, CertifiedReal)>,
) -> Result<LemmaCheck> {
    let slack = precision.value().clone();
    let mut sides = None;
    let (holds, _) = certify(
        precision.grid_bits(),
        || context.to_string(),
        |bits| {
            let (l, r) = eval(bits)?;
            let gap = r.sub(&l);
            sides = Some((l, r));
            Ok(gap)
        },
        |gap| {
            if gap.lo() >= &-&slack {
                Decision::True
            } else if gap.hi().is_negative() {
                Decision::False
            } else {
                Decision::Undecided
            }
        },
    )?;
    let (lhs, rhs) = sides.expect("evaluated at least once");
    Ok(LemmaCheck { lhs, rhs, holds })
}

fn norm_bits(v: &SphereVector, norm: Norm, bits: u32) -> CertifiedReal {
    match norm {
        Norm::Inf => CertifiedReal::exact(sup_norm(v)),
        Norm::Inf2 => norm_inf2_bits(v, bits),
    }
}

/// `‖x−x′‖ ≤ b ‖x/‖x‖ − x′/‖x′‖‖ + (b−a)` with `a ≤ b` the two norms,
/// required to lie in `(0, 1)`.
pub fn spheres_check(x: &SphereVector, y: &SphereVector, norm: Norm, precision: &Precision) -> Result<LemmaCheck> {
    let bits = precision.grid_bits();
    let (nx, ny) = (norm_bits(x, norm, bits), norm_bits(y, norm, bits));
    if !nx.lo().is_positive() || !ny.lo().is_positive() || nx.hi() >= &numeric::qi(1) || ny.hi() >= &numeric::qi(1) {
        return Err(Error::Precondition("norms must lie strictly between 0 and 1".into()));
    }
    let (small, large) = if nx.midpoint() <= ny.midpoint() { (x, y) } else { (y, x) };
    certify_le(precision, "sphere inequality", |bits| {
        let a = norm_bits(small, norm, bits + 8);
        let b = norm_bits(large, norm, bits + 8);
        let lhs = super::distance_bits(small, large, norm, bits)?;
        let d = super::scaled_distance_bits(small, &a, large, &b, norm, bits)?;
        let rhs = b.mul(&d).add(&b.sub(&a));
        Ok((lhs, rhs))
    })
}

/// For sup-unit `x`, `x′` with `‖x−x′‖∞ = 2−ε′` and `‖T x‖, ‖T x′‖ ≤ 1−δ`:
/// the `∞,2`-normalized distance is at least `2/(2−δ) − ε′`.
pub fn symptom_renorm_check(x: &SphereVector, y: &SphereVector, delta: &Q, precision: &Precision) -> Result<LemmaCheck> {
    let one = numeric::qi(1);
    if sup_norm(x) != one || sup_norm(y) != one {
        return Err(Error::Precondition("vectors must have sup norm 1".into()));
    }
    if !delta.is_positive() || delta >= &one {
        return Err(Error::InvalidArgument("δ must lie in (0, 1)".into()));
    }
    let cap = &one - delta;
    for v in [x, y] {
        let (ok, t) = certify(
            precision.grid_bits(),
            || "T-norm against 1-δ".into(),
            |bits| Ok(weighted_l2_bits(v, bits)),
            |t| t.le(&cap),
        )?;
        if !ok {
            return Err(Error::Precondition(format!("T-norm {t:?} exceeds 1-δ")));
        }
    }
    let eps_prime = numeric::qi(2) - dist_inf(x, y)?;
    let bound = numeric::qi(2) / (numeric::qi(2) - delta) - eps_prime;
    let check = certify_le(precision, "renormed separation", |bits| {
        let d = normalized_distance_bits(x, y, Norm::Inf2, bits)?;
        // lhs ≤ rhs form: bound ≤ distance.
        Ok((CertifiedReal::exact(bound.clone()), d))
    })?;
    Ok(LemmaCheck {
        lhs: check.rhs,
        rhs: check.lhs,
        holds: check.holds,
    })
}

/// Result of the lower bound for incompatible conditions avoiding `{0, …, m}`.
#[derive(Clone, Debug, Serialize)]
pub struct RenormCheck {
    pub m: usize,
    #[serde(with = "numeric::pair")]
    pub bound: Q,
    pub distance: CertifiedReal,
    pub holds: bool,
}

/// Largest interval width reported by [`renorm_separation_check`].
pub fn renorm_width(precision: &Precision) -> Q {
    precision.value().clone()
}

/// Certifies `‖f_p/‖f_p‖ − f_q/‖f_q‖‖∞,2 ≥ 2 − 2/(m+1)`.
pub fn renorm_separation_check(p: &Condition, q: &Condition, m: usize, precision: &Precision) -> Result<RenormCheck> {
    if order::compatible(p, q)? {
        return Err(Error::Precondition("conditions are compatible".into()));
    }
    for (name, c) in [("p", p), ("q", q)] {
        if c.support().min_elem().is_some_and(|x| x <= m) {
            return Err(Error::Precondition(format!("{name} meets {{0, …, {m}}}")));
        }
    }
    let bound = numeric::qi(2) - numeric::q(2, m as i64 + 1);
    let (fp, fq) = (f_of(p), f_of(q));
    let (holds, _) = certify(
        precision.grid_bits(),
        || format!("renormed distance against {}", numeric::decimal(&bound, 12)),
        |bits| normalized_distance_bits(&fp, &fq, Norm::Inf2, bits),
        |d| d.ge(&bound),
    )?;
    let distance = refine_to_width(precision.grid_bits(), precision.value(), |bits| {
        normalized_distance_bits(&fp, &fq, Norm::Inf2, bits)
    })?;
    Ok(RenormCheck {
        m,
        bound,
        distance,
        holds,
    })
}

/// `A_{p[f,ε]} ⊆ A_{p(f,ε)}` and `B_{p[f,ε]} ⊆ B_{p(f,ε)}`, for `ε < 1/3`.
pub fn two_conditions_check(family: &Family, f: &SphereVector, eps: &Q) -> Result<bool> {
    if eps >= &numeric::q(1, 3) {
        return Err(Error::InvalidArgument("ε must be below 1/3".into()));
    }
    let limits = cond_from_limits(family, f, eps)?;
    let thresholds = cond_from_function(family, f, eps)?;
    Ok(limits.a_set().is_subset(thresholds.a_set())
        && limits.b_set().is_subset(thresholds.b_set())
        && limits.a().is_subset(thresholds.a())
        && limits.b().is_subset(thresholds.b()))
}

/// If `p(f,ε)` and `p(g,ε)` are compatible then `‖f−g‖∞ ≤ 1+ε`.
/// Returns `None` when the premise fails.
pub fn function_distance_check(family: &Family, f: &SphereVector, g: &SphereVector, eps: &Q) -> Result<Option<bool>> {
    let pf = cond_from_function(family, f, eps)?;
    let pg = cond_from_function(family, g, eps)?;
    if !order::compatible(&pf, &pg)? {
        return Ok(None);
    }
    Ok(Some(dist_inf(f, g)? <= numeric::qi(1) + eps))
}

/// `‖T v‖ ≤ 2^{-(m+1)/2}·sup` bound for vectors vanishing on `{0, …, m}`;
/// returns the certified T-norm and whether it respects `1/m`.
pub fn t_norm_small(v: &SphereVector, m: usize, precision: &Precision) -> Result<(CertifiedReal, bool)> {
    if v.coords().iter().take(m + 1).any(|x| !x.is_zero()) {
        return Err(Error::Precondition(format!("vector does not vanish on {{0, …, {m}}}")));
    }
    let t = weighted_l2_bits(v, precision.grid_bits());
    let ok = m == 0 || t.hi() <= &(sup_norm(v) * numeric::q(1, m as i64));
    Ok((t, ok))
}
