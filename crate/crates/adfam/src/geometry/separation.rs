//! Separated subsets, small-diameter covers, and the cells of the renormed sphere.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    certify, distance_bits, norm_inf2_bits, sup_norm, weighted_l2_bits, Norm, SphereVector,
};
use crate::error::{Error, Result};
use crate::graph::{self, Cover, Found, SearchMode};
use crate::numeric::{self, CertifiedReal, Decision, Precision, Q};
use crate::search::Adjacency;

/// How a pairwise distance is compared with a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    AtLeast,
    Greater,
    AtMost,
    Less,
}

impl Cmp {
    fn decide(self, d: &CertifiedReal, t: &Q) -> Decision {
        match self {
            Cmp::AtLeast => d.ge(t),
            Cmp::Greater => d.gt(t),
            Cmp::AtMost => d.le(t),
            Cmp::Less => d.lt(t),
        }
    }
}

/// Certified `dist(u, v) ⋈ t`, refining the precision as needed.
pub fn compare_distance(
    u: &SphereVector,
    v: &SphereVector,
    norm: Norm,
    cmp: Cmp,
    t: &Q,
    precision: &Precision,
) -> Result<bool> {
    certify(
        precision.grid_bits(),
        || format!("distance {cmp:?} {}", numeric::decimal(t, 12)),
        |bits| distance_bits(u, v, norm, bits),
        |d| cmp.decide(d, t),
    )
    .map(|(b, _)| b)
}

/// Graph on `vectors` with an edge where `dist ⋈ t` holds.
pub fn threshold_graph(
    vectors: &[SphereVector],
    norm: Norm,
    cmp: Cmp,
    t: &Q,
    precision: &Precision,
) -> Result<Adjacency> {
    let n = vectors.len();
    let rows: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        return Ok(false);
                    }
                    compare_distance(&vectors[i], &vectors[j], norm, cmp, t, precision).map_err(|e| match e {
                        Error::Undecided { context, lo, hi } => Error::Undecided {
                            context: format!("pair ({i}, {j}): {context}"),
                            lo,
                            hi,
                        },
                        other => other,
                    })
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Adjacency::from_fn(n, |i, j| rows[i][j]))
}

/// Largest subset with pairwise distance `≥ t` (or `> t` when strict).
pub fn separated_subset(
    vectors: &[SphereVector],
    threshold: &Q,
    strict: bool,
    norm: Norm,
    precision: &Precision,
    mode: SearchMode,
) -> Result<Found> {
    let cmp = if strict { Cmp::Greater } else { Cmp::AtLeast };
    let g = threshold_graph(vectors, norm, cmp, threshold, precision)?;
    graph::max_clique(&g, mode)
}

/// Colors so every class has pairwise distance `≤ bound` (or `< bound` when strict).
pub fn diameter_cover(
    vectors: &[SphereVector],
    bound: &Q,
    strict: bool,
    norm: Norm,
    precision: &Precision,
) -> Result<Cover> {
    let cmp = if strict { Cmp::AtLeast } else { Cmp::Greater };
    let conflicts = threshold_graph(vectors, norm, cmp, bound, precision)?;
    graph::cover_by_independent_sets(&conflicts)
}

/// Pairwise distances, exact for the sup norm and certified for `∞,2`.
pub fn distance_matrix(
    vectors: &[SphereVector],
    norm: Norm,
    precision: &Precision,
) -> Result<Vec<Vec<CertifiedReal>>> {
    let bits = precision.grid_bits();
    let n = vectors.len();
    let upper: Vec<Vec<CertifiedReal>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j <= i {
                        Ok(CertifiedReal::zero())
                    } else {
                        distance_bits(&vectors[i], &vectors[j], norm, bits)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| if j < i { upper[j][i].clone() } else { upper[i][j].clone() })
                .collect()
        })
        .collect())
}

/// Largest `k` tried when placing a vector in a cell.
pub const MAX_CELL_K: u32 = 64;

/// A cell `i/4k ≤ ‖x‖∞ ≤ (i+1)/4k`, `‖T x‖ > 1/k`, with constant `c = 1/k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub k: u32,
    pub i: u32,
    #[serde(with = "numeric::pair")]
    pub c: Q,
}

/// Cell labels plus the same-cell pair checks of the shrinking inequality.
#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub cells: Vec<Cell>,
    pub checked_pairs: usize,
    pub violations: Vec<(usize, usize)>,
}

/// Same-cell pairs checked per report.
pub const CELL_PAIR_CAP: usize = 5000;

/// Places each vector of the renormed unit sphere in its least cell and checks
/// `‖x−x′‖∞ ≤ (1−c)‖x/‖x‖∞ − x′/‖x′‖∞‖∞ + c/4` for same-cell pairs.
pub fn sphere_cells(vectors: &[SphereVector], precision: &Precision) -> Result<CellReport> {
    let eps = precision.value();
    let one = numeric::qi(1);
    let cells = vectors
        .par_iter()
        .enumerate()
        .map(|(idx, v)| {
            let n = norm_inf2_bits(v, precision.grid_bits());
            if n.lo() < &(&one - eps) || n.hi() > &(&one + eps) {
                return Err(Error::Precondition(format!(
                    "vector {idx} is not on the renormed unit sphere: {n:?}"
                )));
            }
            cell_of(v, precision).map_err(|e| match e {
                Error::Undecided { lo, hi, .. } => Error::Undecided {
                    context: format!("vector {idx}: no cell up to k = {MAX_CELL_K}"),
                    lo,
                    hi,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<Cell>>>()?;
    let mut checked = 0;
    let mut violations = Vec::new();
    'outer: for x in 0..vectors.len() {
        for y in x + 1..vectors.len() {
            if cells[x] != cells[y] {
                continue;
            }
            if checked == CELL_PAIR_CAP {
                break 'outer;
            }
            checked += 1;
            if !squizing_holds(&vectors[x], &vectors[y], &cells[x].c, eps)? {
                violations.push((x, y));
            }
        }
    }
    Ok(CellReport {
        cells,
        checked_pairs: checked,
        violations,
    })
}

fn cell_of(v: &SphereVector, precision: &Precision) -> Result<Cell> {
    let s = sup_norm(v);
    let mut last = CertifiedReal::zero();
    for k in 1..=MAX_CELL_K {
        let bound = numeric::q(1, k as i64);
        let verdict = certify(
            precision.grid_bits(),
            String::new,
            |bits| Ok(weighted_l2_bits(v, bits)),
            |t| t.gt(&bound),
        );
        match verdict {
            Ok((true, _)) => {
                let four_k = 4 * k as i64;
                if let Some(i) = (0..=4 * k - 2).find(|&i| {
                    numeric::q(i as i64, four_k) <= s && s <= numeric::q(i as i64 + 1, four_k)
                }) {
                    return Ok(Cell { k, i, c: bound });
                }
            }
            Ok((false, t)) => last = t,
            Err(Error::Undecided { .. }) => last = weighted_l2_bits(v, super::MAX_BITS),
            Err(e) => return Err(e),
        }
    }
    Err(last.undecided("cell"))
}

/// Exact sup-norm check of the shrinking inequality with additive `slack`.
pub fn squizing_holds(x: &SphereVector, y: &SphereVector, c: &Q, slack: &Q) -> Result<bool> {
    let lhs = sup_norm(&x.sub(y)?);
    let nx = x.normalize_sup();
    let ny = y.normalize_sup();
    let rhs = (numeric::qi(1) - c) * sup_norm(&nx.sub(&ny)?) + c / numeric::qi(4);
    Ok(lhs <= rhs + slack)
}
