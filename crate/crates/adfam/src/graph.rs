//! The graph on label pairs `(a, b)` and the clique/independent-set engines
//! that mirror centered sets and antichains of the splitting order.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::Family;
use crate::order::{self, Condition, Labels};
use crate::search::{self, Adjacency};
use crate::sets;

/// Vertex `(a, b)` with `a ∩ b = ∅`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub a: Labels,
    pub b: Labels,
}

impl Vertex {
    pub fn new(a: Labels, b: Labels) -> Result<Self> {
        if let Some(&i) = a.intersection(&b).next() {
            return Err(Error::LabelOverlap { index: i });
        }
        Ok(Vertex { a, b })
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &Labels| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.a), join(&self.b))
    }
}

/// What an edge records.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Edge iff the two conditions are compatible.
    #[default]
    Compatible,
    /// Edge iff the join of the two vertices is nonempty.
    #[serde(rename = "join_nonempty", alias = "join")]
    #[value(alias = "join-nonempty")]
    Join,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Compatible => "compatible",
            Convention::Join => "join_nonempty",
        })
    }
}

/// Label pair of a condition.
pub fn vertex_of(p: &Condition) -> Vertex {
    Vertex {
        a: p.a().clone(),
        b: p.b().clone(),
    }
}

/// `(⋃a ∖ ⋃b, ⋃b ∖ ⋃a)` as a condition with the same labels.
pub fn condition_of(family: &Family, v: &Vertex) -> Result<Condition> {
    let ua = family.union_of(&v.a);
    let ub = family.union_of(&v.b);
    let a_set = &ua - &ub;
    let b_set = &ub - &ua;
    let gens: Vec<usize> = v.a.iter().chain(&v.b).copied().collect();
    let m = family.bound_among(&gens);
    order::make_condition(family, v.a.clone(), v.b.clone(), m, a_set.below(m), b_set.below(m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderGraph {
    pub vertices: Vec<Vertex>,
    pub adjacency: Adjacency,
    pub convention: Convention,
}

impl OrderGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn build_graph(family: &Family, vertices: &[Vertex], convention: Convention) -> Result<OrderGraph> {
    let n = vertices.len();
    let rows: Vec<Vec<bool>> = match convention {
        Convention::Compatible => {
            let conds = vertices
                .iter()
                .map(|v| condition_of(family, v))
                .collect::<Result<Vec<_>>>()?;
            (0..n)
                .into_par_iter()
                .map(|i| (0..n).map(|j| j > i && order::compatible_unchecked(&conds[i], &conds[j])).collect())
                .collect()
        }
        Convention::Join => {
            let unions: Vec<_> = vertices
                .iter()
                .map(|v| (family.union_of(&v.a), family.union_of(&v.b)))
                .collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            j > i && {
                                let (a, b) = &unions[i];
                                let (c, d) = &unions[j];
                                !sets::join(a, b, c, d).expect("one horizon").is_empty()
                            }
                        })
                        .collect()
                })
                .collect()
        }
    };
    Ok(OrderGraph {
        vertices: vertices.to_vec(),
        adjacency: Adjacency::from_fn(n, |i, j| rows[i][j]),
        convention,
    })
}

/// Which engine a search used.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Exact when the size permits, greedy otherwise.
    #[default]
    Auto,
    Exact,
    Heuristic,
}

/// Largest graph accepted by the heuristic engines.
pub const HEURISTIC_LIMIT: usize = 10_000;

/// A vertex set with the engine that produced it. For heuristic results the
/// size is a lower bound only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Found {
    pub vertices: Vec<usize>,
    pub exact: bool,
}

pub fn max_clique(g: &Adjacency, mode: SearchMode) -> Result<Found> {
    if g.len() > HEURISTIC_LIMIT {
        return Err(Error::SizeLimit {
            size: g.len(),
            limit: HEURISTIC_LIMIT,
        });
    }
    let exact = match mode {
        SearchMode::Exact => true,
        SearchMode::Heuristic => false,
        SearchMode::Auto => g.len() <= search::EXACT_CLIQUE_LIMIT,
    };
    let vertices = if exact {
        search::max_clique_exact(g)?
    } else {
        search::max_clique_greedy(g)
    };
    if !g.is_clique(&vertices) {
        return Err(Error::Construction("clique search returned a non-clique".into()));
    }
    Ok(Found { vertices, exact })
}

pub fn max_independent_set(g: &Adjacency, mode: SearchMode) -> Result<Found> {
    let found = max_clique(&g.complement(), mode)?;
    if !g.is_independent(&found.vertices) {
        return Err(Error::Construction("independent-set search returned an edge".into()));
    }
    Ok(found)
}

/// Class per vertex and whether the class count is optimal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub colors: Vec<usize>,
    pub exact: bool,
}

impl Cover {
    pub fn class_count(&self) -> usize {
        self.colors.iter().max().map_or(0, |c| c + 1)
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        search::classes(&self.colors)
    }
}

fn color(g: &Adjacency) -> Result<Cover> {
    let exact = g.len() <= search::EXACT_COLOR_LIMIT;
    let colors = if exact {
        search::color_exact(g)?
    } else {
        search::color_dsatur(g)
    };
    if !g.is_proper_coloring(&colors) {
        return Err(Error::Construction("coloring is not proper".into()));
    }
    Ok(Cover { colors, exact })
}

/// Partition into cliques (a proper coloring of the complement).
pub fn cover_by_cliques(g: &Adjacency) -> Result<Cover> {
    color(&g.complement())
}

pub fn cover_by_independent_sets(g: &Adjacency) -> Result<Cover> {
    color(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Dot,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown graph format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(rename = "edge_means", alias = "convention")]
    convention: Convention,
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<u8>>,
}

pub fn export_graph(g: &OrderGraph, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Dot => {
            let mut out = format!("graph G {{\n  // edge_means={}\n", g.convention);
            for (i, v) in g.vertices.iter().enumerate() {
                out.push_str(&format!("  {i} [label=\"{v}\"];\n"));
            }
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    if g.adjacency.has_edge(i, j) {
                        out.push_str(&format!("  {i} -- {j};\n"));
                    }
                }
            }
            out.push_str("}\n");
            Ok(out)
        }
        ExportFormat::Json => {
            let file = GraphFile {
                convention: g.convention,
                vertices: g.vertices.clone(),
                adjacency: (0..g.len())
                    .map(|i| (0..g.len()).map(|j| g.adjacency.has_edge(i, j) as u8).collect())
                    .collect(),
            };
            Ok(serde_json::to_string_pretty(&file)? + "\n")
        }
    }
}

pub fn import_graph_json(text: &str) -> Result<OrderGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    let n = file.vertices.len();
    if file.adjacency.len() != n || file.adjacency.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("adjacency matrix has the wrong shape".into()));
    }
    for i in 0..n {
        if file.adjacency[i][i] != 0 {
            return Err(Error::InvalidArgument(format!("self-loop at vertex {i}")));
        }
        for j in 0..n {
            if file.adjacency[i][j] != file.adjacency[j][i] || file.adjacency[i][j] > 1 {
                return Err(Error::InvalidArgument(format!("asymmetric entry ({i}, {j})")));
            }
        }
    }
    for v in &file.vertices {
        Vertex::new(v.a.clone(), v.b.clone())?;
    }
    Ok(OrderGraph {
        adjacency: Adjacency::from_fn(n, |i, j| file.adjacency[i][j] == 1),
        vertices: file.vertices,
        convention: file.convention,
    })
}

/// Every vertex `(a, b)` with `a, b ⊆ {0..members}` disjoint, in a fixed order.
pub fn all_vertices(members: usize) -> Vec<Vertex> {
    let mut out = Vec::new();
    // Each member is outside, in a, or in b.
    let total = 3usize.pow(members as u32);
    for mut code in 0..total {
        let (mut a, mut b) = (Labels::new(), Labels::new());
        for i in 0..members {
            match code % 3 {
                1 => {
                    a.insert(i);
                }
                2 => {
                    b.insert(i);
                }
                _ => {}
            }
            code /= 3;
        }
        out.push(Vertex { a, b });
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_shapes() {
        let v = |a: &[usize], b: &[usize]| Vertex::new(a.iter().copied().collect(), b.iter().copied().collect()).unwrap();
        let g = OrderGraph {
            vertices: vec![v(&[0], &[1]), v(&[2], &[])],
            adjacency: Adjacency::from_fn(2, |_, _| true),
            convention: Convention::Compatible,
        };
        let dot = export_graph(&g, ExportFormat::Dot).unwrap();
        assert!(dot.contains("label=\"0|1\"") && dot.contains("0 -- 1;"));
        let empty = OrderGraph {
            vertices: vec![],
            adjacency: Adjacency::empty(0),
            convention: Convention::Join,
        };
        assert_eq!(
            export_graph(&empty, ExportFormat::Dot).unwrap(),
            "graph G {\n  // edge_means=join_nonempty\n}\n"
        );
        assert_eq!(all_vertices(2).len(), 9);
    }
}
