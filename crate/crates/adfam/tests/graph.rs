mod common;

use std::collections::BTreeSet;

use adfam::families;
use adfam::graph::{self, Convention, ExportFormat, SearchMode, Vertex};
use adfam::search::{self, Adjacency};
use adfam::Error;
use proptest::prelude::*;

fn random_graph(n: usize, density: u8, seed: u64) -> Adjacency {
    let mut state = seed | 1;
    Adjacency::from_fn(n, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % 100) < u64::from(density)
    })
}

fn matrix(g: &Adjacency) -> Vec<Vec<bool>> {
    (0..g.len()).map(|i| (0..g.len()).map(|j| g.has_edge(i, j)).collect()).collect()
}

fn brute_chromatic(g: &Adjacency) -> usize {
    let n = g.len();
    if n == 0 {
        return 0;
    }
    (1..=n)
        .find(|&k| {
            (0..k.pow(n as u32)).any(|mut code| {
                let colors: Vec<usize> = (0..n)
                    .map(|_| {
                        let c = code % k;
                        code /= k;
                        c
                    })
                    .collect();
                g.is_proper_coloring(&colors)
            })
        })
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_engines_match_enumeration(n in 0usize..=16, density in 0u8..=100, seed in any::<u64>()) {
        let g = random_graph(n, density, seed);
        let adj = matrix(&g);
        let clique = common::brute_max(n, |s| common::elems(s).all(|x| common::elems(s).all(|y| x == y || adj[x][y])));
        let indep = common::brute_max(n, |s| common::elems(s).all(|x| common::elems(s).all(|y| !adj[x][y])));
        let c = graph::max_clique(&g, SearchMode::Exact).unwrap();
        let i = graph::max_independent_set(&g, SearchMode::Exact).unwrap();
        prop_assert!(c.exact && g.is_clique(&c.vertices));
        prop_assert_eq!(c.vertices.len(), clique);
        prop_assert_eq!(i.vertices.len(), indep);
        let greedy = graph::max_clique(&g, SearchMode::Heuristic).unwrap();
        prop_assert!(!greedy.exact && greedy.vertices.len() <= clique);
    }

    #[test]
    fn exact_coloring_is_optimal(n in 0usize..=8, density in 0u8..=100, seed in any::<u64>()) {
        let g = random_graph(n, density, seed);
        let cover = graph::cover_by_independent_sets(&g).unwrap();
        prop_assert!(cover.exact && g.is_proper_coloring(&cover.colors));
        prop_assert_eq!(cover.class_count(), brute_chromatic(&g));
        let cliques = graph::cover_by_cliques(&g).unwrap();
        prop_assert!(cliques.classes().iter().all(|c| g.is_clique(c)));
    }

    #[test]
    fn large_exact_clique_matches_bron_kerbosch(n in 17usize..=128, density in 20u8..=80, seed in any::<u64>()) {
        let g = random_graph(n, density, seed);
        let c = graph::max_clique(&g, SearchMode::Exact).unwrap();
        prop_assert_eq!(c.vertices.len(), common::max_clique_size(&matrix(&g)));
        let dsatur = search::color_dsatur(&g);
        prop_assert!(g.is_proper_coloring(&dsatur));
        // Any proper coloring needs at least as many colors as the clique has vertices.
        prop_assert!(dsatur.iter().max().map_or(0, |c| c + 1) >= c.vertices.len());
    }
}

#[test]
fn size_limits_are_enforced() {
    let g = random_graph(129, 50, 1);
    assert!(matches!(
        graph::max_clique(&g, SearchMode::Exact),
        Err(Error::SizeLimit { size: 129, limit: 128 })
    ));
    let auto = graph::max_clique(&g, SearchMode::Auto).unwrap();
    assert!(!auto.exact && g.is_clique(&auto.vertices));
}

#[test]
fn join_convention_matches_the_formula() {
    let family = families::build_luzin(4, 2).unwrap();
    let members = common::member_lists(&family);
    let vertices = graph::all_vertices(4);
    assert_eq!(vertices.len(), 81);
    let g = graph::build_graph(&family, &vertices, Convention::Join).unwrap();
    let union = |ls: &BTreeSet<usize>| -> BTreeSet<usize> { ls.iter().flat_map(|&j| members[j].clone()).collect() };
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let (a, b) = (union(&vertices[i].a), union(&vertices[i].b));
            let (c, d) = (union(&vertices[j].a), union(&vertices[j].b));
            let left: BTreeSet<usize> = &(&a - &b) & &(&d - &c);
            let right: BTreeSet<usize> = &(&b - &a) & &(&c - &d);
            assert_eq!(g.adjacency.has_edge(i, j), !left.is_empty() || !right.is_empty(), "({i}, {j})");
        }
    }
}

#[test]
fn exports_round_trip() {
    let seeds = families::random_seeds(4, 2, 0).unwrap();
    let family = families::build_steprans(4, &seeds).unwrap();
    let g = graph::build_graph(&family, &graph::all_vertices(4), Convention::Compatible).unwrap();
    let json = graph::export_graph(&g, ExportFormat::Json).unwrap();
    assert_eq!(graph::import_graph_json(&json).unwrap(), g);

    let dot = graph::export_graph(&g, ExportFormat::Dot).unwrap();
    assert!(dot.starts_with("graph G {\n  // edge_means=compatible\n"));
    assert_eq!(dot.matches(" -- ").count(), g.adjacency.edge_count());
    assert!(dot.contains("[label=\"0|1\"]"));
    assert_eq!("dot".parse::<ExportFormat>().unwrap(), ExportFormat::Dot);
    assert!("svg".parse::<ExportFormat>().is_err());
}

#[test]
fn malformed_graph_files_are_rejected() {
    let asym = r#"{"edge_means":"join_nonempty","vertices":[{"a":[0],"b":[]},{"a":[],"b":[0]}],"adjacency":[[0,1],[0,0]]}"#;
    assert!(graph::import_graph_json(asym).is_err());
    let looped = r#"{"edge_means":"join_nonempty","vertices":[{"a":[0],"b":[]}],"adjacency":[[1]]}"#;
    assert!(graph::import_graph_json(looped).is_err());
    let overlap = r#"{"convention":"join","vertices":[{"a":[0],"b":[0]}],"adjacency":[[0]]}"#;
    assert!(matches!(graph::import_graph_json(overlap), Err(Error::LabelOverlap { index: 0 })));
    assert!(Vertex::new([1].into(), [1].into()).is_err());
}

#[test]
fn compatible_convention_follows_conditions() {
    let family = families::build_r_embeddable(3, adfam::sets::Horizon::new(12).unwrap(), 3, 2).unwrap();
    let vertices = graph::all_vertices(3);
    let g = graph::build_graph(&family, &vertices, Convention::Compatible).unwrap();
    let conds: Vec<_> = vertices.iter().map(|v| graph::condition_of(&family, v).unwrap()).collect();
    for (i, p) in conds.iter().enumerate() {
        assert_eq!(&graph::vertex_of(p), &vertices[i]);
        for (j, q) in conds.iter().enumerate() {
            if i != j {
                assert_eq!(g.adjacency.has_edge(i, j), adfam::order::compatible(p, q).unwrap());
            }
        }
    }
}
