//! Builds the order graph on all label pairs of a small family and exports it.

use adfam::families;
use adfam::graph::{self, Convention, ExportFormat, SearchMode};

fn main() -> adfam::Result<()> {
    let family = families::build_luzin(4, 2)?;
    let vertices = graph::all_vertices(4);

    for convention in [Convention::Compatible, Convention::Join] {
        let g = graph::build_graph(&family, &vertices, convention)?;
        let clique = graph::max_clique(&g.adjacency, SearchMode::Exact)?;
        let indep = graph::max_independent_set(&g.adjacency, SearchMode::Exact)?;
        println!(
            "{convention}: {} vertices, {} edges, clique {}, independent {}",
            g.len(),
            g.adjacency.edge_count(),
            clique.vertices.len(),
            indep.vertices.len()
        );
        let shown: Vec<String> = clique.vertices.iter().map(|&v| g.vertices[v].to_string()).collect();
        println!("  a largest clique: {}", shown.join(" "));
    }

    let small = graph::build_graph(&family, &graph::all_vertices(2), Convention::Compatible)?;
    println!("{}", graph::export_graph(&small, ExportFormat::Dot)?);
    let json = graph::export_graph(&small, ExportFormat::Json)?;
    assert_eq!(graph::import_graph_json(&json)?, small);
    Ok(())
}
