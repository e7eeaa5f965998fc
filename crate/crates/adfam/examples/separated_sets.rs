//! Finds separated subsets and diameter covers among pairing vectors.

use adfam::families;
use adfam::geometry::{self, Norm, Pairing, SphereVector};
use adfam::graph::SearchMode;
use adfam::numeric::{self, Precision};

fn main() -> adfam::Result<()> {
    let seeds = families::random_seeds(7, 12, 5)?;
    let family = families::build_steprans(7, &seeds)?;
    let pairs = geometry::pairing_vectors(&family, &Pairing::consecutive(family.len()), None)?;
    let vectors: Vec<SphereVector> = pairs.into_iter().map(|(_, v)| v).collect();
    let precision = Precision::bits(24);

    for norm in [Norm::Inf, Norm::Inf2] {
        let two = numeric::qi(2);
        let sep = geometry::separated_subset(&vectors, &two, false, norm, &precision, SearchMode::Exact)?;
        let cover = geometry::diameter_cover(&vectors, &numeric::qi(1), false, norm, &precision)?;
        println!(
            "{norm:?}: {} vectors, 2-separated subset of size {}, {} classes of diameter <= 1",
            vectors.len(),
            sep.vertices.len(),
            cover.class_count()
        );
    }

    let unit: Vec<SphereVector> = vectors.iter().map(|v| v.normalize_inf2(40)).collect::<adfam::Result<_>>()?;
    let cells = geometry::sphere_cells(&unit, &precision)?;
    println!(
        "sphere cells: {} labels, {} same-cell pairs checked, {} violations",
        cells.cells.len(),
        cells.checked_pairs,
        cells.violations.len()
    );
    Ok(())
}
