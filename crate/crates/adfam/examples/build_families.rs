//! Builds one family of each kind, checks almost disjointness and saves one to JSON.

use adfam::families::{self, AdVerdict, Family};
use adfam::sets::Horizon;

fn describe(name: &str, f: &Family) {
    let verdict = match families::verify_ad(f) {
        AdVerdict::Certificate { .. } => "almost disjoint".to_string(),
        AdVerdict::Violation(v) => format!("violation: {v}"),
    };
    println!(
        "{name:<18} members={:<4} horizon={:<5} ceiling={:<3} {verdict}",
        f.len(),
        f.horizon(),
        f.intersection_ceiling()
    );
}

fn main() -> adfam::Result<()> {
    let seeds = families::random_seeds(8, 6, 42)?;
    let steprans = families::build_steprans(8, &seeds)?;
    describe("steprans", &steprans);

    let luzin = families::build_luzin(20, 3)?;
    describe("luzin", &luzin);
    let witness = luzin.luzin_witness().expect("luzin metadata");
    println!("  f(5, 2) = {:?}", witness.f(5, 2));

    let embeddable = families::build_r_embeddable(8, Horizon::new(64)?, 6, 7)?;
    describe("r-embeddable", &embeddable);
    let embedding = embeddable.embedding().expect("embedding metadata");
    for (i, limit) in embedding.limits.iter().take(3).enumerate() {
        println!("  member {i} converges to sqrt({})", limit.prime);
    }

    // Some random bit sets empty a member; try seeds until one refines.
    let cohen = (0..64).find_map(|seed| {
        let bits = families::random_bits(luzin.horizon(), seed);
        families::cohen_refine(&luzin, &bits).ok().map(|f| (seed, f))
    });
    match cohen {
        Some((seed, c)) => describe(&format!("cohen (seed {seed})"), &c),
        None => println!("cohen          no seed below 64 refines"),
    }

    let path = std::env::temp_dir().join("adfam-luzin.json");
    luzin.save(&path)?;
    let back = Family::load(&path)?;
    println!("saved to {} and reloaded ({} members)", path.display(), back.len());
    Ok(())
}
