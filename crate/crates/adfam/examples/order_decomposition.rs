//! Samples conditions and splits them into centered classes and antichains.

use adfam::families;
use adfam::order;
use adfam::sampling::{self, ConditionShape};
use adfam::sets::Horizon;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> adfam::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let embeddable = families::build_r_embeddable(12, Horizon::new(100)?, 6, 5)?;
    let cs: Vec<_> = (0..80)
        .map(|_| sampling::random_condition(&embeddable, &mut rng, &ConditionShape::default()))
        .collect();
    let centered = order::centered_decomposition(&embeddable, &cs)?;
    println!(
        "centered: {} conditions into {} classes (verified: {})",
        cs.len(),
        centered.class_count(),
        centered.verified
    );
    assert!(order::classes_are(&cs, &centered.colors, true));

    let luzin = families::build_luzin(48, 4)?;
    let m = luzin.intersection_ceiling();
    let cs = sampling::essentially_distinct(&luzin, 30, m, 2, &mut rng)?;
    let antichains = order::luzin_antichain_decomposition(&luzin, &cs)?;
    println!(
        "antichains: {} conditions into {} classes over {} blocks (fallback: {})",
        cs.len(),
        antichains.class_count(),
        antichains.blocks.len(),
        antichains.fallback
    );

    match order::thin_normalize(&luzin, &cs) {
        Ok(t) => println!(
            "thinning kept {} conditions via {:?} with k={} l={} m={}",
            t.gamma.len(),
            t.batch.route,
            t.batch.k,
            t.batch.l,
            t.batch.m
        ),
        Err(e) => println!("thinning: {e}"),
    }
    Ok(())
}
