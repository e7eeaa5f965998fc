//! Grows approximation conditions, amalgamates restrictions and builds a family.

use std::collections::BTreeMap;

use adfam::builders::{self, ApproxCondition, Arity, Sides};
use adfam::families;

fn restrict(g: &ApproxCondition, keep: &[usize]) -> adfam::Result<ApproxCondition> {
    let sides: BTreeMap<usize, Sides> = keep.iter().map(|&xi| (xi, g.sides(xi).unwrap().clone())).collect();
    ApproxCondition::new(g.n(), g.arity(), sides)
}

fn main() -> adfam::Result<()> {
    for arity in [Arity::Three, Arity::Four] {
        let g = builders::grow_condition(arity, 5, 1)?;
        let p = restrict(&g, &[0, 1])?;
        let q = restrict(&g, &[2, 3, 4])?;
        let r = match arity {
            Arity::Three => builders::amalgamate_3luzin(&p, &q)?,
            Arity::Four => builders::amalgamate_4family(&p, &q)?,
        };
        println!(
            "arity {arity}: grown n={}, amalgam n={} over {} indices, extends both: {}",
            g.n(),
            r.n(),
            r.len(),
            r.extends(&p) && r.extends(&q)
        );
    }

    let steps = 6;
    let family = builders::grow_family(Arity::Three, steps, 9)?;
    let columns = builders::grown_columns(Arity::Three, steps);
    let verdict = families::check_n_luzin_gap(&family, &columns, 0)?;
    println!("grown family: {} members, gap at 0: {}", family.len(), verdict.is_gap());
    Ok(())
}
