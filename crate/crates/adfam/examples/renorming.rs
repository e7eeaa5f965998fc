//! Maps conditions to sphere vectors and checks the renormed separation bound.

use adfam::families;
use adfam::geometry::{self, f_of};
use adfam::numeric::{self, Precision};
use adfam::order;

fn main() -> adfam::Result<()> {
    let seeds = families::random_seeds(9, 8, 3)?;
    let family = families::build_steprans(9, &seeds)?;
    let m = 3;
    let p = order::generator_condition(&family, [0].into(), [1].into(), m + 1)?;
    let q = order::generator_condition(&family, [1].into(), [0].into(), m + 1)?;
    println!("compatible: {}", order::compatible(&p, &q)?);

    let (fp, fq) = (f_of(&p), f_of(&q));
    println!("sup distance: {}", geometry::dist_inf(&fp, &fq)?);
    let precision = Precision::new(numeric::q(1, 1_000_000))?;
    let d = geometry::dist_inf2(&fp, &fq, &precision)?;
    println!("renormed distance in [{}, {}]", numeric::decimal(d.lo(), 9), numeric::decimal(d.hi(), 9));

    let r = geometry::renorm_separation_check(&p, &q, m, &precision)?;
    println!(
        "check at m={}: bound={} distance~{} holds={}",
        r.m,
        r.bound,
        numeric::decimal(&r.distance.midpoint(), 6),
        r.holds
    );

    let n = geometry::norm_inf2(&fp, &precision);
    println!("norm of f_p in [{}, {}]", numeric::decimal(n.lo(), 9), numeric::decimal(n.hi(), 9));
    Ok(())
}
