//! Interval enclosures: square roots, renormed norms and undecided comparisons.

use adfam::geometry::{self, SphereVector, Tail};
use adfam::numeric::{self, CertifiedReal, Decision};

fn main() -> adfam::Result<()> {
    let two = numeric::qi(2);
    for bits in [8, 16, 32] {
        let (lo, hi) = numeric::sqrt_bounds(&two, bits);
        println!("sqrt(2) at {bits:>2} bits: [{}, {}]", numeric::decimal(&lo, 12), numeric::decimal(&hi, 12));
    }

    let coords = vec![numeric::q(1, 2), numeric::qi(-1), numeric::q(1, 3)];
    let finite = SphereVector::new(coords.clone(), Tail::Zero);
    let tailed = SphereVector::new(coords, Tail::from_terms([(0, numeric::q(1, 4))]));
    for bits in [10, 30] {
        let a = geometry::norm_inf2_bits(&finite, bits);
        let b = geometry::norm_inf2_bits(&tailed, bits);
        println!(
            "{bits} bits: finite norm width {}, with tail width {}",
            numeric::decimal(&a.width(), 12),
            numeric::decimal(&b.width(), 12)
        );
    }

    let x = CertifiedReal::new(numeric::q(1, 3), numeric::q(1, 2));
    for t in [numeric::q(1, 4), numeric::q(2, 5), numeric::q(3, 4)] {
        let verdict = match x.ge(&t) {
            Decision::Undecided => "undecided".to_string(),
            d => d.is_true().to_string(),
        };
        println!("[1/3, 1/2] >= {t}: {verdict}");
    }
    let x = numeric::parse_rational("1e-6")?;
    println!("parsed 1e-6 as {x}");
    Ok(())
}
