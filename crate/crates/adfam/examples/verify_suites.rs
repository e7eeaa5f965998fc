//! Runs the verification suites on an embeddable family and prints each check.

use adfam::families;
use adfam::sets::Horizon;
use adfam::verify::{self, SuiteConfig};

fn main() -> adfam::Result<()> {
    let family = families::build_r_embeddable(8, Horizon::new(64)?, 6, 1)?;
    let cfg = SuiteConfig { samples: 24, ..SuiteConfig::default() };
    for report in verify::all_suites(&family, &cfg)? {
        println!("{} on {} ({} members): passed={}", report.suite, report.family_kind, report.members, report.passed);
        for check in &report.checks {
            println!("  {:<28} {:?}", check.name, check.status);
        }
    }
    Ok(())
}
