//! Verification suites over one family: both directions of each constructive
//! characterization, and randomized instances of the renorming inequalities.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::families::Family;
use crate::geometry::{
    self,    antichain_candidates, check, diameter_cover, dist_inf, f_of, function_distance_check, is_equilateral,
    renorm_separation_check, separated_subset, skipped, spheres_check, sphere_cells, symptom_renorm_check,
    t_norm_small, two_conditions_check, verdict, CheckStatus, Norm, SphereVector, SubCheck, Tail,
};
use crate::graph::{self, SearchMode};
use crate::numeric::{self, Precision, Q};
use crate::order::{self, Condition};
use crate::sampling::{self, ConditionShape};

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub family_kind: &'static str,
    pub members: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<SubCheck>,
    pub passed: bool,
}

impl VerifyReport {
    fn new(suite: &'static str, family: &Family, samples: usize, seed: u64, checks: Vec<SubCheck>) -> Self {
        let passed = checks.iter().all(|c| c.status != CheckStatus::Failed);
        VerifyReport {
            suite,
            family_kind: family.metadata().kind(),
            members: family.len(),
            samples,
            seed,
            checks,
            passed,
        }
    }
}

/// Settings shared by the suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    /// Bound for the `Q_m` renorming check.
    pub m: usize,
    pub precision: Precision,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: 64,
            seed: 0,
            m: 3,
            precision: Precision::bits(20),
        }
    }
}

fn pairwise(vectors: &[SphereVector], pred: impl Fn(&Q) -> bool) -> Result<bool> {
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            if !pred(&dist_inf(&vectors[i], &vectors[j])?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Incompatible pairs of conditions avoiding `{0, …, m}`.
pub fn incompatible_q_m_pairs(
    family: &Family,
    m: usize,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(Condition, Condition)>> {
    let mut out = Vec::with_capacity(count);
    if family.len() < 2 || m + 1 >= family.horizon().get() {
        return Ok(out);
    }
    let mut attempts = 0;
    while out.len() < count && attempts < 200 * count.max(1) {
        attempts += 1;
        let (Ok(p), Ok(q)) = (
            sampling::q_m_condition(family, m, 2, rng),
            sampling::q_m_condition(family, m, 2, rng),
        ) else {
            continue;
        };
        if !order::compatible(&p, &q)? {
            out.push((p, q));
        }
    }
    Ok(out)
}

/// Both directions of the antichain, centered and renorming characterizations.
pub fn thm_equi(family: &Family, cfg: &SuiteConfig) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let two = numeric::qi(2);
    let one = numeric::qi(1);
    let mut checks = Vec::new();
    if family.is_empty() {
        for name in ["antichain_to_equilateral", "separated_to_antichain", "centered_to_diameter", "diameter_to_centered", "q_m_renorm"] {
            checks.push(skipped(name, "empty family"));
        }
        return Ok(VerifyReport::new("thm-equi", family, cfg.samples, cfg.seed, checks));
    }

    let conds = antichain_candidates(family, cfg.samples, &mut rng);
    let anti = graph::max_independent_set(&order::compatibility_graph(&conds), SearchMode::Auto)?;
    let vectors: Vec<SphereVector> = anti.vertices.iter().map(|&i| f_of(&conds[i])).collect();
    checks.push(check(
        "antichain_to_equilateral",
        verdict(is_equilateral(&vectors, &two)?),
        json!({ "sampled": conds.len(), "antichain": anti.vertices.len(), "exact": anti.exact }),
    ));

    let random: Vec<Condition> = (0..cfg.samples)
        .map(|_| sampling::random_condition(family, &mut rng, &ConditionShape::default()))
        .collect();
    let fs: Vec<SphereVector> = random.iter().map(f_of).collect();
    let sep = separated_subset(&fs, &one, true, Norm::Inf, &cfg.precision, SearchMode::Auto)?;
    let picked: Vec<Condition> = sep.vertices.iter().map(|&i| random[i].clone()).collect();
    let ok = order::compatibility_graph(&picked).edge_count() == 0
        && is_equilateral(&sep.vertices.iter().map(|&i| fs[i].clone()).collect::<Vec<_>>(), &two)?;
    checks.push(check(
        "separated_to_antichain",
        verdict(ok),
        json!({ "sampled": random.len(), "separated": sep.vertices.len(), "exact": sep.exact }),
    ));

    if family.embedding().is_some() {
        let coloring = order::centered_decomposition(family, &random)?;
        let mut ok = coloring.verified;
        for class in coloring.classes() {
            let vs: Vec<SphereVector> = class.iter().map(|&i| fs[i].clone()).collect();
            ok &= pairwise(&vs, |d| d <= &one)?;
        }
        checks.push(check(
            "centered_to_diameter",
            verdict(ok),
            json!({ "sampled": random.len(), "classes": coloring.class_count() }),
        ));
    } else {
        checks.push(skipped("centered_to_diameter", "family has no rational embedding"));
    }
    let cover = diameter_cover(&fs, &one, false, Norm::Inf, &cfg.precision)?;
    let ok = cover
        .classes()
        .iter()
        .all(|c| order::is_centered(&c.iter().map(|&i| &random[i]).collect::<Vec<_>>()));
    checks.push(check(
        "diameter_to_centered",
        verdict(ok),
        json!({ "sampled": random.len(), "classes": cover.class_count(), "exact": cover.exact }),
    ));

    let pairs = incompatible_q_m_pairs(family, cfg.m, cfg.samples, &mut rng)?;
    if pairs.is_empty() {
        checks.push(check("q_m_renorm", CheckStatus::NotObserved, json!({ "m": cfg.m, "pairs": 0 })));
    } else {
        let mut held = 0;
        for (p, q) in &pairs {
            held += usize::from(renorm_separation_check(p, q, cfg.m, &cfg.precision)?.holds);
        }
        checks.push(check(
            "q_m_renorm",
            verdict(held == pairs.len()),
            json!({ "m": cfg.m, "pairs": pairs.len(), "held": held,
                    "bound": numeric::decimal(&(numeric::qi(2) - numeric::q(2, cfg.m as i64 + 1)), 6) }),
        ));
    }
    Ok(VerifyReport::new("thm-equi", family, cfg.samples, cfg.seed, checks))
}

/// Nonzero random vector on `[0, h)` vanishing on `[0, zeros)`.
fn vanishing_vector(h: usize, zeros: usize, rng: &mut impl Rng) -> SphereVector {
    loop {
        let mut coords: Vec<Q> = (0..h).map(|_| sampling::random_unit_rational(rng, 8)).collect();
        for c in coords.iter_mut().take(zeros) {
            *c = numeric::qi(0);
        }
        let v = SphereVector::new(coords, Tail::Zero);
        if !v.is_zero() {
            return v;
        }
    }
}

fn tally(name: &'static str, instances: usize, violations: Vec<usize>, precision: &Precision) -> SubCheck {
    check(
        name,
        verdict(violations.is_empty()),
        json!({ "instances": instances, "violations": violations,
                "slack": numeric::decimal(precision.value(), 12) }),
    )
}

/// Randomized instances of the sphere, cell, symptom and two-conditions inequalities.
pub fn lemma_suite(family: &Family, cfg: &SuiteConfig) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = &cfg.precision;
    let h = 16;
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for t in 0..cfg.samples {
        let norm = if t % 2 == 0 { Norm::Inf } else { Norm::Inf2 };
        let pick = |rng: &mut ChaCha8Rng| {
            let v = vanishing_vector(h, 0, rng).normalize_sup();
            v.scale(&numeric::q(rng.gen_range(4..=10), 32))
        };
        let (x, y) = (pick(&mut rng), pick(&mut rng));
        if !spheres_check(&x, &y, norm, p)?.holds {
            bad.push(t);
        }
    }
    checks.push(tally("spheres", cfg.samples, bad, p));

    let sphere: Vec<SphereVector> = (0..cfg.samples)
        .map(|_| {
            let mut v = vanishing_vector(h, 0, &mut rng);
            let mut coords = v.coords().to_vec();
            coords[0] = numeric::q(rng.gen_range(2..=8), 8);
            v = SphereVector::new(coords, Tail::Zero);
            v.normalize_inf2(p.grid_bits())
        })
        .collect::<Result<_>>()?;
    let report = sphere_cells(&sphere, p)?;
    checks.push(check(
        "squizing",
        verdict(report.violations.is_empty()),
        json!({ "instances": sphere.len(), "pairs_checked": report.checked_pairs,
                "violations": report.violations, "slack": numeric::decimal(p.value(), 12) }),
    ));

    let delta = numeric::q(2, 3);
    let mut bad = Vec::new();
    for t in 0..cfg.samples {
        let x = vanishing_vector(h, 4, &mut rng).normalize_sup();
        let y = vanishing_vector(h, 4, &mut rng).normalize_sup();
        if !symptom_renorm_check(&x, &y, &delta, p)?.holds {
            bad.push(t);
        }
    }
    checks.push(tally("symptom_renorm", cfg.samples, bad, p));

    let mut bad = Vec::new();
    for t in 0..cfg.samples {
        let m = rng.gen_range(1..=8);
        let v = vanishing_vector(h, m + 1, &mut rng);
        if !t_norm_small(&v, m, p)?.1 {
            bad.push(t);
        }
    }
    checks.push(tally("t_norm_small", cfg.samples, bad, p));

    if family.is_empty() {
        checks.push(skipped("two_conditions", "empty family"));
        checks.push(skipped("function_distance", "empty family"));
    } else {
        let eps = numeric::q(1, 4);
        let fs: Vec<SphereVector> = (0..cfg.samples)
            .map(|_| sampling::random_combination(family, &mut rng, 3, 2, 4))
            .collect::<Result<_>>()?;
        let mut bad = Vec::new();
        for (t, f) in fs.iter().enumerate() {
            if !two_conditions_check(family, f, &eps)? {
                bad.push(t);
            }
        }
        checks.push(tally("two_conditions", fs.len(), bad, p));
        let (mut premise, mut bad) = (0, Vec::new());
        for (t, pair) in fs.windows(2).enumerate() {
            match function_distance_check(family, &pair[0], &pair[1], &eps)? {
                Some(true) => premise += 1,
                Some(false) => {
                    premise += 1;
                    bad.push(t);
                }
                None => {}
            }
        }
        checks.push(check(
            "function_distance",
            verdict(bad.is_empty()),
            json!({ "pairs": fs.len().saturating_sub(1), "compatible": premise, "violations": bad }),
        ));
    }
    Ok(VerifyReport::new("lemmas", family, cfg.samples, cfg.seed, checks))
}

/// Runs both suites; the combined report passes when both do.
pub fn all_suites(family: &Family, cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    Ok(vec![thm_equi(family, cfg)?, lemma_suite(family, cfg)?])
}

/// Vectors grouped by the centered coloring of their conditions `p(f, ε)`.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionClasses {
    pub colors: Vec<usize>,
    #[serde(with = "numeric::pair")]
    pub bound: Q,
    /// Largest exact sup distance inside one class.
    #[serde(with = "numeric::pair")]
    pub max_diameter: Q,
    pub verified: bool,
}

impl FunctionClasses {
    pub fn classes(&self) -> Vec<Vec<usize>> {
        crate::search::classes(&self.colors)
    }
}

/// Colors `fs` through `p(f, ε)` on an embeddable family and checks every
/// class has sup-diameter at most `1 + ε`.
pub fn function_classes(family: &Family, fs: &[SphereVector], eps: &Q) -> Result<FunctionClasses> {
    let conds = fs
        .iter()
        .map(|f| geometry::cond_from_function(family, f, eps))
        .collect::<Result<Vec<_>>>()?;
    let coloring = order::centered_decomposition(family, &conds)?;
    let bound = numeric::qi(1) + eps;
    let mut max_diameter = numeric::qi(0);
    for class in coloring.classes() {
        for (k, &i) in class.iter().enumerate() {
            for &j in &class[k + 1..] {
                max_diameter = max_diameter.max(dist_inf(&fs[i], &fs[j])?);
            }
        }
    }
    Ok(FunctionClasses {
        verified: coloring.verified && max_diameter <= bound,
        colors: coloring.colors,
        bound,
        max_diameter,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ThmEqui,
    Lemmas,
    All,
}

pub fn run_suite(suite: Suite, family: &Family, cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    match suite {
        Suite::ThmEqui => Ok(vec![thm_equi(family, cfg)?]),
        Suite::Lemmas => Ok(vec![lemma_suite(family, cfg)?]),
        Suite::All => all_suites(family, cfg),
    }
}
