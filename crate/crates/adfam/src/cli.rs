//! The `adfam` command line: build families, analyze their splitting orders,
//! run the sphere searches and the verification suites.
//!
//! Every command prints one JSON report on stdout that embeds its resolved
//! configuration. `--out` names the command's artifact: the family file, the
//! graph export, the CSV plot data, or a copy of the report.
//!
//! Exit codes: 0 ok, 1 usage, 2 certification failure, 3 missing metadata,
//! 4 undecided comparison.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::builders::{self, Arity};
use crate::error::{Error, Result};
use crate::families::{self, Family};
use crate::geometry::{
    self, antichain_candidates, f_of, is_equilateral, renorm_separation_check, Cmp, Norm, SphereVector,
};
use crate::graph::{self, Convention, ExportFormat, SearchMode};
use crate::numeric::{self, Precision};
use crate::order::{self, Condition};
use crate::sampling::{self, ConditionShape};
use crate::sets::Horizon;
use crate::verify::{self, Suite, SuiteConfig};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CERTIFICATION: u8 = 2;
pub const EXIT_METADATA: u8 = 3;
pub const EXIT_UNDECIDED: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "adfam", version, about = "Almost disjoint families, splitting orders and sphere geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and certify a family file.
    Build(BuildArgs),
    /// Decompositions, antichains and graphs of the splitting order.
    Order(OrderArgs),
    /// Equilateral and separated sets, covers, renorming checks.
    Geometry(GeometryArgs),
    /// Verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    #[command(subcommand)]
    pub kind: BuildKind,
    /// Family file to write.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BuildKind {
    /// Tree-branch family from random binary seeds.
    Steprans {
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long, default_value_t = 32)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-to-one column family.
    Luzin {
        #[arg(long, default_value_t = 128)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        base: usize,
    },
    /// Blocks valued by rational approximations of distinct irrationals.
    REmbeddable {
        #[arg(long, default_value_t = 64)]
        count: usize,
        #[arg(long, default_value_t = 512)]
        horizon: usize,
        #[arg(long, default_value_t = 8)]
        block_length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Refinement of an existing family by a seeded random set.
    Cohen {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Family grown by repeated amalgamation.
    Grown {
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Family file to analyze.
    #[arg(long, global = true)]
    pub family: Option<PathBuf>,
    /// Artifact path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    pub samples: usize,
    /// Absolute precision of certified square roots, e.g. `1e-6` or `1/1024`.
    #[arg(long, global = true, default_value = "1e-9")]
    pub precision: String,
}

#[derive(Debug, Clone, Copy, Default, Args, Serialize)]
#[group(multiple = false)]
pub struct EngineFlags {
    /// Require exact searches.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Force greedy searches.
    #[arg(long, global = true)]
    pub heuristic: bool,
}

impl EngineFlags {
    pub fn mode(self) -> SearchMode {
        if self.exact {
            SearchMode::Exact
        } else if self.heuristic {
            SearchMode::Heuristic
        } else {
            SearchMode::Auto
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct OrderArgs {
    #[command(subcommand)]
    pub action: OrderAction,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub engine: EngineFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecomposeMethod {
    /// Classes of pairwise compatible conditions (embeddable families).
    Centered,
    /// Classes of pairwise incompatible conditions (Luzin families).
    Antichain,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum OrderAction {
    /// Color sampled conditions into centered or antichain classes.
    Decompose {
        #[arg(long, value_enum, default_value = "centered")]
        method: DecomposeMethod,
        /// Common bound for antichain samples (defaults to the intersection ceiling).
        #[arg(long)]
        m: Option<usize>,
    },
    /// Largest antichain and largest centered set among sampled conditions.
    Antichains,
    /// Order graph on all vertices over the first `members` members.
    Graph {
        #[arg(long, default_value_t = 3)]
        members: usize,
        #[arg(long, value_enum, default_value = "compatible")]
        convention: Convention,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct GeometryArgs {
    #[command(subcommand)]
    pub action: GeometryAction,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub engine: EngineFlags,
    #[arg(long, global = true, default_value = "1/4")]
    pub epsilon: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum GeometryAction {
    /// 2-equilateral set from an antichain of conditions.
    Equilateral,
    /// Largest `(2−ε)`-separated subset of sampled condition vectors.
    Separated {
        #[arg(long, value_enum, default_value = "inf")]
        norm: Norm,
    },
    /// Classes of sup-diameter at most `1+ε`.
    Cover,
    /// Renormed separation of incompatible conditions avoiding `{0, …, m}`.
    RenormCheck {
        #[arg(long, default_value_t = 7)]
        m: usize,
    },
    /// Finite-scale evidence for the sphere dichotomies.
    DichotomySuite,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub common: Common,
    /// Bound for the renorming check.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
}

/// Parses arguments, runs, prints, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(&cli.command) {
        Ok(outcome) => {
            println!("{}", outcome.report);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CERTIFICATION)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MissingMetadata { .. } => EXIT_METADATA,
        Error::Undecided { .. } => EXIT_UNDECIDED,
        Error::NotAlmostDisjoint(_) | Error::RefinementKilled { .. } | Error::Construction(_) => EXIT_CERTIFICATION,
        _ => EXIT_USAGE,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ADFAM_MAX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("ADFAM_MAX_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Report text and whether every certificate held.
pub struct Outcome {
    pub report: String,
    pub ok: bool,
}

fn outcome(config: &impl Serialize, body: Value, ok: bool) -> Result<Outcome> {
    let report = json!({ "config": config, "ok": ok, "result": body });
    Ok(Outcome {
        report: serde_json::to_string_pretty(&report)?,
        ok,
    })
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Build(args) => cmd_build(args),
        Command::Order(args) => cmd_order(args),
        Command::Geometry(args) => cmd_geometry(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn precision_of(common: &Common) -> Result<Precision> {
    Precision::new(numeric::parse_rational(&common.precision)?)
}

fn write_artifact(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn build_family(kind: &BuildKind) -> Result<Family> {
    match kind {
        BuildKind::Steprans { depth, count, seed } => {
            families::build_steprans(*depth, &families::random_seeds(*depth, *count, *seed)?)
        }
        BuildKind::Luzin { count, base } => families::build_luzin(*count, *base),
        BuildKind::REmbeddable { count, horizon, block_length, seed } => {
            families::build_r_embeddable(*count, Horizon::new(*horizon)?, *block_length, *seed)
        }
        BuildKind::Cohen { family, seed } => {
            let base = Family::load(family)?;
            families::cohen_refine(&base, &families::random_bits(base.horizon(), *seed))
        }
        BuildKind::Grown { arity, steps, seed } => builders::grow_family(Arity::try_from(*arity)?, *steps, *seed),
    }
}

pub fn cmd_build(args: &BuildArgs) -> Result<Outcome> {
    let family = build_family(&args.kind)?;
    let text = family.to_json()?;
    // Re-certify from the serialized form before reporting success.
    let reloaded = Family::from_json(&text)?;
    let ok = reloaded.fingerprint() == family.fingerprint();
    if let Some(path) = &args.out {
        write_artifact(path, &text)?;
    }
    let body = json!({
        "kind": family.metadata().kind(),
        "members": family.len(),
        "horizon": family.horizon().get(),
        "intersection_ceiling": family.intersection_ceiling(),
        "fingerprint": format!("{:016x}", family.fingerprint()),
    });
    outcome(args, body, ok)
}

fn family_of(common: &Common) -> Result<Family> {
    let path = common
        .family
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--family is required".into()))?;
    Family::load(path)
}

fn load(common: &Common) -> Result<(Family, ChaCha8Rng)> {
    Ok((family_of(common)?, ChaCha8Rng::seed_from_u64(common.seed)))
}

fn condition_json(p: &Condition) -> Value {
    json!({ "a": p.a(), "b": p.b(), "m": p.m(), "e": p.e().to_vec(), "f": p.f().to_vec() })
}

pub fn cmd_order(args: &OrderArgs) -> Result<Outcome> {
    let (family, mut rng) = load(&args.common)?;
    let mode = args.engine.mode();
    let (body, ok, artifact) = match &args.action {
        OrderAction::Decompose { method: DecomposeMethod::Centered, .. } => {
            if family.embedding().is_none() {
                return Err(Error::MissingMetadata { expected: "r_embeddable" });
            }
            let conds: Vec<Condition> = (0..args.common.samples)
                .map(|_| sampling::random_condition(&family, &mut rng, &ConditionShape::default()))
                .collect();
            let coloring = order::centered_decomposition(&family, &conds)?;
            let ok = coloring.verified && order::classes_are(&conds, &coloring.colors, true);
            let body = json!({
                "method": "centered",
                "conditions": conds.iter().map(condition_json).collect::<Vec<_>>(),
                "classes": coloring.classes(),
                "dictionary": coloring.dictionary,
                "verified": ok,
            });
            (body, ok, None)
        }
        OrderAction::Decompose { method: DecomposeMethod::Antichain, m } => {
            if family.luzin_witness().is_none() {
                return Err(Error::MissingMetadata { expected: "luzin" });
            }
            let m = m.unwrap_or(family.intersection_ceiling());
            let conds = sampling::essentially_distinct(&family, args.common.samples, m, 2, &mut rng)?;
            let coloring = order::luzin_antichain_decomposition(&family, &conds)?;
            let ok = coloring.verified && order::classes_are(&conds, &coloring.colors, false);
            let body = json!({
                "method": "antichain",
                "m": m,
                "conditions": conds.iter().map(condition_json).collect::<Vec<_>>(),
                "classes": coloring.classes(),
                "blocks": coloring.blocks,
                "fallback": coloring.fallback,
                "verified": ok,
            });
            (body, ok, None)
        }
        OrderAction::Antichains => {
            let conds = antichain_candidates(&family, args.common.samples, &mut rng);
            let g = order::compatibility_graph(&conds);
            let anti = graph::max_independent_set(&g, mode)?;
            let centered = graph::max_clique(&g, mode)?;
            let picked: Vec<&Condition> = centered.vertices.iter().map(|&i| &conds[i]).collect();
            let ok = g.is_independent(&anti.vertices) && order::is_centered(&picked);
            let body = json!({
                "conditions": conds.iter().map(condition_json).collect::<Vec<_>>(),
                "antichain": anti,
                "centered": centered,
                "verified": ok,
            });
            (body, ok, None)
        }
        OrderAction::Graph { members, convention, format } => {
            if *members > family.len() || *members > 6 {
                return Err(Error::InvalidArgument(format!(
                    "--members {members} must be at most min(6, {})",
                    family.len()
                )));
            }
            let vertices = graph::all_vertices(*members);
            let g = graph::build_graph(&family, &vertices, *convention)?;
            let clique = graph::max_clique(&g.adjacency, mode)?;
            let independent = graph::max_independent_set(&g.adjacency, mode)?;
            let body = json!({
                "vertices": g.len(),
                "edges": g.adjacency.edge_count(),
                "convention": convention,
                "max_clique": clique,
                "max_independent_set": independent,
            });
            (body, true, Some(graph::export_graph(&g, *format)?))
        }
    };
    let out = outcome(args, body, ok)?;
    if let Some(path) = &args.common.out {
        write_artifact(path, artifact.as_deref().unwrap_or(&out.report))?;
    }
    Ok(out)
}

/// Distance matrix as CSV: `row, 0, …, n−1, width` with midpoints and the
/// largest interval width of the row.
pub fn matrix_csv(rows: &[Vec<numeric::CertifiedReal>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let n = rows.len();
    let mut header = vec!["row".to_string()];
    header.extend((0..n).map(|j| j.to_string()));
    header.push("width".into());
    w.write_record(&header).map_err(csv_error)?;
    for (i, row) in rows.iter().enumerate() {
        let width = row.iter().map(|d| d.width()).max().unwrap_or_else(|| numeric::qi(0));
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|d| numeric::decimal(&d.midpoint(), 12)));
        rec.push(numeric::decimal(&width, 12));
        w.write_record(&rec).map_err(csv_error)?;
    }
    finish_csv(w)
}

fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for r in rows {
        w.write_record(&r).map_err(csv_error)?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn sample_functions(family: &Family, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<SphereVector>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = sampling::random_combination(family, rng, 3, 2, 4)?;
        if !v.is_zero() {
            out.push(v.normalize_sup());
        }
    }
    Ok(out)
}

pub fn cmd_geometry(args: &GeometryArgs) -> Result<Outcome> {
    let (family, mut rng) = load(&args.common)?;
    let precision = precision_of(&args.common)?;
    let eps = numeric::parse_rational(&args.epsilon)?;
    let mode = args.engine.mode();
    let two = numeric::qi(2);
    let (body, ok, csv) = match &args.action {
        GeometryAction::Equilateral => {
            let conds = antichain_candidates(&family, args.common.samples, &mut rng);
            let anti = graph::max_independent_set(&order::compatibility_graph(&conds), mode)?;
            let vs: Vec<SphereVector> = anti.vertices.iter().map(|&i| f_of(&conds[i])).collect();
            let ok = is_equilateral(&vs, &two)?;
            let m = geometry::distance_matrix(&vs, Norm::Inf, &precision)?;
            let body = json!({
                "antichain": anti,
                "size": vs.len(),
                "distance": "2",
                "equilateral": ok,
            });
            (body, ok, matrix_csv(&m)?)
        }
        GeometryAction::Separated { norm } => {
            let conds: Vec<Condition> = (0..args.common.samples)
                .map(|_| sampling::random_condition(&family, &mut rng, &ConditionShape::default()))
                .collect();
            let vs: Vec<SphereVector> = conds.iter().map(f_of).collect();
            let threshold = &two - &eps;
            let found = geometry::separated_subset(&vs, &threshold, false, *norm, &precision, mode)?;
            let picked: Vec<SphereVector> = found.vertices.iter().map(|&i| vs[i].clone()).collect();
            let m = geometry::distance_matrix(&picked, *norm, &precision)?;
            let mut ok = true;
            for i in 0..picked.len() {
                for j in i + 1..picked.len() {
                    ok &= geometry::compare_distance(&picked[i], &picked[j], *norm, Cmp::AtLeast, &threshold, &precision)?;
                }
            }
            let body = json!({
                "threshold": numeric::RationalPair::from(&threshold),
                "norm": norm,
                "separated": found,
                "verified": ok,
            });
            (body, ok, matrix_csv(&m)?)
        }
        GeometryAction::Cover => {
            let fs = sample_functions(&family, args.common.samples, &mut rng)?;
            let bound = numeric::qi(1) + &eps;
            let (method, colors, ok) = if family.embedding().is_some() {
                let classes = verify::function_classes(&family, &fs, &eps)?;
                ("centered", classes.colors, classes.verified)
            } else {
                let cover = geometry::diameter_cover(&fs, &bound, false, Norm::Inf, &precision)?;
                let ok = cover.classes().iter().all(|c| {
                    c.iter().all(|&i| c.iter().all(|&j| geometry::dist_inf(&fs[i], &fs[j]).is_ok_and(|d| d <= bound)))
                });
                ("diameter_cover", cover.colors, ok)
            };
            let classes = crate::search::classes(&colors);
            let body = json!({
                "method": method,
                "bound": numeric::RationalPair::from(&bound),
                "classes": classes,
                "class_count": classes.len(),
                "verified": ok,
            });
            let rows = colors.iter().enumerate().map(|(i, c)| vec![i.to_string(), c.to_string()]);
            (body, ok, table_csv(&["index", "class"], rows)?)
        }
        GeometryAction::RenormCheck { m } => {
            let pairs = verify::incompatible_q_m_pairs(&family, *m, args.common.samples, &mut rng)?;
            let checks = pairs
                .iter()
                .map(|(p, q)| renorm_separation_check(p, q, *m, &precision))
                .collect::<Result<Vec<_>>>()?;
            let ok = checks.iter().all(|c| c.holds);
            let rows = checks.iter().enumerate().map(|(i, c)| {
                vec![
                    i.to_string(),
                    c.m.to_string(),
                    numeric::decimal(&c.bound, 12),
                    numeric::decimal(&c.distance.midpoint(), 12),
                    numeric::decimal(&c.distance.width(), 12),
                    c.holds.to_string(),
                ]
            });
            let table = table_csv(&["pair", "m", "bound", "midpoint", "width", "holds"], rows)?;
            let body = json!({
                "m": m,
                "pairs": pairs.len(),
                "bound": numeric::decimal(&(&two - numeric::q(2, *m as i64 + 1)), 12),
                "min_lower": checks.iter().map(|c| c.distance.lo().clone()).min().map(|x| numeric::decimal(&x, 12)),
                "max_width": checks.iter().map(|c| c.distance.width()).max().map(|x| numeric::decimal(&x, 12)),
                "all_hold": ok,
            });
            (body, ok, table)
        }
        GeometryAction::DichotomySuite => {
            let report = geometry::verify_dichotomy_suite(&family, args.common.samples, &eps, args.common.seed, &precision)?;
            let ok = !report.any_failed();
            let rows = report.checks.iter().map(|c| {
                let status = serde_json::to_value(&c.status).ok();
                let s = status
                    .as_ref()
                    .and_then(|v| v.get("status"))
                    .and_then(Value::as_str)
                    .unwrap_or("")
                    .to_string();
                vec![c.name.to_string(), s]
            });
            let table = table_csv(&["check", "status"], rows)?;
            (serde_json::to_value(&report)?, ok, table)
        }
    };
    if let Some(path) = &args.common.out {
        write_artifact(path, &csv)?;
    }
    outcome(args, body, ok)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let family = family_of(&args.common)?;
    let cfg = SuiteConfig {
        samples: args.common.samples,
        seed: args.common.seed,
        m: args.m,
        precision: precision_of(&args.common)?,
    };
    let reports = verify::run_suite(args.suite, &family, &cfg)?;
    let ok = reports.iter().all(|r| r.passed);
    let out = outcome(args, serde_json::to_value(&reports)?, ok)?;
    if let Some(path) = &args.common.out {
        write_artifact(path, &out.report)?;
    }
    Ok(out)
}
