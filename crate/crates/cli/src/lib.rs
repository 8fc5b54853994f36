//! Batch front end: every subcommand reads JSON, writes JSON (atomically
//! when `--out` is given) and maps results to exit codes 0 (ok),
//! 1 (a check or search failed) and 2 (bad usage or unreadable input).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use udnorm_core::certifier::{
    certify_box, check_certificate, sample_verify, with_base, witness_norm, CertifyOptions, NormCertificate,
};
use udnorm_core::colored_graphs::{prop1, CutSearch, DEFAULT_EXHAUSTIVE_CAP};
use udnorm_core::constructions::{
    flat_side_quadratic, generic_unit_vectors, grid_pointset, side_cluster_pointset, subset_sum_pointset, PointSeq,
};
use udnorm_core::exec::Execution;
use udnorm_core::linalg::Rational;
use udnorm_core::lindep::{extract_dependences, DependenceConfig, DependenceSystem};
use udnorm_core::norms::{
    pythagorean_polygon, rational_regular, small_dodecagon, small_octagon, square, AngleBound, NormOracle,
    SymmetricPolygon,
};
use udnorm_core::pipeline::{run_pipeline, PipelineConfig};
use udnorm_core::udg::{build_udg_with, DecoratedUdg};

pub mod io;
pub mod svg;

use io::{emit, read_json, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "udnorm", version, about = "Unit distances, color covers and no-realization certificates for planar norms")]
pub struct Cli {
    /// Largest vertex set searched exhaustively for weak cuts.
    #[arg(long, global = true, env = "UDNORM_EXHAUSTIVE_CAP", default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub exhaustive_cap: usize,
    /// Run every data-parallel loop sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point set or a polygon.
    Gen(GenArgs),
    /// Build the decorated unit-distance graph of a point set.
    ///
    /// The counts CSV has columns color,direction_x,direction_y,count with
    /// one row per color; directions are canonical (upper half-plane).
    Udg(UdgArgs),
    /// Color cover of a graph's edge-colored skeleton (0-based vertices).
    Prop1(CoverArgs),
    /// Dependence system extracted from a decorated graph.
    Lindep(CoverArgs),
    /// Certify a dependence system against perturbations of a polygon.
    Certify(CertifyArgs),
    /// Re-validate a certificate; exit 1 on any failure.
    Check(CertArgs),
    /// Randomized search for realizations inside a certificate; exit 1 on a hit.
    Verify(VerifyArgs),
    /// Points and norm in, checked and sampled certificate out.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    SubsetSum,
    FlatSide,
    Grid,
    SideCluster,
    Polygon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolygonName {
    Square,
    Octagon,
    Dodecagon,
    Pythagorean,
    Regular,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Number of generic unit vectors (subset-sum).
    #[arg(long)]
    pub k: Option<usize>,
    /// Points (flat-side) or points per cluster half (side-cluster).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long, value_parser = positive_rational)]
    pub step: Option<Rational>,
    /// Side index in 0..2m (side-cluster).
    #[arg(long)]
    pub side: Option<usize>,
    /// Polygon for subset-sum and side-cluster (default: pythagorean 20-gon).
    #[arg(long)]
    pub polygon: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pythagorean")]
    pub name: PolygonName,
    /// Side pairs of the regular polygon.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UdgArgs {
    #[arg(long)]
    pub points: PathBuf,
    /// Norm: a JSON file (polygon or tagged norm), `euclidean`, or `p=<rational>`.
    #[arg(long, alias = "polygon")]
    pub norm: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value = "2001/1000", value_parser = positive_rational)]
    pub q: Rational,
    #[arg(long = "c", default_value = "1", value_parser = positive_rational)]
    pub c: Rational,
    /// Density constant, reported only.
    #[arg(long = "c0", default_value = "1", value_parser = positive_rational)]
    pub c0: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub polygon: PathBuf,
    #[arg(long, value_parser = positive_rational)]
    pub delta0: Rational,
    /// η given as sin²η.
    #[arg(long, value_parser = positive_rational)]
    pub eta: Rational,
    /// Base norm `B0` to record with the certificate.
    #[arg(long, requires = "eps")]
    pub base: Option<String>,
    #[arg(long, value_parser = positive_rational)]
    pub eps: Option<Rational>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub norm: String,
    #[arg(long, value_parser = positive_rational)]
    pub eps: Rational,
    /// η given as sin²η.
    #[arg(long, value_parser = positive_rational)]
    pub eta: Rational,
    #[arg(long, default_value = "2001/1000", value_parser = positive_rational)]
    pub q: Rational,
    #[arg(long = "c", default_value = "1", value_parser = positive_rational)]
    pub c: Rational,
    #[arg(long = "c0", default_value = "1", value_parser = positive_rational)]
    pub c0: Rational,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the certificate alone.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

fn positive_rational(s: &str) -> Result<Rational, String> {
    let v: Rational = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_positive() {
        Ok(v)
    } else {
        Err(format!("{s} is not positive"))
    }
}

/// Error reported as `{"error": {"kind": ..., "message": ...}}` on stderr.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{kind}: {message}")]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    #[serde(skip)]
    pub code: i32,
}

impl CliError {
    fn new(kind: &str, message: impl Into<String>, code: i32) -> Self {
        CliError { kind: kind.to_string(), message: message.into(), details: None, code }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("io", format!("{}: {e}", path.display()), 2)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new("input", message, 2)
    }

    fn module(kind: &str, e: impl std::fmt::Display) -> Self {
        Self::new(kind, e.to_string(), 1)
    }

    /// A check or search ran and reported a failure.
    fn failed(kind: &str, message: impl Into<String>, details: serde_json::Value) -> Self {
        CliError { details: Some(details), ..Self::new(kind, message, 1) }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NormFile {
    Tagged(NormOracle),
    Polygon(SymmetricPolygon),
}

pub fn load_norm(arg: &str) -> Result<NormOracle, CliError> {
    if arg.eq_ignore_ascii_case("euclidean") {
        return Ok(NormOracle::Euclidean);
    }
    if let Some(p) = arg.strip_prefix("p=") {
        let p: Rational = p.parse().map_err(|e| CliError::input(format!("p-norm exponent: {e}")))?;
        return NormOracle::pnorm(p).map_err(|e| CliError::input(e.to_string()));
    }
    Ok(match read_json::<NormFile>(Path::new(arg))? {
        NormFile::Tagged(n) => n,
        NormFile::Polygon(p) => NormOracle::polygon(p),
    })
}

fn load_polygon(path: &Path) -> Result<SymmetricPolygon, CliError> {
    match load_norm(&path.to_string_lossy())? {
        NormOracle::Polygon { polygon } => Ok(polygon),
        _ => Err(CliError::input(format!("{} is not a polygonal norm", path.display()))),
    }
}

fn required<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::new("usage", format!("--kind {kind} needs --{flag}"), 2))
}

fn angle(sin_sq: &Rational) -> Result<AngleBound, CliError> {
    AngleBound::from_sin_sq(sin_sq.clone()).map_err(|e| CliError::input(e.to_string()))
}

struct Ctx {
    exec: Execution,
    exhaustive_cap: usize,
}

impl Ctx {
    fn search(&self, seed: u64) -> CutSearch {
        CutSearch { exhaustive_cap: self.exhaustive_cap, seed, exec: self.exec, local_search_starts: 4 }
    }

    fn dependence(&self, q: &Rational, c: &Rational, c0: &Rational, seed: u64) -> DependenceConfig {
        DependenceConfig { q: q.clone(), c: c.clone(), c0: c0.clone(), search: self.search(seed) }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx {
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
        exhaustive_cap: cli.exhaustive_cap,
    };
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Udg(a) => udg(&ctx, a),
        Command::Prop1(a) => {
            let g: DecoratedUdg = read_json(&a.graph)?;
            let res = prop1(&g.to_colored_graph(), &a.q, &a.c, &ctx.search(a.seed)).map_err(|e| CliError::module("prop1", e))?;
            emit(&res, a.out.as_deref())
        }
        Command::Lindep(a) => {
            let g: DecoratedUdg = read_json(&a.graph)?;
            let rep = extract_dependences(&g, &ctx.dependence(&a.q, &a.c, &a.c0, a.seed))
                .map_err(|e| CliError::module("lindep", e))?;
            emit(&rep, a.out.as_deref())
        }
        Command::Certify(a) => certify(&ctx, a),
        Command::Check(a) => {
            let cert: NormCertificate = read_json(&a.cert)?;
            let rep = check_certificate(&cert);
            emit(&rep, a.out.as_deref())?;
            if rep.ok {
                Ok(())
            } else {
                let details = serde_json::to_value(&rep.failures).expect("failures serialize");
                Err(CliError::failed("check_failed", rep.failures[0].to_string(), details))
            }
        }
        Command::Verify(a) => {
            let cert: NormCertificate = read_json(&a.cert)?;
            let rep = sample_verify(&cert, a.trials, a.seed, ctx.exec);
            emit(&rep, a.out.as_deref())?;
            if rep.found_counterexample() {
                let details = serde_json::json!({
                    "line": rep.line_counterexamples,
                    "boundary": rep.boundary_counterexamples,
                    "sweep_violations": rep.sweep_violations,
                });
                Err(CliError::failed("counterexample", "sampling found a realization", details))
            } else {
                Ok(())
            }
        }
        Command::Pipeline(a) => pipeline(&ctx, a),
    }
}

fn gen(a: GenArgs) -> Result<(), CliError> {
    let poly = |a: &GenArgs| match &a.polygon {
        Some(p) => load_polygon(p),
        None => Ok(pythagorean_polygon()),
    };
    let construct = |r: Result<PointSeq, _>| r.map_err(|e| CliError::module("gen", e));
    let points = match a.kind {
        GenKind::Polygon => {
            let p = match a.name {
                PolygonName::Square => square(),
                PolygonName::Octagon => small_octagon(),
                PolygonName::Dodecagon => small_dodecagon(),
                PolygonName::Pythagorean => pythagorean_polygon(),
                PolygonName::Regular if a.m >= 2 => rational_regular(a.m),
                PolygonName::Regular => return Err(CliError::input("--m must be at least 2")),
            };
            return emit(&p, a.out.as_deref());
        }
        GenKind::SubsetSum => {
            let k = required(a.k, "k", "subset-sum")?;
            let vs = generic_unit_vectors(&poly(&a)?, k).map_err(|e| CliError::module("gen", e))?;
            construct(subset_sum_pointset(&vs))?
        }
        GenKind::FlatSide => construct(flat_side_quadratic(required(a.n, "n", "flat-side")?))?,
        GenKind::Grid => {
            let (w, h) = (required(a.w, "w", "grid")?, required(a.h, "h", "grid")?);
            construct(grid_pointset(w, h, a.step.as_ref().unwrap_or(&Rational::one())))?
        }
        GenKind::SideCluster => {
            let side = required(a.side, "side", "side-cluster")?;
            let n = required(a.n, "n", "side-cluster")?;
            let step = required(a.step.clone(), "step", "side-cluster")?;
            construct(side_cluster_pointset(&poly(&a)?, side, n, &step))?
        }
    };
    emit(&points, a.out.as_deref())
}

/// `color,direction_x,direction_y,count`, one row per color.
pub fn color_counts_csv(g: &DecoratedUdg) -> String {
    let counts = g.color_counts();
    let mut s = String::from("color,direction_x,direction_y,count\n");
    for c in 1..=g.k() {
        let (dx, dy) = match g.directions() {
            Some(d) => (d[c - 1].x.to_string(), d[c - 1].y.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(s, "{c},{dx},{dy},{}", counts[c]).unwrap();
    }
    s
}

fn udg(ctx: &Ctx, a: UdgArgs) -> Result<(), CliError> {
    let points: PointSeq = read_json(&a.points)?;
    let norm = load_norm(&a.norm)?;
    let g = build_udg_with(&points, &norm, ctx.exec);
    if let Some(p) = &a.counts {
        write_atomic(p, color_counts_csv(&g).as_bytes())?;
    }
    if let Some(p) = &a.svg {
        write_atomic(p, svg::render(&points, &g).as_bytes())?;
    }
    emit(&g, a.out.as_deref())
}

fn certify(ctx: &Ctx, a: CertifyArgs) -> Result<(), CliError> {
    let system: DependenceSystem = read_json(&a.system)?;
    let polygon = load_polygon(&a.polygon)?;
    let opts = CertifyOptions { exec: ctx.exec, ..CertifyOptions::default() };
    let cert = certify_box(&system, &polygon, &a.delta0, &angle(&a.eta)?, &opts)
        .and_then(witness_norm)
        .map_err(|e| CliError::module("certify", e))?;
    let cert = match (&a.base, a.eps) {
        (Some(b), Some(eps)) => with_base(cert, load_norm(b)?, eps),
        _ => cert,
    };
    emit(&cert, a.out.as_deref())
}

fn pipeline(ctx: &Ctx, a: PipelineArgs) -> Result<(), CliError> {
    let points: PointSeq = read_json(&a.points)?;
    let norm = load_norm(&a.norm)?;
    let cfg = PipelineConfig {
        eps: a.eps.clone(),
        eta: angle(&a.eta)?,
        dependence: ctx.dependence(&a.q, &a.c, &a.c0, a.seed),
        certify: CertifyOptions { exec: ctx.exec, ..CertifyOptions::default() },
        trials: a.trials,
        seed: a.seed,
        exec: ctx.exec,
    };
    let rep = run_pipeline(&points, &norm, &cfg).map_err(|e| CliError::module("pipeline", e))?;
    if let Some(p) = &a.cert_out {
        write_atomic(p, io::to_json(&rep.certificate).as_bytes())?;
    }
    emit(&rep, a.out.as_deref())?;
    if rep.passed() {
        Ok(())
    } else {
        let details = serde_json::json!({
            "rows_hold_on_input": rep.rows_hold_on_input,
            "check": rep.check.failures,
            "counterexample": rep.sample.found_counterexample(),
        });
        Err(CliError::failed("pipeline_failed", "the certificate did not survive checking", details))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use udnorm_core::linalg::rat;
    use udnorm_core::norms::square;

    #[test]
    fn rational_flags() {
        assert_eq!(positive_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(positive_rational("2").unwrap(), rat(2, 1));
        assert!(positive_rational("0").is_err());
        assert!(positive_rational("-1/3").is_err());
        assert!(positive_rational("x").is_err());
    }

    #[test]
    fn norm_arguments() {
        assert_eq!(load_norm("euclidean").unwrap(), NormOracle::Euclidean);
        assert_eq!(load_norm("p=3/2").unwrap(), NormOracle::pnorm(rat(3, 2)).unwrap());
        assert_eq!(load_norm("p=1/2").unwrap_err().kind, "input");
    }

    #[test]
    fn counts_csv_rows() {
        let pts = flat_side_quadratic(4).unwrap();
        let g = udnorm_core::udg::build_udg(&pts, &square());
        let csv = color_counts_csv(&g);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], "color,direction_x,direction_y,count");
        assert_eq!(rows.len(), g.k() + 1);
        let total: usize = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, 4);
    }
}
