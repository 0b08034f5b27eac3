//! `wkstab`: weighted K-stability checks for rank-two spherical Fano threefolds.

mod json;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use wkstab_core::measures::{
    cases_by_mori_mukai, catalog, find_case, quadric_mu_density, CaseKind, MeasurePair,
};
use wkstab_core::poly::{format_rational, int, parse_rational, to_f64, Rational};
use wkstab_core::stability::{
    classify, destabilizing_weight, find_threshold, insensitivity_certificate, logpair_t0, Classification,
    StabilityError, DEFAULT_REL_TOL,
};
use wkstab_core::weights::{ClosedFormCase, WeightSpec};
use wkstab_core::{MomentPolytope, Point};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bracket(StabilityError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Bracket(_) => 6,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(name = "wkstab", version, about = "Weighted K-stability of rank-two spherical Fano varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in cases.
    Catalog {
        #[arg(long, conflicts_with = "mm")]
        id: Option<String>,
        /// Mori–Mukai identifier, e.g. 1-16.
        #[arg(long)]
        mm: Option<String>,
    },
    /// Print the μ and ν densities of a case.
    Measures {
        #[command(flatten)]
        case: CaseArgs,
        /// Write sampled densities as CSV.
        #[arg(long)]
        plot_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 201, requires = "plot_csv")]
        samples: usize,
    },
    /// Classify a case against a weight.
    Check {
        #[command(flatten)]
        case: CaseArgs,
        /// Weight, e.g. const:1, poly:1,0,2, cosh:a=1.5, sech, expsum:(1,2);(1,-2), bump:lo=1,hi=2,eps=0.1,sym=true.
        #[arg(long)]
        weight: String,
        /// Relative verdict tolerance.
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        tol: f64,
    },
    /// Locate a₀ with μ(cosh(a₀·)) = 0.
    Threshold {
        id: String,
        #[arg(long, default_value = "cosh")]
        family: String,
        #[arg(long, default_value = "0.1,4", value_parser = parse_f64_pair)]
        bracket: (f64, f64),
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Search for λ with μ + λν a positive measure.
    Certify {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value = "-10,10", value_parser = parse_rational_pair, allow_hyphen_values = true)]
        lambda_range: (Rational, Rational),
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Log-pair threshold t₀ and the verdicts there.
    Logpair {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Quadric Q^{n-2}: mass and a destabilizing weight.
    Quadric {
        #[arg(allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 16)]
        budget: usize,
    },
}

#[derive(Args, Clone)]
struct CaseArgs {
    /// Catalog identifier, e.g. 3-2-18.
    #[arg(required_unless_present_any = ["logpair", "quadric", "polytope_file"])]
    id: Option<String>,
    /// Log pair with coefficient t in [0, 1).
    #[arg(long, conflicts_with_all = ["id", "quadric", "polytope_file"])]
    logpair: Option<String>,
    /// Quadric Q^{n-2}, n >= 5.
    #[arg(long, conflicts_with_all = ["id", "polytope_file"])]
    quadric: Option<i64>,
    /// JSON file {vertices: [[x, y], ...], kappa: [x, y], dh_exponent: k}.
    #[arg(long, conflicts_with = "id")]
    polytope_file: Option<PathBuf>,
}

fn parse_f64_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected a,b")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_rational_pair(s: &str) -> Result<(Rational, Rational), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let a = parse_rational(a.trim()).map_err(|e| e.to_string())?;
    let b = parse_rational(b.trim()).map_err(|e| e.to_string())?;
    Ok((a, b))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
}

impl Number {
    fn rational(&self) -> Result<Rational, CliError> {
        match self {
            Number::Text(s) => parse_rational(s).map_err(usage),
            Number::Int(i) => Ok(int(*i)),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeFile {
    vertices: Vec<[Number; 2]>,
    kappa: [Number; 2],
    dh_exponent: u32,
}

fn read_polytope(path: &Path) -> Result<MomentPolytope, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { context: format!("reading {}", path.display()), source })?;
    let file: PolytopeFile =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let point =
        |p: &[Number; 2]| -> Result<Point, CliError> { Ok(Point::new(p[0].rational()?, p[1].rational()?)) };
    let vertices = file.vertices.iter().map(point).collect::<Result<Vec<_>, _>>()?;
    MomentPolytope::new(vertices, point(&file.kappa)?, file.dh_exponent).map_err(usage)
}

impl CaseArgs {
    fn resolve(&self) -> Result<MeasurePair, CliError> {
        if let Some(t) = &self.logpair {
            let t = parse_rational(t).map_err(usage)?;
            return MeasurePair::logpair(&t).map_err(usage);
        }
        if let Some(n) = self.quadric {
            return MeasurePair::quadric(n).map_err(usage);
        }
        if let Some(path) = &self.polytope_file {
            let p = read_polytope(path)?;
            return Ok(MeasurePair::from_polytope(path.display().to_string(), CaseKind::Custom, p));
        }
        let id = self.id.as_deref().unwrap_or_default();
        MeasurePair::by_id(id).ok_or_else(|| usage(format!("unknown case id {id:?}")))
    }

    fn echo(&self) -> Value {
        let mut v = json!({});
        if let Some(id) = &self.id {
            v["id"] = json!(id);
        }
        if let Some(t) = &self.logpair {
            v["logpair"] = json!(t);
        }
        if let Some(n) = self.quadric {
            v["quadric"] = json!(n);
        }
        if let Some(p) = &self.polytope_file {
            v["polytope_file"] = json!(p.display().to_string());
        }
        v
    }
}

/// A finished command: the JSON record and the process exit code.
struct Outcome {
    record: Value,
    code: u8,
}

impl Outcome {
    fn ok(record: Value) -> Self {
        Self { record, code: 0 }
    }
}

fn verdict_code(c: Classification) -> u8 {
    match c {
        Classification::Polystable => 0,
        Classification::StrictlySemistable => 3,
        Classification::Unstable => 4,
        Classification::FutakiNonzero => 5,
    }
}

fn cmd_catalog(id: Option<String>, mm: Option<String>) -> Result<Outcome, CliError> {
    let cases: Vec<_> = match (&id, &mm) {
        (Some(id), _) => vec![find_case(id).ok_or_else(|| usage(format!("unknown case id {id:?}")))?],
        (None, Some(mm)) => {
            let found = cases_by_mori_mukai(mm);
            if found.is_empty() {
                return Err(usage(format!("no case with Mori-Mukai id {mm:?}")));
            }
            found
        }
        (None, None) => catalog().iter().collect(),
    };
    let rows: Vec<Value> = cases.into_iter().map(json::case).collect();
    Ok(Outcome::ok(json::record(
        "catalog",
        json!({ "id": id, "mm": mm }),
        json!({ "count": rows.len(), "cases": rows }),
        json!({ "vertices": "moment polytopes of the catalog, listed order", "kappa": "(2, 0) for every threefold" }),
    )))
}

fn write_csv(path: &Path, case: &MeasurePair, samples: usize) -> Result<(), CliError> {
    let (lo, hi) = case.support();
    let n = samples.max(2);
    let mut out = String::from("y,density_mu,density_nu\n");
    for i in 0..n {
        let y = lo + (hi - lo) * int(i as i64) / int(n as i64 - 1);
        let mu = to_f64(&case.mu.density.eval(&y));
        let nu = to_f64(&case.nu.density.eval(&y));
        out.push_str(&format!("{},{mu},{nu}\n", to_f64(&y)));
    }
    let io = |source| CliError::Io { context: format!("writing {}", path.display()), source };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(out.as_bytes()).map_err(io)
}

fn cmd_measures(case: CaseArgs, plot_csv: Option<PathBuf>, samples: usize) -> Result<Outcome, CliError> {
    let pair = case.resolve()?;
    let mut results = json::measure_pair(&pair);
    if let CaseKind::Quadric { n } = pair.kind {
        let folded = quadric_mu_density(n).map_err(usage)?;
        results["mu_folded"] = json::measure(&folded);
    }
    if let Some(path) = &plot_csv {
        write_csv(path, &pair, samples)?;
    }
    let mut inputs = case.echo();
    inputs["label"] = json!(pair.label);
    if let Some(p) = &plot_csv {
        inputs["plot_csv"] = json!(p.display().to_string());
        inputs["samples"] = json!(samples);
    }
    Ok(Outcome::ok(json::record(
        "measures",
        inputs,
        results,
        json!({ "densities": "exact fibre integration of (x - kappa_x) x^k and (y - kappa_y) x^k over slices" }),
    )))
}

fn cmd_check(case: CaseArgs, weight: String, tol: f64) -> Result<Outcome, CliError> {
    let pair = case.resolve()?;
    let g: WeightSpec = weight.parse().map_err(usage)?;
    let v = classify(&pair, &g, tol).map_err(usage)?;
    let mut inputs = case.echo();
    inputs["weight"] = json!(g.to_string());
    inputs["tol"] = json!(tol);
    let mut results = json::verdict(&v);
    results["weight_is_even"] = json!(g.is_even());
    Ok(Outcome {
        code: verdict_code(v.classification),
        record: json::record(
            "check",
            inputs,
            results,
            json!({ "rule": "futaki = nu(g) must vanish; margin = mu(g) decides polystable / semistable / unstable" }),
        ),
    })
}

fn cmd_threshold(id: String, family: String, bracket: (f64, f64), tol: f64) -> Result<Outcome, CliError> {
    if family != "cosh" {
        return Err(usage(format!("unsupported family {family:?}; only cosh is available")));
    }
    let case = ClosedFormCase::from_dm_id(&id)
        .ok_or_else(|| usage(format!("no closed form for {id:?}; use 3-2-18 or 3-2-19")))?;
    let r = find_threshold(case, bracket, tol).map_err(|e| match e {
        StabilityError::Bracket { .. } => CliError::Bracket(e),
        other => usage(other),
    })?;
    Ok(Outcome::ok(json::record(
        "threshold",
        json!({ "id": id, "family": family, "bracket": [bracket.0, bracket.1], "tol": tol }),
        json::threshold(&r, tol),
        json!({ "objective": "closed form of mu(cosh(a y)); cross-checked by adaptive Gauss-Legendre quadrature" }),
    )))
}

fn cmd_certify(case: CaseArgs, lambda_range: (Rational, Rational), grid: usize) -> Result<Outcome, CliError> {
    if grid == 0 {
        return Err(usage("grid must be at least 1"));
    }
    let pair = case.resolve()?;
    let cert = insensitivity_certificate(&pair, (&lambda_range.0, &lambda_range.1), grid);
    let results = match &cert {
        Some(c) => json::certificate(c),
        None => json!({ "found": false, "message": "no certificate found on search set" }),
    };
    let mut inputs = case.echo();
    inputs["lambda_range"] = json!([format_rational(&lambda_range.0), format_rational(&lambda_range.1)]);
    inputs["grid"] = json!(grid);
    Ok(Outcome::ok(json::record(
        "certify",
        inputs,
        results,
        json!({
            "search_order": "0, 2, 2/3, then the grid",
            "semantics": "a certificate proves weight-insensitive polystability; absence proves nothing",
        }),
    )))
}

fn cmd_logpair(tol: f64) -> Result<Outcome, CliError> {
    let r = logpair_t0(tol).map_err(usage)?;
    let precise = logpair_t0(1e-15).map_err(usage)?;
    let case = MeasurePair::logpair(&precise.t0_rational()).map_err(usage)?;
    let constant = classify(&case, &WeightSpec::constant(1), DEFAULT_REL_TOL).map_err(usage)?;
    let sech = classify(&case, &WeightSpec::Sech, DEFAULT_REL_TOL).map_err(usage)?;
    Ok(Outcome::ok(json::record(
        "logpair",
        json!({ "tol": tol }),
        json!({
            "t0": r.t0,
            "t0_interval": [json::rational(&r.interval.0), json::rational(&r.interval.1)],
            "mass_polynomial_in_t": json::polynomial(&r.mass_polynomial),
            "verdicts": { "const:1": json::verdict(&constant), "sech": json::verdict(&sech) },
        }),
        json!({ "t0": "root in (0, 1) of mu_t(1), isolated exactly; closed form (sqrt(10) - 2)/3" }),
    )))
}

fn cmd_quadric(n: i64, budget: usize) -> Result<Outcome, CliError> {
    let case = MeasurePair::quadric(n).map_err(usage)?;
    let (g, v) = destabilizing_weight(&case, budget, DEFAULT_REL_TOL).map_err(usage)?;
    let lo = int(n - 2) / int(n - 3);
    Ok(Outcome::ok(json::record(
        "quadric",
        json!({ "n": n, "budget": budget }),
        json!({
            "mu_total": json::rational(&case.mu.density.total()),
            "negative_region": [json::rational(&lo), json::rational(&int(n - 2))],
            "destabilizing_weight": g.to_string(),
            "verdict": json::verdict(&v),
        }),
        json!({ "weight": "symmetrized smoothed indicator of [(n-2)/(n-3), n-2], edge width halved until unstable" }),
    )))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Catalog { id, mm } => cmd_catalog(id, mm),
        Command::Measures { case, plot_csv, samples } => cmd_measures(case, plot_csv, samples),
        Command::Check { case, weight, tol } => cmd_check(case, weight, tol),
        Command::Threshold { id, family, bracket, tol } => cmd_threshold(id, family, bracket, tol),
        Command::Certify { case, lambda_range, grid } => cmd_certify(case, lambda_range, grid),
        Command::Logpair { tol } => cmd_logpair(tol),
        Command::Quadric { n, budget } => cmd_quadric(n, budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.record).expect("JSON values serialize");
            // A closed pipe downstream is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("wkstab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
