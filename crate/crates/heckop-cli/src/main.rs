mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use heckop::catalog::lookup;
use heckop::hypergeom::{EstimateRow, FEvaluator, SeriesConfig, SpectralParam, TubePoint};
use heckop::jacobi::{phi_spherical, psi_spherical, Backend};
use heckop::quadrature::TorusGrid;
use heckop::rootdata::{build_root_system, rho_vector, shift_multiplicity, Case, Multiplicity, RhoMode, RootDatum, ShiftSign};
use heckop::suite::{self, RunConfig, SpaceSpec, VerificationReport};
use heckop::transform::{forward_transform, make_bump, synthesize, Measure};
use heckop::weights::{enumerate_lambda_l, DominantWeight};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use io::CliResult;

#[derive(Parser)]
#[command(name = "heckop", version, about = "BC_n hypergeometric and spherical functions with verification suites")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Positive roots with multiplicities, and ρ.
    Roots {
        #[arg(long)]
        space: String,
    },
    /// Λ_l^+ points as CSV.
    Lattice {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        l: i64,
        #[arg(long, default_value_t = 10)]
        max_height: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate F(λ, m; exp(X + iY)).
    EvalF(EvalFArgs),
    /// Evaluate ψ_{μ,l} on the torus.
    EvalPsi {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        l: i64,
        #[arg(long)]
        mu: String,
        #[arg(long, allow_negative_numbers = true)]
        y: String,
    },
    /// Spherical transform of a section (CSV + sidecar) or of a bump.
    Transform(TransformArgs),
    /// Section from a coefficient CSV.
    Synthesize(SynthesizeArgs),
    /// Run one verification suite.
    Verify(VerifyArgs),
    /// Run every suite and write one report.
    Report(RunArgs),
}

#[derive(Args)]
struct EvalFArgs {
    /// JSON with {rank, case, mult, lambda_re, lambda_im, X, Y, tol}.
    #[arg(long, conflicts_with = "space")]
    input: Option<PathBuf>,
    #[arg(long)]
    space: Option<String>,
    /// Evaluate at m_±(l) of the space instead of its own multiplicity.
    #[arg(long, allow_negative_numbers = true)]
    l: Option<i64>,
    #[arg(long, default_value = "plus")]
    shift: String,
    #[arg(long, allow_negative_numbers = true)]
    lambda_re: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    lambda_im: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value = "series")]
    backend: String,
}

#[derive(Deserialize)]
struct EvalFInput {
    rank: usize,
    case: Case,
    /// `[m_s, m_m, m_l]`
    mult: [f64; 3],
    lambda_re: Vec<f64>,
    lambda_im: Vec<f64>,
    #[serde(rename = "X")]
    x: Vec<f64>,
    #[serde(rename = "Y")]
    y: Vec<f64>,
    tol: Option<f64>,
}

#[derive(Serialize)]
struct EvalFOutput {
    re: f64,
    im: f64,
    abs: f64,
    perturbed: bool,
    achieved: Option<f64>,
    height: Option<usize>,
    backend: String,
}

#[derive(Args)]
struct GridArgs {
    /// Points per torus axis.
    #[arg(long = "N", default_value_t = 512)]
    n: usize,
    /// Periodic trapezoid rule instead of the alcove Gauss rule.
    #[arg(long)]
    uniform: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    space: String,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    l: i64,
    /// Section CSV written by `synthesize` (sidecar `<file>.json` alongside).
    #[arg(long, conflicts_with = "bump")]
    input: Option<PathBuf>,
    /// Transform the W-invariant bump of this support radius.
    #[arg(long)]
    bump: Option<f64>,
    #[arg(long, default_value_t = 12)]
    max_height: i64,
    #[command(flatten)]
    grid: GridArgs,
    /// Also write the bump section here.
    #[arg(long)]
    section: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    coeffs: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    space: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    l: Option<i64>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated suite names.
    #[arg(long)]
    only: Option<String>,
    /// Report JSON path (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: c-normalization, degenerate, weyl-invariance, bridge, rank1, estimate,
    /// eta-bound, jacobi, psi-bound, dimension, plancherel, lattice, pw-type.
    suite: String,
    #[command(flatten)]
    run: RunArgs,
    /// Per-point estimate table (estimate suite only).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn space(key: &str) -> CliResult<RootDatum> {
    Ok(lookup(key)?.root_datum()?)
}

fn shift_sign(s: &str) -> CliResult<ShiftSign> {
    match s {
        "plus" | "+" => Ok(ShiftSign::Plus),
        "minus" | "-" => Ok(ShiftSign::Minus),
        _ => Err(format!("shift must be plus or minus, got {s:?}").into()),
    }
}

fn roots(key: &str) -> CliResult<()> {
    let rd = space(key)?;
    let mut w = io::writer(None)?;
    let mut header: Vec<String> = (1..=rd.rank).map(|j| format!("e{j}")).collect();
    header.extend(["orbit", "multiplicity"].map(String::from));
    w.write_record(&header)?;
    for r in rd.carrier_roots() {
        let mut row: Vec<String> = r.coords.iter().map(|c| c.to_string()).collect();
        row.push(format!("{:?}", r.orbit).to_lowercase());
        row.push(rd.mult.of(r.orbit).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    let rho = rho_vector(&rd, &rd.mult, RhoMode::Rho);
    eprintln!("case {:?}, |W| = {}, rho = {rho:?}", rd.case, rd.weyl_size());
    Ok(())
}

fn lattice(key: &str, l: i64, max_height: i64, output: Option<PathBuf>) -> CliResult<()> {
    let rd = space(key)?;
    let mut w = io::writer(output.as_deref())?;
    let mut header: Vec<String> = (1..=rd.rank).map(|j| format!("mu{j}")).collect();
    header.extend(["l", "mu0", "height"].map(String::from));
    w.write_record(&header)?;
    for p in enumerate_lambda_l(&rd, l, max_height) {
        let mut row: Vec<String> = p.mu.iter().map(|c| c.to_string()).collect();
        row.extend([p.l.to_string(), p.mu0.to_string(), p.height().to_string()]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn spectral(rank: usize, re: &[f64], im: &[f64]) -> CliResult<SpectralParam> {
    if re.len() != rank || im.len() != rank {
        return Err(heckop::Error::Domain(format!("expected {rank} coordinates for lambda")).into());
    }
    Ok(SpectralParam::from_parts(re, im))
}

fn eval_f(a: EvalFArgs) -> CliResult<()> {
    let (rd, m, lambda, z, tol) = if let Some(path) = &a.input {
        let inp: EvalFInput = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let m = Multiplicity::new(inp.mult[0], inp.mult[1], inp.mult[2]);
        let rd = build_root_system(inp.rank, inp.case, m)?;
        let lambda = spectral(rd.rank, &inp.lambda_re, &inp.lambda_im)?;
        (rd, m, lambda, TubePoint::new(inp.x, inp.y), inp.tol.unwrap_or(a.tol))
    } else {
        let rd = space(a.space.as_deref().ok_or("either --input or --space is required")?)?;
        let m = match a.l {
            Some(l) => shift_multiplicity(&rd.mult, l, shift_sign(&a.shift)?),
            None => rd.mult,
        };
        let n = rd.rank;
        let get = |s: &Option<String>| -> CliResult<Vec<f64>> {
            match s {
                Some(s) => io::parse_floats(s),
                None => Ok(vec![0.0; n]),
            }
        };
        let lambda = spectral(n, &get(&a.lambda_re)?, &get(&a.lambda_im)?)?;
        (rd, m, lambda, TubePoint::new(get(&a.x)?, get(&a.y)?), a.tol)
    };
    if z.x.len() != rd.rank || z.y.len() != rd.rank {
        return Err(heckop::Error::Domain(format!("expected {} coordinates for X and Y", rd.rank)).into());
    }
    let backend: Backend = a.backend.parse()?;
    let out = match backend {
        Backend::Series => {
            let cfg = SeriesConfig { tol, ..SeriesConfig::for_rank(rd.rank) };
            let v = FEvaluator::new(&rd, &m, &lambda, cfg)?.eval(&z)?;
            EvalFOutput {
                re: v.value.re,
                im: v.value.im,
                abs: v.value.norm(),
                perturbed: v.perturbed,
                achieved: Some(v.achieved),
                height: Some(v.height),
                backend: a.backend,
            }
        }
        Backend::Rank1 => {
            if rd.rank != 1 {
                return Err(heckop::Error::Domain("rank1 backend needs n = 1".into()).into());
            }
            let v = heckop::rank1::f_rank1(&m, lambda.lambda[0], z.coords()[0])?;
            EvalFOutput { re: v.re, im: v.im, abs: v.norm(), perturbed: false, achieved: None, height: None, backend: a.backend }
        }
        Backend::Poly => {
            let l = a.l.ok_or("the poly backend evaluates phi_{lambda,l}; pass --l")?;
            let space_rd = space(a.space.as_deref().ok_or("the poly backend needs --space")?)?;
            let v = phi_spherical(&space_rd, l, &lambda, &z, ShiftSign::Plus, Backend::Poly)?
                / heckop::jacobi::eta_eval(&space_rd, l, ShiftSign::Plus, &z)?;
            EvalFOutput { re: v.re, im: v.im, abs: v.norm(), perturbed: false, achieved: None, height: None, backend: a.backend }
        }
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn eval_psi(key: &str, l: i64, mu: &str, y: &str) -> CliResult<()> {
    let rd = space(key)?;
    let mu = DominantWeight::new(&rd, io::parse_ints(mu)?, l);
    let y = io::parse_floats(y)?;
    if y.len() != rd.rank {
        return Err(heckop::Error::Domain(format!("expected {} torus coordinates", rd.rank)).into());
    }
    let v = psi_spherical(&rd, l, &mu, &y)?;
    println!("{}", serde_json::json!({ "mu": mu.mu, "l": l, "y": y, "psi": v }));
    Ok(())
}

fn grid_for(rank: usize, g: &GridArgs, breaks: &[f64]) -> CliResult<Arc<TorusGrid>> {
    if g.uniform || breaks.is_empty() || rank != 1 {
        return Ok(Arc::new(TorusGrid::with_resolution(rank, g.n, g.uniform)?));
    }
    Ok(Arc::new(TorusGrid::alcove_with_breaks(rank, (g.n / 4).max(2), breaks)?))
}

fn transform(a: TransformArgs) -> CliResult<()> {
    let rd = space(&a.space)?;
    let f = match (&a.input, a.bump) {
        (Some(p), _) => io::read_section(p)?,
        (None, Some(r)) => {
            let breaks: Vec<f64> = if r < std::f64::consts::FRAC_PI_2 { vec![r] } else { vec![] };
            make_bump(&rd, a.l, r, grid_for(rd.rank, &a.grid, &breaks)?)?
        }
        (None, None) => return Err("either --input or --bump is required".into()),
    };
    if f.grid.rank != rd.rank {
        return Err(heckop::Error::Mismatch("section rank differs from the space rank".into()).into());
    }
    if let Some(p) = &a.section {
        io::write_section(p, &f)?;
    }
    let mus: Vec<DominantWeight> =
        enumerate_lambda_l(&rd, f.l, a.max_height).into_iter().filter(|w| w.height() <= a.max_height).collect();
    let coeffs = forward_transform(&rd, &f, &mus)?;
    let meas = Measure::new(&rd, f.l, f.grid.clone())?;
    let dims = mus.iter().map(|w| meas.dimension(w)).collect::<heckop::Result<Vec<_>>>()?;
    io::write_coefficients(a.output.as_deref(), &coeffs, &dims)
}

fn synthesize_cmd(a: SynthesizeArgs) -> CliResult<()> {
    let rd = space(&a.space)?;
    let coeffs = io::read_coefficients(&a.coeffs, &rd)?;
    let f = synthesize(&rd, &coeffs, grid_for(rd.rank, &a.grid, &[])?)?;
    io::write_section(&a.output, &f)
}

fn run_config(a: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg: RunConfig = match &a.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &a.space {
        cfg.space = Some(SpaceSpec::Key(s.clone()));
    }
    if a.l.is_some() {
        cfg.l = a.l;
    }
    if let Some(n) = a.n {
        cfg.grid_n = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(e) = a.eps {
        cfg.eps = e;
    }
    if let Some(o) = &a.only {
        cfg.only = o.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &VerificationReport, output: Option<&std::path::Path>) -> CliResult<bool> {
    for c in &report.checks {
        let tag = match (c.pass, c.asserted) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "fail (report only)",
        };
        eprintln!("[{tag}] {} / {}: {:.3e} vs {:.3e}", c.suite, c.name, c.measured, c.bound);
    }
    let s = report.summary;
    eprintln!("{} checks: {} passed, {} failed, {} report-only", s.total, s.passed, s.failed, s.report_only);
    io::write_text(output, &report.to_json())?;
    Ok(report.all_asserted_pass())
}

fn write_estimate_rows(path: &std::path::Path, runs: &[suite::EstimateRun]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["space", "multiplicity", "lambda_re", "lambda_im", "X", "Y", "abs_F", "bound", "ratio"])?;
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(";");
    for run in runs {
        for EstimateRow { lambda, z, abs_f, bound, ratio } in &run.report.rows {
            let re: Vec<f64> = lambda.lambda.iter().map(|c: &Complex64| c.re).collect();
            let im: Vec<f64> = lambda.lambda.iter().map(|c| c.im).collect();
            w.write_record([
                run.space.clone(),
                run.label.clone(),
                join(&re),
                join(&im),
                join(&z.x),
                join(&z.y),
                format!("{abs_f:.6e}"),
                format!("{bound:.6e}"),
                format!("{ratio:.6e}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn verify(a: VerifyArgs) -> CliResult<bool> {
    let cfg = run_config(&a.run)?;
    if !suite::SUITES.contains(&a.suite.as_str()) {
        return Err(format!("unknown suite {:?}; expected one of {}", a.suite, suite::SUITES.join(", ")).into());
    }
    let checks = if a.suite == "estimate" {
        let runs = suite::estimate_runs(&cfg)?;
        if let Some(p) = &a.csv {
            write_estimate_rows(p, &runs)?;
        }
        suite::estimate_records(&runs)
    } else {
        suite::run_suite(&a.suite, &cfg)?
    };
    emit(&VerificationReport::new(&a.suite, &cfg, checks), a.run.output.as_deref())
}

fn report(a: RunArgs) -> CliResult<bool> {
    let cfg = run_config(&a)?;
    let start = std::time::Instant::now();
    let rep = suite::full_suite(&cfg)?;
    eprintln!("finished in {:.1} s", start.elapsed().as_secs_f64());
    emit(&rep, a.output.as_deref())
}

fn configure_threads() {
    let Ok(v) = std::env::var("HECKOP_THREADS") else { return };
    let Ok(n) = v.trim().parse::<usize>() else {
        eprintln!("ignoring HECKOP_THREADS={v:?}: not a number");
        return;
    };
    if n <= 1 {
        heckop::par::set_sequential(true);
        return;
    }
    #[cfg(feature = "parallel")]
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        eprintln!("thread pool: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result: CliResult<bool> = match cli.cmd {
        Command::Roots { space } => roots(&space).map(|_| true),
        Command::Lattice { space, l, max_height, output } => lattice(&space, l, max_height, output).map(|_| true),
        Command::EvalF(a) => eval_f(a).map(|_| true),
        Command::EvalPsi { space, l, mu, y } => eval_psi(&space, l, &mu, &y).map(|_| true),
        Command::Transform(a) => transform(a).map(|_| true),
        Command::Synthesize(a) => synthesize_cmd(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
