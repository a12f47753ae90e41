mod plot;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use cartan_core::circulant::{eigenvalue_reports_c, eigenvalue_reports_n, ReducedCountMatrixN};
use cartan_core::correspondence::{build_h_s, build_psi, build_psi_plus, restrict_to_affine};
use cartan_core::cosets::{decompose, enumerate_subgroup, unipotent, SubgroupKind};
use cartan_core::modular_arith::{is_prime, nonsquares};
use cartan_core::verify::{CheckStatus, RunReport};
use cartan_core::{
    run_verification, CoefficientScheme, GroupElement, PrimeContext, ProjectivePoint, Side, VerifyOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

const EXIT_USAGE: u8 = 64;
const DEFAULT_MAX_ELL: u64 = 101;

#[derive(Parser)]
#[command(name = "cartan", version, about = "Geodesic and path intertwiners for GL2(F_l), with exact certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification pipeline.
    Verify(VerifyArgs),
    /// Write an operator matrix as CSV triplets.
    Export(ExportArgs),
    /// Print the circulant eigenvalue certificates.
    Eigenvalues(EigenArgs),
    /// Decompose a double coset H g K.
    Decompose(DecomposeArgs),
    /// Points of one geodesic or path, as CSV or SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct PrimeArgs {
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    epsilon: Option<u64>,
    #[arg(long)]
    root: Option<u64>,
    /// Allow primes above the default cap of 101.
    #[arg(long)]
    max_ell_unsafe: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "ell_range", required_unless_present = "ell_range")]
    ell: Option<u64>,
    /// Inclusive range `a..b`; every odd prime in it is verified.
    #[arg(long)]
    ell_range: Option<String>,
    #[arg(long, conflicts_with = "all_epsilon")]
    epsilon: Option<u64>,
    #[arg(long)]
    root: Option<u64>,
    /// Verify for every non-square.
    #[arg(long)]
    all_epsilon: bool,
    #[arg(long)]
    skip_cosets: bool,
    /// Repeat the eigenvalue certificates for every primitive root.
    #[arg(long)]
    strict_roots: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_ell_unsafe: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    PsiPlus,
    Psi,
    #[value(name = "h-s")]
    HS,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[arg(long, value_enum)]
    map: MapKind,
    /// Required for `--map h-s`.
    #[arg(long)]
    slope: Option<u64>,
    /// Keep only the columns of affine pairs.
    #[arg(long)]
    restricted: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    #[value(name = "N")]
    N,
    #[value(name = "C")]
    C,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[arg(long, value_enum)]
    case: Case,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    C,
    Cp,
    N,
    Np,
    B,
    G,
}

impl From<Kind> for SubgroupKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::C => SubgroupKind::SplitCartan,
            Kind::Cp => SubgroupKind::NonsplitCartan,
            Kind::N => SubgroupKind::NormalizerSplit,
            Kind::Np => SubgroupKind::NormalizerNonsplit,
            Kind::B => SubgroupKind::Borel,
            Kind::G => SubgroupKind::General,
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[arg(long, value_enum)]
    left: Kind,
    #[arg(long, value_enum)]
    right: Kind,
    /// Use g = (1 s; 0 1).
    #[arg(long, conflicts_with = "element")]
    s: Option<u64>,
    /// Use g = (a b; c d), given as `a,b,c,d`.
    #[arg(long)]
    element: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    /// Endpoints `a,b`; either may be `inf`.
    #[arg(long)]
    pair: String,
    /// Plot the slope-s path from a to b instead of the geodesic.
    #[arg(long)]
    slope: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: PlotFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad input from the user; maps to exit code 64.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn check_ell(ell: u64, unsafe_cap: bool) -> anyhow::Result<()> {
    if ell < 3 || !is_prime(ell) {
        return Err(usage(format!("--ell {ell} is not an odd prime")));
    }
    if ell > DEFAULT_MAX_ELL && !unsafe_cap {
        return Err(usage(format!("--ell {ell} exceeds {DEFAULT_MAX_ELL}; pass --max-ell-unsafe to override")));
    }
    Ok(())
}

fn context(p: &PrimeArgs) -> anyhow::Result<PrimeContext> {
    check_ell(p.ell, p.max_ell_unsafe)?;
    PrimeContext::with_choices(p.ell, p.epsilon, p.root).map_err(|e| usage(e.to_string()))
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn parse_range(s: &str) -> anyhow::Result<(u64, u64)> {
    let (a, b) = s.split_once("..").ok_or_else(|| usage(format!("--ell-range {s}: expected a..b")))?;
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|_| usage(format!("--ell-range {s}: bad bound {x}")));
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(usage(format!("--ell-range {s} is empty")));
    }
    Ok((a, b))
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<u8> {
    let ells: Vec<u64> = match (&args.ell, &args.ell_range) {
        (Some(ell), _) => {
            check_ell(*ell, args.max_ell_unsafe)?;
            vec![*ell]
        }
        (None, Some(range)) => {
            let (a, b) = parse_range(range)?;
            let ells: Vec<u64> = (a.max(3)..=b).filter(|&p| is_prime(p)).collect();
            if ells.is_empty() {
                return Err(usage(format!("--ell-range {range} contains no odd prime")));
            }
            for &ell in &ells {
                check_ell(ell, args.max_ell_unsafe)?;
            }
            ells
        }
        (None, None) => return Err(usage("one of --ell or --ell-range is required")),
    };

    let mut jobs = Vec::new();
    for &ell in &ells {
        let epsilons: Vec<Option<u64>> = if args.all_epsilon {
            nonsquares(ell)?.into_iter().map(Some).collect()
        } else {
            vec![args.epsilon]
        };
        for epsilon in epsilons {
            let opts = VerifyOptions {
                epsilon,
                root: args.root,
                skip_cosets: args.skip_cosets,
                strict_roots: args.strict_roots,
                seed: args.seed,
                ..VerifyOptions::new(ell)
            };
            // fail fast on bad --epsilon / --root before any heavy work
            PrimeContext::with_choices(ell, epsilon, args.root).map_err(|e| usage(e.to_string()))?;
            jobs.push(opts);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs.unwrap_or(0)).build()?;
    let reports: Vec<RunReport> = pool.install(|| {
        jobs.par_iter().map(run_verification).collect::<Result<Vec<_>, _>>()
    })?;

    for r in &reports {
        let failed: Vec<&str> =
            r.checks.iter().filter(|c| c.status != CheckStatus::Pass).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            log::info!("l = {} eps = {}: all checks passed", r.ell, r.epsilon);
        } else {
            log::warn!("l = {} eps = {}: not passed: {}", r.ell, r.epsilon, failed.join(", "));
        }
    }
    let code = reports.iter().map(RunReport::exit_code).fold(0, |acc, c| match (acc, c) {
        (1, _) | (_, 1) => 1,
        (2, _) | (_, 2) => 2,
        _ => 0,
    });
    if reports.len() == 1 {
        write_json(&reports[0], args.out.as_deref())?;
    } else {
        write_json(&reports, args.out.as_deref())?;
    }
    Ok(code as u8)
}

fn cmd_export(args: ExportArgs) -> anyhow::Result<u8> {
    let ctx = context(&args.prime)?;
    let (m, side) = match args.map {
        MapKind::PsiPlus => (build_psi_plus(&ctx), Side::N),
        MapKind::Psi => (build_psi(&ctx, &CoefficientScheme::canonical(&ctx))?, Side::C),
        MapKind::HS => {
            let s = args.slope.ok_or_else(|| usage("--map h-s needs --slope"))?;
            (build_h_s(&ctx, s).map_err(|e| usage(e.to_string()))?, Side::C)
        }
    };
    let m = if args.restricted { restrict_to_affine(&m, side)? } else { m };
    let mut w = output(args.out.as_deref())?;
    m.write_csv(&mut w)?;
    w.flush()?;
    Ok(0)
}

fn cmd_eigenvalues(args: EigenArgs) -> anyhow::Result<u8> {
    let ctx = context(&args.prime)?;
    let reports = match args.case {
        Case::N => eigenvalue_reports_n(&ReducedCountMatrixN::from_formula(&ctx), &ctx),
        Case::C => eigenvalue_reports_c(&ctx, &CoefficientScheme::canonical(&ctx))?,
    };
    write_json(&reports, args.out.as_deref())?;
    Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
}

#[derive(Serialize)]
struct DecomposeOutput {
    ell: u64,
    epsilon: u64,
    left: String,
    right: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<u64>,
    g: [u64; 4],
    degree: usize,
    index: usize,
    representatives: Vec<[u64; 4]>,
}

fn cmd_decompose(args: DecomposeArgs) -> anyhow::Result<u8> {
    let ctx = context(&args.prime)?;
    let g = match (&args.s, &args.element) {
        (Some(s), _) => unipotent(*s, &ctx),
        (None, Some(e)) => {
            let v: Vec<i64> = e
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| usage(format!("--element {e}: expected a,b,c,d")))?;
            let [a, b, c, d] = v[..] else { return Err(usage(format!("--element {e}: expected four entries"))) };
            GroupElement::from_signed(a, b, c, d, &ctx).map_err(|e| usage(e.to_string()))?
        }
        (None, None) => GroupElement::identity(),
    };
    let subgroup = |k: Kind| enumerate_subgroup(k.into(), &ctx).map_err(|e| usage(e.to_string()));
    let (h, k) = (subgroup(args.left)?, subgroup(args.right)?);
    let dec = decompose(&h, &g, &k)?;
    write_json(
        &DecomposeOutput {
            ell: ctx.ell(),
            epsilon: ctx.epsilon(),
            left: h.kind().to_string(),
            right: k.kind().to_string(),
            s: args.s,
            g: g.as_tuple(),
            degree: dec.degree,
            index: dec.index,
            representatives: dec.representatives.iter().map(GroupElement::as_tuple).collect(),
        },
        args.out.as_deref(),
    )?;
    Ok(0)
}

fn parse_point(s: &str, ctx: &PrimeContext) -> anyhow::Result<ProjectivePoint> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(ProjectivePoint::Infinity);
    }
    let v: i64 = s.parse().map_err(|_| usage(format!("bad point {s}; expected an integer or inf")))?;
    Ok(ProjectivePoint::Affine(ctx.reduce(v)))
}

fn cmd_plot(args: PlotArgs) -> anyhow::Result<u8> {
    let ctx = context(&args.prime)?;
    let (a, b) = args.pair.split_once(',').ok_or_else(|| usage("--pair expects a,b"))?;
    let (a, b) = (parse_point(a, &ctx)?, parse_point(b, &ctx)?);
    if a == b {
        return Err(usage(format!("--pair {}: points must be distinct", args.pair)));
    }
    let figure = match args.slope {
        None => plot::geodesic(a, b, &ctx)?,
        Some(s) => plot::path(a, b, s, &ctx).map_err(|e| usage(e.to_string()))?,
    };
    if !figure.points.iter().all(|&(x, y)| figure.curve.holds(x, y, &ctx)) {
        anyhow::bail!("{}: a point is off {}", figure.title, figure.curve);
    }
    let mut w = output(args.out.as_deref())?;
    match args.format {
        PlotFormat::Csv => figure.write_csv(&mut w)?,
        PlotFormat::Svg => figure.write_svg(&mut w)?,
    }
    w.flush()?;
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
        Command::Eigenvalues(a) => cmd_eigenvalues(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CARTAN_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
