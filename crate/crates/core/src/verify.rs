//! The full verification pipeline for one prime.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circulant::{
    build_block_matrix_c, build_block_matrix_n, det_cross_check_c, det_cross_check_n, eigenvalue_reports_c,
    eigenvalue_reports_n, matches_chart_collapse, reduce_block_matrix_c, reduce_mod_frak_l, verify_chart_conjugacy_c,
    verify_chart_conjugacy_n, DetCrossCheck, EigenvalueReport, ReducedCountMatrixC, ReducedCountMatrixN,
};
use crate::correspondence::{
    build_h_s, build_psi, build_psi_plus, geodesic_points, is_equivariant_at, on_geodesic_conic, on_path_conic,
    path_points, restrict_to_affine, CoefficientScheme, OperatorMatrix, Side,
};
use crate::cosets::{coset_operator, decompose, enumerate_subgroup, unipotent, SubgroupKind};
use crate::error::Result;
use crate::exact_linalg::{det_mod_p, rank_exact, IntMatrix, RankCertificate, RankPolicy};
use crate::geometry::{enumerate_c, enumerate_h, enumerate_pairs_ordered, enumerate_pairs_unordered, BasisKind, GroupElement};
use crate::modular_arith::{primitive_roots, PrimeContext};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `l` for which the coset operators are compared with the
/// geometric builders.
pub const COINCIDENCE_MAX_ELL: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub ell: u64,
    pub epsilon: Option<u64>,
    pub root: Option<u64>,
    pub skip_cosets: bool,
    /// Repeat the eigenvalue certificates for every primitive root.
    pub strict_roots: bool,
    /// Seeds equivariance sampling and the random primes of rank escalation.
    pub seed: u64,
    pub equivariance_samples: usize,
    /// Per-slope ranks of `H_s` are computed only up to this `l`.
    pub h_s_rank_max_ell: u64,
}

impl VerifyOptions {
    pub fn new(ell: u64) -> Self {
        Self {
            ell,
            epsilon: None,
            root: None,
            skip_cosets: false,
            strict_roots: false,
            seed: 0,
            equivariance_samples: 100,
            h_s_rank_max_ell: 11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub expected: usize,
    /// `codomain dimension - rank`.
    pub cokernel_dim: usize,
    pub restricted_nonsingular: bool,
    pub restricted_det_mod_ell: u64,
    pub certificate: RankCertificate,
}

impl TheoremReport {
    fn status(&self) -> CheckStatus {
        if !self.certificate.conclusive {
            CheckStatus::Inconclusive
        } else if self.rank == self.expected && self.restricted_nonsingular {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometryReport {
    pub h_size: usize,
    pub c_size: usize,
    pub unordered_pairs: usize,
    pub ordered_pairs: usize,
    pub geodesics_on_conic: bool,
    pub paths_on_conic: bool,
}

impl GeometryReport {
    fn passed(&self, ell: u64) -> bool {
        let l = ell as usize;
        self.h_size == l * (l - 1) / 2
            && self.c_size == l * (l - 1)
            && self.unordered_pairs == l * (l + 1) / 2
            && self.ordered_pairs == l * (l + 1)
            && self.geodesics_on_conic
            && self.paths_on_conic
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeEntry {
    /// `None` for the `N, id, N'` decomposition.
    pub s: Option<u64>,
    pub degree: usize,
    pub index: usize,
    pub expected: usize,
    /// Every column sum of the matching geometric matrix.
    pub column_sum: Option<i64>,
}

impl DegreeEntry {
    fn passed(&self) -> bool {
        self.degree == self.expected && self.index == self.expected && self.column_sum == Some(self.expected as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceReport {
    pub psi_plus: bool,
    /// `(s, coset operator == H_s)`.
    pub h_s: Vec<(u64, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartReport {
    pub conjugacy_n: bool,
    pub conjugacy_c: bool,
    pub block_circulant_n: bool,
    pub block_circulant_c: bool,
    pub reduced_n_matches_blocks: bool,
    pub reduced_c_matches_blocks: bool,
    pub reduced_circulant_n: bool,
    pub reduced_circulant_c: bool,
}

impl ChartReport {
    fn passed(&self) -> bool {
        self.conjugacy_n
            && self.conjugacy_c
            && self.block_circulant_n
            && self.block_circulant_c
            && self.reduced_n_matches_blocks
            && self.reduced_c_matches_blocks
            && self.reduced_circulant_n
            && self.reduced_circulant_c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenSection {
    pub root: u64,
    pub n_case: Vec<EigenvalueReport>,
    pub c_case: Vec<EigenvalueReport>,
    pub det_n: DetCrossCheck,
    pub det_c: DetCrossCheck,
}

impl EigenSection {
    fn passed(&self) -> bool {
        self.n_case.iter().chain(&self.c_case).all(EigenvalueReport::passed)
            && self.det_n.passed()
            && self.det_c.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HsRank {
    pub s: u64,
    pub rank: usize,
    pub conclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivarianceReport {
    pub psi_plus_samples: usize,
    pub psi_plus_failures: usize,
    pub psi_samples: usize,
    pub psi_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub ell: u64,
    pub epsilon: u64,
    pub g: u64,
    pub geometry: GeometryReport,
    pub theorem1: TheoremReport,
    pub theorem2: TheoremReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<DegreeEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coincidence: Option<CoincidenceReport>,
    pub charts: ChartReport,
    pub eigenvalues: Vec<EigenSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_s_ranks: Option<Vec<HsRank>>,
    pub equivariance: EquivarianceReport,
    pub checks: Vec<Check>,
    pub status: CheckStatus,
    /// Wall-clock milliseconds per phase; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    /// 0 when every check passed, 2 when none failed but some were
    /// inconclusive, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            CheckStatus::Pass => 0,
            CheckStatus::Fail => 1,
            CheckStatus::Inconclusive => 2,
        }
    }

    pub fn without_timings(&self) -> Self {
        Self { timings_ms: BTreeMap::new(), ..self.clone() }
    }
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn run<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        log::info!("{phase}: {ms:.1} ms");
        self.0.insert(phase.to_string(), ms);
        out
    }
}

fn check(name: impl Into<String>, ok: bool) -> Check {
    Check { name: name.into(), status: if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail: None }
}

fn random_element<R: Rng>(rng: &mut R, ctx: &PrimeContext) -> GroupElement {
    loop {
        let l = ctx.ell();
        if let Ok(g) = GroupElement::new(rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l), ctx) {
            return g;
        }
    }
}

/// Counts failures of `m(g v) = g m(v)` over `samples` random `(g, v)`.
pub fn sample_equivariance<R: Rng>(m: &OperatorMatrix, samples: usize, rng: &mut R, ctx: &PrimeContext) -> Result<usize> {
    let mut failures = 0;
    for _ in 0..samples {
        let g = random_element(rng, ctx);
        let col = rng.gen_range(0..m.n_cols());
        if !is_equivariant_at(m, &g, col, ctx)? {
            failures += 1;
        }
    }
    Ok(failures)
}

fn geometry_report(ctx: &PrimeContext) -> Result<GeometryReport> {
    let unordered = enumerate_pairs_unordered(ctx);
    let ordered = enumerate_pairs_ordered(ctx);
    let geodesics_on_conic = unordered.iter().filter(|p| p.is_affine()).all(|p| {
        let (a, b) = (p.lo().affine().unwrap(), p.hi().affine().unwrap());
        geodesic_points(p, ctx).points.iter().all(|w| on_geodesic_conic(a, b, w, ctx))
    });
    let mut paths_on_conic = true;
    for p in ordered.iter().filter(|p| p.is_affine()) {
        let (a, b) = (p.first().affine().unwrap(), p.second().affine().unwrap());
        for s in 1..ctx.ell() {
            paths_on_conic &= path_points(p, s, ctx)?.points.iter().all(|z| on_path_conic(a, b, s, z, ctx));
        }
    }
    Ok(GeometryReport {
        h_size: enumerate_h(ctx).len(),
        c_size: enumerate_c(ctx).len(),
        unordered_pairs: unordered.len(),
        ordered_pairs: ordered.len(),
        geodesics_on_conic,
        paths_on_conic,
    })
}

fn theorem_report(m: &OperatorMatrix, side: Side, ctx: &PrimeContext, seed: u64) -> Result<(TheoremReport, IntMatrix)> {
    let dense = IntMatrix::from(m);
    let policy = RankPolicy { seed, ..RankPolicy::with_first_prime(ctx.ell()) };
    let certificate = rank_exact(&dense, &policy);
    let restricted = IntMatrix::from(&restrict_to_affine(m, side)?);
    let det = det_mod_p(&restricted, ctx.ell())?.value();
    let expected = m.n_rows();
    Ok((
        TheoremReport {
            rows: m.n_rows(),
            cols: m.n_cols(),
            rank: certificate.rank,
            expected,
            cokernel_dim: expected.saturating_sub(certificate.rank),
            restricted_nonsingular: det != 0,
            restricted_det_mod_ell: det,
            certificate,
        },
        restricted,
    ))
}

fn degree_entries(ctx: &PrimeContext, psi_plus: &OperatorMatrix) -> Result<Vec<DegreeEntry>> {
    let uniform = |sums: Vec<i64>| sums.first().copied().filter(|&v| sums.iter().all(|&x| x == v));
    let n = enumerate_subgroup(SubgroupKind::NormalizerSplit, ctx)?;
    let np = enumerate_subgroup(SubgroupKind::NormalizerNonsplit, ctx)?;
    let dec = decompose(&n, &GroupElement::identity(), &np)?;
    let mut out = vec![DegreeEntry {
        s: None,
        degree: dec.degree,
        index: dec.index,
        expected: ctx.r() as usize,
        column_sum: uniform(psi_plus.column_sums()),
    }];
    let c = enumerate_subgroup(SubgroupKind::SplitCartan, ctx)?;
    let cp = enumerate_subgroup(SubgroupKind::NonsplitCartan, ctx)?;
    for s in 1..ctx.ell() {
        let dec = decompose(&c, &unipotent(s, ctx), &cp)?;
        out.push(DegreeEntry {
            s: Some(s),
            degree: dec.degree,
            index: dec.index,
            expected: (ctx.ell() - 1) as usize,
            column_sum: uniform(build_h_s(ctx, s)?.column_sums()),
        });
    }
    Ok(out)
}

fn coincidence_report(ctx: &PrimeContext, psi_plus: &OperatorMatrix) -> Result<CoincidenceReport> {
    let n = enumerate_subgroup(SubgroupKind::NormalizerSplit, ctx)?;
    let np = enumerate_subgroup(SubgroupKind::NormalizerNonsplit, ctx)?;
    let psi_plus_ok = coset_operator(&decompose(&n, &GroupElement::identity(), &np)?)? == *psi_plus;
    let c = enumerate_subgroup(SubgroupKind::SplitCartan, ctx)?;
    let cp = enumerate_subgroup(SubgroupKind::NonsplitCartan, ctx)?;
    let h_s = (1..ctx.ell())
        .map(|s| Ok((s, coset_operator(&decompose(&c, &unipotent(s, ctx), &cp)?)? == build_h_s(ctx, s)?)))
        .collect::<Result<_>>()?;
    Ok(CoincidenceReport { psi_plus: psi_plus_ok, h_s })
}

fn chart_report(ctx: &PrimeContext, scheme: &CoefficientScheme) -> Result<ChartReport> {
    let bn = build_block_matrix_n(ctx);
    let bc = build_block_matrix_c(ctx, scheme);
    let rn = ReducedCountMatrixN::from_formula(ctx);
    let rc = ReducedCountMatrixC::from_formula(ctx, scheme);
    Ok(ChartReport {
        conjugacy_n: verify_chart_conjugacy_n(ctx)?,
        conjugacy_c: verify_chart_conjugacy_c(ctx, scheme)?,
        block_circulant_n: bn.is_block_circulant(),
        block_circulant_c: bc.is_block_circulant(),
        reduced_n_matches_blocks: reduce_mod_frak_l(&bn, ctx).map(|r| r == rn).unwrap_or(false),
        reduced_c_matches_blocks: reduce_block_matrix_c(&bc, ctx)
            .map(|chart| matches_chart_collapse(&rc, &chart, ctx))
            .unwrap_or(false),
        reduced_circulant_n: rn.is_circulant(),
        reduced_circulant_c: rc.is_circulant(),
    })
}

fn eigen_section(ctx: &PrimeContext, scheme: &CoefficientScheme, restricted_psi: &IntMatrix) -> Result<EigenSection> {
    let rn = ReducedCountMatrixN::from_formula(ctx);
    Ok(EigenSection {
        root: ctx.g(),
        n_case: eigenvalue_reports_n(&rn, ctx),
        c_case: eigenvalue_reports_c(ctx, scheme)?,
        det_n: det_cross_check_n(ctx)?,
        det_c: det_cross_check_c(ctx, scheme, Some(restricted_psi))?,
    })
}

/// Runs every check for one prime. Errors are reserved for invalid input
/// (bad prime, non-square or root); failed checks are recorded in the
/// report.
pub fn run_verification(opts: &VerifyOptions) -> Result<RunReport> {
    let ctx = PrimeContext::with_choices(opts.ell, opts.epsilon, opts.root)?;
    let scheme = CoefficientScheme::canonical(&ctx);
    let mut timer = Timer(BTreeMap::new());
    let mut checks = Vec::new();
    log::info!("verifying l = {}, eps = {}, g = {}", ctx.ell(), ctx.epsilon(), ctx.g());

    let geometry = timer.run("geometry", || geometry_report(&ctx))?;
    checks.push(check("geometry", geometry.passed(ctx.ell())));

    let psi_plus = timer.run("assemble_psi_plus", || build_psi_plus(&ctx));
    let psi = timer.run("assemble_psi", || build_psi(&ctx, &scheme))?;

    let (theorem1, _) = timer.run("rank_psi_plus", || theorem_report(&psi_plus, Side::N, &ctx, opts.seed))?;
    let (theorem2, restricted_psi) = timer.run("rank_psi", || theorem_report(&psi, Side::C, &ctx, opts.seed))?;
    for (name, t) in [("theorem1", &theorem1), ("theorem2", &theorem2)] {
        checks.push(Check { name: name.into(), status: t.status(), detail: None });
    }

    let (degrees, coincidence) = if opts.skip_cosets {
        (None, None)
    } else {
        let degrees = timer.run("degrees", || degree_entries(&ctx, &psi_plus))?;
        checks.push(check("degrees", degrees.iter().all(DegreeEntry::passed)));
        let coincidence = if ctx.ell() <= COINCIDENCE_MAX_ELL {
            let c = timer.run("coincidence", || coincidence_report(&ctx, &psi_plus))?;
            checks.push(check("coincidence", c.psi_plus && c.h_s.iter().all(|&(_, ok)| ok)));
            Some(c)
        } else {
            None
        };
        (Some(degrees), coincidence)
    };

    let charts = timer.run("charts", || chart_report(&ctx, &scheme))?;
    checks.push(check("chart_conjugacy", charts.passed()));

    let roots = if opts.strict_roots { primitive_roots(ctx.ell())? } else { vec![ctx.g()] };
    let eigenvalues = timer.run("eigenvalues", || {
        roots
            .iter()
            .map(|&g| eigen_section(&ctx.with_root(g)?, &scheme, &restricted_psi))
            .collect::<Result<Vec<_>>>()
    })?;
    for sec in &eigenvalues {
        checks.push(check(format!("eigenvalues_g{}", sec.root), sec.passed()));
    }

    let h_s_ranks = if ctx.ell() <= opts.h_s_rank_max_ell {
        Some(timer.run("h_s_ranks", || {
            (1..ctx.ell())
                .map(|s| {
                    let cert = rank_exact(&IntMatrix::from(&build_h_s(&ctx, s)?), &RankPolicy::with_first_prime(ctx.ell()));
                    Ok(HsRank { s, rank: cert.rank, conclusive: cert.conclusive })
                })
                .collect::<Result<Vec<_>>>()
        })?)
    } else {
        None
    };

    let equivariance = timer.run("equivariance", || -> Result<EquivarianceReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ctx.ell().rotate_left(32));
        let n = opts.equivariance_samples;
        Ok(EquivarianceReport {
            psi_plus_samples: n,
            psi_plus_failures: sample_equivariance(&psi_plus, n, &mut rng, &ctx)?,
            psi_samples: n,
            psi_failures: sample_equivariance(&psi, n, &mut rng, &ctx)?,
        })
    })?;
    checks.push(check("equivariance", equivariance.psi_plus_failures == 0 && equivariance.psi_failures == 0));

    let status = if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        CheckStatus::Fail
    } else if checks.iter().any(|c| c.status == CheckStatus::Inconclusive) {
        CheckStatus::Inconclusive
    } else {
        CheckStatus::Pass
    };
    debug_assert_eq!(psi_plus.row_basis(), BasisKind::HalfPlane);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        ell: ctx.ell(),
        epsilon: ctx.epsilon(),
        g: ctx.g(),
        geometry,
        theorem1,
        theorem2,
        degrees,
        coincidence,
        charts,
        eigenvalues,
        h_s_ranks,
        equivariance,
        checks,
        status,
        timings_ms: timer.0,
    })
}
