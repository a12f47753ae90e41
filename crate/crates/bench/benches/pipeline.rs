use std::hint::black_box;

use cartan_core::circulant::{eigenvalues_c, eigenvalues_n, ReducedCountMatrixN};
use cartan_core::correspondence::{build_psi, build_psi_plus, CoefficientScheme};
use cartan_core::cosets::{decompose, enumerate_subgroup, unipotent, SubgroupKind};
use cartan_core::exact_linalg::{rank_mod_p, IntMatrix};
use cartan_core::PrimeContext;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const PRIMES: [u64; 3] = [11, 19, 31];

fn assemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for ell in PRIMES {
        let ctx = PrimeContext::new(ell).unwrap();
        let scheme = CoefficientScheme::canonical(&ctx);
        group.bench_with_input(BenchmarkId::new("psi_plus", ell), &ctx, |b, ctx| b.iter(|| build_psi_plus(ctx)));
        group.bench_with_input(BenchmarkId::new("psi", ell), &ctx, |b, ctx| {
            b.iter(|| build_psi(ctx, black_box(&scheme)).unwrap())
        });
    }
    group.finish();
}

fn rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_mod_p");
    group.sample_size(10);
    for ell in PRIMES {
        let ctx = PrimeContext::new(ell).unwrap();
        let plus = IntMatrix::from(&build_psi_plus(&ctx));
        let psi = IntMatrix::from(&build_psi(&ctx, &CoefficientScheme::canonical(&ctx)).unwrap());
        group.bench_with_input(BenchmarkId::new("psi_plus", ell), &plus, |b, m| b.iter(|| rank_mod_p(m, ell)));
        group.bench_with_input(BenchmarkId::new("psi", ell), &psi, |b, m| b.iter(|| rank_mod_p(m, ell)));
    }
    group.finish();
}

fn eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues");
    for ell in PRIMES {
        let ctx = PrimeContext::new(ell).unwrap();
        let scheme = CoefficientScheme::canonical(&ctx);
        let reduced = ReducedCountMatrixN::from_formula(&ctx);
        group.bench_with_input(BenchmarkId::new("n_case", ell), &ctx, |b, ctx| {
            b.iter(|| eigenvalues_n(&reduced, ctx).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("c_case", ell), &ctx, |b, ctx| {
            b.iter(|| eigenvalues_c(ctx, &scheme).unwrap())
        });
    }
    group.finish();
}

fn double_cosets(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for ell in [7u64, 13, 19] {
        let ctx = PrimeContext::new(ell).unwrap();
        let h = enumerate_subgroup(SubgroupKind::SplitCartan, &ctx).unwrap();
        let k = enumerate_subgroup(SubgroupKind::NonsplitCartan, &ctx).unwrap();
        let g = unipotent(1, &ctx);
        group.bench_function(BenchmarkId::new("C_u_Cprime", ell), |b| b.iter(|| decompose(&h, &g, &k).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, assemble, rank, eigenvalues, double_cosets);
criterion_main!(benches);
