use cartan_core::correspondence::{build_h_s, build_psi, build_psi_plus, is_equivariant_at, CoefficientScheme};
use cartan_core::cosets::{coset_operator, decompose, enumerate_subgroup, unipotent, SubgroupKind};
use cartan_core::geometry::charts::{
    cartan_to_diff, diff_to_cartan, nonsplit_tm_to_orbit, orbit_to_nonsplit_tm, pair_to_tm, tm_to_pair,
};
use cartan_core::geometry::{cartan_act, mobius_act, orbit_act};
use cartan_core::modular_arith::{count_square_roots, sqrt_mod, sqrt_mod_with_threshold};
use cartan_core::{
    CartanPoint, GroupElement, OperatorMatrix, PrimeContext, ProjectivePoint, Residue, UnorderedPair,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13])
}

fn tiny_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

fn element(ctx: &PrimeContext, raw: [u64; 4]) -> GroupElement {
    let l = ctx.ell();
    let [a, b, c, d] = raw.map(|v| v % l);
    GroupElement::new(a, b, c, d, ctx).unwrap_or_else(|_| GroupElement::new(a.max(1), b, 0, d.max(1), ctx).unwrap())
}

fn point(ell: u64, v: u64) -> ProjectivePoint {
    if v % (ell + 1) == ell {
        ProjectivePoint::Infinity
    } else {
        ProjectivePoint::Affine(v % (ell + 1))
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn action_laws(ell in small_prime(), g in any::<[u64; 4]>(), h in any::<[u64; 4]>(), p in any::<u64>(), x in any::<u64>(), y in any::<u64>()) {
        let ctx = PrimeContext::new(ell).unwrap();
        let (g, h) = (element(&ctx, g), element(&ctx, h));
        let gh = g.compose(&h, &ctx);
        let p = point(ell, p);
        prop_assert_eq!(mobius_act(&gh, p, &ctx), mobius_act(&g, mobius_act(&h, p, &ctx), &ctx));
        prop_assert_eq!(mobius_act(&g.inverse(&ctx), mobius_act(&g, p, &ctx), &ctx), p);
        let z = CartanPoint::new(x % ell, 1 + y % (ell - 1), &ctx).unwrap();
        prop_assert_eq!(cartan_act(&gh, z, &ctx), cartan_act(&g, cartan_act(&h, z, &ctx), &ctx));
        prop_assert_eq!(cartan_act(&GroupElement::identity(), z, &ctx), z);
        let w = z.orbit(&ctx);
        prop_assert_eq!(orbit_act(&gh, w, &ctx), orbit_act(&g, orbit_act(&h, w, &ctx), &ctx));
        prop_assert_eq!(z.conjugate(&ctx).orbit(&ctx), w);
    }

    #[test]
    fn chart_round_trips(ell in small_prime(), a in any::<u64>(), b in any::<u64>(), x in any::<u64>(), y in any::<u64>()) {
        let ctx = PrimeContext::new(ell).unwrap();
        let (a, b) = (a % ell, b % ell);
        if a != b {
            let p = UnorderedPair::new(ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)).unwrap();
            prop_assert_eq!(tm_to_pair(pair_to_tm(&p, &ctx).unwrap(), &ctx), p);
        }
        let z = CartanPoint::new(x % ell, 1 + y % (ell - 1), &ctx).unwrap();
        prop_assert_eq!(diff_to_cartan(cartan_to_diff(&z, &ctx), &ctx), z);
        let w = z.orbit(&ctx);
        prop_assert_eq!(nonsplit_tm_to_orbit(orbit_to_nonsplit_tm(&w, &ctx), &ctx), w);
    }

    #[test]
    fn residue_field_axioms(ell in prop::sample::select(vec![3u64, 31, 1_000_003, 2_147_483_647]), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (Residue::new(a, ell), Residue::new(b, ell), Residue::new(c, ell));
        let zero = Residue::new(0, ell);
        let one = Residue::new(1, ell);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a - a, zero);
        prop_assert_eq!(a + (-a), zero);
        prop_assert_eq!(a * one, a);
        match a.inv() {
            Some(i) => prop_assert_eq!(a * i, one),
            None => prop_assert!(a.is_zero()),
        }
    }

    #[test]
    fn square_roots(ell in prop::sample::select(vec![3u64, 7, 13, 41, 97, 10_007, 1_000_003]), a in any::<u64>()) {
        let ctx = PrimeContext::new(ell).unwrap();
        let a = a % ell;
        let roots = sqrt_mod(a, &ctx);
        prop_assert_eq!(roots.len() as u64, count_square_roots(a, &ctx));
        for r in &roots {
            prop_assert_eq!(ctx.mul(*r, *r), a);
        }
        prop_assert_eq!(sqrt_mod_with_threshold(a, &ctx, 0), roots);
    }

    #[test]
    fn degree_constant_on_double_coset(ell in tiny_prime(), s in any::<u64>(), i in any::<usize>(), j in any::<usize>()) {
        let ctx = PrimeContext::new(ell).unwrap();
        let h = enumerate_subgroup(SubgroupKind::SplitCartan, &ctx).unwrap();
        let k = enumerate_subgroup(SubgroupKind::NonsplitCartan, &ctx).unwrap();
        let g = unipotent(s % ell, &ctx);
        let base = decompose(&h, &g, &k).unwrap();
        let moved = h.elements()[i % h.len()].compose(&g, &ctx).compose(&k.elements()[j % k.len()], &ctx);
        let other = decompose(&h, &moved, &k).unwrap();
        prop_assert_eq!(other.degree, base.degree);
        prop_assert!(other.is_partition());
    }

    #[test]
    fn operator_ignores_representatives(ell in tiny_prime(), seed in any::<u64>(), normalizer in any::<bool>()) {
        let ctx = PrimeContext::new(ell).unwrap();
        let (hk, kk) = if normalizer {
            (SubgroupKind::NormalizerSplit, SubgroupKind::NormalizerNonsplit)
        } else {
            (SubgroupKind::SplitCartan, SubgroupKind::NonsplitCartan)
        };
        let h = enumerate_subgroup(hk, &ctx).unwrap();
        let k = enumerate_subgroup(kk, &ctx).unwrap();
        let dec = decompose(&h, &unipotent(1, &ctx), &k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(coset_operator(&dec.reselect(&mut rng)).unwrap(), coset_operator(&dec).unwrap());
    }

    #[test]
    fn psi_is_linear_in_the_scheme(ell in prop::sample::select(vec![3u64, 5, 7, 11]), raw in prop::collection::vec(any::<(u64, u64)>(), 10)) {
        let ctx = PrimeContext::new(ell).unwrap();
        let alpha: Vec<u64> = raw.iter().take((ell - 1) as usize).map(|p| p.0 % ell).collect();
        let beta: Vec<u64> = raw.iter().take((ell - 1) as usize).map(|p| p.1 % ell).collect();
        let scheme = CoefficientScheme::new(alpha, beta, &ctx).unwrap();
        let psi = build_psi(&ctx, &scheme).unwrap();
        let mut sum = OperatorMatrix::zeros(psi.row_basis(), psi.col_basis(), &ctx);
        for s in 1..ell {
            sum = sum.add_scaled(&build_h_s(&ctx, s).unwrap(), scheme.weight(s) as i64).unwrap();
        }
        prop_assert_eq!(psi, sum);
    }

    #[test]
    fn maps_are_equivariant(ell in small_prime(), g in any::<[u64; 4]>(), col in any::<usize>()) {
        let ctx = PrimeContext::new(ell).unwrap();
        let g = element(&ctx, g);
        let plus = build_psi_plus(&ctx);
        prop_assert!(is_equivariant_at(&plus, &g, col % plus.n_cols(), &ctx).unwrap());
        let psi = build_psi(&ctx, &CoefficientScheme::canonical(&ctx)).unwrap();
        prop_assert!(is_equivariant_at(&psi, &g, col % psi.n_cols(), &ctx).unwrap());
    }
}
