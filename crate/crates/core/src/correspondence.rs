//! Geodesics in `H_l`, slope-`s` paths in `C_l`, and the operators built
//! from them:
//!
//! * `psi_plus : Q[unordered pairs] -> Q[H_l]`, `{a, b} -> sum of the geodesic`;
//! * `H_s : Q[ordered pairs] -> Q[C_l]`, `(a, b) -> sum of the slope-s path`;
//! * `psi = sum_s (alpha_s + beta_s) H_s`.
//!
//! Geodesics and paths are sets; each construction checks that the
//! `l - 1` parameter values give the expected number of distinct points.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    cartan_act, mobius_act, Basis, BasisElement, BasisKind, CartanOrbit, CartanPoint, GroupElement, OrderedPair,
    ProjectivePoint, UnorderedPair,
};
use crate::modular_arith::PrimeContext;
pub use crate::operator::OperatorMatrix;

/// An element `g` with `g(0) = a` and `g(inf) = b`.
///
/// Affine endpoints use `(b a; 1 1)`; `a = inf` uses `(b 1; 1 0)` and
/// `b = inf` uses `(1 a; 0 1)`.
pub fn transporter(a: ProjectivePoint, b: ProjectivePoint, ctx: &PrimeContext) -> Result<GroupElement> {
    use ProjectivePoint::*;
    match (a, b) {
        _ if a == b => Err(Error::Diagonal),
        (Affine(a), Affine(b)) => GroupElement::new(b, a, 1, 1, ctx),
        (Infinity, Affine(b)) => GroupElement::new(b, 1, 1, 0, ctx),
        (Affine(a), Infinity) => GroupElement::new(1, a, 0, 1, ctx),
        (Infinity, Infinity) => unreachable!(),
    }
}

/// The geodesic joining the two endpoints of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Geodesic {
    pub endpoints: UnorderedPair,
    /// Sorted, `(l - 1) / 2` distinct classes.
    pub points: Vec<CartanOrbit>,
}

/// The slope-`s` path from `first` to `second`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSpec {
    pub endpoints: OrderedPair,
    pub slope: u64,
    /// Sorted, `l - 1` distinct points.
    pub points: Vec<CartanPoint>,
}

/// `g(F_l^x sqrt(eps))` for the canonical transporter `g`.
pub fn geodesic_points(pair: &UnorderedPair, ctx: &PrimeContext) -> Geodesic {
    let g = transporter(pair.lo(), pair.hi(), ctx).expect("pair points are distinct");
    geodesic_from(pair, &g, ctx).expect("transporter matches the pair")
}

/// The geodesic computed from an arbitrary `g` with `{g(0), g(inf)}` equal
/// to the pair.
pub fn geodesic_from(pair: &UnorderedPair, g: &GroupElement, ctx: &PrimeContext) -> Result<Geodesic> {
    let ends = UnorderedPair::new(
        mobius_act(g, ProjectivePoint::Affine(0), ctx),
        mobius_act(g, ProjectivePoint::Infinity, ctx),
    )?;
    if ends != *pair {
        return Err(Error::BasisMismatch(format!("{g} does not carry {{0,inf}} to {pair}")));
    }
    let points: BTreeSet<CartanOrbit> = (1..ctx.ell())
        .map(|lambda| {
            let base = CartanPoint::new(0, lambda, ctx).expect("lambda != 0");
            cartan_act(g, base, ctx).orbit(ctx)
        })
        .collect();
    assert_eq!(points.len() as u64, ctx.r(), "geodesic {pair} has repeated points");
    Ok(Geodesic { endpoints: *pair, points: points.into_iter().collect() })
}

/// `g(lambda s + lambda sqrt(eps))`, `lambda` in `F_l^x`.
pub fn path_points(pair: &OrderedPair, s: u64, ctx: &PrimeContext) -> Result<PathSpec> {
    let g = transporter(pair.first(), pair.second(), ctx)?;
    path_from(pair, s, &g, ctx)
}

pub fn path_from(pair: &OrderedPair, s: u64, g: &GroupElement, ctx: &PrimeContext) -> Result<PathSpec> {
    let s = s % ctx.ell();
    if s == 0 {
        return Err(Error::ZeroSlope);
    }
    let ends = OrderedPair::new(
        mobius_act(g, ProjectivePoint::Affine(0), ctx),
        mobius_act(g, ProjectivePoint::Infinity, ctx),
    )?;
    if ends != *pair {
        return Err(Error::BasisMismatch(format!("{g} does not carry (0,inf) to {pair}")));
    }
    let points: BTreeSet<CartanPoint> = (1..ctx.ell())
        .map(|lambda| {
            let base = CartanPoint::new(ctx.mul(lambda, s), lambda, ctx).expect("lambda != 0");
            cartan_act(g, base, ctx)
        })
        .collect();
    assert_eq!(points.len() as u64, ctx.ell() - 1, "path {pair} (s = {s}) has repeated points");
    Ok(PathSpec { endpoints: *pair, slope: s, points: points.into_iter().collect() })
}

/// Closed-form geodesic point for parameter `lambda` and affine endpoints:
/// `x = (a - eps lambda^2 b) / (1 - eps lambda^2)`,
/// `y = lambda (a - b) / (1 - eps lambda^2)`, as a class in `H_l`.
pub fn geodesic_point_formula(a: u64, b: u64, lambda: u64, ctx: &PrimeContext) -> CartanOrbit {
    let el2 = ctx.mul(ctx.epsilon(), ctx.mul(lambda, lambda));
    let den = ctx.sub(1, el2);
    let x = ctx.div(ctx.sub(a, ctx.mul(el2, b)), den);
    let y = ctx.div(ctx.mul(lambda, ctx.sub(a, b)), den);
    CartanOrbit::new(x, y, ctx).expect("a != b")
}

/// Closed-form path point for parameter `lambda` and affine endpoints.
pub fn path_point_formula(a: u64, b: u64, s: u64, lambda: u64, ctx: &PrimeContext) -> CartanPoint {
    let ls1 = ctx.add(ctx.mul(lambda, s), 1);
    let den = ctx.sub(ctx.mul(ls1, ls1), ctx.mul(ctx.epsilon(), ctx.mul(lambda, lambda)));
    let blsa = ctx.add(ctx.mul(b, ctx.mul(lambda, s)), a);
    let x_num = ctx.sub(ctx.mul(blsa, ls1), ctx.mul(b, ctx.mul(ctx.epsilon(), ctx.mul(lambda, lambda))));
    let y_num = ctx.mul(lambda, ctx.sub(b, a));
    CartanPoint::new(ctx.div(x_num, den), ctx.div(y_num, den), ctx).expect("a != b")
}

/// Whether `(x, y)` lies on `(x - (a+b)/2)^2 - eps y^2 = ((b-a)/2)^2`.
pub fn on_geodesic_conic(a: u64, b: u64, w: &CartanOrbit, ctx: &PrimeContext) -> bool {
    let half = ctx.inv(2);
    let dx = ctx.sub(w.x(), ctx.mul(ctx.add(a, b), half));
    let lhs = ctx.sub(ctx.mul(dx, dx), ctx.mul(ctx.epsilon(), ctx.mul(w.y(), w.y())));
    let r = ctx.mul(ctx.sub(b, a), half);
    lhs == ctx.mul(r, r)
}

/// Whether `(x, y)` lies on
/// `(x - (a+b)/2)^2 - eps (y - s(b-a)/(2 eps))^2 = (eps - s^2)(a-b)^2 / (4 eps)`.
pub fn on_path_conic(a: u64, b: u64, s: u64, z: &CartanPoint, ctx: &PrimeContext) -> bool {
    let e = ctx.epsilon();
    let dx = ctx.sub(z.x(), ctx.div(ctx.add(a, b), 2));
    let dy = ctx.sub(z.y(), ctx.div(ctx.mul(s, ctx.sub(b, a)), ctx.mul(2, e)));
    let lhs = ctx.sub(ctx.mul(dx, dx), ctx.mul(e, ctx.mul(dy, dy)));
    let ab = ctx.sub(a, b);
    let rhs = ctx.div(ctx.mul(ctx.sub(e, ctx.mul(s, s)), ctx.mul(ab, ab)), ctx.mul(4, e));
    lhs == rhs
}

/// Integer weights `alpha_s`, `beta_s` in `[0, l - 1]` for `s = 1..l-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientScheme {
    alpha: Vec<u64>,
    beta: Vec<u64>,
}

impl CoefficientScheme {
    /// `alpha[s - 1]`, `beta[s - 1]` for `s = 1..l-1`.
    pub fn new(alpha: Vec<u64>, beta: Vec<u64>, ctx: &PrimeContext) -> Result<Self> {
        let n = (ctx.ell() - 1) as usize;
        if alpha.len() != n || beta.len() != n {
            return Err(Error::InvalidScheme(format!("expected {n} coefficients per family")));
        }
        if let Some(v) = alpha.iter().chain(&beta).find(|&&v| v >= ctx.ell()) {
            return Err(Error::InvalidScheme(format!("coefficient {v} outside [0, l - 1]")));
        }
        Ok(Self { alpha, beta })
    }

    /// `alpha_s = 1`, `beta_s` the representative of `s^-1` in `[1, l - 1]`.
    pub fn canonical(ctx: &PrimeContext) -> Self {
        let alpha = vec![1; (ctx.ell() - 1) as usize];
        let beta = (1..ctx.ell()).map(|s| ctx.inv(s)).collect();
        Self { alpha, beta }
    }

    /// Weight 1 on `H_s` alone.
    pub fn single(s: u64, ctx: &PrimeContext) -> Result<Self> {
        let s = s % ctx.ell();
        if s == 0 {
            return Err(Error::ZeroSlope);
        }
        let mut alpha = vec![0; (ctx.ell() - 1) as usize];
        alpha[(s - 1) as usize] = 1;
        Ok(Self { alpha, beta: vec![0; (ctx.ell() - 1) as usize] })
    }

    pub fn alpha(&self, s: u64) -> u64 {
        self.alpha[(s - 1) as usize]
    }

    pub fn beta(&self, s: u64) -> u64 {
        self.beta[(s - 1) as usize]
    }

    /// `alpha_s + beta_s`.
    pub fn weight(&self, s: u64) -> u64 {
        self.alpha(s) + self.beta(s)
    }

    /// `alpha_s = 1` and `beta_s = s^-1` modulo `l` for every `s`.
    pub fn satisfies_congruences(&self, ctx: &PrimeContext) -> bool {
        (1..ctx.ell()).all(|s| self.alpha(s) % ctx.ell() == 1 && ctx.mul(self.beta(s), s) == 1)
    }
}

/// `psi_plus`, rows `H_l`, columns unordered pairs.
pub fn build_psi_plus(ctx: &PrimeContext) -> OperatorMatrix {
    let rows = Basis::new(BasisKind::HalfPlane, ctx);
    let cols = Basis::new(BasisKind::UnorderedPairs, ctx);
    let columns = cols
        .elements()
        .iter()
        .map(|e| {
            let BasisElement::Unordered(p) = e else { unreachable!() };
            geodesic_points(p, ctx)
                .points
                .iter()
                .map(|w| (rows.index_of(&BasisElement::Orbit(*w)).expect("orbit in H"), 1))
                .collect()
        })
        .collect();
    OperatorMatrix::from_columns(BasisKind::HalfPlane, BasisKind::UnorderedPairs, ctx, columns)
        .expect("shapes agree")
}

/// `H_s`, rows `C_l`, columns ordered pairs.
pub fn build_h_s(ctx: &PrimeContext, s: u64) -> Result<OperatorMatrix> {
    build_psi(ctx, &CoefficientScheme::single(s, ctx)?)
}

/// `psi = sum_s (alpha_s + beta_s) H_s`.
pub fn build_psi(ctx: &PrimeContext, scheme: &CoefficientScheme) -> Result<OperatorMatrix> {
    let cols = Basis::new(BasisKind::OrderedPairs, ctx);
    let mut columns = Vec::with_capacity(cols.len());
    for e in cols.elements() {
        let BasisElement::Ordered(p) = e else { unreachable!() };
        let mut col = Vec::new();
        for s in 1..ctx.ell() {
            let w = scheme.weight(s) as i64;
            if w == 0 {
                continue;
            }
            for z in path_points(&p, s, ctx)?.points {
                col.push((z.index(ctx), w));
            }
        }
        columns.push(col);
    }
    OperatorMatrix::from_columns(BasisKind::Punctured, BasisKind::OrderedPairs, ctx, columns)
}

/// Which coset-space pair a restriction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Normalizer side: columns are unordered pairs.
    N,
    /// Cartan side: columns are ordered pairs.
    C,
}

/// Drops the columns whose pair involves infinity.
pub fn restrict_to_affine(m: &OperatorMatrix, side: Side) -> Result<OperatorMatrix> {
    let (full, affine) = match side {
        Side::N => (BasisKind::UnorderedPairs, BasisKind::AffineUnorderedPairs),
        Side::C => (BasisKind::OrderedPairs, BasisKind::AffineOrderedPairs),
    };
    if m.col_basis() != full {
        return Err(Error::BasisMismatch(format!(
            "restriction for side {side:?} needs columns {full}, got {}",
            m.col_basis()
        )));
    }
    let ctx = PrimeContext::with_choices(m.ell(), Some(m.epsilon()), None)?;
    let basis = Basis::new(full, &ctx);
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&j| match basis.element(j) {
            BasisElement::Unordered(p) => p.is_affine(),
            BasisElement::Ordered(p) => p.is_affine(),
            _ => false,
        })
        .collect();
    Ok(m.select_columns(affine, &keep))
}

/// Checks `m(g v) = g m(v)` for the basis vector `v` with index `col`.
pub fn is_equivariant_at(m: &OperatorMatrix, g: &GroupElement, col: usize, ctx: &PrimeContext) -> Result<bool> {
    let rows = Basis::new(m.row_basis(), ctx);
    let cols = Basis::new(m.col_basis(), ctx);
    let moved_col = cols.act(g, col)?;
    let mut image: Vec<(usize, i64)> =
        m.column(col).iter().map(|&(i, v)| rows.act(g, i).map(|gi| (gi, v))).collect::<Result<_>>()?;
    image.sort_unstable();
    Ok(image == m.column(moved_col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_pairs_unordered;

    fn ctx(ell: u64) -> PrimeContext {
        PrimeContext::new(ell).unwrap()
    }

    fn aff(x: u64) -> ProjectivePoint {
        ProjectivePoint::Affine(x)
    }

    #[test]
    fn transporter_examples() {
        let c = ctx(7);
        assert_eq!(transporter(aff(0), ProjectivePoint::Infinity, &c).unwrap(), GroupElement::identity());
        let g = transporter(aff(2), aff(5), &c).unwrap();
        assert_eq!(g.as_tuple(), [5, 2, 1, 1]);
        assert_eq!(g.det(&c), 3);
        assert_eq!(transporter(ProjectivePoint::Infinity, aff(0), &c).unwrap().as_tuple(), [0, 1, 1, 0]);
        assert_eq!(transporter(aff(3), aff(3), &c), Err(Error::Diagonal));
    }

    #[test]
    fn geodesic_examples() {
        let c = PrimeContext::with_choices(3, Some(2), None).unwrap();
        let zi = UnorderedPair::new(aff(0), ProjectivePoint::Infinity).unwrap();
        // lambda sqrt(2) for lambda = 1, 2 collapses to the single class 0 + 1 sqrt(2)
        assert_eq!(geodesic_points(&zi, &c).points, vec![CartanOrbit::new(0, 1, &c).unwrap()]);

        let c5 = ctx(5);
        assert_eq!(geodesic_points(&UnorderedPair::new(aff(1), aff(3)).unwrap(), &c5).points.len(), 2);

        let c7 = PrimeContext::with_choices(7, Some(3), None).unwrap();
        let g = geodesic_points(&UnorderedPair::new(aff(0), ProjectivePoint::Infinity).unwrap(), &c7);
        assert_eq!(g.points.len(), 3);
        assert!(g.points.iter().all(|w| w.x() == 0));
    }

    #[test]
    fn path_examples() {
        let c = PrimeContext::with_choices(3, Some(2), None).unwrap();
        let p = OrderedPair::new(aff(0), ProjectivePoint::Infinity).unwrap();
        let path = path_points(&p, 1, &c).unwrap();
        assert_eq!(path.points, vec![CartanPoint::new(1, 1, &c).unwrap(), CartanPoint::new(2, 2, &c).unwrap()]);
        let c5 = ctx(5);
        assert_eq!(path_points(&OrderedPair::new(aff(2), aff(4)).unwrap(), 3, &c5).unwrap().points.len(), 4);
        assert_eq!(path_points(&p, 0, &c), Err(Error::ZeroSlope));
    }

    #[test]
    fn psi_plus_shapes() {
        let m3 = build_psi_plus(&ctx(3));
        assert_eq!(m3.shape(), (3, 6));
        assert!(m3.column_sums().iter().all(|&s| s == 1));
        let m5 = build_psi_plus(&ctx(5));
        assert_eq!(m5.shape(), (10, 15));
        assert!(m5.column_sums().iter().all(|&s| s == 2));
        assert_eq!(m5.max_entry(), 1);
    }

    #[test]
    fn psi_is_weighted_sum_of_h_s() {
        let c = ctx(3);
        let scheme = CoefficientScheme::canonical(&c);
        assert_eq!((scheme.weight(1), scheme.weight(2)), (2, 3));
        let psi = build_psi(&c, &scheme).unwrap();
        assert_eq!(psi.shape(), (6, 12));
        let h1 = build_h_s(&c, 1).unwrap();
        let h2 = build_h_s(&c, 2).unwrap();
        let expect = OperatorMatrix::zeros(BasisKind::Punctured, BasisKind::OrderedPairs, &c)
            .add_scaled(&h1, 2)
            .unwrap()
            .add_scaled(&h2, 3)
            .unwrap();
        assert_eq!(psi, expect);
        for h in [&h1, &h2] {
            assert!(h.column_sums().iter().all(|&s| s == 2));
        }
    }

    #[test]
    fn psi_entry_bound() {
        for ell in [3u64, 5, 7] {
            let c = ctx(ell);
            let psi = build_psi(&c, &CoefficientScheme::canonical(&c)).unwrap();
            assert!(psi.max_entry() <= (ell * (ell - 1)) as i64);
        }
    }

    #[test]
    fn restriction_shapes() {
        let c3 = ctx(3);
        let r = restrict_to_affine(&build_psi_plus(&c3), Side::N).unwrap();
        assert_eq!(r.shape(), (3, 3));
        assert_eq!(r.col_basis(), BasisKind::AffineUnorderedPairs);
        let c5 = ctx(5);
        let psi = build_psi(&c5, &CoefficientScheme::canonical(&c5)).unwrap();
        assert_eq!(restrict_to_affine(&psi, Side::C).unwrap().shape(), (20, 20));
        assert!(matches!(restrict_to_affine(&psi, Side::N), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn scheme_validation() {
        let c = ctx(5);
        assert!(CoefficientScheme::new(vec![1; 3], vec![1; 4], &c).is_err());
        assert!(CoefficientScheme::new(vec![1; 4], vec![5; 4], &c).is_err());
        let canon = CoefficientScheme::canonical(&c);
        assert!(canon.satisfies_congruences(&c));
        assert_eq!((1..5).map(|s| canon.beta(s)).collect::<Vec<_>>(), vec![1, 3, 2, 4]);
        assert!(!CoefficientScheme::single(2, &c).unwrap().satisfies_congruences(&c));
    }

    #[test]
    fn geodesics_cover_each_orbit_evenly() {
        // every class of H_l lies on the same number of geodesics
        for ell in [5u64, 7, 11] {
            let c = ctx(ell);
            let rs = build_psi_plus(&c).row_sums();
            assert!(rs.windows(2).all(|w| w[0] == w[1]));
            assert_eq!(rs[0] as usize * rs.len(), enumerate_pairs_unordered(&c).len() * c.r() as usize);
        }
    }
}
