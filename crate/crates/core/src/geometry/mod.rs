//! The finite sets acted on by `G = GL2(F_l)`: the projective line, ordered
//! and unordered pairs of distinct points on it, the punctured plane `C_l`
//! and the finite upper half plane `H_l = C_l / conjugation`.
//!
//! Each set has a canonical enumeration (lexicographic on stored fields,
//! infinity last). Those orders fix the row and column indexing of every
//! operator matrix and of the CSV export format.

pub mod charts;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular_arith::PrimeContext;

/// A point of `P^1(F_l)`: `(x : 1)` or `(1 : 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ProjectivePoint {
    Affine(u64),
    Infinity,
}

impl ProjectivePoint {
    /// Normalizes the column vector `(u, v)`; `(0, 0)` is not a point.
    pub fn from_coords(u: u64, v: u64, ctx: &PrimeContext) -> Option<Self> {
        let (u, v) = (u % ctx.ell(), v % ctx.ell());
        match (u, v) {
            (0, 0) => None,
            (_, 0) => Some(ProjectivePoint::Infinity),
            _ => Some(ProjectivePoint::Affine(ctx.div(u, v))),
        }
    }

    pub fn is_affine(self) -> bool {
        matches!(self, ProjectivePoint::Affine(_))
    }

    pub fn affine(self) -> Option<u64> {
        match self {
            ProjectivePoint::Affine(x) => Some(x),
            ProjectivePoint::Infinity => None,
        }
    }

    /// Position in the enumeration `0, 1, ..., l - 1, inf`.
    #[inline]
    pub fn index(self, ell: u64) -> usize {
        match self {
            ProjectivePoint::Affine(x) => x as usize,
            ProjectivePoint::Infinity => ell as usize,
        }
    }

    pub fn from_index(i: usize, ell: u64) -> Self {
        if i as u64 == ell {
            ProjectivePoint::Infinity
        } else {
            ProjectivePoint::Affine(i as u64)
        }
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectivePoint::Affine(x) => write!(f, "{x}"),
            ProjectivePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Every point of `P^1(F_l)` in canonical order.
pub fn enumerate_p1(ctx: &PrimeContext) -> Vec<ProjectivePoint> {
    (0..=ctx.ell() as usize).map(|i| ProjectivePoint::from_index(i, ctx.ell())).collect()
}

/// `{a, b}` with `a != b`, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UnorderedPair {
    lo: ProjectivePoint,
    hi: ProjectivePoint,
}

impl UnorderedPair {
    pub fn new(a: ProjectivePoint, b: ProjectivePoint) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::Diagonal),
        }
    }

    pub fn lo(&self) -> ProjectivePoint {
        self.lo
    }

    pub fn hi(&self) -> ProjectivePoint {
        self.hi
    }

    pub fn is_affine(&self) -> bool {
        self.hi.is_affine()
    }
}

impl fmt::Display for UnorderedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// `(a, b)` with `a != b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderedPair {
    first: ProjectivePoint,
    second: ProjectivePoint,
}

impl OrderedPair {
    pub fn new(first: ProjectivePoint, second: ProjectivePoint) -> Result<Self> {
        if first == second {
            return Err(Error::Diagonal);
        }
        Ok(Self { first, second })
    }

    pub fn first(&self) -> ProjectivePoint {
        self.first
    }

    pub fn second(&self) -> ProjectivePoint {
        self.second
    }

    pub fn swapped(&self) -> Self {
        Self { first: self.second, second: self.first }
    }

    pub fn is_affine(&self) -> bool {
        self.first.is_affine() && self.second.is_affine()
    }
}

impl fmt::Display for OrderedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// `x + y sqrt(eps)` with `y != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CartanPoint {
    x: u64,
    y: u64,
}

impl CartanPoint {
    pub fn new(x: u64, y: u64, ctx: &PrimeContext) -> Result<Self> {
        let (x, y) = (x % ctx.ell(), y % ctx.ell());
        if y == 0 {
            return Err(Error::RealPoint);
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn conjugate(&self, ctx: &PrimeContext) -> Self {
        Self { x: self.x, y: ctx.neg(self.y) }
    }

    pub fn orbit(&self, ctx: &PrimeContext) -> CartanOrbit {
        CartanOrbit::from_point(*self, ctx)
    }

    pub fn index(&self, ctx: &PrimeContext) -> usize {
        (self.x * (ctx.ell() - 1) + self.y - 1) as usize
    }
}

impl fmt::Display for CartanPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*se", self.x, self.y)
    }
}

/// The class `{x + y sqrt(eps), x - y sqrt(eps)}` in `H_l`, stored with
/// `1 <= y <= (l - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CartanOrbit {
    x: u64,
    y: u64,
}

impl CartanOrbit {
    /// Accepts either representative.
    pub fn new(x: u64, y: u64, ctx: &PrimeContext) -> Result<Self> {
        Ok(Self::from_point(CartanPoint::new(x, y, ctx)?, ctx))
    }

    pub fn from_point(z: CartanPoint, ctx: &PrimeContext) -> Self {
        let y = if z.y > ctx.r() { ctx.ell() - z.y } else { z.y };
        Self { x: z.x, y }
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn representative(&self) -> CartanPoint {
        CartanPoint { x: self.x, y: self.y }
    }

    pub fn index(&self, ctx: &PrimeContext) -> usize {
        (self.x * ctx.r() + self.y - 1) as usize
    }
}

impl fmt::Display for CartanOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*se", self.x, self.y)
    }
}

/// The matrix `(a b; c d)` of `GL2(F_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl GroupElement {
    pub fn new(a: u64, b: u64, c: u64, d: u64, ctx: &PrimeContext) -> Result<Self> {
        let l = ctx.ell();
        let m = Self { a: a % l, b: b % l, c: c % l, d: d % l };
        if m.det(ctx) == 0 {
            return Err(Error::Singular { a: m.a, b: m.b, c: m.c, d: m.d, ell: l });
        }
        Ok(m)
    }

    /// Reduces signed entries; still checks invertibility.
    pub fn from_signed(a: i64, b: i64, c: i64, d: i64, ctx: &PrimeContext) -> Result<Self> {
        Self::new(ctx.reduce(a), ctx.reduce(b), ctx.reduce(c), ctx.reduce(d), ctx)
    }

    pub const fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn det(&self, ctx: &PrimeContext) -> u64 {
        ctx.sub(ctx.mul(self.a, self.d), ctx.mul(self.b, self.c))
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self, ctx: &PrimeContext) -> Self {
        let l = ctx.ell();
        Self {
            a: (self.a * rhs.a + self.b * rhs.c) % l,
            b: (self.a * rhs.b + self.b * rhs.d) % l,
            c: (self.c * rhs.a + self.d * rhs.c) % l,
            d: (self.c * rhs.b + self.d * rhs.d) % l,
        }
    }

    pub fn inverse(&self, ctx: &PrimeContext) -> Self {
        let di = ctx.inv(self.det(ctx));
        Self {
            a: ctx.mul(self.d, di),
            b: ctx.mul(ctx.neg(self.b), di),
            c: ctx.mul(ctx.neg(self.c), di),
            d: ctx.mul(self.a, di),
        }
    }

    pub fn as_tuple(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// `|GL2(F_l)| = (l^2 - 1)(l^2 - l)`.
pub fn group_order(ell: u64) -> u64 {
    (ell * ell - 1) * (ell * ell - ell)
}

/// Möbius action on column vectors: `(x : y) -> (ax + by : cx + dy)`.
pub fn mobius_act(g: &GroupElement, p: ProjectivePoint, ctx: &PrimeContext) -> ProjectivePoint {
    let (u, v) = match p {
        ProjectivePoint::Affine(x) => (ctx.add(ctx.mul(g.a, x), g.b), ctx.add(ctx.mul(g.c, x), g.d)),
        ProjectivePoint::Infinity => (g.a, g.c),
    };
    ProjectivePoint::from_coords(u, v, ctx).expect("invertible matrix maps nonzero vectors to nonzero vectors")
}

/// Elements of F_{l^2} in the basis `{1, sqrt(eps)}`.
#[derive(Clone, Copy)]
struct Quad {
    x: u64,
    y: u64,
}

impl Quad {
    fn mul(self, o: Quad, ctx: &PrimeContext) -> Quad {
        let e = ctx.epsilon();
        Quad {
            x: ctx.add(ctx.mul(self.x, o.x), ctx.mul(e, ctx.mul(self.y, o.y))),
            y: ctx.add(ctx.mul(self.x, o.y), ctx.mul(self.y, o.x)),
        }
    }

    fn norm(self, ctx: &PrimeContext) -> u64 {
        ctx.sub(ctx.mul(self.x, self.x), ctx.mul(ctx.epsilon(), ctx.mul(self.y, self.y)))
    }

    /// `self / o` by multiplying with the conjugate of `o`.
    fn div(self, o: Quad, ctx: &PrimeContext) -> Quad {
        let n = ctx.inv(o.norm(ctx));
        let p = self.mul(Quad { x: o.x, y: ctx.neg(o.y) }, ctx);
        Quad { x: ctx.mul(p.x, n), y: ctx.mul(p.y, n) }
    }
}

/// `z -> (a z + b) / (c z + d)` on `C_l`.
pub fn cartan_act(g: &GroupElement, z: CartanPoint, ctx: &PrimeContext) -> CartanPoint {
    let num = Quad { x: ctx.add(ctx.mul(g.a, z.x), g.b), y: ctx.mul(g.a, z.y) };
    let den = Quad { x: ctx.add(ctx.mul(g.c, z.x), g.d), y: ctx.mul(g.c, z.y) };
    let w = num.div(den, ctx);
    debug_assert!(w.y != 0);
    CartanPoint { x: w.x, y: w.y }
}

pub fn orbit_act(g: &GroupElement, w: CartanOrbit, ctx: &PrimeContext) -> CartanOrbit {
    cartan_act(g, w.representative(), ctx).orbit(ctx)
}

pub fn enumerate_pairs_unordered(ctx: &PrimeContext) -> Vec<UnorderedPair> {
    let pts = enumerate_p1(ctx);
    let mut out = Vec::with_capacity(pts.len() * (pts.len() - 1) / 2);
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            out.push(UnorderedPair { lo: a, hi: b });
        }
    }
    out
}

pub fn enumerate_pairs_ordered(ctx: &PrimeContext) -> Vec<OrderedPair> {
    let pts = enumerate_p1(ctx);
    let mut out = Vec::with_capacity(pts.len() * (pts.len() - 1));
    for &a in &pts {
        for &b in &pts {
            if a != b {
                out.push(OrderedPair { first: a, second: b });
            }
        }
    }
    out
}

pub fn enumerate_h(ctx: &PrimeContext) -> Vec<CartanOrbit> {
    (0..ctx.ell())
        .flat_map(|x| (1..=ctx.r()).map(move |y| CartanOrbit { x, y }))
        .collect()
}

pub fn enumerate_c(ctx: &PrimeContext) -> Vec<CartanPoint> {
    (0..ctx.ell())
        .flat_map(|x| (1..ctx.ell()).map(move |y| CartanPoint { x, y }))
        .collect()
}

/// The basis sets operator matrices are indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasisKind {
    /// Unordered pairs of distinct points of `P^1`; `G/N`.
    UnorderedPairs,
    /// Ordered pairs of distinct points of `P^1`; `G/C`.
    OrderedPairs,
    /// `H_l`; `G/N'`.
    HalfPlane,
    /// `C_l`; `G/C'`.
    Punctured,
    /// Unordered pairs of distinct affine points.
    AffineUnorderedPairs,
    /// Ordered pairs of distinct affine points.
    AffineOrderedPairs,
}

impl BasisKind {
    pub fn tag(self) -> &'static str {
        match self {
            BasisKind::UnorderedPairs => "unordered_pairs",
            BasisKind::OrderedPairs => "ordered_pairs",
            BasisKind::HalfPlane => "H",
            BasisKind::Punctured => "C",
            BasisKind::AffineUnorderedPairs => "affine_unordered_pairs",
            BasisKind::AffineOrderedPairs => "affine_ordered_pairs",
        }
    }

    pub fn size(self, ell: u64) -> usize {
        let l = ell as usize;
        match self {
            BasisKind::UnorderedPairs => l * (l + 1) / 2,
            BasisKind::OrderedPairs => l * (l + 1),
            BasisKind::HalfPlane | BasisKind::AffineUnorderedPairs => l * (l - 1) / 2,
            BasisKind::Punctured | BasisKind::AffineOrderedPairs => l * (l - 1),
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A single basis vector of one of the [`BasisKind`] sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasisElement {
    Unordered(UnorderedPair),
    Ordered(OrderedPair),
    Orbit(CartanOrbit),
    Point(CartanPoint),
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::Unordered(p) => p.fmt(f),
            BasisElement::Ordered(p) => p.fmt(f),
            BasisElement::Orbit(w) => w.fmt(f),
            BasisElement::Point(z) => z.fmt(f),
        }
    }
}

/// Index arithmetic for the canonical enumerations.
#[derive(Debug, Clone, Copy)]
pub struct Basis {
    kind: BasisKind,
    ctx: PrimeContext,
}

impl Basis {
    pub fn new(kind: BasisKind, ctx: &PrimeContext) -> Self {
        Self { kind, ctx: *ctx }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.kind.size(self.ctx.ell())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<BasisElement> {
        let ctx = &self.ctx;
        match self.kind {
            BasisKind::UnorderedPairs => enumerate_pairs_unordered(ctx).into_iter().map(BasisElement::Unordered).collect(),
            BasisKind::OrderedPairs => enumerate_pairs_ordered(ctx).into_iter().map(BasisElement::Ordered).collect(),
            BasisKind::HalfPlane => enumerate_h(ctx).into_iter().map(BasisElement::Orbit).collect(),
            BasisKind::Punctured => enumerate_c(ctx).into_iter().map(BasisElement::Point).collect(),
            BasisKind::AffineUnorderedPairs => enumerate_pairs_unordered(ctx)
                .into_iter()
                .filter(|p| p.is_affine())
                .map(BasisElement::Unordered)
                .collect(),
            BasisKind::AffineOrderedPairs => enumerate_pairs_ordered(ctx)
                .into_iter()
                .filter(|p| p.is_affine())
                .map(BasisElement::Ordered)
                .collect(),
        }
    }

    pub fn element(&self, i: usize) -> BasisElement {
        let l = self.ctx.ell() as usize;
        match self.kind {
            BasisKind::UnorderedPairs | BasisKind::AffineUnorderedPairs => {
                let n = if self.kind == BasisKind::UnorderedPairs { l + 1 } else { l };
                let (a, b) = unrank_pair(i, n);
                BasisElement::Unordered(UnorderedPair {
                    lo: ProjectivePoint::from_index(a, self.ctx.ell()),
                    hi: ProjectivePoint::from_index(b, self.ctx.ell()),
                })
            }
            BasisKind::OrderedPairs | BasisKind::AffineOrderedPairs => {
                let n = if self.kind == BasisKind::OrderedPairs { l + 1 } else { l };
                let a = i / (n - 1);
                let mut b = i % (n - 1);
                if b >= a {
                    b += 1;
                }
                BasisElement::Ordered(OrderedPair {
                    first: ProjectivePoint::from_index(a, self.ctx.ell()),
                    second: ProjectivePoint::from_index(b, self.ctx.ell()),
                })
            }
            BasisKind::HalfPlane => {
                let r = self.ctx.r() as usize;
                BasisElement::Orbit(CartanOrbit { x: (i / r) as u64, y: (i % r + 1) as u64 })
            }
            BasisKind::Punctured => {
                BasisElement::Point(CartanPoint { x: (i / (l - 1)) as u64, y: (i % (l - 1) + 1) as u64 })
            }
        }
    }

    /// Position of `e` in this basis; `None` if `e` is of another kind or
    /// falls outside an affine sub-basis.
    pub fn index_of(&self, e: &BasisElement) -> Option<usize> {
        let ell = self.ctx.ell();
        let l = ell as usize;
        match (self.kind, e) {
            (BasisKind::UnorderedPairs, BasisElement::Unordered(p)) => {
                Some(rank_pair(p.lo.index(ell), p.hi.index(ell), l + 1))
            }
            (BasisKind::AffineUnorderedPairs, BasisElement::Unordered(p)) if p.is_affine() => {
                Some(rank_pair(p.lo.index(ell), p.hi.index(ell), l))
            }
            (BasisKind::OrderedPairs, BasisElement::Ordered(p)) => {
                Some(rank_ordered(p.first.index(ell), p.second.index(ell), l + 1))
            }
            (BasisKind::AffineOrderedPairs, BasisElement::Ordered(p)) if p.is_affine() => {
                Some(rank_ordered(p.first.index(ell), p.second.index(ell), l))
            }
            (BasisKind::HalfPlane, BasisElement::Orbit(w)) => Some(w.index(&self.ctx)),
            (BasisKind::Punctured, BasisElement::Point(z)) => Some(z.index(&self.ctx)),
            _ => None,
        }
    }

    /// Index of `g . element(i)`. Affine sub-bases are not `G`-stable and
    /// are rejected.
    pub fn act(&self, g: &GroupElement, i: usize) -> Result<usize> {
        let image = act_on_element(g, &self.element(i), &self.ctx);
        self.index_of(&image)
            .ok_or_else(|| Error::BasisMismatch(format!("{} is not G-stable", self.kind)))
    }
}

/// `g` applied to a basis element.
pub fn act_on_element(g: &GroupElement, e: &BasisElement, ctx: &PrimeContext) -> BasisElement {
    match e {
        BasisElement::Unordered(p) => BasisElement::Unordered(
            UnorderedPair::new(mobius_act(g, p.lo, ctx), mobius_act(g, p.hi, ctx)).expect("action is injective"),
        ),
        BasisElement::Ordered(p) => BasisElement::Ordered(OrderedPair {
            first: mobius_act(g, p.first, ctx),
            second: mobius_act(g, p.second, ctx),
        }),
        BasisElement::Orbit(w) => BasisElement::Orbit(orbit_act(g, *w, ctx)),
        BasisElement::Point(z) => BasisElement::Point(cartan_act(g, *z, ctx)),
    }
}

// Lexicographic rank of (a, b), a < b, among pairs drawn from 0..n.
fn rank_pair(a: usize, b: usize, n: usize) -> usize {
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn unrank_pair(mut i: usize, n: usize) -> (usize, usize) {
    let mut a = 0;
    while i >= n - a - 1 {
        i -= n - a - 1;
        a += 1;
    }
    (a, a + 1 + i)
}

fn rank_ordered(a: usize, b: usize, n: usize) -> usize {
    a * (n - 1) + if b > a { b - 1 } else { b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(ell: u64) -> PrimeContext {
        PrimeContext::new(ell).unwrap()
    }

    #[test]
    fn mobius_examples() {
        let c = ctx(7);
        let id = GroupElement::identity();
        assert_eq!(mobius_act(&id, ProjectivePoint::Affine(5), &c), ProjectivePoint::Affine(5));
        let (a, b) = (2, 5);
        let g = GroupElement::new(b, a, 1, 1, &c).unwrap();
        assert_eq!(mobius_act(&g, ProjectivePoint::Infinity, &c), ProjectivePoint::Affine(b));
        let swap = GroupElement::new(0, 1, 1, 0, &c).unwrap();
        assert_eq!(mobius_act(&swap, ProjectivePoint::Affine(0), &c), ProjectivePoint::Infinity);
    }

    #[test]
    fn cartan_examples() {
        let c = ctx(7);
        let z = CartanPoint::new(2, 3, &c).unwrap();
        assert_eq!(cartan_act(&GroupElement::identity(), z, &c), z);
        let t = GroupElement::new(1, 1, 0, 1, &c).unwrap();
        for z in enumerate_c(&c) {
            assert_eq!(cartan_act(&t, z, &c), CartanPoint::new(z.x() + 1, z.y(), &c).unwrap());
        }
        // eps / sqrt(eps) = sqrt(eps)
        for ell in [3u64, 5, 7, 11, 13] {
            let c = ctx(ell);
            let m = GroupElement::new(0, c.epsilon(), 1, 0, &c).unwrap();
            let se = CartanPoint::new(0, 1, &c).unwrap();
            assert_eq!(cartan_act(&m, se, &c), se);
        }
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_pairs_unordered(&ctx(3)).len(), 6);
        assert_eq!(enumerate_h(&ctx(3)).len(), 3);
        assert_eq!(enumerate_c(&ctx(5)).len(), 20);
        assert_eq!(enumerate_pairs_ordered(&ctx(5)).len(), 30);
    }

    #[test]
    fn enumerations_are_sorted_and_indexed() {
        for ell in [3u64, 5, 7, 11] {
            let c = ctx(ell);
            for kind in [
                BasisKind::UnorderedPairs,
                BasisKind::OrderedPairs,
                BasisKind::HalfPlane,
                BasisKind::Punctured,
                BasisKind::AffineUnorderedPairs,
                BasisKind::AffineOrderedPairs,
            ] {
                let basis = Basis::new(kind, &c);
                let els = basis.elements();
                assert_eq!(els.len(), kind.size(ell), "{kind}");
                for (i, e) in els.iter().enumerate() {
                    assert_eq!(basis.element(i), *e, "{kind} {i}");
                    assert_eq!(basis.index_of(e), Some(i), "{kind} {i}");
                }
            }
            let u = enumerate_pairs_unordered(&c);
            assert!(u.windows(2).all(|w| w[0] < w[1]));
            let o = enumerate_pairs_ordered(&c);
            assert!(o.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(u.last().unwrap().hi(), ProjectivePoint::Infinity);
        }
    }

    #[test]
    fn pair_constructors() {
        let a = ProjectivePoint::Affine(1);
        let b = ProjectivePoint::Infinity;
        assert_eq!(UnorderedPair::new(a, b).unwrap(), UnorderedPair::new(b, a).unwrap());
        assert_eq!(UnorderedPair::new(a, a), Err(Error::Diagonal));
        assert_eq!(OrderedPair::new(b, b), Err(Error::Diagonal));
        assert_eq!(CartanPoint::new(1, 0, &ctx(5)), Err(Error::RealPoint));
    }

    #[test]
    fn orbit_normalization() {
        let c = ctx(7);
        let w = CartanOrbit::new(3, 5, &c).unwrap();
        assert_eq!((w.x(), w.y()), (3, 2));
        assert_eq!(CartanOrbit::new(3, 2, &c).unwrap(), w);
    }

    #[test]
    fn canonical_strings() {
        let c = ctx(5);
        let p = UnorderedPair::new(ProjectivePoint::Infinity, ProjectivePoint::Affine(2)).unwrap();
        assert_eq!(p.to_string(), "{2,inf}");
        let o = OrderedPair::new(ProjectivePoint::Infinity, ProjectivePoint::Affine(2)).unwrap();
        assert_eq!(o.to_string(), "(inf,2)");
        assert_eq!(CartanPoint::new(1, 4, &c).unwrap().to_string(), "1+4*se");
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(GroupElement::new(1, 2, 2, 4, &ctx(5)), Err(Error::Singular { .. })));
    }
}
