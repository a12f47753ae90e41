//! Subgroups of `GL2(F_l)`, double coset decompositions `HgK = U alpha g K`,
//! and the operators `Z[G/H] -> Z[G/K]`, `xH -> sum_alpha x alpha g K`.
//!
//! Cosets of the built-in subgroups are keyed by the geometric object they
//! carry the base object to:
//!
//! | K  | base object      | coset space       |
//! |----|------------------|-------------------|
//! | C  | `(0, inf)`       | ordered pairs     |
//! | N  | `{0, inf}`       | unordered pairs   |
//! | C' | `sqrt(eps)`      | `C_l`             |
//! | N' | `[sqrt(eps)]`    | `H_l`             |
//! | B  | `inf`            | `P^1`             |

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::correspondence::{transporter, OperatorMatrix};
use crate::error::{AxiomFailure, Error, Result};
use crate::geometry::{
    cartan_act, group_order, mobius_act, Basis, BasisElement, BasisKind, CartanPoint, GroupElement, OrderedPair,
    ProjectivePoint, UnorderedPair,
};
use crate::modular_arith::PrimeContext;

/// Materializing more elements than this is refused.
pub const MAX_SUBGROUP_SIZE: u64 = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SubgroupKind {
    /// Diagonal matrices.
    SplitCartan,
    /// `(x eps*y; y x)`.
    NonsplitCartan,
    /// Diagonal and antidiagonal matrices.
    NormalizerSplit,
    /// `(x eps*y; y x)` and `(x -eps*y; y -x)`.
    NormalizerNonsplit,
    /// Upper triangular matrices.
    Borel,
    /// All of `GL2(F_l)`.
    General,
    Custom,
}

impl SubgroupKind {
    pub fn symbol(self) -> &'static str {
        match self {
            SubgroupKind::SplitCartan => "C",
            SubgroupKind::NonsplitCartan => "C'",
            SubgroupKind::NormalizerSplit => "N",
            SubgroupKind::NormalizerNonsplit => "N'",
            SubgroupKind::Borel => "B",
            SubgroupKind::General => "G",
            SubgroupKind::Custom => "custom",
        }
    }

    /// Expected order, `None` for custom subgroups.
    pub fn order(self, ell: u64) -> Option<u64> {
        let l = ell;
        Some(match self {
            SubgroupKind::SplitCartan => (l - 1) * (l - 1),
            SubgroupKind::NonsplitCartan => l * l - 1,
            SubgroupKind::NormalizerSplit => 2 * (l - 1) * (l - 1),
            SubgroupKind::NormalizerNonsplit => 2 * (l * l - 1),
            SubgroupKind::Borel => l * (l - 1) * (l - 1),
            SubgroupKind::General => group_order(l),
            SubgroupKind::Custom => return None,
        })
    }

    /// The canonical basis `G/K` is identified with, where one exists.
    pub fn coset_basis(self) -> Option<BasisKind> {
        match self {
            SubgroupKind::SplitCartan => Some(BasisKind::OrderedPairs),
            SubgroupKind::NormalizerSplit => Some(BasisKind::UnorderedPairs),
            SubgroupKind::NonsplitCartan => Some(BasisKind::Punctured),
            SubgroupKind::NormalizerNonsplit => Some(BasisKind::HalfPlane),
            _ => None,
        }
    }
}

impl fmt::Display for SubgroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A subgroup with its elements listed explicitly.
#[derive(Debug, Clone)]
pub struct SubgroupSpec {
    kind: SubgroupKind,
    ctx: PrimeContext,
    elements: Vec<GroupElement>,
    members: HashSet<GroupElement>,
}

/// Canonical label of the coset `xK`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CosetKey {
    Ordered(OrderedPair),
    Unordered(UnorderedPair),
    Point(CartanPoint),
    Orbit(crate::geometry::CartanOrbit),
    Projective(ProjectivePoint),
    Whole,
    /// Smallest element of `xK`.
    Minimum(GroupElement),
}

impl CosetKey {
    fn into_basis_element(self) -> Option<BasisElement> {
        match self {
            CosetKey::Ordered(p) => Some(BasisElement::Ordered(p)),
            CosetKey::Unordered(p) => Some(BasisElement::Unordered(p)),
            CosetKey::Point(z) => Some(BasisElement::Point(z)),
            CosetKey::Orbit(w) => Some(BasisElement::Orbit(w)),
            _ => None,
        }
    }
}

fn all_units(ell: u64) -> impl Iterator<Item = u64> + Clone {
    1..ell
}

pub fn enumerate_subgroup(kind: SubgroupKind, ctx: &PrimeContext) -> Result<SubgroupSpec> {
    let l = ctx.ell();
    let e = ctx.epsilon();
    if let Some(size) = kind.order(l) {
        if size > MAX_SUBGROUP_SIZE {
            return Err(Error::SubgroupTooLarge { ell: l, size });
        }
    }
    let el = |a, b, c, d| GroupElement::new(a, b, c, d, ctx).expect("parameterization gives invertible matrices");
    let diag = || all_units(l).flat_map(move |a| all_units(l).map(move |d| (a, d)));
    let nonsplit = || {
        (0..l)
            .flat_map(move |x| (0..l).map(move |y| (x, y)))
            .filter(|&(x, y)| (x, y) != (0, 0))
    };
    let elements: Vec<GroupElement> = match kind {
        SubgroupKind::SplitCartan => diag().map(|(a, d)| el(a, 0, 0, d)).collect(),
        SubgroupKind::NormalizerSplit => {
            diag().map(|(a, d)| el(a, 0, 0, d)).chain(diag().map(|(b, c)| el(0, b, c, 0))).collect()
        }
        SubgroupKind::NonsplitCartan => nonsplit().map(|(x, y)| el(x, ctx.mul(e, y), y, x)).collect(),
        SubgroupKind::NormalizerNonsplit => nonsplit()
            .map(|(x, y)| el(x, ctx.mul(e, y), y, x))
            .chain(nonsplit().map(|(x, y)| el(x, ctx.neg(ctx.mul(e, y)), y, ctx.neg(x))))
            .collect(),
        SubgroupKind::Borel => diag().flat_map(|(a, d)| (0..l).map(move |b| (a, b, d))).map(|(a, b, d)| el(a, b, 0, d)).collect(),
        SubgroupKind::General => {
            let mut v = Vec::with_capacity(group_order(l) as usize);
            for a in 0..l {
                for b in 0..l {
                    for c in 0..l {
                        for d in 0..l {
                            if let Ok(g) = GroupElement::new(a, b, c, d, ctx) {
                                v.push(g);
                            }
                        }
                    }
                }
            }
            v
        }
        SubgroupKind::Custom => {
            return Err(Error::InvalidScheme("use SubgroupSpec::custom for explicit element lists".into()))
        }
    };
    let spec = SubgroupSpec::from_elements(kind, ctx, elements);
    let expected = kind.order(l).expect("built-in kind");
    if spec.len() as u64 != expected {
        return Err(Error::Certificate(format!("|{kind}| = {} but expected {expected}", spec.len())));
    }
    if !spec.contains(&GroupElement::identity()) {
        return Err(Error::NotAGroup(AxiomFailure::MissingIdentity));
    }
    if let Some(g) = spec.elements.iter().find(|g| !spec.contains(&g.inverse(ctx))) {
        return Err(Error::NotAGroup(AxiomFailure::MissingInverse(*g)));
    }
    Ok(spec)
}

impl SubgroupSpec {
    fn from_elements(kind: SubgroupKind, ctx: &PrimeContext, elements: Vec<GroupElement>) -> Self {
        let members: HashSet<_> = elements.iter().copied().collect();
        Self { kind, ctx: *ctx, elements, members }
    }

    /// Validates an explicit element list against the group axioms; entries
    /// are reduced modulo `l`.
    pub fn custom(elements: Vec<GroupElement>, ctx: &PrimeContext) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::NotAGroup(AxiomFailure::Empty));
        }
        let mut reduced = Vec::with_capacity(elements.len());
        let mut seen = HashSet::new();
        for g in elements {
            let r = GroupElement::new(g.a, g.b, g.c, g.d, ctx).map_err(|_| Error::NotAGroup(AxiomFailure::NotInvertible(g)))?;
            if seen.insert(r) {
                reduced.push(r);
            }
        }
        let spec = Self::from_elements(SubgroupKind::Custom, ctx, reduced);
        if let Some(f) = spec.axiom_failure() {
            return Err(Error::NotAGroup(f));
        }
        Ok(spec)
    }

    /// First violated axiom, checking closure over all pairs.
    pub fn axiom_failure(&self) -> Option<AxiomFailure> {
        if self.elements.is_empty() {
            return Some(AxiomFailure::Empty);
        }
        if !self.contains(&GroupElement::identity()) {
            return Some(AxiomFailure::MissingIdentity);
        }
        for g in &self.elements {
            if !self.contains(&g.inverse(&self.ctx)) {
                return Some(AxiomFailure::MissingInverse(*g));
            }
        }
        for x in &self.elements {
            for y in &self.elements {
                let p = x.compose(y, &self.ctx);
                if !self.contains(&p) {
                    return Some(AxiomFailure::NotClosed { left: *x, right: *y, product: p });
                }
            }
        }
        None
    }

    pub fn kind(&self) -> SubgroupKind {
        self.kind
    }

    pub fn context(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.members.contains(g)
    }

    /// Label of the left coset `xK`, where `self` is `K`.
    pub fn coset_key(&self, x: &GroupElement) -> CosetKey {
        let ctx = &self.ctx;
        let zero = ProjectivePoint::Affine(0);
        let inf = ProjectivePoint::Infinity;
        let root = CartanPoint::new(0, 1, ctx).expect("y = 1");
        match self.kind {
            SubgroupKind::SplitCartan => CosetKey::Ordered(
                OrderedPair::new(mobius_act(x, zero, ctx), mobius_act(x, inf, ctx)).expect("injective"),
            ),
            SubgroupKind::NormalizerSplit => CosetKey::Unordered(
                UnorderedPair::new(mobius_act(x, zero, ctx), mobius_act(x, inf, ctx)).expect("injective"),
            ),
            SubgroupKind::NonsplitCartan => CosetKey::Point(cartan_act(x, root, ctx)),
            SubgroupKind::NormalizerNonsplit => CosetKey::Orbit(cartan_act(x, root, ctx).orbit(ctx)),
            SubgroupKind::Borel => CosetKey::Projective(mobius_act(x, inf, ctx)),
            SubgroupKind::General => CosetKey::Whole,
            SubgroupKind::Custom => {
                CosetKey::Minimum(self.elements.iter().map(|k| x.compose(k, ctx)).min().expect("nonempty"))
            }
        }
    }

    /// Some `x` with `x K` labelled by the basis element `e`.
    fn coset_section(&self, e: &BasisElement) -> Result<GroupElement> {
        let ctx = &self.ctx;
        let lift = |z: CartanPoint| GroupElement::new(z.y(), z.x(), 0, 1, ctx);
        match (self.kind, e) {
            (SubgroupKind::SplitCartan, BasisElement::Ordered(p)) => transporter(p.first(), p.second(), ctx),
            (SubgroupKind::NormalizerSplit, BasisElement::Unordered(p)) => transporter(p.lo(), p.hi(), ctx),
            (SubgroupKind::NonsplitCartan, BasisElement::Point(z)) => lift(*z),
            (SubgroupKind::NormalizerNonsplit, BasisElement::Orbit(w)) => lift(w.representative()),
            _ => Err(Error::UnsupportedIdentification(format!("{} with basis element {e}", self.kind))),
        }
    }
}

/// `HgK` as a disjoint union of left cosets `alpha g K`, `alpha` in `H`.
#[derive(Debug, Clone)]
pub struct DoubleCosetDecomposition {
    pub h: SubgroupSpec,
    pub k: SubgroupSpec,
    pub g: GroupElement,
    pub representatives: Vec<GroupElement>,
    pub degree: usize,
    /// `[H : H ∩ gKg^-1]`, computed independently of the bucketing.
    pub index: usize,
    buckets: Vec<Vec<GroupElement>>,
}

/// Buckets `H` by the coset `h g K`. The first element of `H` in each bucket
/// is the representative.
pub fn decompose(h: &SubgroupSpec, g: &GroupElement, k: &SubgroupSpec) -> Result<DoubleCosetDecomposition> {
    let ctx = h.context();
    if h.context() != k.context() {
        return Err(Error::BasisMismatch("subgroups over different contexts".into()));
    }
    let mut buckets: BTreeMap<CosetKey, Vec<GroupElement>> = BTreeMap::new();
    let mut order_of_first: Vec<CosetKey> = Vec::new();
    for x in h.elements() {
        let key = k.coset_key(&x.compose(g, ctx));
        let slot = buckets.entry(key.clone()).or_default();
        if slot.is_empty() {
            order_of_first.push(key);
        }
        slot.push(*x);
    }
    let buckets: Vec<Vec<GroupElement>> =
        order_of_first.iter().map(|key| buckets.remove(key).expect("key recorded")).collect();
    let representatives: Vec<GroupElement> = buckets.iter().map(|b| b[0]).collect();

    let g_inv = g.inverse(ctx);
    let stabilizer =
        h.elements().iter().filter(|x| k.contains(&g_inv.compose(x, ctx).compose(g, ctx))).count();
    let index = h.len() / stabilizer;
    if !h.len().is_multiple_of(stabilizer) || index != buckets.len() {
        return Err(Error::Certificate(format!(
            "bucket count {} disagrees with [H : H ∩ gKg^-1] = {}/{stabilizer}",
            buckets.len(),
            h.len()
        )));
    }
    log::debug!("decompose {} {g} {}: degree {}", h.kind(), k.kind(), buckets.len());
    Ok(DoubleCosetDecomposition {
        h: h.clone(),
        k: k.clone(),
        g: *g,
        degree: buckets.len(),
        index,
        representatives,
        buckets,
    })
}

impl DoubleCosetDecomposition {
    /// Same decomposition with a uniformly random representative from each
    /// bucket.
    pub fn reselect<R: Rng>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        out.representatives = self.buckets.iter().map(|b| *b.choose(rng).expect("nonempty bucket")).collect();
        out
    }

    /// Elements of `HgK`, listed once each.
    pub fn double_coset(&self) -> Vec<GroupElement> {
        let ctx = self.h.context();
        let mut all: Vec<GroupElement> = self
            .representatives
            .iter()
            .flat_map(|a| {
                let ag = a.compose(&self.g, ctx);
                self.k.elements().iter().map(move |x| ag.compose(x, ctx))
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Checks the cosets `alpha g K` are pairwise disjoint and cover `HgK`,
    /// by explicit enumeration of `HgK`.
    pub fn is_partition(&self) -> bool {
        let ctx = self.h.context();
        let mut direct: Vec<GroupElement> = self
            .h
            .elements()
            .iter()
            .flat_map(|x| {
                let xg = x.compose(&self.g, ctx);
                self.k.elements().iter().map(move |y| xg.compose(y, ctx))
            })
            .collect();
        direct.sort_unstable();
        direct.dedup();
        let union = self.double_coset();
        union.len() == self.representatives.len() * self.k.len() && union == direct
    }
}

/// Matrix of `xH -> sum_alpha x alpha g K` on the canonical bases of `G/H`
/// (columns) and `G/K` (rows).
pub fn coset_operator(dec: &DoubleCosetDecomposition) -> Result<OperatorMatrix> {
    let ctx = dec.h.context();
    let unsupported = |s: &SubgroupSpec| Error::UnsupportedIdentification(s.kind().to_string());
    let src = dec.h.kind().coset_basis().ok_or_else(|| unsupported(&dec.h))?;
    let dst = dec.k.kind().coset_basis().ok_or_else(|| unsupported(&dec.k))?;
    let src_basis = Basis::new(src, ctx);
    let dst_basis = Basis::new(dst, ctx);
    let shifts: Vec<GroupElement> = dec.representatives.iter().map(|a| a.compose(&dec.g, ctx)).collect();
    let mut columns = Vec::with_capacity(src_basis.len());
    for e in src_basis.elements() {
        let x = dec.h.coset_section(&e)?;
        debug_assert_eq!(dec.h.coset_key(&x).into_basis_element(), Some(e));
        let col = shifts
            .iter()
            .map(|s| {
                let target = dec.k.coset_key(&x.compose(s, ctx)).into_basis_element().expect("supported kind");
                (dst_basis.index_of(&target).expect("target in basis"), 1)
            })
            .collect();
        columns.push(col);
    }
    OperatorMatrix::from_columns(dst, src, ctx, columns)
}

/// `(1 s; 0 1)`.
pub fn unipotent(s: u64, ctx: &PrimeContext) -> GroupElement {
    GroupElement::new(1, s, 0, 1, ctx).expect("unipotent is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{build_h_s, build_psi_plus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(ell: u64) -> PrimeContext {
        PrimeContext::new(ell).unwrap()
    }

    fn sub(kind: SubgroupKind, c: &PrimeContext) -> SubgroupSpec {
        enumerate_subgroup(kind, c).unwrap()
    }

    #[test]
    fn orders() {
        let c3 = ctx(3);
        assert_eq!(sub(SubgroupKind::SplitCartan, &c3).len(), 4);
        assert_eq!(sub(SubgroupKind::NormalizerNonsplit, &c3).len(), 16);
        for ell in [3u64, 5, 7, 11] {
            let c = ctx(ell);
            for kind in [
                SubgroupKind::SplitCartan,
                SubgroupKind::NonsplitCartan,
                SubgroupKind::NormalizerSplit,
                SubgroupKind::NormalizerNonsplit,
                SubgroupKind::Borel,
            ] {
                let s = sub(kind, &c);
                assert_eq!(s.len() as u64, kind.order(ell).unwrap());
                if ell <= 7 {
                    assert_eq!(s.axiom_failure(), None, "{kind} at {ell}");
                }
            }
        }
    }

    #[test]
    fn n_normalizes_c() {
        let c = ctx(5);
        let cc = sub(SubgroupKind::SplitCartan, &c);
        let n = sub(SubgroupKind::NormalizerSplit, &c);
        for g in n.elements() {
            let gi = g.inverse(&c);
            for x in cc.elements() {
                assert!(cc.contains(&g.compose(x, &c).compose(&gi, &c)));
            }
        }
    }

    #[test]
    fn custom_validation() {
        let c = ctx(5);
        let id = GroupElement::identity();
        let minus = GroupElement::new(4, 0, 0, 4, &c).unwrap();
        assert_eq!(SubgroupSpec::custom(vec![id, minus], &c).unwrap().len(), 2);
        assert_eq!(SubgroupSpec::custom(vec![], &c).unwrap_err(), Error::NotAGroup(AxiomFailure::Empty));
        let two = GroupElement::new(2, 0, 0, 1, &c).unwrap();
        assert!(matches!(
            SubgroupSpec::custom(vec![id, two], &c),
            Err(Error::NotAGroup(AxiomFailure::MissingInverse(_)))
        ));
        let t = unipotent(1, &c);
        let t4 = unipotent(4, &c);
        assert!(matches!(
            SubgroupSpec::custom(vec![id, t, t4], &c),
            Err(Error::NotAGroup(AxiomFailure::NotClosed { .. }))
        ));
        let sing = GroupElement { a: 1, b: 1, c: 1, d: 1 };
        assert!(matches!(
            SubgroupSpec::custom(vec![sing], &c),
            Err(Error::NotAGroup(AxiomFailure::NotInvertible(_)))
        ));
    }

    #[test]
    fn degree_examples() {
        let c7 = ctx(7);
        let n = sub(SubgroupKind::NormalizerSplit, &c7);
        let np = sub(SubgroupKind::NormalizerNonsplit, &c7);
        assert_eq!(decompose(&n, &GroupElement::identity(), &np).unwrap().degree, 3);

        let c5 = ctx(5);
        let cs = sub(SubgroupKind::SplitCartan, &c5);
        let cp = sub(SubgroupKind::NonsplitCartan, &c5);
        assert_eq!(decompose(&cs, &unipotent(2, &c5), &cp).unwrap().degree, 4);

        let c3 = ctx(3);
        let g = sub(SubgroupKind::General, &c3);
        let d = decompose(&g, &unipotent(1, &c3), &g).unwrap();
        assert_eq!((d.degree, d.index), (1, 1));
    }

    #[test]
    fn partitions() {
        let c5 = ctx(5);
        let cs = sub(SubgroupKind::SplitCartan, &c5);
        let cp = sub(SubgroupKind::NonsplitCartan, &c5);
        let b = sub(SubgroupKind::Borel, &c5);
        for (h, k) in [(&cs, &cp), (&b, &cs), (&cp, &b)] {
            for s in 0..5 {
                assert!(decompose(h, &unipotent(s, &c5), k).unwrap().is_partition());
            }
        }
    }

    #[test]
    fn coincidence_small() {
        let c3 = ctx(3);
        let n = sub(SubgroupKind::NormalizerSplit, &c3);
        let np = sub(SubgroupKind::NormalizerNonsplit, &c3);
        let m = coset_operator(&decompose(&n, &GroupElement::identity(), &np).unwrap()).unwrap();
        assert_eq!(m, build_psi_plus(&c3));

        let c5 = ctx(5);
        let cs = sub(SubgroupKind::SplitCartan, &c5);
        let cp = sub(SubgroupKind::NonsplitCartan, &c5);
        let dec = decompose(&cs, &unipotent(2, &c5), &cp).unwrap();
        let m = coset_operator(&dec).unwrap();
        assert_eq!(m, build_h_s(&c5, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(coset_operator(&dec.reselect(&mut rng)).unwrap(), m);
    }

    #[test]
    fn row_sums_constant() {
        let c5 = ctx(5);
        let n = sub(SubgroupKind::NormalizerSplit, &c5);
        let np = sub(SubgroupKind::NormalizerNonsplit, &c5);
        let rs = coset_operator(&decompose(&n, &GroupElement::identity(), &np).unwrap()).unwrap().row_sums();
        assert!(rs.iter().all(|&v| v == rs[0]));
        // |G/N| * degree / |G/N'| = 15 * 2 / 10
        assert_eq!(rs[0], 3);
    }

    #[test]
    fn unsupported_identification() {
        let c3 = ctx(3);
        let b = sub(SubgroupKind::Borel, &c3);
        let n = sub(SubgroupKind::NormalizerSplit, &c3);
        let dec = decompose(&b, &GroupElement::identity(), &n).unwrap();
        assert!(matches!(coset_operator(&dec), Err(Error::UnsupportedIdentification(_))));
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            enumerate_subgroup(SubgroupKind::General, &ctx(47)),
            Err(Error::SubgroupTooLarge { .. })
        ));
    }
}
