//! Coordinate charts on the affine parts of the four coset spaces.
//!
//! Split side: an affine pair `{a, b}` goes to `(t, n) = (a + b, ab)` and
//! then to `(t, m)` with `m = t^2 - 4n = (a - b)^2`; an ordered pair goes to
//! `(t, t') = (a + b, a - b)`. Non-split side: the class of `z = x + y sqrt(eps)`
//! goes to `(T, N) = (z + zbar, z zbar) = (2x, x^2 - eps y^2)` and then to
//! `(T, M)` with `M = T^2 - 4N = 4 eps y^2`; a point `z` goes to
//! `(T, T') = (2x, 2y)`, where `T'` is the sqrt(eps)-coefficient of `z - zbar`.

use serde::Serialize;

use super::{CartanOrbit, CartanPoint, OrderedPair, ProjectivePoint, UnorderedPair};
use crate::error::{Error, Result};
use crate::modular_arith::{sqrt_mod, PrimeContext};

/// `(t, n)` with `t^2 - 4n` a nonzero square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitPairTN {
    pub t: u64,
    pub n: u64,
}

/// `(t, m)` with `m` a nonzero square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitPairTM {
    pub t: u64,
    pub m: u64,
}

/// `(T, N)` with `T^2 - 4N` a non-square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NonsplitTN {
    pub t: u64,
    pub n: u64,
}

/// `(T, M)` with `M` a non-square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NonsplitTM {
    pub t: u64,
    pub m: u64,
}

/// `(t, t')` with `t' != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitDiff {
    pub t: u64,
    pub t_prime: u64,
}

/// `(T, T')` with `T' != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NonsplitDiff {
    pub t: u64,
    pub t_prime: u64,
}

fn domain(msg: impl Into<String>) -> Error {
    Error::ChartDomain(msg.into())
}

fn affine_pair(p: &UnorderedPair) -> Result<(u64, u64)> {
    match (p.lo(), p.hi()) {
        (ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)) => Ok((a, b)),
        _ => Err(domain(format!("pair {p} contains inf"))),
    }
}

impl SplitPairTN {
    pub fn new(t: u64, n: u64, ctx: &PrimeContext) -> Result<Self> {
        let (t, n) = (t % ctx.ell(), n % ctx.ell());
        let disc = ctx.sub(ctx.mul(t, t), ctx.mul(4, n));
        if !ctx.is_square(disc) {
            return Err(domain(format!("t^2 - 4n = {disc} is not a nonzero square")));
        }
        Ok(Self { t, n })
    }
}

impl SplitPairTM {
    pub fn new(t: u64, m: u64, ctx: &PrimeContext) -> Result<Self> {
        let (t, m) = (t % ctx.ell(), m % ctx.ell());
        if !ctx.is_square(m) {
            return Err(domain(format!("m = {m} is not a nonzero square")));
        }
        Ok(Self { t, m })
    }
}

impl NonsplitTN {
    pub fn new(t: u64, n: u64, ctx: &PrimeContext) -> Result<Self> {
        let (t, n) = (t % ctx.ell(), n % ctx.ell());
        let disc = ctx.sub(ctx.mul(t, t), ctx.mul(4, n));
        if !ctx.is_nonsquare(disc) {
            return Err(domain(format!("T^2 - 4N = {disc} is not a non-square")));
        }
        Ok(Self { t, n })
    }
}

impl NonsplitTM {
    pub fn new(t: u64, m: u64, ctx: &PrimeContext) -> Result<Self> {
        let (t, m) = (t % ctx.ell(), m % ctx.ell());
        if !ctx.is_nonsquare(m) {
            return Err(domain(format!("M = {m} is not a non-square")));
        }
        Ok(Self { t, m })
    }
}

impl SplitDiff {
    pub fn new(t: u64, t_prime: u64, ctx: &PrimeContext) -> Result<Self> {
        let (t, t_prime) = (t % ctx.ell(), t_prime % ctx.ell());
        if t_prime == 0 {
            return Err(domain("t' must be nonzero"));
        }
        Ok(Self { t, t_prime })
    }
}

impl NonsplitDiff {
    pub fn new(t: u64, t_prime: u64, ctx: &PrimeContext) -> Result<Self> {
        let (t, t_prime) = (t % ctx.ell(), t_prime % ctx.ell());
        if t_prime == 0 {
            return Err(domain("T' must be nonzero"));
        }
        Ok(Self { t, t_prime })
    }
}

/// `{a, b} -> (a + b, ab)`.
pub fn pair_to_tn(p: &UnorderedPair, ctx: &PrimeContext) -> Result<SplitPairTN> {
    let (a, b) = affine_pair(p)?;
    Ok(SplitPairTN { t: ctx.add(a, b), n: ctx.mul(a, b) })
}

/// The two roots of `x^2 - t x + n`.
pub fn tn_to_pair(c: SplitPairTN, ctx: &PrimeContext) -> UnorderedPair {
    let disc = ctx.sub(ctx.mul(c.t, c.t), ctx.mul(4, c.n));
    let roots = sqrt_mod(disc, ctx);
    let half = ctx.inv(2);
    let a = ctx.mul(ctx.add(c.t, roots[0]), half);
    let b = ctx.mul(ctx.sub(c.t, roots[0]), half);
    UnorderedPair::new(ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)).expect("discriminant is nonzero")
}

pub fn tn_to_tm(c: SplitPairTN, ctx: &PrimeContext) -> SplitPairTM {
    SplitPairTM { t: c.t, m: ctx.sub(ctx.mul(c.t, c.t), ctx.mul(4, c.n)) }
}

pub fn tm_to_tn(c: SplitPairTM, ctx: &PrimeContext) -> SplitPairTN {
    SplitPairTN { t: c.t, n: ctx.div(ctx.sub(ctx.mul(c.t, c.t), c.m), 4) }
}

pub fn pair_to_tm(p: &UnorderedPair, ctx: &PrimeContext) -> Result<SplitPairTM> {
    Ok(tn_to_tm(pair_to_tn(p, ctx)?, ctx))
}

pub fn tm_to_pair(c: SplitPairTM, ctx: &PrimeContext) -> UnorderedPair {
    tn_to_pair(tm_to_tn(c, ctx), ctx)
}

/// `{z, zbar} -> (z + zbar, z zbar)`.
pub fn orbit_to_nonsplit_tn(w: &CartanOrbit, ctx: &PrimeContext) -> NonsplitTN {
    let (x, y) = (w.x(), w.y());
    NonsplitTN {
        t: ctx.mul(2, x),
        n: ctx.sub(ctx.mul(x, x), ctx.mul(ctx.epsilon(), ctx.mul(y, y))),
    }
}

/// The conjugate pair of roots of `x^2 - T x + N` in F_{l^2}.
pub fn nonsplit_tn_to_orbit(c: NonsplitTN, ctx: &PrimeContext) -> CartanOrbit {
    let x = ctx.div(c.t, 2);
    let y2 = ctx.div(ctx.sub(ctx.mul(x, x), c.n), ctx.epsilon());
    let y = sqrt_mod(y2, ctx)[0];
    CartanOrbit::new(x, y, ctx).expect("discriminant is a non-square, so y != 0")
}

pub fn nonsplit_tn_to_tm(c: NonsplitTN, ctx: &PrimeContext) -> NonsplitTM {
    NonsplitTM { t: c.t, m: ctx.sub(ctx.mul(c.t, c.t), ctx.mul(4, c.n)) }
}

pub fn nonsplit_tm_to_tn(c: NonsplitTM, ctx: &PrimeContext) -> NonsplitTN {
    NonsplitTN { t: c.t, n: ctx.div(ctx.sub(ctx.mul(c.t, c.t), c.m), 4) }
}

pub fn orbit_to_nonsplit_tm(w: &CartanOrbit, ctx: &PrimeContext) -> NonsplitTM {
    nonsplit_tn_to_tm(orbit_to_nonsplit_tn(w, ctx), ctx)
}

pub fn nonsplit_tm_to_orbit(c: NonsplitTM, ctx: &PrimeContext) -> CartanOrbit {
    nonsplit_tn_to_orbit(nonsplit_tm_to_tn(c, ctx), ctx)
}

/// `(a, b) -> (a + b, a - b)`.
pub fn pair_to_diff(p: &OrderedPair, ctx: &PrimeContext) -> Result<SplitDiff> {
    match (p.first(), p.second()) {
        (ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)) => {
            Ok(SplitDiff { t: ctx.add(a, b), t_prime: ctx.sub(a, b) })
        }
        _ => Err(domain(format!("pair {p} contains inf"))),
    }
}

pub fn diff_to_pair(c: SplitDiff, ctx: &PrimeContext) -> OrderedPair {
    let a = ctx.div(ctx.add(c.t, c.t_prime), 2);
    let b = ctx.div(ctx.sub(c.t, c.t_prime), 2);
    OrderedPair::new(ProjectivePoint::Affine(a), ProjectivePoint::Affine(b)).expect("t' != 0")
}

/// `z -> (2x, 2y)`.
pub fn cartan_to_diff(z: &CartanPoint, ctx: &PrimeContext) -> NonsplitDiff {
    NonsplitDiff { t: ctx.mul(2, z.x()), t_prime: ctx.mul(2, z.y()) }
}

pub fn diff_to_cartan(c: NonsplitDiff, ctx: &PrimeContext) -> CartanPoint {
    CartanPoint::new(ctx.div(c.t, 2), ctx.div(c.t_prime, 2), ctx).expect("T' != 0")
}
