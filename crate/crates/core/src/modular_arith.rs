//! Arithmetic in the prime field F_l and the number-theoretic helpers the
//! rest of the crate builds on.
//!
//! Field elements are plain `u64` values in `[0, l)`; [`PrimeContext`] owns
//! the modulus together with the fixed non-square `eps` and primitive root
//! `g`. [`Residue`] is a self-describing wrapper for callers that want
//! operator syntax.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this modulus `sqrt_mod` searches exhaustively.
pub const SQRT_EXHAUSTIVE_LIMIT: u64 = 10_000;

/// Largest modulus a [`PrimeContext`] accepts; keeps products inside `u64`.
pub const MAX_CONTEXT_PRIME: u64 = (1 << 31) - 1;

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn check_odd_prime(ell: u64) -> Result<()> {
    if ell < 3 || ell.is_multiple_of(2) || !is_prime(ell) {
        return Err(Error::NotOddPrime(ell));
    }
    Ok(())
}

fn euler_criterion(a: u64, ell: u64) -> i8 {
    let a = a % ell;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (ell - 1) / 2, ell) == 1 {
        1
    } else {
        -1
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// True iff `g` generates `F_ell^x`. `ell` must be an odd prime.
pub fn is_primitive_root(g: u64, ell: u64) -> bool {
    let g = g % ell;
    if g == 0 {
        return false;
    }
    distinct_prime_factors(ell - 1)
        .into_iter()
        .all(|q| pow_mod(g, (ell - 1) / q, ell) != 1)
}

/// Smallest positive non-square modulo the odd prime `ell`.
pub fn find_nonsquare(ell: u64) -> Result<u64> {
    check_odd_prime(ell)?;
    Ok((2..ell)
        .find(|&a| euler_criterion(a, ell) == -1)
        .expect("half of F_l^x are non-squares"))
}

/// Smallest positive primitive root modulo the odd prime `ell`.
pub fn find_primitive_root(ell: u64) -> Result<u64> {
    check_odd_prime(ell)?;
    Ok((1..ell)
        .find(|&g| is_primitive_root(g, ell))
        .expect("F_l^x is cyclic"))
}

/// Every primitive root modulo `ell`, ascending.
pub fn primitive_roots(ell: u64) -> Result<Vec<u64>> {
    check_odd_prime(ell)?;
    Ok((1..ell).filter(|&g| is_primitive_root(g, ell)).collect())
}

/// Every non-square in `F_ell^x`, ascending.
pub fn nonsquares(ell: u64) -> Result<Vec<u64>> {
    check_odd_prime(ell)?;
    Ok((1..ell).filter(|&a| euler_criterion(a, ell) == -1).collect())
}

/// An odd prime together with the choices of non-square and primitive root
/// every construction in the crate depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeContext {
    ell: u64,
    epsilon: u64,
    g: u64,
    r: u64,
}

impl PrimeContext {
    /// Context with the smallest non-square and smallest primitive root.
    pub fn new(ell: u64) -> Result<Self> {
        Self::with_choices(ell, None, None)
    }

    /// Context with optional overrides for `eps` and `g`; overrides are
    /// validated and reduced modulo `ell`.
    pub fn with_choices(ell: u64, epsilon: Option<u64>, g: Option<u64>) -> Result<Self> {
        check_odd_prime(ell)?;
        if ell > MAX_CONTEXT_PRIME {
            return Err(Error::NotOddPrime(ell));
        }
        let epsilon = match epsilon {
            Some(e) => {
                let e = e % ell;
                if euler_criterion(e, ell) != -1 {
                    return Err(Error::NotNonSquare { value: e, ell });
                }
                e
            }
            None => find_nonsquare(ell)?,
        };
        let g = match g {
            Some(g) => {
                let g = g % ell;
                if !is_primitive_root(g, ell) {
                    return Err(Error::NotPrimitiveRoot { value: g, ell });
                }
                g
            }
            None => find_primitive_root(ell)?,
        };
        Ok(Self { ell, epsilon, g, r: (ell - 1) / 2 })
    }

    /// Same prime and non-square, different primitive root.
    pub fn with_root(&self, g: u64) -> Result<Self> {
        Self::with_choices(self.ell, Some(self.epsilon), Some(g))
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell
    }

    #[inline]
    pub fn epsilon(&self) -> u64 {
        self.epsilon
    }

    #[inline]
    pub fn g(&self) -> u64 {
        self.g
    }

    /// `(ell - 1) / 2`.
    #[inline]
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn residue(&self, value: u64) -> Residue {
        Residue::new(value, self.ell)
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.ell as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.ell
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.ell - b % self.ell) % self.ell
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.ell - a % self.ell) % self.ell
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.ell
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.ell)
    }

    /// Multiplicative inverse; panics on zero, which is always a caller bug.
    pub fn inv(&self, a: u64) -> u64 {
        let a = a % self.ell;
        assert!(a != 0, "inverse of zero modulo {}", self.ell);
        pow_mod(a, self.ell - 2, self.ell)
    }

    #[inline]
    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    /// `g^e` for a possibly negative exponent.
    pub fn g_pow(&self, e: i64) -> u64 {
        self.pow(self.g, e.rem_euclid(self.ell as i64 - 1) as u64)
    }

    /// Discrete logarithm to base `g` by table lookup; `None` for zero.
    pub fn log_table(&self) -> Vec<Option<u64>> {
        let mut table = vec![None; self.ell as usize];
        let mut x = 1;
        for e in 0..self.ell - 1 {
            table[x as usize] = Some(e);
            x = self.mul(x, self.g);
        }
        table
    }

    pub fn is_square(&self, a: u64) -> bool {
        legendre(a, self) == 1
    }

    pub fn is_nonsquare(&self, a: u64) -> bool {
        legendre(a, self) == -1
    }
}

/// Legendre symbol `(a / ell)` by Euler's criterion.
pub fn legendre(a: u64, ctx: &PrimeContext) -> i8 {
    euler_criterion(a, ctx.ell)
}

/// All square roots of `a` modulo `ell`, ascending.
pub fn sqrt_mod(a: u64, ctx: &PrimeContext) -> Vec<u64> {
    sqrt_mod_with_threshold(a, ctx, SQRT_EXHAUSTIVE_LIMIT)
}

/// [`sqrt_mod`] with an explicit cut-over between exhaustive search and
/// Tonelli-Shanks.
pub fn sqrt_mod_with_threshold(a: u64, ctx: &PrimeContext, threshold: u64) -> Vec<u64> {
    let ell = ctx.ell;
    let a = a % ell;
    if a == 0 {
        return vec![0];
    }
    if euler_criterion(a, ell) != 1 {
        return Vec::new();
    }
    let x = if ell <= threshold {
        (1..ell).find(|&x| mul_mod(x, x, ell) == a).expect("a is a square")
    } else {
        tonelli_shanks(a, ell, ctx.epsilon)
    };
    let mut roots = vec![x, ell - x];
    roots.sort_unstable();
    roots
}

fn tonelli_shanks(a: u64, p: u64, nonresidue: u64) -> u64 {
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut m = s;
    let mut c = pow_mod(nonresidue, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Number of solutions of `x^2 = a` in F_ell, i.e. `1 + (a / ell)`.
#[inline]
pub fn count_square_roots(a: u64, ctx: &PrimeContext) -> u64 {
    (1 + legendre(a, ctx)) as u64
}

/// `C(n, k) mod ell`, restricted to `n < ell` where no factor of the
/// factorials vanishes.
pub fn binom_mod(n: u64, k: u64, ctx: &PrimeContext) -> Result<u64> {
    if n >= ctx.ell {
        return Err(Error::BinomialOutOfRange { n, k, ell: ctx.ell });
    }
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut num = 1;
    let mut den = 1;
    for i in 0..k {
        num = ctx.mul(num, n - i);
        den = ctx.mul(den, i + 1);
    }
    Ok(ctx.div(num, den))
}

/// An element of F_ell carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus > 0);
        Self { value: value % modulus, modulus }
    }

    pub fn from_signed(value: i64, modulus: u64) -> Self {
        Self { value: value.rem_euclid(modulus as i64) as u64, modulus }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, e: u64) -> Self {
        Self { value: pow_mod(self.value, e, self.modulus), modulus: self.modulus }
    }

    /// Inverse modulo a prime modulus; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        (self.value != 0).then(|| self.pow(self.modulus - 2))
    }

    fn check(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli");
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        Self { value: (self.value + rhs.value) % self.modulus, modulus: self.modulus }
    }
}

impl Sub for Residue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: (self.value + self.modulus - rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        Self { value: mul_mod(self.value, rhs.value, self.modulus), modulus: self.modulus }
    }
}

impl Neg for Residue {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}
