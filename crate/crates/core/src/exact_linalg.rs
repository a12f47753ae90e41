//! Exact rank and determinants of integer matrices.
//!
//! Ranks are certified by elimination modulo primes: full rank modulo any
//! prime is full rank over `Q`. When no prime reaches full rank the result
//! either comes from fraction-free (Bareiss) elimination over big integers
//! or is reported as non-conclusive.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correspondence::OperatorMatrix;
use crate::error::{Error, Result};
use crate::modular_arith::{is_prime, Residue};

/// Largest dimension `det_exact_small` accepts.
pub const DET_EXACT_BOUND: usize = 64;

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    fn reduced(&self, p: u64) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&v| v.rem_euclid(p as i64) as u64).collect()).collect()
    }

    fn big(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&v| BigInt::from(v)).collect()).collect()
    }
}

impl From<&OperatorMatrix> for IntMatrix {
    fn from(m: &OperatorMatrix) -> Self {
        let mut out = Self::zeros(m.n_rows(), m.n_cols());
        for j in 0..m.n_cols() {
            for &(i, v) in m.column(j) {
                out.set(i, j, v);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    /// Some prime attained `min(rows, cols)`.
    SinglePrime,
    /// Largest rank seen over several primes; a lower bound only.
    MultiPrimeStabilized,
    /// Bareiss elimination over `Z`.
    FractionFree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// `(p, rank mod p)` in the order tried.
    pub witnesses: Vec<(u64, usize)>,
    pub method: RankMethod,
    pub conclusive: bool,
}

impl RankCertificate {
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.rows.min(self.cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankPolicy {
    /// Tried before any random prime; normally `l`.
    pub first_prime: Option<u64>,
    /// Consecutive random primes that must agree before giving up on
    /// full rank.
    pub stabilize_count: usize,
    /// Bareiss is used only when `max(rows, cols)` is at most this.
    pub bareiss_max_dim: usize,
    pub seed: u64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self { first_prime: None, stabilize_count: 3, bareiss_max_dim: 200, seed: 0 }
    }
}

impl RankPolicy {
    pub fn with_first_prime(p: u64) -> Self {
        Self { first_prime: Some(p), ..Self::default() }
    }
}

/// Inverse of `a` modulo the prime `p`, `a != 0`.
fn inv_mod(a: u64, p: u64) -> u64 {
    crate::modular_arith::pow_mod(a, p - 2, p)
}

/// Row echelon reduction in place; returns the rank and the determinant
/// sign/scale product of the pivots (meaningful only for square input).
fn eliminate_mod(a: &mut [Vec<u64>], p: u64) -> (usize, u64) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut det = 1u64;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][col] != 0) else {
            det = 0;
            continue;
        };
        if piv != rank {
            a.swap(piv, rank);
            det = (p - det) % p;
        }
        let pv = a[rank][col];
        det = det * pv % p;
        let pinv = inv_mod(pv, p);
        for v in &mut a[rank][col..] {
            *v = *v * pinv % p;
        }
        let (head, tail) = a.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in row[col..].iter_mut().zip(&prow[col..]) {
                *x = (*x + nf * y) % p;
            }
        }
        rank += 1;
        if rank == rows {
            if col + 1 < cols {
                det = 0;
            }
            break;
        }
    }
    (rank, det)
}

/// Rank over `F_p`; `p` must be a prime below `2^32`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    assert!(p < 1 << 32, "prime too large for word elimination");
    eliminate_mod(&mut m.reduced(p), p).0
}

pub fn det_mod_p(m: &IntMatrix, p: u64) -> Result<Residue> {
    if m.rows != m.cols {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if m.rows == 0 {
        return Ok(Residue::new(1 % p, p));
    }
    let (rank, det) = eliminate_mod(&mut m.reduced(p), p);
    Ok(Residue::new(if rank == m.rows { det } else { 0 }, p))
}

/// Fraction-free elimination; returns the rank and, for square input, the
/// determinant.
fn bareiss(m: &IntMatrix) -> (usize, BigInt) {
    let mut a = m.big();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut negate = false;
    let mut singular = false;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            singular = true;
            continue;
        };
        if piv != rank {
            a.swap(piv, rank);
            negate = !negate;
        }
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let det = if rows != cols || singular || rank < rows {
        BigInt::zero()
    } else if negate {
        -prev
    } else {
        prev
    };
    (rank, det)
}

pub fn rank_bareiss(m: &IntMatrix) -> usize {
    bareiss(m).0
}

/// Exact determinant by Bareiss elimination, for dimension at most
/// [`DET_EXACT_BOUND`].
pub fn det_exact_small(m: &IntMatrix) -> Result<BigInt> {
    if m.rows != m.cols {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if m.rows > DET_EXACT_BOUND {
        return Err(Error::DimensionTooLarge { dim: m.rows, bound: DET_EXACT_BOUND });
    }
    if m.rows == 0 {
        return Ok(BigInt::one());
    }
    Ok(bareiss(m).1)
}

/// `det mod p` of a big integer, as a residue.
pub fn big_mod(v: &BigInt, p: u64) -> u64 {
    let r = v % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.try_into().expect("residue fits")
}

fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Rank over `Q` with a certificate.
pub fn rank_exact(m: &IntMatrix, policy: &RankPolicy) -> RankCertificate {
    let full = m.rows.min(m.cols);
    let mut cert = RankCertificate {
        rows: m.rows,
        cols: m.cols,
        rank: 0,
        witnesses: Vec::new(),
        method: RankMethod::SinglePrime,
        conclusive: false,
    };
    if full == 0 {
        cert.conclusive = true;
        return cert;
    }
    let try_prime = |p: u64, cert: &mut RankCertificate| {
        let r = rank_mod_p(m, p);
        cert.witnesses.push((p, r));
        cert.rank = cert.rank.max(r);
        r == full
    };
    if let Some(p) = policy.first_prime {
        if try_prime(p, &mut cert) {
            cert.conclusive = true;
            return cert;
        }
        log::debug!("rank mod {p} is {} < {full}, escalating", cert.rank);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut streak = 0;
    while streak < policy.stabilize_count.max(1) {
        let before = cert.rank;
        if try_prime(random_prime(&mut rng), &mut cert) {
            cert.conclusive = true;
            return cert;
        }
        streak = if cert.rank == before { streak + 1 } else { 1 };
    }
    if m.rows.max(m.cols) <= policy.bareiss_max_dim {
        cert.rank = rank_bareiss(m);
        cert.method = RankMethod::FractionFree;
        cert.conclusive = true;
    } else {
        cert.method = RankMethod::MultiPrimeStabilized;
        log::warn!("rank {} of {}x{} is only a stabilized lower bound", cert.rank, m.rows, m.cols);
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{build_psi, build_psi_plus, restrict_to_affine, CoefficientScheme, Side};
    use crate::modular_arith::PrimeContext;

    #[test]
    fn trivial_ranks() {
        assert_eq!(rank_mod_p(&IntMatrix::zeros(4, 3), 7), 0);
        for p in [2u64, 3, 101] {
            assert_eq!(rank_mod_p(&IntMatrix::identity(6), p), 6);
        }
        let ones = IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        let cert = rank_exact(&ones, &RankPolicy::default());
        assert_eq!(cert.rank, 1);
        assert!(cert.conclusive);
        assert_eq!(cert.method, RankMethod::FractionFree);
    }

    #[test]
    fn determinants() {
        assert_eq!(det_mod_p(&IntMatrix::identity(5), 7).unwrap().value(), 1);
        let d = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(det_mod_p(&d, 5).unwrap().value(), 1);
        assert_eq!(det_exact_small(&d).unwrap(), BigInt::from(6));
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(det_exact_small(&swap).unwrap(), BigInt::from(-1));
        assert_eq!(det_mod_p(&swap, 7).unwrap().value(), 6);
        assert!(matches!(det_exact_small(&IntMatrix::identity(65)), Err(Error::DimensionTooLarge { .. })));
        assert!(matches!(det_mod_p(&IntMatrix::zeros(2, 3), 5), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn ell_first_route_small() {
        let c3 = PrimeContext::new(3).unwrap();
        let r3 = IntMatrix::from(&restrict_to_affine(&build_psi_plus(&c3), Side::N).unwrap());
        assert_eq!(rank_mod_p(&r3, 3), 3);
        let exact = det_exact_small(&r3).unwrap();
        assert!(!exact.is_zero());
        assert_eq!(big_mod(&exact, 3), det_mod_p(&r3, 3).unwrap().value());

        let c5 = PrimeContext::new(5).unwrap();
        let r5 = IntMatrix::from(&restrict_to_affine(&build_psi_plus(&c5), Side::N).unwrap());
        let cert = rank_exact(&r5, &RankPolicy::with_first_prime(5));
        assert_eq!((cert.rank, cert.conclusive), (10, true));
        assert_eq!(cert.witnesses, vec![(5, 10)]);

        let psi = IntMatrix::from(&build_psi(&c3, &CoefficientScheme::canonical(&c3)).unwrap());
        let cert = rank_exact(&psi, &RankPolicy::with_first_prime(3));
        assert_eq!((cert.rank, cert.conclusive), (6, true));
    }

    #[test]
    fn escalation_without_bareiss_is_flagged() {
        let ones = IntMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        let policy = RankPolicy { bareiss_max_dim: 1, ..RankPolicy::default() };
        let cert = rank_exact(&ones, &policy);
        assert_eq!(cert.rank, 1);
        assert!(!cert.conclusive);
        assert_eq!(cert.method, RankMethod::MultiPrimeStabilized);
        assert_eq!(cert.witnesses.len(), 3);
    }

    #[test]
    fn rank_drops_mod_small_prime() {
        // det = 6: singular mod 2 and 3, invertible over Q
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_mod_p(&m, 2), 1);
        let cert = rank_exact(&m, &RankPolicy::with_first_prime(3));
        assert_eq!((cert.rank, cert.conclusive, cert.method), (2, true, RankMethod::SinglePrime));
        assert_eq!(cert.witnesses[0], (3, 1));
    }
}
