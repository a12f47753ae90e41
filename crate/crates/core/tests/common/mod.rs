#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

/// Rank by Gauss-Jordan elimination over `Q`.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(p) = (rank..n_rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(p, rank);
        let pivot_row = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = &row[col] / &pivot_row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant over `Q` by elimination; returns the integer value.
pub fn rational_det(rows: &[Vec<i64>]) -> num_bigint::BigInt {
    let n = rows.len();
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
    let mut det = BigRational::from_integer(1.into());
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else { return 0.into() };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest {
            let f = &row[col] / &pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &f * p;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}

/// Random matrix up to `max_dim` on each side, entries in `[-9, 9]`; about a
/// third repeat or negate earlier rows so low ranks are exercised.
pub fn random_matrix<R: Rng>(rng: &mut R, max_dim: usize) -> Vec<Vec<i64>> {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let mut m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
    if rng.gen_bool(0.35) && rows > 1 {
        let basis = rng.gen_range(1..rows);
        for i in basis..rows {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let src = rng.gen_range(0..basis);
            m[i] = m[src].iter().map(|&v| sign * v).collect();
        }
    }
    m
}
