//! Determinant certificates for the restricted operators.
//!
//! In chart coordinates the restricted `psi_plus` (and `psi`) is a block
//! matrix whose blocks are polynomials in the `l x l` cyclic shift `D`.
//! Sending `D -> 1` collapses every block to a count of square roots and
//! leaves a circulant matrix over `F_l`, whose determinant is the product of
//! its eigenvalues `sum_j a_j w^(kj)` with `w` a power of the primitive root.
//!
//! Over `F_l`, `D` is unipotent, so the determinant of the block matrix is
//! `P(1)^l = P(1)` where `P(D)` is its block determinant. The collapsed
//! determinant therefore agrees with the determinant of the geometric
//! matrix modulo `l`, up to the sign of the chart relabelling.

use serde::Serialize;

use crate::correspondence::{build_psi, build_psi_plus, restrict_to_affine, CoefficientScheme, Side};
use crate::error::{Error, Result};
use crate::exact_linalg::{det_mod_p, IntMatrix};
use crate::geometry::charts::{cartan_to_diff, orbit_to_nonsplit_tm, pair_to_diff, pair_to_tm};
use crate::geometry::{Basis, BasisElement, BasisKind};
use crate::modular_arith::{binom_mod, count_square_roots, sqrt_mod, PrimeContext, Residue};

/// Which power of the primitive root plays the role of `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentBase {
    /// `w = g`, order `l - 1`.
    G,
    /// `w = g^2`, order `(l - 1) / 2`.
    GSquared,
    /// A given element, which must have order equal to the row length.
    Explicit(u64),
}

/// A square matrix made of `l x l` blocks, in chart coordinates.
///
/// Row `(T, j)` sits at `j * l + T` and column `(t, i)` at `i * l + t`,
/// where `i`, `j` index the second chart coordinate by discrete logarithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrix {
    side: Side,
    ell: u64,
    blocks: usize,
    entries: Vec<Vec<i64>>,
}

impl BlockMatrix {
    pub fn side(&self) -> Side {
        self.side
    }

    /// Number of blocks along each side.
    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row][col]
    }

    /// The `l x l` block in row block `j`, column block `i`, indexed `[T][t]`.
    pub fn block(&self, j: usize, i: usize) -> Vec<Vec<i64>> {
        let l = self.ell as usize;
        (0..l).map(|tt| self.entries[j * l + tt][i * l..(i + 1) * l].to_vec()).collect()
    }

    /// `c` with `block(j, i) = sum_x c[x] D^x`, i.e. `[T][t] = c[T - t]`;
    /// `None` if the block is not circulant.
    pub fn shift_coefficients(&self, j: usize, i: usize) -> Option<Vec<i64>> {
        let l = self.ell as usize;
        let b = self.block(j, i);
        let c: Vec<i64> = (0..l).map(|x| b[x][0]).collect();
        let ok = (0..l).all(|tt| (0..l).all(|t| b[tt][t] == c[(tt + l - t) % l]));
        ok.then_some(c)
    }

    pub fn is_block_circulant(&self) -> bool {
        (0..self.blocks).all(|j| (0..self.blocks).all(|i| self.shift_coefficients(j, i).is_some()))
    }

    /// `D -> 1`: entry `[j][i]` is the sum of the shift coefficients of
    /// block `(j, i)`.
    pub fn collapse(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.blocks)
            .map(|j| {
                (0..self.blocks)
                    .map(|i| {
                        self.shift_coefficients(j, i)
                            .map(|c| c.iter().sum())
                            .ok_or_else(|| Error::Certificate(format!("block ({j}, {i}) is not circulant")))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.entries)
    }
}

/// Labels of the blocks: `m = g^(2i)` on the column side and `M = eps g^(2j)`
/// on the row side.
fn half_log(v: u64, log: &[Option<u64>]) -> usize {
    let e = log[v as usize].expect("nonzero");
    debug_assert!(e.is_multiple_of(2));
    (e / 2) as usize
}

/// Chart matrix of the restricted `psi_plus`: entry `((T, M), (t, m))` is 1
/// iff `(T - t)^2 = m + M`.
pub fn build_block_matrix_n(ctx: &PrimeContext) -> BlockMatrix {
    let l = ctx.ell() as usize;
    let r = ctx.r() as usize;
    let mut entries = vec![vec![0i64; l * r]; l * r];
    for j in 0..r {
        let big_m = ctx.mul(ctx.epsilon(), ctx.g_pow(2 * j as i64));
        for i in 0..r {
            let m = ctx.g_pow(2 * i as i64);
            let roots = sqrt_mod(ctx.add(m, big_m), ctx);
            for tt in 0..l {
                for t in 0..l {
                    let d = ctx.sub(tt as u64, t as u64);
                    if roots.contains(&d) {
                        entries[j * l + tt][i * l + t] = 1;
                    }
                }
            }
        }
    }
    BlockMatrix { side: Side::N, ell: ctx.ell(), blocks: r, entries }
}

/// Chart matrix of the restricted `psi`: entry `((T, T'), (t, t'))` is
/// `sum_s (alpha_s + beta_s) [(T - t)^2 = t'^2 + eps T'^2 + 2 s T' t']`,
/// with `t' = g^i`, `T' = g^j`.
pub fn build_block_matrix_c(ctx: &PrimeContext, scheme: &CoefficientScheme) -> BlockMatrix {
    let l = ctx.ell() as usize;
    let n = l - 1;
    let mut entries = vec![vec![0i64; l * n]; l * n];
    for j in 0..n {
        let tp_big = ctx.g_pow(j as i64);
        for i in 0..n {
            let tp = ctx.g_pow(i as i64);
            let base = ctx.add(ctx.mul(tp, tp), ctx.mul(ctx.epsilon(), ctx.mul(tp_big, tp_big)));
            let cross = ctx.mul(2, ctx.mul(tp_big, tp));
            for s in 1..ctx.ell() {
                let w = scheme.weight(s) as i64;
                let roots = sqrt_mod(ctx.add(base, ctx.mul(s, cross)), ctx);
                for tt in 0..l {
                    for &x in &roots {
                        let t = ctx.sub(tt as u64, x) as usize;
                        entries[j * l + tt][i * l + t] += w;
                    }
                }
            }
        }
    }
    BlockMatrix { side: Side::C, ell: ctx.ell(), blocks: n, entries }
}

/// Whether the geometric restricted `psi_plus`, relabelled through the
/// `(t, m)` and `(T, M)` charts, is exactly [`build_block_matrix_n`].
pub fn verify_chart_conjugacy_n(ctx: &PrimeContext) -> Result<bool> {
    let geo = restrict_to_affine(&build_psi_plus(ctx), Side::N)?;
    let log = ctx.log_table();
    let l = ctx.ell() as usize;
    let eps_inv = ctx.inv(ctx.epsilon());
    let rows = Basis::new(BasisKind::HalfPlane, ctx);
    let cols = Basis::new(BasisKind::AffineUnorderedPairs, ctx);
    let row_pos: Vec<usize> = rows
        .elements()
        .iter()
        .map(|e| {
            let BasisElement::Orbit(w) = e else { unreachable!() };
            let c = orbit_to_nonsplit_tm(w, ctx);
            half_log(ctx.mul(c.m, eps_inv), &log) * l + c.t as usize
        })
        .collect();
    let col_pos: Vec<usize> = cols
        .elements()
        .iter()
        .map(|e| {
            let BasisElement::Unordered(p) = e else { unreachable!() };
            let c = pair_to_tm(p, ctx).expect("affine pair");
            half_log(c.m, &log) * l + c.t as usize
        })
        .collect();
    let block = build_block_matrix_n(ctx);
    Ok(relabel_matches(&geo.to_dense(), &row_pos, &col_pos, &block))
}

/// Same check for the restricted `psi` and the `(t, t')`, `(T, T')` charts.
pub fn verify_chart_conjugacy_c(ctx: &PrimeContext, scheme: &CoefficientScheme) -> Result<bool> {
    let geo = restrict_to_affine(&build_psi(ctx, scheme)?, Side::C)?;
    let log = ctx.log_table();
    let l = ctx.ell() as usize;
    let idx = |t: u64, tp: u64| log[tp as usize].expect("nonzero") as usize * l + t as usize;
    let rows = Basis::new(BasisKind::Punctured, ctx);
    let cols = Basis::new(BasisKind::AffineOrderedPairs, ctx);
    let row_pos: Vec<usize> = rows
        .elements()
        .iter()
        .map(|e| {
            let BasisElement::Point(z) = e else { unreachable!() };
            let c = cartan_to_diff(z, ctx);
            idx(c.t, c.t_prime)
        })
        .collect();
    let col_pos: Vec<usize> = cols
        .elements()
        .iter()
        .map(|e| {
            let BasisElement::Ordered(p) = e else { unreachable!() };
            let c = pair_to_diff(p, ctx).expect("affine pair");
            idx(c.t, c.t_prime)
        })
        .collect();
    let block = build_block_matrix_c(ctx, scheme);
    Ok(relabel_matches(&geo.to_dense(), &row_pos, &col_pos, &block))
}

fn is_permutation(pos: &[usize]) -> bool {
    let mut seen = vec![false; pos.len()];
    pos.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
}

fn relabel_matches(geo: &[Vec<i64>], row_pos: &[usize], col_pos: &[usize], block: &BlockMatrix) -> bool {
    if !is_permutation(row_pos) || !is_permutation(col_pos) || geo.len() != block.dim() {
        return false;
    }
    geo.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &v)| block.entry(row_pos[i], col_pos[j]) == v))
}

fn is_circulant(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    (0..n).all(|i| (0..n).all(|j| m[i][j] == m[(i + n - 1) % n][(j + n - 1) % n]))
}

/// `D[i][j] = #{x : x^2 = g^(2i) + eps g^(2j)}`, `0 <= i, j < r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedCountMatrixN {
    pub entries: Vec<Vec<u64>>,
}

impl ReducedCountMatrixN {
    pub fn from_formula(ctx: &PrimeContext) -> Self {
        let r = ctx.r() as usize;
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let v = ctx.add(ctx.g_pow(2 * i as i64), ctx.mul(ctx.epsilon(), ctx.g_pow(2 * j as i64)));
                        count_square_roots(v, ctx)
                    })
                    .collect()
            })
            .collect();
        Self { entries }
    }

    pub fn first_row(&self) -> &[u64] {
        &self.entries[0]
    }

    pub fn is_circulant(&self) -> bool {
        is_circulant(&self.entries)
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&to_i64(&self.entries))
    }
}

fn to_i64(m: &[Vec<u64>]) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect()
}

/// Collapses [`build_block_matrix_n`] with `D -> 1`. Column block `i`
/// carries `m = g^(2i)` and row block `j` carries `M = eps g^(2j)`, so the
/// reduced entry `[i][j]` is the collapsed block `(j, i)`.
pub fn reduce_mod_frak_l(bm: &BlockMatrix, ctx: &PrimeContext) -> Result<ReducedCountMatrixN> {
    if bm.side != Side::N {
        return Err(Error::BasisMismatch("expected the N-side block matrix".into()));
    }
    let c = bm.collapse()?;
    let r = bm.blocks;
    let entries = (0..r).map(|i| (0..r).map(|j| c[j][i].rem_euclid(ctx.ell() as i64) as u64).collect()).collect();
    Ok(ReducedCountMatrixN { entries })
}

/// `X_{i,j}(s) = #{v : v^2 = g^(2i) + 4 eps g^(2j) - 4 s g^(i+j)}` and the
/// weighted sum `sum_s (alpha_s + beta_s) X(s)` modulo `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedCountMatrixC {
    /// `per_slope[s - 1]`.
    pub per_slope: Vec<Vec<Vec<u64>>>,
    pub combined: Vec<Vec<u64>>,
}

impl ReducedCountMatrixC {
    pub fn from_formula(ctx: &PrimeContext, scheme: &CoefficientScheme) -> Self {
        let n = (ctx.ell() - 1) as usize;
        let e4 = ctx.mul(4, ctx.epsilon());
        let per_slope: Vec<Vec<Vec<u64>>> = (1..ctx.ell())
            .map(|s| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let (i, j) = (i as i64, j as i64);
                                let v = ctx.sub(
                                    ctx.add(ctx.g_pow(2 * i), ctx.mul(e4, ctx.g_pow(2 * j))),
                                    ctx.mul(ctx.mul(4, s), ctx.g_pow(i + j)),
                                );
                                count_square_roots(v, ctx)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let combined = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (1..ctx.ell()).fold(0, |acc, s| {
                            ctx.add(acc, ctx.mul(scheme.weight(s) % ctx.ell(), per_slope[(s - 1) as usize][i][j]))
                        })
                    })
                    .collect()
            })
            .collect();
        Self { per_slope, combined }
    }

    /// `a_j(s) = X_{0,j}(s)`.
    pub fn row(&self, s: u64) -> &[u64] {
        &self.per_slope[(s - 1) as usize][0]
    }

    /// `b_j = sum_s (alpha_s + beta_s) a_j(s) mod l`.
    pub fn first_row(&self) -> &[u64] {
        &self.combined[0]
    }

    pub fn is_circulant(&self) -> bool {
        is_circulant(&self.combined) && self.per_slope.iter().all(|m| is_circulant(m))
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&to_i64(&self.combined))
    }
}

/// Collapses [`build_block_matrix_c`]: entry `[i][j]` counts with
/// `t' = g^i`, `T' = g^j`, reduced modulo `l`.
pub fn reduce_block_matrix_c(bm: &BlockMatrix, ctx: &PrimeContext) -> Result<Vec<Vec<u64>>> {
    if bm.side != Side::C {
        return Err(Error::BasisMismatch("expected the C-side block matrix".into()));
    }
    let c = bm.collapse()?;
    let n = bm.blocks;
    Ok((0..n).map(|i| (0..n).map(|j| c[j][i].rem_euclid(ctx.ell() as i64) as u64).collect()).collect())
}

/// The chart labels `T' = g^j` and the formula's labels differ by
/// `T' = -2 g^j`: `X[i][j] = chart[i][j + c]` with `g^c = -2`.
pub fn chart_label_offset(ctx: &PrimeContext) -> usize {
    ctx.log_table()[ctx.neg(2) as usize].expect("-2 is a unit") as usize
}

pub fn matches_chart_collapse(rm: &ReducedCountMatrixC, chart: &[Vec<u64>], ctx: &PrimeContext) -> bool {
    let n = rm.combined.len();
    let c = chart_label_offset(ctx);
    chart.len() == n && (0..n).all(|i| (0..n).all(|j| rm.combined[i][j] == chart[i][(j + c) % n]))
}

/// Closed forms and direct sums for the C-case, split by coefficient family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EigenParts {
    pub alpha: u64,
    pub beta: u64,
    pub alpha_closed: u64,
    pub beta_closed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenvalueReport {
    pub k: usize,
    pub k_prime: usize,
    /// The eigenvalue sum evaluated directly modulo `l`.
    pub residue: u64,
    pub closed_form: u64,
    pub matches: bool,
    pub nonzero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<EigenParts>,
    /// `sum_j a_j w^(kj)` from the first row of the reduced matrix.
    pub matrix_eigenvalue: u64,
    /// `matrix_eigenvalue = eigenvalue_scale * residue` is expected.
    pub eigenvalue_scale: u64,
    pub matrix_consistent: bool,
}

impl EigenvalueReport {
    pub fn passed(&self) -> bool {
        self.matches && self.nonzero && self.matrix_consistent
    }
}

fn dft_entry(row: &[u64], w: u64, k: usize, ctx: &PrimeContext) -> u64 {
    let wk = ctx.pow(w, k as u64);
    let mut acc = 0;
    let mut p = 1;
    for &a in row {
        acc = ctx.add(acc, ctx.mul(a % ctx.ell(), p));
        p = ctx.mul(p, wk);
    }
    acc
}

/// N-case reports for `k = 0..r-1`, without failing on a mismatch.
///
/// `residue = sum_{lambda != 0} (lambda^-1 - eps lambda)^(2k')` with
/// `k' = -k mod r`; `closed_form = C(2k', k') (-1)^(k'+1) eps^k'`.
pub fn eigenvalue_reports_n(rm: &ReducedCountMatrixN, ctx: &PrimeContext) -> Vec<EigenvalueReport> {
    let r = ctx.r() as usize;
    let w = ctx.pow(ctx.g(), 2);
    let half = ctx.inv(2);
    (0..r)
        .map(|k| {
            let kp = (r - k) % r;
            let residue = (1..ctx.ell()).fold(0, |acc, lambda| {
                let b = ctx.sub(ctx.inv(lambda), ctx.mul(ctx.epsilon(), lambda));
                ctx.add(acc, ctx.pow(b, 2 * kp as u64))
            });
            let sign = if kp % 2 == 1 { 1 } else { ctx.ell() - 1 };
            let closed_form = ctx.mul(
                binom_mod(2 * kp as u64, kp as u64, ctx).expect("2k' < l"),
                ctx.mul(sign, ctx.pow(ctx.epsilon(), kp as u64)),
            );
            let matrix_eigenvalue = dft_entry(rm.first_row(), w, k, ctx);
            let scale = ctx.mul(ctx.pow(4, k as u64), half);
            EigenvalueReport {
                k,
                k_prime: kp,
                residue,
                closed_form,
                matches: residue == closed_form,
                nonzero: residue != 0,
                parts: None,
                matrix_eigenvalue,
                eigenvalue_scale: scale,
                matrix_consistent: matrix_eigenvalue == ctx.mul(scale, residue),
            }
        })
        .collect()
}

fn first_failure(reports: &[EigenvalueReport], case: &str, ctx: &PrimeContext) -> Result<()> {
    match reports.iter().find(|r| !r.passed()) {
        None => Ok(()),
        Some(r) => Err(Error::Certificate(format!(
            "{case}-case eigenvalue failed at l = {}, eps = {}, g = {}: {r:?}",
            ctx.ell(),
            ctx.epsilon(),
            ctx.g()
        ))),
    }
}

/// N-case reports; any mismatch or vanishing eigenvalue is an error.
pub fn eigenvalues_n(rm: &ReducedCountMatrixN, ctx: &PrimeContext) -> Result<Vec<EigenvalueReport>> {
    let reports = eigenvalue_reports_n(rm, ctx);
    first_failure(&reports, "N", ctx)?;
    Ok(reports)
}

/// `(alpha_closed, beta_closed)` for the C-case at `k`, with
/// `k' = -k mod (l - 1)`:
///
/// * `k = 0`: `(1, 0)`;
/// * `k'` even: `((-eps)^(k'/2) C(k', k'/2), 0)`;
/// * `k'` odd, `i = (k' - 1)/2`: `(0, 2 (-eps)^i k'! / (i! i!))`.
pub fn closed_form_c(k: usize, ctx: &PrimeContext) -> (u64, u64) {
    let n = (ctx.ell() - 1) as usize;
    let kp = (n - k % n) % n;
    if k.is_multiple_of(n) {
        return (1, 0);
    }
    let neg_eps = ctx.neg(ctx.epsilon());
    if kp.is_multiple_of(2) {
        let h = (kp / 2) as u64;
        (ctx.mul(ctx.pow(neg_eps, h), binom_mod(kp as u64, h, ctx).expect("k' < l")), 0)
    } else {
        let i = ((kp - 1) / 2) as u64;
        // k'! / (i! i!) = (i + 1) C(k', i)
        let c = ctx.mul(i + 1, binom_mod(kp as u64, i, ctx).expect("k' < l"));
        (0, ctx.mul(2, ctx.mul(ctx.pow(neg_eps, i), c)))
    }
}

/// C-case reports for `k = 0..l-2`, without failing on a mismatch.
///
/// The direct sums are `sum_s c_s sum_lambda (lambda / ((lambda s + 1)^2 -
/// eps lambda^2))^k` with `c_s = alpha_s` or `beta_s`.
pub fn eigenvalue_reports_c(ctx: &PrimeContext, scheme: &CoefficientScheme) -> Result<Vec<EigenvalueReport>> {
    if !scheme.satisfies_congruences(ctx) {
        return Err(Error::InvalidScheme("eigenvalue closed forms need alpha_s = 1, beta_s = 1/s".into()));
    }
    let n = (ctx.ell() - 1) as usize;
    let rm = ReducedCountMatrixC::from_formula(ctx, scheme);
    // u(s, lambda) = lambda / ((lambda s + 1)^2 - eps lambda^2)
    let u: Vec<Vec<u64>> = (1..ctx.ell())
        .map(|s| {
            (1..ctx.ell())
                .map(|lambda| {
                    let q = ctx.add(ctx.mul(lambda, s), 1);
                    let den = ctx.sub(ctx.mul(q, q), ctx.mul(ctx.epsilon(), ctx.mul(lambda, lambda)));
                    ctx.div(lambda, den)
                })
                .collect()
        })
        .collect();
    Ok((0..n)
        .map(|k| {
            let kp = (n - k) % n;
            let (mut alpha, mut beta) = (0, 0);
            for s in 1..ctx.ell() {
                let inner = u[(s - 1) as usize].iter().fold(0, |acc, &v| ctx.add(acc, ctx.pow(v, k as u64)));
                alpha = ctx.add(alpha, ctx.mul(scheme.alpha(s) % ctx.ell(), inner));
                beta = ctx.add(beta, ctx.mul(scheme.beta(s), inner));
            }
            let (alpha_closed, beta_closed) = closed_form_c(k, ctx);
            let residue = ctx.add(alpha, beta);
            let closed_form = ctx.add(alpha_closed, beta_closed);
            let matrix_eigenvalue = dft_entry(rm.first_row(), ctx.g(), k, ctx);
            EigenvalueReport {
                k,
                k_prime: kp,
                residue,
                closed_form,
                matches: alpha == alpha_closed && beta == beta_closed,
                nonzero: residue != 0,
                parts: Some(EigenParts { alpha, beta, alpha_closed, beta_closed }),
                matrix_eigenvalue,
                eigenvalue_scale: 1,
                matrix_consistent: matrix_eigenvalue == residue,
            }
        })
        .collect())
}

/// C-case reports; any mismatch or vanishing eigenvalue is an error.
pub fn eigenvalues_c(ctx: &PrimeContext, scheme: &CoefficientScheme) -> Result<Vec<EigenvalueReport>> {
    let reports = eigenvalue_reports_c(ctx, scheme)?;
    first_failure(&reports, "C", ctx)?;
    Ok(reports)
}

/// `true` iff the multiplicative order of `w` modulo `l` is exactly `n`.
fn has_order(w: u64, n: usize, ctx: &PrimeContext) -> bool {
    let n = n as u64;
    if w.is_multiple_of(ctx.ell()) || ctx.pow(w, n) != 1 {
        return false;
    }
    (1..n).filter(|d| n.is_multiple_of(*d)).all(|d| ctx.pow(w, d) != 1)
}

/// `prod_k sum_j a_j w^(kj)` modulo `l`.
pub fn circulant_det_mod(row: &[u64], base: ExponentBase, ctx: &PrimeContext) -> Result<Residue> {
    let n = row.len();
    if n == 0 || !(ctx.ell() - 1).is_multiple_of(n as u64) {
        return Err(Error::BadRootOfUnity { root: 0, order: n, ell: ctx.ell() });
    }
    let w = match base {
        ExponentBase::G => ctx.g(),
        ExponentBase::GSquared => ctx.pow(ctx.g(), 2),
        ExponentBase::Explicit(w) => w % ctx.ell(),
    };
    if !has_order(w, n, ctx) {
        return Err(Error::BadRootOfUnity { root: w, order: n, ell: ctx.ell() });
    }
    let det = (0..n).fold(1, |acc, k| ctx.mul(acc, dft_entry(row, w, k, ctx)));
    Ok(ctx.residue(det))
}

/// The circulant matrix `[i][j] = row[(j - i) mod n]`.
pub fn circulant_from_row(row: &[u64]) -> Vec<Vec<u64>> {
    let n = row.len();
    (0..n).map(|i| (0..n).map(|j| row[(j + n - i) % n]).collect()).collect()
}

/// Determinants modulo `l` of one reduced matrix and of the restricted
/// geometric matrix it certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetCrossCheck {
    pub product_formula: u64,
    pub direct: u64,
    pub geometric: u64,
    /// `product_formula == direct`.
    pub product_matches_direct: bool,
    /// `geometric == +-direct`.
    pub geometric_matches: bool,
}

impl DetCrossCheck {
    pub fn passed(&self) -> bool {
        self.product_matches_direct && self.geometric_matches && self.direct != 0
    }
}

fn cross_check(reduced: &IntMatrix, row: &[u64], base: ExponentBase, geometric: &IntMatrix, ctx: &PrimeContext) -> Result<DetCrossCheck> {
    let l = ctx.ell();
    let product = circulant_det_mod(row, base, ctx)?.value();
    let direct = det_mod_p(reduced, l)?.value();
    let geo = det_mod_p(geometric, l)?.value();
    Ok(DetCrossCheck {
        product_formula: product,
        direct,
        geometric: geo,
        product_matches_direct: product == direct,
        geometric_matches: geo == direct || geo == ctx.neg(direct),
    })
}

/// Product formula, direct determinant and restricted `psi_plus`
/// determinant, all modulo `l`.
pub fn det_cross_check_n(ctx: &PrimeContext) -> Result<DetCrossCheck> {
    let rm = ReducedCountMatrixN::from_formula(ctx);
    let geo = IntMatrix::from(&restrict_to_affine(&build_psi_plus(ctx), Side::N)?);
    cross_check(&rm.to_int_matrix(), rm.first_row(), ExponentBase::GSquared, &geo, ctx)
}

/// As [`det_cross_check_n`] for the weighted C-case matrix; `geometric` may
/// pass an already assembled restricted `psi`.
pub fn det_cross_check_c(
    ctx: &PrimeContext,
    scheme: &CoefficientScheme,
    geometric: Option<&IntMatrix>,
) -> Result<DetCrossCheck> {
    let rm = ReducedCountMatrixC::from_formula(ctx, scheme);
    let owned;
    let geo = match geometric {
        Some(m) => m,
        None => {
            owned = IntMatrix::from(&restrict_to_affine(&build_psi(ctx, scheme)?, Side::C)?);
            &owned
        }
    };
    cross_check(&rm.to_int_matrix(), rm.first_row(), ExponentBase::G, geo, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(ell: u64, eps: u64) -> PrimeContext {
        PrimeContext::with_choices(ell, Some(eps), None).unwrap()
    }

    #[test]
    fn block_labels_at_five() {
        let c = ctx(5, 2);
        let ms: Vec<u64> = (0..2).map(|i| c.g_pow(2 * i)).collect();
        let big_ms: Vec<u64> = (0..2).map(|j| c.mul(2, c.g_pow(2 * j))).collect();
        let mut ms_sorted = ms.clone();
        ms_sorted.sort();
        let mut big_sorted = big_ms.clone();
        big_sorted.sort();
        assert_eq!(ms_sorted, vec![1, 4]);
        assert_eq!(big_sorted, vec![2, 3]);
    }

    #[test]
    fn block_at_three_is_identity() {
        let c = ctx(3, 2);
        let bm = build_block_matrix_n(&c);
        assert_eq!(bm.block_count(), 1);
        assert_eq!(bm.shift_coefficients(0, 0), Some(vec![1, 0, 0]));
        assert_eq!(bm.block(0, 0), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn chart_conjugacy_small() {
        for ell in [3u64, 5, 7, 11, 13] {
            let c = PrimeContext::new(ell).unwrap();
            assert!(verify_chart_conjugacy_n(&c).unwrap(), "N at {ell}");
            assert!(build_block_matrix_n(&c).is_block_circulant());
            let scheme = CoefficientScheme::canonical(&c);
            assert!(verify_chart_conjugacy_c(&c, &scheme).unwrap(), "C at {ell}");
        }
    }

    #[test]
    fn reduced_n_at_seven() {
        let c = PrimeContext::with_choices(7, Some(3), Some(3)).unwrap();
        let rm = ReducedCountMatrixN::from_formula(&c);
        // 1 + 3*{1, 2, 4} = {4, 0, 6}: roots 2, 1, 0
        assert_eq!(rm.first_row(), &[2, 1, 0]);
        assert!(rm.is_circulant());
        assert_eq!(reduce_mod_frak_l(&build_block_matrix_n(&c), &c).unwrap(), rm);
        let direct = det_mod_p(&rm.to_int_matrix(), 7).unwrap().value();
        assert_eq!(circulant_det_mod(rm.first_row(), ExponentBase::GSquared, &c).unwrap().value(), direct);
    }

    #[test]
    fn row_sum_identity() {
        for ell in [5u64, 7, 11, 13] {
            let c = PrimeContext::new(ell).unwrap();
            let rm = ReducedCountMatrixN::from_formula(&c);
            let brute = (0..ell).filter(|&x| c.is_square(c.div(c.sub(c.mul(x, x), 1), c.epsilon()))).count();
            assert_eq!(rm.first_row().iter().sum::<u64>() as usize, brute);
        }
    }

    #[test]
    fn eigenvalues_n_examples() {
        let c = PrimeContext::with_choices(7, Some(3), None).unwrap();
        let reports = eigenvalues_n(&ReducedCountMatrixN::from_formula(&c), &c).unwrap();
        assert_eq!(reports.len(), 3);
        assert_eq!(reports[0].residue, 6);
        assert_eq!((reports[1].k_prime, reports[1].closed_form, reports[1].residue), (2, 2, 2));
    }

    #[test]
    fn eigenvalues_c_examples() {
        let c = ctx(5, 2);
        let reports = eigenvalues_c(&c, &CoefficientScheme::canonical(&c)).unwrap();
        let parts: Vec<(usize, u64, u64)> =
            reports.iter().map(|r| (r.k_prime, r.parts.unwrap().alpha, r.parts.unwrap().beta)).collect();
        assert_eq!(parts, vec![(0, 1, 0), (3, 0, 1), (2, 1, 0), (1, 0, 2)]);
        assert_eq!(reports[0].residue, 1);
    }

    #[test]
    fn circulant_det_trivia() {
        let c = PrimeContext::new(13).unwrap();
        assert_eq!(circulant_det_mod(&[1, 0, 0, 0, 0, 0], ExponentBase::GSquared, &c).unwrap().value(), 1);
        assert_eq!(circulant_det_mod(&[1; 6], ExponentBase::GSquared, &c).unwrap().value(), 0);
        assert!(matches!(circulant_det_mod(&[1; 6], ExponentBase::G, &c), Err(Error::BadRootOfUnity { .. })));
        assert!(matches!(circulant_det_mod(&[1; 5], ExponentBase::G, &c), Err(Error::BadRootOfUnity { .. })));
    }

    #[test]
    fn c_relabel_and_circulance() {
        for ell in [5u64, 7, 11] {
            let c = PrimeContext::new(ell).unwrap();
            let scheme = CoefficientScheme::canonical(&c);
            let rm = ReducedCountMatrixC::from_formula(&c, &scheme);
            assert!(rm.is_circulant());
            let chart = reduce_block_matrix_c(&build_block_matrix_c(&c, &scheme), &c).unwrap();
            assert!(matches_chart_collapse(&rm, &chart, &c));
        }
    }

    #[test]
    fn cross_checks_small() {
        for ell in [3u64, 5, 7, 11] {
            let c = PrimeContext::new(ell).unwrap();
            assert!(det_cross_check_n(&c).unwrap().passed(), "N at {ell}");
            assert!(det_cross_check_c(&c, &CoefficientScheme::canonical(&c), None).unwrap().passed(), "C at {ell}");
        }
    }
}
