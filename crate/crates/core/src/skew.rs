//! Dense skew-symmetric matrices and Pfaffian evaluation.
//!
//! The Pfaffian of a `2n x 2n` antisymmetric matrix is computed by a pivoted
//! Parlett–Reid tridiagonalization (closed forms for orders 2 and 4, Laplace
//! expansion for order 6). The remaining operations are the classical
//! Pfaffian identities — Laplace expansion along a row, the `Pf(A - J)`
//! subset expansion, the quotient-matrix closed form and conjugation
//! `Pf(C A C^T) = det(C) Pf(A)` — several of which double as runtime
//! cross-checks.

use thiserror::Error;

/// Default absolute/relative tolerance for internal cross-checks.
pub const CROSS_CHECK_TOL: f64 = 1e-10;

/// Largest order accepted by [`pfaffian_laplace`]; the expansion visits
/// `(order-1)!!` terms.
pub const LAPLACE_MAX_ORDER: usize = 12;

/// Largest number of 2x2 blocks for which [`pf_minus_j`] runs its
/// `2^n`-term subset-expansion cross-check.
const PF_MINUS_J_CHECK_MAX_PAIRS: usize = 10;

#[derive(Debug, Error)]
pub enum SkewError {
    #[error("order must be even and positive, got {0}")]
    OddOrder(usize),
    #[error("entry ({0},{1}) is not finite")]
    NonFinite(usize, usize),
    #[error("matrix is not antisymmetric at ({0},{1})")]
    NotAntisymmetric(usize, usize),
    #[error("order {order} exceeds maximum {max} for this operation")]
    OrderTooLarge { order: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quotient matrix requires nonzero entries, a[{0}] = 0")]
    ZeroEntry(usize),
    #[error("row index {row} out of range for order {order}")]
    RowOutOfRange { row: usize, order: usize },
    #[error(
        "Pf(A - J) cross-check failed: direct {direct:e}, subset expansion {expansion:e}, \
         tolerance {tol:e}"
    )]
    CrossCheckFailed { direct: f64, expansion: f64, tol: f64 },
}

/// Dense real antisymmetric matrix of even order.
///
/// Antisymmetry is enforced at construction: the lower triangle is always
/// derived from the upper one and the diagonal is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SkewMatrix {
    /// Builds a matrix from its strict upper triangle, `f(i, j)` with `i < j`.
    pub fn from_upper<F>(order: usize, mut f: F) -> Result<Self, SkewError>
    where
        F: FnMut(usize, usize) -> f64,
    {
        if order == 0 || order % 2 != 0 {
            return Err(SkewError::OddOrder(order));
        }
        let mut entries = vec![0.0; order * order];
        for i in 0..order {
            for j in (i + 1)..order {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(SkewError::NonFinite(i, j));
                }
                entries[i * order + j] = v;
                entries[j * order + i] = -v;
            }
        }
        Ok(Self { order, entries })
    }

    /// Zero matrix of the given even order.
    pub fn zeros(order: usize) -> Result<Self, SkewError> {
        Self::from_upper(order, |_, _| 0.0)
    }

    /// The canonical symplectic matrix `J` with 2x2 blocks
    /// `[[0, 1], [-1, 0]]` down the diagonal.
    pub fn symplectic(order: usize) -> Result<Self, SkewError> {
        Self::from_upper(order, |i, j| if j == i + 1 && i % 2 == 0 { 1.0 } else { 0.0 })
    }

    /// Validates a dense row-major matrix as antisymmetric (exact diagonal
    /// zero and `a_ij = -a_ji` up to roundoff scaled by the entries).
    pub fn try_from_dense(order: usize, data: &[f64]) -> Result<Self, SkewError> {
        if data.len() != order * order {
            return Err(SkewError::DimensionMismatch { expected: order * order, got: data.len() });
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 64.0 * f64::EPSILON * scale.max(1.0);
        for i in 0..order {
            for j in i..order {
                let a = data[i * order + j];
                let b = data[j * order + i];
                if !a.is_finite() || !b.is_finite() {
                    return Err(SkewError::NonFinite(i, j));
                }
                if (a + b).abs() > tol {
                    return Err(SkewError::NotAntisymmetric(i, j));
                }
            }
        }
        Self::from_upper(order, |i, j| {
            0.5 * (data[i * order + j] - data[j * order + i])
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `self + c * J`.
    pub fn add_symplectic(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in (0..self.order).step_by(2) {
            out.entries[i * self.order + i + 1] += c;
            out.entries[(i + 1) * self.order + i] -= c;
        }
        out
    }

    /// Scales every entry; `Pf(c A) = c^n Pf(A)`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.entries {
            *v *= c;
        }
        out
    }

    /// Principal submatrix on the given (strictly increasing) indices.
    fn restrict(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut entries = vec![0.0; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                entries[a * m + b] = self.get(i, j);
            }
        }
        Self { order: m, entries }
    }

    /// Submatrix with rows/columns `i` and `j` removed.
    fn minor(&self, i: usize, j: usize) -> Self {
        let idx: Vec<usize> = (0..self.order).filter(|&k| k != i && k != j).collect();
        self.restrict(&idx)
    }
}

/// Pfaffian of an antisymmetric matrix.
///
/// Orders 2 and 4 are closed forms, order 6 a Laplace expansion, larger
/// orders a Parlett–Reid tridiagonalization with partial pivoting (the pivot
/// permutation sign is folded into the result).
pub fn pfaffian(a: &SkewMatrix) -> f64 {
    match a.order() {
        2 => a.get(0, 1),
        4 => {
            a.get(0, 1) * a.get(2, 3) - a.get(0, 2) * a.get(1, 3) + a.get(0, 3) * a.get(1, 2)
        }
        6 => laplace_rec(a),
        _ => parlett_reid(a),
    }
}

fn parlett_reid(a: &SkewMatrix) -> f64 {
    let n = a.order();
    let mut m = a.entries.clone();
    let mut pf = 1.0;
    let mut tau = vec![0.0f64; n];
    let mut b = vec![0.0f64; n];
    for k in (0..n - 1).step_by(2) {
        // Pivot the largest |m[i][k]|, i > k, into position (k+1, k).
        let mut kp = k + 1;
        let mut best = m[(k + 1) * n + k].abs();
        for i in (k + 2)..n {
            let v = m[i * n + k].abs();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for col in 0..n {
                m.swap((k + 1) * n + col, kp * n + col);
            }
            for row in 0..n {
                m.swap(row * n + k + 1, row * n + kp);
            }
            pf = -pf;
        }
        let pivot = m[k * n + k + 1];
        if pivot == 0.0 {
            // The whole column is zero: the matrix is singular.
            return 0.0;
        }
        pf *= pivot;
        if k + 2 < n {
            // Gauss update of the trailing block:
            // A <- A + tau b^T - b tau^T with tau = A[k, k+2..] / pivot,
            // b = A[k+2.., k+1]; gathered first so the rank-2 update runs on
            // contiguous rows.
            let inv = 1.0 / pivot;
            for j in (k + 2)..n {
                tau[j] = m[k * n + j] * inv;
                b[j] = m[j * n + k + 1];
            }
            let tau_t = &tau[k + 2..n];
            let b_t = &b[k + 2..n];
            let update = |(i, row): (usize, &mut [f64])| {
                let i = i + k + 2;
                let (ti, bi) = (tau[i], b[i]);
                for (slot, (tj, bj)) in
                    row[k + 2..].iter_mut().zip(tau_t.iter().zip(b_t.iter()))
                {
                    *slot += ti * bj - bi * tj;
                }
            };
            let trailing = &mut m[(k + 2) * n..];
            if n - k > 512 {
                use rayon::prelude::*;
                trailing.par_chunks_mut(n).enumerate().for_each(update);
            } else {
                trailing.chunks_mut(n).enumerate().for_each(update);
            }
        }
    }
    pf
}

fn laplace_rec(a: &SkewMatrix) -> f64 {
    match a.order() {
        0 => 1.0,
        2 => a.get(0, 1),
        4 => {
            a.get(0, 1) * a.get(2, 3) - a.get(0, 2) * a.get(1, 3) + a.get(0, 3) * a.get(1, 2)
        }
        _ => expand_along_row(a, 0),
    }
}

fn expand_along_row(a: &SkewMatrix, row: usize) -> f64 {
    let mut sum = 0.0;
    for j in 0..a.order() {
        if j == row {
            continue;
        }
        let entry = a.get(row, j);
        if entry == 0.0 {
            continue;
        }
        // sign = (-1)^(i + j + 1 + [j < i]), identical parity in 0- or
        // 1-based indexing.
        let exp = row + j + 1 + usize::from(j < row);
        let sign = if exp % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * entry * laplace_rec(&a.minor(row, j));
    }
    sum
}

/// Pfaffian via the signed cofactor expansion along `row` (0-based).
///
/// Guarded to order 12; the expansion is factorial in the order. Expansion
/// along any row agrees with [`pfaffian`] to roundoff.
pub fn pfaffian_laplace(a: &SkewMatrix, row: usize) -> Result<f64, SkewError> {
    if a.order() > LAPLACE_MAX_ORDER {
        return Err(SkewError::OrderTooLarge { order: a.order(), max: LAPLACE_MAX_ORDER });
    }
    if row >= a.order() {
        return Err(SkewError::RowOutOfRange { row, order: a.order() });
    }
    Ok(expand_along_row(a, row))
}

/// `Pf(A - J)` with an internal dual-route consistency check.
///
/// The direct evaluation via [`pfaffian`] is compared against the subset
/// expansion `sum_m sum_x (-1)^(n-m) Pf(A|_{U_x})` whenever the expansion is
/// affordable (`n <= 10` blocks); disagreement beyond `tol` is an error. The
/// direct value is returned either way.
pub fn pf_minus_j(a: &SkewMatrix, tol: f64) -> Result<f64, SkewError> {
    let direct = pfaffian(&a.add_symplectic(-1.0));
    let n = a.order() / 2;
    if n <= PF_MINUS_J_CHECK_MAX_PAIRS {
        let expansion = pf_minus_j_expansion(a);
        let scale = direct.abs().max(a.max_abs()).max(1.0);
        if (direct - expansion).abs() > tol * scale {
            return Err(SkewError::CrossCheckFailed { direct, expansion, tol });
        }
    }
    Ok(direct)
}

fn pf_minus_j_expansion(a: &SkewMatrix) -> f64 {
    let n = a.order() / 2;
    let mut sum = 0.0;
    for mask in 0u32..(1u32 << n) {
        let m = mask.count_ones() as usize;
        let sign = if (n - m) % 2 == 0 { 1.0 } else { -1.0 };
        if m == 0 {
            sum += sign;
            continue;
        }
        let mut idx = Vec::with_capacity(2 * m);
        for x in 0..n {
            if mask & (1 << x) != 0 {
                idx.push(2 * x);
                idx.push(2 * x + 1);
            }
        }
        sum += sign * pfaffian(&a.restrict(&idx));
    }
    sum
}

/// Builds the quotient matrix `A_ij = a_i / a_j` (for `i < j`) and returns
/// its Pfaffian, which equals `(a_1 a_3 ...) / (a_2 a_4 ...)` exactly.
pub fn pf_quotient_check(a: &[f64]) -> Result<f64, SkewError> {
    if a.is_empty() || a.len() % 2 != 0 {
        return Err(SkewError::OddOrder(a.len()));
    }
    if let Some(k) = a.iter().position(|&v| v == 0.0) {
        return Err(SkewError::ZeroEntry(k));
    }
    let m = SkewMatrix::from_upper(a.len(), |i, j| a[i] / a[j])?;
    Ok(pfaffian(&m))
}

/// Conjugation `C A C^T`, symmetrized back to an exact [`SkewMatrix`].
///
/// `c` is dense row-major of the same order. Satisfies
/// `Pf(C A C^T) = det(C) Pf(A)`.
pub fn conjugate(a: &SkewMatrix, c: &[f64]) -> Result<SkewMatrix, SkewError> {
    let n = a.order();
    if c.len() != n * n {
        return Err(SkewError::DimensionMismatch { expected: n * n, got: c.len() });
    }
    // t = C A
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let cik = c[i * n + k];
            if cik == 0.0 {
                continue;
            }
            for j in 0..n {
                t[i * n + j] += cik * a.get(k, j);
            }
        }
    }
    // b = t C^T, antisymmetrized as it is assembled
    SkewMatrix::from_upper(n, |i, j| {
        let mut bij = 0.0;
        let mut bji = 0.0;
        for k in 0..n {
            bij += t[i * n + k] * c[j * n + k];
            bji += t[j * n + k] * c[i * n + k];
        }
        0.5 * (bij - bji)
    })
}
