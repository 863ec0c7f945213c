//! Dense real linear-algebra kernels.
//!
//! Matrices are stored row-major with an explicit `(rows, cols)` header.
//! QR, LU and symmetric eigenproblems go through `nalgebra`; singular value
//! decompositions go through `faer`, whose SVD is reliable on rank-deficient
//! matrices with repeated singular values. Everything here is a pure
//! function of its inputs and single-threaded, so results are reproducible
//! bit-for-bit.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TripleError};

/// Relative singular-value threshold used for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(TripleError::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(TripleError::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Stacks the given vectors as columns.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            debug_assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.entries[i * cols + j] = c[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(TripleError::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let row = &other.entries[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        singular_values(self).into_iter().fold(0.0, f64::max)
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.entries[i * cols + j] = m[(i, j)];
            }
        }
        out
    }

    fn ensure_finite(&self) -> Result<()> {
        if self.entries.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(TripleError::InvalidInput("non-finite matrix entry".into()))
        }
    }
}

pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    if a.rows == 0 || a.cols == 0 {
        return Vec::new();
    }
    let m = faer::Mat::<f64>::from_fn(a.rows, a.cols, |i, j| a.entries[i * a.cols + j]);
    let mut s = m.singular_values().unwrap_or_else(|_| vec![f64::NAN; a.rows.min(a.cols)]);
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Thin SVD `A = U diag(s) Vᵀ` with `s` in decreasing order.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = a.shape();
        if a.iter().any(|v| !v.is_finite()) {
            return Err(TripleError::InvalidInput("non-finite matrix entry".into()));
        }
        let m = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
        let svd = m.thin_svd().map_err(|_| TripleError::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        })?;
        let k = rows.min(cols);
        let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&x, &y| s[y].total_cmp(&s[x]).then(x.cmp(&y)));
        Ok(Self {
            u: DMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]),
            s: order.iter().map(|&j| s[j]).collect(),
            v: DMatrix::from_fn(cols, k, |i, j| v[(i, order[j])]),
        })
    }

    pub fn sigma_max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    /// Minimum-norm least-squares solution, dropping singular values `≤ eps`.
    pub fn solve(&self, b: &nalgebra::DVector<f64>, eps: f64) -> nalgebra::DVector<f64> {
        let ub = self.u.transpose() * b;
        let mut c = nalgebra::DVector::zeros(self.s.len());
        for (i, &si) in self.s.iter().enumerate() {
            if si > eps {
                c[i] = ub[i] / si;
            }
        }
        &self.v * c
    }
}

/// Orthonormal basis (as columns) of `{x : ‖Ax‖ ≤ tol·‖A‖·‖x‖}`, where
/// `‖A‖` is the largest singular value.
pub fn null_space(a: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    if !(tol > 0.0) {
        return Err(TripleError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    a.ensure_finite()?;
    let mut acc = RowAccumulator::new(a.cols);
    for i in 0..a.rows {
        acc.push_row(&a.entries[i * a.cols..(i + 1) * a.cols]);
    }
    acc.null_space(tol)
}

/// Incremental row store that keeps only a QR-compressed triangular factor,
/// so very tall systems never have to be materialised in full.
#[derive(Debug, Clone)]
pub struct RowAccumulator {
    cols: usize,
    compressed: Option<DMatrix<f64>>,
    pending: Vec<f64>,
    pending_rows: usize,
    chunk: usize,
}

impl RowAccumulator {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            compressed: None,
            pending: Vec::new(),
            pending_rows: 0,
            chunk: (4 * cols).max(256),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn push_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.cols);
        self.pending.extend_from_slice(row);
        self.pending_rows += 1;
        if self.pending_rows >= self.chunk {
            self.compress();
        }
    }

    fn compress(&mut self) {
        if self.pending_rows == 0 {
            return;
        }
        let prev_rows = self.compressed.as_ref().map_or(0, |r| r.nrows());
        let total = prev_rows + self.pending_rows;
        let mut stacked = DMatrix::<f64>::zeros(total, self.cols);
        if let Some(r) = &self.compressed {
            stacked.rows_mut(0, prev_rows).copy_from(r);
        }
        for i in 0..self.pending_rows {
            for j in 0..self.cols {
                stacked[(prev_rows + i, j)] = self.pending[i * self.cols + j];
            }
        }
        self.pending.clear();
        self.pending_rows = 0;
        self.compressed = Some(if total > self.cols {
            stacked.qr().r()
        } else {
            stacked
        });
    }

    /// Matrix with the same row space (and singular values) as all pushed rows.
    pub fn finish(mut self) -> DMatrix<f64> {
        self.compress();
        self.compressed
            .unwrap_or_else(|| DMatrix::<f64>::zeros(0, self.cols))
    }

    pub fn null_space(self, tol: f64) -> Result<DenseMatrix> {
        let cols = self.cols;
        let r = self.finish();
        if r.iter().any(|v| !v.is_finite()) {
            return Err(TripleError::InvalidInput("non-finite matrix entry".into()));
        }
        if cols == 0 {
            return Ok(DenseMatrix::zeros(0, 0));
        }
        // Pad to square so the SVD yields a full set of right singular vectors.
        let square = if r.nrows() < cols {
            let mut p = DMatrix::<f64>::zeros(cols, cols);
            p.rows_mut(0, r.nrows()).copy_from(&r);
            p
        } else {
            r
        };
        let svd = Svd::new(&square)?;
        let sigma_max = svd.sigma_max();
        let cutoff = tol * sigma_max;
        // Smallest singular values first.
        let columns: Vec<Vec<f64>> = (0..svd.s.len())
            .rev()
            .filter(|&i| sigma_max == 0.0 || svd.s[i] <= cutoff)
            .map(|i| canonical_sign(svd.v.column(i).iter().copied().collect()))
            .collect();
        Ok(DenseMatrix::from_columns(cols, &columns))
    }
}

/// Flips the sign so the entry of largest magnitude is positive.
fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Orthonormal basis (as columns) of the column space of `a`, keeping singular
/// directions above `tol·σ_max`.
pub fn range_basis(a: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    a.ensure_finite()?;
    if a.rows == 0 || a.cols == 0 {
        return Ok(DenseMatrix::zeros(a.rows, 0));
    }
    let svd = Svd::new(&a.to_nalgebra())?;
    let sigma_max = svd.sigma_max();
    if sigma_max == 0.0 {
        return Ok(DenseMatrix::zeros(a.rows, 0));
    }
    let columns: Vec<Vec<f64>> = (0..svd.s.len())
        .filter(|&i| svd.s[i] > tol * sigma_max)
        .map(|i| canonical_sign(svd.u.column(i).iter().copied().collect()))
        .collect();
    Ok(DenseMatrix::from_columns(a.rows, &columns))
}

/// `min_x ‖Ax − b‖₂`.
pub fn least_squares_residual(a: &DenseMatrix, b: &[f64]) -> Result<f64> {
    if b.len() != a.rows {
        return Err(TripleError::InvalidInput(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(TripleError::InvalidInput("non-finite right-hand side".into()));
    }
    let tol = f64::EPSILON * a.rows.max(a.cols).max(1) as f64;
    let q = range_basis(a, tol)?;
    let mut r = b.to_vec();
    for j in 0..q.cols {
        let c = q.column(j);
        let dot: f64 = c.iter().zip(b).map(|(x, y)| x * y).sum();
        for (ri, ci) in r.iter_mut().zip(&c) {
            *ri -= dot * ci;
        }
    }
    Ok(r.iter().map(|v| v * v).sum::<f64>().sqrt())
}

// Padé(13) coefficients and the 1-norm bound from Higham's scaling and squaring.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a degree-13 Padé core.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != a.cols {
        return Err(TripleError::InvalidInput(format!(
            "expm needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    a.ensure_finite()?;
    let n = a.rows;
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    let m = a.to_nalgebra();
    let norm = one_norm(&m);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a_s = &m / 2f64.powi(squarings);
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a_s * &a_s;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a_s * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| TripleError::InvalidInput("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(DenseMatrix::from_nalgebra(&r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_trivial_kernel() {
        let n = null_space(&DenseMatrix::identity(2), 1e-12).unwrap();
        assert_eq!(n.cols(), 0);
        assert_eq!(n.rows(), 2);
    }

    #[test]
    fn antidiagonal_row_kernel() {
        let a = DenseMatrix::from_row_major(1, 2, vec![1.0, -1.0]).unwrap();
        let n = null_space(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(n.cols(), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((n.get(0, 0) - h).abs() < 1e-14);
        assert!((n.get(1, 0) - h).abs() < 1e-14);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let n = null_space(&DenseMatrix::zeros(3, 2), 1e-9).unwrap();
        assert_eq!(n.cols(), 2);
    }

    #[test]
    fn tall_systems_are_compressed_consistently() {
        // 600 copies of two rows still leave a 1-dim kernel in R^3.
        let mut rows = Vec::new();
        for k in 0..300 {
            let s = 1.0 + k as f64 * 1e-3;
            rows.extend_from_slice(&[s, 0.0, -s]);
            rows.extend_from_slice(&[0.0, s, 0.0]);
        }
        let a = DenseMatrix::from_row_major(600, 3, rows).unwrap();
        let n = null_space(&a, 1e-9).unwrap();
        assert_eq!(n.cols(), 1);
        assert!((n.get(0, 0) - n.get(2, 0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let a = DenseMatrix {
            rows: 1,
            cols: 1,
            entries: vec![f64::NAN],
        };
        assert!(matches!(null_space(&a, 1e-9), Err(TripleError::InvalidInput(_))));
        assert!(DenseMatrix::from_row_major(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn least_squares_examples() {
        let b = vec![0.3, -1.7];
        assert!(least_squares_residual(&DenseMatrix::identity(2), &b).unwrap() < 1e-15);
        let r = least_squares_residual(&DenseMatrix::zeros(2, 2), &b).unwrap();
        assert!((r - (0.09f64 + 2.89).sqrt()).abs() < 1e-15);
        let col = DenseMatrix::from_row_major(2, 1, vec![1.0, 0.0]).unwrap();
        assert!((least_squares_residual(&col, &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(least_squares_residual(&col, &[1.0]).is_err());
    }

    #[test]
    fn expm_closed_forms() {
        let z = expm(&DenseMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z, DenseMatrix::identity(3));

        let e = expm(&DenseMatrix::from_row_major(1, 1, vec![1.0]).unwrap()).unwrap();
        assert!((e.get(0, 0) - std::f64::consts::E).abs() < 1e-15 * std::f64::consts::E * 4.0);

        let t = std::f64::consts::FRAC_PI_2;
        let g = DenseMatrix::from_row_major(2, 2, vec![0.0, -t, t, 0.0]).unwrap();
        let r = expm(&g).unwrap();
        let want = [0.0, -1.0, 1.0, 0.0];
        for (got, w) in r.entries().iter().zip(want) {
            assert!((got - w).abs() < 1e-12, "{got} vs {w}");
        }
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        // diag(10, -3): exact exponentials on the diagonal.
        let a = DenseMatrix::from_row_major(2, 2, vec![10.0, 0.0, 0.0, -3.0]).unwrap();
        let e = expm(&a).unwrap();
        assert!((e.get(0, 0) / 10f64.exp() - 1.0).abs() < 1e-13);
        assert!((e.get(1, 1) / (-3f64).exp() - 1.0).abs() < 1e-13);
        assert!(expm(&DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn range_basis_of_rank_one() {
        let a = DenseMatrix::from_row_major(3, 2, vec![1.0, 2.0, 2.0, 4.0, 0.0, 0.0]).unwrap();
        let q = range_basis(&a, 1e-9).unwrap();
        assert_eq!(q.cols(), 1);
    }
}
