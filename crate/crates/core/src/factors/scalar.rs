//! Scalar fields ℝ, ℂ, ℍ and small dense matrices over them.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::quaternion::Quaternion;

pub(crate) trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Dimension over ℝ.
    const REAL_DIM: usize;
    fn zero() -> Self;
    /// The `p`-th real basis unit: 1, i, j, k.
    fn unit(p: usize) -> Self;
    fn component(self, p: usize) -> f64;
    fn conj(self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Left-multiplication matrix on real components, row-major
    /// `REAL_DIM × REAL_DIM`.
    fn left_block(self) -> Vec<f64>;
}

impl Scalar for f64 {
    const REAL_DIM: usize = 1;
    fn zero() -> Self {
        0.0
    }
    fn unit(_p: usize) -> Self {
        1.0
    }
    fn component(self, _p: usize) -> f64 {
        self
    }
    fn conj(self) -> Self {
        self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn left_block(self) -> Vec<f64> {
        vec![self]
    }
}

impl Scalar for Complex64 {
    const REAL_DIM: usize = 2;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn unit(p: usize) -> Self {
        if p == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        }
    }
    fn component(self, p: usize) -> f64 {
        if p == 0 {
            self.re
        } else {
            self.im
        }
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn left_block(self) -> Vec<f64> {
        vec![self.re, -self.im, self.im, self.re]
    }
}

impl Scalar for Quaternion {
    const REAL_DIM: usize = 4;
    fn zero() -> Self {
        Quaternion::default()
    }
    fn unit(p: usize) -> Self {
        [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K][p]
    }
    fn component(self, p: usize) -> f64 {
        self.to_array()[p]
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::scale(self, s)
    }
    fn left_block(self) -> Vec<f64> {
        self.left_matrix().iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> S {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(c, r) = self.at(r, c).conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                for c in 0..other.cols {
                    let v = out.at(r, c) + a * other.at(k, c);
                    *out.at_mut(r, c) = v;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.scale(s)).collect(),
        }
    }

    /// Real representation: each entry replaced by its left-multiplication
    /// block, giving a `(d·rows) × (d·cols)` real matrix.
    pub fn realify(&self) -> (usize, usize, Vec<f64>) {
        let d = S::REAL_DIM;
        let (rr, cc) = (d * self.rows, d * self.cols);
        let mut out = vec![0.0; rr * cc];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let b = self.at(r, c).left_block();
                for p in 0..d {
                    for q in 0..d {
                        out[(d * r + p) * cc + d * c + q] = b[p * d + q];
                    }
                }
            }
        }
        (rr, cc, out)
    }
}
