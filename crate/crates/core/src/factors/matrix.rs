//! Matrix-type factors: all of `M_{m×n}(F)`, or the hermitian /
//! skew-hermitian square matrices, with `{x,y,z} = ½(xy*z + zy*x)`.

use std::marker::PhantomData;

use super::scalar::{Mat, Scalar};
use super::FactorModel;
use crate::numerics::DenseMatrix;
use crate::triple::LinearMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Symmetry {
    General,
    /// `x* = x`
    Hermitian,
    /// `x* = −x`
    SkewHermitian,
}

/// Coordinate `(row, col, part)`: the `part`-th real component of entry
/// `(row, col)`. Off-diagonal slots of square symmetric kinds also fill the
/// mirrored entry.
#[derive(Debug, Clone, Copy)]
struct Slot {
    row: usize,
    col: usize,
    part: usize,
}

pub(crate) struct MatrixModel<S> {
    rows: usize,
    cols: usize,
    symmetry: Symmetry,
    slots: Vec<Slot>,
    _field: PhantomData<S>,
}

impl<S: Scalar> MatrixModel<S> {
    pub fn new(rows: usize, cols: usize, symmetry: Symmetry) -> Self {
        let d = S::REAL_DIM;
        let mut slots = Vec::new();
        for row in 0..rows {
            for col in 0..cols {
                let parts: Vec<usize> = match symmetry {
                    Symmetry::General => (0..d).collect(),
                    _ if row > col => continue,
                    Symmetry::Hermitian if row == col => vec![0],
                    Symmetry::SkewHermitian if row == col => (1..d).collect(),
                    _ => (0..d).collect(),
                };
                slots.extend(parts.into_iter().map(|part| Slot { row, col, part }));
            }
        }
        Self {
            rows,
            cols,
            symmetry,
            slots,
            _field: PhantomData,
        }
    }

    pub fn to_matrix(&self, coords: &[f64]) -> Mat<S> {
        let mut m = Mat::zeros(self.rows, self.cols);
        for (slot, v) in self.slots.iter().zip(coords) {
            if *v == 0.0 {
                continue;
            }
            let val = S::unit(slot.part).scale(*v);
            let cur = m.at(slot.row, slot.col);
            *m.at_mut(slot.row, slot.col) = cur + val;
            if slot.row != slot.col {
                let mirrored = match self.symmetry {
                    Symmetry::General => continue,
                    Symmetry::Hermitian => val.conj(),
                    Symmetry::SkewHermitian => -val.conj(),
                };
                let cur = m.at(slot.col, slot.row);
                *m.at_mut(slot.col, slot.row) = cur + mirrored;
            }
        }
        m
    }

    pub fn from_matrix(&self, m: &Mat<S>) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| m.at(s.row, s.col).component(s.part))
            .collect()
    }

    fn coords_of(&self, entries: &[(usize, usize, usize, f64)]) -> Vec<f64> {
        let mut m = Mat::<S>::zeros(self.rows, self.cols);
        for &(r, c, p, v) in entries {
            let val = S::unit(p).scale(v);
            *m.at_mut(r, c) = m.at(r, c) + val;
        }
        self.from_matrix(&m)
    }
}

impl<S: Scalar> FactorModel for MatrixModel<S> {
    fn dim(&self) -> usize {
        self.slots.len()
    }

    fn product(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let (mx, my, mz) = (self.to_matrix(x), self.to_matrix(y), self.to_matrix(z));
        let ys = my.adjoint();
        let a = mx.mul(&ys).mul(&mz);
        let b = mz.mul(&ys).mul(&mx);
        self.from_matrix(&a.add(&b).scale(0.5))
    }

    fn norm(&self, x: &[f64]) -> f64 {
        self.real_matrix(x)
            .expect("matrix factor")
            .spectral_norm()
    }

    fn real_matrix(&self, x: &[f64]) -> Option<DenseMatrix> {
        let (r, c, e) = self.to_matrix(x).realify();
        Some(DenseMatrix::from_row_major(r, c, e).expect("finite coordinates"))
    }

    fn from_real_matrix(&self, m: &DenseMatrix) -> Option<Vec<f64>> {
        let d = S::REAL_DIM;
        if m.rows() != d * self.rows || m.cols() != d * self.cols {
            return None;
        }
        Some(
            self.slots
                .iter()
                .map(|s| m.get(d * s.row + s.part, d * s.col))
                .collect(),
        )
    }

    fn complex_structure(&self) -> Option<LinearMap> {
        if S::REAL_DIM != 2 || self.symmetry != Symmetry::General {
            return None;
        }
        let n = self.dim();
        let images: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                // (a + bi)·i = −b + ai on each interleaved (re, im) pair.
                if i % 2 == 0 {
                    v[i + 1] = 1.0;
                } else {
                    v[i - 1] = -1.0;
                }
                v
            })
            .collect();
        Some(LinearMap::from_images(n, &images))
    }

    fn tripotents(&self) -> Vec<(String, Vec<f64>)> {
        let mut out = Vec::new();
        let k = self.rows.min(self.cols);
        match self.symmetry {
            Symmetry::General => {
                for r in 0..self.rows {
                    for c in 0..self.cols {
                        out.push((format!("E{}{}", r + 1, c + 1), self.coords_of(&[(r, c, 0, 1.0)])));
                    }
                }
                if S::REAL_DIM > 1 {
                    out.push(("iE11".into(), self.coords_of(&[(0, 0, 1, 1.0)])));
                }
                if k > 1 {
                    let diag: Vec<_> = (0..k).map(|r| (r, r, 0, 1.0)).collect();
                    out.push(("sum of diagonal units".into(), self.coords_of(&diag)));
                }
            }
            Symmetry::Hermitian => {
                for r in 0..self.rows {
                    out.push((format!("E{0}{0}", r + 1), self.coords_of(&[(r, r, 0, 1.0)])));
                }
                if self.rows > 1 {
                    out.push(("E12+E21".into(), self.coords_of(&[(0, 1, 0, 1.0)])));
                    let diag: Vec<_> = (0..k).map(|r| (r, r, 0, 1.0)).collect();
                    out.push(("identity".into(), self.coords_of(&diag)));
                }
            }
            Symmetry::SkewHermitian => {
                for p in 1..S::REAL_DIM {
                    for r in 0..self.rows {
                        out.push((format!("u{p}E{0}{0}", r + 1), self.coords_of(&[(r, r, p, 1.0)])));
                    }
                }
                for r in 0..self.rows {
                    for c in (r + 1)..self.cols {
                        out.push((
                            format!("E{0}{1}-E{1}{0}", r + 1, c + 1),
                            self.coords_of(&[(r, c, 0, 1.0)]),
                        ));
                    }
                }
                if S::REAL_DIM == 1 && self.rows >= 4 {
                    out.push((
                        "E12-E21+E34-E43".into(),
                        self.coords_of(&[(0, 1, 0, 1.0), (2, 3, 0, 1.0)]),
                    ));
                }
                if S::REAL_DIM > 1 && self.rows > 1 {
                    let diag: Vec<_> = (0..k).map(|r| (r, r, 1, 1.0)).collect();
                    out.push(("i·identity".into(), self.coords_of(&diag)));
                }
            }
        }
        out
    }
}
