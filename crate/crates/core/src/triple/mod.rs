//! Finite-dimensional real-trilinear triple systems.
//!
//! A [`TripleSystem`] is a structure-constant tensor `c(i,j,k,l)`, the `l`-th
//! coordinate of `{e_i, e_j, e_k}`, plus metadata. Complex factors are stored
//! through their realification and carry the complex structure `J`
//! separately, so complex-linearity is something to check rather than
//! something assumed.

mod axioms;
mod io;

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TripleError};
use crate::numerics::DenseMatrix;

pub use axioms::{
    check_complex_structure, check_hermitian_surrogate, check_jordan_identity, check_norm_axiom,
    JORDAN_EXHAUSTIVE_MAX_DIM, JORDAN_RANDOM_TUPLES,
};
pub use io::{read_system, write_system, SystemFile};

/// Largest supported dimension (`n⁴` tensor entries must stay desk-sized).
pub const MAX_DIM: usize = 64;

/// Tolerance for algebraic identities on constructed systems.
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// Tolerance for spectral and norm checks.
pub const SPECTRAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Operator,
    Spin,
    Hilbert,
    Product,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NormKind::Operator => "operator",
            NormKind::Spin => "spin",
            NormKind::Hilbert => "hilbert",
            NormKind::Product => "product",
        };
        f.write_str(s)
    }
}

/// Which trilinear product a check or derivation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    /// The triple product `{x,y,z}`.
    Triple,
    /// `<a,b,c> = ({abc} + {cab} + {bca}) / 3`.
    Symmetrized,
}

/// Dense trilinear map `ℝⁿ × ℝⁿ × ℝⁿ → ℝⁿ`, symmetric in the outer slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Trilinear {
    n: usize,
    tensor: Vec<f64>,
}

impl Trilinear {
    /// Wraps a tensor that is already exactly outer-symmetric.
    pub(crate) fn from_symmetric(n: usize, tensor: Vec<f64>) -> Self {
        debug_assert_eq!(tensor.len(), n.pow(4));
        Self { n, tensor }
    }

    /// Assembles the tensor from a product evaluated on basis triples
    /// `i ≤ k`, mirroring into `(k, j, i)` so outer symmetry is exact.
    pub fn from_basis_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize, usize) -> Vec<f64> + Sync,
    {
        use rayon::prelude::*;
        let n3 = n * n * n;
        let mut tensor = vec![0.0; n3 * n];
        // Each (i, j) slab is computed independently; writes are merged in
        // index order afterwards.
        let slabs: Vec<(usize, usize, Vec<Vec<f64>>)> = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let vals = (i..n).map(|k| f(i, j, k)).collect();
                (i, j, vals)
            })
            .collect();
        for (i, j, vals) in slabs {
            for (off, v) in vals.into_iter().enumerate() {
                let k = i + off;
                debug_assert_eq!(v.len(), n);
                let a = ((i * n + j) * n + k) * n;
                let b = ((k * n + j) * n + i) * n;
                tensor[a..a + n].copy_from_slice(&v);
                tensor[b..b + n].copy_from_slice(&v);
            }
        }
        Self { n, tensor }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.tensor[((i * n + j) * n + k) * n + l]
    }

    /// Coordinates of the product of three basis vectors.
    #[inline]
    pub fn basis_product(&self, i: usize, j: usize, k: usize) -> &[f64] {
        let n = self.n;
        let a = ((i * n + j) * n + k) * n;
        &self.tensor[a..a + n]
    }

    /// Trilinear contraction. Bitwise symmetric under swapping `x` and `z`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert!(x.len() == n && y.len() == n && z.len() == n, "coordinate length mismatch");
        let mut out = vec![0.0; n];
        for i in 0..n {
            for k in i..n {
                let w = if i == k {
                    x[i] * z[i]
                } else {
                    x[i] * z[k] + x[k] * z[i]
                };
                if w == 0.0 {
                    continue;
                }
                for (j, yj) in y.iter().enumerate() {
                    let wy = w * yj;
                    if wy == 0.0 {
                        continue;
                    }
                    for (o, c) in out.iter_mut().zip(self.basis_product(i, j, k)) {
                        *o += wy * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ T(a, b, x)`.
    pub fn left_operator(&self, a: &[f64], b: &[f64]) -> LinearMap {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0.0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let w = ai * bj;
                if w == 0.0 {
                    continue;
                }
                for col in 0..n {
                    for (l, c) in self.basis_product(i, j, col).iter().enumerate() {
                        m[l * n + col] += w * c;
                    }
                }
            }
        }
        LinearMap { dim: n, entries: m }
    }

    /// Matrix of `x ↦ T(a, x, a)`.
    pub fn quadratic_operator(&self, a: &[f64]) -> LinearMap {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for k in i..n {
                let w = if i == k { a[i] * a[i] } else { 2.0 * a[i] * a[k] };
                if w == 0.0 {
                    continue;
                }
                for col in 0..n {
                    for (l, c) in self.basis_product(i, col, k).iter().enumerate() {
                        m[l * n + col] += w * c;
                    }
                }
            }
        }
        LinearMap { dim: n, entries: m }
    }

    /// The fully symmetric product `({abc} + {cab} + {bca}) / 3`.
    pub fn symmetrized(&self) -> Trilinear {
        let n = self.n;
        Trilinear::from_basis_fn(n, |i, j, k| {
            let a = self.basis_product(i, j, k);
            let b = self.basis_product(k, i, j);
            let c = self.basis_product(j, k, i);
            (0..n).map(|l| (a[l] + b[l] + c[l]) / 3.0).collect()
        })
    }
}

/// Real-linear operator on an `n`-dimensional system, stored row-major with
/// `entries[l * n + i]` the `l`-th coordinate of `T(e_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    dim: usize,
    entries: Vec<f64>,
}

impl LinearMap {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(TripleError::InvalidInput(format!(
                "linear map on dimension {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(TripleError::InvalidInput("non-finite linear map entry".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_matrix(m: &DenseMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(TripleError::InvalidInput("linear map must be square".into()));
        }
        Self::new(m.rows(), m.entries().to_vec())
    }

    /// Builds the map sending `e_i` to `images[i]`.
    pub fn from_images(dim: usize, images: &[Vec<f64>]) -> Self {
        let mut m = Self::zero(dim);
        for (i, img) in images.iter().enumerate() {
            for (l, v) in img.iter().enumerate() {
                m.entries[l * dim + i] = *v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_row_major(self.dim, self.dim, self.entries.clone())
            .expect("linear map entries are finite")
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        assert_eq!(x.len(), n, "coordinate length mismatch");
        (0..n)
            .map(|l| {
                self.entries[l * n..(l + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let m = self
            .to_matrix()
            .matmul(&other.to_matrix())
            .expect("same dimension");
        LinearMap {
            dim: self.dim,
            entries: m.into_entries(),
        }
    }

    pub fn transpose(&self) -> LinearMap {
        LinearMap {
            dim: self.dim,
            entries: self.to_matrix().transpose().into_entries(),
        }
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> LinearMap {
        LinearMap {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    fn zip_with(&self, other: &LinearMap, f: impl Fn(f64, f64) -> f64) -> LinearMap {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        LinearMap {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &LinearMap) -> LinearMap {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn frobenius_dot(&self, other: &LinearMap) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    /// Frobenius norm of `(T + Tᵀ)/2`.
    pub fn symmetric_part_norm(&self) -> f64 {
        self.add(&self.transpose()).scale(0.5).frobenius_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }
}

/// A finite-dimensional real triple system.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleSystem {
    name: String,
    product: Trilinear,
    norm_kind: NormKind,
    rank_hint: Option<usize>,
    complex_structure: Option<LinearMap>,
    factor_kind: String,
}

impl TripleSystem {
    /// Validates and wraps a structure tensor. Outer-slot asymmetry up to
    /// `1e-12` (relative) is averaged away; anything larger is rejected.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        tensor: Vec<f64>,
        norm_kind: NormKind,
        rank_hint: Option<usize>,
        complex_structure: Option<LinearMap>,
        factor_kind: impl Into<String>,
    ) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(TripleError::TooLarge { dim, cap: MAX_DIM });
        }
        if tensor.len() != dim.pow(4) {
            return Err(TripleError::InvalidInput(format!(
                "tensor for dimension {dim} needs {} entries, got {}",
                dim.pow(4),
                tensor.len()
            )));
        }
        if tensor.iter().any(|v| !v.is_finite()) {
            return Err(TripleError::InvalidInput("non-finite tensor entry".into()));
        }
        let scale = tensor.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut tensor = tensor;
        let n = dim;
        for i in 0..n {
            for j in 0..n {
                for k in (i + 1)..n {
                    for l in 0..n {
                        let a = ((i * n + j) * n + k) * n + l;
                        let b = ((k * n + j) * n + i) * n + l;
                        let (x, y) = (tensor[a], tensor[b]);
                        if (x - y).abs() > 1e-12 * scale {
                            return Err(TripleError::InvalidInput(format!(
                                "tensor is not symmetric in the outer slots at ({i},{j},{k},{l}): {x} vs {y}"
                            )));
                        }
                        if x != y {
                            let m = 0.5 * (x + y);
                            tensor[a] = m;
                            tensor[b] = m;
                        }
                    }
                }
            }
        }
        let product = Trilinear::from_symmetric(dim, tensor);
        if let Some(j) = &complex_structure {
            if j.dim() != dim {
                return Err(TripleError::InvalidInput(
                    "complex structure has the wrong dimension".into(),
                ));
            }
            let sq = j.compose(j).add(&LinearMap::identity(dim)).frobenius_norm();
            if sq > 1e-12 {
                return Err(TripleError::InvalidInput(format!(
                    "complex structure does not square to -identity (residual {sq:.3e})"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            product,
            norm_kind,
            rank_hint,
            complex_structure,
            factor_kind: factor_kind.into(),
        })
    }

    pub(crate) fn from_trilinear(
        name: impl Into<String>,
        product: Trilinear,
        norm_kind: NormKind,
        rank_hint: Option<usize>,
        complex_structure: Option<LinearMap>,
        factor_kind: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            product,
            norm_kind,
            rank_hint,
            complex_structure,
            factor_kind: factor_kind.into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.product.n
    }

    pub fn tensor(&self) -> &[f64] {
        &self.product.tensor
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn rank_hint(&self) -> Option<usize> {
        self.rank_hint
    }

    pub fn complex_structure(&self) -> Option<&LinearMap> {
        self.complex_structure.as_ref()
    }

    pub fn factor_kind(&self) -> &str {
        &self.factor_kind
    }

    pub fn product(&self) -> &Trilinear {
        &self.product
    }

    /// The trilinear map for `kind`; the symmetrized one is assembled on demand.
    pub fn trilinear(&self, kind: ProductKind) -> Cow<'_, Trilinear> {
        match kind {
            ProductKind::Triple => Cow::Borrowed(&self.product),
            ProductKind::Symmetrized => Cow::Owned(self.product.symmetrized()),
        }
    }

    /// Same tensor, viewed as a plain real triple.
    pub fn without_complex_structure(&self) -> Self {
        let mut s = self.clone();
        s.complex_structure = None;
        s.name = format!("{} (real form)", self.name);
        s
    }

    /// Adds `delta` to `c(i,j,k,l)` and its outer-symmetric partner.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, l: usize, delta: f64) -> Self {
        let mut s = self.clone();
        let n = self.dim();
        let a = ((i * n + j) * n + k) * n + l;
        let b = ((k * n + j) * n + i) * n + l;
        s.product.tensor[a] += delta;
        if b != a {
            s.product.tensor[b] += delta;
        }
        s.name = format!("{} (perturbed)", self.name);
        s
    }

    pub fn element(&self, coords: Vec<f64>) -> Result<Element<'_>> {
        if coords.len() != self.dim() {
            return Err(TripleError::InvalidInput(format!(
                "element of a {}-dimensional system needs {} coordinates, got {}",
                self.dim(),
                self.dim(),
                coords.len()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(TripleError::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Element {
            system: self,
            coords,
        })
    }

    pub fn basis_element(&self, i: usize) -> Element<'_> {
        let mut coords = vec![0.0; self.dim()];
        coords[i] = 1.0;
        Element {
            system: self,
            coords,
        }
    }

    pub fn zero_element(&self) -> Element<'_> {
        Element {
            system: self,
            coords: vec![0.0; self.dim()],
        }
    }

    /// `{x,y,z}` on raw coordinates.
    pub fn product_coords(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        self.product.eval(x, y, z)
    }

    pub fn cube_coords(&self, x: &[f64]) -> Vec<f64> {
        self.product.eval(x, x, x)
    }

    /// `L(a,b)` on raw coordinates.
    pub fn l_coords(&self, a: &[f64], b: &[f64]) -> LinearMap {
        self.product.left_operator(a, b)
    }

    /// `Q(a)` on raw coordinates.
    pub fn q_coords(&self, a: &[f64]) -> LinearMap {
        self.product.quadratic_operator(a)
    }
}

/// Coordinate vector tied to the system it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<'s> {
    system: &'s TripleSystem,
    coords: Vec<f64>,
}

impl<'s> Element<'s> {
    pub fn system(&self) -> &'s TripleSystem {
        self.system
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm2(&self) -> f64 {
        euclidean_norm(&self.coords)
    }

    fn same_system(&self, other: &Element<'_>) -> Result<()> {
        if std::ptr::eq(self.system, other.system) {
            Ok(())
        } else {
            Err(TripleError::SystemMismatch)
        }
    }

    fn wrap(&self, coords: Vec<f64>) -> Element<'s> {
        Element {
            system: self.system,
            coords,
        }
    }
}

pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `{x, y, z}`.
pub fn triple_product<'s>(x: &Element<'s>, y: &Element<'s>, z: &Element<'s>) -> Result<Element<'s>> {
    x.same_system(y)?;
    x.same_system(z)?;
    Ok(x.wrap(x.system.product.eval(&x.coords, &y.coords, &z.coords)))
}

/// `<a,b,c> = ({abc} + {cab} + {bca}) / 3`.
pub fn symmetrized_product<'s>(
    a: &Element<'s>,
    b: &Element<'s>,
    c: &Element<'s>,
) -> Result<Element<'s>> {
    a.same_system(b)?;
    a.same_system(c)?;
    let p = &a.system.product;
    let t1 = p.eval(&a.coords, &b.coords, &c.coords);
    let t2 = p.eval(&c.coords, &a.coords, &b.coords);
    let t3 = p.eval(&b.coords, &c.coords, &a.coords);
    Ok(a.wrap(
        t1.iter()
            .zip(&t2)
            .zip(&t3)
            .map(|((x, y), z)| (x + y + z) / 3.0)
            .collect(),
    ))
}

/// `L(a,b) : x ↦ {a,b,x}`.
pub fn l_operator(a: &Element<'_>, b: &Element<'_>) -> Result<LinearMap> {
    a.same_system(b)?;
    Ok(a.system.l_coords(&a.coords, &b.coords))
}

/// `Q(a) : x ↦ {a,x,a}`.
pub fn q_operator(a: &Element<'_>) -> LinearMap {
    a.system.q_coords(&a.coords)
}

/// `T(x)` as an element of the same system.
pub fn apply_map<'s>(t: &LinearMap, x: &Element<'s>) -> Result<Element<'s>> {
    if t.dim() != x.system.dim() {
        return Err(TripleError::SystemMismatch);
    }
    Ok(x.wrap(t.apply(&x.coords)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ℝ with `{x,y,z} = xyz`.
    fn line() -> TripleSystem {
        TripleSystem::new("R", 1, vec![1.0], NormKind::Operator, Some(1), None, "custom").unwrap()
    }

    #[test]
    fn rejects_asymmetric_tensor() {
        // c(0,0,1,0) = 1 but c(1,0,0,0) = 0.
        let mut t = vec![0.0; 16];
        t[0b0010] = 1.0;
        let err = TripleSystem::new("bad", 2, t, NormKind::Operator, None, None, "custom");
        assert!(matches!(err, Err(TripleError::InvalidInput(_))));
    }

    #[test]
    fn rejects_bad_complex_structure() {
        let j = LinearMap::identity(1);
        let err = TripleSystem::new("bad", 1, vec![1.0], NormKind::Operator, None, Some(j), "custom");
        assert!(err.is_err());
    }

    #[test]
    fn mixed_systems_are_rejected() {
        let a = line();
        let b = line();
        let x = a.basis_element(0);
        let y = b.basis_element(0);
        assert!(matches!(triple_product(&x, &y, &x), Err(TripleError::SystemMismatch)));
        assert!(matches!(l_operator(&x, &y), Err(TripleError::SystemMismatch)));
    }

    #[test]
    fn cube_on_the_line() {
        let s = line();
        let x = s.element(vec![2.0]).unwrap();
        let c = triple_product(&x, &x, &x).unwrap();
        assert_eq!(c.coords(), &[8.0]);
        let sym = symmetrized_product(&x, &x, &x).unwrap();
        assert_eq!(sym.coords(), &[8.0]);
        assert_eq!(q_operator(&s.zero_element()).entries(), &[0.0]);
    }

    #[test]
    fn linear_map_from_images_matches_apply() {
        let m = LinearMap::from_images(2, &[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(m.apply(&[1.0, 0.0]), vec![1.0, 2.0]);
        assert_eq!(m.apply(&[0.0, 1.0]), vec![3.0, 4.0]);
        assert!(LinearMap::new(2, vec![0.0; 3]).is_err());
    }
}
