//! Derivation spaces of the triple and symmetrized products, inner
//! derivations, and the pointwise (local) derivation tests built on them.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TripleError};
use crate::factors::{complexify, extend_map_complex};
use crate::numerics::{expm, range_basis, DenseMatrix, RowAccumulator, DEFAULT_RANK_TOL};
use crate::report::{Report, Witness};
use crate::sampling::{gaussian_vec, rng};
use crate::structure::peirce;
use crate::triple::{
    dot, euclidean_norm, Element, LinearMap, ProductKind, Trilinear, TripleSystem, ALGEBRAIC_TOL,
    MAX_DIM, SPECTRAL_TOL,
};

/// Pointwise least-squares checks pass at this residual.
pub const LOCAL_TOL: f64 = 1e-8;

/// Automorphism residual bound factor for exponential flows.
pub const FLOW_TOL: f64 = 1e-7;

/// Default number of random points for local-derivation checks.
pub const DEFAULT_LOCAL_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivationKind {
    /// Leibniz rule for the triple product.
    Triple,
    /// Leibniz rule for the symmetrized product.
    Symmetrized,
    /// Span of the inner derivations `δ(e_i, e_j)`.
    InnerSpan,
}

impl DerivationKind {
    fn product_kind(self) -> ProductKind {
        match self {
            DerivationKind::Symmetrized => ProductKind::Symmetrized,
            _ => ProductKind::Triple,
        }
    }
}

impl fmt::Display for DerivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivationKind::Triple => "triple",
            DerivationKind::Symmetrized => "symmetrized",
            DerivationKind::InnerSpan => "inner_span",
        })
    }
}

impl FromStr for DerivationKind {
    type Err = TripleError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triple" => Ok(DerivationKind::Triple),
            "symmetrized" => Ok(DerivationKind::Symmetrized),
            "inner" | "inner_span" => Ok(DerivationKind::InnerSpan),
            other => Err(TripleError::InvalidInput(format!("unknown derivation kind {other:?}"))),
        }
    }
}

/// Frobenius-orthonormal basis of a space of linear maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationSpace {
    pub kind: DerivationKind,
    pub system_dim: usize,
    pub dimension: usize,
    pub tol: f64,
    pub basis: Vec<LinearMap>,
}

impl DerivationSpace {
    fn from_columns(kind: DerivationKind, n: usize, tol: f64, cols: &DenseMatrix) -> Self {
        let basis: Vec<LinearMap> = cols
            .columns()
            .into_iter()
            .map(|c| LinearMap::new(n, c).expect("finite basis"))
            .collect();
        Self {
            kind,
            system_dim: n,
            dimension: basis.len(),
            tol,
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection onto the space.
    pub fn project(&self, t: &LinearMap) -> LinearMap {
        let n = self.system_dim;
        self.basis
            .iter()
            .fold(LinearMap::zero(n), |acc, d| acc.add(&d.scale(d.frobenius_dot(t))))
    }

    /// Frobenius distance of `t` from the space.
    pub fn distance(&self, t: &LinearMap) -> f64 {
        t.sub(&self.project(t)).frobenius_norm()
    }

    /// Largest distance of a basis member of `self` from `other`.
    pub fn containment_residual(&self, other: &DerivationSpace) -> f64 {
        self.basis
            .iter()
            .map(|d| other.distance(d))
            .fold(0.0, f64::max)
    }

    /// Random member with standard Gaussian coefficients.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> LinearMap {
        let c = gaussian_vec(rng, self.basis.len());
        self.basis
            .iter()
            .zip(&c)
            .fold(LinearMap::zero(self.system_dim), |acc, (d, ci)| acc.add(&d.scale(*ci)))
    }

    /// Largest `‖DJ − JD‖` over unit-Frobenius-norm members.
    pub fn max_commutator(&self, j: &LinearMap) -> f64 {
        if self.basis.is_empty() {
            return 0.0;
        }
        let cols: Vec<Vec<f64>> = self
            .basis
            .iter()
            .map(|d| d.compose(j).sub(&j.compose(d)).entries().to_vec())
            .collect();
        let m = DenseMatrix::from_columns(self.system_dim.pow(2), &cols);
        crate::numerics::singular_values(&m).first().copied().unwrap_or(0.0)
    }
}

/// Triples `(i, j, k)` whose Leibniz equations determine the whole system:
/// `i ≤ k` for the triple product, `i ≤ j ≤ k` for the fully symmetric one.
fn leibniz_triples(n: usize, kind: ProductKind) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in i..n {
                if kind == ProductKind::Symmetrized && !(i <= j && j <= k) {
                    continue;
                }
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Leibniz rows for one basis triple: coefficient of unknown `T[a][b]`
/// (column `a·n + b`) in output coordinate `l` of
/// `T{e_i,e_j,e_k} − {Te_i,e_j,e_k} − {e_i,Te_j,e_k} − {e_i,e_j,Te_k}`.
fn leibniz_rows(p: &Trilinear, i: usize, j: usize, k: usize) -> Vec<Vec<f64>> {
    let n = p.dim();
    let mut rows = vec![vec![0.0; n * n]; n];
    let ijk = p.basis_product(i, j, k);
    for (l, row) in rows.iter_mut().enumerate() {
        for m in 0..n {
            row[l * n + m] += ijk[m];
            row[m * n + i] -= p.coeff(m, j, k, l);
            row[m * n + j] -= p.coeff(i, m, k, l);
            row[m * n + k] -= p.coeff(i, j, m, l);
        }
    }
    rows
}

/// Derivation space of `kind`. The Leibniz system is assembled over basis
/// triples in fixed-size groups, each group compressed to a triangular factor
/// in parallel, and the factors merged in index order, so the result does not
/// depend on the number of threads.
pub fn derivation_space(system: &TripleSystem, kind: DerivationKind) -> Result<DerivationSpace> {
    derivation_space_with_tol(system, kind, DEFAULT_RANK_TOL)
}

pub fn derivation_space_with_tol(
    system: &TripleSystem,
    kind: DerivationKind,
    tol: f64,
) -> Result<DerivationSpace> {
    let n = system.dim();
    if n > MAX_DIM {
        return Err(TripleError::TooLarge { dim: n, cap: MAX_DIM });
    }
    if kind == DerivationKind::InnerSpan {
        return inner_span(system, tol);
    }
    if n == 0 {
        return Ok(DerivationSpace {
            kind,
            system_dim: 0,
            dimension: 0,
            tol,
            basis: vec![],
        });
    }
    let pk = kind.product_kind();
    let p = system.trilinear(pk);
    let scale = p.tensor().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let cols = n * n;
    let triples = leibniz_triples(n, pk);
    let per_group = ((4 * cols).max(256) / n).max(1);
    let factors: Vec<nalgebra::DMatrix<f64>> = triples
        .par_chunks(per_group)
        .map(|group| {
            let mut acc = RowAccumulator::new(cols);
            for &(i, j, k) in group {
                for row in leibniz_rows(&p, i, j, k) {
                    let norm = euclidean_norm(&row);
                    // Rows that vanish up to rounding carry no constraint.
                    if norm <= floor {
                        continue;
                    }
                    let scaled: Vec<f64> = row.iter().map(|v| v / norm).collect();
                    acc.push_row(&scaled);
                }
            }
            acc.finish()
        })
        .collect();
    let mut acc = RowAccumulator::new(cols);
    for r in &factors {
        for i in 0..r.nrows() {
            let row: Vec<f64> = r.row(i).iter().copied().collect();
            acc.push_row(&row);
        }
    }
    let null = acc.null_space(tol)?;
    Ok(DerivationSpace::from_columns(kind, n, tol, &null))
}

fn inner_span(system: &TripleSystem, tol: f64) -> Result<DerivationSpace> {
    let n = system.dim();
    let mut cols = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = system.basis_element(i);
            let b = system.basis_element(j);
            cols.push(inner_derivation(&a, &b)?.entries().to_vec());
        }
    }
    let basis = if cols.is_empty() {
        DenseMatrix::zeros(n * n, 0)
    } else {
        range_basis(&DenseMatrix::from_columns(n * n, &cols), tol)?
    };
    Ok(DerivationSpace::from_columns(
        DerivationKind::InnerSpan,
        n,
        tol,
        &basis,
    ))
}

/// `δ(a,b) = L(a,b) − L(b,a)`.
pub fn inner_derivation(a: &Element<'_>, b: &Element<'_>) -> Result<LinearMap> {
    let lab = crate::triple::l_operator(a, b)?;
    let lba = crate::triple::l_operator(b, a)?;
    Ok(lab.sub(&lba))
}

/// `T P(x,y,z) − P(Tx,y,z) − P(x,Ty,z) − P(x,y,Tz)` for the product of `kind`.
pub fn leibniz_defect(
    system: &TripleSystem,
    t: &LinearMap,
    kind: ProductKind,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Vec<f64> {
    let p = system.trilinear(kind);
    leibniz_defect_with(&p, t, x, y, z)
}

fn leibniz_defect_with(p: &Trilinear, t: &LinearMap, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let lhs = t.apply(&p.eval(x, y, z));
    let a = p.eval(&t.apply(x), y, z);
    let b = p.eval(x, &t.apply(y), z);
    let c = p.eval(x, y, &t.apply(z));
    (0..p.dim())
        .map(|l| lhs[l] - a[l] - b[l] - c[l])
        .collect()
}

fn check_map_dim(system: &TripleSystem, t: &LinearMap) -> Result<()> {
    if t.dim() != system.dim() {
        return Err(TripleError::InvalidInput(format!(
            "map of dimension {} on a {}-dimensional system",
            t.dim(),
            system.dim()
        )));
    }
    Ok(())
}

/// Largest Leibniz residual over basis triples; passes iff `≤ tol`. A failing
/// report names the worst basis triple.
pub fn is_derivation(
    system: &TripleSystem,
    t: &LinearMap,
    kind: ProductKind,
    tol: f64,
) -> Result<Report> {
    check_map_dim(system, t)?;
    let n = system.dim();
    let p = system.trilinear(kind);
    let id = match kind {
        ProductKind::Triple => "is-derivation/triple",
        ProductKind::Symmetrized => "is-derivation/symmetrized",
    };
    let worst = leibniz_triples(n, kind)
        .into_par_iter()
        .map(|(i, j, k)| {
            let rows = leibniz_rows(&p, i, j, k);
            let r: f64 = rows
                .iter()
                .map(|row| dot(row, t.entries()).powi(2))
                .sum::<f64>()
                .sqrt();
            (r, (i, j, k))
        })
        .reduce(
            || (0.0, (0, 0, 0)),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let mut report = Report::new(id);
    report.require_below("max_residual", worst.0, tol);
    if !report.passed() {
        let (i, j, k) = worst.1;
        report.witness(Witness::Indices {
            label: "basis (x,y,z)".into(),
            indices: vec![i, j, k],
        });
    }
    Ok(report)
}

/// Canonical basis followed by `samples` seeded Gaussian points.
pub fn local_points(system: &TripleSystem, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = system.dim();
    let mut pts: Vec<Vec<f64>> = (0..n).map(|i| system.basis_element(i).into_coords()).collect();
    let mut r = rng(seed);
    pts.extend((0..samples).map(|_| gaussian_vec(&mut r, n)));
    pts
}

/// `min_{D ∈ der} ‖D(a) − T(a)‖`.
pub fn pointwise_residual(der: &DerivationSpace, t: &LinearMap, a: &[f64]) -> Result<f64> {
    let n = der.system_dim;
    let ta = t.apply(a);
    if der.basis.is_empty() {
        return Ok(euclidean_norm(&ta));
    }
    let cols: Vec<Vec<f64>> = der.basis.iter().map(|d| d.apply(a)).collect();
    let q = range_basis(&DenseMatrix::from_columns(n, &cols), 1e-10)?;
    let mut r = ta;
    for c in q.columns() {
        let k = dot(&r, &c);
        r.iter_mut().zip(&c).for_each(|(x, y)| *x -= k * y);
    }
    Ok(euclidean_norm(&r))
}

/// For each point `a`, the distance from `T(a)` to `{D(a) : D ∈ der}`. Passes
/// iff the maximum is `≤ tol`. A pass on sampled points is evidence; a fail
/// is a refutation.
pub fn local_derivation_residual(
    der: &DerivationSpace,
    t: &LinearMap,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<Report> {
    if points.is_empty() {
        return Err(TripleError::InvalidInput("no points to check".into()));
    }
    if t.dim() != der.system_dim {
        return Err(TripleError::InvalidInput("map and derivation space differ in dimension".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != der.system_dim) {
        return Err(TripleError::InvalidInput(format!(
            "point with {} coordinates in a {}-dimensional system",
            p.len(),
            der.system_dim
        )));
    }
    let residuals: Vec<f64> = points
        .par_iter()
        .map(|a| pointwise_residual(der, t, a))
        .collect::<Result<_>>()?;
    let (worst_idx, worst) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let mut report = Report::new("local-derivation");
    report.require_below("max_residual", worst, tol);
    report.residual("points", points.len() as f64);
    if !report.passed() {
        report.witness(Witness::Element {
            label: "worst point".into(),
            coords: points[worst_idx].clone(),
        });
    }
    Ok(report)
}

/// Norm of `x` in a rank-one system, read from `{x,x,x} = ‖x‖²x`.
fn rank_one_norm(system: &TripleSystem, x: &[f64]) -> f64 {
    let e = euclidean_norm(x);
    (euclidean_norm(&system.cube_coords(x)) / e).sqrt()
}

/// `δ = (1/(2‖x‖)) δ(T(x) + 3P₁(u)T(x), u)` with `u = x/‖x‖`, an inner
/// derivation agreeing with `T` at `x` whenever `T` is a symmetrized
/// derivation of a rank-one system.
pub fn rank_one_local_witness(system: &TripleSystem, t: &LinearMap, x: &[f64]) -> Result<LinearMap> {
    check_map_dim(system, t)?;
    if system.rank_hint() != Some(1) {
        return Err(TripleError::Unsupported(format!(
            "{} does not have rank one",
            system.name()
        )));
    }
    if x.len() != system.dim() || euclidean_norm(x) == 0.0 {
        return Err(TripleError::InvalidInput("x must be a nonzero element of the system".into()));
    }
    let nx = rank_one_norm(system, x);
    let u = system.element(x.iter().map(|v| v / nx).collect())?;
    let ps = peirce(&u)?;
    let tx = t.apply(x);
    let p1 = ps.projection(1).apply(&tx);
    let a: Vec<f64> = tx.iter().zip(&p1).map(|(v, w)| v + 3.0 * w).collect();
    let a = system.element(a)?;
    Ok(inner_derivation(&a, &u)?.scale(1.0 / (2.0 * nx)))
}

/// Checks that each basis member of `der` commutes with the system's complex
/// structure to `1e-8`, and records the largest commutator over the space.
pub fn check_complex_linearity(system: &TripleSystem, der: &DerivationSpace) -> Result<Report> {
    let j = system.complex_structure().ok_or_else(|| {
        TripleError::Unsupported(format!("{} carries no complex structure", system.name()))
    })?;
    let mut worst = 0.0f64;
    let mut worst_map = None;
    for d in &der.basis {
        let c = d.compose(j).sub(&j.compose(d)).frobenius_norm();
        if c > worst {
            worst = c;
            worst_map = Some(d);
        }
    }
    let mut report = Report::new(format!("complex-linearity/{}", der.kind));
    report.require_below("max_basis_commutator", worst, SPECTRAL_TOL);
    report.residual("max_commutator_over_space", der.max_commutator(j));
    report.residual("dimension", der.dim() as f64);
    if !report.passed() {
        if let Some(d) = worst_map {
            report.witness(Witness::Map {
                label: "basis member not commuting with J".into(),
                dim: d.dim(),
                entries: d.entries().to_vec(),
            });
        }
    }
    Ok(report)
}

/// For each `t`, `g = exp(tT)` and the largest `‖g P(x,y,z) − P(gx,gy,gz)‖`
/// over basis triples; each must stay below `1e-7·(1 + ‖g‖³)`.
pub fn exp_flow_check(
    system: &TripleSystem,
    t: &LinearMap,
    kind: ProductKind,
    t_grid: &[f64],
) -> Result<Report> {
    check_map_dim(system, t)?;
    let n = system.dim();
    let p = system.trilinear(kind);
    let mut report = Report::new(format!(
        "exp-flow/{}",
        match kind {
            ProductKind::Triple => "triple",
            ProductKind::Symmetrized => "symmetrized",
        }
    ));
    for &time in t_grid {
        let g = LinearMap::from_matrix(&expm(&t.scale(time).to_matrix())?)?;
        let gn = g.to_matrix().spectral_norm();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|l| g.get(l, i)).collect())
            .collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in i..n {
                    let lhs = g.apply(p.basis_product(i, j, k));
                    let rhs = p.eval(&cols[i], &cols[j], &cols[k]);
                    let d: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum();
                    worst = worst.max(d.sqrt());
                }
            }
        }
        report.require_below(format!("t={time}"), worst, FLOW_TOL * (1.0 + gn.powi(3)));
    }
    if !report.passed() {
        report.witness(Witness::Map {
            label: "generator".into(),
            dim: n,
            entries: t.entries().to_vec(),
        });
    }
    Ok(report)
}

/// Inner derivations span all triple derivations: mutual containment of the
/// two spaces to `1e-8` and equal dimensions.
pub fn check_iap_finite(system: &TripleSystem) -> Result<Report> {
    let inner = derivation_space(system, DerivationKind::InnerSpan)?;
    let der = derivation_space(system, DerivationKind::Triple)?;
    let mut report = Report::new("inner-approximation");
    report.residual("dim_inner_span", inner.dim() as f64);
    report.residual("dim_triple", der.dim() as f64);
    report.require_below("inner_in_triple", inner.containment_residual(&der), LOCAL_TOL);
    report.require_below("triple_in_inner", der.containment_residual(&inner), LOCAL_TOL);
    report.require(
        "dimension_gap",
        der.dim() as f64 - inner.dim() as f64,
        der.dim() == inner.dim(),
    );
    Ok(report)
}

/// Extends `T` from the real system `S` to `T̃` on its complexification and
/// reports whether `T̃` passes the local test and the Leibniz rule there.
/// A complex structure already on `S` is dropped first, so `S` is always
/// treated as a real triple. The report records outcomes only; it is
/// advisory and does not assert any hypothesis on `T`.
pub fn two_local_lift(
    system: &TripleSystem,
    t: &LinearMap,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    check_map_dim(system, t)?;
    let real = if system.complex_structure().is_some() {
        system.without_complex_structure()
    } else {
        system.clone()
    };
    let c = complexify(&real)?;
    let tt = extend_map_complex(t);
    let der = derivation_space(&c, DerivationKind::Triple)?;
    let local = local_derivation_residual(&der, &tt, &local_points(&c, samples, seed), LOCAL_TOL)?;
    let deriv = is_derivation(&c, &tt, ProductKind::Triple, ALGEBRAIC_TOL)?;
    let mut report = Report::new("two-local-lift").with_seed(seed);
    report.residual("local_max_residual", local.residuals["max_residual"]);
    report.residual("leibniz_max_residual", deriv.residuals["max_residual"]);
    report.residual("commutator_with_j", {
        let j = c.complex_structure().expect("complexification carries J");
        tt.compose(j).sub(&j.compose(&tt)).frobenius_norm()
    });
    report.note(format!(
        "extension is {}a local derivation on the sample and {}a derivation",
        if local.passed() { "" } else { "not " },
        if deriv.passed() { "" } else { "not " }
    ));
    report.mark_advisory();
    Ok(report)
}
