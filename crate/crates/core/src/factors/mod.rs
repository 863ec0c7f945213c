//! Constructors for real and complex Cartan factors (all viewed as real
//! triples), complexification and finite direct sums.
//!
//! Kinds and their real forms:
//!
//! | kind           | space                                   |
//! |----------------|-----------------------------------------|
//! | `I_R(m,n)`     | real `m×n` matrices                      |
//! | `I_C(m,n)`     | complex `m×n` matrices (carries `J`)     |
//! | `I_H(m,n)`     | quaternionic `m×n` matrices              |
//! | `II_C(n)`      | complex hermitian `n×n` matrices         |
//! | `II_R(n)`      | real skew-symmetric `n×n` matrices       |
//! | `II_H(n)`      | quaternionic hermitian `n×n` matrices    |
//! | `III_R(n)`     | real symmetric `n×n` matrices            |
//! | `III_H(n)`     | quaternionic skew-hermitian `n×n`        |
//! | `SPIN_R(r,s)`  | real spin factor on `ℝʳ ⊕ ℝˢ`            |
//! | `SPIN_C(n)`    | complex spin factor `ℂⁿ` (carries `J`)   |
//!
//! `II_C` here is the hermitian real form, not the classical complex
//! antisymmetric type II factor; hermitian matrices are not closed under
//! multiplication by `i`, so no complex structure is attached to it.
//!
//! Basis ordering is fixed: matrix entries row-major (upper triangle only for
//! the square symmetric kinds), and within an entry the real components in
//! the order `1, i, j, k`. Spin factors list `X₁` before `X₂`; the complex
//! spin factor interleaves `(re, im)` per coordinate.

mod matrix;
mod quaternion;
mod scalar;
mod spin;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, TripleError};
use crate::numerics::DenseMatrix;
use crate::triple::{LinearMap, NormKind, Trilinear, TripleSystem, MAX_DIM};

use matrix::{MatrixModel, Symmetry};
use spin::{ComplexSpin, RealSpin};

pub use quaternion::Quaternion;

/// Concrete model of a factor, evaluated in its native arithmetic.
pub(crate) trait FactorModel: Sync {
    fn dim(&self) -> usize;
    fn product(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64>;
    fn norm(&self, x: &[f64]) -> f64;
    fn tripotents(&self) -> Vec<(String, Vec<f64>)>;
    fn complex_structure(&self) -> Option<LinearMap> {
        None
    }
    fn real_matrix(&self, _x: &[f64]) -> Option<DenseMatrix> {
        None
    }
    fn from_real_matrix(&self, _m: &DenseMatrix) -> Option<Vec<f64>> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorSpec {
    IR { m: usize, n: usize },
    IC { m: usize, n: usize },
    IH { m: usize, n: usize },
    IIC(usize),
    IIR(usize),
    IIH(usize),
    IIIR(usize),
    IIIH(usize),
    SpinR { r: usize, s: usize },
    SpinC(usize),
}

impl FactorSpec {
    /// Parses a kind label (`I_R`, `SPIN_C`, ...) with its dimension list.
    pub fn from_kind_dims(kind: &str, dims: &[usize]) -> Result<Self> {
        let two = || -> Result<(usize, usize)> {
            match dims {
                [a, b] => Ok((*a, *b)),
                _ => Err(TripleError::InvalidSpec(format!("{kind} needs two dimensions"))),
            }
        };
        let one = || -> Result<usize> {
            match dims {
                [a] => Ok(*a),
                _ => Err(TripleError::InvalidSpec(format!("{kind} needs one dimension"))),
            }
        };
        let spec = match kind {
            "I_R" => two().map(|(m, n)| FactorSpec::IR { m, n })?,
            "I_C" => two().map(|(m, n)| FactorSpec::IC { m, n })?,
            "I_H" => two().map(|(m, n)| FactorSpec::IH { m, n })?,
            "II_C" => FactorSpec::IIC(one()?),
            "II_R" => FactorSpec::IIR(one()?),
            "II_H" => FactorSpec::IIH(one()?),
            "III_R" => FactorSpec::IIIR(one()?),
            "III_H" => FactorSpec::IIIH(one()?),
            "SPIN_R" => two().map(|(r, s)| FactorSpec::SpinR { r, s })?,
            "SPIN_C" => FactorSpec::SpinC(one()?),
            other => return Err(TripleError::InvalidSpec(format!("unknown factor kind {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(TripleError::InvalidSpec(msg));
        match *self {
            FactorSpec::IR { m, n } | FactorSpec::IC { m, n } | FactorSpec::IH { m, n } => {
                if m == 0 || n == 0 {
                    return bad(format!("{self}: dimensions must be positive"));
                }
            }
            FactorSpec::IIC(n)
            | FactorSpec::IIR(n)
            | FactorSpec::IIH(n)
            | FactorSpec::IIIR(n)
            | FactorSpec::IIIH(n) => {
                if n == 0 {
                    return bad(format!("{self}: dimension must be positive"));
                }
                if matches!(self, FactorSpec::IIR(1)) {
                    return bad("II_R(1) is the zero space".into());
                }
            }
            FactorSpec::SpinR { r, s } => {
                if r == 0 {
                    return bad(format!("{self}: X1 must be non-trivial"));
                }
                if r + s < 2 {
                    return bad(format!("{self}: spin factors need dimension at least 2"));
                }
                if r + s == 2 {
                    log::warn!("{self}: spin factor of dimension 2 is below the usual bound of 3");
                }
            }
            FactorSpec::SpinC(n) => {
                if n < 2 {
                    return bad(format!("{self}: spin factors need dimension at least 2"));
                }
                if n == 2 {
                    log::warn!("{self}: spin factor of dimension 2 is below the usual bound of 3");
                }
            }
        }
        if self.dim() > MAX_DIM {
            return Err(TripleError::TooLarge {
                dim: self.dim(),
                cap: MAX_DIM,
            });
        }
        Ok(())
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        match *self {
            FactorSpec::IR { m, n } => m * n,
            FactorSpec::IC { m, n } => 2 * m * n,
            FactorSpec::IH { m, n } => 4 * m * n,
            FactorSpec::IIC(n) => n * n,
            FactorSpec::IIR(n) => n * (n - 1) / 2,
            FactorSpec::IIH(n) => n + 2 * n * (n - 1),
            FactorSpec::IIIR(n) => n * (n + 1) / 2,
            FactorSpec::IIIH(n) => 3 * n + 2 * n * (n - 1),
            FactorSpec::SpinR { r, s } => r + s,
            FactorSpec::SpinC(n) => 2 * n,
        }
    }

    /// Rank of the factor (maximal size of an orthogonal family).
    pub fn rank(&self) -> usize {
        match *self {
            FactorSpec::IR { m, n } | FactorSpec::IC { m, n } | FactorSpec::IH { m, n } => m.min(n),
            FactorSpec::IIR(n) => n / 2,
            FactorSpec::IIC(n) | FactorSpec::IIH(n) | FactorSpec::IIIR(n) | FactorSpec::IIIH(n) => n,
            FactorSpec::SpinR { s: 0, .. } => 1,
            FactorSpec::SpinR { .. } | FactorSpec::SpinC(_) => 2,
        }
    }

    pub fn norm_kind(&self) -> NormKind {
        match self {
            FactorSpec::SpinR { s: 0, .. } => NormKind::Hilbert,
            FactorSpec::SpinR { .. } | FactorSpec::SpinC(_) => NormKind::Spin,
            _ => NormKind::Operator,
        }
    }

    /// Rank-one complex or quaternionic rectangular factors of dimension
    /// above one field unit (`I_C(n,1)`, `I_H(n,1)` with `n ≥ 2`, and their
    /// transposes). These are the factors carrying symmetrized derivations
    /// that are not triple derivations.
    pub fn is_exceptional_rank_one(&self) -> bool {
        match *self {
            FactorSpec::IC { m, n } | FactorSpec::IH { m, n } => m.min(n) == 1 && m.max(n) >= 2,
            _ => false,
        }
    }

    pub fn has_complex_structure(&self) -> bool {
        matches!(self, FactorSpec::IC { .. } | FactorSpec::SpinC(_))
    }

    pub(crate) fn model(&self) -> Box<dyn FactorModel> {
        use Symmetry::*;
        match *self {
            FactorSpec::IR { m, n } => Box::new(MatrixModel::<f64>::new(m, n, General)),
            FactorSpec::IC { m, n } => Box::new(MatrixModel::<Complex64>::new(m, n, General)),
            FactorSpec::IH { m, n } => Box::new(MatrixModel::<Quaternion>::new(m, n, General)),
            FactorSpec::IIC(n) => Box::new(MatrixModel::<Complex64>::new(n, n, Hermitian)),
            FactorSpec::IIR(n) => Box::new(MatrixModel::<f64>::new(n, n, SkewHermitian)),
            FactorSpec::IIH(n) => Box::new(MatrixModel::<Quaternion>::new(n, n, Hermitian)),
            FactorSpec::IIIR(n) => Box::new(MatrixModel::<f64>::new(n, n, Hermitian)),
            FactorSpec::IIIH(n) => Box::new(MatrixModel::<Quaternion>::new(n, n, SkewHermitian)),
            FactorSpec::SpinR { r, s } => Box::new(RealSpin { r, s }),
            FactorSpec::SpinC(n) => Box::new(ComplexSpin { n }),
        }
    }

    /// Real representation matrix of an element (matrix kinds only): each
    /// complex or quaternionic entry becomes its left-multiplication block.
    pub fn real_representation(&self, coords: &[f64]) -> Option<DenseMatrix> {
        self.model().real_matrix(coords)
    }

    /// Inverse of [`FactorSpec::real_representation`]: reads the entries
    /// back from the first column of each block.
    pub fn from_real_representation(&self, m: &DenseMatrix) -> Option<Vec<f64>> {
        self.model().from_real_matrix(m)
    }

    /// Constructor-supplied tripotents with labels.
    pub fn tripotents(&self) -> Vec<(String, Vec<f64>)> {
        self.model().tripotents()
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorSpec::IR { m, n } => write!(f, "I_R({m},{n})"),
            FactorSpec::IC { m, n } => write!(f, "I_C({m},{n})"),
            FactorSpec::IH { m, n } => write!(f, "I_H({m},{n})"),
            FactorSpec::IIC(n) => write!(f, "II_C({n})"),
            FactorSpec::IIR(n) => write!(f, "II_R({n})"),
            FactorSpec::IIH(n) => write!(f, "II_H({n})"),
            FactorSpec::IIIR(n) => write!(f, "III_R({n})"),
            FactorSpec::IIIH(n) => write!(f, "III_H({n})"),
            FactorSpec::SpinR { r, s } => write!(f, "SPIN_R({r},{s})"),
            FactorSpec::SpinC(n) => write!(f, "SPIN_C({n})"),
        }
    }
}

impl FromStr for FactorSpec {
    type Err = TripleError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once('(')
            .ok_or_else(|| TripleError::InvalidSpec(format!("expected KIND(dims), got {s:?}")))?;
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| TripleError::InvalidSpec(format!("unbalanced parentheses in {s:?}")))?;
        let dims = inner
            .split(',')
            .map(|d| {
                d.trim()
                    .parse::<usize>()
                    .map_err(|e| TripleError::InvalidSpec(format!("bad dimension {d:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FactorSpec::from_kind_dims(kind.trim(), &dims)
    }
}

impl Serialize for FactorSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FactorSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Classification tag stored in `factor_kind`: a single factor, a direct sum
/// `SUM(k1,k2,...)`, or an unclassified system (`custom`, or `custom:N`
/// inside a sum so block sizes stay recoverable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorKind {
    Factor(FactorSpec),
    Sum(Vec<FactorKind>),
    Custom(Option<usize>),
}

impl FactorKind {
    pub fn dim(&self) -> Option<usize> {
        match self {
            FactorKind::Factor(s) => Some(s.dim()),
            FactorKind::Sum(parts) => parts.iter().map(FactorKind::dim).sum(),
            FactorKind::Custom(d) => *d,
        }
    }

    fn of_system(system: &TripleSystem) -> FactorKind {
        match system.factor_kind().parse::<FactorKind>() {
            Ok(FactorKind::Custom(_)) | Err(_) => FactorKind::Custom(Some(system.dim())),
            Ok(k) if k.dim() == Some(system.dim()) => k,
            Ok(_) => FactorKind::Custom(Some(system.dim())),
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::Factor(s) => write!(f, "{s}"),
            FactorKind::Sum(parts) => {
                f.write_str("SUM(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            FactorKind::Custom(None) => f.write_str("custom"),
            FactorKind::Custom(Some(d)) => write!(f, "custom:{d}"),
        }
    }
}

impl FromStr for FactorKind {
    type Err = TripleError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "custom" {
            return Ok(FactorKind::Custom(None));
        }
        if let Some(d) = s.strip_prefix("custom:") {
            let d = d
                .parse()
                .map_err(|e| TripleError::InvalidSpec(format!("bad custom dimension: {e}")))?;
            return Ok(FactorKind::Custom(Some(d)));
        }
        if let Some(inner) = s.strip_prefix("SUM(").and_then(|r| r.strip_suffix(')')) {
            let mut parts = Vec::new();
            let mut depth = 0usize;
            let mut start = 0usize;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        parts.push(inner[start..i].parse()?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            parts.push(inner[start..].parse()?);
            return Ok(FactorKind::Sum(parts));
        }
        Ok(FactorKind::Factor(s.parse()?))
    }
}

/// One summand of a (possibly trivial) direct sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub offset: usize,
    pub dim: usize,
    pub kind: FactorKind,
}

/// Block decomposition recorded in the system's `factor_kind`. A system that
/// is not a direct sum is a single block.
pub fn blocks(system: &TripleSystem) -> Vec<Block> {
    let kind = FactorKind::of_system(system);
    match kind {
        FactorKind::Sum(parts) => {
            let mut offset = 0;
            parts
                .into_iter()
                .map(|k| {
                    let dim = k.dim().expect("sum summands carry dimensions");
                    let b = Block {
                        offset,
                        dim,
                        kind: k,
                    };
                    offset += dim;
                    b
                })
                .collect()
        }
        k => vec![Block {
            offset: 0,
            dim: system.dim(),
            kind: k,
        }],
    }
}

pub fn build_factor(spec: FactorSpec) -> Result<TripleSystem> {
    spec.validate()?;
    let model = spec.model();
    let n = model.dim();
    let product = Trilinear::from_basis_fn(n, |i, j, k| {
        model.product(&unit(n, i), &unit(n, j), &unit(n, k))
    });
    Ok(TripleSystem::from_trilinear(
        spec.to_string(),
        product,
        spec.norm_kind(),
        Some(spec.rank()),
        model.complex_structure(),
        spec.to_string(),
    ))
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn kind_norm(kind: &FactorKind, x: &[f64]) -> Option<f64> {
    match kind {
        FactorKind::Factor(spec) => Some(spec.model().norm(x)),
        FactorKind::Sum(parts) => {
            let mut offset = 0;
            let mut best = 0.0f64;
            for p in parts {
                let d = p.dim()?;
                best = best.max(kind_norm(p, &x[offset..offset + d])?);
                offset += d;
            }
            Some(best)
        }
        FactorKind::Custom(_) => None,
    }
}

/// Norm of `x` in the system's own norm: operator norm for matrix kinds,
/// the spin norm for spin kinds, Euclidean for Hilbert kinds, and the max
/// over summands for direct sums.
pub fn system_norm(system: &TripleSystem, x: &[f64]) -> Result<f64> {
    if x.len() != system.dim() {
        return Err(TripleError::InvalidInput("coordinate length mismatch".into()));
    }
    if system.norm_kind() == NormKind::Hilbert {
        return Ok(crate::triple::euclidean_norm(x));
    }
    kind_norm(&FactorKind::of_system(system), x).ok_or_else(|| {
        TripleError::Unsupported(format!(
            "no {} norm is known for {} ({})",
            system.norm_kind(),
            system.name(),
            system.factor_kind()
        ))
    })
}

/// Tripotents supplied by the factor constructors, embedded blockwise for
/// direct sums. Unclassified systems have none.
pub fn canonical_tripotents(system: &TripleSystem) -> Vec<(String, Vec<f64>)> {
    let n = system.dim();
    let mut out = Vec::new();
    for block in blocks(system) {
        if let FactorKind::Factor(spec) = &block.kind {
            for (label, t) in spec.tripotents() {
                let mut v = vec![0.0; n];
                v[block.offset..block.offset + block.dim].copy_from_slice(&t);
                let label = if block.offset == 0 && block.dim == n {
                    label
                } else {
                    format!("{spec}:{label}")
                };
                out.push((label, v));
            }
        }
    }
    out
}

/// Complexification `S ⊗ ℂ` with interleaved coordinates: `2i` is `e_i`,
/// `2i + 1` is `i·e_i`. The product is complex-linear in the outer slots and
/// conjugate-linear in the middle one, and restricts to `S` on real parts.
pub fn complexify(system: &TripleSystem) -> Result<TripleSystem> {
    if system.complex_structure().is_some() {
        return Err(TripleError::InvalidInput(format!(
            "{} already carries a complex structure",
            system.name()
        )));
    }
    let n = system.dim();
    if 2 * n > MAX_DIM {
        return Err(TripleError::TooLarge {
            dim: 2 * n,
            cap: MAX_DIM,
        });
    }
    let p = system.product();
    let product = Trilinear::from_basis_fn(2 * n, |a, b, c| {
        let (i, pi) = (a / 2, a % 2);
        let (j, pj) = (b / 2, b % 2);
        let (k, pk) = (c / 2, c % 2);
        // Phase i^(p_a − p_b + p_c): outer slots linear, middle conjugate.
        let e = (pi as i32 - pj as i32 + pk as i32).rem_euclid(4);
        let (re, im) = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][e as usize];
        let base = p.basis_product(i, j, k);
        let mut out = vec![0.0; 2 * n];
        for l in 0..n {
            out[2 * l] = re * base[l];
            out[2 * l + 1] = im * base[l];
        }
        out
    });
    let complex_kind = match FactorKind::of_system(system) {
        FactorKind::Factor(FactorSpec::IR { m, n }) => Some(FactorSpec::IC { m, n }),
        FactorKind::Factor(FactorSpec::SpinR { r, s: 0 }) if r >= 2 => Some(FactorSpec::SpinC(r)),
        _ => None,
    };
    let j = LinearMap::from_images(
        2 * n,
        &(0..2 * n)
            .map(|i| {
                let mut v = vec![0.0; 2 * n];
                if i % 2 == 0 {
                    v[i + 1] = 1.0;
                } else {
                    v[i - 1] = -1.0;
                }
                v
            })
            .collect::<Vec<_>>(),
    );
    let (norm_kind, rank, kind) = match complex_kind {
        Some(spec) => (spec.norm_kind(), Some(spec.rank()), spec.to_string()),
        None => (NormKind::Operator, None, "custom".to_string()),
    };
    Ok(TripleSystem::from_trilinear(
        format!("complexification of {}", system.name()),
        product,
        norm_kind,
        rank,
        Some(j),
        kind,
    ))
}

/// `T̃(x + iy) = T(x) + iT(y)` in the interleaved coordinates of
/// [`complexify`].
pub fn extend_map_complex(t: &LinearMap) -> LinearMap {
    let n = t.dim();
    let mut entries = vec![0.0; 4 * n * n];
    for l in 0..n {
        for i in 0..n {
            let v = t.get(l, i);
            entries[(2 * l) * (2 * n) + 2 * i] = v;
            entries[(2 * l + 1) * (2 * n) + 2 * i + 1] = v;
        }
    }
    LinearMap::new(2 * n, entries).expect("finite entries")
}

/// Block direct sum. Summands are mutually orthogonal; block boundaries are
/// recorded in `factor_kind` as `SUM(...)`.
pub fn direct_sum(summands: &[TripleSystem]) -> Result<TripleSystem> {
    match summands {
        [] => return Err(TripleError::EmptySpec),
        [only] => return Ok(only.clone()),
        _ => {}
    }
    let n: usize = summands.iter().map(TripleSystem::dim).sum();
    if n > MAX_DIM {
        return Err(TripleError::TooLarge { dim: n, cap: MAX_DIM });
    }
    let mut tensor = vec![0.0; n.pow(4)];
    let mut offset = 0;
    for s in summands {
        let d = s.dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let src = s.product().basis_product(i, j, k);
                    let base = (((offset + i) * n + offset + j) * n + offset + k) * n + offset;
                    tensor[base..base + d].copy_from_slice(src);
                }
            }
        }
        offset += d;
    }
    let rank_hint = summands
        .iter()
        .map(TripleSystem::rank_hint)
        .sum::<Option<usize>>();
    let complex_structure = if summands.iter().all(|s| s.complex_structure().is_some()) {
        let mut entries = vec![0.0; n * n];
        let mut offset = 0;
        for s in summands {
            let j = s.complex_structure().expect("checked above");
            let d = s.dim();
            for r in 0..d {
                for c in 0..d {
                    entries[(offset + r) * n + offset + c] = j.get(r, c);
                }
            }
            offset += d;
        }
        Some(LinearMap::new(n, entries)?)
    } else {
        None
    };
    let kind = FactorKind::Sum(summands.iter().map(FactorKind::of_system).collect());
    let name = summands
        .iter()
        .map(TripleSystem::name)
        .collect::<Vec<_>>()
        .join(" ⊕ ");
    Ok(TripleSystem::from_trilinear(
        name,
        Trilinear::from_symmetric(n, tensor),
        NormKind::Product,
        rank_hint,
        complex_structure,
        kind.to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::triple_product;

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "I_R(2,3)", "I_C(2,1)", "I_H(1,2)", "II_C(3)", "II_R(4)", "II_H(2)", "III_R(3)",
            "III_H(2)", "SPIN_R(3,1)", "SPIN_C(4)",
        ] {
            let spec: FactorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(build_factor(spec).unwrap().dim(), spec.dim(), "{s}");
        }
        let k: FactorKind = "SUM(I_R(2,2),SPIN_R(4,0),custom:3)".parse().unwrap();
        assert_eq!(k.to_string(), "SUM(I_R(2,2),SPIN_R(4,0),custom:3)");
        assert_eq!(k.dim(), Some(11));
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!("I_R(0,2)".parse::<FactorSpec>(), Err(TripleError::InvalidSpec(_))));
        assert!("SPIN_R(1,0)".parse::<FactorSpec>().is_err());
        assert!("SPIN_R(0,3)".parse::<FactorSpec>().is_err());
        assert!("II_R(1)".parse::<FactorSpec>().is_err());
        assert!("FOO(2)".parse::<FactorSpec>().is_err());
        assert!("I_R(2)".parse::<FactorSpec>().is_err());
        // Relaxed toy case is accepted.
        assert!("SPIN_R(2,0)".parse::<FactorSpec>().is_ok());
    }

    #[test]
    fn dims_and_ranks() {
        let cases = [
            ("I_R(2,2)", 4, 2),
            ("I_C(2,1)", 4, 1),
            ("I_H(2,1)", 8, 1),
            ("II_C(3)", 9, 3),
            ("II_R(4)", 6, 2),
            ("II_H(2)", 6, 2),
            ("III_R(3)", 6, 3),
            ("III_H(2)", 10, 2),
            ("SPIN_R(3,0)", 3, 1),
            ("SPIN_R(3,1)", 4, 2),
            ("SPIN_C(3)", 6, 2),
        ];
        for (s, dim, rank) in cases {
            let f = build_factor(s.parse().unwrap()).unwrap();
            assert_eq!(f.dim(), dim, "{s}");
            assert_eq!(f.rank_hint(), Some(rank), "{s}");
        }
    }

    #[test]
    fn matrix_unit_is_tripotent() {
        let f = build_factor(FactorSpec::IR { m: 2, n: 2 }).unwrap();
        let e = f.basis_element(0);
        assert_eq!(triple_product(&e, &e, &e).unwrap().coords(), e.coords());
    }

    #[test]
    fn complex_structures_are_attached_where_expected() {
        for (s, has) in [
            ("I_C(2,1)", true),
            ("SPIN_C(3)", true),
            ("II_C(2)", false),
            ("I_H(1,1)", false),
            ("I_R(2,2)", false),
        ] {
            let f = build_factor(s.parse().unwrap()).unwrap();
            assert_eq!(f.complex_structure().is_some(), has, "{s}");
        }
    }

    #[test]
    fn hilbert_row_of_quaternions_has_expected_layout() {
        let spec = FactorSpec::IH { m: 1, n: 2 };
        let x: Vec<f64> = (1..=8).map(f64::from).collect();
        let rho = spec.real_representation(&x).unwrap();
        assert_eq!((rho.rows(), rho.cols()), (4, 8));
        // First column of each block holds the entry's components.
        assert_eq!(rho.column(0), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(rho.column(4), vec![5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn blocks_of_a_sum() {
        let a = build_factor("I_R(2,2)".parse().unwrap()).unwrap();
        let b = build_factor("SPIN_R(3,0)".parse().unwrap()).unwrap();
        let s = direct_sum(&[a.clone(), b]).unwrap();
        let bl = blocks(&s);
        assert_eq!(bl.len(), 2);
        assert_eq!((bl[1].offset, bl[1].dim), (4, 3));
        assert_eq!(s.rank_hint(), Some(3));
        assert_eq!(s.norm_kind(), NormKind::Product);
        assert_eq!(direct_sum(std::slice::from_ref(&a)).unwrap(), a);
        assert!(matches!(direct_sum(&[]), Err(TripleError::EmptySpec)));
    }

    #[test]
    fn complexify_rejects_complex_input() {
        let c = build_factor("I_C(1,1)".parse().unwrap()).unwrap();
        assert!(matches!(complexify(&c), Err(TripleError::InvalidInput(_))));
        let r = build_factor("I_R(1,1)".parse().unwrap()).unwrap();
        let rc = complexify(&r).unwrap();
        assert_eq!(rc.dim(), 2);
        assert_eq!(rc.tensor(), c.tensor());
    }

    #[test]
    fn extension_commutes_with_j() {
        let t = LinearMap::new(2, vec![1.0, 2.0, -3.0, 0.5]).unwrap();
        let tt = extend_map_complex(&t);
        let r = build_factor("I_R(1,2)".parse().unwrap()).unwrap();
        let c = complexify(&r).unwrap();
        let j = c.complex_structure().unwrap();
        assert_eq!(tt.commutator(j).frobenius_norm(), 0.0);
        assert_eq!(extend_map_complex(&LinearMap::identity(2)), LinearMap::identity(4));
        assert_eq!(extend_map_complex(&LinearMap::zero(2)), LinearMap::zero(4));
    }

    #[test]
    fn norm_unsupported_for_custom() {
        let s = TripleSystem::new("R", 1, vec![1.0], NormKind::Operator, None, None, "custom")
            .unwrap();
        assert!(matches!(system_norm(&s, &[1.0]), Err(TripleError::Unsupported(_))));
    }
}
