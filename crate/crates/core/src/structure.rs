//! Tripotents, Peirce decompositions, orthogonality, rank witnesses and odd
//! cube roots.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, TripleError};
use crate::factors::{blocks, FactorKind};
use crate::numerics::{null_space, range_basis, DenseMatrix, Svd, DEFAULT_RANK_TOL};
use crate::report::{Report, Witness};
use crate::triple::{dot, euclidean_norm, Element, LinearMap, TripleSystem, ALGEBRAIC_TOL};

/// Tolerance used to accept an element as a tripotent before decomposing.
pub const TRIPOTENT_TOL: f64 = 1e-9;

/// Newton iteration cap for [`cube_root`].
pub const CUBE_ROOT_MAX_ITER: usize = 200;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn is_tripotent(e: &Element<'_>, tol: f64) -> bool {
    let s = e.system();
    euclidean_norm(&sub(&s.cube_coords(e.coords()), e.coords())) <= tol
}

/// The Peirce projections of a tripotent.
#[derive(Debug, Clone)]
pub struct PeirceSystem {
    pub tripotent: Vec<f64>,
    /// `projections[k]` projects onto `E_k(e)`.
    pub projections: [LinearMap; 3],
}

impl PeirceSystem {
    pub fn projection(&self, k: usize) -> &LinearMap {
        &self.projections[k]
    }

    /// Dimensions of `E₀, E₁, E₂`.
    pub fn dims(&self) -> [usize; 3] {
        let d = |k: usize| {
            range_basis(&self.projections[k].to_matrix(), DEFAULT_RANK_TOL)
                .map(|b| b.cols())
                .unwrap_or(0)
        };
        [d(0), d(1), d(2)]
    }

    /// Largest violation of: projections sum to the identity, are idempotent,
    /// annihilate each other, and `L(e,e)` acts on `E_k` as `k/2`.
    pub fn invariant_residual(&self, system: &TripleSystem) -> f64 {
        let n = system.dim();
        let p = &self.projections;
        let id = LinearMap::identity(n);
        let mut worst = p[0].add(&p[1]).add(&p[2]).sub(&id).frobenius_norm();
        let a = system.l_coords(&self.tripotent, &self.tripotent);
        for i in 0..3 {
            worst = worst.max(p[i].compose(&p[i]).sub(&p[i]).frobenius_norm());
            for j in 0..3 {
                if i != j {
                    worst = worst.max(p[i].compose(&p[j]).frobenius_norm());
                }
            }
            let eig = a.compose(&p[i]).sub(&p[i].scale(i as f64 / 2.0));
            worst = worst.max(eig.frobenius_norm());
        }
        worst
    }
}

/// Peirce projections as polynomials in `A = L(e,e)`:
/// `P₂ = A(2A−1)`, `P₁ = 4A(1−A)`, `P₀ = (1−A)(1−2A)`, the Lagrange
/// interpolants at the eigenvalues `1, ½, 0`.
pub fn peirce(e: &Element<'_>) -> Result<PeirceSystem> {
    let s = e.system();
    let residual = euclidean_norm(&sub(&s.cube_coords(e.coords()), e.coords()));
    if residual > TRIPOTENT_TOL {
        return Err(TripleError::NotTripotent { residual });
    }
    let n = s.dim();
    let a = s.l_coords(e.coords(), e.coords());
    let id = LinearMap::identity(n);
    let two_a = a.scale(2.0);
    let p2 = a.compose(&two_a.sub(&id));
    let p1 = a.scale(4.0).compose(&id.sub(&a));
    let p0 = id.sub(&a).compose(&id.sub(&two_a));
    Ok(PeirceSystem {
        tripotent: e.coords().to_vec(),
        projections: [p0, p1, p2],
    })
}

/// Checks `{E_i, E_j, E_k} ⊆ E_{i−j+k}` (zero when the index leaves
/// `{0,1,2}`) and `{E₀,E₂,E} = {E₂,E₀,E} = 0` on bases of the Peirce spaces.
pub fn check_peirce_arithmetic(e: &Element<'_>) -> Result<Report> {
    let s = e.system();
    let ps = peirce(e)?;
    let n = s.dim();
    let bases: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|k| range_basis(&ps.projections[k].to_matrix(), DEFAULT_RANK_TOL).map(|b| b.columns()))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    let mut worst_label = String::new();
    let mut record = |r: f64, label: String| {
        if r > worst {
            worst = r;
            worst_label = label;
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let target = i as i64 - j as i64 + k as i64;
                for x in &bases[i] {
                    for y in &bases[j] {
                        for z in &bases[k] {
                            let v = s.product_coords(x, y, z);
                            let r = if (0..=2).contains(&target) {
                                let p = &ps.projections[target as usize];
                                euclidean_norm(&sub(&v, &p.apply(&v)))
                            } else {
                                euclidean_norm(&v)
                            };
                            record(r, format!("{{E{i},E{j},E{k}}}"));
                        }
                    }
                }
            }
        }
    }
    let units: Vec<Vec<f64>> = (0..n).map(|i| s.basis_element(i).into_coords()).collect();
    for (a, b) in [(0, 2), (2, 0)] {
        for x in &bases[a] {
            for y in &bases[b] {
                for z in &units {
                    record(
                        euclidean_norm(&s.product_coords(x, y, z)),
                        format!("{{E{a},E{b},E}}"),
                    );
                }
            }
        }
    }
    let dims = ps.dims();
    let mut report = Report::new("peirce-arithmetic");
    report.require_below("max_residual", worst, DEFAULT_RANK_TOL);
    report.require_below("projection_invariants", ps.invariant_residual(s), DEFAULT_RANK_TOL);
    report.note(format!("dim E0 = {}, dim E1 = {}, dim E2 = {}", dims[0], dims[1], dims[2]));
    if !report.passed() {
        report.note(format!("worst rule: {worst_label}"));
        report.witness(Witness::Element {
            label: "tripotent".into(),
            coords: ps.tripotent.clone(),
        });
    }
    Ok(report)
}

/// The three equivalent orthogonality conditions, evaluated separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orthogonality {
    /// Frobenius norm of `L(a,b)`.
    pub l_norm: f64,
    /// `‖{a,a,b}‖`
    pub aab: f64,
    /// `‖{b,b,a}‖`
    pub bba: f64,
    pub tol: f64,
}

impl Orthogonality {
    pub fn orthogonal(&self) -> bool {
        self.l_norm <= self.tol
    }

    /// Whether all three criteria reach the same verdict.
    pub fn consistent(&self) -> bool {
        let v = self.orthogonal();
        (self.aab <= self.tol) == v && (self.bba <= self.tol) == v
    }
}

pub fn orthogonality(a: &Element<'_>, b: &Element<'_>, tol: f64) -> Result<Orthogonality> {
    let l = crate::triple::l_operator(a, b)?;
    let s = a.system();
    Ok(Orthogonality {
        l_norm: l.frobenius_norm(),
        aab: euclidean_norm(&s.product_coords(a.coords(), a.coords(), b.coords())),
        bba: euclidean_norm(&s.product_coords(b.coords(), b.coords(), a.coords())),
        tol,
    })
}

/// `L(a,b) = 0`, cross-checked against `{a,a,b} = 0` and `{b,b,a} = 0`.
/// Disagreement between the criteria is logged.
pub fn are_orthogonal(a: &Element<'_>, b: &Element<'_>, tol: f64) -> Result<bool> {
    let o = orthogonality(a, b, tol)?;
    if !o.consistent() {
        log::warn!(
            "orthogonality criteria disagree: |L(a,b)| = {:.3e}, |{{aab}}| = {:.3e}, |{{bba}}| = {:.3e}",
            o.l_norm,
            o.aab,
            o.bba
        );
    }
    Ok(o.orthogonal())
}

/// Family of nonzero, pairwise orthogonal elements.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalSystem {
    pub elements: Vec<Vec<f64>>,
}

/// Checks that `family` is orthogonal with nonzero members and that its size
/// matches the system's rank hint. This certifies `rank ≥ card` only.
pub fn verify_rank_witness(system: &TripleSystem, family: &OrthogonalSystem) -> Report {
    let mut report = Report::new("rank-witness");
    report.note("an orthogonal family certifies a lower bound on the rank only");
    if family.elements.is_empty() {
        report.fail("empty family is not a rank witness");
        return report;
    }
    let n = system.dim();
    let mut min_norm = f64::INFINITY;
    let mut worst_l = 0.0f64;
    for (i, a) in family.elements.iter().enumerate() {
        if a.len() != n {
            report.fail(format!("member {i} has {} coordinates, expected {n}", a.len()));
            return report;
        }
        min_norm = min_norm.min(euclidean_norm(a));
        for b in &family.elements[i + 1..] {
            worst_l = worst_l
                .max(system.l_coords(a, b).frobenius_norm())
                .max(system.l_coords(b, a).frobenius_norm());
        }
    }
    report.require_above("min_member_norm", min_norm, ALGEBRAIC_TOL);
    report.require_below("max_cross_l_norm", worst_l, ALGEBRAIC_TOL);
    let card = family.elements.len();
    report.residual("cardinality", card as f64);
    match system.rank_hint() {
        Some(r) => {
            report.require("cardinality_matches_rank_hint", (card as f64 - r as f64).abs(), card == r);
        }
        None => {
            report.note("system has no rank hint; only orthogonality checked");
        }
    }
    report
}

/// Orthonormal basis of the span of the odd powers `a, {aaa}, Q(a){aaa}, …`,
/// grown until the next power adds nothing new.
pub fn odd_power_span(system: &TripleSystem, a: &[f64]) -> Vec<Vec<f64>> {
    let n = system.dim();
    let q = system.q_coords(a);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut v = a.to_vec();
    for _ in 0..n {
        let scale = euclidean_norm(&v);
        if scale == 0.0 {
            break;
        }
        let mut w: Vec<f64> = v.iter().map(|x| x / scale).collect();
        // Two Gram–Schmidt passes keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let r = euclidean_norm(&w);
        if r <= 1e-10 {
            break;
        }
        w.iter_mut().for_each(|x| *x /= r);
        v = q.apply(&w);
        basis.push(w);
    }
    basis
}

/// Solves `{b,b,b} = a` by damped Newton iteration restricted to the span of
/// the odd powers of `a`, starting from `a/‖a‖^{2/3}`.
pub fn cube_root<'s>(a: &Element<'s>) -> Result<Element<'s>> {
    let s = a.system();
    let n = s.dim();
    let na = a.norm2();
    if na == 0.0 {
        return Err(TripleError::InvalidInput("cube root of zero is not computed".into()));
    }
    let span = odd_power_span(s, a.coords());
    let r = span.len();
    let v = DMatrix::from_fn(n, r, |i, j| span[j][i]);
    let target = na * 1e-8;
    let resid = |b: &[f64]| sub(&s.cube_coords(b), a.coords());
    let mut b: Vec<f64> = a.coords().iter().map(|x| x / na.powf(2.0 / 3.0)).collect();
    let mut f = resid(&b);
    let mut fnorm = euclidean_norm(&f);
    for _ in 0..CUBE_ROOT_MAX_ITER {
        // Stop once converged or when rounding dominates further progress.
        if fnorm <= target * 1e-4 {
            break;
        }
        let jac = s.l_coords(&b, &b).scale(2.0).add(&s.q_coords(&b));
        let jm = DMatrix::from_row_slice(n, n, jac.entries());
        let m = &jm * &v;
        let rhs = DVector::from_iterator(n, f.iter().map(|x| -x));
        let Ok(svd) = Svd::new(&m) else {
            break;
        };
        let c = svd.solve(&rhs, 1e-14 * svd.sigma_max().max(f64::MIN_POSITIVE));
        let step: Vec<f64> = (&v * c).iter().copied().collect();
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-6 {
            let trial: Vec<f64> = b.iter().zip(&step).map(|(x, d)| x + t * d).collect();
            let ft = resid(&trial);
            let nt = euclidean_norm(&ft);
            if nt < fnorm {
                b = trial;
                f = ft;
                fnorm = nt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !(fnorm <= target) {
        return Err(TripleError::NoConvergence {
            iterations: CUBE_ROOT_MAX_ITER,
            residual: fnorm,
        });
    }
    s.element(b)
}

/// Distance of `b` from the span of the odd powers of `a`.
pub fn odd_span_distance(system: &TripleSystem, a: &[f64], b: &[f64]) -> f64 {
    let mut r = b.to_vec();
    for v in odd_power_span(system, a) {
        let c = dot(&r, &v);
        r.iter_mut().zip(&v).for_each(|(x, y)| *x -= c * y);
    }
    euclidean_norm(&r)
}

/// `U Σ^{1/3} Vᵀ` on the real representation, for single matrix factors.
/// Returns `None` for spin factors, sums and unclassified systems.
pub fn svd_odd_cube_root(system: &TripleSystem, a: &[f64]) -> Option<Vec<f64>> {
    let [block] = blocks(system).try_into().ok()?;
    let FactorKind::Factor(spec) = block.kind else {
        return None;
    };
    let rho = spec.real_representation(a)?.to_nalgebra();
    let svd = Svd::new(&rho).ok()?;
    let sigma = DMatrix::from_diagonal(&DVector::from_iterator(svd.s.len(), svd.s.iter().map(|v| v.cbrt())));
    let root = &svd.u * sigma * svd.v.transpose();
    spec.from_real_representation(&DenseMatrix::from_nalgebra(&root))
}

/// `e` is a nonzero tripotent whose `Q(e)`-fixed space is the line `ℝe`.
pub fn is_minimal_tripotent(e: &Element<'_>) -> Result<bool> {
    let s = e.system();
    let ne = e.norm2();
    if ne == 0.0 || !is_tripotent(e, TRIPOTENT_TOL) {
        return Ok(false);
    }
    let fixed = null_space(
        &s.q_coords(e.coords()).sub(&LinearMap::identity(s.dim())).to_matrix(),
        DEFAULT_RANK_TOL,
    )?;
    if fixed.cols() != 1 {
        return Ok(false);
    }
    let c = dot(&fixed.column(0), e.coords()).abs() / ne;
    Ok((c - 1.0).abs() <= 1e-8)
}

/// Frobenius norm of the part of `t` mapping some block of a direct sum into
/// the other blocks. Zero for systems with a single block.
pub fn off_block_leakage(system: &TripleSystem, t: &LinearMap) -> f64 {
    let bl = blocks(system);
    let block_of = |i: usize| bl.iter().position(|b| i >= b.offset && i < b.offset + b.dim);
    let n = system.dim();
    let mut acc = 0.0;
    for l in 0..n {
        for i in 0..n {
            if block_of(l) != block_of(i) {
                acc += t.get(l, i).powi(2);
            }
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factors::{build_factor, direct_sum};

    fn f(s: &str) -> TripleSystem {
        build_factor(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn tripotent_examples() {
        let s = f("I_R(2,2)");
        assert!(is_tripotent(&s.basis_element(0), 1e-12));
        assert!(is_tripotent(&s.zero_element(), 1e-12));
        let half = s.element(vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(!is_tripotent(&half, 1e-3));
        assert!(matches!(peirce(&half), Err(TripleError::NotTripotent { .. })));
    }

    #[test]
    fn peirce_of_matrix_unit() {
        let s = f("I_R(2,2)");
        let ps = peirce(&s.basis_element(0)).unwrap();
        assert_eq!(ps.dims(), [1, 2, 1]);
        assert!(ps.invariant_residual(&s) < 1e-12);
        let zero = peirce(&s.zero_element()).unwrap();
        assert_eq!(zero.projection(0), &LinearMap::identity(4));
    }

    #[test]
    fn peirce_arithmetic_in_square_matrices() {
        let s = f("I_R(3,3)");
        for i in [0, 4, 8, 1] {
            assert!(check_peirce_arithmetic(&s.basis_element(i)).unwrap().passed());
        }
        assert!(check_peirce_arithmetic(&s.zero_element()).unwrap().passed());
    }

    #[test]
    fn orthogonality_examples() {
        let s = f("I_R(2,2)");
        let (e11, e22) = (s.basis_element(0), s.basis_element(3));
        assert!(are_orthogonal(&e11, &e22, 1e-12).unwrap());
        assert!(!are_orthogonal(&e11, &e11, 1e-12).unwrap());
        assert!(orthogonality(&e11, &e22, 1e-12).unwrap().consistent());
        let d = direct_sum(&[f("I_R(1,1)"), f("SPIN_R(3,0)")]).unwrap();
        assert!(are_orthogonal(&d.basis_element(0), &d.basis_element(2), 1e-12).unwrap());
    }

    #[test]
    fn rank_witnesses() {
        let s = f("I_R(2,2)");
        let fam = OrthogonalSystem {
            elements: vec![s.basis_element(0).into_coords(), s.basis_element(3).into_coords()],
        };
        assert!(verify_rank_witness(&s, &fam).passed());
        assert!(!verify_rank_witness(&s, &OrthogonalSystem { elements: vec![] }).passed());
        let spin = f("SPIN_R(3,0)");
        let single = OrthogonalSystem {
            elements: vec![spin.basis_element(0).into_coords()],
        };
        assert!(verify_rank_witness(&spin, &single).passed());
    }

    #[test]
    fn cube_roots_of_simple_elements() {
        let s = f("I_R(2,2)");
        let e = s.basis_element(0);
        let b = cube_root(&e).unwrap();
        assert!(euclidean_norm(&sub(b.coords(), e.coords())) < 1e-12);
        let a = s.element(vec![8.0, 0.0, 0.0, 0.0]).unwrap();
        let b = cube_root(&a).unwrap();
        assert!(euclidean_norm(&sub(b.coords(), &[2.0, 0.0, 0.0, 0.0])) < 1e-10);
        assert!(matches!(cube_root(&s.zero_element()), Err(TripleError::InvalidInput(_))));
    }

    #[test]
    fn minimality() {
        let s = f("I_R(2,2)");
        assert!(is_minimal_tripotent(&s.basis_element(0)).unwrap());
        let id = s.element(vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(!is_minimal_tripotent(&id).unwrap());
        let spin = f("SPIN_R(4,0)");
        let u = spin.element(vec![0.6, 0.0, 0.8, 0.0]).unwrap();
        assert!(is_minimal_tripotent(&u).unwrap());
    }

    #[test]
    fn leakage_is_zero_for_block_maps() {
        let d = direct_sum(&[f("I_R(1,1)"), f("I_R(1,1)")]).unwrap();
        assert_eq!(off_block_leakage(&d, &LinearMap::identity(2)), 0.0);
        let swap = LinearMap::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((off_block_leakage(&d, &swap) - 2f64.sqrt()).abs() < 1e-15);
    }
}
