//! Necessary-condition checks for the JB*-triple axioms.

use nalgebra::DMatrix;

use super::{euclidean_norm, LinearMap, Trilinear, TripleSystem, ALGEBRAIC_TOL, SPECTRAL_TOL};
use crate::error::{Result, TripleError};
use crate::factors::system_norm;
use crate::report::{Report, Witness};
use crate::sampling::{gaussian_vec, rng};

/// Up to this dimension the Jordan identity is checked on every basis 5-tuple.
pub const JORDAN_EXHAUSTIVE_MAX_DIM: usize = 8;

/// Number of random 5-tuples used above [`JORDAN_EXHAUSTIVE_MAX_DIM`].
pub const JORDAN_RANDOM_TUPLES: usize = 1000;

/// `L(a,b){x,y,z} − {L(a,b)x,y,z} + {x,L(b,a)y,z} − {x,y,L(a,b)z}` for basis
/// vectors, read straight off the tensor.
fn jordan_defect_basis(p: &Trilinear, a: usize, b: usize, x: usize, y: usize, z: usize) -> f64 {
    let n = p.dim();
    let xyz = p.basis_product(x, y, z);
    let abx = p.basis_product(a, b, x);
    let bay = p.basis_product(b, a, y);
    let abz = p.basis_product(a, b, z);
    let mut acc = 0.0;
    for l in 0..n {
        let mut r = 0.0;
        for m in 0..n {
            r += xyz[m] * p.coeff(a, b, m, l);
            r -= abx[m] * p.coeff(m, y, z, l);
            r += bay[m] * p.coeff(x, m, z, l);
            r -= abz[m] * p.coeff(x, y, m, l);
        }
        acc += r * r;
    }
    acc.sqrt()
}

fn jordan_defect(p: &Trilinear, a: &[f64], b: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let lab = p.left_operator(a, b);
    let lba = p.left_operator(b, a);
    let lhs = lab.apply(&p.eval(x, y, z));
    let t1 = p.eval(&lab.apply(x), y, z);
    let t2 = p.eval(x, &lba.apply(y), z);
    let t3 = p.eval(x, y, &lab.apply(z));
    let r: Vec<f64> = (0..p.dim())
        .map(|l| lhs[l] - t1[l] + t2[l] - t3[l])
        .collect();
    euclidean_norm(&r)
}

/// Checks the Jordan identity, exhaustively on basis tuples for small
/// dimensions and on seeded random tuples otherwise.
pub fn check_jordan_identity(system: &TripleSystem, tol: f64, seed: u64) -> Report {
    let p = system.product();
    let n = p.dim();
    let mut report = Report::new("jordan-identity");
    let mut worst = 0.0f64;
    let mut worst_idx = Vec::new();
    if n <= JORDAN_EXHAUSTIVE_MAX_DIM {
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    for y in 0..n {
                        // Both sides are symmetric under x ↔ z.
                        for z in x..n {
                            let d = jordan_defect_basis(p, a, b, x, y, z);
                            if d > worst {
                                worst = d;
                                worst_idx = vec![a, b, x, y, z];
                            }
                        }
                    }
                }
            }
        }
        report.note("exhaustive over basis 5-tuples");
    } else {
        let mut r = rng(seed);
        for _ in 0..JORDAN_RANDOM_TUPLES {
            let v: Vec<Vec<f64>> = (0..5).map(|_| gaussian_vec(&mut r, n)).collect();
            let d = jordan_defect(p, &v[0], &v[1], &v[2], &v[3], &v[4]);
            if d > worst {
                worst = d;
            }
        }
        report = report.with_seed(seed);
        report.note(format!("{JORDAN_RANDOM_TUPLES} seeded random 5-tuples"));
    }
    report.require_below("max_residual", worst, tol);
    if !worst_idx.is_empty() && !report.passed() {
        report.witness(Witness::Indices {
            label: "basis (a,b,x,y,z)".into(),
            indices: worst_idx,
        });
    }
    report
}

/// Checks `‖{a,a,a}‖ = ‖a‖³` to `1e-8` relative error on seeded samples.
pub fn check_norm_axiom(system: &TripleSystem, samples: usize, seed: u64) -> Result<Report> {
    let n = system.dim();
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    let mut worst_point = Vec::new();
    for _ in 0..samples {
        let a = gaussian_vec(&mut r, n);
        let na = system_norm(system, &a)?;
        let cube = system.cube_coords(&a);
        let nc = system_norm(system, &cube)?;
        let rel = if na == 0.0 {
            nc
        } else {
            (nc - na.powi(3)).abs() / na.powi(3)
        };
        if rel > worst || rel.is_nan() {
            worst = rel;
            worst_point = a;
        }
    }
    let mut report = Report::new("norm-axiom").with_seed(seed);
    report.require_below("max_relative_error", worst, SPECTRAL_TOL);
    if !report.passed() {
        report.witness(Witness::Element {
            label: "a".into(),
            coords: worst_point,
        });
    }
    Ok(report)
}

/// `{Jx,y,z} = J{x,y,z}` and `{x,Jy,z} = −J{x,y,z}` on all basis triples.
pub fn check_complex_structure(system: &TripleSystem) -> Result<Report> {
    let j = system.complex_structure().ok_or_else(|| {
        TripleError::Unsupported(format!("{} carries no complex structure", system.name()))
    })?;
    let n = system.dim();
    let p = system.product();
    let cols: Vec<Vec<f64>> = (0..n).map(|i| j.apply(&unit(n, i))).collect();
    let mut outer = 0.0f64;
    let mut middle = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let jp = j.apply(p.basis_product(x, y, z));
                let ex = unit(n, x);
                let ey = unit(n, y);
                let ez = unit(n, z);
                let a = p.eval(&cols[x], &ey, &ez);
                let b = p.eval(&ex, &cols[y], &ez);
                let da: f64 = a.iter().zip(&jp).map(|(u, v)| (u - v).powi(2)).sum();
                let db: f64 = b.iter().zip(&jp).map(|(u, v)| (u + v).powi(2)).sum();
                outer = outer.max(da.sqrt());
                middle = middle.max(db.sqrt());
            }
        }
    }
    let mut report = Report::new("complex-structure");
    report.require_below("outer_linearity", outer, 1e-12);
    report.require_below("middle_conjugate_linearity", middle, 1e-12);
    Ok(report)
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Inner-product surrogate for "`L(a,a)` is hermitian with non-negative
/// spectrum": with the trace form `G(x,y) = Tr L(x,y)`, checks that `G` is
/// positive definite and that each `L(a,a)` is `G`-self-adjoint with
/// non-negative eigenvalues. Always reported as advisory.
pub fn check_hermitian_surrogate(system: &TripleSystem, samples: usize, seed: u64) -> Report {
    let n = system.dim();
    let p = system.product();
    let mut report = Report::new("hermitian-surrogate").with_seed(seed);
    report.mark_advisory();
    if n == 0 {
        return report;
    }
    let g = DMatrix::from_fn(n, n, |i, j| (0..n).map(|m| p.coeff(i, j, m, m)).sum::<f64>());
    let asym = (&g - g.transpose()).norm() / g.norm().max(f64::MIN_POSITIVE);
    report.residual("trace_form_asymmetry", asym);
    let g_sym = (&g + g.transpose()) * 0.5;
    let min_g = g_sym.symmetric_eigenvalues().min();
    report.residual("trace_form_min_eigenvalue", min_g);
    let Some(chol) = g_sym.clone().cholesky() else {
        report.note("trace form is not positive definite; surrogate not applicable");
        return report;
    };
    let l_inv = chol
        .l()
        .try_inverse()
        .expect("Cholesky factor of a positive definite matrix is invertible");
    let mut points: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i)).collect();
    let mut r = rng(seed);
    points.extend((0..samples).map(|_| gaussian_vec(&mut r, n)));
    let mut worst_adj = 0.0f64;
    let mut worst_neg = 0.0f64;
    for a in &points {
        let laa = to_na(&p.left_operator(a, a));
        let gl = &g_sym * &laa;
        let scale = gl.norm().max(f64::MIN_POSITIVE);
        worst_adj = worst_adj.max((&gl - gl.transpose()).norm() / scale);
        let m = &l_inv * ((&gl + gl.transpose()) * 0.5) * l_inv.transpose();
        let ev = m.symmetric_eigenvalues();
        let top = ev.max().abs().max(f64::MIN_POSITIVE);
        worst_neg = worst_neg.max((-ev.min() / top).max(0.0));
    }
    report.residual("max_self_adjoint_defect", worst_adj);
    report.residual("max_negative_spectrum", worst_neg);
    let ok = asym <= ALGEBRAIC_TOL && worst_adj <= SPECTRAL_TOL && worst_neg <= SPECTRAL_TOL;
    report.note(if ok {
        "surrogate satisfied"
    } else {
        "surrogate violated"
    });
    report
}

fn to_na(m: &LinearMap) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::NormKind;

    #[test]
    fn zero_dimensional_system_passes_vacuously() {
        let s = TripleSystem::new("zero", 0, vec![], NormKind::Product, Some(0), None, "custom")
            .unwrap();
        let r = check_jordan_identity(&s, ALGEBRAIC_TOL, 0);
        assert!(r.passed());
        assert_eq!(r.residuals["max_residual"], 0.0);
    }

    #[test]
    fn random_mode_agrees_with_basis_defect_on_the_line() {
        let s = TripleSystem::new("R", 1, vec![1.0], NormKind::Operator, Some(1), None, "custom")
            .unwrap();
        let p = s.product();
        assert_eq!(jordan_defect_basis(p, 0, 0, 0, 0, 0), 0.0);
        assert!(jordan_defect(p, &[0.3], &[1.1], &[-2.0], &[0.7], &[0.5]) < 1e-15);
    }
}
