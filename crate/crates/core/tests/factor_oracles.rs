//! Factor products against formulas evaluated independently of the tensor.

use nalgebra::DMatrix;
use num_complex::Complex64;
use triple_lab::factors::canonical_tripotents;
use triple_lab::numerics::DenseMatrix;
use triple_lab::sampling::{gaussian_vec, rng};
use triple_lab::triple::{check_jordan_identity, check_norm_axiom, euclidean_norm};
use triple_lab::{build_factor, complexify, derivation_space, DerivationKind, FactorSpec};

const MATRIX_KINDS: &[&str] = &[
    "I_R(2,3)", "I_R(3,1)", "I_C(2,2)", "I_C(2,1)", "I_H(2,1)", "I_H(1,1)", "II_C(3)", "II_R(4)",
    "II_H(2)", "III_R(3)", "III_H(2)",
];

const ALL_KINDS: &[&str] = &[
    "I_R(2,3)", "I_C(2,1)", "I_H(1,2)", "II_C(2)", "II_R(3)", "II_H(2)", "III_R(2)", "III_H(1)",
    "SPIN_R(3,0)", "SPIN_R(2,2)", "SPIN_C(3)",
];

fn spec(s: &str) -> FactorSpec {
    s.parse().unwrap()
}

fn rho(sp: FactorSpec, x: &[f64]) -> DMatrix<f64> {
    sp.real_representation(x).expect("matrix kind").to_nalgebra()
}

#[test]
fn matrix_products_match_real_representation_arithmetic() {
    for name in MATRIX_KINDS {
        let sp = spec(name);
        let s = build_factor(sp).unwrap();
        let n = s.dim();
        let mut g = rng(7);
        for _ in 0..100 {
            let (x, y, z) = (gaussian_vec(&mut g, n), gaussian_vec(&mut g, n), gaussian_vec(&mut g, n));
            let (rx, ry, rz) = (rho(sp, &x), rho(sp, &y), rho(sp, &z));
            let expected = (&rx * ry.transpose() * &rz + &rz * ry.transpose() * &rx) * 0.5;
            let got = rho(sp, &s.product_coords(&x, &y, &z));
            let err = (&got - &expected).norm();
            assert!(err <= 1e-12 * (1.0 + expected.norm()), "{name}: {err:e}");
        }
    }
}

#[test]
fn real_representation_is_injective_and_round_trips() {
    for name in MATRIX_KINDS {
        let sp = spec(name);
        let n = sp.dim();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                sp.real_representation(&e).unwrap().into_entries()
            })
            .collect();
        let m = DenseMatrix::from_columns(cols[0].len(), &cols);
        let sv = triple_lab::numerics::singular_values(&m);
        assert!(sv[n - 1] > 1e-6, "{name}: representation is not injective");
        let x = gaussian_vec(&mut rng(3), n);
        let back = sp.from_real_representation(&sp.real_representation(&x).unwrap()).unwrap();
        assert_eq!(back, x, "{name}");
    }
}

fn spin_oracle(x: &[Complex64], y: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    let herm = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(u, v)| u * v.conj()).sum::<Complex64>();
    let bil = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<Complex64>();
    let (xy, zy, xz) = (herm(x, y), herm(z, y), bil(x, z));
    (0..x.len())
        .map(|l| xy * z[l] + zy * x[l] - xz * y[l].conj())
        .collect()
}

#[test]
fn complex_spin_matches_formula() {
    let s = build_factor(spec("SPIN_C(4)")).unwrap();
    let mut g = rng(11);
    let to_c = |v: &[f64]| v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect::<Vec<_>>();
    for _ in 0..100 {
        let (x, y, z) = (gaussian_vec(&mut g, 8), gaussian_vec(&mut g, 8), gaussian_vec(&mut g, 8));
        let want = spin_oracle(&to_c(&x), &to_c(&y), &to_c(&z));
        let got = to_c(&s.product_coords(&x, &y, &z));
        let err: f64 = want.iter().zip(&got).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-12, "{err:e}");
    }
}

#[test]
fn real_spin_matches_formula() {
    let (r, sdim) = (2, 3);
    let s = build_factor(FactorSpec::SpinR { r, s: sdim }).unwrap();
    let n = r + sdim;
    let bar = |v: &[f64]| v.iter().enumerate().map(|(i, a)| if i < r { *a } else { -a }).collect::<Vec<_>>();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let mut g = rng(12);
    for _ in 0..100 {
        let (x, y, z) = (gaussian_vec(&mut g, n), gaussian_vec(&mut g, n), gaussian_vec(&mut g, n));
        let yb = bar(&y);
        let want: Vec<f64> = (0..n)
            .map(|l| dot(&x, &y) * z[l] + dot(&z, &y) * x[l] - dot(&x, &bar(&z)) * yb[l])
            .collect();
        let got = s.product_coords(&x, &y, &z);
        let err = euclidean_norm(&want.iter().zip(&got).map(|(a, b)| a - b).collect::<Vec<_>>());
        assert!(err <= 1e-12, "{err:e}");
    }
}

#[test]
fn jordan_identity_and_norm_axiom_hold_for_every_kind() {
    for name in ALL_KINDS {
        let s = build_factor(spec(name)).unwrap();
        let j = check_jordan_identity(&s, 1e-10, 5);
        assert!(j.passed(), "{name}: {:?}", j.residuals);
        let nrm = check_norm_axiom(&s, 32, 5).unwrap();
        assert!(nrm.passed(), "{name}: {:?}", nrm.residuals);
    }
}

#[test]
fn constructor_tripotents_are_tripotents() {
    for name in ALL_KINDS {
        let s = build_factor(spec(name)).unwrap();
        for (label, e) in canonical_tripotents(&s) {
            let c = s.cube_coords(&e);
            let err = euclidean_norm(&c.iter().zip(&e).map(|(a, b)| a - b).collect::<Vec<_>>());
            assert!(err <= 1e-12, "{name} {label}: {err:e}");
        }
    }
}

#[test]
fn complexified_real_rectangular_factor_is_the_complex_one() {
    for (m, n) in [(2, 1), (2, 2), (1, 3)] {
        let c = complexify(&build_factor(FactorSpec::IR { m, n }).unwrap()).unwrap();
        let direct = build_factor(FactorSpec::IC { m, n }).unwrap();
        assert_eq!(c.dim(), direct.dim());
        let err = c
            .tensor()
            .iter()
            .zip(direct.tensor())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-14, "I_R({m},{n}): {err:e}");
        assert_eq!(c.complex_structure(), direct.complex_structure());
        assert_eq!(c.factor_kind(), direct.factor_kind());
        for kind in [DerivationKind::Triple, DerivationKind::Symmetrized] {
            let a = derivation_space(&c, kind).unwrap().dim();
            let b = derivation_space(&direct, kind).unwrap().dim();
            assert_eq!(a, b, "I_R({m},{n}) {kind}");
        }
    }
}

#[test]
fn corrupted_tensor_breaks_the_jordan_identity() {
    let s = build_factor(spec("I_R(2,2)")).unwrap().perturbed(0, 0, 0, 0, 0.1);
    let j = check_jordan_identity(&s, 1e-10, 1);
    assert!(!j.passed());
    assert!(j.residuals["max_residual"] > 0.01);
}
