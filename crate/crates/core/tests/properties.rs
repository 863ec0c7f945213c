use proptest::prelude::*;
use triple_lab::numerics::{expm, null_space, range_basis, DenseMatrix};
use triple_lab::sampling::{gaussian_vec, rng};
use triple_lab::triple::euclidean_norm;
use triple_lab::{build_factor, derivation_space, DerivationKind, FactorSpec, ProductKind};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    proptest::collection::vec(-2.0f64..2.0, rows * cols)
        .prop_map(move |e| DenseMatrix::from_row_major(rows, cols, e).unwrap())
}

/// Rank-deficient matrices: a random product of a `rows × k` and `k × cols`.
fn low_rank() -> impl Strategy<Value = DenseMatrix> {
    (1usize..7, 1usize..7, 1usize..4).prop_flat_map(|(r, c, k)| {
        (matrix(r, k), matrix(k, c)).prop_map(|(a, b)| a.matmul(&b).unwrap())
    })
}

fn spec_strategy() -> impl Strategy<Value = FactorSpec> {
    prop_oneof![
        (1usize..4, 1usize..4).prop_map(|(m, n)| FactorSpec::IR { m, n }),
        (1usize..3, 1usize..3).prop_map(|(m, n)| FactorSpec::IC { m, n }),
        (1usize..3).prop_map(|n| FactorSpec::IH { m: n, n: 1 }),
        (2usize..5).prop_map(FactorSpec::IIR),
        (1usize..4).prop_map(FactorSpec::IIC),
        (1usize..4).prop_map(FactorSpec::IIIR),
        (3usize..6, 0usize..3).prop_map(|(r, s)| FactorSpec::SpinR { r, s }),
        (3usize..5).prop_map(FactorSpec::SpinC),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn null_space_is_annihilated_and_orthonormal(a in low_rank()) {
        let tol = 1e-9;
        let n = null_space(&a, tol).unwrap();
        let an = a.matmul(&n).unwrap();
        prop_assert!(an.spectral_norm() <= 10.0 * tol * a.spectral_norm());
        let ntn = n.transpose().matmul(&n).unwrap();
        let id = DenseMatrix::identity(n.cols());
        let err: f64 = ntn.entries().iter().zip(id.entries()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12);
        // Rank-nullity against the range basis.
        let r = range_basis(&a, tol).unwrap();
        prop_assert_eq!(r.cols() + n.cols(), a.cols());
    }

    #[test]
    fn expm_of_negation_is_the_inverse(a in matrix(4, 4)) {
        let e = expm(&a).unwrap();
        let neg = DenseMatrix::from_row_major(4, 4, a.entries().iter().map(|v| -v).collect()).unwrap();
        let f = expm(&neg).unwrap();
        let p = e.matmul(&f).unwrap();
        let id = DenseMatrix::identity(4);
        let err: f64 = p.entries().iter().zip(id.entries()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-9 * (1.0 + e.frobenius_norm() * f.frobenius_norm()));
    }

    #[test]
    fn products_are_symmetric_in_the_outer_slots(sp in spec_strategy(), seed in any::<u64>()) {
        let s = build_factor(sp).unwrap();
        let n = s.dim();
        let mut g = rng(seed);
        let (x, y, z) = (gaussian_vec(&mut g, n), gaussian_vec(&mut g, n), gaussian_vec(&mut g, n));
        prop_assert_eq!(s.product_coords(&x, &y, &z), s.product_coords(&z, &y, &x));
        let sym = s.trilinear(ProductKind::Symmetrized);
        let base = sym.eval(&x, &y, &z);
        for perm in [(&y, &x, &z), (&x, &z, &y), (&z, &x, &y)] {
            let other = sym.eval(perm.0, perm.1, perm.2);
            let d: Vec<f64> = base.iter().zip(&other).map(|(a, b)| a - b).collect();
            prop_assert!(euclidean_norm(&d) <= 1e-12 * (1.0 + euclidean_norm(&base)));
        }
    }

    #[test]
    fn triple_derivations_are_symmetrized_derivations(sp in spec_strategy()) {
        let s = build_factor(sp).unwrap();
        let t = derivation_space(&s, DerivationKind::Triple).unwrap();
        let y = derivation_space(&s, DerivationKind::Symmetrized).unwrap();
        prop_assert!(t.containment_residual(&y) <= 1e-8);
        prop_assert!(y.dim() >= t.dim());
        prop_assert_eq!(y.dim() > t.dim(), sp.is_exceptional_rank_one());
    }
}
