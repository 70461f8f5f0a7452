//! Randomized algebraic properties of the products, transposes and decompositions.

mod common;

use common::{rand_tensor, slice_diff_energy, KINDS};
use nalgebra::DMatrix;
use proptest::prelude::*;
use tcsvd::apps::nmi;
use tcsvd::decomp::svd_transform;
use tcsvd::{
    contract, identity_tensor, mode_n_product, tc_transpose, truncate, DenseTensor, MiddleIndex,
    ProductKind, Spectrum,
};

fn kind_strategy() -> impl Strategy<Value = ProductKind> {
    prop_oneof![Just(ProductKind::T), Just(ProductKind::Tc)]
}

fn dims() -> impl Strategy<Value = (usize, Vec<usize>, usize, usize, usize)> {
    (1usize..=4, prop::collection::vec(1usize..=4, 0..=2), 1usize..=4, 1usize..=4, 1usize..=4)
}

fn shape(first: usize, mid: &[usize], last: usize) -> Vec<usize> {
    let mut s = vec![first];
    s.extend_from_slice(mid);
    s.push(last);
    s
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(50)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn associativity(kind in kind_strategy(), (i1, mid, j, k2, in_) in dims(), seed in any::<u64>()) {
        let a = rand_tensor(&shape(i1, &mid, j), seed);
        let b = rand_tensor(&shape(j, &mid, k2), seed ^ 1);
        let x = rand_tensor(&shape(k2, &mid, in_), seed ^ 2);
        let left = kind.product(&kind.product(&a, &b).unwrap(), &x).unwrap();
        let right = kind.product(&a, &kind.product(&b, &x).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-9 * (1.0 + left.max_abs()));
    }

    #[test]
    fn bilinearity(kind in kind_strategy(), (i1, mid, j, _k2, in_) in dims(),
                   alpha in -3.0f64..3.0, beta in -3.0f64..3.0, seed in any::<u64>()) {
        let a = rand_tensor(&shape(i1, &mid, j), seed);
        let b = rand_tensor(&shape(i1, &mid, j), seed ^ 3);
        let x = rand_tensor(&shape(j, &mid, in_), seed ^ 4);
        let y = rand_tensor(&shape(j, &mid, in_), seed ^ 5);
        let lin_a = kind.product(&a.scale(alpha).add(&b.scale(beta)).unwrap(), &x).unwrap();
        let want_a = kind.product(&a, &x).unwrap().scale(alpha)
            .add(&kind.product(&b, &x).unwrap().scale(beta)).unwrap();
        prop_assert!(lin_a.max_abs_diff(&want_a).unwrap() < 1e-10 * (1.0 + want_a.max_abs()));
        let lin_x = kind.product(&a, &x.scale(alpha).add(&y.scale(beta)).unwrap()).unwrap();
        let want_x = kind.product(&a, &x).unwrap().scale(alpha)
            .add(&kind.product(&a, &y).unwrap().scale(beta)).unwrap();
        prop_assert!(lin_x.max_abs_diff(&want_x).unwrap() < 1e-10 * (1.0 + want_x.max_abs()));
    }

    #[test]
    fn identity_element(kind in kind_strategy(), (i1, mid, _j, _k2, in_) in dims(), seed in any::<u64>()) {
        let x = rand_tensor(&shape(i1, &mid, in_), seed);
        let el = identity_tensor(kind, i1, &mid).unwrap();
        let er = identity_tensor(kind, in_, &mid).unwrap();
        prop_assert!(kind.product(&el, &x).unwrap().max_abs_diff(&x).unwrap() < 1e-9);
        prop_assert!(kind.product(&x, &er).unwrap().max_abs_diff(&x).unwrap() < 1e-9);
    }

    #[test]
    fn adjoint_identity(kind in kind_strategy(), (i1, mid, j, _k2, in_) in dims(), seed in any::<u64>()) {
        let a = rand_tensor(&shape(i1, &mid, j), seed);
        let x = rand_tensor(&shape(j, &mid, in_), seed ^ 6);
        let y = rand_tensor(&shape(i1, &mid, in_), seed ^ 7);
        let lhs = kind.product(&a, &x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&kind.product(&kind.transpose(&a).unwrap(), &y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn truncation_energy_identity(kind in kind_strategy(), (i1, mid, _j, _k2, in_) in dims(),
                                  kfrac in 0.0f64..1.0, seed in any::<u64>()) {
        let a = rand_tensor(&shape(i1, &mid, in_), seed);
        let full = svd_transform(kind, &a).unwrap();
        let p = i1.min(in_);
        let k = 1 + ((p - 1) as f64 * kfrac) as usize;
        let t = truncate(&full, k).unwrap();
        let abar = Spectrum::forward(kind, &a).unwrap();
        let got = slice_diff_energy(&abar, &t.spectrum().unwrap());
        let want: f64 = full.singular_values().unwrap().iter()
            .map(|s| s[k..].iter().map(|v| v * v).sum::<f64>()).sum();
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + abar.energy()));
    }

    #[test]
    fn tc_transpose_isometric_involution(s in prop::collection::vec(1usize..=4, 2..=5), seed in any::<u64>()) {
        let a = rand_tensor(&s, seed);
        let t = tc_transpose(&a).unwrap();
        prop_assert_eq!(tc_transpose(&t).unwrap(), a.clone());
        prop_assert!((t.frobenius_norm() - a.frobenius_norm()).abs() < 1e-12 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn middle_slice_round_trip(s in prop::collection::vec(1usize..=4, 2..=5), seed in any::<u64>()) {
        let a = rand_tensor(&s, seed);
        let mut b = DenseTensor::zeros(&s).unwrap();
        let mut energy = 0.0;
        let idx: Vec<MiddleIndex> = a.middle_indices().collect();
        for m in &idx {
            let sl = a.middle_slice(m).unwrap();
            energy += sl.norm_squared();
            b.set_middle_slice(m, &sl).unwrap();
        }
        prop_assert_eq!(&b, &a);
        prop_assert!((energy - a.frobenius_norm().powi(2)).abs() < 1e-12 * (1.0 + energy));
    }

    #[test]
    fn mode_product_composition(mode in 1usize..=3, seed in any::<u64>()) {
        let t = rand_tensor(&[3, 3, 3], seed);
        let ma = DMatrix::from_fn(3, 3, |i, j| ((i * 3 + j) as f64 * 0.37 + seed as f64 * 1e-20).sin());
        let mb = DMatrix::from_fn(3, 3, |i, j| ((i + 2 * j) as f64 * 0.71).cos());
        let two = mode_n_product(&mb, &mode_n_product(&ma, &t, mode).unwrap(), mode).unwrap();
        let one = mode_n_product(&(&mb * &ma), &t, mode).unwrap();
        prop_assert!(two.max_abs_diff(&one).unwrap() < 1e-12);
    }

    #[test]
    fn contraction_matches_loop_nest(a_shape in prop::collection::vec(1usize..=3, 1..=3),
                                     free_b in prop::collection::vec(1usize..=3, 0..=2),
                                     seed in any::<u64>()) {
        // contract the trailing mode of A with the leading mode of B
        let c = *a_shape.last().unwrap();
        let mut b_shape = vec![c];
        b_shape.extend_from_slice(&free_b);
        let a = rand_tensor(&a_shape, seed);
        let b = rand_tensor(&b_shape, seed ^ 9);
        let y = contract(&a, &b, &[a_shape.len()], &[1]).unwrap();
        let fa: usize = a.len() / c;
        let fb: usize = b.len() / c;
        let mut want = vec![0.0; fa * fb];
        for i in 0..fa {
            for j in 0..fb {
                for k in 0..c {
                    want[i * fb + j] += a.data()[i * c + k] * b.data()[k * fb + j];
                }
            }
        }
        for (g, w) in y.data().iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-12 * (1.0 + w.abs()));
        }
    }

    #[test]
    fn nmi_symmetric_and_permutation_invariant(a in prop::collection::vec(0usize..4, 2..40),
                                               shift in 1usize..4, seed in any::<u64>()) {
        let b: Vec<usize> = a.iter().enumerate()
            .map(|(i, &v)| if (seed >> (i % 64)) & 1 == 1 { (v + 1) % 4 } else { v }).collect();
        let ab = nmi(&a, &b).unwrap();
        prop_assert!((ab - nmi(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        let renamed: Vec<usize> = a.iter().map(|v| (v + shift) % 4 + 10).collect();
        prop_assert!((nmi(&renamed, &b).unwrap() - ab).abs() < 1e-12);
        let distinct = { let mut s = a.clone(); s.sort(); s.dedup(); s.len() };
        if distinct > 1 {
            prop_assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn orthogonality_for_several_shapes() {
    for (s, seed) in [(vec![4, 3, 5], 1), (vec![3, 2, 3, 3], 2), (vec![5, 4, 2], 3), (vec![2, 6, 4], 4)] {
        let a = rand_tensor(&s, seed);
        for kind in KINDS {
            let f = tcsvd::svd(kind, &a).unwrap();
            let u = f.u().to_spatial().unwrap();
            let v = f.v().to_spatial().unwrap();
            let p = *u.shape().last().unwrap();
            let mid = a.middle_shape().to_vec();
            let e = identity_tensor(kind, p, &mid).unwrap();
            let utu = kind.product(&kind.transpose(&u).unwrap(), &u).unwrap();
            let vtv = kind.product(&kind.transpose(&v).unwrap(), &v).unwrap();
            assert!(utu.max_abs_diff(&e).unwrap() < 1e-9, "{kind} {s:?}");
            assert!(vtv.max_abs_diff(&e).unwrap() < 1e-9, "{kind} {s:?}");
        }
    }
}
