use homlat::tensor::frobenius;
use homlat::{SymTensor2, SymTensor4};
use proptest::prelude::*;

fn sym2(dim: usize) -> impl Strategy<Value = SymTensor2> {
    prop::collection::vec(-10.0f64..10.0, dim * dim).prop_map(move |v| {
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                a[i * dim + j] = 0.5 * (v[i * dim + j] + v[j * dim + i]);
            }
        }
        SymTensor2::from_matrix(dim, &a).unwrap()
    })
}

fn stiffness(dim: usize) -> impl Strategy<Value = SymTensor4> {
    let ns = dim * (dim + 1) / 2;
    prop::collection::vec(-5.0f64..5.0, ns * ns).prop_map(move |v| {
        let mut m = vec![0.0; ns * ns];
        for a in 0..ns {
            for b in 0..ns {
                m[a * ns + b] = v[a * ns + b] + v[b * ns + a];
            }
        }
        SymTensor4::from_mandel(dim, &m).unwrap()
    })
}

proptest! {
    #[test]
    fn mandel_is_an_isometry(
        (a, b) in (1usize..=3).prop_flat_map(|d| (sym2(d), sym2(d)))
    ) {
        let (ma, mb) = (a.to_matrix(), b.to_matrix());
        let matrix_dot: f64 = ma.iter().zip(&mb).map(|(x, y)| x * y).sum();
        let mandel_dot: f64 = a.mandel().iter().zip(b.mandel()).map(|(x, y)| x * y).sum();
        let scale = a.norm() * b.norm();
        prop_assert!((matrix_dot - mandel_dot).abs() <= 1e-14 * scale.max(1.0));
        prop_assert!((frobenius(&a, &b).unwrap() - matrix_dot).abs() <= 1e-14 * scale.max(1.0));
    }

    #[test]
    fn symmetric_stiffness_is_self_adjoint(c in stiffness(3), a in sym2(3), b in sym2(3)) {
        let lhs = frobenius(&c.apply(&a).unwrap(), &b).unwrap();
        let rhs = frobenius(&a, &c.apply(&b).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn apply_is_linear(c in stiffness(2), a in sym2(2), b in sym2(2), s in -3.0f64..3.0) {
        let lhs = c.apply(&(a + b * s)).unwrap();
        let rhs = c.apply(&a).unwrap() + c.apply(&b).unwrap() * s;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }
}
