mod common;

use std::collections::HashSet;

use homlat::{GeneratingSet, Pattern};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_periodic_and_idempotent(
        m in common::matrix_2d(400),
        k in prop::array::uniform2(-500i64..500),
        z in prop::array::uniform2(-6i64..6),
    ) {
        let h = m.reduce(&k);
        prop_assert!(m.is_reduced(&h));
        prop_assert_eq!(m.reduce(&h), h.clone());
        let shift = m.apply_transpose(&z);
        let k2 = [k[0] + shift[0], k[1] + shift[1]];
        prop_assert_eq!(m.reduce(&k2), h.clone());
        // k - h lies on the lattice M^T Z^d
        let diff = [k[0] - h[0], k[1] - h[1]];
        let num = m.inverse_transpose_numerators(&diff);
        let den = m.det_abs() as i64;
        prop_assert!(num.iter().all(|v| v % den == 0));
    }

    #[test]
    fn pattern_and_generating_set_are_complete(m in common::matrix_2d(300)) {
        let p = Pattern::new(&m);
        let g = GeneratingSet::new(&m);
        prop_assert_eq!(p.len(), m.det_abs());
        let pts: HashSet<Vec<i64>> = (0..p.len()).map(|i| p.numerators(i).to_vec()).collect();
        prop_assert_eq!(pts.len(), p.len());
        let freqs: HashSet<Vec<i64>> = g.iter().map(|h| h.to_vec()).collect();
        prop_assert_eq!(freqs.len(), g.len());
        for i in 0..p.len() {
            prop_assert_eq!(p.index_of(p.numerators(i)), Some(i));
            let x = p.point(i);
            prop_assert!(x.iter().all(|&v| (-0.5..0.5).contains(&v)));
        }
        for (i, h) in g.iter().enumerate() {
            prop_assert!(m.is_reduced(h));
            prop_assert_eq!(g.index_of(h), i);
        }
    }

    #[test]
    fn pattern_is_a_group(m in common::matrix_2d(200), a in 0usize..1000, b in 0usize..1000) {
        let p = Pattern::new(&m);
        let (a, b) = (a % p.len(), b % p.len());
        let s = p.add_indices(a, b);
        prop_assert_eq!(p.sub_indices(s, b), a);
        prop_assert_eq!(p.add_indices(a, p.origin()), a);
    }

    #[test]
    fn three_dimensional_patterns(m in common::matrix_3d(120)) {
        let p = Pattern::new(&m);
        let g = GeneratingSet::new(&m);
        let pts: HashSet<Vec<i64>> = (0..p.len()).map(|i| p.numerators(i).to_vec()).collect();
        prop_assert_eq!(pts.len(), m.det_abs());
        for (i, h) in g.iter().enumerate() {
            prop_assert_eq!(g.index_of(h), i);
        }
    }
}
