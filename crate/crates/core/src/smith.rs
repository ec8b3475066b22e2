//! Smith normal form `M = S D T` of a regular integer matrix.
//!
//! The decomposition turns the pattern `M^{-1} Z^d / Z^d` into the cyclic
//! product group `Z_{d_1} x ... x Z_{d_n}`, which is what lets the pattern
//! transform run as an ordinary multidimensional FFT.

use crate::error::{Error, Result};
use crate::intmat;

/// Unimodular `left`, `right` and diagonal `divisors` with
/// `matrix = left * diag(divisors) * right` and `d_1 | d_2 | ... | d_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    dim: usize,
    left: Vec<i64>,
    divisors: Vec<i64>,
    right: Vec<i64>,
    left_inv: Vec<i64>,
    right_inv: Vec<i64>,
}

impl SmithDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `S`, row-major.
    pub fn left(&self) -> &[i64] {
        &self.left
    }

    /// `T`, row-major.
    pub fn right(&self) -> &[i64] {
        &self.right
    }

    pub fn left_inverse(&self) -> &[i64] {
        &self.left_inv
    }

    pub fn right_inverse(&self) -> &[i64] {
        &self.right_inv
    }

    /// Elementary divisors `d_1 | ... | d_n`, all positive.
    pub fn divisors(&self) -> &[i64] {
        &self.divisors
    }

    /// Grid shape of the cyclic group the pattern is isomorphic to.
    pub fn shape(&self) -> Vec<usize> {
        self.divisors.iter().map(|&d| d as usize).collect()
    }

    /// `S D T`, for checking the decomposition.
    pub fn product(&self) -> Vec<i64> {
        let n = self.dim;
        let mut diag = vec![0; n * n];
        for i in 0..n {
            diag[i * n + i] = self.divisors[i];
        }
        intmat::mul(n, &intmat::mul(n, &self.left, &diag), &self.right)
    }
}

/// Computes the Smith normal form of a square integer matrix given row-major.
pub fn smith_normal_form(dim: usize, entries: &[i64]) -> Result<SmithDecomposition> {
    if entries.len() != dim * dim {
        return Err(Error::MalformedMatrix {
            expected: dim * dim,
            found: entries.len(),
        });
    }
    if intmat::det(dim, entries) == 0 {
        return Err(Error::ZeroDeterminant);
    }
    let n = dim;
    let mut a = entries.to_vec();
    // Invariant: s * a * t == entries.
    let mut s = intmat::identity(n);
    let mut t = intmat::identity(n);

    let at = |i: usize, j: usize| i * n + j;

    // a <- E a with E adding c * row j to row i; s <- s E^{-1}.
    let add_row = |a: &mut [i64], s: &mut [i64], i: usize, j: usize, c: i64| {
        for col in 0..n {
            a[i * n + col] += c * a[j * n + col];
        }
        for row in 0..n {
            s[row * n + j] -= c * s[row * n + i];
        }
    };
    // a <- a F with F adding c * col j to col i; t <- F^{-1} t.
    let add_col = |a: &mut [i64], t: &mut [i64], i: usize, j: usize, c: i64| {
        for row in 0..n {
            a[row * n + i] += c * a[row * n + j];
        }
        for col in 0..n {
            t[j * n + col] -= c * t[i * n + col];
        }
    };
    let swap_rows = |a: &mut [i64], s: &mut [i64], i: usize, j: usize| {
        for col in 0..n {
            a.swap(i * n + col, j * n + col);
        }
        for row in 0..n {
            s.swap(row * n + i, row * n + j);
        }
    };
    let swap_cols = |a: &mut [i64], t: &mut [i64], i: usize, j: usize| {
        for row in 0..n {
            a.swap(row * n + i, row * n + j);
        }
        for col in 0..n {
            t.swap(i * n + col, j * n + col);
        }
    };

    for k in 0..n {
        loop {
            // move the smallest nonzero entry of the trailing block to (k, k)
            let (pi, pj) = (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[at(i, j)] != 0)
                .min_by_key(|&(i, j)| a[at(i, j)].abs())
                .expect("regular matrix has a nonzero trailing block");
            swap_rows(&mut a, &mut s, k, pi);
            swap_cols(&mut a, &mut t, k, pj);
            let pivot = a[at(k, k)];

            let mut clean = true;
            for i in k + 1..n {
                let q = a[at(i, k)].div_euclid(pivot);
                if q != 0 {
                    add_row(&mut a, &mut s, i, k, -q);
                }
                clean &= a[at(i, k)] == 0;
            }
            for j in k + 1..n {
                let q = a[at(k, j)].div_euclid(pivot);
                if q != 0 {
                    add_col(&mut a, &mut t, j, k, -q);
                }
                clean &= a[at(k, j)] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row k and retry
            let offending = (k + 1..n)
                .flat_map(|i| (k + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| a[at(i, j)] % pivot != 0);
            match offending {
                Some((i, _)) => add_row(&mut a, &mut s, k, i, 1),
                None => break,
            }
        }
        if a[at(k, k)] < 0 {
            for col in 0..n {
                a[at(k, col)] = -a[at(k, col)];
            }
            for row in 0..n {
                s[row * n + k] = -s[row * n + k];
            }
        }
    }

    let divisors: Vec<i64> = (0..n).map(|i| a[at(i, i)]).collect();
    let left_inv = intmat::unimodular_inverse(n, &s);
    let right_inv = intmat::unimodular_inverse(n, &t);
    Ok(SmithDecomposition {
        dim: n,
        left: s,
        divisors,
        right: t,
        left_inv,
        right_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    fn check(dim: usize, m: &[i64]) -> SmithDecomposition {
        let snf = smith_normal_form(dim, m).unwrap();
        assert_eq!(snf.product(), m, "S D T must reproduce M");
        assert_eq!(intmat::det(dim, snf.left()).abs(), 1);
        assert_eq!(intmat::det(dim, snf.right()).abs(), 1);
        let d = snf.divisors();
        assert!(d.iter().all(|&x| x > 0));
        for w in d.windows(2) {
            assert_eq!(w[1] % w[0], 0, "divisibility chain {d:?}");
        }
        assert_eq!(d.iter().product::<i64>(), intmat::det(dim, m).abs());
        snf
    }

    #[test]
    fn diagonal_is_already_normal() {
        let snf = check(2, &[2, 0, 0, 4]);
        assert_eq!(snf.divisors(), &[2, 4]);
        assert_eq!(snf.left(), &[1, 0, 0, 1]);
        assert_eq!(snf.right(), &[1, 0, 0, 1]);
    }

    #[test]
    fn quincunx_divisors() {
        // first divisor is the gcd of all entries, the product is |det|
        let m = [64, 64, -64, 64];
        let snf = check(2, &m);
        let g = m.iter().fold(0, |acc, &x| gcd(acc, x));
        assert_eq!(g, 64);
        assert_eq!(snf.divisors(), &[64, 8192 / 64]);
    }

    #[test]
    fn triangular_divisors() {
        let snf = check(2, &[2, 1, 0, 2]);
        assert_eq!(snf.divisors(), &[1, 4]);
    }

    #[test]
    fn assorted_matrices() {
        check(2, &[4, -2, 4, 14]);
        check(2, &[128, 272, 0, 128]);
        check(2, &[6, 0, 0, 4]);
        check(3, &[2, 0, 0, 0, 3, 0, 0, 0, 5]);
        check(3, &[4, 1, 2, -3, 6, 0, 1, 1, 8]);
        check(1, &[-7]);
    }

    #[test]
    fn singular_is_rejected() {
        assert_eq!(
            smith_normal_form(2, &[1, 2, 2, 4]),
            Err(Error::ZeroDeterminant)
        );
    }
}
