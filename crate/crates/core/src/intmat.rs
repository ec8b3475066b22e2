//! Small dense integer matrix helpers (row-major, square).

pub(crate) fn identity(dim: usize) -> Vec<i64> {
    let mut out = vec![0; dim * dim];
    for i in 0..dim {
        out[i * dim + i] = 1;
    }
    out
}

pub(crate) fn transpose(dim: usize, a: &[i64]) -> Vec<i64> {
    let mut out = vec![0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j];
        }
    }
    out
}

pub(crate) fn mul(dim: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == 0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

pub(crate) fn mul_vec(dim: usize, a: &[i64], v: &[i64]) -> Vec<i64> {
    (0..dim)
        .map(|i| (0..dim).map(|j| a[i * dim + j] * v[j]).sum())
        .collect()
}

/// Exact determinant via fraction-free (Bareiss) elimination.
pub(crate) fn det(dim: usize, a: &[i64]) -> i64 {
    if dim == 0 {
        return 1;
    }
    let mut m: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..dim.saturating_sub(1) {
        if m[k * dim + k] == 0 {
            let Some(swap) = (k + 1..dim).find(|&r| m[r * dim + k] != 0) else {
                return 0;
            };
            for c in 0..dim {
                m.swap(k * dim + c, swap * dim + c);
            }
            sign = -sign;
        }
        let pivot = m[k * dim + k];
        for i in k + 1..dim {
            for j in k + 1..dim {
                m[i * dim + j] = (m[i * dim + j] * pivot - m[i * dim + k] * m[k * dim + j]) / prev;
            }
        }
        prev = pivot;
    }
    (sign * m[dim * dim - 1]) as i64
}

/// Adjugate matrix, so that `a * adj(a) = det(a) * I`.
pub(crate) fn adjugate(dim: usize, a: &[i64]) -> Vec<i64> {
    if dim == 1 {
        return vec![1];
    }
    let mut out = vec![0; dim * dim];
    let mut minor = vec![0; (dim - 1) * (dim - 1)];
    for i in 0..dim {
        for j in 0..dim {
            let mut idx = 0;
            for r in (0..dim).filter(|&r| r != i) {
                for c in (0..dim).filter(|&c| c != j) {
                    minor[idx] = a[r * dim + c];
                    idx += 1;
                }
            }
            let cofactor = det(dim - 1, &minor);
            let signed = if (i + j) % 2 == 0 { cofactor } else { -cofactor };
            // adj = cofactor matrix transposed
            out[j * dim + i] = signed;
        }
    }
    out
}

/// Inverse of a unimodular matrix (|det| = 1), exact.
pub(crate) fn unimodular_inverse(dim: usize, a: &[i64]) -> Vec<i64> {
    let d = det(dim, a);
    debug_assert!(d.abs() == 1, "matrix is not unimodular");
    adjugate(dim, a).into_iter().map(|x| x * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small_cases() {
        assert_eq!(det(2, &[4, -2, 4, 14]), 64);
        assert_eq!(det(2, &[64, 64, -64, 64]), 8192);
        assert_eq!(det(3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]), -1);
        assert_eq!(det(3, &[2, 0, 0, 0, 3, 0, 1, 1, 5]), 30);
        assert_eq!(det(2, &[1, 2, 2, 4]), 0);
    }

    #[test]
    fn adjugate_inverts() {
        let a = [3, 1, -2, 2, 5, 1, 0, 4, 7];
        let adj = adjugate(3, &a);
        let prod = mul(3, &a, &adj);
        let d = det(3, &a);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(prod[i * 3 + j], if i == j { d } else { 0 });
            }
        }
    }
}
