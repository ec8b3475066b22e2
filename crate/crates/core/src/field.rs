//! Tensor fields sampled on a pattern.
//!
//! Fields hold one value per pattern point, in the point order of
//! [`Pattern`](crate::lattice::Pattern). Strain-like fields are complex: the
//! coefficients of a translate space are complex in general, and the
//! half-open Dirichlet spectrum pairs some classes `h` with a `-h` class that
//! carries a different Green block, so real input does not always stay real.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{sym_size, SymTensor2, SymTensor4};

/// Symmetric second-order tensor field, stored component-major in Mandel
/// coordinates: `component(a)[y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymField {
    dim: usize,
    len: usize,
    comps: Vec<Vec<Complex64>>,
}

impl SymField {
    pub fn zeros(dim: usize, len: usize) -> Self {
        crate::tensor::check_dim(dim).expect("supported dimension");
        Self {
            dim,
            len,
            comps: vec![vec![Complex64::default(); len]; sym_size(dim)],
        }
    }

    pub fn constant(len: usize, value: &SymTensor2) -> Self {
        let comps = value
            .mandel()
            .iter()
            .map(|&v| vec![Complex64::new(v, 0.0); len])
            .collect();
        Self {
            dim: value.dim(),
            len,
            comps,
        }
    }

    /// From real point values.
    pub fn from_points(dim: usize, values: &[SymTensor2]) -> Result<Self> {
        let mut out = Self::zeros(dim, values.len());
        for (y, v) in values.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            for (a, &c) in v.mandel().iter().enumerate() {
                out.comps[a][y] = Complex64::new(c, 0.0);
            }
        }
        Ok(out)
    }

    /// From component arrays (`n_s` arrays of equal length).
    pub fn from_components(dim: usize, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        crate::tensor::check_dim(dim)?;
        let ns = sym_size(dim);
        if comps.len() != ns {
            return Err(Error::DimensionMismatch {
                expected: ns,
                found: comps.len(),
            });
        }
        let len = comps[0].len();
        if let Some(bad) = comps.iter().find(|c| c.len() != len) {
            return Err(Error::LengthMismatch {
                expected: len,
                found: bad.len(),
            });
        }
        Ok(Self { dim, len, comps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of pattern points.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    pub fn component(&self, a: usize) -> &[Complex64] {
        &self.comps[a]
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    /// Mandel components at point `y`.
    pub fn at(&self, y: usize) -> Vec<Complex64> {
        self.comps.iter().map(|c| c[y]).collect()
    }

    /// Real part of the value at point `y`.
    pub fn real_at(&self, y: usize) -> SymTensor2 {
        let mut out = SymTensor2::zeros(self.dim);
        for (a, v) in out.mandel_mut().iter_mut().enumerate() {
            *v = self.comps[a][y].re;
        }
        out
    }

    pub fn set(&mut self, y: usize, value: &[Complex64]) {
        for (a, &v) in value.iter().enumerate() {
            self.comps[a][y] = v;
        }
    }

    /// Largest imaginary part over all points and components.
    pub fn max_imag(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max)
    }

    /// `l2` norm over points of the Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.comps.iter().flatten().map(|v| v.norm_sqr()).sum()
    }

    /// `<self, other> = sum_y self_y : conj(other_y)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_shape(other)?;
        Ok(self
            .comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| x * y.conj())
            .sum())
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.len != other.len {
            return Err(Error::ShapeMismatch(format!(
                "field (d={}, m={}) vs (d={}, m={})",
                self.dim, self.len, other.dim, other.len
            )));
        }
        Ok(())
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
        Ok(out)
    }

    /// Adds the same tensor at every point.
    pub fn add_constant(&self, value: &SymTensor2) -> Self {
        let mut out = self.clone();
        for (c, &v) in out.comps.iter_mut().zip(value.mandel()) {
            for x in c.iter_mut() {
                *x += v;
            }
        }
        out
    }

    /// Mean over points. Summed as deviations from the first value, so a
    /// constant field returns that constant exactly.
    pub fn mean(&self) -> Vec<Complex64> {
        let inv = 1.0 / self.len as f64;
        self.comps
            .iter()
            .map(|c| match c.first() {
                Some(&first) => first + c.iter().map(|v| v - first).sum::<Complex64>() * inv,
                None => Complex64::default(),
            })
            .collect()
    }

    /// Field whose value at `y` is this field's value at `source(y)`.
    pub fn permuted(&self, source: impl Fn(usize) -> usize) -> Self {
        let mut out = self.clone();
        for (dst, src) in out.comps.iter_mut().zip(&self.comps) {
            for (y, v) in dst.iter_mut().enumerate() {
                *v = src[source(y)];
            }
        }
        out
    }
}

/// Fourth-order stiffness at every pattern point.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessField {
    dim: usize,
    values: Vec<SymTensor4>,
}

impl StiffnessField {
    pub fn new(dim: usize, values: Vec<SymTensor4>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, values })
    }

    pub fn homogeneous(len: usize, stiffness: SymTensor4) -> Self {
        Self {
            dim: stiffness.dim(),
            values: vec![stiffness; len],
        }
    }

    /// Assigns `materials[phase[y]]` to each point.
    pub fn from_phases(phases: &[usize], materials: &[SymTensor4]) -> Result<Self> {
        let dim = materials
            .first()
            .map(SymTensor4::dim)
            .ok_or_else(|| Error::InvalidMaterial("no materials given".into()))?;
        let values = phases
            .iter()
            .map(|&p| {
                materials.get(p).copied().ok_or_else(|| {
                    Error::InvalidMaterial(format!("phase {p} has no material"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[SymTensor4] {
        &self.values
    }

    pub fn get(&self, y: usize) -> &SymTensor4 {
        &self.values[y]
    }

    /// Smallest lower ellipticity bound over all points.
    pub fn min_ellipticity(&self) -> f64 {
        self.values
            .par_iter()
            .map(|c| c.ellipticity_bounds().0)
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// `(C(y) - offset) : field(y)` at every point.
    pub fn apply_shifted(&self, field: &SymField, offset: Option<&SymTensor4>) -> Result<SymField> {
        if field.len() != self.len() || field.dim() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "stiffness field (d={}, m={}) vs strain field (d={}, m={})",
                self.dim,
                self.len(),
                field.dim(),
                field.len()
            )));
        }
        let ns = sym_size(self.dim);
        let mut out = SymField::zeros(self.dim, self.len());
        let mut x = [Complex64::default(); crate::tensor::MAX_SYM];
        for (y, c) in self.values.iter().enumerate() {
            let c = match offset {
                Some(o) => *c - *o,
                None => *c,
            };
            for (a, xa) in x.iter_mut().enumerate().take(ns) {
                *xa = field.comps[a][y];
            }
            for a in 0..ns {
                let row = &c.rows()[a];
                let mut s = Complex64::default();
                for b in 0..ns {
                    s += x[b] * row[b];
                }
                out.comps[a][y] = s;
            }
        }
        Ok(out)
    }

    /// `C(y) : field(y)`.
    pub fn apply(&self, field: &SymField) -> Result<SymField> {
        self.apply_shifted(field, None)
    }

    /// Stiffness field shifted cyclically: value at `y` is taken from `source(y)`.
    pub fn permuted(&self, source: impl Fn(usize) -> usize) -> Self {
        Self {
            dim: self.dim,
            values: (0..self.len()).map(|y| self.values[source(y)]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_mean_and_norm() {
        let e = SymTensor2::from_mandel(2, &[1.0, 2.0, 3.0]).unwrap();
        let f = SymField::constant(4, &e);
        assert_eq!(f.len(), 4);
        let mean = f.mean();
        assert!((mean[1].re - 2.0).abs() < 1e-15);
        assert!((f.norm_sqr() - 4.0 * 14.0).abs() < 1e-12);
        assert_eq!(f.real_at(2), e);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = SymField::zeros(2, 4);
        let b = SymField::zeros(2, 5);
        assert!(matches!(a.inner(&b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn stiffness_apply_is_pointwise() {
        let c1 = SymTensor4::identity(2);
        let c2 = c1 * 3.0;
        let field = StiffnessField::from_phases(&[0, 1, 1], &[c1, c2]).unwrap();
        let e = SymTensor2::from_mandel(2, &[1.0, 0.0, -1.0]).unwrap();
        let s = field.apply(&SymField::constant(3, &e)).unwrap();
        assert_eq!(s.real_at(0), e);
        assert_eq!(s.real_at(2), e * 3.0);
        let shifted = field.apply_shifted(&SymField::constant(3, &e), Some(&c1)).unwrap();
        assert_eq!(shifted.real_at(0).norm(), 0.0);
    }
}
