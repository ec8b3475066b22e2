//! Benchmark microstructures on the unit cell `[-1/2, 1/2)^d` and the
//! closed-form laminate oracle.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::StiffnessField;
use crate::lattice::Pattern;
use crate::tensor::{mandel_pairs, sym_size, SymTensor4};

/// Phase labels of the Hashin-type geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HashinPhase {
    Core = 0,
    Coating = 1,
    Matrix = 2,
}

impl HashinPhase {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Two confocal ellipses (core and coating) in a surrounding matrix,
/// rotated about the cell centre.
#[derive(Debug, Clone, PartialEq)]
pub struct HashinGeometry {
    pub c1: f64,
    pub c2: f64,
    /// Confocal offset of the outer ellipse: semi-axes `sqrt(c_i^2 + rho)`.
    pub rho_outer: f64,
    /// Rotation in degrees.
    pub rotation: f64,
    pub core: SymTensor4,
    pub coating: SymTensor4,
    pub matrix: SymTensor4,
}

impl HashinGeometry {
    /// Core `E = 1`, coating `E = 10` (`nu = 0.3`), `c = (0.05, 0.35)`,
    /// `rho = 0.09`, rotated by 60 degrees, with the given matrix material.
    pub fn standard(matrix: SymTensor4) -> Result<Self> {
        let dim = matrix.dim();
        let geom = Self {
            c1: 0.05,
            c2: 0.35,
            rho_outer: 0.09,
            rotation: 60.0,
            core: SymTensor4::isotropic(dim, 1.0, 0.3)?,
            coating: SymTensor4::isotropic(dim, 10.0, 0.3)?,
            matrix,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1 < self.c2) {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < c1 < c2, got c1 = {}, c2 = {}",
                self.c1, self.c2
            )));
        }
        if !(self.rho_outer > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "rho_outer must be positive, got {}",
                self.rho_outer
            )));
        }
        if !self.rotation.is_finite() {
            return Err(Error::InvalidGeometry("rotation must be finite".into()));
        }
        for (name, c) in [("core", &self.core), ("coating", &self.coating), ("matrix", &self.matrix)] {
            if c.dim() != 2 {
                return Err(Error::InvalidGeometry(format!(
                    "{name} material must be two-dimensional"
                )));
            }
            if !c.is_elliptic() {
                return Err(Error::NonElliptic(c.ellipticity_bounds().0));
            }
        }
        Ok(())
    }

    pub fn materials(&self) -> [SymTensor4; 3] {
        [self.core, self.coating, self.matrix]
    }

    /// Phase at a point of the unit cell.
    pub fn phase_at(&self, x: &[f64]) -> HashinPhase {
        let (s, c) = (-self.rotation.to_radians()).sin_cos();
        let u = c * x[0] - s * x[1];
        let v = s * x[0] + c * x[1];
        let (a2, b2) = (self.c1 * self.c1, self.c2 * self.c2);
        if u * u / a2 + v * v / b2 <= 1.0 {
            HashinPhase::Core
        } else if u * u / (a2 + self.rho_outer) + v * v / (b2 + self.rho_outer) <= 1.0 {
            HashinPhase::Coating
        } else {
            HashinPhase::Matrix
        }
    }
}

/// Rasterised stiffness plus the phase label of every pattern point.
#[derive(Debug, Clone)]
pub struct Rasterized {
    pub stiffness: StiffnessField,
    pub phases: Vec<usize>,
}

impl Rasterized {
    /// Fraction of points carrying each phase label.
    pub fn fractions(&self, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        for &p in &self.phases {
            out[p] += 1.0;
        }
        let m = self.phases.len() as f64;
        out.iter_mut().for_each(|v| *v /= m);
        out
    }
}

/// Pointwise phase sampling of the Hashin geometry on a two-dimensional
/// pattern.
pub fn rasterize_hashin(pattern: &Pattern, geom: &HashinGeometry) -> Result<Rasterized> {
    geom.validate()?;
    if pattern.dim() != 2 {
        return Err(Error::InvalidGeometry(format!(
            "Hashin geometry needs a 2-D pattern, got d = {}",
            pattern.dim()
        )));
    }
    let phases: Vec<usize> = (0..pattern.len())
        .map(|i| geom.phase_at(&pattern.point(i)).index())
        .collect();
    Ok(Rasterized {
        stiffness: StiffnessField::from_phases(&phases, &geom.materials())?,
        phases,
    })
}

/// Layers orthogonal to a coordinate axis: phase 1 occupies
/// `x_normal in [-1/2, -1/2 + f1)`, phase 2 the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateGeometry {
    /// Axis of the layer normal.
    pub normal: usize,
    pub volume_fraction: f64,
    pub phase1: SymTensor4,
    pub phase2: SymTensor4,
}

impl LaminateGeometry {
    pub fn new(normal: usize, volume_fraction: f64, phase1: SymTensor4, phase2: SymTensor4) -> Result<Self> {
        let geom = Self {
            normal,
            volume_fraction,
            phase1,
            phase2,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn dim(&self) -> usize {
        self.phase1.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.phase1.dim() != self.phase2.dim() {
            return Err(Error::InvalidGeometry("phases differ in dimension".into()));
        }
        if self.normal >= self.dim() {
            return Err(Error::InvalidGeometry(format!(
                "normal axis {} out of range for d = {}",
                self.normal,
                self.dim()
            )));
        }
        if !(self.volume_fraction > 0.0 && self.volume_fraction <= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "volume fraction must lie in (0, 1], got {}",
                self.volume_fraction
            )));
        }
        Ok(())
    }

    pub fn phase_at(&self, x: &[f64]) -> usize {
        usize::from(x[self.normal] >= -0.5 + self.volume_fraction)
    }
}

pub fn rasterize_laminate(pattern: &Pattern, geom: &LaminateGeometry) -> Result<Rasterized> {
    geom.validate()?;
    if pattern.dim() != geom.dim() {
        return Err(Error::InvalidGeometry(format!(
            "laminate is {}-D, pattern is {}-D",
            geom.dim(),
            pattern.dim()
        )));
    }
    let phases: Vec<usize> = (0..pattern.len())
        .map(|i| geom.phase_at(&pattern.point(i)))
        .collect();
    Ok(Rasterized {
        stiffness: StiffnessField::from_phases(&phases, &[geom.phase1, geom.phase2])?,
        phases,
    })
}

/// Exact effective stiffness of a two-phase laminate.
///
/// For a macroscopic strain, tangential strain components are shared by both
/// phases, normal tractions are continuous, and the normal strain components
/// average to the macroscopic ones; the effective action is the averaged
/// stress.
pub fn laminate_effective_oracle(geom: &LaminateGeometry) -> Result<SymTensor4> {
    geom.validate()?;
    for c in [&geom.phase1, &geom.phase2] {
        let lower = c.ellipticity_bounds().0;
        if !(lower > 0.0) {
            return Err(Error::NonElliptic(lower));
        }
    }
    let dim = geom.dim();
    let ns = sym_size(dim);
    let n = geom.normal;
    let (normal, tangential): (Vec<usize>, Vec<usize>) =
        (0..ns).partition(|&a| mandel_pairs(dim)[a].0 == n || mandel_pairs(dim)[a].1 == n);
    let k = normal.len();
    let f1 = geom.volume_fraction;
    let f2 = 1.0 - f1;
    let c1 = geom.phase1.to_dmatrix();
    let c2 = geom.phase2.to_dmatrix();

    // unknowns: normal components of eps1 (k), then of eps2 (k)
    let mut lhs = DMatrix::<f64>::zeros(2 * k, 2 * k);
    for (r, &a) in normal.iter().enumerate() {
        lhs[(r, r)] = f1;
        lhs[(r, k + r)] = f2;
        for (s, &b) in normal.iter().enumerate() {
            lhs[(k + r, s)] = c1[(a, b)];
            lhs[(k + r, k + s)] = -c2[(a, b)];
        }
    }
    let lu = lhs.lu();

    let mut out = SymTensor4::zeros(dim);
    for col in 0..ns {
        let mut mean = vec![0.0; ns];
        mean[col] = 1.0;
        let mut rhs = DVector::<f64>::zeros(2 * k);
        for (r, &a) in normal.iter().enumerate() {
            rhs[r] = mean[a];
            // (C1 eps1)_a - (C2 eps2)_a with shared tangential part moved right
            rhs[k + r] = tangential
                .iter()
                .map(|&t| (c2[(a, t)] - c1[(a, t)]) * mean[t])
                .sum::<f64>();
        }
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidGeometry("singular interface system".into()))?;
        let mut e1 = DVector::<f64>::zeros(ns);
        let mut e2 = DVector::<f64>::zeros(ns);
        for &t in &tangential {
            e1[t] = mean[t];
            e2[t] = mean[t];
        }
        for (r, &a) in normal.iter().enumerate() {
            e1[a] = sol[r];
            e2[a] = sol[k + r];
        }
        let stress = &c1 * e1 * f1 + &c2 * e2 * f2;
        for a in 0..ns {
            out.set(a, col, stress[a]);
        }
    }
    Ok(out)
}
