//! Basic Scheme for the discretised Lippmann-Schwinger equation
//!
//! `E_y + [Gammap (C - C0) : (E + eps0)]_y = 0`
//!
//! on the coefficients `E_y` of fundamental-interpolant translates, plus
//! residuals of both discretised formulations and effective stiffness
//! extraction.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{StiffnessField, SymField};
use crate::green::GreenTable;
use crate::tensor::{sym_size, SymTensor2, SymTensor4};

/// Default stopping tolerance on the relative Cauchy error.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Cauchy errors below this are treated as converged noise when checking
/// for monotone decrease.
pub const MONOTONE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iter: usize,
    /// Fail with [`Error::MonotoneViolation`] when the Cauchy error grows
    /// after the first iteration.
    pub enforce_monotone: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
            enforce_monotone: true,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(tolerance: f64, max_iter: usize) -> Self {
        Self {
            tolerance,
            max_iter,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Fluctuation coefficients `E_y`; the total strain is `E_y + eps0`.
    pub strain: SymField,
    pub iterations: usize,
    /// Relative Cauchy error after each iteration.
    pub residual_history: Vec<f64>,
    /// Mean stress `(1/m) sum_y C(y) : (E_y + eps0)` (real part).
    pub effective_action: SymTensor2,
    /// Largest imaginary part in the strain coefficients.
    pub imaginary_part: f64,
    pub macro_strain: SymTensor2,
    pub wall_time: Duration,
}

impl SolveReport {
    /// Total strain `E_y + eps0`.
    pub fn total_strain(&self) -> SymField {
        self.strain.add_constant(&self.macro_strain)
    }

    pub fn final_error(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let eff: Vec<String> = self
            .effective_action
            .mandel()
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect();
        format!(
            "iterations: {}\nfinal_cauchy_error: {:.16e}\neffective_action: [{}]\nmax_imaginary_part: {:.3e}\nwall_time_s: {:.3}\n",
            self.iterations,
            self.final_error(),
            eff.join(", "),
            self.imaginary_part,
            self.wall_time.as_secs_f64()
        )
    }
}

/// Isotropic reference stiffness with Lamé parameters at the midpoint of
/// their pointwise range over the field.
pub fn default_reference(stiffness: &StiffnessField) -> Result<SymTensor4> {
    let (mut lmin, mut lmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut mmin, mut mmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in stiffness.values() {
        let (l, m) = c.lame_estimate();
        lmin = lmin.min(l);
        lmax = lmax.max(l);
        mmin = mmin.min(m);
        mmax = mmax.max(m);
    }
    if stiffness.is_empty() {
        return Err(Error::InvalidMaterial("empty stiffness field".into()));
    }
    SymTensor4::from_lame(stiffness.dim(), 0.5 * (lmin + lmax), 0.5 * (mmin + mmax))
}

fn check_inputs(
    stiffness: &StiffnessField,
    eps0: &SymTensor2,
    table: &GreenTable,
) -> Result<()> {
    if stiffness.len() != table.len() || stiffness.dim() != table.dim() {
        return Err(Error::ShapeMismatch(format!(
            "stiffness field (d={}, m={}) vs Green table (d={}, m={})",
            stiffness.dim(),
            stiffness.len(),
            table.dim(),
            table.len()
        )));
    }
    if eps0.dim() != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: table.dim(),
            found: eps0.dim(),
        });
    }
    Ok(())
}

/// `(C(y) - C0) : (E_y + eps0)` for every point, component-major.
fn polarisation(
    delta: &[SymTensor4],
    strain: &[Vec<Complex64>],
    eps0: &SymTensor2,
    out: &mut [Vec<Complex64>],
) {
    let ns = out.len();
    let e0 = eps0.mandel();
    out.par_iter_mut().enumerate().for_each(|(a, dst)| {
        for (y, v) in dst.iter_mut().enumerate() {
            let row = &delta[y].rows()[a];
            let mut s = Complex64::default();
            for b in 0..ns {
                s += (strain[b][y] + e0[b]) * row[b];
            }
            *v = s;
        }
    });
}

fn field_norm(comps: &[Vec<Complex64>]) -> f64 {
    comps
        .iter()
        .flatten()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Fixed-point iteration `E^{n+1} = -Gammap (C - C0) : (E^n + eps0)`,
/// `E^0 = 0`, until the relative Cauchy error drops below the tolerance.
pub fn basic_scheme(
    stiffness: &StiffnessField,
    reference: &SymTensor4,
    eps0: &SymTensor2,
    table: &GreenTable,
    options: &SolverOptions,
) -> Result<SolveReport> {
    check_inputs(stiffness, eps0, table)?;
    if !(options.tolerance > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "tolerance must be positive, got {}",
            options.tolerance
        )));
    }
    let lower = stiffness.min_ellipticity();
    if !(lower > 0.0) {
        return Err(Error::NonElliptic(lower));
    }
    let start = Instant::now();
    let dim = table.dim();
    let m = table.len();
    let ns = sym_size(dim);
    let delta: Vec<SymTensor4> = stiffness.values().iter().map(|c| *c - *reference).collect();
    let e0 = eps0.mandel();
    let e0_norm_sqr = m as f64 * e0.iter().map(|v| v * v).sum::<f64>();

    let mut strain = vec![vec![Complex64::default(); m]; ns];
    let mut next = vec![vec![Complex64::default(); m]; ns];
    let mut history = Vec::new();

    for iteration in 1..=options.max_iter {
        polarisation(&delta, &strain, eps0, &mut next);
        table.apply_components(&mut next)?;

        let (mut diff, mut total, mut cross) = (0.0, 0.0, 0.0);
        for (a, (n, s)) in next.iter_mut().zip(&strain).enumerate() {
            for (v, old) in n.iter_mut().zip(s) {
                *v = -*v;
                diff += (*v - old).norm_sqr();
                total += v.norm_sqr();
                cross += v.re * e0[a];
            }
        }
        // ||E + eps0||^2 = ||E||^2 + 2 Re<E, eps0> + m |eps0|^2
        let denom = (total + 2.0 * cross + e0_norm_sqr).max(0.0).sqrt();
        let diff = diff.sqrt();
        let error = if denom > 0.0 { diff / denom } else { diff };
        std::mem::swap(&mut strain, &mut next);

        if options.enforce_monotone && history.len() >= 2 {
            let previous: f64 = *history.last().unwrap();
            if error > previous && previous > MONOTONE_FLOOR {
                return Err(Error::MonotoneViolation {
                    iteration,
                    previous,
                    current: error,
                });
            }
        }
        history.push(error);
        log::trace!("iteration {iteration}: cauchy error {error:e}");

        if error <= options.tolerance {
            let strain = SymField::from_components(dim, strain)?;
            let effective = effective_action(stiffness, &strain, eps0)?;
            return Ok(SolveReport {
                imaginary_part: strain.max_imag(),
                strain,
                iterations: iteration,
                residual_history: history,
                effective_action: effective,
                macro_strain: *eps0,
                wall_time: start.elapsed(),
            });
        }
    }
    Err(Error::NotConverged {
        max_iter: options.max_iter,
        last_error: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// `|| E + Gammap (C - C0) : (E + eps0) ||_2` over the pattern.
pub fn residual_ls(
    strain: &SymField,
    stiffness: &StiffnessField,
    reference: &SymTensor4,
    eps0: &SymTensor2,
    table: &GreenTable,
) -> Result<f64> {
    check_inputs(stiffness, eps0, table)?;
    let delta: Vec<SymTensor4> = stiffness.values().iter().map(|c| *c - *reference).collect();
    let mut tau = vec![vec![Complex64::default(); table.len()]; sym_size(table.dim())];
    check_field(strain, table)?;
    polarisation(&delta, strain.components(), eps0, &mut tau);
    table.apply_components(&mut tau)?;
    for (t, e) in tau.iter_mut().zip(strain.components()) {
        for (x, y) in t.iter_mut().zip(e) {
            *x += y;
        }
    }
    Ok(field_norm(&tau))
}

/// `|| C0 Gammap C : (E + eps0) ||_2` over the pattern.
pub fn residual_variational(
    strain: &SymField,
    stiffness: &StiffnessField,
    reference: &SymTensor4,
    eps0: &SymTensor2,
    table: &GreenTable,
) -> Result<f64> {
    check_inputs(stiffness, eps0, table)?;
    check_field(strain, table)?;
    let mut stress = vec![vec![Complex64::default(); table.len()]; sym_size(table.dim())];
    polarisation(stiffness.values(), strain.components(), eps0, &mut stress);
    table.apply_components(&mut stress)?;
    let projected = SymField::from_components(table.dim(), stress)?;
    let out = StiffnessField::homogeneous(table.len(), *reference).apply(&projected)?;
    Ok(out.norm())
}

fn check_field(strain: &SymField, table: &GreenTable) -> Result<()> {
    if strain.len() != table.len() || strain.dim() != table.dim() {
        return Err(Error::ShapeMismatch(format!(
            "strain field (d={}, m={}) vs Green table (d={}, m={})",
            strain.dim(),
            strain.len(),
            table.dim(),
            table.len()
        )));
    }
    Ok(())
}

/// Mean stress `(1/m) sum_y C(y) : (E_y + eps0)`, real part.
pub fn effective_action(
    stiffness: &StiffnessField,
    strain: &SymField,
    eps0: &SymTensor2,
) -> Result<SymTensor2> {
    if strain.len() != stiffness.len() || strain.dim() != stiffness.dim() {
        return Err(Error::ShapeMismatch(format!(
            "stiffness field (d={}, m={}) vs strain field (d={}, m={})",
            stiffness.dim(),
            stiffness.len(),
            strain.dim(),
            strain.len()
        )));
    }
    let stress = stiffness.apply(&strain.add_constant(eps0))?;
    let mut out = SymTensor2::zeros(stiffness.dim());
    for (o, v) in out.mandel_mut().iter_mut().zip(stress.mean()) {
        *o = v.re;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EffectiveTensor {
    /// Symmetrised effective stiffness.
    pub tensor: SymTensor4,
    /// `||C - C^T|| / ||C||` of the raw column assembly.
    pub asymmetry: f64,
    pub reports: Vec<SolveReport>,
}

/// One solve per Mandel basis strain; columns are the effective actions.
pub fn effective_tensor(
    stiffness: &StiffnessField,
    reference: &SymTensor4,
    table: &GreenTable,
    options: &SolverOptions,
) -> Result<EffectiveTensor> {
    let dim = table.dim();
    let ns = sym_size(dim);
    let reports = (0..ns)
        .map(|b| basic_scheme(stiffness, reference, &SymTensor2::basis(dim, b), table, options))
        .collect::<Result<Vec<_>>>()?;
    let mut raw = SymTensor4::zeros(dim);
    for (b, r) in reports.iter().enumerate() {
        for (a, &v) in r.effective_action.mandel().iter().enumerate() {
            raw.set(a, b, v);
        }
    }
    let norm = raw.norm();
    let asymmetry = if norm > 0.0 {
        (raw - raw.transpose()).norm() / norm
    } else {
        0.0
    };
    Ok(EffectiveTensor {
        tensor: raw.symmetrized(),
        asymmetry,
        reports,
    })
}
