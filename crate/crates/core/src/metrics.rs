//! Error metrics against a reference solution, and restriction of fields
//! from a refined pattern.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{StiffnessField, SymField};
use crate::lattice::Pattern;
use crate::tensor::SymTensor2;

/// How the effective action entering `e_eff` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricMode {
    /// Mean total stress `(1/m) sum_y C(y) : (E_y + eps0)`.
    #[default]
    MeanStress,
    /// The plain sum `sum_y C(y) : E_y` over fluctuation coefficients, with
    /// neither the mean nor the macroscopic strain. Only comparable between
    /// runs on patterns of the same size.
    FluctuationSum,
}

impl MetricMode {
    pub fn name(self) -> &'static str {
        match self {
            MetricMode::MeanStress => "mean-stress",
            MetricMode::FluctuationSum => "fluctuation-sum",
        }
    }

    /// Effective action of a total strain field under this convention.
    pub fn action(
        self,
        stiffness: &StiffnessField,
        total_strain: &SymField,
        eps0: &SymTensor2,
    ) -> Result<SymTensor2> {
        let stress = match self {
            MetricMode::MeanStress => stiffness.apply(total_strain)?,
            MetricMode::FluctuationSum => stiffness.apply(&total_strain.add_constant(&(-*eps0)))?,
        };
        let mut out = SymTensor2::zeros(stiffness.dim());
        let scale = match self {
            MetricMode::MeanStress => 1.0,
            MetricMode::FluctuationSum => stress.len() as f64,
        };
        for (o, v) in out.mandel_mut().iter_mut().zip(stress.mean()) {
            *o = v.re * scale;
        }
        Ok(out)
    }
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-stress" => Ok(MetricMode::MeanStress),
            "fluctuation-sum" => Ok(MetricMode::FluctuationSum),
            other => Err(Error::InvalidSpec(format!(
                "unknown metric mode `{other}` (expected mean-stress or fluctuation-sum)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMetrics {
    /// Relative error of the effective action.
    pub e_eff: f64,
    /// Relative `l2` error of the total strain coefficients over pattern
    /// points (complex modulus).
    pub e_l2: f64,
    /// `log(1 + |eps_ref_11 - eps_11|)` at every point.
    pub e_log: Vec<f64>,
}

/// Compares a total strain field with a reference on the same pattern.
pub fn error_metrics(
    solution: &SymField,
    reference: &SymField,
    stiffness: &StiffnessField,
    eps0: &SymTensor2,
    ref_effective: &SymTensor2,
    mode: MetricMode,
) -> Result<ErrorMetrics> {
    if solution.len() != reference.len() || solution.dim() != reference.dim() {
        return Err(Error::PatternMismatch(format!(
            "solution has {} points, reference has {}",
            solution.len(),
            reference.len()
        )));
    }
    let action = mode.action(stiffness, solution, eps0)?;
    let ref_norm = ref_effective.norm();
    let diff = (action - *ref_effective).norm();
    let e_eff = if ref_norm > 0.0 { diff / ref_norm } else { diff };

    let (mut num, mut den) = (0.0, 0.0);
    let mut e_log = Vec::with_capacity(solution.len());
    for y in 0..solution.len() {
        let a = solution.at(y);
        let b = reference.at(y);
        num += a.iter().zip(&b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>();
        den += b.iter().map(|v| v.norm_sqr()).sum::<f64>();
        e_log.push((b[0] - a[0]).norm().ln_1p());
    }
    let e_l2 = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(ErrorMetrics { e_eff, e_l2, e_log })
}

/// Restricts a field on a refined pattern to the points of a coarser one.
pub fn restrict_field(fine: &Pattern, field: &SymField, coarse: &Pattern) -> Result<SymField> {
    if field.len() != fine.len() {
        return Err(Error::PatternMismatch(format!(
            "field has {} points, fine pattern has {}",
            field.len(),
            fine.len()
        )));
    }
    let mut out = SymField::zeros(field.dim(), coarse.len());
    for y in 0..coarse.len() {
        let src = fine
            .index_of_rational(coarse.numerators(y), coarse.denominator())
            .ok_or_else(|| {
                Error::PatternMismatch(format!(
                    "point {:?}/{} of the coarse pattern is not on the fine pattern",
                    coarse.numerators(y),
                    coarse.denominator()
                ))
            })?;
        out.set(y, &field.at(src));
    }
    Ok(out)
}
