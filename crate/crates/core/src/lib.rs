//! Homogenization of periodic linear elasticity on anisotropic lattices.
//!
//! The Lippmann-Schwinger equation is discretised in spaces spanned by the
//! translates of a periodic kernel along a pattern `P(M)`, for Dirichlet,
//! de la Vallée Poussin and periodised Box-spline kernels.

// Positivity checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod field;
pub mod geometry;
pub mod green;
mod intmat;
pub mod kernels;
pub mod lattice;
pub mod metrics;
pub mod smith;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use fft::{PatternFft, Scaling};
pub use field::{StiffnessField, SymField};
pub use geometry::{
    laminate_effective_oracle, rasterize_hashin, rasterize_laminate, HashinGeometry, HashinPhase,
    LaminateGeometry, Rasterized,
};
pub use green::{apply_green, green_multiplier, periodised_green_table, GreenOperator, GreenTable};
pub use kernels::{CoefficientTable, KernelKind, KernelSpec};
pub use lattice::{GeneratingSet, Pattern, PatternMatrix};
pub use metrics::{error_metrics, restrict_field, ErrorMetrics, MetricMode};
pub use smith::SmithDecomposition;
pub use solver::{
    basic_scheme, default_reference, effective_action, effective_tensor, residual_ls,
    residual_variational, EffectiveTensor, SolveReport, SolverOptions,
};
pub use tensor::{SymTensor2, SymTensor4};
