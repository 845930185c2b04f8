//! Local polynomial regression for 1-D scattered data, with the estimator's
//! equivalent kernel in closed form and the machinery to reason about it:
//! moment-condition classification, discrete sign-change analysis, recovery
//! of non-negative fit weights from a representable kernel, and numerical
//! comparison of weighting functions on symmetric designs.
//!
//! The math is generic over the scalar type ([`Scalar`]: f32 or f64);
//! the `*64` aliases at the crate root cover the common case.
//!
//! ```
//! use locpoly::{fit_local_poly, Design, LprSpec, SampleSet, WeightScheme};
//!
//! let design: Design<f64> = Design::new(&[0.0, 0.5, 1.0, 1.5, 2.0, 2.5])?;
//! let samples = SampleSet::new(
//!     &design,
//!     design.points().iter().map(|&x| x * x).collect(),
//! )?;
//! // First derivative of x^2 at t = 1.2, local quadratic, bandwidth 1.5.
//! let spec = LprSpec::new(1.2, 1, 3, 1.5, WeightScheme::Quadratic)?;
//! let estimate = fit_local_poly(&design, &samples, &spec)?;
//! assert!((estimate.value - 2.4).abs() < 1e-10);
//! # Ok::<(), locpoly::Error>(())
//! ```

mod analysis;
mod decompose;
mod design;
mod equivalence;
mod error;
mod lpr;
mod scalar;

pub use analysis::{
    check_kernel_equality, count_sign_changes, effective_degree, moment_residuals, KernelEqualityReport,
    MomentReport, SignChangeReport, DEFAULT_EQUALITY_TOL, DEFAULT_MOMENT_TOL, DEFAULT_ZERO_TOL_REL,
};
pub use decompose::{
    build_h_polynomial, decompose_kernel, extract_weights, sign_change_nodes,
    verify_decomposition, DecompositionCheck, LprRepresentation, NodePolynomial, NodeSet,
};
pub use design::{
    eval_weights, symmetric_design, Design, LprSpec, SampleSet, WeightScheme, WeightTable,
    MAX_MOMENT_ORDER,
};
pub use equivalence::{
    compare_weightings, degree_drop_check, parity_check, weighting_identity_residual,
    DegreeDropReport, EquivalenceReport, Parity,
};
pub use error::{Error, Result};
pub use lpr::{
    equivalent_kernel, equivalent_kernel_weighted, estimate_curve, factor_polynomial,
    factor_polynomial_weighted, fit_coefficients, fit_local_poly, moment_matrix, Estimate,
    FactorPolynomial, KernelVector, MomentMatrix,
};
pub use scalar::Scalar;

/// Double-precision aliases for the main types.
pub type Design64 = Design<f64>;
pub type SampleSet64 = SampleSet<f64>;
pub type WeightScheme64 = WeightScheme<f64>;
pub type LprSpec64 = LprSpec<f64>;
pub type Estimate64 = Estimate<f64>;
pub type KernelVector64 = KernelVector<f64>;
pub type FactorPolynomial64 = FactorPolynomial<f64>;
pub type MomentReport64 = MomentReport<f64>;
pub type LprRepresentation64 = LprRepresentation<f64>;
pub type EquivalenceReport64 = EquivalenceReport<f64>;
