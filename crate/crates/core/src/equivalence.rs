//! Numerical comparison of weighting functions.
//!
//! On a design that is mirror-symmetric about the estimation point, and with
//! an even gap p - q, the weightings 1-y, 1+y and 1-y^2 all induce the same
//! estimator even though the linear ones are lopsided. This module measures
//! that equivalence directly: pairwise kernel differences, kernel parity
//! against the design's mirror pairing, the degree drop of the quadratic
//! weighting's factor polynomial, and the pointwise factorization identity
//! `(1-y^2) Q3(y) = (1-y) * [(1+y) Q3(y)]` that ties the weightings together.

use crate::analysis::effective_degree;
use crate::design::{symmetry_tol, Design, LprSpec, WeightScheme};
use crate::error::{Error, Result};
use crate::lpr::{equivalent_kernel, factor_polynomial, KernelVector};
use crate::scalar::{cast, Scalar};

/// Parity of a kernel about the estimation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Neither => "neither",
        }
    }
}

/// Classify a kernel as even, odd, or neither about its estimation point,
/// at `tol` relative to the largest kernel magnitude. Returns `Neither`
/// when the design itself is not symmetric about `t`.
pub fn parity_check<T: Scalar>(kernel: &KernelVector<T>, tol: T) -> Parity {
    let design = kernel.design();
    if !design.is_symmetric_about(kernel.t, symmetry_tol(kernel.h)) {
        return Parity::Neither;
    }
    let threshold = tol * kernel.max_abs();
    let values = kernel.values();
    let n = values.len();
    let mut even = true;
    let mut odd = true;
    for i in 0..n / 2 + 1 {
        let a = values[i];
        let b = values[n - 1 - i];
        if (a - b).abs() > threshold {
            even = false;
        }
        if (a + b).abs() > threshold {
            odd = false;
        }
    }
    if even {
        Parity::Even
    } else if odd {
        Parity::Odd
    } else {
        Parity::Neither
    }
}

/// Side-by-side comparison of the kernels induced by several weightings.
#[derive(Debug, Clone)]
pub struct EquivalenceReport<T> {
    /// Names of the schemes compared, in input order.
    pub schemes: Vec<&'static str>,
    /// `pairwise_max_diff[a][b] = max_i |K^a_i - K^b_i|`; symmetric, zero diagonal.
    pub pairwise_max_diff: Vec<Vec<T>>,
    /// Parity classification of each kernel.
    pub parities: Vec<Parity>,
    /// True iff every pairwise difference is within `tol` of the largest
    /// kernel magnitude.
    pub equal: bool,
    pub tol: T,
    pub t: T,
    pub q: usize,
    pub p: usize,
    pub h: T,
    /// Whether the design is mirror-symmetric about `t`.
    pub symmetric_design: bool,
    /// Whether p - q is even (the hypothesis under which equality is expected).
    pub order_gap_even: bool,
    /// The kernels themselves, aligned with `schemes`.
    pub kernels: Vec<KernelVector<T>>,
}

/// Compute the equivalent kernel per scheme and report pairwise differences
/// and parities. A singular system for any scheme aborts the comparison,
/// naming the scheme.
pub fn compare_weightings<T: Scalar>(
    design: &Design<T>,
    t: T,
    h: T,
    q: usize,
    p: usize,
    schemes: &[WeightScheme<T>],
    tol: T,
) -> Result<EquivalenceReport<T>> {
    let mut kernels = Vec::with_capacity(schemes.len());
    for scheme in schemes {
        let spec = LprSpec::new(t, q, p, h, scheme.clone())?;
        let kernel = equivalent_kernel(design, &spec).map_err(|e| Error::SchemeFailure {
            scheme: scheme.name().to_string(),
            source: Box::new(e),
        })?;
        kernels.push(kernel);
    }
    let scale = kernels
        .iter()
        .fold(T::zero(), |acc, k| acc.max(k.max_abs()));
    let m = kernels.len();
    let mut pairwise_max_diff = vec![vec![T::zero(); m]; m];
    let mut equal = true;
    for a in 0..m {
        for b in a + 1..m {
            let diff = kernels[a]
                .values()
                .iter()
                .zip(kernels[b].values())
                .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()));
            pairwise_max_diff[a][b] = diff;
            pairwise_max_diff[b][a] = diff;
            if diff > tol * scale {
                equal = false;
            }
        }
    }
    let parities = kernels.iter().map(|k| parity_check(k, tol)).collect();
    Ok(EquivalenceReport {
        schemes: schemes.iter().map(|s| s.name()).collect(),
        pairwise_max_diff,
        parities,
        equal,
        tol,
        t,
        q,
        p,
        h,
        symmetric_design: design.is_symmetric_about(t, symmetry_tol(h)),
        order_gap_even: (p - q).is_multiple_of(2),
        kernels,
    })
}

/// Effective degree of the quadratic weighting's factor polynomial against
/// the p-2 bound it must satisfy on a symmetric design with even p - q.
#[derive(Debug, Clone)]
pub struct DegreeDropReport<T> {
    pub effective_degree: usize,
    /// The bound p - 2.
    pub bound: usize,
    pub within_bound: bool,
    pub coeffs: Vec<T>,
}

/// Verify the degree drop of the quadratic weighting's factor polynomial.
pub fn degree_drop_check<T: Scalar>(
    design: &Design<T>,
    t: T,
    h: T,
    q: usize,
    p: usize,
) -> Result<DegreeDropReport<T>> {
    if !design.is_symmetric_about(t, symmetry_tol(h)) {
        return Err(Error::AsymmetricDesign {
            t: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(p - q).is_multiple_of(2) {
        return Err(Error::OrderGapParity { q, p });
    }
    let spec = LprSpec::new(t, q, p, h, WeightScheme::Quadratic)?;
    let poly = factor_polynomial(design, &spec)?;
    let degree = effective_degree(&poly, cast::<T>(crate::analysis::DEFAULT_ZERO_TOL_REL));
    let bound = p - 2;
    Ok(DegreeDropReport {
        effective_degree: degree,
        bound,
        within_bound: degree <= bound,
        coeffs: poly.coeffs().to_vec(),
    })
}

/// Max normalized residual of `(1-y^2) Q3(y) = (1-y) [(1+y) Q3(y)]` over the
/// scaled abscissae, where Q3 is the quadratic weighting's factor polynomial.
/// Pure roundoff when the fit is solvable, so values sit near machine epsilon.
pub fn weighting_identity_residual<T: Scalar>(
    design: &Design<T>,
    t: T,
    h: T,
    q: usize,
    p: usize,
) -> Result<T> {
    let spec = LprSpec::new(t, q, p, h, WeightScheme::Quadratic)?;
    let q3 = factor_polynomial(design, &spec)?;
    let w3 = WeightScheme::Quadratic;
    let w1 = WeightScheme::LinearMinus;
    let mut max_residual = T::zero();
    let mut scale = T::zero();
    for &x in design.points() {
        let u = (x - t) / h;
        let q3_val = q3.eval_scaled(u);
        let lhs = w3.evaluate(u) * q3_val;
        let rhs = w1.evaluate(u) * ((T::one() + u) * q3_val);
        max_residual = max_residual.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs()).max(rhs.abs());
    }
    if scale > T::zero() {
        Ok(max_residual / scale)
    } else {
        Ok(max_residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::symmetric_design;
    use crate::lpr::KernelVector;

    fn toy_kernel(values: Vec<f64>) -> KernelVector<f64> {
        let d = Design::new(&[-1.0, 0.0, 1.0]).unwrap();
        KernelVector::new(d, values, 0.0, 0, 2, 1.0).unwrap()
    }

    #[test]
    fn parity_classification() {
        assert_eq!(parity_check(&toy_kernel(vec![1.0, 2.0, 1.0]), 1e-10), Parity::Even);
        assert_eq!(parity_check(&toy_kernel(vec![-3.0, 0.0, 3.0]), 1e-10), Parity::Odd);
        assert_eq!(
            parity_check(&toy_kernel(vec![1.0, 0.0, 2.0]), 1e-10),
            Parity::Neither
        );
    }

    #[test]
    fn parity_neither_on_asymmetric_design() {
        let d = Design::new(&[-1.0, 0.0, 2.0]).unwrap();
        let k = KernelVector::new(d, vec![1.0, 1.0, 1.0], 0.0, 0, 1, 1.0).unwrap();
        assert_eq!(parity_check(&k, 1e-10), Parity::Neither);
    }

    fn weighting_trio() -> Vec<WeightScheme<f64>> {
        vec![
            WeightScheme::LinearMinus,
            WeightScheme::LinearPlus,
            WeightScheme::Quadratic,
        ]
    }

    #[test]
    fn linear_and_quadratic_weightings_agree_on_symmetric_design() {
        let d = symmetric_design(0.0, 1.0, 2, true);
        let report = compare_weightings(&d, 0.0, 1.0, 0, 2, &weighting_trio(), 1e-10).unwrap();
        assert!(report.equal, "diffs {:?}", report.pairwise_max_diff);
        assert!(report.symmetric_design);
        assert!(report.order_gap_even);
        for parity in &report.parities {
            assert_eq!(*parity, Parity::Even);
        }
        for row in &report.pairwise_max_diff {
            for &v in row {
                assert!(v >= 0.0);
            }
        }
    }

    #[test]
    fn odd_derivative_gives_odd_kernels() {
        let d = symmetric_design(0.0, 1.0, 2, true);
        let report = compare_weightings(&d, 0.0, 1.0, 1, 3, &weighting_trio(), 1e-10).unwrap();
        assert!(report.equal);
        for parity in &report.parities {
            assert_eq!(*parity, Parity::Odd);
        }
    }

    #[test]
    fn asymmetric_design_breaks_the_equivalence() {
        let d = Design::new(&[-1.0, -0.4, 0.1, 0.7, 1.0]).unwrap();
        let report = compare_weightings(&d, 0.0, 1.0, 0, 2, &weighting_trio(), 1e-10).unwrap();
        assert!(!report.equal);
        assert!(!report.symmetric_design);
        // The negative control separates by far more than the verdict tolerance.
        let max_diff = report
            .pairwise_max_diff
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &v| acc.max(v));
        assert!(max_diff > 1e-3, "max diff {max_diff}");
    }

    #[test]
    fn singular_scheme_is_named() {
        // Three points: the quadratic weighting kills both edges, leaving a
        // single supported point, not enough for p = 2.
        let d = symmetric_design(0.0, 1.0, 1, true);
        let err = compare_weightings(&d, 0.0, 1.0, 0, 2, &weighting_trio(), 1e-10).unwrap_err();
        match err {
            Error::SchemeFailure { scheme, source } => {
                assert_eq!(scheme, "quadratic");
                assert!(source.is_numerical());
            }
            other => panic!("expected SchemeFailure, got {other:?}"),
        }
    }

    #[test]
    fn degree_drop_examples() {
        let d5 = symmetric_design(0.0, 1.0, 2, true);
        let report = degree_drop_check(&d5, 0.0, 1.0, 0, 2).unwrap();
        assert_eq!(report.effective_degree, 0);
        assert!(report.within_bound);

        let d7 = symmetric_design(0.0, 1.0, 3, true);
        let report = degree_drop_check(&d7, 0.0, 1.0, 0, 4).unwrap();
        assert_eq!(report.effective_degree, 2);

        let report = degree_drop_check(&d7, 0.0, 1.0, 2, 4).unwrap();
        assert!(report.effective_degree <= 2);
    }

    #[test]
    fn degree_drop_hypothesis_violations() {
        let skew = Design::new(&[-1.0, -0.4, 0.1, 0.7, 1.0]).unwrap();
        assert!(matches!(
            degree_drop_check(&skew, 0.0, 1.0, 0, 2).unwrap_err(),
            Error::AsymmetricDesign { .. }
        ));
        let d = symmetric_design(0.0, 1.0, 3, true);
        assert_eq!(
            degree_drop_check(&d, 0.0, 1.0, 0, 3).unwrap_err(),
            Error::OrderGapParity { q: 0, p: 3 }
        );
    }

    #[test]
    fn factorization_identity_is_roundoff_level() {
        let d = symmetric_design(0.0, 1.0, 3, true);
        let residual = weighting_identity_residual(&d, 0.0, 1.0, 0, 4).unwrap();
        assert!(residual <= 1e-12, "residual {residual}");
    }

    #[test]
    fn estimator_level_agreement_across_schemes() {
        use crate::SampleSet;
        let d = symmetric_design(0.0f64, 1.0, 4, false);
        let values: Vec<f64> = d.points().iter().map(|&x| (2.0 * x).cos() + x).collect();
        let samples = SampleSet::new(&d, values).unwrap();
        let report = compare_weightings(&d, 0.0, 1.0, 0, 2, &weighting_trio(), 1e-10).unwrap();
        assert!(report.equal);
        let estimates: Vec<f64> = report.kernels.iter().map(|k| k.apply(&samples)).collect();
        let scale = estimates.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        for pair in estimates.windows(2) {
            assert!((pair[0] - pair[1]).abs() <= 1e-10 * scale.max(1.0));
        }
    }
}
