//! Kernel classification and comparison.
//!
//! A kernel is of type (q, p) when `(1/m!) sum_i (x_i - t)^m K_i` equals 1
//! at `m = q` and 0 at every other `m < p`. [`moment_residuals`] measures
//! how far a kernel is from that, with residuals normalized so the verdict
//! is meaningful across kernel scales. [`count_sign_changes`] implements the
//! discrete sign-change count: a change between positions j and j+k needs
//! strictly opposite signs at the endpoints and zeros strictly between.

use crate::error::{Error, Result};
use crate::lpr::{FactorPolynomial, KernelVector};
use crate::scalar::{cast, factorial, Scalar};

/// Default tolerance for the normalized moment-condition test.
pub const DEFAULT_MOMENT_TOL: f64 = 1e-8;
/// Default relative threshold below which a value counts as zero.
pub const DEFAULT_ZERO_TOL_REL: f64 = 1e-12;
/// Default tolerance for kernel-equality verdicts, relative to the largest
/// kernel magnitude.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-10;

/// Outcome of testing a kernel against the (q, p) moment conditions.
#[derive(Debug, Clone)]
pub struct MomentReport<T> {
    /// `r_m = (1/m!) sum_i (x_i - t)^m K_i - delta_{m,q}` for m = 0..p-1.
    pub residuals: Vec<T>,
    /// `n_m = 1 + (1/m!) sum_i |x_i - t|^m |K_i|`; always >= 1.
    pub normalizers: Vec<T>,
    /// True iff `|r_m| <= tol * n_m` for every m.
    pub passed: bool,
    pub tol: T,
}

impl<T: Scalar> MomentReport<T> {
    /// Largest normalized residual and the moment order where it occurs.
    pub fn worst(&self) -> (usize, T) {
        let mut worst = (0, T::zero());
        for (m, (&r, &n)) in self.residuals.iter().zip(&self.normalizers).enumerate() {
            let normalized = r.abs() / n;
            if normalized > worst.1 {
                worst = (m, normalized);
            }
        }
        worst
    }
}

/// Test a kernel against the moment conditions for type (q, p).
pub fn moment_residuals<T: Scalar>(
    kernel: &KernelVector<T>,
    q: usize,
    p: usize,
    tol: T,
) -> MomentReport<T> {
    assert!(q < p, "derivative order must be below the moment order");
    let t = kernel.t;
    let mut residuals = Vec::with_capacity(p);
    let mut normalizers = Vec::with_capacity(p);
    for m in 0..p {
        let inv_fact = factorial::<T>(m).recip();
        let mut sum = T::zero();
        let mut abs_sum = T::zero();
        for (&x, &k) in kernel.design().points().iter().zip(kernel.values()) {
            let offset_pow = (x - t).powi(m as i32);
            sum = sum + offset_pow * k;
            abs_sum = abs_sum + offset_pow.abs() * k.abs();
        }
        let target = if m == q { T::one() } else { T::zero() };
        residuals.push(inv_fact * sum - target);
        normalizers.push(T::one() + inv_fact * abs_sum);
    }
    let passed = residuals
        .iter()
        .zip(&normalizers)
        .all(|(&r, &n)| r.abs() <= tol * n);
    MomentReport {
        residuals,
        normalizers,
        passed,
        tol,
    }
}

/// Discrete sign changes of a value sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChangeReport {
    /// Number of sign changes.
    pub count: usize,
    /// 0-based index pairs (j, j+k): opposite strict signs at the endpoints,
    /// every value strictly between classified zero. Ordered, one per change.
    pub change_spans: Vec<(usize, usize)>,
    /// Absolute threshold actually applied: `zero_tol_rel * max|v|`.
    pub zero_tol: f64,
}

/// Count sign changes, classifying entries with `|v| <= zero_tol_rel * max|v|`
/// as zero. Leading and trailing zeros never contribute.
pub fn count_sign_changes<T: Scalar>(values: &[T], zero_tol_rel: T) -> SignChangeReport {
    assert!(!values.is_empty(), "sequence must be non-empty");
    let max_abs = values.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let threshold = zero_tol_rel * max_abs;
    let mut change_spans = Vec::new();
    let mut last: Option<(usize, bool)> = None; // (index, is_positive) of last nonzero
    for (i, &v) in values.iter().enumerate() {
        if v.abs() <= threshold {
            continue;
        }
        let positive = v > T::zero();
        if let Some((j, was_positive)) = last {
            if was_positive != positive {
                change_spans.push((j, i));
            }
        }
        last = Some((i, positive));
    }
    SignChangeReport {
        count: change_spans.len(),
        change_spans,
        zero_tol: threshold.to_f64().unwrap_or(f64::NAN),
    }
}

/// Diagnostic comparison of two kernels that claim the same type (q, p).
///
/// If both satisfy the moment conditions, their difference is orthogonal to
/// every polynomial of degree < p over the design; the report carries those
/// orthogonality sums (in the scaled variable, normalized like the moment
/// residuals) alongside the plain max difference.
#[derive(Debug, Clone)]
pub struct KernelEqualityReport<T> {
    /// `max_i |K1_i - K2_i|`.
    pub max_diff: T,
    /// Normalized `sum_i (K1_i - K2_i) u_i^m` for m = 0..p-1, with
    /// `u_i = (x_i - t)/h` and the same `1 + sum |.|` normalizer family
    /// used by the moment test.
    pub orthogonality: Vec<T>,
    /// True iff `max_diff <= tol * max(max|K1|, max|K2|)`.
    pub equal: bool,
    pub tol: T,
}

/// Compare two kernels on the same design and estimation point.
pub fn check_kernel_equality<T: Scalar>(
    k1: &KernelVector<T>,
    k2: &KernelVector<T>,
    p: usize,
    tol: T,
) -> Result<KernelEqualityReport<T>> {
    if !k1.same_frame(k2) {
        return Err(Error::MismatchedKernels);
    }
    let t = k1.t;
    let h = k1.h;
    let max_diff = k1
        .values()
        .iter()
        .zip(k2.values())
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
    let mut orthogonality = Vec::with_capacity(p);
    for m in 0..p {
        let mut sum = T::zero();
        let mut abs_sum = T::zero();
        for ((&x, &a), &b) in k1
            .design()
            .points()
            .iter()
            .zip(k1.values())
            .zip(k2.values())
        {
            let u_pow = ((x - t) / h).powi(m as i32);
            sum = sum + (a - b) * u_pow;
            abs_sum = abs_sum + (a.abs() + b.abs()) * u_pow.abs();
        }
        orthogonality.push(sum / (T::one() + abs_sum));
    }
    let scale = k1.max_abs().max(k2.max_abs());
    let equal = max_diff <= tol * scale;
    Ok(KernelEqualityReport {
        max_diff,
        orthogonality,
        equal,
        tol,
    })
}

/// Largest coefficient index whose magnitude exceeds `rel_tol` times the
/// largest coefficient magnitude; 0 when everything is below threshold.
pub fn effective_degree<T: Scalar>(poly: &FactorPolynomial<T>, rel_tol: T) -> usize {
    let coeffs = poly.coeffs();
    assert!(!coeffs.is_empty(), "coefficient sequence must be non-empty");
    let max_abs = coeffs.iter().fold(T::zero(), |acc, &c| acc.max(c.abs()));
    let threshold = rel_tol * max_abs;
    coeffs
        .iter()
        .rposition(|&c| c.abs() > threshold)
        .unwrap_or(0)
}

pub(crate) fn default_zero_tol<T: Scalar>() -> T {
    cast::<T>(DEFAULT_ZERO_TOL_REL)
}
