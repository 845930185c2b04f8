//! The weighted local polynomial fit and its closed-form equivalent kernel.
//!
//! At an estimation point `t` with non-negative weights `w_i`, the degree
//! `p-1` local fit solves the scaled normal equations
//!
//! ```text
//! sum_j d_kj (a_j h^j) = m_k,   k = 0..p-1
//! d_kj = (1/(N h)) sum_i u_i^{k+j} w_i,   m_k = (1/(N h)) sum_i u_i^k w_i y_i
//! ```
//!
//! with `u_i = (x_i - t) / h`. The bandwidth `h` only scales the system for
//! conditioning; the recovered coefficients do not depend on it. Solving
//! against the q-th unit vector instead of `m` yields row q of the inverse
//! moment matrix, which packages the whole estimator as one kernel row:
//! `K_i = w_i * P(u_i)` where `P` is the factor polynomial with coefficients
//! `c_k = q!/(N h^{q+1}) * dinv_qk`.

use crate::design::{eval_weights, Design, LprSpec, SampleSet};
use crate::error::{Error, Result};
use crate::scalar::{cast, factorial, Scalar};

/// Relative pivot threshold for declaring the moment system singular.
const PIVOT_THRESHOLD_REL: f64 = 1e-12;

/// The symmetric p x p scaled moment matrix `d_kj`.
#[derive(Debug, Clone)]
pub struct MomentMatrix<T> {
    /// Power sums S_m = (1/(N h)) sum_i u_i^m w_i for m = 0..=2(p-1).
    /// Entry (k, j) is S_{k+j}, so symmetry is exact by construction.
    power_sums: Vec<T>,
    p: usize,
    scale: T,
    effective_support: usize,
}

impl<T: Scalar> MomentMatrix<T> {
    pub fn order(&self) -> usize {
        self.p
    }

    /// The scaling bandwidth used to build the system.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// Number of points with strictly positive weight.
    pub fn effective_support(&self) -> usize {
        self.effective_support
    }

    pub fn entry(&self, k: usize, j: usize) -> T {
        self.power_sums[k + j]
    }

    fn dense(&self) -> Vec<Vec<T>> {
        (0..self.p)
            .map(|k| (0..self.p).map(|j| self.entry(k, j)).collect())
            .collect()
    }
}

/// Build the moment matrix for explicit weights.
pub fn moment_matrix<T: Scalar>(
    design: &Design<T>,
    weights: &[T],
    t: T,
    h: T,
    p: usize,
) -> MomentMatrix<T> {
    assert_eq!(weights.len(), design.len(), "weights must align to the design");
    assert!(h > T::zero(), "bandwidth must be positive");
    debug_assert!(
        weights.iter().all(|&w| w >= T::zero()),
        "weights must be non-negative"
    );
    let n_scale = T::from_usize(design.len()).unwrap() * h;
    let mut power_sums = vec![T::zero(); 2 * p - 1];
    let mut effective_support = 0;
    for (&x, &w) in design.points().iter().zip(weights) {
        if w > T::zero() {
            effective_support += 1;
            let u = (x - t) / h;
            let mut term = w;
            for sum in power_sums.iter_mut() {
                *sum = *sum + term;
                term = term * u;
            }
        }
    }
    for sum in power_sums.iter_mut() {
        *sum = *sum / n_scale;
    }
    MomentMatrix {
        power_sums,
        p,
        scale: h,
        effective_support,
    }
}

/// Solve `matrix * x = rhs` by Gaussian elimination with partial pivoting.
/// A pivot below `PIVOT_THRESHOLD_REL` times the largest initial diagonal
/// entry is treated as rank deficiency.
#[allow(clippy::needless_range_loop)] // elimination touches two rows at once
fn solve_moment_system<T: Scalar>(matrix: &MomentMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    let p = matrix.order();
    if matrix.effective_support() < p {
        return Err(Error::SingularSystem {
            supported: matrix.effective_support(),
            needed: p,
        });
    }
    let mut a = matrix.dense();
    let mut b = rhs.to_vec();
    let max_diag = (0..p).fold(T::zero(), |acc, k| acc.max(a[k][k].abs()));
    let threshold = cast::<T>(PIVOT_THRESHOLD_REL) * max_diag;

    for col in 0..p {
        let mut pivot_row = col;
        let mut pivot_mag = a[col][col].abs();
        for row in col + 1..p {
            let mag = a[row][col].abs();
            if mag > pivot_mag {
                pivot_row = row;
                pivot_mag = mag;
            }
        }
        if pivot_mag <= threshold {
            return Err(Error::SingularPivot {
                pivot: pivot_mag.to_f64().unwrap_or(f64::NAN),
                threshold: threshold.to_f64().unwrap_or(f64::NAN),
                step: col,
            });
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            b.swap(col, pivot_row);
        }
        let pivot = a[col][col];
        for row in col + 1..p {
            let factor = a[row][col] / pivot;
            if factor != T::zero() {
                for j in col..p {
                    a[row][j] = a[row][j] - factor * a[col][j];
                }
                b[row] = b[row] - factor * b[col];
            }
        }
    }

    let mut x = vec![T::zero(); p];
    for row in (0..p).rev() {
        let mut acc = b[row];
        for j in row + 1..p {
            acc = acc - a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Result of one local polynomial fit.
#[derive(Debug, Clone)]
pub struct Estimate<T> {
    /// The derivative estimate `q! * a_q`.
    pub value: T,
    /// Local polynomial coefficients `a_0..a_{p-1}` (in the raw variable
    /// `x - t`), so `value == q! * coefficients[q]` by construction.
    pub coefficients: Vec<T>,
    /// The specification that produced this estimate.
    pub spec: LprSpec<T>,
}

/// Kernel row of a linear estimator: the estimate is `sum_i values[i] * y_i`.
#[derive(Debug, Clone)]
pub struct KernelVector<T> {
    values: Vec<T>,
    design: Design<T>,
    pub t: T,
    pub q: usize,
    pub p: usize,
    pub h: T,
}

impl<T: Scalar> KernelVector<T> {
    /// Wrap raw kernel values; used for externally supplied kernels.
    pub fn new(design: Design<T>, values: Vec<T>, t: T, q: usize, p: usize, h: T) -> Result<Self> {
        if values.len() != design.len() {
            return Err(Error::LengthMismatch {
                expected: design.len(),
                actual: values.len(),
            });
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "kernel value",
                    index,
                });
            }
        }
        if p == 0 || p > crate::design::MAX_MOMENT_ORDER {
            return Err(Error::MomentOrder {
                p,
                max: crate::design::MAX_MOMENT_ORDER,
            });
        }
        if q >= p {
            return Err(Error::DerivativeOrder { q, p });
        }
        if h <= T::zero() || !h.is_finite() {
            return Err(Error::InvalidBandwidth);
        }
        Ok(KernelVector {
            values,
            design,
            t,
            q,
            p,
            h,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn design(&self) -> &Design<T> {
        &self.design
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Apply the estimator to a sample set.
    pub fn apply(&self, samples: &SampleSet<T>) -> T {
        self.values
            .iter()
            .zip(samples.values())
            .fold(T::zero(), |acc, (&k, &y)| acc + k * y)
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// True when both kernels live on the same design and estimation point.
    pub fn same_frame(&self, other: &Self) -> bool {
        self.t == other.t && self.design == other.design
    }
}

/// The polynomial factor of an equivalent kernel, in the scaled variable
/// `u = (x - t) / h`, with the prefactor `q!/(N h^{q+1})` folded into the
/// coefficients: `K_i = w_i * eval_scaled(u_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPolynomial<T> {
    coeffs: Vec<T>,
    pub t: T,
    pub h: T,
}

impl<T: Scalar> FactorPolynomial<T> {
    pub fn new(coeffs: Vec<T>, t: T, h: T) -> Self {
        FactorPolynomial { coeffs, t, h }
    }

    /// Coefficients `c_0..c_{p-1}` in the scaled variable.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Evaluate at a scaled abscissa (Horner).
    pub fn eval_scaled(&self, u: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * u + c)
    }

    /// Evaluate at a raw abscissa.
    pub fn eval_at(&self, x: T) -> T {
        self.eval_scaled((x - self.t) / self.h)
    }
}

fn sample_moments<T: Scalar>(
    design: &Design<T>,
    samples: &SampleSet<T>,
    weights: &[T],
    t: T,
    h: T,
    p: usize,
) -> Vec<T> {
    let n_scale = T::from_usize(design.len()).unwrap() * h;
    let mut rhs = vec![T::zero(); p];
    for ((&x, &w), &y) in design.points().iter().zip(weights).zip(samples.values()) {
        if w > T::zero() {
            let u = (x - t) / h;
            let mut term = w * y;
            for entry in rhs.iter_mut() {
                *entry = *entry + term;
                term = term * u;
            }
        }
    }
    for entry in rhs.iter_mut() {
        *entry = *entry / n_scale;
    }
    rhs
}

/// Fit with explicit weights; the general entry point behind all spec-based
/// operations. Returns the local polynomial coefficients `a_0..a_{p-1}`.
pub fn fit_coefficients<T: Scalar>(
    design: &Design<T>,
    samples: &SampleSet<T>,
    weights: &[T],
    t: T,
    h: T,
    p: usize,
) -> Result<Vec<T>> {
    let matrix = moment_matrix(design, weights, t, h, p);
    let rhs = sample_moments(design, samples, weights, t, h, p);
    let scaled = solve_moment_system(&matrix, &rhs)?;
    // scaled[j] = a_j h^j
    let mut coefficients = Vec::with_capacity(p);
    let mut h_pow = T::one();
    for &b in &scaled {
        coefficients.push(b / h_pow);
        h_pow = h_pow * h;
    }
    Ok(coefficients)
}

/// Solve the weighted local polynomial fit and return the derivative
/// estimate together with all local coefficients.
pub fn fit_local_poly<T: Scalar>(
    design: &Design<T>,
    samples: &SampleSet<T>,
    spec: &LprSpec<T>,
) -> Result<Estimate<T>> {
    let weights = eval_weights(&spec.scheme, design, spec.t, spec.h);
    let coefficients = fit_coefficients(design, samples, &weights, spec.t, spec.h, spec.p)?;
    let value = factorial::<T>(spec.q) * coefficients[spec.q];
    Ok(Estimate {
        value,
        coefficients,
        spec: spec.clone(),
    })
}

/// Factor polynomial for explicit weights:
/// `c_k = q!/(N h^{q+1}) * dinv_qk`, obtained by solving against the q-th
/// unit vector rather than inverting the full matrix.
pub fn factor_polynomial_weighted<T: Scalar>(
    design: &Design<T>,
    weights: &[T],
    t: T,
    h: T,
    q: usize,
    p: usize,
) -> Result<FactorPolynomial<T>> {
    assert!(q < p, "derivative order must be below the moment order");
    let matrix = moment_matrix(design, weights, t, h, p);
    let mut unit = vec![T::zero(); p];
    unit[q] = T::one();
    let inverse_row = solve_moment_system(&matrix, &unit)?;
    let n = T::from_usize(design.len()).unwrap();
    let prefactor = factorial::<T>(q) / (n * h.powi(q as i32 + 1));
    let coeffs = inverse_row.iter().map(|&d| prefactor * d).collect();
    Ok(FactorPolynomial::new(coeffs, t, h))
}

/// Equivalent kernel for explicit weights: `K_i = w_i * P(u_i)`.
pub fn equivalent_kernel_weighted<T: Scalar>(
    design: &Design<T>,
    weights: &[T],
    t: T,
    h: T,
    q: usize,
    p: usize,
) -> Result<KernelVector<T>> {
    let factor = factor_polynomial_weighted(design, weights, t, h, q, p)?;
    let values = design
        .points()
        .iter()
        .zip(weights)
        .map(|(&x, &w)| {
            if w > T::zero() {
                w * factor.eval_scaled((x - t) / h)
            } else {
                T::zero()
            }
        })
        .collect();
    Ok(KernelVector {
        values,
        design: design.clone(),
        t,
        q,
        p,
        h,
    })
}

/// Closed-form kernel of the local fit described by `spec`.
pub fn equivalent_kernel<T: Scalar>(design: &Design<T>, spec: &LprSpec<T>) -> Result<KernelVector<T>> {
    let weights = eval_weights(&spec.scheme, design, spec.t, spec.h);
    equivalent_kernel_weighted(design, &weights, spec.t, spec.h, spec.q, spec.p)
}

/// Factor polynomial of the local fit described by `spec`.
pub fn factor_polynomial<T: Scalar>(
    design: &Design<T>,
    spec: &LprSpec<T>,
) -> Result<FactorPolynomial<T>> {
    let weights = eval_weights(&spec.scheme, design, spec.t, spec.h);
    factor_polynomial_weighted(design, &weights, spec.t, spec.h, spec.q, spec.p)
}

/// Evaluate the fit over a grid of estimation points. Failures are collected
/// per grid point; any failure aborts the whole evaluation with the list of
/// offending points.
pub fn estimate_curve<T: Scalar>(
    design: &Design<T>,
    samples: &SampleSet<T>,
    base_spec: &LprSpec<T>,
    grid: &[T],
) -> Result<Vec<Estimate<T>>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut estimates = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for &t in grid {
        match fit_local_poly(design, samples, &base_spec.at(t)) {
            Ok(est) => estimates.push(est),
            Err(_) => failures.push(t.to_f64().unwrap_or(f64::NAN)),
        }
    }
    if failures.is_empty() {
        Ok(estimates)
    } else {
        Err(Error::CurveFailures { points: failures })
    }
}
