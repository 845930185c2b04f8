//! Designs, samples, weight schemes, and fit specifications.
//!
//! A [`Design`] is the sorted set of measurement abscissae; a [`SampleSet`]
//! carries the measured values aligned to it. [`WeightScheme`] evaluates the
//! scaling weight function W on [-1, 1] and [`LprSpec`] bundles everything a
//! local fit needs: estimation point, derivative order, moment order,
//! bandwidth, and scheme.

use crate::error::{Error, Result};
use crate::scalar::{cast, weight_flush_threshold, Scalar};

/// Hard cap on the moment order: the p x p moment system loses too much
/// precision beyond this at double precision.
pub const MAX_MOMENT_ORDER: usize = 10;

/// Strictly increasing measurement abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Design<T> {
    points: Vec<T>,
    min_gap: T,
}

impl<T: Scalar> Design<T> {
    /// Validate raw abscissae into a design: sorts, rejects non-finite
    /// values and duplicates, and records the minimum adjacent gap.
    pub fn new(raw_points: &[T]) -> Result<Self> {
        if raw_points.is_empty() {
            return Err(Error::EmptyDesign);
        }
        for (index, x) in raw_points.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    what: "abscissa",
                    index,
                });
            }
        }
        let mut points = raw_points.to_vec();
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));
        let mut min_gap = T::infinity();
        for pair in points.windows(2) {
            let gap = pair[1] - pair[0];
            if gap == T::zero() {
                return Err(Error::DuplicateAbscissa {
                    value: pair[0].to_f64().unwrap_or(f64::NAN),
                });
            }
            min_gap = min_gap.min(gap);
        }
        Ok(Design { points, min_gap })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum adjacent gap; positive infinity for a single-point design.
    pub fn min_gap(&self) -> T {
        self.min_gap
    }

    /// Largest distance from `t` to any design point. This is the default
    /// bandwidth rule: it puts every scaled abscissa inside [-1, 1].
    pub fn max_distance_from(&self, t: T) -> T {
        self.points
            .iter()
            .fold(T::zero(), |acc, &x| acc.max((x - t).abs()))
    }

    /// Whether the point set is mirror-symmetric about `t`, testing paired
    /// offsets at `tol` (callers typically pass `1e-12 * h`). Designs that
    /// are merely close to symmetric beyond `tol` are reported asymmetric.
    pub fn is_symmetric_about(&self, t: T, tol: T) -> bool {
        let n = self.points.len();
        (0..n / 2 + 1).all(|i| {
            let left = self.points[i] - t;
            let right = self.points[n - 1 - i] - t;
            (left + right).abs() <= tol
        })
    }
}

/// Build a design symmetric about `t`: points `t ± (k / half_count) * h` for
/// `k = 1..=half_count`, plus `t` itself when `include_center` is set.
/// Offsets are computed once and mirrored, so symmetry holds bit-exactly at
/// the offset level.
pub fn symmetric_design<T: Scalar>(
    t: T,
    h: T,
    half_count: usize,
    include_center: bool,
) -> Design<T> {
    assert!(half_count >= 1, "half_count must be at least 1");
    assert!(h > T::zero() && h.is_finite(), "bandwidth must be positive");
    let offsets: Vec<T> = (1..=half_count)
        .map(|k| {
            let ratio = T::from_usize(k).unwrap() / T::from_usize(half_count).unwrap();
            ratio * h
        })
        .collect();
    let mut points = Vec::with_capacity(2 * half_count + 1);
    for &off in offsets.iter().rev() {
        points.push(t - off);
    }
    if include_center {
        points.push(t);
    }
    for &off in &offsets {
        points.push(t + off);
    }
    Design::new(&points).expect("mirrored offsets produce a valid design")
}

/// Measured values aligned to a design.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    values: Vec<T>,
}

impl<T: Scalar> SampleSet<T> {
    pub fn new(design: &Design<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != design.len() {
            return Err(Error::LengthMismatch {
                expected: design.len(),
                actual: values.len(),
            });
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "sample",
                    index,
                });
            }
        }
        Ok(SampleSet { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Tabulated weight function: piecewise-linear interpolation between
/// non-negative nodes on [-1, 1], zero outside the table's hull.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<T> {
    abscissae: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> WeightTable<T> {
    pub fn new(nodes: &[(T, T)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidWeightTable {
                reason: "table must contain at least one node".into(),
            });
        }
        let one = T::one();
        for &(y, w) in nodes {
            if !y.is_finite() || !w.is_finite() {
                return Err(Error::InvalidWeightTable {
                    reason: "table entries must be finite".into(),
                });
            }
            if y < -one || y > one {
                return Err(Error::InvalidWeightTable {
                    reason: format!("abscissa {y} outside [-1, 1]"),
                });
            }
            if w < T::zero() {
                return Err(Error::InvalidWeightTable {
                    reason: format!("negative weight {w}"),
                });
            }
        }
        for pair in nodes.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidWeightTable {
                    reason: "abscissae must be strictly increasing".into(),
                });
            }
        }
        Ok(WeightTable {
            abscissae: nodes.iter().map(|&(y, _)| y).collect(),
            values: nodes.iter().map(|&(_, w)| w).collect(),
        })
    }

    fn evaluate(&self, y: T) -> T {
        let n = self.abscissae.len();
        if y < self.abscissae[0] || y > self.abscissae[n - 1] {
            return T::zero();
        }
        // Linear interpolation between the two bracketing nodes; exact at nodes.
        match self
            .abscissae
            .binary_search_by(|a| a.partial_cmp(&y).expect("finite table"))
        {
            Ok(i) => self.values[i],
            Err(i) => {
                let (y0, y1) = (self.abscissae[i - 1], self.abscissae[i]);
                let (w0, w1) = (self.values[i - 1], self.values[i]);
                let frac = (y - y0) / (y1 - y0);
                w0 + frac * (w1 - w0)
            }
        }
    }
}

/// The scaling weight function W applied as `w_i = W((x_i - t) / h)`.
///
/// Every variant is non-negative on [-1, 1] and exactly zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme<T> {
    /// W(y) = 1
    Uniform,
    /// W(y) = 1 - y
    LinearMinus,
    /// W(y) = 1 + y
    LinearPlus,
    /// W(y) = 1 - y^2 (Bartlett-Priestley / Epanechnikov shape)
    Quadratic,
    /// Piecewise-linear interpolation of tabulated nodes.
    Tabulated(WeightTable<T>),
}

impl<T: Scalar> WeightScheme<T> {
    /// Evaluate W at a scaled abscissa.
    pub fn evaluate(&self, y: T) -> T {
        let one = T::one();
        if y < -one || y > one {
            return T::zero();
        }
        match self {
            WeightScheme::Uniform => one,
            WeightScheme::LinearMinus => one - y,
            WeightScheme::LinearPlus => one + y,
            WeightScheme::Quadratic => one - y * y,
            WeightScheme::Tabulated(table) => table.evaluate(y),
        }
    }

    /// Stable name, matching the CLI spelling.
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::LinearMinus => "linear-minus",
            WeightScheme::LinearPlus => "linear-plus",
            WeightScheme::Quadratic => "quadratic",
            WeightScheme::Tabulated(_) => "tabulated",
        }
    }
}

/// Evaluate the per-point weights `w_i = W((x_i - t) / h)`.
///
/// Results below the flush threshold are set to exact zero so that
/// effective-support counting can use a plain positivity test.
pub fn eval_weights<T: Scalar>(
    scheme: &WeightScheme<T>,
    design: &Design<T>,
    t: T,
    h: T,
) -> Vec<T> {
    assert!(h > T::zero(), "bandwidth must be positive");
    let flush = weight_flush_threshold::<T>();
    design
        .points()
        .iter()
        .map(|&x| {
            let w = scheme.evaluate((x - t) / h);
            if w < flush {
                T::zero()
            } else {
                w
            }
        })
        .collect()
}

/// Specification of one local polynomial fit.
///
/// `q` is the derivative order being estimated, `p` the number of moment
/// conditions (so the local polynomial has degree `p - 1`), `h` the
/// bandwidth, `t` the estimation point.
#[derive(Debug, Clone, PartialEq)]
pub struct LprSpec<T> {
    pub t: T,
    pub q: usize,
    pub p: usize,
    pub h: T,
    pub scheme: WeightScheme<T>,
}

impl<T: Scalar> LprSpec<T> {
    pub fn new(t: T, q: usize, p: usize, h: T, scheme: WeightScheme<T>) -> Result<Self> {
        if p == 0 || p > MAX_MOMENT_ORDER {
            return Err(Error::MomentOrder {
                p,
                max: MAX_MOMENT_ORDER,
            });
        }
        if q >= p {
            return Err(Error::DerivativeOrder { q, p });
        }
        if h <= T::zero() || !h.is_finite() {
            return Err(Error::InvalidBandwidth);
        }
        if !t.is_finite() {
            return Err(Error::NonFinite {
                what: "estimation point",
                index: 0,
            });
        }
        Ok(LprSpec { t, q, p, h, scheme })
    }

    /// Same spec at a different estimation point.
    pub fn at(&self, t: T) -> Self {
        LprSpec {
            t,
            ..(*self).clone()
        }
    }
}

/// Default tolerance for symmetry detection, scaled by the bandwidth.
pub(crate) fn symmetry_tol<T: Scalar>(h: T) -> T {
    cast::<T>(1e-12) * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_sorted_input() {
        let d = Design::new(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.min_gap(), 1.0);
        assert_eq!(d.points(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn validate_sorts_unsorted_input() {
        let d = Design::new(&[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.points(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn validate_rejects_duplicates() {
        assert_eq!(
            Design::new(&[0.0, 0.0, 1.0]).unwrap_err(),
            Error::DuplicateAbscissa { value: 0.0 }
        );
    }

    #[test]
    fn validate_rejects_non_finite_and_empty() {
        assert!(matches!(
            Design::new(&[0.0, f64::NAN]).unwrap_err(),
            Error::NonFinite { .. }
        ));
        assert_eq!(Design::new(&[] as &[f64]).unwrap_err(), Error::EmptyDesign);
    }

    #[test]
    fn single_point_design_has_infinite_gap() {
        let d = Design::<f64>::new(&[3.5]).unwrap();
        assert!(d.min_gap().is_infinite());
    }

    #[test]
    fn weights_quadratic_vanish_at_support_edge() {
        let d = Design::new(&[-1.0, 0.0, 1.0]).unwrap();
        let w = eval_weights(&WeightScheme::Quadratic, &d, 0.0, 1.0);
        assert_eq!(w, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn weights_linear_minus_examples() {
        let d = Design::new(&[-0.5, 0.0, 0.5]).unwrap();
        let w = eval_weights(&WeightScheme::LinearMinus, &d, 0.0, 1.0);
        assert_eq!(w, vec![1.5, 1.0, 0.5]);
    }

    #[test]
    fn weights_zero_outside_support() {
        let d = Design::new(&[0.0, 10.0]).unwrap();
        let w = eval_weights(&WeightScheme::Uniform, &d, 0.0, 1.0);
        assert_eq!(w, vec![1.0, 0.0]);
    }

    #[test]
    fn linear_edge_weights() {
        // At the support edges the linear schemes keep one side in support
        // with weight 2 while the other drops to exactly 0.
        let minus = WeightScheme::LinearMinus;
        let plus = WeightScheme::LinearPlus;
        assert_eq!(minus.evaluate(1.0), 0.0);
        assert_eq!(minus.evaluate(-1.0), 2.0);
        assert_eq!(plus.evaluate(-1.0), 0.0);
        assert_eq!(plus.evaluate(1.0), 2.0);
    }

    #[test]
    fn symmetric_design_with_center() {
        let d = symmetric_design(0.0, 1.0, 2, true);
        assert_eq!(d.points(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn symmetric_design_without_center() {
        let d = symmetric_design(3.0, 2.0, 1, false);
        assert_eq!(d.points(), &[1.0, 5.0]);
    }

    #[test]
    fn symmetric_design_reflects_exactly_at_origin() {
        let d = symmetric_design(0.0, 1.0, 5, false);
        let n = d.len();
        for i in 0..n {
            assert_eq!(d.points()[i], -d.points()[n - 1 - i]);
        }
        assert!(d.is_symmetric_about(0.0, 0.0));
    }

    #[test]
    fn symmetry_detection_tolerance() {
        let d = symmetric_design(0.37, 1.3, 4, true);
        assert!(d.is_symmetric_about(0.37, symmetry_tol(1.3)));
        let skewed = Design::new(&[-1.0, -0.4, 0.1, 0.7, 1.0]).unwrap();
        assert!(!skewed.is_symmetric_about(0.0, symmetry_tol(1.0)));
    }

    #[test]
    fn sample_set_validation() {
        let d = Design::new(&[0.0, 1.0]).unwrap();
        assert!(SampleSet::new(&d, vec![1.0, 2.0]).is_ok());
        assert_eq!(
            SampleSet::new(&d, vec![1.0]).unwrap_err(),
            Error::LengthMismatch {
                expected: 2,
                actual: 1
            }
        );
        assert!(matches!(
            SampleSet::new(&d, vec![1.0, f64::INFINITY]).unwrap_err(),
            Error::NonFinite { .. }
        ));
    }

    #[test]
    fn spec_validation() {
        let scheme = WeightScheme::Quadratic;
        assert!(LprSpec::new(0.0, 0, 2, 1.0, scheme.clone()).is_ok());
        assert_eq!(
            LprSpec::new(0.0, 2, 2, 1.0, scheme.clone()).unwrap_err(),
            Error::DerivativeOrder { q: 2, p: 2 }
        );
        assert_eq!(
            LprSpec::new(0.0, 0, 11, 1.0, scheme.clone()).unwrap_err(),
            Error::MomentOrder { p: 11, max: 10 }
        );
        assert_eq!(
            LprSpec::new(0.0, 0, 2, 0.0, scheme).unwrap_err(),
            Error::InvalidBandwidth
        );
    }

    #[test]
    fn tabulated_scheme_interpolates() {
        let table = WeightTable::new(&[(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).unwrap();
        let scheme = WeightScheme::Tabulated(table);
        assert_eq!(scheme.evaluate(0.0), 1.0);
        assert_eq!(scheme.evaluate(-0.5), 0.5);
        assert_eq!(scheme.evaluate(0.25), 0.75);
        assert_eq!(scheme.evaluate(1.5), 0.0);
    }

    #[test]
    fn tabulated_scheme_zero_outside_hull() {
        let table = WeightTable::new(&[(-0.5, 1.0), (0.5, 1.0)]).unwrap();
        let scheme = WeightScheme::Tabulated(table);
        assert_eq!(scheme.evaluate(0.75), 0.0);
        assert_eq!(scheme.evaluate(0.25), 1.0);
    }

    #[test]
    fn tabulated_validation_errors() {
        assert!(WeightTable::<f64>::new(&[]).is_err());
        assert!(WeightTable::new(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(WeightTable::new(&[(0.0, -1.0)]).is_err());
        assert!(WeightTable::new(&[(1.5, 1.0)]).is_err());
    }
}
