//! Recovery of a non-negative-weight local fit from a kernel.
//!
//! A kernel of type (q, p) with at most p-1 sign changes factors as
//! `K_i = W_i * H(x_i)` where `H(x) = (-1)^s prod_l (x - z_l)` places one
//! root strictly inside each sign-change span and `W_i >= 0`. Running the
//! local fit with weights `W_i` then reproduces the kernel exactly through
//! its own factor polynomial, which is the representability certificate
//! this module constructs and verifies.

use crate::analysis::{count_sign_changes, default_zero_tol, moment_residuals};
use crate::error::{Error, Result};
use crate::lpr::{factor_polynomial_weighted, FactorPolynomial, KernelVector};
use crate::scalar::{cast, Scalar};

/// Roots assigned to a kernel's sign changes, each strictly between two
/// design points.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<T> {
    /// Strictly increasing node positions.
    pub nodes: Vec<T>,
    /// Offset used past the last in-span point: half the minimum gap.
    pub epsilon: T,
    /// The sign-change span each node resolves.
    pub source_spans: Vec<(usize, usize)>,
}

impl<T> NodeSet<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Place one node per sign change of the kernel.
///
/// For a span (j, j+k) the node sits at `x_{j+k-1} + min_gap/2`: just past
/// the last point before the sign flips, and closer to no design point than
/// half the global minimum gap, so it can never collide with an abscissa.
pub fn sign_change_nodes<T: Scalar>(kernel: &KernelVector<T>, zero_tol_rel: T) -> NodeSet<T> {
    let report = count_sign_changes(kernel.values(), zero_tol_rel);
    let epsilon = kernel.design().min_gap() * cast::<T>(0.5);
    let nodes = report
        .change_spans
        .iter()
        .map(|&(_, end)| kernel.design().points()[end - 1] + epsilon)
        .collect();
    NodeSet {
        nodes,
        epsilon,
        source_spans: report.change_spans,
    }
}

/// `H(x) = (-1)^s prod_l (x - z_l)`, kept in product form for evaluation
/// with the expanded coefficients alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePolynomial<T> {
    nodes: Vec<T>,
    negated: bool,
    coeffs: Vec<T>,
}

impl<T: Scalar> NodePolynomial<T> {
    /// Expanded coefficients, constant term first; degree = node count.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// The roots the product was built from.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    /// Evaluate through the product form.
    pub fn eval(&self, x: T) -> T {
        let product = self
            .nodes
            .iter()
            .fold(T::one(), |acc, &z| acc * (x - z));
        if self.negated {
            -product
        } else {
            product
        }
    }
}

/// Expand the node polynomial for a given sign choice `s` (0 or 1).
pub fn build_h_polynomial<T: Scalar>(nodes: &NodeSet<T>, s: u8) -> NodePolynomial<T> {
    assert!(s <= 1, "sign selector must be 0 or 1");
    let mut coeffs = vec![T::one()];
    for &z in &nodes.nodes {
        // Multiply by (x - z).
        let mut next = vec![T::zero(); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] = next[i] - z * c;
            next[i + 1] = next[i + 1] + c;
        }
        coeffs = next;
    }
    let negated = s == 1;
    if negated {
        for c in coeffs.iter_mut() {
            *c = -*c;
        }
    }
    NodePolynomial {
        nodes: nodes.nodes.clone(),
        negated,
        coeffs,
    }
}

/// Divide the kernel by the node polynomial and pick the sign that makes
/// every weight non-negative. Tiny negatives from roundoff are clamped to
/// zero; genuinely mixed signs are an inconsistency.
pub fn extract_weights<T: Scalar>(
    kernel: &KernelVector<T>,
    nodes: &NodeSet<T>,
) -> Result<(Vec<T>, u8)> {
    let h_poly = build_h_polynomial(nodes, 0);
    let mut weights: Vec<T> = kernel
        .values()
        .iter()
        .zip(kernel.design().points())
        .map(|(&k, &x)| {
            if k == T::zero() {
                T::zero()
            } else {
                k / h_poly.eval(x)
            }
        })
        .collect();
    let max_abs = weights.iter().fold(T::zero(), |acc, &w| acc.max(w.abs()));
    let threshold = default_zero_tol::<T>() * max_abs;
    let has_positive = weights.iter().any(|&w| w > threshold);
    let has_negative = weights.iter().any(|&w| w < -threshold);
    let s = match (has_positive, has_negative) {
        (true, true) => return Err(Error::InconsistentSigns),
        (false, true) => 1,
        _ => 0,
    };
    if s == 1 {
        for w in weights.iter_mut() {
            *w = -*w;
        }
    }
    for w in weights.iter_mut() {
        if *w < T::zero() {
            *w = T::zero();
        }
    }
    Ok((weights, s))
}

/// A kernel expressed as a non-negative-weight local polynomial fit.
#[derive(Debug, Clone)]
pub struct LprRepresentation<T> {
    /// Non-negative per-point fit weights.
    pub weights: Vec<T>,
    /// Sign selector of the node polynomial.
    pub s: u8,
    /// Node polynomial built from the sign changes.
    pub h_poly: NodePolynomial<T>,
    /// Factor polynomial of the induced fit.
    pub factor_poly: FactorPolynomial<T>,
    pub t: T,
    pub q: usize,
    pub p: usize,
    pub h: T,
}

/// Decompose a kernel into non-negative fit weights.
///
/// Fails with [`Error::NotTypeQp`] when the kernel misses the moment
/// conditions at `moment_tol`, and with [`Error::NotRepresentable`] when it
/// shows more than p-1 sign changes at `zero_tol_rel`.
pub fn decompose_kernel<T: Scalar>(
    kernel: &KernelVector<T>,
    moment_tol: T,
    zero_tol_rel: T,
) -> Result<LprRepresentation<T>> {
    let (q, p) = (kernel.q, kernel.p);
    let moment_report = moment_residuals(kernel, q, p, moment_tol);
    if !moment_report.passed {
        let (worst_order, residual) = moment_report.worst();
        return Err(Error::NotTypeQp {
            q,
            p,
            worst_order,
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tol: moment_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let nodes = sign_change_nodes(kernel, zero_tol_rel);
    if nodes.len() > p - 1 {
        return Err(Error::NotRepresentable {
            found: nodes.len(),
            max: p - 1,
            p,
        });
    }
    let (weights, s) = extract_weights(kernel, &nodes)?;
    let factor_poly =
        factor_polynomial_weighted(kernel.design(), &weights, kernel.t, kernel.h, q, p)?;
    let h_poly = build_h_polynomial(&nodes, s);
    Ok(LprRepresentation {
        weights,
        s,
        h_poly,
        factor_poly,
        t: kernel.t,
        q,
        p,
        h: kernel.h,
    })
}

/// Residuals of a representation against the kernel it was built from.
#[derive(Debug, Clone)]
pub struct DecompositionCheck<T> {
    /// `max_i |K_i - W_i * Q(u_i)|` through the recovered factor polynomial.
    pub max_residual_factor: T,
    /// `max_i |K_i - W_i * H(x_i)|` through the node polynomial.
    pub max_residual_nodes: T,
    /// Absolute threshold applied: `tol * max|K|`.
    pub threshold: T,
    pub passed: bool,
}

/// Check both reconstruction paths at `tol` relative to the kernel scale.
pub fn verify_decomposition<T: Scalar>(
    kernel: &KernelVector<T>,
    rep: &LprRepresentation<T>,
    tol: T,
) -> DecompositionCheck<T> {
    let mut max_residual_factor = T::zero();
    let mut max_residual_nodes = T::zero();
    for ((&x, &k), &w) in kernel
        .design()
        .points()
        .iter()
        .zip(kernel.values())
        .zip(&rep.weights)
    {
        let via_factor = w * rep.factor_poly.eval_at(x);
        let via_nodes = w * rep.h_poly.eval(x);
        max_residual_factor = max_residual_factor.max((k - via_factor).abs());
        max_residual_nodes = max_residual_nodes.max((k - via_nodes).abs());
    }
    let threshold = tol * kernel.max_abs();
    DecompositionCheck {
        max_residual_factor,
        max_residual_nodes,
        threshold,
        passed: max_residual_factor <= threshold && max_residual_nodes <= threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{eval_weights, Design, LprSpec, WeightScheme};
    use crate::lpr::equivalent_kernel;

    fn kernel_on(points: &[f64], values: Vec<f64>, t: f64, q: usize, p: usize) -> KernelVector<f64> {
        let design = Design::new(points).unwrap();
        KernelVector::new(design, values, t, q, p, 1.0).unwrap()
    }

    #[test]
    fn nodes_single_change() {
        let k = kernel_on(&[0.0, 1.0], vec![1.0, -1.0], 0.5, 0, 2);
        let nodes = sign_change_nodes(&k, 1e-12);
        assert_eq!(nodes.nodes, vec![0.5]);
        assert_eq!(nodes.epsilon, 0.5);
        assert_eq!(nodes.source_spans, vec![(0, 1)]);
    }

    #[test]
    fn nodes_empty_without_changes() {
        let k = kernel_on(&[0.0, 1.0, 2.0], vec![2.0, 1.0, 3.0], 1.0, 0, 1);
        let nodes = sign_change_nodes(&k, 1e-12);
        assert!(nodes.is_empty());
    }

    #[test]
    fn nodes_skip_interior_zeros() {
        let k = kernel_on(&[0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, -2.0, 3.0], 1.5, 0, 4);
        let nodes = sign_change_nodes(&k, 1e-12);
        assert_eq!(nodes.nodes, vec![1.5, 2.5]);
    }

    #[test]
    fn h_polynomial_empty_product() {
        let nodes = NodeSet {
            nodes: vec![],
            epsilon: 0.5,
            source_spans: vec![],
        };
        let h = build_h_polynomial(&nodes, 0);
        assert_eq!(h.coeffs(), &[1.0]);
        assert_eq!(h.eval(42.0), 1.0);
    }

    #[test]
    fn h_polynomial_single_node_negated() {
        let nodes = NodeSet {
            nodes: vec![0.5],
            epsilon: 0.5,
            source_spans: vec![(0, 1)],
        };
        let h = build_h_polynomial(&nodes, 1);
        assert_eq!(h.eval(0.0), 0.5);
        assert_eq!(h.eval(1.0), -0.5);
        assert_eq!(h.coeffs(), &[0.5, -1.0]);
    }

    #[test]
    fn h_polynomial_two_nodes() {
        let nodes = NodeSet {
            nodes: vec![1.5, 2.5],
            epsilon: 0.5,
            source_spans: vec![(0, 2), (2, 3)],
        };
        let h = build_h_polynomial(&nodes, 0);
        assert_eq!(h.eval(0.0), 3.75);
        assert_eq!(h.eval(3.0), 0.75);
        // Expanded form: x^2 - 4x + 3.75.
        assert_eq!(h.coeffs(), &[3.75, -4.0, 1.0]);
    }

    #[test]
    fn extract_flips_sign_when_needed() {
        let k = kernel_on(&[0.0, 1.0], vec![1.0, -1.0], 0.5, 0, 2);
        let nodes = sign_change_nodes(&k, 1e-12);
        let (weights, s) = extract_weights(&k, &nodes).unwrap();
        assert_eq!(s, 1);
        assert_eq!(weights, vec![2.0, 2.0]);
    }

    #[test]
    fn extract_identity_for_nonnegative_kernel() {
        let k = kernel_on(&[0.0, 1.0, 2.0], vec![0.2, 0.6, 0.2], 1.0, 0, 1);
        let nodes = NodeSet {
            nodes: vec![],
            epsilon: 0.5,
            source_spans: vec![],
        };
        let (weights, s) = extract_weights(&k, &nodes).unwrap();
        assert_eq!(s, 0);
        assert_eq!(weights, vec![0.2, 0.6, 0.2]);
    }

    #[test]
    fn extract_inconsistent_signs() {
        let k = kernel_on(&[0.0, 1.0, 2.0], vec![1.0, 1.0, -1.0], 1.0, 0, 2);
        let nodes = NodeSet {
            nodes: vec![],
            epsilon: 0.5,
            source_spans: vec![],
        };
        assert_eq!(
            extract_weights(&k, &nodes).unwrap_err(),
            Error::InconsistentSigns
        );
    }

    #[test]
    fn decompose_round_trips_a_local_fit_kernel() {
        let xs: [f64; 8] = [0.07, 0.54, 1.02, 1.58, 2.11, 2.73, 3.26, 3.9];
        let d = Design::new(&xs).unwrap();
        let spec = LprSpec::new(1.8, 0, 2, 2.2, WeightScheme::Quadratic).unwrap();
        let kernel = equivalent_kernel(&d, &spec).unwrap();
        let rep = decompose_kernel(&kernel, 1e-8, 1e-12).unwrap();
        assert!(rep.weights.iter().all(|&w| w >= 0.0));
        assert!(rep.h_poly.degree() < spec.p);
        let check = verify_decomposition(&kernel, &rep, 1e-8);
        assert!(
            check.passed,
            "factor {} nodes {} threshold {}",
            check.max_residual_factor, check.max_residual_nodes, check.threshold
        );
    }

    #[test]
    fn decompose_nadaraya_watson_kernel() {
        let xs: [f64; 4] = [0.0, 0.5, 1.1, 1.7];
        let d = Design::new(&xs).unwrap();
        let scheme = WeightScheme::Quadratic;
        let spec = LprSpec::new(0.8, 0, 1, 1.5, scheme.clone()).unwrap();
        let kernel = equivalent_kernel(&d, &spec).unwrap();
        let rep = decompose_kernel(&kernel, 1e-8, 1e-12).unwrap();
        assert!(rep.h_poly.degree() == 0);
        assert_eq!(rep.s, 0);
        // H == 1, so the recovered weights are the kernel itself.
        assert_eq!(rep.weights, kernel.values());
        assert_eq!(rep.factor_poly.coeffs().len(), 1);
        let check = verify_decomposition(&kernel, &rep, 1e-10);
        assert!(check.passed);
    }

    #[test]
    fn decompose_rejects_too_many_sign_changes() {
        // Type (0,2) by construction: sum K = 1, sum (x - t) K = 0, yet the
        // alternating pattern carries three sign changes.
        let k = kernel_on(&[0.0, 1.0, 2.0, 3.0], vec![0.5, -1.0, 2.0, -0.5], 1.5, 0, 2);
        let pre = moment_residuals(&k, 0, 2, 1e-12);
        assert!(pre.passed, "construction must satisfy the moment conditions");
        match decompose_kernel(&k, 1e-8, 1e-12) {
            Err(Error::NotRepresentable { found, max, p }) => {
                assert_eq!((found, max, p), (3, 1, 2));
            }
            other => panic!("expected NotRepresentable, got {other:?}"),
        }
    }

    #[test]
    fn decompose_rejects_wrong_type() {
        let k = kernel_on(&[0.0, 1.0, 2.0], vec![0.5, 0.5, 0.5], 1.0, 0, 2);
        match decompose_kernel(&k, 1e-8, 1e-12) {
            Err(Error::NotTypeQp { worst_order, .. }) => assert_eq!(worst_order, 0),
            other => panic!("expected NotTypeQp, got {other:?}"),
        }
    }

    #[test]
    fn verify_flags_perturbed_weights() {
        let xs: [f64; 8] = [0.07, 0.54, 1.02, 1.58, 2.11, 2.73, 3.26, 3.9];
        let d = Design::new(&xs).unwrap();
        let spec = LprSpec::new(1.8, 0, 2, 2.2, WeightScheme::Quadratic).unwrap();
        let kernel = equivalent_kernel(&d, &spec).unwrap();
        let mut rep = decompose_kernel(&kernel, 1e-8, 1e-12).unwrap();
        let idx = rep
            .weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        rep.weights[idx] *= 1.1;
        let check = verify_decomposition(&kernel, &rep, 1e-8);
        assert!(!check.passed);
        // The fault shows up exactly at the perturbed index.
        let x = kernel.design().points()[idx];
        let residual = (kernel.values()[idx] - rep.weights[idx] * rep.h_poly.eval(x)).abs();
        assert!((residual - check.max_residual_nodes).abs() <= 1e-15 * residual.max(1.0));
    }

    #[test]
    fn verify_zero_kernel_trivially_passes() {
        let d = Design::new(&[0.0, 1.0, 2.0]).unwrap();
        let kernel = KernelVector::new(d.clone(), vec![0.0; 3], 1.0, 0, 1, 1.0).unwrap();
        let nodes = NodeSet {
            nodes: vec![],
            epsilon: 0.5,
            source_spans: vec![],
        };
        let rep = LprRepresentation {
            weights: vec![0.0; 3],
            s: 0,
            h_poly: build_h_polynomial(&nodes, 0),
            factor_poly: FactorPolynomial::new(vec![0.0], 1.0, 1.0),
            t: 1.0,
            q: 0,
            p: 1,
            h: 1.0,
        };
        let check = verify_decomposition(&kernel, &rep, 1e-8);
        assert!(check.passed);
        assert_eq!(check.max_residual_factor, 0.0);
    }

    #[test]
    fn recomposed_kernel_keeps_the_sign_pattern() {
        let xs: [f64; 9] = [0.05, 0.61, 1.18, 1.72, 2.34, 2.95, 3.41, 4.02, 4.6];
        let d = Design::new(&xs).unwrap();
        let spec = LprSpec::new(2.2, 1, 3, 2.5, WeightScheme::Quadratic).unwrap();
        let kernel = equivalent_kernel(&d, &spec).unwrap();
        let rep = decompose_kernel(&kernel, 1e-8, 1e-12).unwrap();
        let input_changes = count_sign_changes(kernel.values(), 1e-12);
        let recomposed: Vec<f64> = d
            .points()
            .iter()
            .zip(&rep.weights)
            .map(|(&x, &w)| w * rep.factor_poly.eval_at(x))
            .collect();
        let recomposed_changes = count_sign_changes(&recomposed, 1e-12);
        assert_eq!(input_changes.count, recomposed_changes.count);
        assert!(rep.h_poly.degree() <= input_changes.count);
    }

    #[test]
    fn weights_reuse_the_flush_convention() {
        // A kernel value of exactly zero maps to weight zero without division.
        let k = kernel_on(&[0.0, 1.0, 2.0], vec![1.0, 0.0, -1.0], 1.0, 1, 2);
        let nodes = sign_change_nodes(&k, 1e-12);
        let (weights, _) = extract_weights(&k, &nodes).unwrap();
        assert_eq!(weights[1], 0.0);
    }

    #[test]
    fn round_trip_matches_scheme_weights_up_to_scale() {
        // For a kernel with no interior zeros the recovered weights are the
        // original scheme weights divided by |H|'s shape; check the kernel
        // reconstruction rather than the weights directly.
        let xs: [f64; 7] = [0.1, 0.62, 1.21, 1.83, 2.4, 2.97, 3.55];
        let d = Design::new(&xs).unwrap();
        for (q, p) in [(0usize, 2usize), (0, 3), (1, 3)] {
            let spec = LprSpec::new(1.9, q, p, 2.1, WeightScheme::LinearMinus).unwrap();
            let kernel = equivalent_kernel(&d, &spec).unwrap();
            let rep = decompose_kernel(&kernel, 1e-8, 1e-12).unwrap();
            let check = verify_decomposition(&kernel, &rep, 1e-8);
            assert!(check.passed, "(q,p)=({q},{p})");
            let _ = eval_weights(&spec.scheme, &d, spec.t, spec.h);
        }
    }
}
