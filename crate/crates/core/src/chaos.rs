//! Tensor Legendre polynomial-chaos surrogates over interval boxes:
//! basis bookkeeping, Gauss-Legendre quadrature, input encoding, and
//! non-intrusive Galerkin projection.
//!
//! Inputs are uniform on their intervals, so each physical variable is the
//! affine image of a standardized `xi ~ U(-1,1)` and the response is
//! expanded in products of Legendre polynomials indexed by multi-indices of
//! total degree at most `p`.

use crate::expr::ExprAst;
use crate::interval::{DomainError, Interval};
use crate::multi_index::{lattice_range_iter, MultiIndex};

/// Value of the degree-`k` Legendre polynomial at `xi`, by the three-term
/// recurrence `(k+1) P_{k+1} = (2k+1) xi P_k - k P_{k-1}`.
pub fn legendre_eval(k: usize, xi: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => xi,
        _ => {
            let mut prev = 1.0;
            let mut cur = xi;
            for m in 1..k {
                let next = ((2 * m + 1) as f64 * xi * cur - m as f64 * prev) / (m + 1) as f64;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Value and derivative of the degree-`k` Legendre polynomial at interior
/// points (`|xi| < 1`).
fn legendre_eval_with_derivative(k: usize, xi: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = xi;
    for m in 1..k {
        let next = ((2 * m + 1) as f64 * xi * cur - m as f64 * prev) / (m + 1) as f64;
        prev = cur;
        cur = next;
    }
    let derivative = k as f64 * (xi * cur - prev) / (xi * xi - 1.0);
    (cur, derivative)
}

/// `<psi_I^2>` under the uniform density on `[-1,1]^n`: the product of
/// `1/(2 i_d + 1)` over dimensions.
pub fn legendre_norm_sq(index: &MultiIndex) -> f64 {
    index
        .degrees()
        .iter()
        .map(|&i| 1.0 / (2 * i + 1) as f64)
        .product()
}

/// A Gauss-Legendre rule on `[-1,1]`: `q` nodes integrate polynomials up to
/// degree `2q - 1` exactly; weights sum to 2.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature value of `integrand` against the weights.
    pub fn integrate(&self, mut integrand: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * integrand(x))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights: Newton iteration on the degree-`q`
/// Legendre polynomial from Chebyshev initial guesses, weights
/// `2 / ((1 - x^2) P_q'(x)^2)`.
pub fn gauss_legendre(q: usize) -> QuadratureRule {
    assert!(q >= 1, "a quadrature rule needs at least one point");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let half = q.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (value, derivative) = legendre_eval_with_derivative(q, z);
            let step = value / derivative;
            z -= step;
            if step.abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        assert!(converged, "Newton iteration for node {i} did not converge");
        let derivative = legendre_eval_with_derivative(q, z).1;
        let w = 2.0 / ((1.0 - z * z) * derivative * derivative);
        nodes[q - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

/// Affine encoding of a uniform input: `xi -> c0 + c1 * xi` maps `[-1,1]`
/// onto the interval, with `c0` the midpoint and `c1` the halfwidth.
pub fn encode_input(interval: &Interval) -> (f64, f64) {
    (interval.midpoint(), interval.half_width())
}

/// The multi-index set of a total-degree-truncated tensor Legendre basis.
///
/// Indices are held in graded lexicographic order: by total degree, then
/// lexicographically with the first dimension dominant, so for two
/// variables the grade-1 block is `(1,0), (0,1)`. The set size is
/// `C(n + p, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PCBasis {
    n_vars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
}

impl PCBasis {
    pub fn total_degree(n_vars: usize, order: usize) -> Self {
        let mut indices: Vec<MultiIndex> =
            lattice_range_iter(vec![0; n_vars], vec![order; n_vars])
                .filter(|idx| idx.total_degree() <= order)
                .collect();
        indices.sort_by(|a, b| {
            a.total_degree()
                .cmp(&b.total_degree())
                .then_with(|| b.degrees().cmp(a.degrees()))
        });
        Self {
            n_vars,
            order,
            indices,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|i| i == index)
    }

    /// `psi_I(xi)`: the product of per-dimension Legendre values.
    pub fn eval_basis(&self, index: &MultiIndex, xi: &[f64]) -> f64 {
        index
            .degrees()
            .iter()
            .zip(xi)
            .map(|(&deg, &x)| legendre_eval(deg, x))
            .product()
    }
}

/// A polynomial-chaos expansion: coefficients over a [`PCBasis`] plus the
/// physical box the surrogate represents.
#[derive(Debug, Clone, PartialEq)]
pub struct PCExpansion {
    basis: PCBasis,
    coeffs: Vec<f64>,
    domain: Vec<Interval>,
}

impl PCExpansion {
    pub fn new(basis: PCBasis, coeffs: Vec<f64>, domain: Vec<Interval>) -> Self {
        assert_eq!(coeffs.len(), basis.len(), "one coefficient per basis term");
        assert_eq!(domain.len(), basis.n_vars());
        Self {
            basis,
            coeffs,
            domain,
        }
    }

    pub fn basis(&self) -> &PCBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    /// Coefficient of the given multi-index, zero when outside the basis.
    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        self.basis
            .position(index)
            .map(|k| self.coeffs[k])
            .unwrap_or(0.0)
    }

    /// Surrogate value at a standardized point `xi` in `[-1,1]^n`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        assert_eq!(xi.len(), self.basis.n_vars());
        self.basis
            .indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(idx, &c)| c * self.basis.eval_basis(idx, xi))
            .sum()
    }

    /// Surrogate value at a physical point inside the domain box.
    pub fn eval_physical(&self, x: &[f64]) -> f64 {
        let xi: Vec<f64> = x
            .iter()
            .zip(&self.domain)
            .map(|(&v, interval)| {
                let (c0, c1) = encode_input(interval);
                if c1 == 0.0 {
                    0.0
                } else {
                    (v - c0) / c1
                }
            })
            .collect();
        self.eval(&xi)
    }
}

/// Non-intrusive Galerkin projection of `f` onto the total-degree-`p`
/// Legendre basis over the box, using a full tensor `q^n` Gauss-Legendre
/// grid: `y_k = (1/<psi_k^2>) sum f(x) psi_k(xi) prod(w/2)`.
///
/// Evaluation order over the grid is fixed, so repeated runs are
/// bit-identical.
pub fn project(
    f: &ExprAst,
    boxes: &[Interval],
    p: usize,
    q: usize,
) -> Result<PCExpansion, DomainError> {
    assert_eq!(
        f.n_vars(),
        boxes.len(),
        "function variables must match the box dimension"
    );
    project_with(|x| f.eval_point(x), boxes, p, q)
}

/// [`project`] over any black-box evaluation; the expression path wraps this.
pub fn project_with(
    f: impl Fn(&[f64]) -> Result<f64, DomainError>,
    boxes: &[Interval],
    p: usize,
    q: usize,
) -> Result<PCExpansion, DomainError> {
    assert!(q >= 1, "projection needs at least one quadrature point");
    let n = boxes.len();
    let basis = PCBasis::total_degree(n, p);
    let rule = gauss_legendre(q);
    let encodings: Vec<(f64, f64)> = boxes.iter().map(encode_input).collect();

    // per-node Legendre values up to degree p, shared across dimensions
    let table: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| (0..=p).map(|k| legendre_eval(k, x)).collect())
        .collect();

    let mut acc = vec![0.0; basis.len()];
    let mut x = vec![0.0; n];
    for grid in lattice_range_iter(vec![0; n], vec![q - 1; n]) {
        let mut weight = 1.0;
        for (d, &g) in grid.degrees().iter().enumerate() {
            let (c0, c1) = encodings[d];
            x[d] = c0 + c1 * rule.nodes()[g];
            weight *= rule.weights()[g] / 2.0;
        }
        let fx = f(&x)?;
        for (k, idx) in basis.indices().iter().enumerate() {
            let mut psi = 1.0;
            for (d, &deg) in idx.degrees().iter().enumerate() {
                psi *= table[grid.degree(d)][deg];
            }
            acc[k] += fx * psi * weight;
        }
    }
    let coeffs: Vec<f64> = basis
        .indices()
        .iter()
        .zip(acc)
        .map(|(idx, a)| a / legendre_norm_sq(idx))
        .collect();
    Ok(PCExpansion::new(basis, coeffs, boxes.to_vec()))
}
