//! Power-form polynomials, Garloff's transformation to Bernstein
//! coefficients over a general box, and range enclosure with uniform
//! subdivision.
//!
//! The Bernstein coefficients of a polynomial bound its range over the box:
//! `min beta <= y(xi) <= max beta`, with equality at box vertices (the
//! corner coefficients are the polynomial's vertex values). Subdividing the
//! box and taking the min/max over all sub-box coefficients tightens the
//! enclosure.

use thiserror::Error;

use crate::chaos::PCExpansion;
use crate::interval::Interval;
use crate::multi_index::{binomial, lattice_iter, lattice_range_iter, MultiIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BernsteinError {
    #[error("box component {dim} is degenerate (zero width)")]
    DegenerateBox { dim: usize },
}

/// A multivariate polynomial in power (monomial) form over standardized
/// variables, stored densely up to the componentwise maximum degree `N` of
/// its nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySeries {
    degree: MultiIndex,
    coeffs: Vec<f64>,
}

impl PolySeries {
    /// Takes dense coefficients in lattice order (first dimension fastest)
    /// over `bound`, and trims to the componentwise maximum nonzero degree.
    pub fn from_dense(bound: MultiIndex, dense: Vec<f64>) -> Self {
        assert_eq!(dense.len(), bound.lattice_size());
        let n = bound.len();
        let mut max_deg = vec![0usize; n];
        let mut any = false;
        for idx in lattice_iter(&bound) {
            if dense[idx.lattice_offset(&bound)] != 0.0 {
                any = true;
                for d in 0..n {
                    max_deg[d] = max_deg[d].max(idx.degree(d));
                }
            }
        }
        if !any {
            return Self::zero(n);
        }
        let degree = MultiIndex::new(max_deg);
        if degree == bound {
            return Self {
                degree,
                coeffs: dense,
            };
        }
        let mut coeffs = vec![0.0; degree.lattice_size()];
        for idx in lattice_iter(&degree) {
            coeffs[idx.lattice_offset(&degree)] = dense[idx.lattice_offset(&bound)];
        }
        Self { degree, coeffs }
    }

    pub fn zero(n_vars: usize) -> Self {
        Self {
            degree: MultiIndex::zeros(n_vars),
            coeffs: vec![0.0],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.degree.len()
    }

    /// Componentwise maximum degree `N`.
    pub fn degree(&self) -> &MultiIndex {
        &self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Monomial coefficient `alpha_I`, zero above the stored degree.
    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        if index.le(&self.degree) {
            self.coeffs[index.lattice_offset(&self.degree)]
        } else {
            0.0
        }
    }

    /// Direct monomial evaluation.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        assert_eq!(xi.len(), self.n_vars());
        let powers: Vec<Vec<f64>> = xi
            .iter()
            .zip(self.degree.degrees())
            .map(|(&x, &n)| {
                let mut row = Vec::with_capacity(n + 1);
                let mut acc = 1.0;
                for _ in 0..=n {
                    row.push(acc);
                    acc *= x;
                }
                row
            })
            .collect();
        let mut sum = 0.0;
        for idx in lattice_iter(&self.degree) {
            let mut term = self.coeffs[idx.lattice_offset(&self.degree)];
            if term == 0.0 {
                continue;
            }
            for (d, &deg) in idx.degrees().iter().enumerate() {
                term *= powers[d][deg];
            }
            sum += term;
        }
        sum
    }
}

/// Converts a Legendre-basis expansion to power form in the standardized
/// variables. Per-dimension Legendre monomial-coefficient tables are built
/// by the three-term recurrence in exact rational arithmetic and converted
/// to floating point once; accumulation happens in f64.
pub fn legendre_to_power(pce: &PCExpansion) -> PolySeries {
    let n = pce.basis().n_vars();
    let max_degree = pce
        .basis()
        .indices()
        .iter()
        .flat_map(|idx| idx.degrees().iter().copied())
        .max()
        .unwrap_or(0);
    let tables = legendre_monomial_tables(max_degree);

    let bound = MultiIndex::new(vec![max_degree; n]);
    let mut dense = vec![0.0; bound.lattice_size()];
    for (idx, &y) in pce.basis().indices().iter().zip(pce.coeffs()) {
        if y == 0.0 {
            continue;
        }
        for monomial in lattice_iter(idx) {
            let mut c = y;
            for (d, &m) in monomial.degrees().iter().enumerate() {
                c *= tables[idx.degree(d)][m];
            }
            if c != 0.0 {
                dense[monomial.lattice_offset(&bound)] += c;
            }
        }
    }
    PolySeries::from_dense(bound, dense)
}

/// Monomial coefficients of `P_0 .. P_max_degree`, exact until the final
/// conversion to f64. Entry `[k][m]` is the coefficient of `x^m` in `P_k`.
fn legendre_monomial_tables(max_degree: usize) -> Vec<Vec<f64>> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    let mut exact: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
    if max_degree >= 1 {
        exact.push(vec![BigRational::zero(), BigRational::one()]);
    }
    for k in 1..max_degree {
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        let lead = BigRational::new(BigInt::from(2 * k as i64 + 1), BigInt::from(k as i64 + 1));
        let trail = BigRational::new(BigInt::from(k as i64), BigInt::from(k as i64 + 1));
        let mut next = vec![BigRational::zero(); k + 2];
        for (m, c) in exact[k].iter().enumerate() {
            next[m + 1] += &lead * c;
        }
        for (m, c) in exact[k - 1].iter().enumerate() {
            next[m] -= &trail * c;
        }
        exact.push(next);
    }
    exact
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|r| r.to_f64().expect("legendre coefficient fits in f64"))
                .collect()
        })
        .collect()
}

/// Bernstein coefficients of a polynomial over a box, of the same degree as
/// the power form that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinPatch {
    domain: Vec<Interval>,
    degree: MultiIndex,
    coeffs: Vec<f64>,
}

impl BernsteinPatch {
    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn degree(&self) -> &MultiIndex {
        &self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, index: &MultiIndex) -> f64 {
        self.coeffs[index.lattice_offset(&self.degree)]
    }

    /// `[min beta, max beta]`: contains the polynomial's range over the box.
    pub fn enclosure(&self) -> Interval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &c in &self.coeffs {
            lo = lo.min(c);
            hi = hi.max(c);
        }
        Interval::new(lo, hi).expect("Bernstein coefficients are finite")
    }
}

/// Garloff's transformation: power coefficients over a box to Bernstein
/// coefficients, via the intermediate shift to the box corner
/// (`atilde_I = sum_{I<=J<=N} C(J,I) alpha_J lo^(J-I)`), the width scaling
/// (`ahat_I = atilde_I width^I`), and the binomial mixing
/// (`beta_I = sum_{J<=I} C(I,J)/C(N,J) ahat_J`). Binomials are exact
/// integers; accumulation is in f64.
pub fn garloff_coefficients(
    poly: &PolySeries,
    bernstein_box: &[Interval],
) -> Result<BernsteinPatch, BernsteinError> {
    let (_, _, beta) = garloff_stages(poly, bernstein_box)?;
    Ok(BernsteinPatch {
        domain: bernstein_box.to_vec(),
        degree: poly.degree().clone(),
        coeffs: beta,
    })
}

type GarloffStages = (Vec<f64>, Vec<f64>, Vec<f64>);

/// The three stages factor over dimensions (the multivariate binomial
/// products are per-dimension products), so each is applied axis by axis
/// as a triangular matrix acting along one coordinate of the dense grid.
fn garloff_stages(
    poly: &PolySeries,
    bernstein_box: &[Interval],
) -> Result<GarloffStages, BernsteinError> {
    let n = poly.n_vars();
    assert_eq!(
        bernstein_box.len(),
        n,
        "box dimension must match the polynomial"
    );
    for (dim, interval) in bernstein_box.iter().enumerate() {
        if interval.is_point() {
            return Err(BernsteinError::DegenerateBox { dim });
        }
    }
    let degree = poly.degree();

    // atilde_I = sum_{I<=J<=N} C(J,I) alpha_J lo^(J-I)
    let mut atilde = poly.coeffs().to_vec();
    for d in 0..n {
        let nd = degree.degree(d);
        let lo = bernstein_box[d].lo();
        let mut matrix = vec![vec![0.0; nd + 1]; nd + 1];
        for i in 0..=nd {
            let mut power = 1.0;
            for j in i..=nd {
                matrix[i][j] = binomial(j, i) as f64 * power;
                power *= lo;
            }
        }
        apply_axis(&mut atilde, degree, d, &matrix, Triangle::Upper);
    }

    // ahat_I = atilde_I * width^I
    let mut ahat = atilde.clone();
    for d in 0..n {
        let nd = degree.degree(d);
        let width = bernstein_box[d].width();
        let mut powers = vec![1.0; nd + 1];
        for e in 1..=nd {
            powers[e] = powers[e - 1] * width;
        }
        scale_axis(&mut ahat, degree, d, &powers);
    }

    // beta_I = sum_{J<=I} C(I,J)/C(N,J) ahat_J
    let mut beta = ahat.clone();
    for d in 0..n {
        let nd = degree.degree(d);
        let mut matrix = vec![vec![0.0; nd + 1]; nd + 1];
        for i in 0..=nd {
            for j in 0..=i {
                matrix[i][j] = binomial(i, j) as f64 / binomial(nd, j) as f64;
            }
        }
        apply_axis(&mut beta, degree, d, &matrix, Triangle::Lower);
    }
    Ok((atilde, ahat, beta))
}

#[derive(Clone, Copy)]
enum Triangle {
    Lower,
    Upper,
}

/// Applies a triangular matrix to every line of the dense grid along axis
/// `d`: `out[i] = sum_j matrix[i][j] * in[j]` with `j` restricted to the
/// triangle.
fn apply_axis(
    values: &mut [f64],
    degree: &MultiIndex,
    d: usize,
    matrix: &[Vec<f64>],
    triangle: Triangle,
) {
    let nd = degree.degree(d) + 1;
    let stride: usize = degree.degrees()[..d].iter().map(|&x| x + 1).product();
    let block = stride * nd;
    let mut line = vec![0.0; nd];
    let mut base = 0;
    while base < values.len() {
        for offset in 0..stride {
            let start = base + offset;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = values[start + i * stride];
            }
            for i in 0..nd {
                let (j_lo, j_hi) = match triangle {
                    Triangle::Lower => (0, i),
                    Triangle::Upper => (i, nd - 1),
                };
                let mut acc = 0.0;
                for j in j_lo..=j_hi {
                    acc += matrix[i][j] * line[j];
                }
                values[start + i * stride] = acc;
            }
        }
        base += block;
    }
}

/// Multiplies each grid slot by `factors[i_d]`, where `i_d` is its index
/// along axis `d`.
fn scale_axis(values: &mut [f64], degree: &MultiIndex, d: usize, factors: &[f64]) {
    let nd = degree.degree(d) + 1;
    let stride: usize = degree.degrees()[..d].iter().map(|&x| x + 1).product();
    for (k, value) in values.iter_mut().enumerate() {
        *value *= factors[(k / stride) % nd];
    }
}

/// Range enclosure with uniform subdivision: partitions the box into `k`
/// equal parts per dimension, applies Garloff's transformation to every
/// sub-box, and returns the min/max over all Bernstein coefficients.
/// Sub-boxes are visited in a fixed order and reduced serially, so the
/// result is deterministic.
pub fn bounded_range(
    poly: &PolySeries,
    bernstein_box: &[Interval],
    k: usize,
) -> Result<Interval, BernsteinError> {
    assert!(k >= 1, "subdivision count must be at least 1");
    let n = poly.n_vars();
    assert_eq!(bernstein_box.len(), n);

    // edges[d][t]: shared cell boundaries, endpoints exact
    let edges: Vec<Vec<f64>> = bernstein_box
        .iter()
        .map(|interval| {
            let mut row = Vec::with_capacity(k + 1);
            row.push(interval.lo());
            for t in 1..k {
                row.push(interval.lo() + interval.width() * (t as f64) / (k as f64));
            }
            row.push(interval.hi());
            row
        })
        .collect();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut cell_box = vec![Interval::point(0.0); n];
    for cell in lattice_range_iter(vec![0; n], vec![k - 1; n]) {
        for d in 0..n {
            let t = cell.degree(d);
            cell_box[d] = Interval::new(edges[d][t], edges[d][t + 1])
                .expect("subdivision edges are ordered");
        }
        let patch = garloff_coefficients(poly, &cell_box)?;
        let range = patch.enclosure();
        lo = lo.min(range.lo());
        hi = hi.max(range.hi());
    }
    Ok(Interval::new(lo, hi).expect("enclosure endpoints are finite"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{PCBasis, PCExpansion};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn mi(degrees: &[usize]) -> MultiIndex {
        MultiIndex::new(degrees.to_vec())
    }

    /// The worked-example expansion: y = 5 psi_(0,0) + psi_(1,0) + psi_(0,1) + psi_(1,1).
    fn worked_example_pce() -> PCExpansion {
        let basis = PCBasis::total_degree(2, 3);
        let mut coeffs = vec![0.0; basis.len()];
        for (index, value) in [
            (mi(&[0, 0]), 5.0),
            (mi(&[1, 0]), 1.0),
            (mi(&[0, 1]), 1.0),
            (mi(&[1, 1]), 1.0),
        ] {
            coeffs[basis.position(&index).unwrap()] = value;
        }
        PCExpansion::new(basis, coeffs, vec![iv(-1.0, 1.0), iv(-1.0, 1.0)])
    }

    fn unit_square() -> Vec<Interval> {
        vec![iv(-1.0, 1.0), iv(-1.0, 1.0)]
    }

    #[test]
    fn conversion_of_worked_example() {
        let poly = legendre_to_power(&worked_example_pce());
        // y = 5 + xi1 + xi2 + xi1*xi2, so N = (1,1)
        assert_eq!(poly.degree(), &mi(&[1, 1]));
        assert_eq!(poly.coefficient(&mi(&[0, 0])), 5.0);
        assert_eq!(poly.coefficient(&mi(&[1, 0])), 1.0);
        assert_eq!(poly.coefficient(&mi(&[0, 1])), 1.0);
        assert_eq!(poly.coefficient(&mi(&[1, 1])), 1.0);
    }

    #[test]
    fn conversion_of_quadratic_term() {
        // psi_2(xi1) = (3 xi1^2 - 1)/2 = -1/2 + 3/2 xi1^2
        let basis = PCBasis::total_degree(2, 2);
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[basis.position(&mi(&[2, 0])).unwrap()] = 1.0;
        let pce = PCExpansion::new(basis, coeffs, unit_square());
        let poly = legendre_to_power(&pce);
        assert_eq!(poly.degree(), &mi(&[2, 0]));
        assert_eq!(poly.coefficient(&mi(&[0, 0])), -0.5);
        assert_eq!(poly.coefficient(&mi(&[1, 0])), 0.0);
        assert_eq!(poly.coefficient(&mi(&[2, 0])), 1.5);
    }

    #[test]
    fn conversion_of_zero_expansion() {
        let basis = PCBasis::total_degree(2, 3);
        let coeffs = vec![0.0; basis.len()];
        let pce = PCExpansion::new(basis, coeffs, unit_square());
        let poly = legendre_to_power(&pce);
        assert_eq!(poly.degree(), &mi(&[0, 0]));
        assert_eq!(poly.coeffs(), &[0.0]);
    }

    #[test]
    fn conversion_matches_legendre_evaluation() {
        // pseudo-random coefficients, fixed seed
        let basis = PCBasis::total_degree(2, 5);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let coeffs: Vec<f64> = (0..basis.len()).map(|_| next()).collect();
        let pce = PCExpansion::new(basis, coeffs, unit_square());
        let poly = legendre_to_power(&pce);
        for _ in 0..100 {
            let xi = [next(), next()];
            let direct = pce.eval(&xi);
            let monomial = poly.eval(&xi);
            assert!(
                (direct - monomial).abs() < 1e-10,
                "{direct} vs {monomial} at {xi:?}"
            );
        }
    }

    #[test]
    fn garloff_worked_example_stages() {
        let poly = legendre_to_power(&worked_example_pce());
        let (atilde, ahat, beta) = garloff_stages(&poly, &unit_square()).unwrap();
        let n = poly.degree();
        let at = |i: &[usize]| atilde[mi(i).lattice_offset(n)];
        let ah = |i: &[usize]| ahat[mi(i).lattice_offset(n)];
        let b = |i: &[usize]| beta[mi(i).lattice_offset(n)];
        assert_eq!(
            [at(&[0, 0]), at(&[0, 1]), at(&[1, 0]), at(&[1, 1])],
            [4.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(
            [ah(&[0, 0]), ah(&[0, 1]), ah(&[1, 0]), ah(&[1, 1])],
            [4.0, 0.0, 0.0, 4.0]
        );
        assert_eq!(
            [b(&[0, 0]), b(&[0, 1]), b(&[1, 0]), b(&[1, 1])],
            [4.0, 4.0, 4.0, 8.0]
        );
    }

    #[test]
    fn garloff_constant_polynomial() {
        let poly = PolySeries::from_dense(mi(&[0, 0]), vec![2.5]);
        let patch = garloff_coefficients(&poly, &unit_square()).unwrap();
        assert_eq!(patch.coeffs(), &[2.5]);
        assert_eq!(patch.enclosure(), iv(2.5, 2.5));
    }

    #[test]
    fn garloff_univariate_square() {
        // xi^2 on [-1,1]: beta = {1, -1, 1}
        let poly = PolySeries::from_dense(mi(&[2]), vec![0.0, 0.0, 1.0]);
        let patch = garloff_coefficients(&poly, &[iv(-1.0, 1.0)]).unwrap();
        assert_eq!(patch.coeffs(), &[1.0, -1.0, 1.0]);
        assert_eq!(patch.enclosure(), iv(-1.0, 1.0));
    }

    #[test]
    fn garloff_rejects_degenerate_box() {
        let poly = PolySeries::from_dense(mi(&[1, 1]), vec![0.0, 1.0, 0.0, 0.0]);
        let result = garloff_coefficients(&poly, &[iv(0.0, 1.0), iv(0.5, 0.5)]);
        assert_eq!(result.unwrap_err(), BernsteinError::DegenerateBox { dim: 1 });
    }

    #[test]
    fn enclosure_of_worked_example() {
        let poly = legendre_to_power(&worked_example_pce());
        let patch = garloff_coefficients(&poly, &unit_square()).unwrap();
        assert_eq!(patch.enclosure(), iv(4.0, 8.0));
        assert_eq!(bounded_range(&poly, &unit_square(), 1).unwrap(), iv(4.0, 8.0));
    }

    #[test]
    fn subdivision_makes_square_exact() {
        let poly = PolySeries::from_dense(mi(&[2]), vec![0.0, 0.0, 1.0]);
        let range = bounded_range(&poly, &[iv(-1.0, 1.0)], 2).unwrap();
        assert_eq!(range, iv(0.0, 1.0));
    }

    #[test]
    fn affine_polynomials_are_vertex_exact_for_any_subdivision() {
        // 0.5 - 2 xi1 + xi2 over [0,1] x [-2,3]
        let poly = PolySeries::from_dense(mi(&[1, 1]), vec![0.5, -2.0, 1.0, 0.0]);
        let boxes = vec![iv(0.0, 1.0), iv(-2.0, 3.0)];
        // extremes at vertices: min at (1,-2), max at (0,3)
        let want = iv(0.5 - 2.0 - 2.0, 0.5 + 3.0);
        for k in [1, 2, 3, 7] {
            let got = bounded_range(&poly, &boxes, k).unwrap();
            assert!((got.lo() - want.lo()).abs() < 1e-12, "k={k}");
            assert!((got.hi() - want.hi()).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn vertex_sharpness_on_general_box() {
        // a fixed degree-(2,3) polynomial on an asymmetric box
        let degree = mi(&[2, 3]);
        let coeffs: Vec<f64> = (0..degree.lattice_size())
            .map(|i| ((i * 7 + 3) % 11) as f64 / 5.0 - 1.0)
            .collect();
        let poly = PolySeries::from_dense(degree.clone(), coeffs);
        let boxes = vec![iv(-0.4, 1.3), iv(0.2, 2.0)];
        let patch = garloff_coefficients(&poly, &boxes).unwrap();
        for corner in [[0usize, 0], [2, 0], [0, 3], [2, 3]] {
            let beta = patch.coefficient(&mi(&corner));
            let vertex = [
                if corner[0] == 0 { boxes[0].lo() } else { boxes[0].hi() },
                if corner[1] == 0 { boxes[1].lo() } else { boxes[1].hi() },
            ];
            let value = poly.eval(&vertex);
            assert!(
                (beta - value).abs() < 1e-9,
                "corner {corner:?}: beta {beta} vs value {value}"
            );
        }
    }

    #[test]
    fn enclosure_is_sound_and_tightens_with_subdivision() {
        // y = xi1^3 - xi1 xi2 + 0.2 xi2^2 on [-1,1]^2
        let degree = mi(&[3, 2]);
        let mut dense = vec![0.0; degree.lattice_size()];
        dense[mi(&[3, 0]).lattice_offset(&degree)] = 1.0;
        dense[mi(&[1, 1]).lattice_offset(&degree)] = -1.0;
        dense[mi(&[0, 2]).lattice_offset(&degree)] = 0.2;
        let poly = PolySeries::from_dense(degree, dense);
        let boxes = unit_square();

        let mut previous: Option<Interval> = None;
        for k in [1, 2, 4, 8] {
            let range = bounded_range(&poly, &boxes, k).unwrap();
            // interior samples stay inside the enclosure
            for s in 0..20 {
                for t in 0..20 {
                    let xi = [-1.0 + 2.0 * s as f64 / 19.0, -1.0 + 2.0 * t as f64 / 19.0];
                    let v = poly.eval(&xi);
                    assert!(range.lo() <= v + 1e-9 && v - 1e-9 <= range.hi());
                }
            }
            if let Some(outer) = previous {
                assert!(range.lo() >= outer.lo() - 1e-12);
                assert!(range.hi() <= outer.hi() + 1e-12);
            }
            previous = Some(range);
        }
    }
}
