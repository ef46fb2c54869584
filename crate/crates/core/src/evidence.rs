//! Dempster-Shafer structures on closed real intervals: combination rules,
//! belief/plausibility, cumulative bound functions, and event bounds.

use thiserror::Error;

use crate::interval::Interval;

/// Tolerance on the mass-normalization invariant.
pub const MASS_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvidenceError {
    #[error("a DS structure needs at least one focal element")]
    Empty,
    #[error("focal element {index} has non-positive mass {mass}")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("masses sum to {sum}, expected 1 within {}", MASS_SUM_TOL)]
    MassSumNotOne { sum: f64 },
    #[error("total conflict: the operands have no intersecting focal elements (K = 1)")]
    TotalConflict,
    #[error("got {structures} structures but {weights} weights")]
    WeightCountMismatch { structures: usize, weights: usize },
    #[error("weights must be non-negative and not all zero")]
    BadWeights,
}

/// A focal element: a closed interval carrying strictly positive mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalElement {
    pub interval: Interval,
    pub mass: f64,
}

/// A finite Dempster-Shafer structure on closed intervals.
///
/// Invariants (enforced on construction): every mass is > 0, masses sum to 1
/// within [`MASS_SUM_TOL`], and no two focal elements share an interval —
/// duplicates are merged by mass addition on exact endpoint equality. Focal
/// elements are kept sorted by (lo, hi) so equal structures compare equal
/// and all downstream iteration is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct DsStructure {
    focal: Vec<FocalElement>,
}

impl DsStructure {
    pub fn new(elements: Vec<(Interval, f64)>) -> Result<Self, EvidenceError> {
        if elements.is_empty() {
            return Err(EvidenceError::Empty);
        }
        for (index, (_, mass)) in elements.iter().enumerate() {
            let positive = mass.is_finite() && *mass > 0.0;
            if !positive {
                return Err(EvidenceError::NonPositiveMass {
                    index,
                    mass: *mass,
                });
            }
        }
        let mut focal: Vec<FocalElement> = elements
            .into_iter()
            .map(|(interval, mass)| FocalElement { interval, mass })
            .collect();
        focal.sort_by(|a, b| {
            (a.interval.lo(), a.interval.hi())
                .partial_cmp(&(b.interval.lo(), b.interval.hi()))
                .expect("interval endpoints are finite")
        });
        // merge duplicates on exact endpoint equality
        let mut merged: Vec<FocalElement> = Vec::with_capacity(focal.len());
        for fe in focal {
            match merged.last_mut() {
                Some(last) if last.interval == fe.interval => last.mass += fe.mass,
                _ => merged.push(fe),
            }
        }
        let sum: f64 = merged.iter().map(|fe| fe.mass).sum();
        if (sum - 1.0).abs() > MASS_SUM_TOL {
            return Err(EvidenceError::MassSumNotOne { sum });
        }
        Ok(Self { focal: merged })
    }

    /// Single focal element with mass 1 (a vacuous structure when the
    /// interval covers the frame of interest).
    pub fn vacuous(interval: Interval) -> Self {
        Self {
            focal: vec![FocalElement {
                interval,
                mass: 1.0,
            }],
        }
    }

    pub fn focal_elements(&self) -> &[FocalElement] {
        &self.focal
    }

    pub fn len(&self) -> usize {
        self.focal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.focal.is_empty()
    }

    pub fn mass_sum(&self) -> f64 {
        self.focal.iter().map(|fe| fe.mass).sum()
    }

    /// Convex hull of all focal intervals.
    pub fn hull(&self) -> Interval {
        let mut hull = self.focal[0].interval;
        for fe in &self.focal[1..] {
            hull = hull.hull(&fe.interval);
        }
        hull
    }

    /// Total support for `target`: the mass of focal elements fully
    /// contained in it.
    pub fn belief(&self, target: &Interval) -> f64 {
        mass_over(self.focal.iter().filter(|fe| {
            target.contains_interval(&fe.interval)
        }))
    }

    /// Maximum potential support for `target`: the mass of focal elements
    /// that intersect it.
    pub fn plausibility(&self, target: &Interval) -> f64 {
        mass_over(self.focal.iter().filter(|fe| target.intersects(&fe.interval)))
    }

    /// Cumulative belief and plausibility `(CBF(x), CPF(x))`: the masses of
    /// focal elements with `hi <= x` and `lo <= x` respectively.
    pub fn cumulative(&self, x: f64) -> (f64, f64) {
        let cbf = mass_over(self.focal.iter().filter(|fe| fe.interval.hi() <= x));
        let cpf = mass_over(self.focal.iter().filter(|fe| fe.interval.lo() <= x));
        (cbf, cpf)
    }

    /// Complementary cumulative pair `(CCBF(x), CCPF(x)) = (1-CPF, 1-CBF)`.
    pub fn complementary_cumulative(&self, x: f64) -> (f64, f64) {
        let (cbf, cpf) = self.cumulative(x);
        (1.0 - cpf, 1.0 - cbf)
    }

    /// Bounds on `Prob(X > threshold)`: lower sums masses of focal elements
    /// entirely inside the exceedance region, upper sums those that reach
    /// into it.
    pub fn exceedance_bounds(&self, threshold: f64) -> (f64, f64) {
        let lower = mass_over(self.focal.iter().filter(|fe| fe.interval.lo() > threshold));
        let upper = mass_over(self.focal.iter().filter(|fe| fe.interval.hi() > threshold));
        (lower, upper)
    }
}

/// Sums masses; an empty selection yields +0.0 (a bare `sum()` gives -0.0).
fn mass_over<'a>(elements: impl Iterator<Item = &'a FocalElement>) -> f64 {
    let sum: f64 = elements.map(|fe| fe.mass).sum();
    if sum == 0.0 {
        0.0
    } else {
        sum
    }
}

/// Dempster's rule of combination for two structures from independent
/// sources: mass products over pairwise intersections, normalized by the
/// non-conflicting mass `1 - K`.
pub fn dempster_combine(
    m1: &DsStructure,
    m2: &DsStructure,
) -> Result<DsStructure, EvidenceError> {
    let mut products: Vec<(Interval, f64)> = Vec::new();
    let mut surviving_mass = 0.0;
    for a in m1.focal_elements() {
        for b in m2.focal_elements() {
            if let Some(intersection) = a.interval.intersection(&b.interval) {
                let mass = a.mass * b.mass;
                products.push((intersection, mass));
                surviving_mass += mass;
            }
        }
    }
    // masses are strictly positive, so K = 1 exactly when nothing intersects
    if products.is_empty() {
        return Err(EvidenceError::TotalConflict);
    }
    let normalized = products
        .into_iter()
        .map(|(interval, mass)| (interval, mass / surviving_mass))
        .collect();
    DsStructure::new(normalized)
}

/// Mixing rule: the weighted average of the input structures, with the
/// weights normalized by their sum so the output masses always sum to 1.
pub fn mix(structures: &[DsStructure], weights: &[f64]) -> Result<DsStructure, EvidenceError> {
    if structures.is_empty() {
        return Err(EvidenceError::Empty);
    }
    if structures.len() != weights.len() {
        return Err(EvidenceError::WeightCountMismatch {
            structures: structures.len(),
            weights: weights.len(),
        });
    }
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(EvidenceError::BadWeights);
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(EvidenceError::BadWeights);
    }
    let mut elements: Vec<(Interval, f64)> = Vec::new();
    for (ds, &w) in structures.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for fe in ds.focal_elements() {
            elements.push((fe.interval, w * fe.mass));
        }
    }
    let scaled = elements
        .into_iter()
        .map(|(interval, mass)| (interval, mass / total))
        .collect();
    DsStructure::new(scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    /// The running example body of evidence: {([1,4],2/3), ([3,6],1/3)}.
    fn example_body() -> DsStructure {
        DsStructure::new(vec![(iv(1.0, 4.0), 2.0 / 3.0), (iv(3.0, 6.0), 1.0 / 3.0)]).unwrap()
    }

    #[test]
    fn construction_validates_and_merges() {
        assert_eq!(DsStructure::new(vec![]).unwrap_err(), EvidenceError::Empty);
        assert!(matches!(
            DsStructure::new(vec![(iv(0.0, 1.0), 0.0), (iv(0.0, 2.0), 1.0)]),
            Err(EvidenceError::NonPositiveMass { index: 0, .. })
        ));
        assert!(matches!(
            DsStructure::new(vec![(iv(0.0, 1.0), 0.5)]),
            Err(EvidenceError::MassSumNotOne { .. })
        ));
        // exact duplicates merge by mass addition
        let ds = DsStructure::new(vec![
            (iv(0.0, 1.0), 0.25),
            (iv(2.0, 3.0), 0.5),
            (iv(0.0, 1.0), 0.25),
        ])
        .unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.focal_elements()[0].mass, 0.5);
        assert!((ds.mass_sum() - 1.0).abs() <= MASS_SUM_TOL);
    }

    #[test]
    fn belief_examples() {
        let ds = example_body();
        assert_eq!(ds.belief(&iv(0.0, 5.0)), 2.0 / 3.0);
        assert_eq!(ds.belief(&ds.hull()), 1.0);
        assert_eq!(ds.belief(&iv(4.5, 5.0)), 0.0);
    }

    #[test]
    fn plausibility_examples() {
        let ds = example_body();
        assert_eq!(ds.plausibility(&iv(0.0, 2.0)), 2.0 / 3.0);
        assert_eq!(ds.plausibility(&iv(5.0, 7.0)), 1.0 / 3.0);
        assert_eq!(ds.plausibility(&iv(10.0, 11.0)), 0.0);
        // belief never exceeds plausibility
        for target in [iv(0.0, 2.0), iv(2.0, 5.0), iv(3.0, 4.0), iv(0.0, 10.0)] {
            assert!(ds.belief(&target) <= ds.plausibility(&target) + 1e-15);
        }
    }

    #[test]
    fn dempster_combination_examples() {
        let single = |lo, hi| DsStructure::new(vec![(iv(lo, hi), 1.0)]).unwrap();

        let combined = dempster_combine(&single(0.0, 2.0), &single(1.0, 3.0)).unwrap();
        assert_eq!(combined.len(), 1);
        assert_eq!(combined.focal_elements()[0].interval, iv(1.0, 2.0));
        assert_eq!(combined.focal_elements()[0].mass, 1.0);

        // half the product mass conflicts and is normalized away
        let split = DsStructure::new(vec![(iv(0.0, 1.0), 0.5), (iv(2.0, 3.0), 0.5)]).unwrap();
        let combined = dempster_combine(&split, &single(0.0, 1.0)).unwrap();
        assert_eq!(combined.len(), 1);
        assert_eq!(combined.focal_elements()[0].interval, iv(0.0, 1.0));
        assert_eq!(combined.focal_elements()[0].mass, 1.0);

        assert_eq!(
            dempster_combine(&single(0.0, 1.0), &single(2.0, 3.0)).unwrap_err(),
            EvidenceError::TotalConflict
        );
    }

    #[test]
    fn dempster_with_vacuous_is_identity() {
        let ds = example_body();
        let vacuous = DsStructure::vacuous(ds.hull());
        let combined = dempster_combine(&ds, &vacuous).unwrap();
        assert_eq!(combined, ds);
    }

    #[test]
    fn mixing_reproduces_challenge_aggregates() {
        // sources for a
        let a1 = DsStructure::new(vec![(iv(0.6, 0.9), 1.0)]).unwrap();
        let a2 = DsStructure::new(vec![(iv(0.1, 0.5), 0.2), (iv(0.5, 1.0), 0.8)]).unwrap();
        let a = mix(&[a1, a2], &[1.0, 1.0]).unwrap();
        let got: Vec<(Interval, f64)> = a
            .focal_elements()
            .iter()
            .map(|fe| (fe.interval, fe.mass))
            .collect();
        assert_eq!(
            got,
            vec![
                (iv(0.1, 0.5), 0.1),
                (iv(0.5, 1.0), 0.4),
                (iv(0.6, 0.9), 0.5)
            ]
        );

        // sources for b; rational 1/3 masses
        let third = 1.0 / 3.0;
        let b1 = DsStructure::new(vec![(iv(0.3, 0.5), 0.1), (iv(0.6, 0.8), 0.9)]).unwrap();
        let b2 = DsStructure::new(vec![
            (iv(0.2, 0.4), 0.1),
            (iv(0.4, 0.6), 0.7),
            (iv(0.6, 1.0), 0.2),
        ])
        .unwrap();
        let b3 = DsStructure::new(vec![
            (iv(0.0, 0.2), third),
            (iv(0.2, 0.4), third),
            (iv(0.3, 0.5), third),
        ])
        .unwrap();
        let b = mix(&[b1, b2, b3], &[1.0, 1.0, 1.0]).unwrap();
        let expected_masses = [
            third / 3.0,
            (0.1 + third) / 3.0,
            (0.1 + third) / 3.0,
            0.7 / 3.0,
            0.9 / 3.0,
            0.2 / 3.0,
        ];
        let expected_intervals = [
            iv(0.0, 0.2),
            iv(0.2, 0.4),
            iv(0.3, 0.5),
            iv(0.4, 0.6),
            iv(0.6, 0.8),
            iv(0.6, 1.0),
        ];
        assert_eq!(b.len(), 6);
        for (fe, (want_iv, want_m)) in b
            .focal_elements()
            .iter()
            .zip(expected_intervals.iter().zip(expected_masses))
        {
            assert_eq!(fe.interval, *want_iv);
            assert!((fe.mass - want_m).abs() < 1e-15);
        }
        // the published 3-decimal values
        let rounded: Vec<f64> = b
            .focal_elements()
            .iter()
            .map(|fe| (fe.mass * 1000.0).round() / 1000.0)
            .collect();
        assert_eq!(rounded, vec![0.111, 0.144, 0.144, 0.233, 0.3, 0.067]);
    }

    #[test]
    fn mixing_identity_and_errors() {
        let ds = example_body();
        assert_eq!(mix(&[ds.clone()], &[2.5]).unwrap(), ds);
        // equal-weight mix of n copies is the structure itself
        let mixed = mix(&[ds.clone(), ds.clone(), ds.clone()], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(mixed.len(), ds.len());
        for (a, b) in mixed.focal_elements().iter().zip(ds.focal_elements()) {
            assert_eq!(a.interval, b.interval);
            assert!((a.mass - b.mass).abs() < 1e-15);
        }

        assert_eq!(mix(&[], &[]).unwrap_err(), EvidenceError::Empty);
        assert!(matches!(
            mix(&[ds.clone()], &[1.0, 2.0]),
            Err(EvidenceError::WeightCountMismatch { .. })
        ));
        assert_eq!(
            mix(&[ds.clone(), ds.clone()], &[0.0, 0.0]).unwrap_err(),
            EvidenceError::BadWeights
        );
        assert_eq!(
            mix(&[ds.clone()], &[-1.0]).unwrap_err(),
            EvidenceError::BadWeights
        );
    }

    #[test]
    fn cumulative_examples() {
        let ds = example_body();
        assert_eq!(ds.cumulative(4.0), (2.0 / 3.0, 1.0));
        assert_eq!(ds.cumulative(0.5), (0.0, 0.0));
        assert_eq!(ds.cumulative(7.0), (1.0, 1.0));
        // nondecreasing and cbf <= cpf over a sweep
        let mut prev = (0.0, 0.0);
        for step in 0..=100 {
            let x = step as f64 * 0.07;
            let (cbf, cpf) = ds.cumulative(x);
            assert!(cbf <= cpf + 1e-15);
            assert!(cbf >= prev.0 && cpf >= prev.1);
            prev = (cbf, cpf);
        }
    }

    #[test]
    fn complementary_cumulative_examples() {
        let ds = example_body();
        let (ccbf, ccpf) = ds.complementary_cumulative(4.0);
        assert_eq!(ccbf, 0.0);
        assert!((ccpf - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ds.complementary_cumulative(0.5), (1.0, 1.0));
        assert_eq!(ds.complementary_cumulative(7.0), (0.0, 0.0));
        // exact complements of the cumulative pair
        for step in 0..=70 {
            let x = step as f64 * 0.1;
            let (cbf, cpf) = ds.cumulative(x);
            assert_eq!(ds.complementary_cumulative(x), (1.0 - cpf, 1.0 - cbf));
        }
    }

    #[test]
    fn exceedance_examples() {
        let ds = example_body();
        assert_eq!(ds.exceedance_bounds(7.0), (0.0, 0.0));
        assert_eq!(ds.exceedance_bounds(0.0), (1.0, 1.0));
        let (lower, upper) = ds.exceedance_bounds(2.0);
        assert!((lower - 1.0 / 3.0).abs() < 1e-15); // only [3,6] lies above 2
        assert_eq!(upper, 1.0);
        assert!(lower <= upper);
    }

    #[test]
    fn exceedance_matches_complementary_cumulative() {
        let ds = example_body();
        for step in 0..=70 {
            let x = step as f64 * 0.1;
            let (lower, upper) = ds.exceedance_bounds(x);
            let (ccbf, ccpf) = ds.complementary_cumulative(x);
            assert!((lower - ccbf).abs() < 1e-12, "x={x}: {lower} vs {ccbf}");
            assert!((upper - ccpf).abs() < 1e-12, "x={x}: {upper} vs {ccpf}");
        }
    }
}
