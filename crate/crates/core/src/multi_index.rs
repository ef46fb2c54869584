//! Multi-indices over a fixed number of dimensions.

use std::fmt;

/// A vector of per-dimension non-negative degrees `(i_1, ..., i_n)`.
///
/// The partial order `I <= J` is componentwise. Enumeration helpers iterate
/// in odometer order with the first dimension fastest, which fixes a
/// deterministic layout for dense coefficient storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(degrees: Vec<usize>) -> Self {
        Self(degrees)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self, dim: usize) -> usize {
        self.0[dim]
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Number of lattice points `I` with `0 <= I <= self` componentwise.
    pub fn lattice_size(&self) -> usize {
        self.0.iter().map(|&d| d + 1).product()
    }

    /// Linear position of `self` in the dense lattice of `bound`,
    /// first dimension fastest.
    pub fn lattice_offset(&self, bound: &MultiIndex) -> usize {
        debug_assert!(self.le(bound));
        let mut offset = 0;
        let mut stride = 1;
        for (d, &i) in self.0.iter().enumerate() {
            offset += i * stride;
            stride *= bound.0[d] + 1;
        }
        offset
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", d)?;
        }
        write!(f, ")")
    }
}

/// Iterates all multi-indices `lower <= I <= upper` componentwise, first
/// dimension fastest. Empty if `lower` exceeds `upper` in any dimension.
pub fn lattice_range_iter(
    lower: Vec<usize>,
    upper: Vec<usize>,
) -> impl Iterator<Item = MultiIndex> {
    debug_assert_eq!(lower.len(), upper.len());
    let n = lower.len();
    let mut current: Option<Vec<usize>> = if lower.iter().zip(&upper).all(|(l, u)| l <= u) {
        Some(lower.clone())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let cur = current.take()?;
        let mut next = cur.clone();
        for d in 0..n {
            if next[d] < upper[d] {
                next[d] += 1;
                current = Some(next);
                break;
            }
            next[d] = lower[d];
        }
        Some(MultiIndex::new(cur))
    })
}

/// Iterates all multi-indices `0 <= I <= bound`, first dimension fastest.
pub fn lattice_iter(bound: &MultiIndex) -> impl Iterator<Item = MultiIndex> {
    lattice_range_iter(vec![0; bound.len()], bound.degrees().to_vec())
}

/// Exact binomial coefficient; degrees here are small so u128 never overflows.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Product of per-dimension binomials `C(upper_d, lower_d)`.
pub fn binomial_product(upper: &MultiIndex, lower: &MultiIndex) -> u128 {
    upper
        .degrees()
        .iter()
        .zip(lower.degrees())
        .map(|(&u, &l)| binomial(u, l))
        .product()
}
