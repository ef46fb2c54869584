//! Closed real intervals and their natural arithmetic.
//!
//! Endpoints are plain `f64`; evaluation is outward in the sense of taking
//! exact min/max over endpoint combinations, without directed rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Construction failure for [`Interval`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval [{lo}, {hi}]: endpoints must be finite with lo <= hi")]
    Invalid { lo: f64, hi: f64 },
}

/// Domain violation while evaluating an operation on reals or intervals.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("division by zero (denominator {denom})")]
    DivisionByZero { denom: String },
    #[error("log of non-positive argument ({arg})")]
    LogNonPositive { arg: String },
    #[error("sqrt of negative argument ({arg})")]
    SqrtNegative { arg: String },
    #[error("power with non-positive base ({base}) and non-integer exponent")]
    PowBaseNonPositive { base: String },
    #[error("zero base raised to negative power")]
    ZeroToNegativePower,
    #[error("non-finite result in {op}")]
    NonFinite { op: &'static str },
}

/// A closed real interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(IntervalError::Invalid { lo, hi })
        }
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval requires a finite value");
        Self { lo: x, hi: x }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals intersect iff neither lies strictly to one side.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    #[allow(clippy::should_implement_trait)] // fallible, unlike std::ops::Div
    pub fn div(self, rhs: Interval) -> Result<Interval, DomainError> {
        if rhs.contains(0.0) {
            return Err(DomainError::DivisionByZero {
                denom: rhs.to_string(),
            });
        }
        let candidates = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        Ok(min_max(&candidates))
    }

    pub fn exp(self) -> Interval {
        Interval {
            lo: self.lo.exp(),
            hi: self.hi.exp(),
        }
    }

    pub fn ln(self) -> Result<Interval, DomainError> {
        if self.lo <= 0.0 {
            return Err(DomainError::LogNonPositive {
                arg: self.to_string(),
            });
        }
        Ok(Interval {
            lo: self.lo.ln(),
            hi: self.hi.ln(),
        })
    }

    pub fn sqrt(self) -> Result<Interval, DomainError> {
        if self.lo < 0.0 {
            return Err(DomainError::SqrtNegative {
                arg: self.to_string(),
            });
        }
        Ok(Interval {
            lo: self.lo.sqrt(),
            hi: self.hi.sqrt(),
        })
    }

    /// Tight image under an integer power, using the even/odd rule.
    pub fn powi(self, k: i32) -> Result<Interval, DomainError> {
        if k == 0 {
            return Ok(Interval { lo: 1.0, hi: 1.0 });
        }
        if k < 0 {
            if self.contains(0.0) {
                return Err(DomainError::DivisionByZero {
                    denom: format!("{}^{}", self, k),
                });
            }
            let pos = self.powi(-k)?;
            return Interval { lo: 1.0, hi: 1.0 }.div(pos);
        }
        let (plo, phi) = (self.lo.powi(k), self.hi.powi(k));
        if k % 2 == 1 || self.lo >= 0.0 {
            Ok(Interval { lo: plo, hi: phi })
        } else if self.hi <= 0.0 {
            Ok(Interval { lo: phi, hi: plo })
        } else {
            Ok(Interval {
                lo: 0.0,
                hi: plo.max(phi),
            })
        }
    }

    /// Image under sin, exact at endpoints and interior extrema.
    pub fn sin(self) -> Interval {
        use std::f64::consts::{FRAC_PI_2, PI};
        if self.width() >= 2.0 * PI {
            return Interval { lo: -1.0, hi: 1.0 };
        }
        let mut lo = self.lo.sin().min(self.hi.sin());
        let mut hi = self.lo.sin().max(self.hi.sin());
        // interior critical points of sin: pi/2 + k*pi
        let k_min = ((self.lo - FRAC_PI_2) / PI).ceil() as i64;
        let k_max = ((self.hi - FRAC_PI_2) / PI).floor() as i64;
        for k in k_min..=k_max {
            let c = FRAC_PI_2 + (k as f64) * PI;
            if self.contains(c) {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }

    /// Image under cos, exact at endpoints and interior extrema.
    pub fn cos(self) -> Interval {
        use std::f64::consts::PI;
        if self.width() >= 2.0 * PI {
            return Interval { lo: -1.0, hi: 1.0 };
        }
        let mut lo = self.lo.cos().min(self.hi.cos());
        let mut hi = self.lo.cos().max(self.hi.cos());
        // interior critical points of cos: k*pi
        let k_min = (self.lo / PI).ceil() as i64;
        let k_max = (self.hi / PI).floor() as i64;
        for k in k_min..=k_max {
            let c = (k as f64) * PI;
            if self.contains(c) {
                if k.rem_euclid(2) == 0 {
                    hi = 1.0;
                } else {
                    lo = -1.0;
                }
            }
        }
        Interval {
            lo: lo.max(-1.0),
            hi: hi.min(1.0),
        }
    }
}

fn min_max(values: &[f64]) -> Interval {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Interval { lo, hi }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        min_max(&[
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ])
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
