//! Exact rationals and roots of unity `e^{2πi·angle}` with rational angle.

use std::fmt;
use std::ops::Mul;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Complex;

/// Central charges and conformal weights. Always in lowest terms with a positive
/// denominator.
pub type Rational = Ratio<i64>;

/// Parses `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::BadRational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Reduces `x` into `[0, 1)`.
pub fn frac(x: Rational) -> Rational {
    x - x.floor()
}

/// The complex number `e^{2πi·angle}`, kept exact until it is needed as a float.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase {
    angle: Rational,
}

impl Phase {
    pub fn new(angle: Rational) -> Self {
        Phase { angle: frac(angle) }
    }

    pub fn one() -> Self {
        Phase {
            angle: Rational::zero(),
        }
    }

    /// `e^{2πi·p/q}`.
    pub fn from_fraction(p: i64, q: i64) -> Self {
        Phase::new(Rational::new(p, q))
    }

    /// Angle in `[0, 1)`.
    pub fn angle(&self) -> Rational {
        self.angle
    }

    pub fn pow(&self, n: i64) -> Self {
        Phase::new(self.angle * n)
    }

    pub fn conj(&self) -> Self {
        Phase::new(-self.angle)
    }

    pub fn to_complex(&self) -> Complex {
        if self.angle.is_zero() {
            return Complex::one();
        }
        let theta = 2.0 * std::f64::consts::PI * (*self.angle.numer() as f64)
            / (*self.angle.denom() as f64);
        Complex::from_polar(1.0, theta)
    }
}

// Multiplying phases adds angles.
impl Mul for Phase {
    type Output = Phase;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::new(self.angle + rhs.angle)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^(2πi·{})", self.angle)
    }
}

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}
