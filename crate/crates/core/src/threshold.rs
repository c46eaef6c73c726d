//! Exact rational thresholds in `[0, 1]`.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact non-negative rational, always in lowest terms.
pub type Rational = Ratio<BigUint>;

/// Maximum number of fractional digits accepted in decimal notation.
pub const MAX_DECIMAL_PLACES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThresholdError {
    #[error("threshold {0:?} is not a fraction or a decimal")]
    Syntax(String),
    #[error("threshold {0:?} has more than {MAX_DECIMAL_PLACES} decimal places")]
    TooPrecise(String),
    #[error("threshold denominator is zero")]
    ZeroDenominator,
    #[error("threshold {0} is greater than 1")]
    AboveOne(String),
}

/// A structuredness threshold `θ = num/den` with `0 ≤ θ ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold(Rational);

impl Threshold {
    pub fn new(value: Rational) -> Result<Self, ThresholdError> {
        if value > Rational::one() {
            return Err(ThresholdError::AboveOne(alloc::format!("{value}")));
        }
        Ok(Threshold(value))
    }

    pub fn from_fraction(num: u64, den: u64) -> Result<Self, ThresholdError> {
        if den == 0 {
            return Err(ThresholdError::ZeroDenominator);
        }
        Threshold::new(Rational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Threshold(Rational::zero())
    }

    pub fn one() -> Self {
        Threshold(Rational::one())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// Numerator of the reduced fraction.
    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    /// Denominator of the reduced fraction.
    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `self + step`, clamped to 1.
    pub fn saturating_add(&self, step: &Rational) -> Threshold {
        let next = &self.0 + step;
        if next > Rational::one() {
            Threshold::one()
        } else {
            Threshold(next)
        }
    }
}

impl FromStr for Threshold {
    type Err = ThresholdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let syntax = || ThresholdError::Syntax(s.into());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if let Some((n, d)) = s.split_once('/') {
            let (n, d) = (n.trim(), d.trim());
            if !digits(n) || !digits(d) {
                return Err(syntax());
            }
            let num: BigUint = n.parse().map_err(|_| syntax())?;
            let den: BigUint = d.parse().map_err(|_| syntax())?;
            if den.is_zero() {
                return Err(ThresholdError::ZeroDenominator);
            }
            return Threshold::new(Rational::new(num, den));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if !digits(int) && !(int.is_empty() && digits(frac)) {
            return Err(syntax());
        }
        if !frac.is_empty() && !digits(frac) {
            return Err(syntax());
        }
        if frac.len() > MAX_DECIMAL_PLACES {
            return Err(ThresholdError::TooPrecise(s.into()));
        }
        let mut all = String::from(int);
        all.push_str(frac);
        let num: BigUint = all.parse().map_err(|_| syntax())?;
        let den = BigUint::from(10u32).pow(frac.len() as u32);
        Threshold::new(Rational::new(num, den))
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Renders `value` rounded half-up to `places` decimals.
pub fn format_decimal(value: &Rational, places: u32) -> String {
    let scale = BigUint::from(10u32).pow(places);
    let two = BigUint::from(2u32);
    let scaled = (value.numer() * &scale * &two + value.denom()) / (value.denom() * &two);
    let int = &scaled / &scale;
    let frac = &scaled % &scale;
    if places == 0 {
        return alloc::format!("{int}");
    }
    alloc::format!("{int}.{frac:0>width$}", frac = alloc::format!("{frac}"), width = places as usize)
}
