use alloc::string::String;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::threshold::{format_decimal, Rational, Threshold};

/// A structuredness value as favourable and total case counts.
///
/// The value is `favorable / total`, or 1 when there are no total cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructurednessValue {
    pub favorable: BigUint,
    pub total: BigUint,
}

impl StructurednessValue {
    pub fn new(favorable: BigUint, total: BigUint) -> Self {
        debug_assert!(favorable <= total);
        StructurednessValue { favorable, total }
    }

    pub fn value(&self) -> Rational {
        if self.total.is_zero() {
            Rational::one()
        } else {
            Rational::new(self.favorable.clone(), self.total.clone())
        }
    }

    /// `θ2 · favorable ≥ θ1 · total`.
    pub fn meets(&self, theta: &Threshold) -> bool {
        theta.denom() * &self.favorable >= theta.numer() * &self.total
    }

    /// Reduced fraction, e.g. `2/3`.
    pub fn fraction(&self) -> String {
        let v = self.value();
        alloc::format!("{}/{}", v.numer(), v.denom())
    }

    /// Half-up rounding to `places` decimals.
    pub fn decimal(&self, places: u32) -> String {
        format_decimal(&self.value(), places)
    }

    /// Lossy conversion for reports.
    pub fn to_f64(&self) -> f64 {
        if self.total.is_zero() {
            return 1.0;
        }
        // Scale down to keep the division in range for huge counts.
        let shift = self.total.bits().saturating_sub(52);
        let f = (&self.favorable >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
        let t = (&self.total >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
        f / t
    }
}

impl fmt::Display for StructurednessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.fraction(), self.decimal(2))
    }
}
