//! Recursive budget split along a successful chain.
//!
//! The hired agent receives half the budget, its recommender a quarter, and so
//! on back to the initial spreader. A chain of `K` agents leaves `B * 2^-K`
//! unallocated. Amounts are dyadic rationals over an integer budget so that
//! payouts and surplus always add back to the budget exactly.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Longest chain whose amounts fit the exact representation.
pub const MAX_CHAIN_LENGTH: u32 = 64;

/// `units / 2^scale`.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Amount {
    units: u128,
    scale: u32,
}

impl Amount {
    pub fn new(units: u128, scale: u32) -> Self {
        Amount { units, scale }.reduced()
    }

    pub fn from_int(units: u64) -> Self {
        Amount {
            units: units as u128,
            scale: 0,
        }
    }

    fn reduced(mut self) -> Self {
        while self.scale > 0 && self.units.is_multiple_of(2) {
            self.units /= 2;
            self.scale -= 1;
        }
        if self.units == 0 {
            self.scale = 0;
        }
        self
    }

    pub fn units(&self) -> u128 {
        self.units
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn to_f64(self) -> f64 {
        self.units as f64 / libm::exp2(self.scale as f64)
    }

    /// Exact sum, or `None` if the common denominator overflows `u128`.
    pub fn checked_add(self, other: Amount) -> Option<Amount> {
        let scale = self.scale.max(other.scale);
        let widen = |x: Amount| {
            let shift = scale - x.scale;
            (x.units.leading_zeros() >= shift).then(|| x.units << shift)
        };
        let units = widen(self)?.checked_add(widen(other)?)?;
        Some(Amount { units, scale }.reduced())
    }
}

impl PartialEq for Amount {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.reduced(), other.reduced());
        a.units == b.units && a.scale == b.scale
    }
}

impl Eq for Amount {}

/// Exact decimal expansion; `2^-k` always terminates after `k` digits.
impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.reduced();
        let mask = (1u128 << a.scale) - 1;
        write!(f, "{}", a.units >> a.scale)?;
        let mut frac = a.units & mask;
        if frac == 0 {
            return Ok(());
        }
        f.write_str(".")?;
        while frac != 0 {
            // frac < 2^64, so the product fits.
            let d = frac * 10;
            write!(f, "{}", d >> a.scale)?;
            frac = d & mask;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PayoutSchedule {
    /// From the hired agent back to the initial spreader.
    pub payouts: Vec<Amount>,
    pub surplus: Amount,
    pub budget: u64,
}

impl PayoutSchedule {
    pub fn total_paid(&self) -> Amount {
        self.payouts.iter().fold(Amount::from_int(0), |acc, &p| {
            acc.checked_add(p)
                .expect("payouts share the schedule's scale")
        })
    }
}

/// Splits `budget` over a chain of `chain_length` agents.
pub fn compute_payouts(chain_length: usize, budget: u64) -> Result<PayoutSchedule> {
    if chain_length == 0 {
        return Err(Error::param("chain length 0 has no hire and no payouts"));
    }
    if chain_length > MAX_CHAIN_LENGTH as usize {
        return Err(Error::param(format!(
            "chain length {chain_length} exceeds {MAX_CHAIN_LENGTH}"
        )));
    }
    let k = chain_length as u32;
    let b = budget as u128;
    // Every amount is an integer multiple of B / 2^k.
    let payouts = (1..=k).map(|i| Amount::new(b << (k - i), k)).collect();
    Ok(PayoutSchedule {
        payouts,
        surplus: Amount::new(b, k),
        budget,
    })
}

/// Recovers the chain length from a surplus fraction `2^-K`.
///
/// The fraction must match `2^-K` to a relative tolerance of `1e-12`.
pub fn surplus_to_length(surplus_fraction: f64) -> Result<usize> {
    if !(surplus_fraction > 0.0 && surplus_fraction <= 0.5) {
        return Err(Error::domain(format!(
            "surplus fraction {surplus_fraction} not in (0, 0.5]"
        )));
    }
    let k = libm::round(-libm::log2(surplus_fraction));
    let exact = libm::exp2(-k);
    if k < 1.0 || ((surplus_fraction - exact) / exact).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "{surplus_fraction} is not a power 2^-K"
        )));
    }
    Ok(k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn amounts(s: &PayoutSchedule) -> Vec<f64> {
        s.payouts.iter().map(|a| a.to_f64()).collect()
    }

    #[test]
    fn payout_examples() {
        let s = compute_payouts(1, 8).unwrap();
        assert_eq!(amounts(&s), [4.0]);
        assert_eq!(s.surplus.to_f64(), 4.0);

        let s = compute_payouts(3, 8).unwrap();
        assert_eq!(amounts(&s), [4.0, 2.0, 1.0]);
        assert_eq!(s.surplus, Amount::from_int(1));

        let s = compute_payouts(2, 1).unwrap();
        assert_eq!(s.total_paid().to_f64(), 0.75);
    }

    #[test]
    fn zero_length_is_rejected() {
        assert!(matches!(compute_payouts(0, 10), Err(Error::Parameter(_))));
        assert!(compute_payouts(65, 10).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(surplus_to_length(0.5).unwrap(), 1);
        assert_eq!(surplus_to_length(0.125).unwrap(), 3);
        assert!(matches!(surplus_to_length(0.3), Err(Error::Domain(_))));
        assert!(surplus_to_length(0.0).is_err());
        assert!(surplus_to_length(1.0).is_err());
        assert!(surplus_to_length(f64::NAN).is_err());
    }

    #[test]
    fn surplus_shrinks_with_length() {
        let mut prev = f64::INFINITY;
        for k in 1..=50 {
            let s = compute_payouts(k, 1).unwrap().surplus.to_f64();
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn display_is_exact() {
        assert_eq!(Amount::new(3, 2).to_string(), "0.75");
        assert_eq!(Amount::from_int(1000).to_string(), "1000");
        assert_eq!(Amount::new(1, 64).to_string().len(), 2 + 64);
        let s = compute_payouts(64, u64::MAX).unwrap();
        assert_eq!(s.payouts[0].to_string(), "9223372036854775807.5");
    }

    #[test]
    fn amount_equality_ignores_representation() {
        assert_eq!(Amount::new(4, 2), Amount::from_int(1));
        assert_eq!(Amount::new(0, 7), Amount::from_int(0));
        assert_eq!(
            Amount::new(1, 3).checked_add(Amount::new(1, 1)).unwrap(),
            Amount::new(5, 3)
        );
    }
}
