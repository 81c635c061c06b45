//! Fixed-point money in micro-units.
//!
//! Every bid, valuation and charge is an integer count of 10⁻⁶ currency
//! units, so sums and differences are exact and the charge identities can be
//! compared with `==`.

use core::fmt;
use core::iter::Sum;
use core::str::FromStr;

use alloc::string::String;
use thiserror::Error;

use crate::Ratio;

/// Micro-units per currency unit.
pub const MICROS_PER_UNIT: u64 = 1_000_000;

const FRACTION_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoneyError {
    #[error("empty decimal")]
    Empty,
    #[error("negative amount `{0}`")]
    NegativeAmount(String),
    #[error("`{0}` has more than 6 fractional digits")]
    PrecisionLoss(String),
    #[error("`{0}` is not a decimal number")]
    Malformed(String),
    #[error("`{0}` does not fit in 64-bit micro-units")]
    Overflow(String),
}

/// A non-negative amount of money.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(u64);

impl Money {
    pub const ZERO: Money = Money(0);

    #[inline]
    pub const fn from_micros(micros: u64) -> Self {
        Money(micros)
    }

    #[inline]
    pub const fn micros(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn checked_add(self, rhs: Money) -> Option<Money> {
        self.0.checked_add(rhs.0).map(Money)
    }

    #[inline]
    pub fn checked_sub(self, rhs: Money) -> Option<Money> {
        self.0.checked_sub(rhs.0).map(Money)
    }

    #[inline]
    pub fn saturating_sub(self, rhs: Money) -> Money {
        Money(self.0.saturating_sub(rhs.0))
    }

    /// Signed difference `self - rhs`.
    #[inline]
    pub fn delta(self, rhs: Money) -> SignedMoney {
        SignedMoney(self.0 as i64 - rhs.0 as i64)
    }

    /// Multiplies by a non-negative rational, rounding half-up to the
    /// nearest micro-unit. Returns `None` for a negative factor or overflow.
    pub fn scale_half_up(self, factor: Ratio) -> Option<Money> {
        let numer = *factor.numer();
        let denom = *factor.denom();
        if numer < 0 || denom <= 0 {
            return None;
        }
        let product = (self.0 as i128).checked_mul(numer)?;
        let rounded = (2 * product + denom) / (2 * denom);
        u64::try_from(rounded).ok().map(Money)
    }

    /// The amount as an exact rational number of currency units.
    pub fn as_ratio(self) -> Ratio {
        Ratio::new(self.0 as i128, MICROS_PER_UNIT as i128)
    }

    /// Lossy conversion for reporting only.
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_UNIT as f64
    }
}

impl Sum for Money {
    /// Panics on overflow; validated instances bound every reachable sum.
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |acc, m| {
            acc.checked_add(m).expect("money sum overflow")
        })
    }
}

impl fmt::Display for Money {
    /// Always prints exactly six fractional digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{:06}",
            self.0 / MICROS_PER_UNIT,
            self.0 % MICROS_PER_UNIT
        )
    }
}

impl FromStr for Money {
    type Err = MoneyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        money_from_decimal(s)
    }
}

/// Parses a non-negative decimal string with at most six fractional digits
/// into exact micro-units.
pub fn money_from_decimal(text: &str) -> Result<Money, MoneyError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(MoneyError::Empty);
    }
    let unsigned = match text.strip_prefix('-') {
        Some(rest) => {
            if rest.bytes().any(|b| b != b'0' && b != b'.') {
                return Err(MoneyError::NegativeAmount(text.into()));
            }
            rest
        }
        None => text.strip_prefix('+').unwrap_or(text),
    };
    let (whole, frac) = match unsigned.split_once('.') {
        Some((w, f)) => (w, f),
        None => (unsigned, ""),
    };
    let digits_only = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (whole.is_empty() && frac.is_empty()) || !digits_only(whole) || !digits_only(frac) {
        return Err(MoneyError::Malformed(text.into()));
    }
    if frac.len() > FRACTION_DIGITS {
        return Err(MoneyError::PrecisionLoss(text.into()));
    }
    let overflow = || MoneyError::Overflow(text.into());
    let mut micros: u64 = 0;
    for b in whole.bytes() {
        micros = micros
            .checked_mul(10)
            .and_then(|m| m.checked_add(u64::from(b - b'0')))
            .ok_or_else(overflow)?;
    }
    micros = micros.checked_mul(MICROS_PER_UNIT).ok_or_else(overflow)?;
    let mut scale = MICROS_PER_UNIT / 10;
    for b in frac.bytes() {
        micros = micros
            .checked_add(u64::from(b - b'0') * scale)
            .ok_or_else(overflow)?;
        scale /= 10;
    }
    Ok(Money(micros))
}

/// Inverse of [`money_from_decimal`].
pub fn money_to_decimal(amount: Money) -> String {
    alloc::format!("{amount}")
}

/// Parses a non-negative decimal (≤ 6 fractional digits) into an exact ratio.
pub fn ratio_from_decimal(text: &str) -> Result<Ratio, MoneyError> {
    money_from_decimal(text).map(Money::as_ratio)
}

/// Difference of two amounts; negative when a bidder is paid less than its
/// valuation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedMoney(i64);

impl SignedMoney {
    pub const ZERO: SignedMoney = SignedMoney(0);

    pub const fn from_micros(micros: i64) -> Self {
        SignedMoney(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }
}

impl fmt::Display for SignedMoney {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        write!(f, "{sign}{}", Money(self.0.unsigned_abs()))
    }
}

/// Formats a ratio as a decimal rounded half-away-from-zero to six digits.
pub fn ratio_to_decimal(value: Ratio) -> String {
    let scaled = value * Ratio::from_integer(MICROS_PER_UNIT as i128);
    let rounded = scaled.round().to_integer();
    let sign = if rounded < 0 { "-" } else { "" };
    let abs = rounded.unsigned_abs();
    alloc::format!(
        "{sign}{}.{:06}",
        abs / MICROS_PER_UNIT as u128,
        abs % MICROS_PER_UNIT as u128
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_micro_units() {
        assert_eq!(money_from_decimal("0.0295").unwrap().micros(), 29_500);
        assert_eq!(money_from_decimal("0").unwrap(), Money::ZERO);
        assert_eq!(money_from_decimal("1.15").unwrap().micros(), 1_150_000);
        assert_eq!(money_from_decimal("12").unwrap().micros(), 12_000_000);
        assert_eq!(money_from_decimal(".5").unwrap().micros(), 500_000);
    }

    #[test]
    fn rejects_bad_decimals() {
        assert!(matches!(
            money_from_decimal("0.0000001"),
            Err(MoneyError::PrecisionLoss(_))
        ));
        assert!(matches!(
            money_from_decimal("-0.5"),
            Err(MoneyError::NegativeAmount(_))
        ));
        assert!(matches!(
            money_from_decimal("1.2.3"),
            Err(MoneyError::Malformed(_))
        ));
        assert!(matches!(
            money_from_decimal("."),
            Err(MoneyError::Malformed(_))
        ));
        assert!(matches!(money_from_decimal(""), Err(MoneyError::Empty)));
        assert!(matches!(
            money_from_decimal("99999999999999999999"),
            Err(MoneyError::Overflow(_))
        ));
    }

    #[test]
    fn negative_zero_is_zero() {
        assert_eq!(money_from_decimal("-0.000").unwrap(), Money::ZERO);
    }

    #[test]
    fn display_has_six_digits() {
        assert_eq!(Money::from_micros(780_000).to_string(), "0.780000");
        assert_eq!(Money::ZERO.to_string(), "0.000000");
        assert_eq!(SignedMoney::from_micros(-120_000).to_string(), "-0.120000");
    }

    #[test]
    fn scale_rounds_half_up() {
        let half = Ratio::new(3, 2);
        assert_eq!(
            Money::from_micros(550_000)
                .scale_half_up(half)
                .unwrap()
                .micros(),
            825_000
        );
        // 0.000001 * 1.5 = 0.0000015 -> 0.000002
        assert_eq!(
            Money::from_micros(1).scale_half_up(half).unwrap().micros(),
            2
        );
        assert_eq!(
            Money::from_micros(3)
                .scale_half_up(Ratio::new(1, 2))
                .unwrap()
                .micros(),
            2
        );
        assert!(Money::from_micros(3)
            .scale_half_up(Ratio::new(-1, 2))
            .is_none());
    }

    #[test]
    fn ratio_formatting() {
        assert_eq!(ratio_to_decimal(Ratio::new(42, 78)), "0.538462");
        assert_eq!(ratio_to_decimal(Ratio::new(-1, 3)), "-0.333333");
        assert_eq!(ratio_from_decimal("0.2").unwrap(), Ratio::new(1, 5));
    }

    proptest::proptest! {
        #[test]
        fn decimal_round_trip(micros in 0u64..u64::MAX / 2) {
            let m = Money::from_micros(micros);
            proptest::prop_assert_eq!(money_from_decimal(&money_to_decimal(m)).unwrap(), m);
        }

        #[test]
        fn sums_are_exact(values in proptest::collection::vec(0u64..10_000_000, 0..10_000)) {
            let total: Money = values.iter().map(|&v| Money::from_micros(v)).sum();
            proptest::prop_assert_eq!(total.micros(), values.iter().sum::<u64>());
        }
    }
}
