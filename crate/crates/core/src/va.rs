use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Lower end of the valence/arousal rating scale.
pub const VA_MIN: f64 = 1.0;
/// Upper end of the valence/arousal rating scale.
pub const VA_MAX: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VaError {
    #[error("malformed valence#arousal value {0:?}")]
    Malformed(String),
    #[error("valence#arousal value {valence}#{arousal} lies outside [1, 9]")]
    OutOfRange { valence: f64, arousal: f64 },
}

/// A (valence, arousal) pair on the 1–9 scale.
///
/// Values are kept at full precision. Two-decimal rounding happens only when
/// the score is rendered (see the [`fmt::Display`] impl) or when model output
/// is ingested.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct VaScore {
    valence: f64,
    arousal: f64,
}

impl VaScore {
    pub fn new(valence: f64, arousal: f64) -> Result<Self, VaError> {
        if !valence.is_finite() || !arousal.is_finite() {
            return Err(VaError::Malformed(alloc::format!("{valence}#{arousal}")));
        }
        if !in_range(valence) || !in_range(arousal) {
            return Err(VaError::OutOfRange { valence, arousal });
        }
        Ok(Self { valence, arousal })
    }

    pub fn valence(&self) -> f64 {
        self.valence
    }

    pub fn arousal(&self) -> f64 {
        self.arousal
    }

    /// The score with both components rounded half-up to two decimals.
    pub fn rounded(&self) -> Self {
        // rounding an in-range value cannot leave the range
        Self {
            valence: round_half_up_2(self.valence),
            arousal: round_half_up_2(self.arousal),
        }
    }
}

fn in_range(x: f64) -> bool {
    (VA_MIN..=VA_MAX).contains(&x)
}

/// Rounds half-up (away from zero for positives) to two decimal places.
pub fn round_half_up_2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

/// Writes `x` with exactly two decimals, rounding half-up.
pub fn format_two_decimals(f: &mut impl fmt::Write, x: f64) -> fmt::Result {
    let cents = libm::round(x * 100.0) as i64;
    let sign = if cents < 0 { "-" } else { "" };
    let cents = cents.unsigned_abs();
    write!(f, "{sign}{}.{:02}", cents / 100, cents % 100)
}

impl fmt::Display for VaScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_two_decimals(f, self.valence)?;
        f.write_str("#")?;
        format_two_decimals(f, self.arousal)
    }
}

/// Parses the strict `V#A` file micro-format.
///
/// Each side is `[0-9]+(\.[0-9]{1,2})?`; surrounding whitespace of the whole
/// string is ignored.
pub fn parse_va_string(s: &str) -> Result<VaScore, VaError> {
    let trimmed = s.trim();
    let malformed = || VaError::Malformed(trimmed.to_string());
    let (v, a) = trimmed.split_once('#').ok_or_else(malformed)?;
    if !is_strict_number(v) || !is_strict_number(a) {
        return Err(malformed());
    }
    let valence: f64 = v.parse().map_err(|_| malformed())?;
    let arousal: f64 = a.parse().map_err(|_| malformed())?;
    VaScore::new(valence, arousal)
}

fn is_strict_number(s: &str) -> bool {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    digits(int) && frac.is_none_or(|f| digits(f) && f.len() <= 2)
}

impl FromStr for VaScore {
    type Err = VaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_va_string(s)
    }
}

impl Serialize for VaScore {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VaScore {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_va_string(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn parses_sample_values() {
        let va = parse_va_string("4.38#5.25").unwrap();
        assert_eq!((va.valence(), va.arousal()), (4.38, 5.25));
        let mid = parse_va_string("5#5").unwrap();
        assert_eq!(format!("{mid}"), "5.00#5.00");
        assert_eq!(format!("{}", parse_va_string(" 2.38#7.5 ").unwrap()), "2.38#7.50");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(parse_va_string("9.01#5.00"), Err(VaError::OutOfRange { .. })));
        assert!(matches!(parse_va_string("0.99#5"), Err(VaError::OutOfRange { .. })));
        assert!(matches!(parse_va_string("12#5"), Err(VaError::OutOfRange { .. })));
    }

    #[test]
    fn rejects_bad_shapes() {
        for s in ["", "5", "5#", "#5", "5#5#5", "5.123#5", "-5#5", "5.#5", ".5#5", "a#b", "5 # 5", "5,5"] {
            assert!(matches!(parse_va_string(s), Err(VaError::Malformed(_))), "{s:?}");
        }
    }

    #[test]
    fn construction_checks_range() {
        assert!(VaScore::new(1.0, 9.0).is_ok());
        assert!(VaScore::new(0.999, 5.0).is_err());
        assert!(VaScore::new(5.0, f64::NAN).is_err());
    }

    #[test]
    fn renders_half_up_two_decimals() {
        let va = VaScore::new(7.0, 7.0).unwrap();
        assert_eq!(format!("{va}"), "7.00#7.00");
        let va = VaScore::new(43.0 / 6.0, 19.0 / 3.0).unwrap();
        assert_eq!(format!("{va}"), "7.17#6.33");
        let va = VaScore::new(2.125, 6.5).unwrap();
        assert_eq!(format!("{va}"), "2.13#6.50");
    }
}
