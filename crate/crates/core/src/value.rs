//! Extended reals on `(-inf, +inf]`.
//!
//! `+inf` is a dedicated tag rather than the IEEE infinity so that the one
//! illegal operation, `+inf - +inf`, can be caught instead of quietly
//! turning into NaN.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Panics on NaN or IEEE infinities; use [`ExtReal::from_f64`] for untrusted input.
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "ExtReal::finite called with {v}");
        ExtReal::Finite(v)
    }

    /// Maps IEEE `+inf` onto the tag; rejects NaN and `-inf`.
    pub fn from_f64(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(ExtReal::Finite(v))
        } else if v == f64::INFINITY {
            Ok(ExtReal::PosInf)
        } else {
            Err(Error::NonFinite(v))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_inf(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn value(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Host-float view; `+inf` becomes `f64::INFINITY`. For internal kernels only.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// `None` exactly when both operands are `+inf`.
    pub fn checked_sub(self, rhs: ExtReal) -> Option<ExtReal> {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => Some(ExtReal::Finite(a - b)),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(ExtReal::PosInf),
            // finite - (+inf) would be -inf, which is not representable either.
            (ExtReal::Finite(_), ExtReal::PosInf) => None,
            (ExtReal::PosInf, ExtReal::PosInf) => None,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::finite(v)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::finite(rhs)
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    /// Panics on `+inf - +inf` and on `finite - +inf`; both are program errors.
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("illegal extended-real subtraction {self} - {rhs}"))
    }
}

impl Sub<f64> for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: f64) -> ExtReal {
        self - ExtReal::finite(rhs)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "+inf" | "Inf" | "+Inf" | "infinity" => Ok(ExtReal::PosInf),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::parse(t, "expected a real number or `inf`"))?;
                ExtReal::from_f64(v).map_err(|_| Error::parse(t, "value must lie in (-inf, +inf]"))
            }
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => ExtReal::from_f64(v).map_err(serde::de::Error::custom),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_rules() {
        let a = ExtReal::finite(2.0);
        let b = ExtReal::finite(0.5);
        assert_eq!(a + b, ExtReal::finite(2.5));
        assert_eq!(a + ExtReal::PosInf, ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf - b, ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.checked_sub(ExtReal::PosInf), None);
        assert_eq!(a.checked_sub(ExtReal::PosInf), None);
    }

    #[test]
    #[should_panic(expected = "illegal extended-real subtraction")]
    fn inf_minus_inf_panics() {
        let _ = ExtReal::PosInf - ExtReal::PosInf;
    }

    #[test]
    fn order_puts_inf_on_top() {
        assert!(ExtReal::finite(1e300) < ExtReal::PosInf);
        assert!(ExtReal::finite(-3.0) < ExtReal::finite(2.0));
        assert_eq!(ExtReal::finite(1.0).max(ExtReal::PosInf), ExtReal::PosInf);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::PosInf);
        assert_eq!("-1.5".parse::<ExtReal>().unwrap(), ExtReal::finite(-1.5));
        assert!("-inf".parse::<ExtReal>().is_err());
        assert!("nan".parse::<ExtReal>().is_err());
        assert_eq!(ExtReal::PosInf.to_string(), "inf");
        assert!(ExtReal::from_f64(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let v = vec![ExtReal::finite(0.25), ExtReal::PosInf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[0.25,\"inf\"]");
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
