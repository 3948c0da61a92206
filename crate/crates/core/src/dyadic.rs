//! Exact non-negative dyadic rationals and their extension by `∞`.
//!
//! Every distance the engine produces is a finite sum of terms `2^-n`, integer
//! tunnel lengths, or `∞`, so the value set is closed under everything we need:
//! addition, comparison, halving, and multiplication by integers. Nothing here
//! touches floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// `num / 2^exp`, kept normalized (`num` odd or `exp == 0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: u128,
    exp: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseDyadicError {
    #[error("empty value")]
    Empty,
    #[error("malformed numerator in {0:?}")]
    Numerator(String),
    #[error("denominator of {0:?} is not a power of two")]
    NotDyadic(String),
    #[error("negative value {0:?}")]
    Negative(String),
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u128, exp: u32) -> Self {
        Dyadic { num, exp }.normalized()
    }

    pub fn from_int(v: u64) -> Self {
        Dyadic { num: v as u128, exp: 0 }
    }

    /// `2^-n`.
    pub fn pow2_neg(n: u32) -> Self {
        Dyadic { num: 1, exp: n }
    }

    pub fn numerator(self) -> u128 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    /// `⌊self⌋`, saturating at `u64::MAX`.
    pub fn floor_int(self) -> u64 {
        let q = if self.exp >= 128 { 0 } else { self.num >> self.exp };
        u64::try_from(q).unwrap_or(u64::MAX)
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            return Dyadic::ZERO;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    /// Numerators of `self` and `other` over the common denominator `2^max(exp)`.
    fn aligned(self, other: Dyadic) -> (u128, u128, u32) {
        let exp = self.exp.max(other.exp);
        let lift = |d: Dyadic| {
            let shift = exp - d.exp;
            if d.num == 0 {
                0
            } else {
                assert!(
                    shift < d.num.leading_zeros(),
                    "dyadic overflow aligning {d} to 2^-{exp}"
                );
                d.num << shift
            }
        };
        (lift(self), lift(other), exp)
    }

    pub fn checked_sub(self, other: Dyadic) -> Option<Dyadic> {
        let (a, b, exp) = self.aligned(other);
        a.checked_sub(b).map(|num| Dyadic::new(num, exp))
    }

    pub fn mul_int(self, k: u64) -> Dyadic {
        let num = self
            .num
            .checked_mul(k as u128)
            .unwrap_or_else(|| panic!("dyadic overflow multiplying {self} by {k}"));
        Dyadic::new(num, self.exp)
    }

    /// `self · 2^-n`.
    pub fn shr(self, n: u32) -> Dyadic {
        Dyadic::new(self.num, self.exp + n)
    }

    pub fn half(self) -> Dyadic {
        self.shr(1)
    }

    /// Compare `k · self` against `other` without leaving the integers.
    pub fn cmp_scaled(self, k: u64, other: Dyadic) -> Ordering {
        self.mul_int(k).cmp(&other)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(rhs);
        let num = a
            .checked_add(b)
            .unwrap_or_else(|| panic!("dyadic overflow adding {self} and {rhs}"));
        Dyadic::new(num, exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    /// Accepts `p`, `p/2^k`, and `p/q` with `q` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseDyadicError::Empty);
        }
        if s.starts_with('-') {
            return Err(ParseDyadicError::Negative(s.to_string()));
        }
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: u128 = num_str
            .parse()
            .map_err(|_| ParseDyadicError::Numerator(s.to_string()))?;
        let exp = match den_str {
            None => 0,
            Some(d) => {
                if let Some(k) = d.strip_prefix("2^") {
                    k.parse::<u32>()
                        .map_err(|_| ParseDyadicError::NotDyadic(s.to_string()))?
                } else {
                    let q: u128 = d
                        .parse()
                        .map_err(|_| ParseDyadicError::NotDyadic(s.to_string()))?;
                    if q == 0 || !q.is_power_of_two() {
                        return Err(ParseDyadicError::NotDyadic(s.to_string()));
                    }
                    q.trailing_zeros()
                }
            }
        };
        Ok(Dyadic::new(num, exp))
    }
}

/// A distance value in `[0, ∞]` with exact dyadic finite part.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dist {
    Fin(Dyadic),
    Inf,
}

impl Dist {
    pub const ZERO: Dist = Dist::Fin(Dyadic::ZERO);
    pub const ONE: Dist = Dist::Fin(Dyadic::ONE);

    pub fn fin(d: Dyadic) -> Self {
        Dist::Fin(d)
    }

    pub fn int(v: u64) -> Self {
        Dist::Fin(Dyadic::from_int(v))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Fin(_))
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Dist::Fin(d) if d.is_zero())
    }

    pub fn finite(self) -> Option<Dyadic> {
        match self {
            Dist::Fin(d) => Some(d),
            Dist::Inf => None,
        }
    }

    /// `min(self, 1)`.
    pub fn capped_at_one(self) -> Dist {
        self.min(Dist::ONE)
    }

    pub fn shr(self, n: u32) -> Dist {
        match self {
            Dist::Fin(d) => Dist::Fin(d.shr(n)),
            Dist::Inf => Dist::Inf,
        }
    }

    pub fn mul_int(self, k: u64) -> Dist {
        match self {
            Dist::Fin(d) => Dist::Fin(d.mul_int(k)),
            Dist::Inf if k == 0 => Dist::ZERO,
            Dist::Inf => Dist::Inf,
        }
    }
}

impl Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        match (self, rhs) {
            (Dist::Fin(a), Dist::Fin(b)) => Dist::Fin(a + b),
            _ => Dist::Inf,
        }
    }
}

impl From<Dyadic> for Dist {
    fn from(d: Dyadic) -> Self {
        Dist::Fin(d)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Fin(d) => write!(f, "{d}"),
            Dist::Inf => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dist {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" => Ok(Dist::Inf),
            other => other.parse().map(Dist::Fin),
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
