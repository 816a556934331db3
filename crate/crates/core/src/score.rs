//! Score values and the two arithmetic back ends.
//!
//! Scores are exact rationals unless float mode was requested. Internally the
//! algorithms work on numerators over a shared denominator, so the exact path
//! is plain big-integer arithmetic and the float path is plain `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance used by float mode when comparing candidate values.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Profiles with at most this many candidates are scored exactly by default.
pub const EXACT_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

impl Arithmetic {
    pub fn auto(m: usize) -> Self {
        if m <= EXACT_LIMIT {
            Arithmetic::Exact
        } else {
            Arithmetic::Float
        }
    }
}

#[derive(Clone, Debug)]
pub enum Score {
    Exact(BigRational),
    Approx(f64),
}

impl Score {
    pub fn from_int(v: i64) -> Self {
        Score::Exact(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Score::Exact(BigRational::new(num.into(), den.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Score::Exact(_))
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Score::Exact(r) => Some(r),
            Score::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Score::Exact(r) => ratio_to_f64(r),
            Score::Approx(x) => *x,
        }
    }

    /// Exact comparison when both sides are exact, tolerant float comparison otherwise.
    pub fn cmp_tol(&self, other: &Score) -> Ordering {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => a.cmp(b),
            _ => f64_cmp(self.to_f64(), other.to_f64()),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Score {
        match self {
            Score::Exact(r) => Score::Exact(r * factor),
            Score::Approx(x) => Score::Approx(x * ratio_to_f64(factor)),
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(x) => x,
        None => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
    }
}

pub(crate) fn f64_cmp(a: f64, b: f64) -> Ordering {
    let scale = 1f64.max(a.abs()).max(b.abs());
    if (a - b).abs() <= FLOAT_TOLERANCE * scale {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! score_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for &Score {
            type Output = Score;
            fn $f(self, rhs: &Score) -> Score {
                match (self, rhs) {
                    (Score::Exact(a), Score::Exact(b)) => Score::Exact(a.$f(b)),
                    _ => Score::Approx(self.to_f64().$f(rhs.to_f64())),
                }
            }
        }
        impl $tr for Score {
            type Output = Score;
            fn $f(self, rhs: Score) -> Score {
                (&self).$f(&rhs)
            }
        }
    };
}
score_binop!(Add, add);
score_binop!(Sub, sub);
score_binop!(Mul, mul);

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Score::Approx(x) => write!(f, "{x}"),
        }
    }
}

pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
    };
    Ok(r)
}

impl FromStr for Score {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match parse_ratio(s) {
            Ok(r) => Ok(Score::Exact(r)),
            Err(e) => s.trim().parse::<f64>().map(Score::Approx).map_err(|_| e),
        }
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Score::Exact(_) => ser.serialize_str(&self.to_string()),
            Score::Approx(x) => ser.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Num(f64),
        }
        match Raw::deserialize(de)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Num(x) => Ok(Score::Approx(x)),
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

/// Numerator arithmetic shared by the exact (`BigInt`) and float (`f64`) paths.
pub(crate) trait Numeric:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn from_u64(v: u64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    /// Division that is exact on the integer path.
    fn div_exact(&self, d: &Self) -> Self;
    /// Denominator of hypergeometric weights: C(pool, draws), or 1 for floats.
    fn hypergeom_scale(pool: u64, draws: u64) -> Self;
    fn to_score(num: &Self, den: &Self) -> Score;
    fn cmp_frac(n1: &Self, d1: &Self, n2: &Self, d2: &Self) -> Ordering;
    fn is_positive(&self) -> bool;
}

impl Numeric for BigInt {
    fn from_u64(v: u64) -> Self {
        BigInt::from(v)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.clone()
    }
    fn div_exact(&self, d: &Self) -> Self {
        debug_assert!((self % d).is_zero());
        self / d
    }
    fn hypergeom_scale(pool: u64, draws: u64) -> Self {
        binomial(pool, draws)
    }
    fn to_score(num: &Self, den: &Self) -> Score {
        Score::Exact(BigRational::new(num.clone(), den.clone()))
    }
    fn cmp_frac(n1: &Self, d1: &Self, n2: &Self, d2: &Self) -> Ordering {
        if d1 == d2 {
            n1.cmp(n2)
        } else {
            (n1 * d2).cmp(&(n2 * d1))
        }
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
}

impl Numeric for f64 {
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn hypergeom_scale(_pool: u64, _draws: u64) -> Self {
        1.0
    }
    fn to_score(num: &Self, den: &Self) -> Score {
        Score::Approx(num / den)
    }
    fn cmp_frac(n1: &Self, d1: &Self, n2: &Self, d2: &Self) -> Ordering {
        f64_cmp(n1 / d1, n2 / d2)
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
}

/// Exact fast path for small instances; callers check the magnitude bound.
impl Numeric for i128 {
    fn from_u64(v: u64) -> Self {
        v as i128
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_i128().expect("value exceeds the i128 fast path")
    }
    fn div_exact(&self, d: &Self) -> Self {
        debug_assert!(self % d == 0);
        self / d
    }
    fn hypergeom_scale(pool: u64, draws: u64) -> Self {
        binomial_u128(pool, draws).and_then(|v| i128::try_from(v).ok()).expect("binomial exceeds i128")
    }
    fn to_score(num: &Self, den: &Self) -> Score {
        Score::Exact(BigRational::new(BigInt::from(*num), BigInt::from(*den)))
    }
    fn cmp_frac(n1: &Self, d1: &Self, n2: &Self, d2: &Self) -> Ordering {
        if d1 == d2 {
            n1.cmp(n2)
        } else {
            (BigInt::from(*n1) * BigInt::from(*d2)).cmp(&(BigInt::from(*n2) * BigInt::from(*d1)))
        }
    }
    fn is_positive(&self) -> bool {
        *self > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_agree() {
        for n in 0..40u64 {
            for k in 0..=n + 1 {
                let b = binomial(n, k);
                assert_eq!(Some(b.to_u128().unwrap()), binomial_u128(n, k));
            }
        }
        assert_eq!(binomial(10, 3), BigInt::from(120));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let s = Score::ratio(6, 4);
        assert_eq!(s.to_string(), "3/2");
        assert_eq!("3/2".parse::<Score>().unwrap(), s);
        assert_eq!("7".parse::<Score>().unwrap(), Score::from_int(7));
        assert_eq!(serde_json::to_string(&s).unwrap(), "\"3/2\"");
        let back: Score = serde_json::from_str("\"3/2\"").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn float_tolerance() {
        assert_eq!(f64_cmp(1.0, 1.0 + 1e-12), Ordering::Equal);
        assert_eq!(f64_cmp(1.0, 1.0 + 1e-6), Ordering::Less);
        assert_eq!(
            f64::cmp_frac(&1.0, &3.0, &2.0, &6.0),
            Ordering::Equal
        );
    }

    #[test]
    fn float_view_is_close() {
        let r = Score::ratio(1_000_003, 7);
        let x = r.to_f64();
        assert!((x - 1_000_003.0 / 7.0).abs() / x < 1e-12);
    }
}
