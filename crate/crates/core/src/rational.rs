//! Exact rationals, extended rationals (with `+∞`), float bridges and
//! simplest-rational snapping.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn uint(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` as an exact integer.
pub fn pow(base: usize, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to logarithms when numerator or denominator overflow f64.
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        sign * (ln_abs(r)).exp()
    })
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_abs(r: &Rational) -> f64 {
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// Natural logarithm of a positive rational, accurate even when numerator or
/// denominator do not fit in an `f64`.
pub fn ln(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    ln_abs(r)
}

/// `-p ln p` with the convention `0 ln 0 = 0`.
pub fn neg_p_ln_p(p: &Rational) -> f64 {
    if p.is_zero() {
        0.0
    } else {
        -to_f64(p) * ln(p)
    }
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (Stern–Brocot descent). Both bounds must be non-negative.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(!lo.is_negative() && lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= hi {
        return next;
    }
    // lo and hi both lie strictly inside (fl, fl + 1)
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Snap `estimate` to the simplest rational within `tolerance`, rejecting the
/// result if its denominator exceeds `max_den`.
pub fn snap(estimate: f64, tolerance: f64, max_den: &BigInt) -> Option<Rational> {
    if !estimate.is_finite() || !tolerance.is_finite() || tolerance < 0.0 {
        return None;
    }
    let lo = from_f64((estimate - tolerance).max(0.0))?;
    let hi = from_f64(estimate + tolerance)?;
    if hi.is_negative() {
        return None;
    }
    let best = simplest_between(&lo, &hi);
    (best.denom() <= max_den).then_some(best)
}

/// A rational number or `+∞`, used for average line lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRational {
    Finite(Rational),
    Infinite,
}

impl ExtRational {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Finite(r) => to_f64(r),
            ExtRational::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{r}"),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

/// JSON form of a rational: decimal-string numerator and denominator plus an
/// `f64` approximation.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
    approx: f64,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            approx: to_f64(r),
        }
    }
}

impl RationalRepr {
    fn into_rational(self) -> Result<Rational, String> {
        let num: BigInt = self.num.parse().map_err(|e| format!("bad numerator: {e}"))?;
        let den: BigInt = self.den.parse().map_err(|e| format!("bad denominator: {e}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(num, den))
    }
}

pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RationalRepr::deserialize(d)?
            .into_rational()
            .map_err(serde::de::Error::custom)
    }
}

pub mod serde_opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(RationalRepr::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<RationalRepr>::deserialize(d)?
            .map(|r| r.into_rational().map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub mod serde_rational_map {
    use std::collections::BTreeMap;

    use super::*;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<usize, Rational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), RationalRepr::from(v)))
            .collect::<BTreeMap<_, _>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<usize, Rational>, D::Error> {
        BTreeMap::<String, RationalRepr>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                let k = k.parse::<usize>().map_err(serde::de::Error::custom)?;
                let v = v.into_rational().map_err(serde::de::Error::custom)?;
                Ok((k, v))
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtRepr {
    Finite(RationalRepr),
    Infinite { infinite: bool },
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtRational::Finite(r) => ExtRepr::Finite(r.into()),
            ExtRational::Infinite => ExtRepr::Infinite { infinite: true },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ExtRepr::deserialize(d)? {
            ExtRepr::Finite(r) => r
                .into_rational()
                .map(ExtRational::Finite)
                .map_err(serde::de::Error::custom),
            ExtRepr::Infinite { infinite: true } => Ok(ExtRational::Infinite),
            ExtRepr::Infinite { infinite: false } => {
                Err(serde::de::Error::custom("`infinite: false` is not a value"))
            }
        }
    }
}

/// Integer part helper: `true` iff `r` is an integer.
pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Exact integer division, `None` when `num` is not a multiple of `den`.
pub fn exact_div(num: usize, den: usize) -> Option<usize> {
    let (q, r) = num.div_rem(&den);
    (r == 0).then_some(q)
}
