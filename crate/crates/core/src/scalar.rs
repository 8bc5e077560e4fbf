//! Numeric backends.
//!
//! Everything that carries a bound, a weight or an LP value is generic over
//! [`Scalar`]. The exact backends are the ones the checks are meant to run
//! on; the float impls exist for quick exploratory sweeps.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar:
    Num + FromPrimitive + PartialOrd + Clone + Debug + Display + Send + Sync + 'static
{
    /// True when arithmetic is exact, so equality checks are meaningful.
    const EXACT: bool;

    fn ratio(num: i64, den: i64) -> Self;

    /// Smallest integer `>= self`.
    fn ceil_i64(&self) -> i64;

    fn floor_i64(&self) -> i64;

    fn to_f64_lossy(&self) -> f64;

    /// Parse `p/q`, an integer, or a decimal like `0.35`.
    fn parse_fraction(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            return Some(Self::ratio(p, q));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let neg = int.starts_with('-');
            let int_v: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
            let den = 10i64.checked_pow(frac.len() as u32)?;
            let frac_v: i64 = frac.parse().ok()?;
            let num = int_v.abs().checked_mul(den)?.checked_add(frac_v)?;
            return Some(Self::ratio(if neg { -num } else { num }, den));
        }
        let v: i64 = s.parse().ok()?;
        Some(Self::ratio(v, 1))
    }

    fn from_int(v: i64) -> Self {
        Self::ratio(v, 1)
    }

    fn from_usize(v: usize) -> Self {
        Self::ratio(v as i64, 1)
    }
}

/// `base^exp` with negative exponents giving the reciprocal.
pub fn pow<T: Scalar>(base: i64, exp: i64) -> T {
    let mut acc = T::one();
    let b = T::from_int(base);
    for _ in 0..exp.unsigned_abs() {
        acc = acc * b.clone();
    }
    if exp < 0 {
        T::one() / acc
    } else {
        acc
    }
}

pub fn min<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub fn max<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            fn ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
            fn ceil_i64(&self) -> i64 {
                <$t>::ceil(*self) as i64
            }
            fn floor_i64(&self) -> i64 {
                <$t>::floor(*self) as i64
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

macro_rules! ratio_scalar {
    ($t:ty) => {
        impl Scalar for Ratio<$t> {
            const EXACT: bool = true;
            fn ratio(num: i64, den: i64) -> Self {
                Ratio::new(num as $t, den as $t)
            }
            fn ceil_i64(&self) -> i64 {
                self.ceil().to_integer() as i64
            }
            fn floor_i64(&self) -> i64 {
                self.floor().to_integer() as i64
            }
            fn to_f64_lossy(&self) -> f64 {
                ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
            }
        }
    };
}

ratio_scalar!(i64);
ratio_scalar!(i128);

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn ratio(num: i64, den: i64) -> Self {
        Ratio::new(BigInt::from(num), BigInt::from(den))
    }
    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer().to_i64().expect("ceiling out of i64 range")
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor out of i64 range")
    }
    fn to_f64_lossy(&self) -> f64 {
        let (n, d) = (self.numer(), self.denom());
        match (n.to_f64(), d.to_f64()) {
            (Some(a), Some(b)) => a / b,
            _ => f64::NAN,
        }
    }
}

/// Render a rational as `p/q`, or `p` when integral.
pub fn fmt_ratio<T: Integer + Clone + Display>(r: &Ratio<T>) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[allow(dead_code)]
pub(crate) fn is_nonneg<T: Scalar>(v: &T) -> bool {
    *v >= T::zero()
}
