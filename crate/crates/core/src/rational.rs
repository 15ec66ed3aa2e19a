//! Rational scalar helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(pub String);

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn sign(x: &Q) -> i8 {
    match x.cmp(&Q::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| if x.is_negative() { f64::MIN } else { f64::MAX })
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// `p`, `-p`, `p/q`; whitespace around the parts is ignored.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Smallest integer n with n*n >= x, for x >= 0.
pub fn ceil_sqrt(x: &Q) -> BigInt {
    let c = x.ceil().to_integer();
    if c <= BigInt::zero() {
        return BigInt::zero();
    }
    let mut r = c.sqrt();
    if Q::from_integer(&r * &r) < *x {
        r += 1;
    }
    r
}

/// Rational upper bound of sqrt(x) within a relative 2^-bits.
pub fn sqrt_upper(x: &Q, bits: u32) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = x * Q::from_integer(scale);
    Q::new(ceil_sqrt(&scaled), BigInt::one() << bits as usize)
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Display wrapper printing `p/q` or `p`.
pub struct Rat<'a>(pub &'a Q);

impl fmt::Display for Rat<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3").unwrap(), q(3));
        assert_eq!(parse_q("-6/4").unwrap(), qf(-3, 2));
        assert_eq!(parse_q(" 1 / 3 ").unwrap(), qf(1, 3));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert!(parse_q("0.5").is_err());
    }

    #[test]
    fn fmt_roundtrip() {
        for s in ["0", "-7", "22/7", "-1/12"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
    }

    #[test]
    fn sqrt_bounds() {
        assert_eq!(ceil_sqrt(&q(16)), BigInt::from(4));
        assert_eq!(ceil_sqrt(&q(17)), BigInt::from(5));
        assert_eq!(ceil_sqrt(&qf(1, 4)), BigInt::from(1));
        let u = sqrt_upper(&q(2), 20);
        assert!(&u * &u >= q(2));
        assert!(&u * &u < qf(200001, 100000));
    }
}
