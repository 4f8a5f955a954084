//! Exact scalar arithmetic: arbitrary-precision rationals and Gaussian
//! rationals (complex numbers with rational real and imaginary parts).
//!
//! The canonical text form used in every file format is `p/q` for rationals
//! (`p` when the denominator is one) and `re+im i` / `re-im i` for complex
//! values with a nonzero imaginary part, e.g. `1/2-3/4 i`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar; always reduced, denominator always positive.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from two machine integers.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parse the canonical `p/q` text form. Accepts a bare integer as `p/1`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(numer)
        .map_err(|e| Error::Parse(format!("bad numerator {numer:?}: {e}")))?;
    let d = BigInt::from_str(denom)
        .map_err(|e| Error::Parse(format!("bad denominator {denom:?}: {e}")))?;
    if d <= BigInt::zero() {
        return Err(Error::Parse(format!(
            "denominator must be positive in {s:?}"
        )));
    }
    Ok(Rational::new(n, d))
}

/// Complex scalar with exact rational components.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// Build `re_n/re_d + im_n/im_d i`.
    pub fn from_parts(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        Self::new(ratio(re_n, re_d), ratio(im_n, im_d))
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2 = re^2 + im^2, exact and nonnegative.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn mul_rat(&self, r: &Rational) -> Self {
        if r.is_zero() || self.is_zero() {
            return Self::zero();
        }
        Self::new(&self.re * r, &self.im * r)
    }

    /// Exact division. Panics on a zero divisor, like integer division.
    pub fn div_exact(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero Gaussian rational");
        let n = rhs.norm_sq();
        (self * &rhs.conj()).mul_rat(&(Rational::one() / n))
    }
}

// Zero short-circuits keep permutation-sparse matrix products cheap.
fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        Rational::zero()
    } else {
        a * b
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.is_zero() || rhs.is_zero() {
            return GaussianRational::zero();
        }
        GaussianRational::new(
            rat_mul(&self.re, &rhs.re) - rat_mul(&self.im, &rhs.im),
            rat_mul(&self.re, &rhs.im) + rat_mul(&self.im, &rhs.re),
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.div_exact(rhs)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{} i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{} i", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parse the canonical scalar text form: `p/q`, `re+im i` or `re-im i`.
/// A bare `im i` form (no real part) is also accepted.
pub fn parse_scalar(text: &str) -> Result<GaussianRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(GaussianRational::from_rational(parse_rational(s)?));
    };
    let body = body.trim_end();
    // Split at the last top-level sign that is not the leading sign and not
    // a sign directly following '/'.
    let bytes = body.as_bytes();
    let mut split = None;
    for (idx, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && bytes[idx - 1] != b'/' {
            split = Some(idx);
        }
    }
    match split {
        Some(idx) => {
            let re = parse_rational(&body[..idx])?;
            let sign = if bytes[idx] == b'-' { -1 } else { 1 };
            let im = parse_rational(&body[idx + 1..])? * Rational::from_integer(BigInt::from(sign));
            Ok(GaussianRational::new(re, im))
        }
        None => Ok(GaussianRational::new(
            Rational::zero(),
            parse_rational(body)?,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_rendering() {
        assert_eq!(GaussianRational::from_int(3).to_string(), "3");
        assert_eq!(GaussianRational::from_parts(1, 2, 0, 1).to_string(), "1/2");
        assert_eq!(
            GaussianRational::from_parts(1, 2, -3, 4).to_string(),
            "1/2-3/4 i"
        );
        assert_eq!(
            GaussianRational::from_parts(0, 1, 1, 1).to_string(),
            "0+1 i"
        );
    }

    #[test]
    fn parse_canonical_forms() {
        for text in ["3", "-5/7", "1/2+3/4 i", "1/2-3/4 i", "0+1 i", "2/3 i"] {
            let v = parse_scalar(text).unwrap();
            let again = parse_scalar(&v.to_string()).unwrap();
            assert_eq!(v, again);
        }
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_rational("1/-2").is_err());
    }

    #[test]
    fn division_roundtrip() {
        let a = GaussianRational::from_parts(3, 5, -4, 5);
        let b = GaussianRational::from_parts(1, 2, 1, 3);
        assert_eq!((&a * &b).div_exact(&b), a);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..12).prop_map(|(n, d)| ratio(n, d))
    }

    fn arb_scalar() -> impl Strategy<Value = GaussianRational> {
        (arb_rational(), arb_rational()).prop_map(|(re, im)| GaussianRational::new(re, im))
    }

    proptest! {
        #[test]
        fn add_sub_cancels(a in arb_scalar(), b in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) - &b, a);
        }

        #[test]
        fn mul_div_cancels(a in arb_scalar(), b in arb_scalar()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), a);
        }

        #[test]
        fn text_roundtrip(a in arb_scalar()) {
            prop_assert_eq!(parse_scalar(&a.to_string()).unwrap(), a);
        }
    }
}
