//! Scalars: arbitrary-precision rationals and the imaginary quadratic field
//! K = ℚ(ω), ω² = −d.
//!
//! All complex periods appearing in this crate are modelled as elements of a
//! single field K fixed by a [`FieldContext`]. Conjugation is then exact and
//! every kernel computation stays in rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational scalar, always kept in canonical form (reduced, positive
/// denominator) by `num_rational`.
pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parse a rational literal `p/q` or `p`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::BadLiteral(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = n.trim().parse().map_err(|_| bad())?;
    let denom: BigInt = d.trim().parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

/// The imaginary quadratic field ℚ(ω) with ω² = −d, d squarefree and
/// positive. Every object taking part in one computation must share one
/// context; binary operations return [`Error::ContextMismatch`] otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldContext {
    d: u64,
}

impl FieldContext {
    pub fn new(d: u64) -> Result<Self> {
        if d == 0 || !is_squarefree(d) {
            return Err(Error::BadFieldParameter(d));
        }
        Ok(FieldContext { d })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn require(&self, other: &FieldContext) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.d, other.d))
        }
    }

    /// (a + bω)(c + eω) = (ac − d·be) + (ae + bc)ω.
    pub fn mul(&self, a: &KScalar, b: &KScalar) -> KScalar {
        let d = Rat::from(BigInt::from(self.d));
        KScalar {
            re: &a.re * &b.re - &d * &a.im * &b.im,
            im: &a.re * &b.im + &a.im * &b.re,
        }
    }

    /// Field norm a·conj(a) = re² + d·im², zero only at zero.
    pub fn norm(&self, a: &KScalar) -> Rat {
        let d = Rat::from(BigInt::from(self.d));
        &a.re * &a.re + d * &a.im * &a.im
    }

    pub fn inv(&self, a: &KScalar) -> Option<KScalar> {
        if a.is_zero() {
            return None;
        }
        let n = self.norm(a);
        Some(KScalar {
            re: &a.re / &n,
            im: -&a.im / n,
        })
    }

    pub fn div(&self, a: &KScalar, b: &KScalar) -> Option<KScalar> {
        self.inv(b).map(|binv| self.mul(a, &binv))
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut d = d;
    let mut p = 2u64;
    while p.checked_mul(p).is_some_and(|pp| pp <= d) {
        if d.is_multiple_of(p) {
            d /= p;
            if d.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Element re + im·ω of the field K fixed by a [`FieldContext`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KScalar {
    pub re: Rat,
    pub im: Rat,
}

impl KScalar {
    pub fn new(re: Rat, im: Rat) -> Self {
        KScalar { re, im }
    }

    pub fn zero() -> Self {
        KScalar { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        KScalar { re: Rat::one(), im: Rat::zero() }
    }

    pub fn omega() -> Self {
        KScalar { re: Rat::zero(), im: Rat::one() }
    }

    pub fn from_rat(re: Rat) -> Self {
        KScalar { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat(n, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// True iff the ω-coefficient vanishes.
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> KScalar {
        KScalar { re: self.re.clone(), im: -&self.im }
    }

    /// Parse a K-scalar literal: `a`, `a+b*w`, `a-b*w` or `b*w` with `a`, `b`
    /// rational literals. A bare `w` is accepted for `1*w`.
    pub fn parse(s: &str) -> Result<KScalar> {
        let s = s.trim();
        let bad = || Error::BadLiteral(s.to_string());
        if !s.contains('w') {
            return Ok(KScalar::from_rat(parse_rat(s)?));
        }
        // Split off the trailing ω-term. Rational literals carry a sign only
        // in front, so the separator is the unique interior '+' or '-'.
        let sep = s
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i);
        let (re_part, om_part) = match sep {
            Some(i) => (&s[..i], &s[i..]),
            None => ("0", s),
        };
        let (sign, body) = match om_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, om_part.strip_prefix('+').unwrap_or(om_part)),
        };
        let body = body.trim();
        let coeff = match body.strip_suffix('w').map(str::trim_end) {
            Some("") => Rat::one(),
            Some(head) => parse_rat(head.strip_suffix('*').ok_or_else(bad)?)?,
            None => return Err(bad()),
        };
        let re = parse_rat(re_part.trim())?;
        let im = if sign < 0 { -coeff } else { coeff };
        Ok(KScalar { re, im })
    }
}

impl fmt::Display for KScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*w", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*w", self.re, -&self.im)
        } else {
            write!(f, "{}+{}*w", self.re, self.im)
        }
    }
}

impl std::ops::Add for &KScalar {
    type Output = KScalar;
    fn add(self, rhs: &KScalar) -> KScalar {
        KScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl std::ops::Sub for &KScalar {
    type Output = KScalar;
    fn sub(self, rhs: &KScalar) -> KScalar {
        KScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl std::ops::Neg for &KScalar {
    type Output = KScalar;
    fn neg(self) -> KScalar {
        KScalar { re: -&self.re, im: -&self.im }
    }
}

/// What row reduction needs from a scalar type: exact field operations,
/// possibly relative to a context (K-scalars need the field's `d`).
pub trait FieldScalar: Clone + PartialEq + Eq + fmt::Debug {
    type Ctx: Clone;
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(ctx: &Self::Ctx, a: &Self, b: &Self) -> Self;
    fn f_sub(ctx: &Self::Ctx, a: &Self, b: &Self) -> Self;
    fn f_mul(ctx: &Self::Ctx, a: &Self, b: &Self) -> Self;
    fn f_neg(a: &Self) -> Self;
    /// Multiplicative inverse; `None` exactly at zero.
    fn f_inv(ctx: &Self::Ctx, a: &Self) -> Option<Self>;
}

impl FieldScalar for Rat {
    type Ctx = ();
    fn f_zero() -> Self {
        Rat::zero()
    }
    fn f_one() -> Self {
        Rat::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(_: &(), a: &Self, b: &Self) -> Self {
        a + b
    }
    fn f_sub(_: &(), a: &Self, b: &Self) -> Self {
        a - b
    }
    fn f_mul(_: &(), a: &Self, b: &Self) -> Self {
        a * b
    }
    fn f_neg(a: &Self) -> Self {
        -a
    }
    fn f_inv(_: &(), a: &Self) -> Option<Self> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
}

impl FieldScalar for KScalar {
    type Ctx = FieldContext;
    fn f_zero() -> Self {
        KScalar::zero()
    }
    fn f_one() -> Self {
        KScalar::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(_: &FieldContext, a: &Self, b: &Self) -> Self {
        a + b
    }
    fn f_sub(_: &FieldContext, a: &Self, b: &Self) -> Self {
        a - b
    }
    fn f_mul(ctx: &FieldContext, a: &Self, b: &Self) -> Self {
        ctx.mul(a, b)
    }
    fn f_neg(a: &Self) -> Self {
        -a
    }
    fn f_inv(ctx: &FieldContext, a: &Self) -> Option<Self> {
        ctx.inv(a)
    }
}
