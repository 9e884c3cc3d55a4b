//! Exact rationals, rational vectors, and the fixed enumerations of both.
//!
//! Every "real" quantity in this crate is a [`Rat`]. The enumerations are
//! frozen: certificates, path indices and fuel bounds all refer to positions
//! in them, so changing the scheme invalidates stored artifacts.
//!
//! * Rationals use the Calkin–Wilf order, interleaved by sign:
//!   `0, 1, -1, 1/2, -1/2, 2, -2, 1/3, ...`
//! * Vectors use Cantor pairing: index 0 is the empty vector, index `n + 1`
//!   unpairs `n` into `(dim - 1, k)` and `k` is split into `dim` naturals by
//!   iterated unpairing, each mapped through the rational enumeration.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational {0:?}")]
    Parse(String),
}

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat, ArithError> {
        let den = den.into();
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rat(BigRational::new(num.into(), den)))
    }

    /// Panicking convenience constructor for literals.
    pub fn frac(num: i64, den: i64) -> Rat {
        Rat::new(num, den).expect("nonzero denominator")
    }

    pub fn int(n: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_natural(&self) -> bool {
        self.0.is_integer() && !self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The value as a `usize` when it is a natural number that fits.
    pub fn to_usize(&self) -> Option<usize> {
        if self.is_natural() {
            self.0.numer().to_usize()
        } else {
            None
        }
    }

    /// The value as a `BigUint` when it is a natural number.
    pub fn to_natural(&self) -> Option<BigUint> {
        if self.is_natural() {
            self.0.numer().to_biguint()
        } else {
            None
        }
    }

    pub fn recip(&self) -> Result<Rat, ArithError> {
        if self.is_zero() {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(Rat(self.0.recip()))
        }
    }

    pub fn checked_div(&self, other: &Rat) -> Result<Rat, ArithError> {
        if other.is_zero() {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(Rat(&self.0 / &other.0))
        }
    }

    pub fn pow(&self, exp: i32) -> Result<Rat, ArithError> {
        if exp < 0 && self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rat(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// Exact field operation; the only failure is a zero divisor.
pub fn rat_op(kind: RatOp, a: &Rat, b: &Rat) -> Result<Rat, ArithError> {
    match kind {
        RatOp::Add => Ok(a + b),
        RatOp::Sub => Ok(a - b),
        RatOp::Mul => Ok(a * b),
        RatOp::Div => a.checked_div(b),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat($tr::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl From<usize> for Rat {
    fn from(n: usize) -> Rat {
        Rat::int(n)
    }
}

impl From<BigUint> for Rat {
    fn from(n: BigUint) -> Rat {
        Rat::int(BigInt::from(n))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ArithError;

    /// Accepts `p` or `p/q`, each with an optional sign.
    fn from_str(s: &str) -> Result<Rat, ArithError> {
        let bad = || ArithError::Parse(s.to_string());
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Rat::new(num, den)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite sequence of rationals; `dim` is its length.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVec(pub Vec<Rat>);

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> RatVec {
        RatVec(entries)
    }

    pub fn empty() -> RatVec {
        RatVec(Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn from_ints(xs: &[i64]) -> RatVec {
        RatVec(xs.iter().map(|&x| Rat::int(x)).collect())
    }

    /// Parses a comma-separated list such as `2,1/3,-4`. The empty string is
    /// the empty vector.
    pub fn parse_list(s: &str) -> Result<RatVec, ArithError> {
        let s = s.trim();
        if s.is_empty() || s == "()" {
            return Ok(RatVec::empty());
        }
        let s = s.trim_start_matches('(').trim_end_matches(')');
        s.split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map(RatVec)
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<Rat>> for RatVec {
    fn from(v: Vec<Rat>) -> RatVec {
        RatVec(v)
    }
}

// ---------------------------------------------------------------------------
// Pairing

/// Cantor pairing `(a, b) -> (a+b)(a+b+1)/2 + b`; `None` on overflow.
pub fn pair(a: u64, b: u64) -> Option<u64> {
    let s = (a as u128) + (b as u128);
    let v = s * (s + 1) / 2 + b as u128;
    u64::try_from(v).ok()
}

pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    // largest w with w(w+1)/2 <= z
    let mut w = ((8 * z + 1).sqrt() - 1) / 2;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let b = z - w * (w + 1) / 2;
    let a = w - b;
    (a as u64, b as u64)
}

pub fn pair_big(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

pub fn unpair_big(z: &BigUint) -> (BigUint, BigUint) {
    let eight_z_plus_one: BigUint = z * 8u32 + 1u32;
    let mut w: BigUint = (eight_z_plus_one.sqrt() - 1u32) / 2u32;
    let tri = |w: &BigUint| (w * (w + 1u32)) / 2u32;
    while &tri(&w) > z {
        w -= 1u32;
    }
    while &tri(&(&w + 1u32)) <= z {
        w += 1u32;
    }
    let b = z - tri(&w);
    let a = &w - &b;
    (a, b)
}

/// Splits `k` into `dim` naturals by iterated unpairing (bijective for
/// fixed `dim >= 1`).
pub fn split_tuple(mut k: u64, dim: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(dim);
    if dim == 0 {
        return out;
    }
    for _ in 0..dim - 1 {
        let (a, rest) = unpair(k);
        out.push(a);
        k = rest;
    }
    out.push(k);
    out
}

pub fn join_tuple(parts: &[u64]) -> Option<u64> {
    let (last, init) = parts.split_last()?;
    let mut acc = *last;
    for &p in init.iter().rev() {
        acc = pair(p, acc)?;
    }
    Some(acc)
}

// ---------------------------------------------------------------------------
// Rational enumeration (signed Calkin–Wilf)

/// The `k`-th positive rational in Calkin–Wilf order, `k >= 1`.
fn calkin_wilf(k: u64) -> Rat {
    debug_assert!(k >= 1);
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    let bits = 64 - k.leading_zeros();
    for pos in (0..bits - 1).rev() {
        if (k >> pos) & 1 == 0 {
            b = &a + &b;
        } else {
            a = &a + &b;
        }
    }
    Rat(BigRational::new(a, b))
}

/// Inverse of [`calkin_wilf`]: walks to the root collapsing runs by
/// Euclidean division.
fn calkin_wilf_index(q: &Rat) -> Option<u64> {
    debug_assert!(q.is_positive());
    let mut a = q.numer().clone();
    let mut b = q.denom().clone();
    // bits collected from the leaf upwards
    let mut bits: Vec<(bool, u64)> = Vec::new();
    while !(a.is_one() && b.is_one()) {
        if a > b {
            // right child: parent (a-b)/b; repeat while a > b
            let (quot, rem) = a.div_rem(&b);
            let run = if rem.is_zero() { quot - 1 } else { quot };
            let run_u = run.to_u64()?;
            a -= &b * &run;
            bits.push((true, run_u));
        } else {
            let (quot, rem) = b.div_rem(&a);
            let run = if rem.is_zero() { quot - 1 } else { quot };
            let run_u = run.to_u64()?;
            b -= &a * &run;
            bits.push((false, run_u));
        }
    }
    let total: u64 = bits.iter().map(|(_, r)| *r).sum();
    if total >= 63 {
        return None;
    }
    let mut k: u64 = 1;
    for (bit, run) in bits.iter().rev() {
        for _ in 0..*run {
            k = (k << 1) | (*bit as u64);
        }
    }
    Some(k)
}

/// Bijection from the naturals onto the rationals.
pub fn enumerate_rationals(index: u64) -> Rat {
    if index == 0 {
        return Rat::zero();
    }
    let k = index.div_ceil(2);
    let q = calkin_wilf(k);
    if index % 2 == 1 {
        q
    } else {
        -q
    }
}

/// Inverse of [`enumerate_rationals`]; `None` when the index exceeds `u64`.
pub fn rational_index(q: &Rat) -> Option<u64> {
    if q.is_zero() {
        return Some(0);
    }
    let k = calkin_wilf_index(&q.abs())?;
    let base = k.checked_mul(2)?;
    Some(if q.is_positive() { base - 1 } else { base })
}

/// Bijection from the naturals onto finite rational vectors of every
/// dimension.
pub fn enumerate_vectors(index: u64) -> RatVec {
    if index == 0 {
        return RatVec::empty();
    }
    let (dim_minus_one, k) = unpair(index - 1);
    let dim = dim_minus_one as usize + 1;
    RatVec(
        split_tuple(k, dim)
            .into_iter()
            .map(enumerate_rationals)
            .collect(),
    )
}

pub fn vector_index(v: &RatVec) -> Option<u64> {
    if v.dim() == 0 {
        return Some(0);
    }
    let parts: Vec<u64> = v.0.iter().map(rational_index).collect::<Option<_>>()?;
    let k = join_tuple(&parts)?;
    pair(v.dim() as u64 - 1, k)?.checked_add(1)
}

/// Bijection from the naturals onto `Q^dim` for a fixed `dim`.
pub fn enumerate_fixed_dim(index: u64, dim: usize) -> RatVec {
    RatVec(
        split_tuple(index, dim)
            .into_iter()
            .map(enumerate_rationals)
            .collect(),
    )
}
