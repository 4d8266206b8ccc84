//! Exact coefficients over ℚ, ℤ and F_p.
//!
//! The ring is a runtime value ([`RingSpec`]) so a single binary can run
//! every campaign. Rationals and integers are arbitrary precision; residues
//! are kept in `[0, p)` and reduced after every multiplication.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest admissible prime modulus is below this bound.
pub const MODULUS_BOUND: u64 = 1 << 31;

/// A prime below 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MODULUS_BOUND {
            return Err(Error::ModulusTooLarge(p.to_string()));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Prime(p as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn wide(self) -> u64 {
        self.0 as u64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Trial division; moduli are below 2^31 so this needs at most ~23k steps.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingSpec {
    Rational,
    Integer,
    PrimeField(Prime),
}

impl RingSpec {
    pub fn prime_field(p: u64) -> Result<Self> {
        Prime::new(p).map(RingSpec::PrimeField)
    }

    /// Whether every nonzero element is invertible.
    pub fn is_field(self) -> bool {
        !matches!(self, RingSpec::Integer)
    }

    pub fn characteristic(self) -> u32 {
        match self {
            RingSpec::PrimeField(p) => p.get(),
            _ => 0,
        }
    }

    pub fn zero(self) -> Scalar {
        Scalar::from_int(self, 0)
    }

    pub fn one(self) -> Scalar {
        Scalar::from_int(self, 1)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Rational => f.write_str("qq"),
            RingSpec::Integer => f.write_str("zz"),
            RingSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        ring_parse(text)
    }
}

/// Parses `qq`, `zz` or `fp:<m>`.
pub fn ring_parse(text: &str) -> Result<RingSpec> {
    let text = text.trim();
    match text {
        "qq" => return Ok(RingSpec::Rational),
        "zz" => return Ok(RingSpec::Integer),
        _ => {}
    }
    let Some(modulus) = text.strip_prefix("fp:") else {
        return Err(Error::UnknownRing(text.to_string()));
    };
    let digits = modulus.strip_prefix('-').unwrap_or(modulus);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::UnknownRing(text.to_string()));
    }
    if modulus.starts_with('-') {
        return Err(Error::NotPrime(modulus.to_string()));
    }
    let m: BigInt = digits.parse().expect("validated digits");
    match m.to_u64() {
        Some(m) if m < MODULUS_BOUND => RingSpec::prime_field(m),
        _ => Err(Error::ModulusTooLarge(digits.to_string())),
    }
}

/// An exact element of one of the supported rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Integer(BigInt),
    Residue { value: u32, prime: Prime },
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar ring mismatch: {} vs {}", a.ring(), b.ring())
}

impl Scalar {
    pub fn from_int(ring: RingSpec, n: i64) -> Scalar {
        Scalar::from_bigint(ring, &BigInt::from(n))
    }

    pub fn from_bigint(ring: RingSpec, n: &BigInt) -> Scalar {
        match ring {
            RingSpec::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            RingSpec::Integer => Scalar::Integer(n.clone()),
            RingSpec::PrimeField(p) => {
                let r = n.mod_floor(&BigInt::from(p.get()));
                Scalar::Residue {
                    value: r.to_u32().expect("residue below modulus"),
                    prime: p,
                }
            }
        }
    }

    /// Builds `num/den` in `ring`, failing when the quotient does not exist there.
    pub fn from_fraction(ring: RingSpec, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match ring {
            RingSpec::Rational => Ok(Scalar::Rational(BigRational::new(num.clone(), den.clone()))),
            RingSpec::Integer => {
                let (q, r) = num.div_rem(den);
                if r.is_zero() {
                    Ok(Scalar::Integer(q))
                } else {
                    Err(Error::BadCoefficient(format!("{num}/{den}")))
                }
            }
            RingSpec::PrimeField(_) => {
                let d = Scalar::from_bigint(ring, den);
                let inv = d
                    .inverse()
                    .map_err(|_| Error::BadCoefficient(format!("{num}/{den}")))?;
                Ok(Scalar::from_bigint(ring, num) * inv)
            }
        }
    }

    /// Parses an exact literal such as `-3`, `2/5` (the latter only where it exists).
    pub fn parse(text: &str, ring: RingSpec) -> Result<Scalar> {
        let bad = || Error::BadCoefficient(text.to_string());
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (t, None),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        match den {
            None => Ok(Scalar::from_bigint(ring, &num)),
            Some(d) => {
                if !d.bytes().all(|b| b.is_ascii_digit()) || d.is_empty() {
                    return Err(bad());
                }
                let den: BigInt = d.parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Scalar::from_fraction(ring, &num, &den)
            }
        }
    }

    pub fn ring(&self) -> RingSpec {
        match self {
            Scalar::Rational(_) => RingSpec::Rational,
            Scalar::Integer(_) => RingSpec::Integer,
            Scalar::Residue { prime, .. } => RingSpec::PrimeField(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Integer(n) => n.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Integer(n) => n.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    /// True when the printed form carries a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_negative(),
            Scalar::Integer(n) => n.is_negative(),
            Scalar::Residue { .. } => false,
        }
    }

    /// Multiplicative inverse.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Rational(q) => Ok(Scalar::Rational(q.recip())),
            Scalar::Integer(n) => {
                if n.abs().is_one() {
                    Ok(self.clone())
                } else {
                    Err(Error::NotInvertible(n.to_string(), "zz".into()))
                }
            }
            Scalar::Residue { value, prime } => Ok(Scalar::Residue {
                value: mod_pow(*value as u64, prime.wide() - 2, prime.wide()) as u32,
                prime: *prime,
            }),
        }
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.ring().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer representative: the numerator for ℤ, the residue for F_p.
    /// Rationals with a nontrivial denominator return `None`.
    pub fn to_bigint(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(q) => q.is_integer().then(|| q.to_integer()),
            Scalar::Integer(n) => Some(n.clone()),
            Scalar::Residue { value, .. } => Some(BigInt::from(*value)),
        }
    }
}

pub(crate) fn mod_pow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Integer(n) => write!(f, "{n}"),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a + b),
            (Scalar::Residue { value: a, prime: p }, Scalar::Residue { value: b, prime: q })
                if p == q =>
            {
                Scalar::Residue {
                    value: ((*a as u64 + *b as u64) % p.wide()) as u32,
                    prime: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Integer(a), Scalar::Integer(b)) => Scalar::Integer(a * b),
            (Scalar::Residue { value: a, prime: p }, Scalar::Residue { value: b, prime: q })
                if p == q =>
            {
                Scalar::Residue {
                    value: ((*a as u64 * *b as u64) % p.wide()) as u32,
                    prime: *p,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Integer(a) => Scalar::Integer(-a),
            Scalar::Residue { value, prime } => Scalar::Residue {
                value: ((prime.wide() - *value as u64) % prime.wide()) as u32,
                prime: *prime,
            },
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}
