//! Exact coefficient fields: the rationals and prime fields F_p.
//!
//! Every scalar carries its ring; mixing rings is an error, not a panic,
//! so the CLI can report it cleanly. Values are kept canonical (reduced
//! fractions with positive denominator, residues in [0, p)).

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
}

/// The coefficient ring. The wider theory allows any unital ring; this
/// workbench restricts to fields so that rank/center/trace computations
/// are plain linear algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Ring {
    Rationals,
    PrimeField(u64),
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Ring, ScalarError> {
        if is_prime(p) {
            Ok(Ring::PrimeField(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Ring::Rationals => Scalar::Rat(BigRational::zero()),
            Ring::PrimeField(p) => Scalar::Fp { p: *p, value: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Ring::Rationals => Scalar::Rat(BigRational::one()),
            Ring::PrimeField(p) => Scalar::Fp { p: *p, value: 1 % *p },
        }
    }

    pub fn from_integer(&self, n: i64) -> Scalar {
        match self {
            Ring::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Ring::PrimeField(p) => Scalar::Fp {
                p: *p,
                value: n.rem_euclid(*p as i64) as u64,
            },
        }
    }

    /// Parses `a`, `-a` or `a/b` in this ring; over F_p a fraction means a*b^{-1}.
    pub fn parse(&self, text: &str) -> Result<Scalar, ScalarError> {
        let text = text.trim();
        let (num_str, den_str) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (text, None),
        };
        let num: i64 = num_str
            .parse()
            .map_err(|_| ScalarError::Parse(text.to_string()))?;
        let numerator = self.from_integer(num);
        match den_str {
            None => Ok(numerator),
            Some(d) => {
                let den: i64 = d.parse().map_err(|_| ScalarError::Parse(text.to_string()))?;
                if den == 0 {
                    return Err(ScalarError::DivisionByZero);
                }
                numerator.div(&self.from_integer(den))
            }
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// Exact field element, canonical by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp { p: u64, value: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Rat(_) => Ring::Rationals,
            Scalar::Fp { p, .. } => Ring::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { value, .. } => *value == 1,
        }
    }

    fn check_same_ring(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.ring() == other.ring() {
            Ok(())
        } else {
            Err(ScalarError::RingMismatch(self.ring(), other.ring()))
        }
    }

    pub fn arith(&self, other: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
        self.check_same_ring(other)?;
        Ok(match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            }),
            (Scalar::Fp { p, value: a }, Scalar::Fp { value: b, .. }) => {
                let p = *p;
                let (a, b) = (*a as u128, *b as u128);
                let value = match op {
                    ArithOp::Add => (a + b) % p as u128,
                    ArithOp::Sub => (a + p as u128 - b) % p as u128,
                    ArithOp::Mul => (a * b) % p as u128,
                } as u64;
                Scalar::Fp { p, value }
            }
            _ => unreachable!("ring checked above"),
        })
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.arith(other, ArithOp::Add)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Fp { p, value } => Scalar::Fp {
                p: *p,
                value: if *value == 0 { 0 } else { p - value },
            },
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
            Scalar::Fp { p, value } => Scalar::Fp {
                p: *p,
                value: mod_inverse(*value, *p),
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.mul(&other.inv()?)
    }

    /// Panicking helpers for internal hot paths where rings are known equal.
    pub fn times(&self, other: &Scalar) -> Scalar {
        self.mul(other).expect("ring mismatch in internal product")
    }

    pub fn plus(&self, other: &Scalar) -> Scalar {
        self.add(other).expect("ring mismatch in internal sum")
    }

    pub fn minus(&self, other: &Scalar) -> Scalar {
        self.sub(other).expect("ring mismatch in internal difference")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on (a, p), p prime, a != 0 mod p
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "input not invertible mod p");
    s0.rem_euclid(p as i128) as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Rational magnitude helper used when checking Schwartz-Zippel style samples.
pub fn rational(numer: i64, denom: i64) -> Scalar {
    Scalar::Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        rational(n, d)
    }

    #[test]
    fn rational_arithmetic_examples() {
        let half = q(1, 2);
        let third = q(1, 3);
        assert_eq!(half.add(&third).unwrap(), q(5, 6));
        let x = q(7, 3);
        assert_eq!(Ring::Rationals.zero().mul(&x).unwrap(), Ring::Rationals.zero());
    }

    #[test]
    fn prime_field_arithmetic_examples() {
        let f5 = Ring::prime_field(5).unwrap();
        let two = f5.from_integer(2);
        let three = f5.from_integer(3);
        assert_eq!(two.mul(&three).unwrap(), f5.one());
    }

    #[test]
    fn inverses() {
        assert_eq!(q(-2, 3).inv().unwrap(), q(-3, 2));
        let f7 = Ring::prime_field(7).unwrap();
        assert_eq!(f7.from_integer(3).inv().unwrap(), f7.from_integer(5));
        assert_eq!(Ring::Rationals.one().inv().unwrap(), Ring::Rationals.one());
        assert_eq!(
            Ring::Rationals.zero().inv(),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn ring_mismatch_reported() {
        let f5 = Ring::prime_field(5).unwrap();
        let err = f5.one().add(&Ring::Rationals.one()).unwrap_err();
        assert!(matches!(err, ScalarError::RingMismatch(_, _)));
    }

    #[test]
    fn primality_gate() {
        assert!(Ring::prime_field(2).is_ok());
        assert!(Ring::prime_field(97).is_ok());
        assert!(matches!(Ring::prime_field(1), Err(ScalarError::NotPrime(1))));
        assert!(matches!(Ring::prime_field(91), Err(ScalarError::NotPrime(91))));
    }

    #[test]
    fn parse_syntax() {
        assert_eq!(Ring::Rationals.parse("-3").unwrap(), q(-3, 1));
        assert_eq!(Ring::Rationals.parse("2/4").unwrap(), q(1, 2));
        let f7 = Ring::prime_field(7).unwrap();
        // 1/2 = 4 mod 7
        assert_eq!(f7.parse("1/2").unwrap(), f7.from_integer(4));
        assert!(Ring::Rationals.parse("x").is_err());
    }

    #[test]
    fn field_axioms_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let rings = [Ring::Rationals, Ring::prime_field(13).unwrap()];
        for ring in rings {
            for _ in 0..200 {
                let a = ring.from_integer(rng.gen_range(-20..20));
                let b = ring.from_integer(rng.gen_range(-20..20));
                let c = ring.from_integer(rng.gen_range(-20..20));
                let assoc_l = a.add(&b).unwrap().add(&c).unwrap();
                let assoc_r = a.add(&b.add(&c).unwrap()).unwrap();
                assert_eq!(assoc_l, assoc_r);
                let dist_l = a.mul(&b.add(&c).unwrap()).unwrap();
                let dist_r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                assert_eq!(dist_l, dist_r);
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), ring.one());
                }
            }
        }
    }
}
