//! Exact field arithmetic: rationals with arbitrary-precision integers, or a
//! prime field F_p with 64-bit reduction. No floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which exact field a computation runs over.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    /// The rational numbers.
    Q,
    /// The prime field F_p. p must be prime; p > 50 is expected by the
    /// randomized routines.
    Fp(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Q => write!(f, "Q"),
            FieldSpec::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl FieldSpec {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Q => 0,
            FieldSpec::Fp(p) => *p,
        }
    }
}

/// An element of the active field.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { p: u64, v: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Q(_) => FieldSpec::Q,
            Scalar::Fp { p, .. } => FieldSpec::Fp(*p),
        }
    }

    pub fn zero(field: FieldSpec) -> Self {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: FieldSpec) -> Self {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: FieldSpec, n: i64) -> Self {
        match field {
            FieldSpec::Q => Scalar::Q(BigRational::from(BigInt::from(n))),
            FieldSpec::Fp(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, v: r }
            }
        }
    }

    /// Parses a coefficient: an integer, or `a/b` over Q.
    pub fn from_fraction(field: FieldSpec, numer: i64, denom: i64) -> Option<Self> {
        if denom == 0 {
            return None;
        }
        match field {
            FieldSpec::Q => Some(Scalar::Q(BigRational::new(
                BigInt::from(numer),
                BigInt::from(denom),
            ))),
            FieldSpec::Fp(_) => {
                let d = Scalar::from_i64(field, denom);
                d.inv().map(|di| Scalar::from_i64(field, numer).mul(&di))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { p: q, v: b }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp {
                    p: *p,
                    v: ((*a as u128 + *b as u128) % *p as u128) as u64,
                }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { p: q, v: b }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp {
                    p: *p,
                    v: ((*a as u128 * *b as u128) % *p as u128) as u64,
                }
            }
            _ => panic!("field mismatch"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: pow_mod(*v, *p - 2, *p),
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        other.inv().map(|inv| self.mul(&inv))
    }

    /// Uniform draw over F_p; small integers |c| <= 20 over Q.
    pub fn random<R: Rng>(field: FieldSpec, rng: &mut R) -> Scalar {
        match field {
            FieldSpec::Q => Scalar::from_i64(field, rng.gen_range(-20..=20)),
            FieldSpec::Fp(p) => Scalar::Fp {
                p,
                v: rng.gen_range(0..p),
            },
        }
    }

    /// Random nonzero element.
    pub fn random_nonzero<R: Rng>(field: FieldSpec, rng: &mut R) -> Scalar {
        loop {
            let s = Scalar::random(field, rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// Canonical text form: `n`, `-n`, or `n/d` (reduced) over Q; the
    /// representative in `0..p` over F_p.
    pub fn render(&self) -> String {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => v.to_string(),
        }
    }

    /// Over Q only: numerator/denominator pair for root searching.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(r) => Some(r),
            _ => None,
        }
    }

    pub fn abs_is_small_int(&self, bound: i64) -> bool {
        match self {
            Scalar::Q(r) => r.denom().is_one() && r.numer().abs() <= BigInt::from(bound),
            Scalar::Fp { .. } => true,
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let f = FieldSpec::Q;
        let third = Scalar::from_fraction(f, 1, 3).unwrap();
        let sum = third.add(&third).add(&third);
        assert!(sum.is_one());
        assert_eq!(third.render(), "1/3");
    }

    #[test]
    fn fp_inverse() {
        let f = FieldSpec::Fp(101);
        for n in 1..101 {
            let s = Scalar::from_i64(f, n);
            let i = s.inv().unwrap();
            assert!(s.mul(&i).is_one());
        }
        assert!(Scalar::zero(f).inv().is_none());
    }

    #[test]
    fn division_by_zero_is_rejected() {
        let f = FieldSpec::Q;
        assert!(Scalar::one(f).div(&Scalar::zero(f)).is_none());
    }
}
