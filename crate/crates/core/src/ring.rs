//! A small coefficient-ring abstraction so that distributions, symmetric
//! tensors and symbol coefficients work uniformly over Q_p, Iwasawa-algebra
//! truncations, cyclotomic extensions and exact rationals.
//!
//! Context (prime, precision, truncation) lives on values, so constructors
//! are of the `*_like` form.

use num_bigint::BigInt;
use num_rational::BigRational;

pub trait Ring: Clone + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Equality to the precision both operands can honestly claim.
    fn eq_elem(&self, other: &Self) -> bool;
    /// Multiplicative inverse when `self` is a unit.
    fn inv(&self) -> crate::error::Result<Self>;
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn one_like(&self) -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn eq_elem(&self, other: &Self) -> bool {
        self == other
    }
    fn inv(&self) -> crate::error::Result<Self> {
        if num_traits::Zero::is_zero(self) {
            return Err(crate::error::CoreError::DivisionByZero);
        }
        Ok(self.recip())
    }
}

impl Ring for crate::padic::PadicNumber {
    fn zero_like(&self) -> Self {
        crate::padic::PadicNumber::zero(self.p(), self.precision())
    }
    fn one_like(&self) -> Self {
        crate::padic::PadicNumber::one(self.p(), self.precision())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        crate::padic::PadicNumber::from_i64(n, self.p(), self.precision())
    }
    fn add(&self, other: &Self) -> Self {
        crate::padic::PadicNumber::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        crate::padic::PadicNumber::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        crate::padic::PadicNumber::mul(self, other)
    }
    fn neg(&self) -> Self {
        crate::padic::PadicNumber::neg(self)
    }
    fn is_zero(&self) -> bool {
        crate::padic::PadicNumber::is_zero(self)
    }
    fn eq_elem(&self, other: &Self) -> bool {
        self.eq_mod_common(other)
    }
    fn inv(&self) -> crate::error::Result<Self> {
        crate::padic::PadicNumber::inv(self)
    }
}
