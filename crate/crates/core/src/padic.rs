//! Exact finite-precision arithmetic in Q_p with an odd prime p.
//!
//! Every element carries an absolute precision: `x = u * p^v + O(p^N)` with
//! `u` a unit mod p (when the valuation is finite). Arithmetic propagates
//! precision through the usual valuation bookkeeping, so results are exact
//! mod p^N for the N they report.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;

use crate::error::{CoreError, Result};

/// p^k as a BigUint.
pub fn ppow(p: u64, k: u64) -> BigUint {
    BigUint::from(p).pow(k as u32)
}

/// An element of Q_p known modulo p^prec.
///
/// Invariants: `p` odd prime; if `val = Some(v)` then `v < prec` and `unit`
/// is coprime to p, reduced mod p^(prec - v). `val = None` means the element
/// is indistinguishable from zero at this precision, i.e. O(p^prec).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    val: Option<i64>,
    unit: BigUint,
    prec: i64,
}

impl PadicNumber {
    pub fn zero(p: u64, prec: i64) -> Self {
        PadicNumber { p, val: None, unit: BigUint::zero(), prec }
    }

    pub fn one(p: u64, prec: i64) -> Self {
        PadicNumber { p, val: Some(0), unit: BigUint::one(), prec }
    }

    /// Builds u * p^v + O(p^prec), normalizing the unit.
    pub fn from_unit_val(p: u64, unit: BigUint, v: i64, prec: i64) -> Self {
        let mut x = PadicNumber { p, val: Some(v), unit, prec };
        x.normalize();
        x
    }

    pub fn from_i64(n: i64, p: u64, prec: i64) -> Self {
        if n == 0 {
            return Self::zero(p, prec);
        }
        let neg = n < 0;
        let mag = BigUint::from(n.unsigned_abs());
        let mut x = PadicNumber { p, val: Some(0), unit: mag, prec };
        x.normalize();
        if neg { x.neg() } else { x }
    }

    pub fn from_biguint(n: &BigUint, p: u64, prec: i64) -> Self {
        let mut x = PadicNumber { p, val: Some(0), unit: n.clone(), prec };
        x.normalize();
        x
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn is_unit(&self) -> bool {
        self.val == Some(0)
    }

    /// The unit part, reduced mod p^(prec - val).
    pub fn unit_part(&self) -> &BigUint {
        &self.unit
    }

    fn normalize(&mut self) {
        let Some(v) = self.val else {
            self.unit = BigUint::zero();
            return;
        };
        let p = BigUint::from(self.p);
        let mut v = v;
        let mut u = std::mem::take(&mut self.unit);
        // strip p-powers from the representative
        while !u.is_zero() && (&u % &p).is_zero() {
            u /= &p;
            v += 1;
        }
        if u.is_zero() || v >= self.prec {
            self.val = None;
            self.unit = BigUint::zero();
            return;
        }
        let modulus = ppow(self.p, (self.prec - v) as u64);
        u %= &modulus;
        if u.is_zero() {
            self.val = None;
            self.unit = BigUint::zero();
            return;
        }
        // reduction may have re-introduced p-divisibility only if u was ≡ 0, handled above
        self.val = Some(v);
        self.unit = u;
    }

    /// Caps the absolute precision at `prec` (no-op if already lower).
    pub fn with_precision(&self, prec: i64) -> Self {
        if prec >= self.prec {
            let mut x = self.clone();
            // honest model: precision can only be lowered for free
            x.prec = self.prec;
            return x;
        }
        let mut x = self.clone();
        x.prec = prec;
        x.normalize();
        x
    }

    /// The canonical representative in [0, p^(prec-val)) of the unit part.
    pub fn lift_unit(&self) -> BigUint {
        self.unit.clone()
    }

    /// Integer representative of the whole element when val >= 0; None for
    /// negative valuation or zero (zero lifts to 0).
    pub fn lift_integer(&self) -> Option<BigUint> {
        match self.val {
            None => Some(BigUint::zero()),
            Some(v) if v >= 0 => Some(&self.unit * ppow(self.p, v as u64)),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        match (self.val, other.val) {
            (None, None) => Self::zero(self.p, prec),
            (None, Some(_)) => other.with_precision(prec),
            (Some(_), None) => self.with_precision(prec),
            (Some(v1), Some(v2)) => {
                let v = v1.min(v2);
                if v >= prec {
                    return Self::zero(self.p, prec);
                }
                let m = ppow(self.p, (prec - v) as u64);
                let a = (&self.unit * ppow(self.p, (v1 - v) as u64)) % &m;
                let b = (&other.unit * ppow(self.p, (v2 - v) as u64)) % &m;
                let s = (a + b) % &m;
                Self::from_unit_val(self.p, s, v, prec)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => {
                let m = ppow(self.p, (self.prec - v) as u64);
                let u = (&m - &self.unit) % &m;
                Self::from_unit_val(self.p, u, v, self.prec)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        match (self.val, other.val) {
            (Some(v1), Some(v2)) => {
                let prec = (self.prec + v2).min(other.prec + v1);
                let v = v1 + v2;
                if v >= prec {
                    return Self::zero(self.p, prec);
                }
                let m = ppow(self.p, (prec - v) as u64);
                let u = (&self.unit * &other.unit) % &m;
                Self::from_unit_val(self.p, u, v, prec)
            }
            // O(p^N1) * (u p^v2 + O(p^N2)) = O(p^(N1+v2)); O*O = O(p^(N1+N2))
            (None, Some(v2)) => Self::zero(self.p, self.prec + v2),
            (Some(v1), None) => Self::zero(self.p, other.prec + v1),
            (None, None) => Self::zero(self.p, self.prec + other.prec),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let Some(v) = self.val else {
            return Err(CoreError::DivisionByZero);
        };
        let k = (self.prec - v) as u64;
        let m = ppow(self.p, k);
        let u = mod_inverse(&self.unit, &m).ok_or(CoreError::DivisionByZero)?;
        Ok(Self::from_unit_val(self.p, u, -v, self.prec - 2 * v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.p, self.prec + self.val.unwrap_or(0).max(0) * e as i64);
        // cap accumulator precision sensibly: handled by mul bookkeeping
        acc.prec = i64::MAX / 4;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        if acc.prec > self.prec + 64 {
            // pure power of an exact-precision element: bookkeeping already
            // capped by mul; avoid runaway pseudo-precision for zero
            acc.prec = acc.prec.min(self.prec.max(1) * 64);
        }
        acc
    }

    /// Exact equality of the overlapping known digits (mod p^min(N1,N2)).
    pub fn eq_mod_common(&self, other: &Self) -> bool {
        let prec = self.prec.min(other.prec);
        self.with_precision(prec) == other.with_precision(prec)
    }

    /// Equality mod p^k.
    pub fn eq_mod(&self, other: &Self, k: i64) -> bool {
        assert!(
            k <= self.prec && k <= other.prec,
            "requested comparison beyond stored precision"
        );
        self.with_precision(k) == other.with_precision(k)
    }

    /// p-adic logarithm, defined for x ≡ 1 mod p.
    pub fn log(&self) -> Result<Self> {
        let one = Self::one(self.p, self.prec);
        let t = self.sub(&one);
        match t.val {
            None => return Ok(Self::zero(self.p, self.prec)),
            Some(v) if v >= 1 => {}
            _ => return Err(CoreError::Domain("log requires x = 1 mod p".into())),
        }
        // sum_{k>=1} -(-t)^k / k
        let mut term = t.clone(); // t^k
        let mut acc = Self::zero(self.p, self.prec);
        let mut k: i64 = 1;
        loop {
            let kp = Self::from_i64(k, self.p, self.prec + 2 * ilog_p(self.p, k as u64) + 2);
            let c = term.div(&kp)?;
            let c = if k % 2 == 0 { c.neg() } else { c };
            acc = acc.add(&c.with_precision(self.prec));
            if term.val.map(|v| v - ilog_p(self.p, (k + 1) as u64)).unwrap_or(self.prec)
                >= self.prec
            {
                break;
            }
            term = term.mul(&t).with_precision(self.prec + ilog_p(self.p, 2 * k as u64) + 2);
            k += 1;
            if k > 4 * self.prec.max(4) {
                break;
            }
        }
        Ok(acc.with_precision(self.prec))
    }

    /// Teichmüller lift: the (p-1)-st root of unity congruent to a mod p.
    pub fn teichmuller(a: u64, p: u64, prec: i64) -> Result<Self> {
        if a % p == 0 {
            return Err(CoreError::Domain("teichmuller requires a not = 0 mod p".into()));
        }
        let m = ppow(p, prec.max(1) as u64);
        let mut x = BigUint::from(a % p);
        // x ↦ x^p converges linearly to the Teichmüller lift
        for _ in 0..prec.max(1) {
            x = x.modpow(&BigUint::from(p), &m);
        }
        Ok(Self::from_unit_val(p, x, 0, prec))
    }

    /// Square root of a unit square by Hensel lifting (p odd).
    pub fn sqrt(&self) -> Result<Self> {
        let Some(v) = self.val else {
            return Ok(Self::zero(self.p, self.prec / 2));
        };
        if v % 2 != 0 {
            return Err(CoreError::Domain("odd valuation has no square root in Q_p".into()));
        }
        // reduce to the unit part
        let k = (self.prec - v) as u64;
        let m = ppow(self.p, k);
        // find root mod p by brute force (p is small in this artifact)
        let a0 = (&self.unit % BigUint::from(self.p)).to_u64_digits();
        let a0 = if a0.is_empty() { 0 } else { a0[0] };
        let mut r0 = None;
        for r in 1..self.p {
            if (r * r) % self.p == a0 {
                r0 = Some(r);
                break;
            }
        }
        let Some(r0) = r0 else {
            return Err(CoreError::Domain("not a square: unit is a non-residue".into()));
        };
        let mut x = BigUint::from(r0);
        // Newton: x <- (x + a/x)/2 mod p^k
        let inv2 = mod_inverse(&BigUint::from(2u64), &m).unwrap();
        for _ in 0..(64 - (k as u64).leading_zeros() + 2) {
            let xi = mod_inverse(&x, &m).ok_or(CoreError::DivisionByZero)?;
            x = ((&x + (&self.unit * xi) % &m) * &inv2) % &m;
        }
        Ok(Self::from_unit_val(self.p, x, v / 2, self.prec - v / 2))
    }
}

/// floor(log_p(n)) for n >= 1, as i64; v_p-style helper for factorial bounds.
fn ilog_p(p: u64, n: u64) -> i64 {
    let mut k = 0;
    let mut m = p;
    while m <= n {
        k += 1;
        match m.checked_mul(p) {
            Some(next) => m = next,
            None => break,
        }
    }
    k
}

/// Modular inverse by extended Euclid; None when not coprime.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return None;
    }
    let x = ((e.x % &m_int) + &m_int) % &m_int;
    Some(x.to_biguint().unwrap())
}

/// padic_from_rational: the image of num/den in Q_p at absolute precision prec.
pub fn padic_from_rational(num: i64, den: i64, p: u64, prec: i64) -> Result<PadicNumber> {
    if den == 0 {
        return Err(CoreError::DivisionByZero);
    }
    let n = PadicNumber::from_i64(num, p, prec + 2 * (ilog_p(p, den.unsigned_abs()) + 1));
    let d = PadicNumber::from_i64(den, p, prec + 2 * (ilog_p(p, den.unsigned_abs()) + 1));
    Ok(n.div(&d)?.with_precision(prec))
}

/// binom(x, n) = x(x-1)...(x-n+1)/n!, with precision loss bounded by v_p(n!).
pub fn binom_padic(x: &PadicNumber, n: u64) -> Result<PadicNumber> {
    let p = x.p();
    let mut prod = PadicNumber::one(p, x.precision());
    for i in 0..n {
        let shift = PadicNumber::from_i64(i as i64, p, x.precision());
        prod = prod.mul(&x.sub(&shift));
    }
    let mut fact = PadicNumber::one(p, x.precision() + 2 * vp_factorial(p, n));
    for i in 1..=n {
        fact = fact.mul(&PadicNumber::from_i64(
            i as i64,
            p,
            x.precision() + 2 * vp_factorial(p, n),
        ));
    }
    let out = prod.div(&fact)?;
    if out.precision() <= 0 {
        return Err(CoreError::PrecisionExhausted);
    }
    Ok(out)
}

/// v_p(n!) by Legendre.
pub fn vp_factorial(p: u64, n: u64) -> i64 {
    let mut s = 0i64;
    let mut q = p;
    loop {
        s += (n / q) as i64;
        match q.checked_mul(p) {
            Some(next) if next <= n => q = next,
            _ => break,
        }
    }
    s
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "0 * {}^0 + O({}^{})", self.p, self.p, self.prec),
            Some(v) => write!(f, "{} * {}^{} + O({}^{})", self.unit, self.p, v, self.p, self.prec),
        }
    }
}

impl FromStr for PadicNumber {
    type Err = CoreError;

    /// Parses the canonical form "u * p^v + O(p^N)" bit-exactly.
    fn from_str(s: &str) -> Result<Self> {
        let err = || CoreError::Parse(format!("bad p-adic literal: {s:?}"));
        let s = s.trim();
        let (lhs, rhs) = s.split_once("+ O(").ok_or_else(err)?;
        let rhs = rhs.trim().strip_suffix(')').ok_or_else(err)?;
        let (p2, n) = rhs.split_once('^').ok_or_else(err)?;
        let prec: i64 = n.trim().parse().map_err(|_| err())?;
        let (u, pv) = lhs.split_once('*').ok_or_else(err)?;
        let u = BigUint::from_str(u.trim()).map_err(|_| err())?;
        let (p1, v) = pv.trim().split_once('^').ok_or_else(err)?;
        let p: u64 = p1.trim().parse().map_err(|_| err())?;
        if p2.trim() != p1.trim() {
            return Err(err());
        }
        let v: i64 = v.trim().parse().map_err(|_| err())?;
        if u.is_zero() {
            return Ok(PadicNumber::zero(p, prec));
        }
        Ok(PadicNumber::from_unit_val(p, u, v, prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rational_examples() {
        // zero
        let z = padic_from_rational(0, 1, 3, 5).unwrap();
        assert!(z.is_zero());
        // identity
        let one = padic_from_rational(1, 1, 5, 4).unwrap();
        assert_eq!(one.valuation(), Some(0));
        assert_eq!(one.lift_unit(), BigUint::from(1u64));
        // 1/2 = 5 mod 9 (extended-Euclid oracle: 2*5 = 10 = 1 mod 9)
        let h = padic_from_rational(1, 2, 3, 2).unwrap();
        assert_eq!(h.valuation(), Some(0));
        assert_eq!(h.lift_unit(), BigUint::from(5u64));
        assert!(padic_from_rational(1, 0, 3, 2).is_err());
    }

    #[test]
    fn binom_examples() {
        let p = 5;
        let x = PadicNumber::from_i64(4, p, 6);
        assert!(binom_padic(&x, 0).unwrap().eq_mod(&PadicNumber::one(p, 6), 6));
        let b = binom_padic(&x, 2).unwrap();
        assert!(b.eq_mod(&PadicNumber::from_i64(6, p, b.precision()), b.precision()));
        // binom(1/2, 2) = -1/8 in Z_5 (exact rational oracle embedded)
        let half = padic_from_rational(1, 2, 5, 8).unwrap();
        let b = binom_padic(&half, 2).unwrap();
        let oracle = padic_from_rational(-1, 8, 5, b.precision()).unwrap();
        assert!(b.eq_mod(&oracle, b.precision()));
    }

    #[test]
    fn teichmuller_examples() {
        let p = 7;
        let t1 = PadicNumber::teichmuller(1, p, 6).unwrap();
        assert!(t1.eq_mod(&PadicNumber::one(p, 6), 6));
        let tm1 = PadicNumber::teichmuller(p - 1, p, 6).unwrap();
        assert!(tm1.eq_mod(&PadicNumber::from_i64(-1, p, 6), 6));
        // iterate a -> a^5 oracle: teichmuller(2) = 57 mod 125 for p = 5
        let t2 = PadicNumber::teichmuller(2, 5, 3).unwrap();
        assert_eq!(t2.lift_integer().unwrap(), BigUint::from(57u64));
        // omega^(p-1) = 1
        let t3 = PadicNumber::teichmuller(3, 5, 8).unwrap();
        assert!(t3.pow(4).eq_mod(&PadicNumber::one(5, 8), 8));
        assert!(PadicNumber::teichmuller(0, 5, 3).is_err());
    }

    #[test]
    fn ring_axioms_random() {
        // deterministic pseudo-random triples; associativity/distributivity exact mod p^N
        let p = 3;
        let n = 7;
        let mut seed = 0x12345678u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as i64 - (1 << 30)
        };
        for _ in 0..50 {
            let a = PadicNumber::from_i64(next(), p, n);
            let b = PadicNumber::from_i64(next(), p, n);
            let c = PadicNumber::from_i64(next(), p, n);
            let lhs = a.mul(&b).mul(&c);
            let rhs = a.mul(&b.mul(&c));
            assert!(lhs.eq_mod_common(&rhs));
            let lhs = a.mul(&b.add(&c));
            let rhs = a.mul(&b).add(&a.mul(&c));
            assert!(lhs.eq_mod_common(&rhs));
        }
    }

    #[test]
    fn unit_inverse_roundtrip() {
        let p = 5;
        let n = 9;
        for k in 1..40i64 {
            if k % 5 == 0 {
                continue;
            }
            let a = PadicNumber::from_i64(7 * k + 1, p, n);
            let b = PadicNumber::from_i64(k, p, n);
            let prod = a.mul(&b);
            let back = prod.div(&b).unwrap();
            assert!(back.eq_mod_common(&a), "k={k}");
        }
    }

    #[test]
    fn string_roundtrip() {
        for s in [
            "12 * 5^-2 + O(5^7)",
            "1 * 3^0 + O(3^4)",
            "0 * 7^0 + O(7^9)",
            "38 * 5^3 + O(5^8)",
        ] {
            let x: PadicNumber = s.parse().unwrap();
            assert_eq!(x.to_string(), s, "canonical form must round-trip bit-exactly");
        }
        let x = padic_from_rational(22, 7, 5, 6).unwrap();
        let y: PadicNumber = x.to_string().parse().unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn log_is_homomorphism() {
        let p = 5;
        let n = 10;
        let a = PadicNumber::from_i64(1 + 5 * 3, p, n);
        let b = PadicNumber::from_i64(1 + 5 * 7, p, n);
        let lhs = a.mul(&b).log().unwrap();
        let rhs = a.log().unwrap().add(&b.log().unwrap());
        assert!(lhs.eq_mod(&rhs, n - 1));
    }

    #[test]
    fn sqrt_hensel() {
        let p = 5;
        let a = PadicNumber::from_i64(11 * 11, p, 8);
        let r = a.sqrt().unwrap();
        assert!(r.mul(&r).eq_mod(&a, r.precision()));
        // non-residue: 2 is not a square mod 5
        assert!(PadicNumber::from_i64(2, p, 8).sqrt().is_err());
        // odd valuation
        assert!(PadicNumber::from_i64(5, p, 8).sqrt().is_err());
    }
}
