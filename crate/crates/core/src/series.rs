//! Dense truncated power series over a coefficient ring, with a variable tag
//! so q-expansions, pi-series, z-expansions and u-series don't mix silently.

use crate::error::{CoreError, Result};
use crate::ring::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum VarTag {
    Q,
    Pi,
    Z,
    U,
}

#[derive(Debug, Clone)]
pub struct Series<R: Ring> {
    pub var: VarTag,
    /// coefficients c_0..c_{trunc-1}; len <= trunc
    pub coeffs: Vec<R>,
    pub trunc: usize,
}

impl<R: Ring> Series<R> {
    pub fn new(var: VarTag, coeffs: Vec<R>, trunc: usize) -> Self {
        let mut s = Series { var, coeffs, trunc };
        s.coeffs.truncate(trunc);
        s
    }

    pub fn zero(var: VarTag, like: &R, trunc: usize) -> Self {
        Series { var, coeffs: vec![like.zero_like()], trunc }
    }

    pub fn one(var: VarTag, like: &R, trunc: usize) -> Self {
        Series { var, coeffs: vec![like.one_like()], trunc }
    }

    /// The monomial x^k.
    pub fn monomial(var: VarTag, like: &R, k: usize, trunc: usize) -> Self {
        let mut c = vec![like.zero_like(); (k + 1).min(trunc)];
        if k < trunc {
            c[k] = like.one_like();
        }
        Series { var, coeffs: c, trunc }
    }

    pub fn coeff(&self, k: usize) -> R {
        if k < self.coeffs.len() {
            self.coeffs[k].clone()
        } else {
            self.coeffs
                .first()
                .map(|c| c.zero_like())
                .expect("series must hold at least one coefficient")
        }
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        let mut s = self.clone();
        s.trunc = trunc;
        s.coeffs.truncate(trunc);
        if s.coeffs.is_empty() {
            s.coeffs.push(self.coeff(0).zero_like());
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.var, other.var, "variable tags must match");
        let trunc = self.trunc.min(other.trunc);
        let n = self.coeffs.len().max(other.coeffs.len()).min(trunc);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k).add(&other.coeff(k)));
        }
        if out.is_empty() {
            out.push(self.coeff(0));
        }
        Series { var: self.var, coeffs: out, trunc }
    }

    pub fn neg(&self) -> Self {
        Series {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, s: &R) -> Self {
        Series {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.var, other.var, "variable tags must match");
        let trunc = self.trunc.min(other.trunc);
        let zero = self.coeff(0).zero_like();
        let n = (self.coeffs.len() + other.coeffs.len() - 1).min(trunc).max(1);
        let mut out = vec![zero; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= trunc {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= trunc {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Series { var: self.var, coeffs: out, trunc }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Series::one(self.var, &self.coeff(0), self.trunc);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Composition self(g) where g has zero constant term; brute-force Horner.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.coeff(0).is_zero() {
            return Err(CoreError::Domain(
                "series composition requires zero constant term".into(),
            ));
        }
        let trunc = self.trunc.min(g.trunc);
        let mut acc = Series::zero(self.var, &self.coeff(0), trunc);
        for k in (0..self.coeffs.len()).rev() {
            acc = acc.mul(g);
            let c = Series::new(self.var, vec![self.coeff(k)], trunc);
            acc = acc.add(&c);
        }
        Ok(acc)
    }

    /// Multiplicative inverse when the constant term is a unit.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.coeff(0);
        let c0_inv = c0.inv()?;
        let zero = c0.zero_like();
        let mut out = vec![zero; self.trunc.max(1)];
        out[0] = c0_inv.clone();
        for k in 1..self.trunc {
            let mut s = self.coeff(0).zero_like();
            for j in 1..=k {
                let a = self.coeff(j);
                if a.is_zero() {
                    continue;
                }
                s = s.add(&a.mul(&out[k - j]));
            }
            out[k] = s.neg().mul(&c0_inv);
        }
        Ok(Series { var: self.var, coeffs: out, trunc: self.trunc })
    }

    /// Formal division self / den, allowing a shared leading zero-order v
    /// (den = x^v * unit-series); errors if self has smaller order than den.
    pub fn divide(&self, den: &Self) -> Result<Self> {
        let v = den
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(CoreError::DivisionByZero)?;
        for k in 0..v.min(self.coeffs.len()) {
            if !self.coeffs[k].is_zero() {
                return Err(CoreError::Domain(
                    "numerator order smaller than denominator order".into(),
                ));
            }
        }
        let trunc = self.trunc.min(den.trunc) - v;
        let mut numc: Vec<R> = self.coeffs.iter().skip(v).cloned().collect();
        if numc.is_empty() {
            numc.push(self.coeff(0).zero_like());
        }
        let num = Series::new(self.var, numc, trunc);
        let den = Series::new(self.var, den.coeffs.iter().skip(v).cloned().collect(), trunc);
        Ok(num.mul(&den.invert()?))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eq_series(&self, other: &Self) -> bool {
        let n = self.trunc.min(other.trunc);
        (0..n).all(|k| self.coeff(k).eq_elem(&other.coeff(k)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn compose_matches_bruteforce_substitution() {
        // g o f truncated at T equals brute-force polynomial substitution,
        // random degree <= 10 inputs (deterministic seed)
        let mut seed = 99u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 40) as i64 % 7) - 3
        };
        for _ in 0..10 {
            let t = 12;
            let g = Series::new(VarTag::Z, (0..=10).map(|_| r(next())).collect(), t);
            let mut fc: Vec<BigRational> = (0..=10).map(|_| r(next())).collect();
            fc[0] = r(0);
            let f = Series::new(VarTag::Z, fc, t);
            let lhs = g.compose(&f).unwrap();
            // brute-force: sum g_k * f^k as polynomial products, then truncate
            let mut rhs = Series::zero(VarTag::Z, &r(0), t);
            let mut fk = Series::one(VarTag::Z, &r(0), t);
            for k in 0..g.coeffs.len() {
                rhs = rhs.add(&fk.scalar_mul(&g.coeff(k)));
                fk = fk.mul(&f);
            }
            assert!(lhs.eq_series(&rhs));
        }
    }

    #[test]
    fn invert_roundtrip() {
        let f = Series::new(VarTag::Pi, vec![r(1), r(3), r(-2), r(7)], 9);
        let g = f.invert().unwrap();
        assert!(f.mul(&g).eq_series(&Series::one(VarTag::Pi, &r(0), 9)));
    }

    #[test]
    fn divide_with_leading_zeros() {
        // (x + x^2) / x = 1 + x
        let num = Series::new(VarTag::U, vec![r(0), r(1), r(1)], 6);
        let den = Series::new(VarTag::U, vec![r(0), r(1)], 6);
        let q = num.divide(&den).unwrap();
        assert!(q.eq_series(&Series::new(VarTag::U, vec![r(1), r(1)], 5)));
    }
}
