//! Weight space: m-accessible discs, the Iwasawa algebra of a wide-open disc,
//! the universal character, and the weight-direction binomials binom(nabla, j).
//!
//! A disc U is centered at an integer weight k0 and carried in the coordinate
//! w that vanishes at the center, normalized by kappa_U(1+p) = (1+p)^k0 (1+w).
//! In the coordinate of the reference (kappa_U(1+p) = 1 + eps*u) this is
//! w = eps*u, so eps never needs a numerical value; only v_p(eps) =
//! 1/((p-1) p^m) enters, through the accessibility predicate. Truncation is
//! the two-sided box: w-degree < trunc, coefficients mod p^prec.

use crate::error::{CoreError, Result};
use crate::padic::PadicNumber;
use crate::ring::Ring;
use crate::series::{Series, VarTag};
use num_rational::Rational64;
use std::sync::Arc;

/// A wide-open disc in weight space, defined over the component of its
/// integer center.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDisc {
    pub p: u64,
    /// integer center k0; the disc lies in the component k0 mod (p-1)
    pub center: i64,
    /// accessibility level m (disc contained in W_m)
    pub m: u32,
    /// the disc is { v_p(w) > radius_vexp }
    pub radius_vexp: Rational64,
    /// p-adic coefficient precision
    pub prec: i64,
    /// w-adic truncation M_u
    pub trunc: usize,
}

impl WeightDisc {
    pub fn new(p: u64, center: i64, m: u32, prec: i64, trunc: usize) -> Arc<Self> {
        Arc::new(WeightDisc {
            p,
            center,
            m,
            radius_vexp: Rational64::new(1, ((p - 1) as i64) * (p as i64).pow(m)),
            prec,
            trunc,
        })
    }

    /// v_p(eps) for this accessibility level.
    pub fn eps_valuation(&self) -> Rational64 {
        Rational64::new(1, ((self.p - 1) as i64) * (self.p as i64).pow(self.m))
    }

    /// Does the integer weight k lie in U? It must sit on the same component
    /// and within the radius: v_p(w_k) = 1 + v_p(k - k0) > radius.
    pub fn contains_integer(&self, k: i64) -> bool {
        let d = k - self.center;
        if d.rem_euclid((self.p - 1) as i64) != 0 {
            return false;
        }
        if d == 0 {
            return true;
        }
        let mut v = 1i64;
        let mut d = d.unsigned_abs();
        while d % self.p == 0 {
            v += 1;
            d /= self.p;
        }
        Rational64::from_integer(v) > self.radius_vexp
    }

    /// The w-coordinate of the integer weight k: (1+p)^(k-k0) - 1.
    pub fn w_of_integer(&self, k: i64) -> Result<PadicNumber> {
        if !self.contains_integer(k) {
            return Err(CoreError::NotAccessible(format!(
                "integer weight {k} is not in the disc centered at {}",
                self.center
            )));
        }
        let one_p = PadicNumber::from_i64(1 + self.p as i64, self.p, self.prec + 4);
        let d = k - self.center;
        let t = if d >= 0 {
            one_p.pow(d as u64)
        } else {
            one_p.inv()?.pow((-d) as u64)
        };
        Ok(t.sub(&PadicNumber::one(self.p, self.prec + 4)).with_precision(self.prec))
    }
}

/// A point of weight space for the accessibility predicate: either a genuine
/// integer weight, or a disc point recorded by component and w-valuation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum WeightPoint {
    Integer(i64),
    Point { component: i64, w_valuation: Rational64 },
}

/// The m-accessibility predicate: v_p(kappa(t)^(p-1) - 1) > 1/(p^m (p-1))
/// for all units t. Integer weights always pass; a disc point passes iff its
/// w-valuation strictly exceeds the threshold.
pub fn is_m_accessible(weight: &WeightPoint, p: u64, m: u32) -> bool {
    let threshold = Rational64::new(1, (p as i64).pow(m) * (p - 1) as i64);
    match weight {
        // v_p(t^(k(p-1)) - 1) >= 1 > threshold
        WeightPoint::Integer(_) => true,
        WeightPoint::Point { w_valuation, .. } => *w_valuation > threshold,
    }
}

/// An element of Lambda_U[1/p], truncated in the (p^prec, w^trunc) box.
#[derive(Debug, Clone)]
pub struct IwasawaElement {
    pub disc: Arc<WeightDisc>,
    pub ser: Series<PadicNumber>,
}

impl IwasawaElement {
    pub fn from_coeffs(disc: &Arc<WeightDisc>, coeffs: Vec<PadicNumber>) -> Self {
        IwasawaElement {
            disc: disc.clone(),
            ser: Series::new(VarTag::U, coeffs, disc.trunc),
        }
    }

    pub fn zero(disc: &Arc<WeightDisc>) -> Self {
        Self::from_coeffs(disc, vec![PadicNumber::zero(disc.p, disc.prec)])
    }

    pub fn one(disc: &Arc<WeightDisc>) -> Self {
        Self::from_coeffs(disc, vec![PadicNumber::one(disc.p, disc.prec)])
    }

    pub fn constant(disc: &Arc<WeightDisc>, c: PadicNumber) -> Self {
        Self::from_coeffs(disc, vec![c])
    }

    /// Invertible iff the constant term is invertible (unit criterion for
    /// power-series rings).
    pub fn is_invertible(&self) -> bool {
        !self.ser.coeff(0).is_zero()
    }

    /// Largest p-denominator exponent among stored coefficients (0 for
    /// integral elements). A proxy for the discarded tail's denominators.
    pub fn denominator_exponent(&self) -> i64 {
        self.ser
            .coeffs
            .iter()
            .filter_map(|c| c.valuation())
            .map(|v| (-v).max(0))
            .max()
            .unwrap_or(0)
    }

    /// Evaluation at an integer weight k in U (a ring map sending
    /// kappa_U(t) to t^k): substitute w = (1+p)^(k-k0) - 1.
    ///
    /// An element known mod (p^prec, w^trunc) is determined at w_k only mod
    /// p^(trunc * v_p(w_k)) (less a guard when the element carries
    /// p-denominators); the result's precision reflects that.
    pub fn eval_at_integer(&self, k: i64) -> Result<PadicNumber> {
        let w = self.disc.w_of_integer(k)?;
        let mut acc = PadicNumber::zero(self.disc.p, self.disc.prec);
        let mut wp = PadicNumber::one(self.disc.p, self.disc.prec + 4);
        for n in 0..self.ser.coeffs.len() {
            acc = acc.add(&self.ser.coeff(n).mul(&wp));
            wp = wp.mul(&w);
        }
        let den = self.denominator_exponent();
        let cap = match w.valuation() {
            Some(vw) => {
                let base = self.disc.trunc as i64 * vw;
                (if den > 0 { base - den - 2 } else { base }).min(self.disc.prec)
            }
            None => self.disc.prec,
        };
        if cap < 1 {
            return Err(CoreError::PrecisionExhausted);
        }
        Ok(acc.with_precision(cap.min(acc.precision())))
    }
}

impl Ring for IwasawaElement {
    fn zero_like(&self) -> Self {
        IwasawaElement::zero(&self.disc)
    }
    fn one_like(&self) -> Self {
        IwasawaElement::one(&self.disc)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        IwasawaElement::constant(&self.disc, PadicNumber::from_i64(n, self.disc.p, self.disc.prec))
    }
    fn add(&self, other: &Self) -> Self {
        assert!(self.disc == other.disc, "mismatched weight discs");
        IwasawaElement { disc: self.disc.clone(), ser: self.ser.add(&other.ser) }
    }
    fn sub(&self, other: &Self) -> Self {
        assert!(self.disc == other.disc, "mismatched weight discs");
        IwasawaElement { disc: self.disc.clone(), ser: self.ser.sub(&other.ser) }
    }
    fn mul(&self, other: &Self) -> Self {
        assert!(self.disc == other.disc, "mismatched weight discs");
        IwasawaElement { disc: self.disc.clone(), ser: self.ser.mul(&other.ser) }
    }
    fn neg(&self) -> Self {
        IwasawaElement { disc: self.disc.clone(), ser: self.ser.neg() }
    }
    fn is_zero(&self) -> bool {
        self.ser.is_zero()
    }
    fn eq_elem(&self, other: &Self) -> bool {
        self.ser.eq_series(&other.ser)
    }
    fn inv(&self) -> Result<Self> {
        Ok(IwasawaElement { disc: self.disc.clone(), ser: self.ser.invert()? })
    }
}

/// log(1+p) at the requested precision.
fn log_one_plus_p(p: u64, prec: i64) -> PadicNumber {
    PadicNumber::from_i64(1 + p as i64, p, prec + 4)
        .log()
        .expect("1+p = 1 mod p")
}

/// kappa_U(t) for a unit t, as an element of Lambda_U:
/// omega(t)^k0 * <t>^k0 * (1+w)^x with x = log<t> / log(1+p).
pub fn kappa(disc: &Arc<WeightDisc>, t: &PadicNumber) -> Result<IwasawaElement> {
    if t.valuation() != Some(0) {
        return Err(CoreError::Domain("kappa_U is defined on units".into()));
    }
    let p = disc.p;
    let guard = disc.prec + 6;
    let a0 = (t.lift_unit() % num_bigint::BigUint::from(p)).to_u64_digits();
    let a0 = if a0.is_empty() { 0 } else { a0[0] };
    let omega = PadicNumber::teichmuller(a0, p, guard)?;
    let t_angle = t.with_precision(guard).div(&omega)?;
    let x = t_angle.log()?.div(&log_one_plus_p(p, guard))?;
    // omega^k0 * <t>^k0
    let k0 = disc.center;
    let scalar_base = omega.mul(&t_angle);
    let scalar = if k0 >= 0 {
        scalar_base.pow(k0 as u64)
    } else {
        scalar_base.inv()?.pow((-k0) as u64)
    };
    // (1+w)^x = sum binom(x, n) w^n
    let mut coeffs = Vec::with_capacity(disc.trunc);
    for n in 0..disc.trunc {
        let b = crate::padic::binom_padic(&x, n as u64)?;
        coeffs.push(b.mul(&scalar).with_precision(disc.prec));
    }
    Ok(IwasawaElement::from_coeffs(disc, coeffs))
}

/// kappa_U(1 + c z) as a z-series with Lambda_U coefficients, for v_p(c) >= 1.
/// This is the engine of the Sigma_0(p)-action and the Ohta pairing kernel:
/// kappa_U(1+cz) = (1+cz)^k0 * (1+w)^(log(1+cz)/log(1+p)).
pub fn kappa_one_plus_cz(
    disc: &Arc<WeightDisc>,
    c: &PadicNumber,
    z_trunc: usize,
) -> Result<Series<IwasawaElement>> {
    let p = disc.p;
    if !c.is_zero() && c.valuation().map(|v| v < 1).unwrap_or(false) {
        return Err(CoreError::Domain("kappa series requires v_p(c) >= 1".into()));
    }
    let guard = disc.prec + 6 + 2 * crate::padic::vp_factorial(p, disc.trunc as u64);
    let zero = PadicNumber::zero(p, guard);
    let one = PadicNumber::one(p, guard);
    // L(z) = log(1+cz)/log(1+p) as a z-series over Q_p
    let lp = log_one_plus_p(p, guard);
    let mut lcoef = vec![zero.clone(); z_trunc.max(1)];
    let mut cpow = one.clone();
    for k in 1..z_trunc {
        cpow = cpow.mul(c);
        // (-1)^(k-1) c^k / k
        let kk = PadicNumber::from_i64(k as i64, p, guard);
        let mut term = cpow.div(&kk)?.div(&lp)?;
        if k % 2 == 0 {
            term = term.neg();
        }
        lcoef[k] = term;
    }
    let lz = Series::new(VarTag::Z, lcoef, z_trunc);
    // (1+cz)^k0 as a z-series over Q_p
    let base = Series::new(VarTag::Z, vec![one.clone(), c.with_precision(guard)], z_trunc);
    let k0 = disc.center;
    let head = if k0 >= 0 {
        base.pow(k0 as u64)
    } else {
        base.invert()?.pow((-k0) as u64)
    };
    // binom(L(z), n) for n < trunc, assembled into z-series of Lambda_U elements
    let mut binoms: Vec<Series<PadicNumber>> = Vec::with_capacity(disc.trunc);
    let mut prod = Series::one(VarTag::Z, &zero, z_trunc);
    let mut fact = one.clone();
    for n in 0..disc.trunc {
        if n > 0 {
            let shift = Series::new(
                VarTag::Z,
                vec![PadicNumber::from_i64((n as i64) - 1, p, guard)],
                z_trunc,
            );
            prod = prod.mul(&lz.sub(&shift));
            fact = fact.mul(&PadicNumber::from_i64(n as i64, p, guard));
        }
        let fact_inv = fact.inv()?;
        binoms.push(prod.scalar_mul(&fact_inv).mul(&head));
    }
    // transpose: coefficient of z^i is the Lambda_U element sum_n binoms[n][i] w^n
    let mut out = Vec::with_capacity(z_trunc);
    for i in 0..z_trunc {
        let coeffs: Vec<PadicNumber> = (0..disc.trunc)
            .map(|n| binoms[n].coeff(i).with_precision(disc.prec))
            .collect();
        out.push(IwasawaElement::from_coeffs(disc, coeffs));
    }
    Ok(Series::new(VarTag::Z, out, z_trunc))
}

/// The n-th coefficient of the LA_m expansion of kappa_U((1+p)^x) in the
/// binomial basis binom(x, n): equal to ((1+p)^k0 (1+w) - 1)^n.
pub fn universal_char_coeffs(disc: &Arc<WeightDisc>, n: u64) -> Result<IwasawaElement> {
    let p = disc.p;
    let one_p = PadicNumber::from_i64(1 + p as i64, p, disc.prec + 4);
    let k0 = disc.center;
    let scalar = if k0 >= 0 {
        one_p.pow(k0 as u64)
    } else {
        one_p.inv()?.pow((-k0) as u64)
    };
    // (1+p)^k0 (1+w) - 1
    let base = IwasawaElement::from_coeffs(
        disc,
        vec![
            scalar.sub(&PadicNumber::one(p, disc.prec + 4)).with_precision(disc.prec),
            scalar.with_precision(disc.prec),
        ],
    );
    let mut acc = IwasawaElement::one(disc);
    for _ in 0..n {
        acc = acc.mul(&base);
    }
    Ok(acc)
}

/// nabla as an element of Lambda_U[1/p]: k0 + log(1+w)/log(1+p). Its
/// evaluation at an integer weight k in U is exactly k.
pub fn nabla(disc: &Arc<WeightDisc>) -> IwasawaElement {
    let p = disc.p;
    let guard = disc.prec + 6;
    let lp = log_one_plus_p(p, guard);
    let mut coeffs = Vec::with_capacity(disc.trunc);
    coeffs.push(PadicNumber::from_i64(disc.center, p, disc.prec));
    for n in 1..disc.trunc {
        let kk = PadicNumber::from_i64(n as i64, p, guard);
        let mut c = lp.inv().unwrap().div(&kk).unwrap();
        if n % 2 == 0 {
            c = c.neg();
        }
        coeffs.push(c.with_precision(disc.prec - 2));
    }
    IwasawaElement::from_coeffs(disc, coeffs)
}

/// binom(nabla - shift, j) = (1/j!) prod_{i=0}^{j-1} (nabla - shift - i).
pub fn nabla_binom_shifted(disc: &Arc<WeightDisc>, j: u64, shift: i64) -> Result<IwasawaElement> {
    let nab = nabla(disc);
    let mut prod = IwasawaElement::one(disc);
    for i in 0..j {
        let c = nab.from_i64_like(shift + i as i64);
        prod = prod.mul(&nab.sub(&c));
    }
    let p = disc.p;
    let guard = disc.prec + 2 * crate::padic::vp_factorial(p, j) + 4;
    let mut fact = PadicNumber::one(p, guard);
    for i in 1..=j {
        fact = fact.mul(&PadicNumber::from_i64(i as i64, p, guard));
    }
    Ok(IwasawaElement {
        disc: disc.clone(),
        ser: prod.ser.scalar_mul(&fact.inv()?),
    })
}

/// binom(nabla, j). Invertibility in B_U is a queryable property: it holds
/// iff no integer 0..j-1 lies in U.
pub fn nabla_binom(disc: &Arc<WeightDisc>, j: u64) -> Result<IwasawaElement> {
    nabla_binom_shifted(disc, j, 0)
}

pub fn nabla_binom_invertible(disc: &Arc<WeightDisc>, j: u64) -> bool {
    !(0..j as i64).any(|k| disc.contains_integer(k))
}

/// Division by binom(nabla, j) after verifying that x vanishes (to working
/// precision) at every integer weight 0 <= k < j inside U; reports the
/// offending weight otherwise.
pub fn divide_by_nabla_binom(
    x: &IwasawaElement,
    j: u64,
    disc: &Arc<WeightDisc>,
) -> Result<IwasawaElement> {
    for k in 0..j as i64 {
        if disc.contains_integer(k) {
            let v = x.eval_at_integer(k)?;
            // working precision: the divisibility transfers a simple zero,
            // so demand vanishing to the evaluation's own precision less a
            // fixed guard
            if !v.with_precision((v.precision() - 2).max(1)).is_zero() {
                return Err(CoreError::NablaDivisibility(k));
            }
        }
    }
    let den = nabla_binom(disc, j)?;
    Ok(IwasawaElement { disc: disc.clone(), ser: x.ser.divide(&den.ser)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(p: u64, center: i64) -> Arc<WeightDisc> {
        WeightDisc::new(p, center, 0, 10, 6)
    }

    #[test]
    fn accessibility_examples() {
        let p = 5;
        assert!(is_m_accessible(&WeightPoint::Integer(7), p, 3));
        // boundary: v_p = 1/((p-1)p^m) exactly fails the strict inequality
        for m in 0..3 {
            let w = WeightPoint::Point {
                component: 0,
                w_valuation: Rational64::new(1, (p as i64).pow(m) * (p as i64 - 1)),
            };
            assert!(!is_m_accessible(&w, p, m));
        }
        // v_p = 1/(p-1), m = 0: threshold is 1/(p-1), strict fails
        let w = WeightPoint::Point {
            component: 0,
            w_valuation: Rational64::new(1, p as i64 - 1),
        };
        assert!(!is_m_accessible(&w, p, 0));
        // inside
        let w = WeightPoint::Point { component: 0, w_valuation: Rational64::new(1, 2) };
        assert!(is_m_accessible(&w, p, 0));
    }

    #[test]
    fn universal_char_examples() {
        let d = disc(5, 0);
        // n = 0 -> 1
        let c0 = universal_char_coeffs(&d, 0).unwrap();
        assert!(c0.eq_elem(&IwasawaElement::one(&d)));
        // n = 1 -> eps*u, i.e. w in our coordinate (center 0)
        let c1 = universal_char_coeffs(&d, 1).unwrap();
        assert!(c1.ser.coeff(0).is_zero());
        assert!(c1.ser.coeff(1).eq_mod(&PadicNumber::one(5, 10), 10));
    }

    /// Compare mod p^want, degrading to the precision both sides honestly
    /// carry; fails outright if fewer than `floor` digits are available.
    fn assert_close(a: &PadicNumber, b: &PadicNumber, want: i64, floor: i64, what: &str) {
        let k = want.min(a.precision()).min(b.precision());
        assert!(k >= floor, "{what}: only {k} digits available");
        assert!(a.eq_mod(b, k), "{what}: differ mod p^{k}: {a} vs {b}");
    }

    #[test]
    fn kappa_multiplicative_and_integer_evaluation() {
        let d = disc(5, 0);
        let a = PadicNumber::from_i64(7, 5, 12);
        let b = PadicNumber::from_i64(11, 5, 12);
        let ka = kappa(&d, &a).unwrap();
        let kb = kappa(&d, &b).unwrap();
        let kab = kappa(&d, &a.mul(&b)).unwrap();
        assert!(kab.eq_elem(&ka.mul(&kb)));
        // evaluation at integer weight k sends kappa(t) to t^k
        for k in [0i64, 4, 8] {
            let ev = ka.eval_at_integer(k).unwrap();
            let expect = a.pow(k as u64);
            assert_close(&ev, &expect, 6, 5, &format!("kappa eval k={k}"));
        }
    }

    #[test]
    fn kappa_series_consistency() {
        // kappa_U(1 + p*z) as a z-series, evaluated at z0 in pZ_p (where the
        // z-tail decays), must match kappa of the scalar 1 + p*z0
        let d = disc(5, 0);
        let p5 = PadicNumber::from_i64(5, 5, 12);
        let s = kappa_one_plus_cz(&d, &p5, 8).unwrap();
        for t in [1i64, 2, 3] {
            let z0 = 5 * t;
            let mut acc = IwasawaElement::zero(&d);
            let mut zp = PadicNumber::one(5, 14);
            let z0p = PadicNumber::from_i64(z0, 5, 14);
            for i in 0..8 {
                acc = acc.add(&IwasawaElement {
                    disc: d.clone(),
                    ser: s.coeff(i).ser.scalar_mul(&zp),
                });
                zp = zp.mul(&z0p);
            }
            let direct = kappa(&d, &PadicNumber::from_i64(1 + 5 * z0, 5, 14)).unwrap();
            for n in 0..d.trunc {
                assert_close(
                    &acc.ser.coeff(n),
                    &direct.ser.coeff(n),
                    7,
                    5,
                    &format!("kappa series z0={z0}, n={n}"),
                );
            }
        }
    }

    #[test]
    fn nabla_binom_values() {
        let d = disc(5, 4);
        // j = 0 -> 1
        let b0 = nabla_binom(&d, 0).unwrap();
        assert!(b0.eq_elem(&IwasawaElement::one(&d)));
        // evaluation at k = j gives 1, at 0 <= k < j gives 0, binom(8,2) = 28
        let b2 = nabla_binom(&d, 2).unwrap();
        // disc center 4, component p-1=4 | k-4: integers 0,4,8 in U
        let at0 = b2.eval_at_integer(0).unwrap();
        assert!(at0.is_zero(), "binom(nabla,2) vanishes at 0: got {at0}");
        let at4 = b2.eval_at_integer(4).unwrap();
        assert_close(&at4, &PadicNumber::from_i64(6, 5, 10), 5, 4, "binom(4,2)");
        let at8 = b2.eval_at_integer(8).unwrap();
        assert_close(&at8, &PadicNumber::from_i64(28, 5, 10), 2, 1, "binom(8,2)");
        // invertibility flag: 0 lies in U, so binom(nabla, j) is not invertible
        assert!(!nabla_binom_invertible(&d, 2));
        // a disc whose component misses 0..j-1 entirely: center 1 mod 4
        let d1 = disc(5, 1);
        assert!(nabla_binom_invertible(&d1, 1));
        assert!(!nabla_binom_invertible(&d1, 2)); // 1 lies in U
    }

    #[test]
    fn nabla_composition_identity() {
        // binom(nabla - j, h - j) binom(nabla, j) = binom(h, j) binom(nabla, h)
        // as Lambda_U[1/p] identities in the truncation box
        let d = disc(5, 0);
        for (h, j) in [(3u64, 2i64), (4, 1), (2, 2)] {
            let lhs = nabla_binom_shifted(&d, h - j as u64, j)
                .unwrap()
                .mul(&nabla_binom(&d, j as u64).unwrap());
            let hj = binom_i64(h as i64, j);
            let rhs = nabla_binom(&d, h).unwrap();
            let rhs = IwasawaElement {
                disc: d.clone(),
                ser: rhs.ser.scalar_mul(&PadicNumber::from_i64(hj, 5, 12)),
            };
            for n in 0..d.trunc {
                assert_close(
                    &lhs.ser.coeff(n),
                    &rhs.ser.coeff(n),
                    5,
                    3,
                    &format!("composition h={h} j={j} n={n}"),
                );
            }
        }
    }

    fn binom_i64(n: i64, k: i64) -> i64 {
        let mut acc = 1i64;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn divide_by_nabla_examples() {
        let d = disc(5, 0);
        // x = binom(nabla, j) -> 1
        let b3 = nabla_binom(&d, 3).unwrap();
        let q = divide_by_nabla_binom(&b3, 3, &d).unwrap();
        let one = IwasawaElement::one(&d);
        for n in 0..d.trunc - 3 {
            assert_close(&q.ser.coeff(n), &one.ser.coeff(n), 5, 3, &format!("self-division n={n}"));
        }
        // x = 0 -> 0
        let z = divide_by_nabla_binom(&IwasawaElement::zero(&d), 2, &d).unwrap();
        assert!(z.is_zero());
        // x = nabla * y with j = 1, U containing 0 -> y (multiply-back oracle)
        let y = IwasawaElement::from_coeffs(
            &d,
            vec![
                PadicNumber::from_i64(3, 5, 10),
                PadicNumber::from_i64(7, 5, 10),
                PadicNumber::from_i64(-2, 5, 10),
            ],
        );
        let x = nabla(&d).mul(&y);
        let q = divide_by_nabla_binom(&x, 1, &d).unwrap();
        let back = nabla_binom(&d, 1).unwrap().mul(&q);
        for n in 0..d.trunc - 1 {
            assert_close(&back.ser.coeff(n), &x.ser.coeff(n), 5, 3, &format!("multiply-back n={n}"));
        }
        // divisibility precondition failure names the offending weight
        let bad = IwasawaElement::one(&d);
        match divide_by_nabla_binom(&bad, 1, &d) {
            Err(CoreError::NablaDivisibility(0)) => {}
            other => panic!("expected divisibility error at weight 0, got {other:?}"),
        }
    }
}
