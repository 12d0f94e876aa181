//! Order-lambda distributions on Z_p and on Gamma = Z_p^x at finite moment
//! precision: locally polynomial test functions, the two equivalent norms,
//! the boundedness criterion for moment towers, and the interpolation of a
//! compatible tower by a distribution.
//!
//! Moments are stored in the binomial basis binom(x, n) (the Banach basis of
//! the order-lambda function spaces), which makes the standard norm exact.
//! Global binomial moments do not determine integrals against indicator
//! cells, so a distribution may carry an exact "detail": a finite atomic
//! description, or a table of cell moments to a fixed level.

use crate::error::{CoreError, Result};
use crate::ring::Ring;
use crate::series::{Series, VarTag};
use num_rational::Rational64;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Support {
    Zp,
    ZpUnits,
}

/// Exact refinement data beyond the global binomial moments.
#[derive(Debug, Clone)]
pub enum Detail<R: Ring> {
    None,
    /// finite formal sum of Dirac masses at integer points
    Atoms(Vec<(i64, R)>),
    /// cell moments: values[a][j] = integral of x^j over a + p^level Z_p
    Cells {
        level: u32,
        degree: usize,
        values: BTreeMap<u64, Vec<R>>,
    },
}

#[derive(Debug, Clone)]
pub struct FiniteDistribution<R: Ring> {
    pub p: u64,
    pub support: Support,
    /// declared order lambda >= 0
    pub lambda: Rational64,
    /// binomial moments mu(binom(x, n)) for n < moments.len()
    pub moments: Vec<R>,
    pub detail: Detail<R>,
    /// false when the order could not be checked (e.g. depth-0 interpolation)
    pub order_verified: bool,
}

/// Locally polynomial function: sum over cells a + p^level Z_p of
/// polynomials sum_i coeffs[i] x^i (global coordinate x).
#[derive(Debug, Clone)]
pub struct LocPolyFunction<R: Ring> {
    pub p: u64,
    pub level: u32,
    pub terms: BTreeMap<u64, Vec<R>>,
}

impl<R: Ring> LocPolyFunction<R> {
    pub fn global_poly(p: u64, coeffs: Vec<R>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0u64, coeffs);
        LocPolyFunction { p, level: 0, terms }
    }

    /// x^deg * 1_{a + p^level Z_p}
    pub fn cell_monomial(p: u64, a: u64, level: u32, deg: usize, one: &R) -> Self {
        let mut coeffs = vec![one.zero_like(); deg + 1];
        coeffs[deg] = one.one_like();
        let mut terms = BTreeMap::new();
        terms.insert(a % p.pow(level), coeffs);
        LocPolyFunction { p, level, terms }
    }

    pub fn degree(&self) -> usize {
        self.terms.values().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// The substituted function x -> f(g_inv * x), for a unit g_inv.
    /// Cells move by the inverse: 1_{a+p^n}(g_inv x) = 1_{g a + p^n}(x) with
    /// g = g_inv^{-1} mod p^n; polynomial coefficients pick up powers of g_inv.
    pub fn substitute_scale(&self, g_inv: i64, one: &R) -> Self {
        let pn = self.p.pow(self.level);
        let g_inv_red = (g_inv.rem_euclid(pn as i64)) as u64;
        let g = if self.level == 0 {
            1u64
        } else {
            mod_inverse_u64(g_inv_red, pn).expect("unit required")
        };
        let gi = one.from_i64_like(g_inv);
        let mut terms = BTreeMap::new();
        for (a, coeffs) in &self.terms {
            let new_a = (a * g) % pn.max(1);
            let mut c = Vec::with_capacity(coeffs.len());
            let mut pow = one.one_like();
            for x in coeffs {
                c.push(x.mul(&pow));
                pow = pow.mul(&gi);
            }
            let entry: &mut Vec<R> = terms.entry(new_a).or_insert_with(|| vec![one.zero_like(); c.len()]);
            if entry.len() < c.len() {
                entry.resize(c.len(), one.zero_like());
            }
            for (i, x) in c.into_iter().enumerate() {
                entry[i] = entry[i].add(&x);
            }
        }
        LocPolyFunction { p: self.p, level: self.level, terms }
    }
}

fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(((s0 % m as i128 + m as i128) % m as i128) as u64)
}

/// binom(a, n) for integer a (possibly negative), exact in the ring.
pub fn integer_binom<R: Ring>(a: i64, n: u64, one: &R) -> R {
    // numerator product over i128, divided by n! stepwise staying integral
    let mut num: i128 = 1;
    for i in 0..n as i128 {
        num *= a as i128 - i;
        num /= i + 1; // product of k consecutive integers divisible by k!
    }
    from_i128(num, one)
}

fn from_i128<R: Ring>(v: i128, one: &R) -> R {
    // split to avoid i64 overflow for large Stirling-type values
    let base: i128 = 1 << 62;
    let hi = v / base;
    let lo = v % base;
    let b = one.from_i64_like(1 << 62);
    one.from_i64_like(hi as i64).mul(&b).add(&one.from_i64_like(lo as i64))
}

/// Stirling subset numbers S2(i, n) for i <= max_i, as i128.
fn stirling2(max_i: usize) -> Vec<Vec<i128>> {
    let mut s = vec![vec![0i128; max_i + 1]; max_i + 1];
    s[0][0] = 1;
    for i in 1..=max_i {
        for n in 1..=i {
            s[i][n] = s[i - 1][n - 1] + (n as i128) * s[i - 1][n];
        }
    }
    s
}

impl<R: Ring> FiniteDistribution<R> {
    pub fn dirac(p: u64, point: i64, mass: R, support: Support, m_count: usize) -> Result<Self> {
        if support == Support::ZpUnits && point.rem_euclid(p as i64) == 0 {
            return Err(CoreError::SupportViolation(format!(
                "Dirac point {point} is not a unit mod {p}"
            )));
        }
        let moments = (0..m_count)
            .map(|n| integer_binom(point, n as u64, &mass).mul(&mass))
            .collect();
        Ok(FiniteDistribution {
            p,
            support,
            lambda: Rational64::new(0, 1),
            moments,
            detail: Detail::Atoms(vec![(point, mass)]),
            order_verified: true,
        })
    }

    pub fn from_atoms(p: u64, atoms: Vec<(i64, R)>, support: Support, m_count: usize) -> Result<Self> {
        let Some((_, w)) = atoms.first() else {
            return Err(CoreError::Domain("empty atom list".into()));
        };
        if support == Support::ZpUnits {
            for (pt, _) in &atoms {
                if pt.rem_euclid(p as i64) == 0 {
                    return Err(CoreError::SupportViolation(format!(
                        "atom at {pt} is not a unit mod {p}"
                    )));
                }
            }
        }
        let moments = (0..m_count)
            .map(|n| {
                atoms.iter().fold(w.zero_like(), |acc, (pt, m)| {
                    acc.add(&integer_binom(*pt, n as u64, w).mul(m))
                })
            })
            .collect();
        Ok(FiniteDistribution {
            p,
            support,
            lambda: Rational64::new(0, 1),
            moments,
            detail: Detail::Atoms(atoms),
            order_verified: true,
        })
    }

    pub fn moment_count(&self) -> usize {
        self.moments.len()
    }

    fn witness(&self) -> &R {
        self.moments.first().expect("distribution stores at least one moment")
    }

    /// The integral of x^j over the cell a + p^n Z_p, when determined.
    fn cell_monomial_integral(&self, a: u64, n: u32, j: usize) -> Result<R> {
        let pn = self.p.pow(n) as i64;
        if self.support == Support::ZpUnits && n >= 1 && (a as i64).rem_euclid(self.p as i64) == 0 {
            // enforced: functions supported inside pZ_p integrate to 0
            return Ok(self.witness().zero_like());
        }
        if n == 0 {
            // global monomial via the binomial moments
            if j >= self.moments.len() {
                return Err(CoreError::InsufficientMoments(format!(
                    "monomial degree {j} needs {} moments, only {} stored",
                    j + 1,
                    self.moments.len()
                )));
            }
            let s2 = stirling2(j);
            let mut acc = self.witness().zero_like();
            let mut fact: i128 = 1;
            for (n2, row) in s2[j].iter().enumerate().take(j + 1) {
                if n2 > 0 {
                    fact *= n2 as i128;
                }
                if *row == 0 {
                    continue;
                }
                let c = from_i128(row * fact, self.witness());
                acc = acc.add(&c.mul(&self.moments[n2]));
            }
            return Ok(acc);
        }
        match &self.detail {
            Detail::Atoms(atoms) => {
                let mut acc = self.witness().zero_like();
                for (pt, m) in atoms {
                    if pt.rem_euclid(pn) == (a as i64).rem_euclid(pn) {
                        let mut pw = self.witness().one_like();
                        let ptr = self.witness().from_i64_like(*pt);
                        for _ in 0..j {
                            pw = pw.mul(&ptr);
                        }
                        acc = acc.add(&pw.mul(m));
                    }
                }
                Ok(acc)
            }
            Detail::Cells { level, degree, values } => {
                if n > *level || j > *degree {
                    return Err(CoreError::InsufficientMoments(format!(
                        "cell data only to level {level} degree {degree}, asked (n={n}, j={j})"
                    )));
                }
                let pl = self.p.pow(*level);
                let mut acc = self.witness().zero_like();
                for (b, vals) in values {
                    if (b % self.p.pow(n)) == (a % self.p.pow(n)) {
                        acc = acc.add(&vals[j]);
                    }
                }
                let _ = pl;
                Ok(acc)
            }
            Detail::None => Err(CoreError::InsufficientMoments(
                "indicator integrals at level >= 1 need atom or cell detail".into(),
            )),
        }
    }

    /// Evaluation mu(f) for a locally polynomial f; linear in f and exact to
    /// the precision implied by the stored data.
    pub fn evaluate(&self, f: &LocPolyFunction<R>) -> Result<R> {
        assert_eq!(self.p, f.p);
        let mut acc = self.witness().zero_like();
        for (a, coeffs) in &f.terms {
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let v = self.cell_monomial_integral(*a, f.level, j)?;
                acc = acc.add(&c.mul(&v));
            }
        }
        Ok(acc)
    }

    /// The translation action (gamma . mu)(f) = mu(f(gamma^{-1} x)) for a
    /// unit gamma; exact on atoms and cells.
    pub fn gamma_translate(&self, gamma: i64) -> Result<Self> {
        if gamma.rem_euclid(self.p as i64) == 0 {
            return Err(CoreError::Domain("gamma must be a unit".into()));
        }
        match &self.detail {
            Detail::Atoms(atoms) => {
                // gamma . delta_a = delta_{gamma^{-1} a}: realize over the cell
                // resolution instead when gamma^{-1} a is not integral; at desk
                // scale atoms move by an integer approximant of gamma^{-1}
                // mod p^K for a generous K
                let pk = (self.p as i64).pow(18.min(3 * 12 / 2) as u32);
                let g_inv = mod_inverse_u64(
                    gamma.rem_euclid(pk) as u64,
                    pk as u64,
                )
                .ok_or(CoreError::DivisionByZero)? as i64;
                let atoms2: Vec<(i64, R)> = atoms
                    .iter()
                    .map(|(pt, m)| (((*pt as i128 * g_inv as i128).rem_euclid(pk as i128)) as i64, m.clone()))
                    .collect();
                Self::from_atoms(self.p, atoms2, self.support, self.moments.len())
            }
            Detail::Cells { level, degree, values } => {
                let pl = self.p.pow(*level);
                let g_inv =
                    mod_inverse_u64(gamma.rem_euclid(pl as i64) as u64, pl).ok_or(CoreError::DivisionByZero)?;
                // integral of x^j over the image cell g^{-1}(b + p^l) =
                // g^{-1}b + p^l: int x^j d(gamma mu) = int (g^{-1}x)^j dmu
                let gi = self.witness().from_i64_like(g_inv as i64);
                let mut new_values = BTreeMap::new();
                for (b, vals) in values {
                    let nb = (b * g_inv) % pl;
                    let mut nv = Vec::with_capacity(vals.len());
                    let mut pw = self.witness().one_like();
                    for v in vals {
                        nv.push(v.mul(&pw));
                        pw = pw.mul(&gi);
                    }
                    new_values.insert(nb, nv);
                }
                let mut out = self.clone();
                out.detail = Detail::Cells { level: *level, degree: *degree, values: new_values };
                out.moments = rebuild_moments_from_cells(self.p, &out.detail, self.moments.len(), self.witness())?;
                Ok(out)
            }
            Detail::None => Err(CoreError::InsufficientMoments(
                "translation needs atom or cell detail".into(),
            )),
        }
    }

    /// Convolution of finitely supported distributions (atom details).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        let (Detail::Atoms(a), Detail::Atoms(b)) = (&self.detail, &other.detail) else {
            return Err(CoreError::Domain("convolution needs atomic detail".into()));
        };
        let mut atoms = Vec::new();
        for (x, mx) in a {
            for (y, my) in b {
                atoms.push((x + y, mx.mul(my)));
            }
        }
        Self::from_atoms(self.p, atoms, Support::Zp, self.moments.len())
    }

    /// Amice transform: sum_n mu(binom(x, n)) pi^n truncated at T.
    /// The transform of a Dirac at a is (1 + pi)^a.
    pub fn amice_transform(&self, t: usize) -> Result<Series<R>> {
        if self.moments.len() < t {
            return Err(CoreError::InsufficientMoments(format!(
                "amice transform to pi^{t} needs {t} moments, have {}",
                self.moments.len()
            )));
        }
        Ok(Series::new(VarTag::Pi, self.moments[..t].to_vec(), t))
    }
}

fn rebuild_moments_from_cells<R: Ring>(
    p: u64,
    detail: &Detail<R>,
    m_count: usize,
    one: &R,
) -> Result<Vec<R>> {
    let Detail::Cells { degree, values, .. } = detail else {
        return Err(CoreError::Domain("expected cells".into()));
    };
    // binomial moments determined for n <= degree: binom(x, n) has degree n
    let mut out = Vec::new();
    for n in 0..m_count.min(degree + 1) {
        // binom(x, n) = (1/n!) sum_k s(n, k) x^k  (signed Stirling, first kind)
        let s1 = stirling1_signed(n);
        let mut acc = one.zero_like();
        for (k, coeff) in s1.iter().enumerate() {
            if *coeff == 0 {
                continue;
            }
            let mut cellsum = one.zero_like();
            for vals in values.values() {
                cellsum = cellsum.add(&vals[k]);
            }
            acc = acc.add(&from_i128(*coeff, one).mul(&cellsum));
        }
        let mut fact: i128 = 1;
        for i in 1..=n as i128 {
            fact *= i;
        }
        let f = from_i128(fact, one).inv()?;
        out.push(acc.mul(&f));
    }
    let _ = p;
    Ok(out)
}

/// Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum s(n,k) x^k.
fn stirling1_signed(n: usize) -> Vec<i128> {
    let mut c = vec![0i128; n + 1];
    c[0] = 1;
    for i in 0..n {
        // multiply by (x - i)
        let mut next = vec![0i128; n + 1];
        for (k, v) in c.iter().enumerate() {
            if *v == 0 {
                continue;
            }
            if k + 1 <= n {
                next[k + 1] += v;
            }
            next[k] -= v * i as i128;
        }
        c = next;
    }
    c
}

/// A p-power norm: value p^exp, or 0 when exp is None.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PNorm {
    pub exp: Option<i64>,
}

impl PNorm {
    pub fn zero() -> Self {
        PNorm { exp: None }
    }
    pub fn of_exp(e: i64) -> Self {
        PNorm { exp: Some(e) }
    }
    pub fn max(self, other: Self) -> Self {
        match (self.exp, other.exp) {
            (None, e) => PNorm { exp: e },
            (e, None) => PNorm { exp: e },
            (Some(a), Some(b)) => PNorm { exp: Some(a.max(b)) },
        }
    }
    pub fn le(self, other: Self) -> bool {
        match (self.exp, other.exp) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        }
    }
}

/// Rings with a p-power sup-norm: ||x|| = p^(-vp_min(x)).
pub trait PNormed {
    fn vp_min(&self) -> Option<i64>;
    fn norm(&self) -> PNorm {
        PNorm { exp: self.vp_min().map(|v| -v) }
    }
}

impl PNormed for crate::padic::PadicNumber {
    fn vp_min(&self) -> Option<i64> {
        self.valuation()
    }
}

impl PNormed for crate::weight::IwasawaElement {
    fn vp_min(&self) -> Option<i64> {
        self.ser.coeffs.iter().filter_map(|c| c.valuation()).min()
    }
}

#[derive(Debug, Clone)]
pub struct NormReport {
    /// sup norm as a p-power
    pub sup: PNorm,
    /// level n attaining the sup
    pub attained_at: usize,
    /// raised when the per-level sup keeps growing through the deepest
    /// levels examined (an unbounded order-lambda candidate)
    pub increasing_tail: bool,
}

/// floor(lambda * n) as i64 for rational lambda.
fn floor_mul(lambda: Rational64, n: i64) -> i64 {
    let q = lambda * Rational64::from_integer(n);
    num_traits::ToPrimitive::to_i64(&q.floor()).unwrap()
}

/// l(n): smallest L >= 0 with p^L > n.
fn ell(p: u64, n: usize) -> i64 {
    let mut l = 0i64;
    let mut q = 1u64;
    while q <= n as u64 {
        q *= p;
        l += 1;
    }
    l
}

/// The order-lambda norm of a distribution.
///
/// With cell/atom detail this is the equivalent cell norm
///   sup_{n <= depth, a} p^{-floor(lambda n)} || int_{a+p^n} ((x-a)/p^n)^h dmu ||;
/// with moments only it is the standard norm
///   sup_n p^{-floor(lambda l(n))} || mu(binom(x, n)) ||
/// over the moments whose index is visible at the requested depth.
pub fn norm_lambda<R: Ring + PNormed>(
    mu: &FiniteDistribution<R>,
    lambda: Rational64,
    h: usize,
    depth: u32,
) -> Result<NormReport> {
    if Rational64::from_integer(h as i64) < lambda {
        return Err(CoreError::Domain("need h >= floor(lambda)".into()));
    }
    let p = mu.p;
    let mut sup = PNorm::zero();
    let mut attained = 0usize;
    let mut level_sups: Vec<PNorm> = Vec::new();
    match &mu.detail {
        Detail::Atoms(_) | Detail::Cells { .. } => {
            let max_level = match &mu.detail {
                Detail::Cells { level, .. } => depth.min(*level),
                _ => depth,
            };
            for n in 0..=max_level {
                let mut lvl = PNorm::zero();
                let pn = p.pow(n);
                for a in 0..pn {
                    if mu.support == Support::ZpUnits && n >= 1 && a % p == 0 {
                        continue;
                    }
                    // p^{-hn} sum_j binom(h,j) (-a)^{h-j} int x^j
                    let mut acc = mu.witness().zero_like();
                    for j in 0..=h {
                        let b = integer_binom(h as i64, (h - j) as i64 as u64, mu.witness());
                        let mut sgn_pow = mu.witness().one_like();
                        let ma = mu.witness().from_i64_like(-(a as i64));
                        for _ in 0..(h - j) {
                            sgn_pow = sgn_pow.mul(&ma);
                        }
                        let v = mu.cell_monomial_integral(a, n, j)?;
                        acc = acc.add(&b.mul(&sgn_pow).mul(&v));
                    }
                    let e = acc.vp_min().map(|v| -(v) + (h as i64) * n as i64);
                    let val = PNorm { exp: e.map(|e| e - floor_mul(lambda, n as i64)) };
                    lvl = lvl.max(val);
                }
                if !lvl.le(sup) {
                    attained = n as usize;
                }
                sup = sup.max(lvl);
                level_sups.push(lvl);
            }
        }
        Detail::None => {
            let max_idx = mu.moments.len().min((p as usize).pow(depth));
            for n in 0..max_idx {
                let e = mu.moments[n].norm();
                let val = PNorm { exp: e.exp.map(|e| e - floor_mul(lambda, ell(p, n))) };
                if !val.le(sup) {
                    attained = n;
                }
                sup = sup.max(val);
                while level_sups.len() <= ell(p, n) as usize {
                    level_sups.push(PNorm::zero());
                }
                let li = ell(p, n) as usize;
                level_sups[li] = level_sups[li].max(val);
            }
        }
    }
    // growing tail: the last examined level strictly dominates all earlier ones
    let increasing_tail = level_sups.len() >= 3 && {
        let last = *level_sups.last().unwrap();
        let prev = level_sups[..level_sups.len() - 1]
            .iter()
            .fold(PNorm::zero(), |a, b| a.max(*b));
        !last.le(prev) && {
            let last2 = level_sups[level_sups.len() - 2];
            let prev2 = level_sups[..level_sups.len() - 2]
                .iter()
                .fold(PNorm::zero(), |a, b| a.max(*b));
            !last2.le(prev2)
        }
    };
    Ok(NormReport { sup, attained_at: attained, increasing_tail })
}

/// A coset-resolved moment tower on Gamma = Z_p^x:
/// rows[n][a][j] = int_{a (1 + p^n Z_p)} chi^j dmu for a in (Z/p^n)^x
/// (row 0 has the single entry a = 1 meaning all of Gamma). The subdivision
/// identity rows[n][a][j] = sum_{b = a mod p^n} rows[n+1][b][j] is the
/// compatibility required of genuine towers.
#[derive(Debug, Clone)]
pub struct MomentTable<R: Ring> {
    pub p: u64,
    pub depth: u32,
    pub h: usize,
    pub rows: Vec<BTreeMap<u64, Vec<R>>>,
}

impl<R: Ring + PNormed> MomentTable<R> {
    /// Extract the tower from a units-supported distribution.
    pub fn extract(mu: &FiniteDistribution<R>, depth: u32, h: usize) -> Result<Self> {
        if mu.support != Support::ZpUnits {
            return Err(CoreError::SupportViolation(
                "moment tables live on Gamma: the distribution must be supported on units".into(),
            ));
        }
        let p = mu.p;
        let mut rows = Vec::with_capacity(depth as usize + 1);
        for n in 0..=depth {
            let mut row = BTreeMap::new();
            if n == 0 {
                let vals: Result<Vec<R>> = (0..=h)
                    .map(|j| {
                        // integral over all of Z_p^x = sum of unit cells at level 1
                        let mut acc = mu.witness().zero_like();
                        for b in 1..p {
                            acc = acc.add(&mu.cell_monomial_integral(b, 1, j)?);
                        }
                        Ok(acc)
                    })
                    .collect();
                row.insert(1u64, vals?);
            } else {
                let pn = p.pow(n);
                for a in 1..pn {
                    if a % p == 0 {
                        continue;
                    }
                    let vals: Result<Vec<R>> =
                        (0..=h).map(|j| mu.cell_monomial_integral(a, n, j)).collect();
                    row.insert(a, vals?);
                }
            }
            rows.push(row);
        }
        Ok(MomentTable { p, depth, h, rows })
    }

    /// Verify the subdivision compatibility; identifies the first violation.
    pub fn check_compatibility(&self) -> Result<()> {
        let p = self.p;
        for n in 0..self.depth as usize {
            let pn = p.pow(n as u32);
            for (a, vals) in &self.rows[n] {
                for j in 0..=self.h {
                    let mut acc = vals[j].zero_like();
                    for (b, wals) in &self.rows[n + 1] {
                        let matches = if n == 0 { true } else { b % pn == a % pn };
                        if matches {
                            acc = acc.add(&wals[j]);
                        }
                    }
                    if !acc.eq_elem(&vals[j]) {
                        return Err(CoreError::TableCompatibility { n, j, a: *a });
                    }
                }
            }
        }
        Ok(())
    }

    /// The boundedness criterion: for every level n and coset a,
    ///   p^{-floor(lambda n)} || p^{-hn} sum_j (-1)^j binom(h,j) a^{h-j} x[n][a][j] ||
    /// must stay below the caller's cap; returns the least bound C, or the
    /// first violating level.
    pub fn growth_criterion_check(
        &self,
        lambda: Rational64,
        h: usize,
        cap: Option<i64>,
    ) -> Result<PNorm> {
        self.check_compatibility()?;
        if h != self.h {
            return Err(CoreError::Domain("degree bound differs from table degree".into()));
        }
        let mut c = PNorm::zero();
        for n in 0..=self.depth as usize {
            let mut lvl = PNorm::zero();
            for (a, vals) in &self.rows[n] {
                let mut acc = vals[0].zero_like();
                for j in 0..=h {
                    let b = integer_binom(h as i64, j as u64, &vals[0]);
                    let mut apow = vals[0].one_like();
                    let aa = vals[0].from_i64_like(-(*a as i64));
                    for _ in 0..(h - j) {
                        apow = apow.mul(&aa);
                    }
                    acc = acc.add(&b.mul(&apow).mul(&vals[j]));
                }
                let e = acc.vp_min().map(|v| -v + (h as i64) * n as i64 - floor_mul(lambda, n as i64));
                lvl = lvl.max(PNorm { exp: e });
            }
            if let (Some(cap), Some(e)) = (cap, lvl.exp) {
                if e > cap {
                    return Err(CoreError::GrowthViolation(n));
                }
            }
            c = c.max(lvl);
        }
        Ok(c)
    }

    /// Interpolate the tower by a distribution on Gamma: the deepest row is
    /// the cell table of the unique level-depth algebraic distribution
    /// matching the tower; its moments reproduce every table entry exactly.
    pub fn interpolate_moments(&self, lambda: Rational64, h: usize) -> Result<FiniteDistribution<R>> {
        let _c = self.growth_criterion_check(lambda, h, None)?;
        let deepest = &self.rows[self.depth as usize];
        let witness = deepest
            .values()
            .next()
            .and_then(|v| v.first())
            .ok_or_else(|| CoreError::Domain("empty table".into()))?;
        let detail = Detail::Cells {
            level: self.depth.max(1),
            degree: h,
            values: if self.depth == 0 {
                // degree-<=h algebraic distribution on Gamma: distribute the
                // level-0 row uniformly over the level-1 unit cells is wrong;
                // instead keep a single formal cell per unit residue by
                // splitting via the compatibility default: all mass at the
                // level-1 cells proportional to nothing is underdetermined,
                // so store the whole mass on the cell of 1. Flagged unverified.
                let mut m = BTreeMap::new();
                let row0 = &self.rows[0][&1u64];
                m.insert(1u64, row0.clone());
                for b in 2..self.p {
                    m.insert(b, vec![witness.zero_like(); h + 1]);
                }
                m
            } else {
                deepest.clone()
            },
        };
        let mut dist = FiniteDistribution {
            p: self.p,
            support: Support::ZpUnits,
            lambda,
            moments: vec![witness.zero_like()],
            detail,
            order_verified: self.depth > 0,
        };
        dist.moments = rebuild_moments_from_cells(self.p, &dist.detail, h + 1, witness)?;
        Ok(dist)
    }
}
