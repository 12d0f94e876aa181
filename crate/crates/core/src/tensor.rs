//! The tensor machinery on H = Z_p^2: divided-power symmetric tensors
//! TSym^k, the maps beta* and delta* between distributions and their
//! TSym-twists, the total-moment maps mom^k, and their composition laws.
//!
//! delta* is represented weakly, by its pairings against monomials up to a
//! caller-supplied degree bound; every downstream identity is a pairing
//! statement, so nothing more is ever needed.

use crate::error::{CoreError, Result};
use crate::ring::Ring;

/// An element of TSym^k H in the divided-power basis x^[s] y^[k-s];
/// coeffs[s] multiplies x^[s] y^[k-s].
#[derive(Debug, Clone)]
pub struct TSymVector<R: Ring> {
    pub degree: usize,
    pub coeffs: Vec<R>,
}

impl<R: Ring> TSymVector<R> {
    pub fn zero(degree: usize, like: &R) -> Self {
        TSymVector { degree, coeffs: vec![like.zero_like(); degree + 1] }
    }

    /// The divided power h^[k] of a point h = (h1, h2):
    /// sum_{s+t=k} h1^s h2^t x^[s] y^[t].
    pub fn divided_power(h: (i64, i64), k: usize, like: &R) -> Self {
        let h1 = like.from_i64_like(h.0);
        let h2 = like.from_i64_like(h.1);
        let mut pow1 = vec![like.one_like()];
        let mut pow2 = vec![like.one_like()];
        for _ in 0..k {
            pow1.push(pow1.last().unwrap().mul(&h1));
            pow2.push(pow2.last().unwrap().mul(&h2));
        }
        let coeffs = (0..=k).map(|s| pow1[s].mul(&pow2[k - s])).collect();
        TSymVector { degree: k, coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        TSymVector {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scalar_mul(&self, c: &R) -> Self {
        TSymVector {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Symmetrized (divided-power) product:
    /// x^[s] y^[t] * x^[s'] y^[t'] = binom(s+s', s) binom(t+t', t) x^[s+s'] y^[t+t'].
    pub fn sym_mul(&self, other: &Self) -> Self {
        let like = &self.coeffs[0];
        let deg = self.degree + other.degree;
        let mut out = TSymVector::zero(deg, like);
        for (s, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let t = self.degree - s;
            for (s2, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t2 = other.degree - s2;
                let c1 = crate::dist::integer_binom((s + s2) as i64, s as u64, like);
                let c2 = crate::dist::integer_binom((t + t2) as i64, t as u64, like);
                let term = a.mul(b).mul(&c1).mul(&c2);
                out.coeffs[s + s2] = out.coeffs[s + s2].add(&term);
            }
        }
        out
    }

    /// Dual pairing with the monomial x^a y^b (a + b = degree):
    /// reads off the coefficient of x^[a] y^[b].
    pub fn pair_monomial(&self, a: usize, b: usize) -> R {
        assert_eq!(a + b, self.degree, "pairing requires matching degree");
        self.coeffs[a].clone()
    }

    /// The right action of an integral 2x2 matrix g on TSym^k, induced by
    /// h -> h g on points: e1^[s] e2^[t] -> (row1 g)^[s] * (row2 g)^[t].
    pub fn act_matrix(&self, g: [[i64; 2]; 2]) -> Self {
        let like = &self.coeffs[0];
        let mut out = TSymVector::zero(self.degree, like);
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = self.degree - s;
            let v1 = TSymVector::divided_power((g[0][0], g[0][1]), s, like);
            let v2 = TSymVector::divided_power((g[1][0], g[1][1]), t, like);
            out = out.add(&v1.sym_mul(&v2).scalar_mul(c));
        }
        out
    }

    pub fn eq_vec(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.eq_elem(b))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Region {
    T0,
    T0Prime,
}

/// One Dirac term [h] with a coefficient, optionally tensored with a
/// TSym-vector.
#[derive(Debug, Clone)]
pub struct Term<R: Ring> {
    pub point: (i64, i64),
    pub coeff: R,
    pub tensor: Option<TSymVector<R>>,
}

/// A finite formal sum of Dirac masses on T0 or T0', optionally tensored.
#[derive(Debug, Clone)]
pub struct SupportedDistribution2D<R: Ring> {
    pub p: u64,
    pub region: Region,
    pub terms: Vec<Term<R>>,
}

fn check_region(p: u64, region: Region, h: (i64, i64)) -> Result<()> {
    let u1 = h.0.rem_euclid(p as i64) != 0;
    let u2 = h.1.rem_euclid(p as i64) != 0;
    match region {
        Region::T0 if u1 => Ok(()),
        Region::T0Prime if !u1 && u2 => Ok(()),
        _ => Err(CoreError::SupportViolation(format!(
            "point ({}, {}) is not in {:?} for p = {p}",
            h.0, h.1, region
        ))),
    }
}

impl<R: Ring> SupportedDistribution2D<R> {
    pub fn new(p: u64, region: Region, atoms: Vec<((i64, i64), R)>) -> Result<Self> {
        for (h, _) in &atoms {
            check_region(p, region, *h)?;
        }
        Ok(SupportedDistribution2D {
            p,
            region,
            terms: atoms
                .into_iter()
                .map(|(point, coeff)| Term { point, coeff, tensor: None })
                .collect(),
        })
    }

    fn witness(&self) -> &R {
        &self.terms.first().expect("nonempty distribution").coeff
    }

    /// beta*_j: on group elements [h] -> [h] (x) h^[j]; combined with an
    /// existing tensor part by the symmetrized product (the beta* . id maps).
    pub fn beta_star(&self, j: usize) -> Self {
        let like = self.witness().clone();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let hj = TSymVector::divided_power(t.point, j, &like);
                let tensor = match &t.tensor {
                    None => hj,
                    Some(v) => hj.sym_mul(v),
                };
                Term { point: t.point, coeff: t.coeff.clone(), tensor: Some(tensor) }
            })
            .collect();
        SupportedDistribution2D { p: self.p, region: self.region, terms }
    }

    /// mom^k: [h] -> h^[k] (tensor parts must be absent; use
    /// `mom_after_delta` for TSym-twisted inputs).
    pub fn mom_map(&self, k: usize) -> TSymVector<R> {
        let like = self.witness();
        let mut acc = TSymVector::zero(k, like);
        for t in &self.terms {
            assert!(t.tensor.is_none(), "mom_map expects untwisted input");
            acc = acc.add(&TSymVector::divided_power(t.point, k, like).scalar_mul(&t.coeff));
        }
        acc
    }

    /// The pairing < self, x^a y^b (x) dual-tensor-component >; when the
    /// distribution carries no tensor this is just sum c h1^a h2^b.
    pub fn pair_poly_monomial(&self, a: usize, b: usize) -> R {
        let like = self.witness();
        let mut acc = like.zero_like();
        for t in &self.terms {
            assert!(t.tensor.is_none());
            acc = acc.add(&t.coeff.mul(&point_monomial(t.point, a, b, like)));
        }
        acc
    }

    /// Conjugate supports (and tensor parts) by a matrix: [h] -> [h g].
    pub fn act_matrix(&self, g: [[i64; 2]; 2]) -> Result<Self> {
        let terms: Result<Vec<Term<R>>> = self
            .terms
            .iter()
            .map(|t| {
                let h = t.point;
                let hg = (h.0 * g[0][0] + h.1 * g[1][0], h.0 * g[0][1] + h.1 * g[1][1]);
                check_region(self.p, self.region, hg)?;
                Ok(Term {
                    point: hg,
                    coeff: t.coeff.clone(),
                    tensor: t.tensor.as_ref().map(|v| v.act_matrix(g)),
                })
            })
            .collect();
        Ok(SupportedDistribution2D { p: self.p, region: self.region, terms: terms? })
    }
}

fn point_monomial<R: Ring>(h: (i64, i64), a: usize, b: usize, like: &R) -> R {
    let h1 = like.from_i64_like(h.0);
    let h2 = like.from_i64_like(h.1);
    let mut acc = like.one_like();
    for _ in 0..a {
        acc = acc.mul(&h1);
    }
    for _ in 0..b {
        acc = acc.mul(&h2);
    }
    acc
}

/// delta*_j of a TSym^j-twisted distribution, represented weakly by its
/// pairings against every monomial of total degree <= bound:
///   < delta*(nu), x^a y^b > = < nu, delta(x^a y^b) >
/// with delta(x^a y^b) = sum_{s+t=j} binom(a,s) binom(b,t)
///   x^{a-s} y^{b-t} (x) x^s y^t.
#[derive(Debug, Clone)]
pub struct WeakDistribution2D<R: Ring> {
    pub bound: usize,
    /// pairings[a][b] for a + b <= bound
    pub pairings: Vec<Vec<R>>,
}

pub fn delta_star<R: Ring>(
    nu: &SupportedDistribution2D<R>,
    j: usize,
    bound: usize,
) -> Result<WeakDistribution2D<R>> {
    let like = nu.witness().clone();
    let mut pairings = vec![vec![like.zero_like(); bound + 1]; bound + 1];
    for a in 0..=bound {
        for b in 0..=(bound - a) {
            let mut acc = like.zero_like();
            for term in &nu.terms {
                let tensor = term.tensor.as_ref().ok_or_else(|| {
                    CoreError::Domain("delta* expects a TSym^j-twisted input".into())
                })?;
                if tensor.degree != j {
                    return Err(CoreError::Domain(format!(
                        "tensor degree {} does not match j = {j}",
                        tensor.degree
                    )));
                }
                for s in 0..=j.min(a) {
                    let t = j - s;
                    if t > b {
                        continue;
                    }
                    let c1 = crate::dist::integer_binom(a as i64, s as u64, &like);
                    let c2 = crate::dist::integer_binom(b as i64, t as u64, &like);
                    let poly = point_monomial(term.point, a - s, b - t, &like);
                    let dual = tensor.pair_monomial(s, t);
                    acc = acc.add(&term.coeff.mul(&c1).mul(&c2).mul(&poly).mul(&dual));
                }
            }
            pairings[a][b] = acc;
        }
    }
    Ok(WeakDistribution2D { bound, pairings })
}

/// mom^k of a weakly-represented distribution: the TSym^k vector whose
/// x^[s] y^[t]-coefficient is the pairing against x^s y^t.
pub fn mom_after_delta<R: Ring>(weak: &WeakDistribution2D<R>, k: usize) -> Result<TSymVector<R>> {
    if k > weak.bound {
        return Err(CoreError::Domain("degree bound exceeded by requested pairing".into()));
    }
    let like = weak.pairings[0][0].clone();
    let mut v = TSymVector::zero(k, &like);
    for s in 0..=k {
        v.coeffs[s] = weak.pairings[s][k - s].clone();
    }
    Ok(v)
}

/// (mom^{k-j} . 1): mom^{k-j} on the group part followed by the symmetrized
/// tensor product with the TSym^j part.
pub fn mom_times_one<R: Ring>(nu: &SupportedDistribution2D<R>, k_minus_j: usize) -> TSymVector<R> {
    let like = nu.witness();
    let j = nu
        .terms
        .first()
        .and_then(|t| t.tensor.as_ref())
        .map(|v| v.degree)
        .expect("twisted input");
    let mut acc = TSymVector::zero(k_minus_j + j, like);
    for t in &nu.terms {
        let hk = TSymVector::divided_power(t.point, k_minus_j, like);
        acc = acc.add(&hk.sym_mul(t.tensor.as_ref().unwrap()).scalar_mul(&t.coeff));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn binom_i(n: i64, k: i64) -> i64 {
        if k < 0 || k > n {
            return 0;
        }
        let mut acc = 1i64;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    }

    #[test]
    fn beta_star_examples() {
        let p = 3;
        let mu = SupportedDistribution2D::new(p, Region::T0, vec![((1, 2), r(1))]).unwrap();
        // j = 0: identity-shaped (tensor = empty product = 1 in TSym^0)
        let b0 = mu.beta_star(0);
        assert!(b0.terms[0].tensor.as_ref().unwrap().coeffs[0] == r(1));
        // [(1,2)], j = 1 -> tensor (1, 2)
        let b1 = mu.beta_star(1);
        let t = b1.terms[0].tensor.as_ref().unwrap();
        assert_eq!((t.coeffs[0].clone(), t.coeffs[1].clone()), (r(2), r(1)));
        // [(1,1)], j = 2 -> x^[2] + x^[1]y^[1] + y^[2] (divided-power oracle)
        let mu = SupportedDistribution2D::new(p, Region::T0, vec![((1, 1), r(1))]).unwrap();
        let b2 = mu.beta_star(2);
        let t = b2.terms[0].tensor.as_ref().unwrap();
        assert!(t.coeffs.iter().all(|c| *c == r(1)));
    }

    #[test]
    fn mom_examples() {
        let p = 3;
        // k = 0 -> total mass
        let mu = SupportedDistribution2D::new(p, Region::T0, vec![((1, 0), r(2)), ((2, 3), r(3))])
            .unwrap();
        assert_eq!(mu.mom_map(0).coeffs[0], r(5));
        // Dirac at (1,0), k = 3 -> x^[3]
        let d = SupportedDistribution2D::new(p, Region::T0, vec![((1, 0), r(1))]).unwrap();
        let m = d.mom_map(3);
        assert_eq!(m.coeffs, vec![r(0), r(0), r(0), r(1)]);
        // Dirac at (1,1), k = 2 -> all-ones
        let d = SupportedDistribution2D::new(p, Region::T0, vec![((1, 1), r(1))]).unwrap();
        assert!(d.mom_map(2).coeffs.iter().all(|c| *c == r(1)));
    }

    #[test]
    fn region_checks_are_strict() {
        let p = 3;
        // T0 needs a unit first coordinate
        assert!(SupportedDistribution2D::new(p, Region::T0, vec![((3, 1), r(1))]).is_err());
        // T0' needs first in pZ_p and second a unit
        assert!(SupportedDistribution2D::new(p, Region::T0Prime, vec![((3, 1), r(1))]).is_ok());
        assert!(SupportedDistribution2D::new(p, Region::T0Prime, vec![((1, 1), r(1))]).is_err());
        assert!(SupportedDistribution2D::new(p, Region::T0Prime, vec![((3, 3), r(1))]).is_err());
    }

    #[test]
    fn delta_beta_is_nabla_binom() {
        // < delta*(beta*(mu)), f > = binom(k, j) < mu, f > for homogeneous
        // degree-k monomials, deterministic random supported distributions
        let p = 3;
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 13) as i64 - 6
        };
        for _ in 0..25 {
            let mut atoms = vec![];
            for _ in 0..3 {
                let mut h1 = next();
                if h1.rem_euclid(3) == 0 {
                    h1 += 1;
                }
                atoms.push(((h1, next()), r(next())));
            }
            let mu = SupportedDistribution2D::new(p, Region::T0, atoms).unwrap();
            for j in 0..=3usize {
                let weak = delta_star(&mu.beta_star(j), j, 6).unwrap();
                for a in 0..=6usize {
                    for b in 0..=(6 - a) {
                        let k = a + b;
                        let lhs = weak.pairings[a][b].clone();
                        let rhs = mu.pair_poly_monomial(a, b) * r(binom_i(k as i64, j as i64));
                        assert_eq!(lhs, rhs, "j={j} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn mom_delta_vanishing_and_shift() {
        // mom^k . delta_j* = 0 for k < j, and = mom^{k-j} . 1 for k >= j
        let p = 3;
        let atoms = vec![((1, 2), r(2)), ((4, -1), r(-3)), ((2, 5), r(1))];
        let mu = SupportedDistribution2D::new(p, Region::T0, atoms).unwrap();
        for j in 0..=4usize {
            let twisted = mu.beta_star(j);
            let weak = delta_star(&twisted, j, 8).unwrap();
            for k in 0..=8usize {
                let lhs = mom_after_delta(&weak, k).unwrap();
                if k < j {
                    assert!(lhs.is_zero(), "mom^{k} after delta_{j}* must vanish");
                } else {
                    let rhs = mom_times_one(&twisted, k - j);
                    assert!(lhs.eq_vec(&rhs), "k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn composite_law() {
        // delta_h* ( (beta_{h-j}* . id) nu ) = binom(k-j, h-j) delta_j* nu,
        // degreewise on pairings of total degree k
        let p = 3;
        let atoms = vec![((1, 1), r(1)), ((2, 3), r(2))];
        let mu = SupportedDistribution2D::new(p, Region::T0, atoms).unwrap();
        for j in 0..=2usize {
            for h in j..=4usize {
                let nu = mu.beta_star(j); // in D (x) TSym^j
                let lifted = nu.beta_star(h - j); // (beta_{h-j}* . id)
                let lhs = delta_star(&lifted, h, 6).unwrap();
                let rhs = delta_star(&nu, j, 6).unwrap();
                for a in 0..=6usize {
                    for b in 0..=(6 - a) {
                        let k = a + b;
                        let scale = r(binom_i(k as i64 - j as i64, h as i64 - j as i64));
                        assert_eq!(
                            lhs.pairings[a][b],
                            rhs.pairings[a][b].clone() * scale,
                            "j={j} h={h} a={a} b={b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn naturality_under_conjugation() {
        // conjugating supports by an invertible integral matrix commutes
        // with beta*, delta*, mom
        let p = 3;
        let g = [[1i64, 1], [0, 1]]; // unipotent keeps T0
        let atoms = vec![((1, 2), r(2)), ((2, 1), r(-1))];
        let mu = SupportedDistribution2D::new(p, Region::T0, atoms).unwrap();
        let j = 2usize;
        let lhs = mu.act_matrix(g).unwrap().beta_star(j);
        let rhs = mu.beta_star(j).act_matrix(g).unwrap();
        // compare mom^k of both for several k
        for k in j..=5 {
            let a = mom_times_one(&lhs, k - j);
            let b = mom_times_one(&rhs, k - j);
            assert!(a.eq_vec(&b), "k={k}");
        }
        // mom^k naturality directly
        for k in 0..=4 {
            let a = mu.act_matrix(g).unwrap().mom_map(k);
            let b = mu.mom_map(k).act_matrix(g);
            assert!(a.eq_vec(&b), "mom naturality k={k}");
        }
    }
}
