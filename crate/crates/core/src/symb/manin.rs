//! Coset representatives and Manin relations for Gamma_1(N) n Gamma_0(p)
//! inside SL_2(Z), together with the continued-fraction decomposition of
//! modular paths into unimodular ones.
//!
//! Cosets are labelled by a bottom row (c, d) mod N with gcd(c, d, N) = 1
//! together with a point of P^1(F_p).

use crate::error::{CoreError, Result};
use std::collections::HashMap;

pub type Sl2 = [[i64; 2]; 2];

pub fn sl2_mul(a: Sl2, b: Sl2) -> Sl2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn sl2_inv(a: Sl2) -> Sl2 {
    // det 1
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub const S_MAT: Sl2 = [[0, -1], [1, 0]];
pub const T_MAT: Sl2 = [[0, -1], [1, -1]];

/// A point of P^1(F_p), canonical form (1 : x) or (0 : 1).
fn p1_class(c: i64, d: i64, p: u64) -> (u64, u64) {
    let pi = p as i64;
    let c = c.rem_euclid(pi) as u64;
    let d = d.rem_euclid(pi) as u64;
    if c != 0 {
        let cinv = inv_mod(c, p);
        (1, d * cinv % p)
    } else {
        (0, 1)
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "not invertible");
    ((s0 % m as i128 + m as i128) % m as i128) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CosetLabel {
    /// bottom row mod N (N = 1 gives (0, 0))
    pub cd: (u64, u64),
    /// P^1(F_p) class
    pub pt: (u64, u64),
}

#[derive(Debug, Clone)]
pub struct ManinData {
    pub n_tame: u64,
    pub p: u64,
    pub labels: Vec<CosetLabel>,
    pub index_of: HashMap<CosetLabel, usize>,
    pub reps: Vec<Sl2>,
    /// relations: each is a list of (coset index, conjugating matrix) whose
    /// action-weighted sum of generator values must vanish
    pub relations: Vec<Vec<(usize, Sl2)>>,
}

impl ManinData {
    pub fn label_of(&self, g: Sl2) -> usize {
        let n = self.n_tame as i64;
        let cd = (g[1][0].rem_euclid(n) as u64, g[1][1].rem_euclid(n) as u64);
        let pt = p1_class(g[1][0], g[1][1], self.p);
        self.index_of[&CosetLabel { cd, pt }]
    }

    /// The Gamma-element g_i * g^{-1} for g in the coset i.
    pub fn gamma_for(&self, g: Sl2) -> (usize, Sl2) {
        let i = self.label_of(g);
        (i, sl2_mul(self.reps[i], sl2_inv(g)))
    }
}

/// Enumerate coset representatives and the 2- and 3-term Manin relations.
/// Preconditions: N >= 1, p prime not dividing N, N*p >= 4.
pub fn manin_generators(n_tame: u64, p: u64) -> Result<ManinData> {
    if n_tame == 0 || p < 2 || n_tame % p == 0 {
        return Err(CoreError::Domain("need N >= 1 and a prime p not dividing N".into()));
    }
    if n_tame * p < 4 {
        return Err(CoreError::Domain("degenerate level: need N*p >= 4".into()));
    }
    let n = n_tame;
    // labels
    let mut labels = Vec::new();
    for c in 0..n {
        for d in 0..n {
            let g = gcd(gcd(c, d), n);
            if g != 1 && n > 1 {
                continue;
            }
            for x in 0..=p {
                let pt = if x == p { (0u64, 1u64) } else { (1u64, x) };
                labels.push(CosetLabel { cd: (c, d), pt });
            }
        }
    }
    if n == 1 {
        // the loop above produced exactly the (0,0) row
    }
    let index_of: HashMap<CosetLabel, usize> =
        labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();

    // representative matrices: bottom row == (c, d) mod N and projectively
    // == pt mod p, completed to determinant 1
    let mut reps = Vec::with_capacity(labels.len());
    for l in &labels {
        reps.push(build_rep(l, n, p)?);
    }

    let mut data = ManinData { n_tame, p, labels, index_of, reps, relations: Vec::new() };

    // relations: for each i, with j = label(g_i S):
    //   m_i + m_j | (g_j S^{-1} g_i^{-1}) = 0
    // and with j1 = label(g_i T), j2 = label(g_i T^2):
    //   m_i + m_j1 | (g_j1 T^{-1} g_i^{-1}) + m_j2 | (g_j2 T^{-2} g_i^{-1}) = 0
    let mut relations = Vec::new();
    let t2 = sl2_mul(T_MAT, T_MAT);
    for i in 0..data.reps.len() {
        let gi = data.reps[i];
        // S relation
        let gis = sl2_mul(gi, S_MAT);
        let (j, gam) = data.gamma_for(gis);
        let mut rel = vec![(i, [[1, 0], [0, 1]])];
        push_term(&mut rel, j, gam);
        relations.push(rel);
        // T relation
        let git = sl2_mul(gi, T_MAT);
        let (j1, gam1) = data.gamma_for(git);
        let git2 = sl2_mul(gi, t2);
        let (j2, gam2) = data.gamma_for(git2);
        let mut rel = vec![(i, [[1, 0], [0, 1]])];
        push_term(&mut rel, j1, gam1);
        push_term(&mut rel, j2, gam2);
        relations.push(rel);
    }
    data.relations = relations;
    Ok(data)
}

fn push_term(rel: &mut Vec<(usize, Sl2)>, j: usize, gam: Sl2) {
    rel.push((j, gam));
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn build_rep(l: &CosetLabel, n: u64, p: u64) -> Result<Sl2> {
    // choose a bottom row (c0, d0) mod p realizing the projective point
    let (c0, d0) = (l.pt.0 % p, l.pt.1 % p);
    // CRT bottom row mod N*p with required residues; scale the mod-p side by
    // a unit if needed to make gcd-liftability easy
    for scale in 1..p {
        let cp = c0 * scale % p;
        let dp = d0 * scale % p;
        let c = crt(l.cd.0, n, cp, p);
        let d = crt(l.cd.1, n, dp, p);
        // lift to coprime integers: adjust d by multiples of N*p
        let m = n * p;
        for t in 0..32u64 {
            let dd = d + t * m;
            let g = gcd(if c == 0 { m } else { c }, if dd == 0 { m } else { dd });
            let (c_i, d_i) = (c as i64, dd as i64);
            if (c == 0 && dd == 0) || g != 1 && !(c == 0 && gcd(dd, m) == 1) {
                if g != 1 {
                    continue;
                }
            }
            if c == 0 && dd == 0 {
                continue;
            }
            if gcd_i(c_i, d_i) == 1 {
                // complete to SL2: find a, b with a*d - b*c = 1
                let (x, y) = bezout(d_i, -c_i);
                return Ok([[x, y], [c_i, d_i]]);
            }
        }
    }
    Err(CoreError::Domain(format!("no representative for label {l:?}")))
}

fn gcd_i(a: i64, b: i64) -> i64 {
    let (a, b) = (a.abs(), b.abs());
    if b == 0 { a } else { gcd_i(b, a % b) }
}

/// x*a + y*b = gcd(a, b) = 1
fn bezout(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0.abs(), 1);
    if r0 == 1 { (s0, t0) } else { (-s0, -t0) }
}

fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x = a mod m, x = b mod n (m, n coprime)
    if m == 1 {
        return b % n;
    }
    let minv = inv_mod(m % n, n);
    let diff = ((b + n) - a % n) % n;
    (a + m * ((diff * minv) % n)) % (m * n)
}

/// A cusp a/b (b = 0 means infinity), in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cusp {
    pub num: i64,
    pub den: i64,
}

impl Cusp {
    pub fn infinity() -> Self {
        Cusp { num: 1, den: 0 }
    }
    pub fn reduce(num: i64, den: i64) -> Self {
        if den == 0 {
            return Cusp { num: 1, den: 0 };
        }
        let g = gcd_i(num, den).max(1);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        Cusp { num: n, den: d }
    }
    /// image under an integral matrix with positive determinant
    pub fn apply(&self, m: [[i64; 2]; 2]) -> Cusp {
        Cusp::reduce(
            m[0][0] * self.num + m[0][1] * self.den,
            m[1][0] * self.num + m[1][1] * self.den,
        )
    }
}

/// Decompose the path {infinity -> r} as a sum of unimodular paths
/// h_k {0 -> infinity}; empty when r is infinity.
pub fn path_from_infinity(r: Cusp) -> Vec<Sl2> {
    if r.den == 0 {
        return vec![];
    }
    // continued fraction convergents of num/den
    let (mut a, mut b) = (r.num, r.den);
    let mut quots = Vec::new();
    while b != 0 {
        let q = a.div_euclid(b);
        quots.push(q);
        let t = a - q * b;
        a = b;
        b = t;
    }
    // convergents p_k/q_k with p_{-1}/q_{-1} = 1/0
    let (mut pk1, mut qk1) = (1i64, 0i64);
    let (mut pk, mut qk) = (quots[0], 1i64);
    let mut out = Vec::new();
    let mut sign = 1i64; // (-1)^(k+1) for k = 0 is -1? track parity explicitly
    // segment {p_{-1}/q_{-1} -> p_0/q_0} = {infinity -> a_0}
    out.push(norm_seg(pk, qk, pk1, qk1));
    for (k, &q) in quots.iter().enumerate().skip(1) {
        let p_new = q * pk + pk1;
        let q_new = q * qk + qk1;
        pk1 = pk;
        qk1 = qk;
        pk = p_new;
        qk = q_new;
        let _ = k;
        out.push(norm_seg(pk, qk, pk1, qk1));
        sign = -sign;
    }
    let _ = sign;
    out
}

/// Unimodular matrix sending {0 -> infinity} to {p1/q1 -> p2/q2} when
/// p2 q1 - p1 q2 = +-1 (sign-corrected to determinant 1).
fn norm_seg(p2: i64, q2: i64, p1: i64, q1: i64) -> Sl2 {
    let det = p2 * q1 - p1 * q2;
    debug_assert!(det == 1 || det == -1);
    if det == 1 {
        [[p2, p1], [q2, q1]]
    } else {
        [[p2, -p1], [q2, -q1]]
    }
}

/// Decompose {alpha -> beta} into unimodular paths.
pub fn path_between(alpha: Cusp, beta: Cusp) -> Vec<(i64, Sl2)> {
    let mut out: Vec<(i64, Sl2)> = path_from_infinity(beta).into_iter().map(|h| (1, h)).collect();
    for h in path_from_infinity(alpha) {
        out.push((-1, h));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coset_counts() {
        // Gamma_0(11): index 12
        let d = manin_generators(1, 11).unwrap();
        assert_eq!(d.labels.len(), 12);
        // Gamma_1(3) n Gamma_0(5): 8 * 6 = 48 (index-formula oracle:
        // [SL2 : Gamma_1(3)] = 9*(1 - 1/9) = 8, [SL2 : Gamma_0(5)] = 6)
        let d = manin_generators(3, 5).unwrap();
        assert_eq!(d.labels.len(), 48);
        // Gamma_1(5) n Gamma_0(3): 24 * 4 = 96
        let d = manin_generators(5, 3).unwrap();
        assert_eq!(d.labels.len(), 96);
        // degenerate level
        assert!(manin_generators(1, 3).is_err());
    }

    #[test]
    fn reps_have_right_labels() {
        for (n, p) in [(1u64, 11u64), (3, 5), (5, 3), (11, 5)] {
            let d = manin_generators(n, p).unwrap();
            for (i, g) in d.reps.iter().enumerate() {
                assert_eq!(g[0][0] * g[1][1] - g[0][1] * g[1][0], 1, "det");
                assert_eq!(d.label_of(*g), i, "label round-trip (n={n}, p={p}, i={i})");
            }
        }
    }

    #[test]
    fn gamma_for_lands_in_group() {
        let d = manin_generators(3, 5).unwrap();
        for i in 0..d.reps.len() {
            for m in [S_MAT, T_MAT] {
                let g = sl2_mul(d.reps[i], m);
                let (_, gam) = d.gamma_for(g);
                // gamma in Gamma_1(3) n Gamma_0(5)
                assert_eq!(gam[1][0].rem_euclid(3), 0, "c = 0 mod N");
                assert_eq!(gam[0][0].rem_euclid(3), 1, "a = 1 mod N");
                assert_eq!(gam[1][1].rem_euclid(3), 1, "d = 1 mod N");
                assert_eq!(gam[1][0].rem_euclid(5), 0, "c = 0 mod p");
            }
        }
    }

    #[test]
    fn path_decomposition_telescopes() {
        for (num, den) in [(3i64, 7i64), (22, 9), (-5, 13), (1, 1), (0, 1), (35, 12)] {
            let r = Cusp::reduce(num, den);
            let segs = path_from_infinity(r);
            // endpoints chain from infinity to r
            let mut cur = Cusp::infinity();
            for h in &segs {
                let from = Cusp::reduce(h[0][1], h[1][1]);
                let to = Cusp::reduce(h[0][0], h[1][0]);
                assert_eq!(from, cur, "chain break");
                cur = to;
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                assert_eq!(det, 1);
            }
            assert_eq!(cur, r);
        }
    }
}
