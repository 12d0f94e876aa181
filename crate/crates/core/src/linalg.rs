//! Dense linear algebra over Z/p^N (u64 elements, p^N < 2^62): echelon forms
//! with unit pivots, kernels, characteristic and minimal polynomials, Newton
//! polygons, Hensel two-factor splitting along a polygon break, and the
//! resulting spectral projectors. All precision losses are surfaced as an
//! explicit buffer (the valuation of the resultant of the split factors).

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZpRing {
    pub p: u64,
    pub n: u32,
    pub modulus: u64,
}

impl ZpRing {
    pub fn new(p: u64, n: u32) -> Self {
        let modulus = p.checked_pow(n).expect("p^n must fit in u64");
        assert!(modulus < (1u64 << 62));
        ZpRing { p, n, modulus }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus { s - self.modulus } else { s }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.modulus - b }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 { 0 } else { self.modulus - a }
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus as i64) as u64
    }

    /// v_p(a), with n for a = 0.
    pub fn val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if !self.is_unit(a) {
            return Err(CoreError::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Ok(((s0 % self.modulus as i128 + self.modulus as i128) % self.modulus as i128) as u64)
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Exact division by p^k (errors if not divisible).
    pub fn div_pk(&self, a: u64, k: u32) -> Result<u64> {
        let pk = self.p.pow(k);
        if a % pk != 0 {
            return Err(CoreError::Domain("not divisible by p^k".into()));
        }
        Ok(a / pk)
    }

    /// Reduce into a smaller-precision ring.
    pub fn reduce_to(&self, a: u64, other: &ZpRing) -> u64 {
        a % other.modulus
    }
}

#[derive(Debug, Clone)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn mul(&self, other: &Mat, ring: &ZpRing) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                let a = a as u128;
                for j in 0..other.cols {
                    let t = (a * other[(k, j)] as u128) % ring.modulus as u128;
                    out[(i, j)] = ring.add(out[(i, j)], t as u64);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64], ring: &ZpRing) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u128;
                for j in 0..self.cols {
                    acc += self[(i, j)] as u128 * v[j] as u128;
                    if j % 8 == 7 {
                        acc %= ring.modulus as u128;
                    }
                }
                (acc % ring.modulus as u128) as u64
            })
            .collect()
    }

    pub fn pow(&self, mut e: u64, ring: &ZpRing) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ring);
            }
            base = base.mul(&base, ring);
            e >>= 1;
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = u64;
    fn index(&self, (r, c): (usize, usize)) -> &u64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Fully reduced row echelon with unit pivots. Returns (echelon matrix,
/// pivot (row, col) list). Errors if a nonzero non-unit-only residue blocks
/// elimination (the caller's precision is then genuinely insufficient).
pub fn echelon(mut a: Mat, ring: &ZpRing) -> Result<(Mat, Vec<(usize, usize)>)> {
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..a.cols {
        if row >= a.rows {
            break;
        }
        // find a unit pivot in this column
        let mut pr = None;
        for r in row..a.rows {
            if ring.is_unit(a[(r, col)]) {
                pr = Some(r);
                break;
            }
        }
        let Some(pr) = pr else {
            // no unit here; make sure we are not discarding information
            continue;
        };
        // swap rows
        for c in 0..a.cols {
            let t = a[(row, c)];
            a[(row, c)] = a[(pr, c)];
            a[(pr, c)] = t;
        }
        let inv = ring.inv(a[(row, col)])?;
        for c in 0..a.cols {
            a[(row, c)] = ring.mul(a[(row, c)], inv);
        }
        for r in 0..a.rows {
            if r != row && a[(r, col)] != 0 {
                let f = a[(r, col)];
                for c in 0..a.cols {
                    let t = ring.mul(f, a[(row, c)]);
                    a[(r, c)] = ring.sub(a[(r, c)], t);
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    Ok((a, pivots))
}

/// Kernel basis of a matrix mod p^N with the free-column coordinates that
/// parametrize it (vector i has 1 at free_cols[i] and 0 at the other free
/// columns, so reading a kernel element at the free columns recovers its
/// basis coordinates).
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<u64>>,
    pub free_cols: Vec<usize>,
}

/// Kernel (right null space) basis of a matrix mod p^N; requires the
/// elimination to succeed with unit pivots on every obstructing row.
pub fn kernel(a: &Mat, ring: &ZpRing) -> Result<KernelBasis> {
    let (e, pivots) = echelon(a.clone(), ring)?;
    // rows beyond the pivots must be zero; otherwise precision is too low
    // to decide the kernel honestly
    let rank = pivots.len();
    for r in rank..e.rows {
        if (0..e.cols).any(|c| e[(r, c)] != 0) {
            return Err(CoreError::EchelonInstability(
                "nonzero residual row without unit pivot".into(),
            ));
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut vectors = Vec::new();
    let mut free_cols = Vec::new();
    for f in 0..e.cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![0u64; e.cols];
        v[f] = 1;
        for (r, c) in &pivots {
            v[*c] = ring.neg(e[(*r, f)]);
        }
        vectors.push(v);
        free_cols.push(f);
    }
    Ok(KernelBasis { vectors, free_cols })
}

/// Characteristic polynomial det(x I - A), coefficients low-to-high (monic),
/// by the division-free Berkowitz algorithm; O(n^4) ring operations.
pub fn charpoly(a: &Mat, ring: &ZpRing) -> Vec<u64> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    if n == 0 {
        return vec![1];
    }
    // p-vector: coefficients of charpoly of leading principal minor,
    // highest degree first
    let mut pv: Vec<u64> = vec![1, ring.neg(a[(0, 0)])];
    for r in 1..n {
        // s_i = R M^i C for the r x r leading block M, row R, column C
        let mut v: Vec<u64> = (0..r).map(|i| a[(i, r)]).collect();
        let mut s = Vec::with_capacity(r);
        for _ in 0..r {
            let mut dot = 0u128;
            for i in 0..r {
                dot += a[(r, i)] as u128 * v[i] as u128;
            }
            s.push((dot % ring.modulus as u128) as u64);
            // v <- M v
            let mut nv = vec![0u64; r];
            for i in 0..r {
                let mut acc = 0u128;
                for j in 0..r {
                    acc += a[(i, j)] as u128 * v[j] as u128;
                    if j % 8 == 7 {
                        acc %= ring.modulus as u128;
                    }
                }
                nv[i] = (acc % ring.modulus as u128) as u64;
            }
            v = nv;
        }
        // Toeplitz column: [1, -a_rr, -s_0, -s_1, ...]
        let mut col = Vec::with_capacity(r + 2);
        col.push(1u64);
        col.push(ring.neg(a[(r, r)]));
        for i in 0..r {
            col.push(ring.neg(s[i]));
        }
        // new p-vector = T * pv, T lower-triangular Toeplitz from col
        let mut np = vec![0u64; pv.len() + 1];
        for (i, x) in np.iter_mut().enumerate() {
            let mut acc = 0u128;
            for (j, pj) in pv.iter().enumerate() {
                if i >= j && i - j < col.len() {
                    acc += col[i - j] as u128 * *pj as u128;
                    acc %= ring.modulus as u128;
                }
            }
            *x = acc as u64;
        }
        pv = np;
    }
    pv.reverse();
    pv
}

/// Minimal monic polynomial of A on the Krylov space of v (low-to-high
/// coefficients); also returns the Krylov dimension.
pub fn minpoly_on_krylov(a: &Mat, v: &[u64], ring: &ZpRing) -> Result<Vec<u64>> {
    let n = v.len();
    let mut basis: Vec<Vec<u64>> = Vec::new(); // echelonized iterates
    let mut pivots: Vec<usize> = Vec::new();
    let mut coords: Vec<Vec<u64>> = Vec::new(); // expression of each reduced iterate
    let mut cur = v.to_vec();
    loop {
        // reduce cur against basis, tracking the combination
        let mut red = cur.clone();
        let mut expr = vec![0u64; basis.len() + 1];
        expr[basis.len()] = 0; // placeholder
        let mut combo: Vec<u64> = vec![0; basis.len()];
        for (bi, b) in basis.iter().enumerate() {
            let c = red[pivots[bi]];
            if c != 0 {
                for j in 0..n {
                    let t = ring.mul(c, b[j]);
                    red[j] = ring.sub(red[j], t);
                }
                combo.push(0);
                combo[bi] = c;
            }
        }
        // proper reduction with stored coefficients
        let mut red = cur.clone();
        let mut lc = vec![0u64; basis.len()];
        for (bi, b) in basis.iter().enumerate() {
            let c = red[pivots[bi]];
            if c != 0 {
                lc[bi] = c;
                for j in 0..n {
                    let t = ring.mul(c, b[j]);
                    red[j] = ring.sub(red[j], t);
                }
            }
        }
        let _ = (expr, combo);
        // find a unit pivot in the residual
        if let Some(pi) = (0..n).find(|&j| ring.is_unit(red[j])) {
            let inv = ring.inv(red[pi])?;
            let normalized: Vec<u64> = red.iter().map(|&x| ring.mul(x, inv)).collect();
            // record: iterate_k = sum lc[bi] basis[bi] + red; basis vector =
            // red / red[pi]
            basis.push(normalized);
            pivots.push(pi);
            coords.push(lc);
            // store the normalization to rebuild iterates later
            coords.last_mut().unwrap().push(ring.inv(inv)?);
            cur = a.mul_vec(&cur, ring);
        } else if red.iter().all(|&x| x == 0) {
            // dependence found: current iterate = sum lc[bi] basis[bi];
            // recover the monic relation in terms of the raw iterates
            let d = basis.len();
            // iterate_j expressed in raw-iterate coordinates: rebuild by
            // forward substitution
            // raw[j] = sum_{i<j} coords[j][i] * basis[i] + scale_j * basis[j]
            // Build matrix B with columns = basis-coordinates of raw iterates.
            let mut b = Mat::zeros(d, d);
            for j in 0..d {
                // raw iterate j in basis coordinates
                // basis[j] enters with coords[j].last() (the scale), plus
                // lower contributions
                for i in 0..j {
                    b[(i, j)] = coords[j][i];
                }
                b[(j, j)] = *coords[j].last().unwrap();
            }
            // raw iterate d (= current) in basis coords is lc
            // solve B * m = lc for m: relation A^d v = sum m_j A^j v
            let mut rhs = lc.clone();
            let mut m = vec![0u64; d];
            for i in (0..d).rev() {
                let scale = ring.inv(b[(i, i)])?;
                let mi = ring.mul(rhs[i], scale);
                m[i] = mi;
                for r2 in 0..i {
                    let t = ring.mul(b[(r2, i)], mi);
                    rhs[r2] = ring.sub(rhs[r2], t);
                }
            }
            // monic minpoly: x^d - sum m_j x^j
            let mut out = vec![0u64; d + 1];
            out[d] = 1;
            for j in 0..d {
                out[j] = ring.neg(m[j]);
            }
            return Ok(out);
        } else {
            return Err(CoreError::EchelonInstability(
                "Krylov residual has no unit coordinate; raise precision".into(),
            ));
        }
        if basis.len() > n {
            return Err(CoreError::EchelonInstability("Krylov overflow".into()));
        }
    }
}

/// Newton polygon of a polynomial (low-to-high coefficients): returns the
/// lower-hull vertices (i, v_p(c_i)), treating zero coefficients as
/// valuation >= N.
pub fn newton_polygon(coeffs: &[u64], ring: &ZpRing) -> Vec<(usize, i64)> {
    let pts: Vec<(usize, i64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| (i, ring.val(c) as i64))
        .collect();
    // lower convex hull, left to right
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // remove if (x2,y2) is above the segment (x1,y1)-(x,y)
            if (y2 - y1) as i128 * (x - x1) as i128 >= (y - y1) as i128 * (x2 - x1) as i128 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

/// The degree of the slope <= lambda part of a monic charpoly: the number of
/// polygon roots of valuation <= lambda (valuations are the negated hull
/// slopes, read left to right). lambda is a rational a/b.
///
/// The split is ambiguous when its boundary lands on a polygon vertex whose
/// coefficient vanishes at working precision (the vertex height is only a
/// lower bound there), and that is reported as a SlopeBreak.
pub fn slope_le_degree(coeffs: &[u64], ring: &ZpRing, lam_num: i64, lam_den: i64) -> Result<usize> {
    let n = coeffs.len() - 1;
    let hull = newton_polygon(coeffs, ring);
    // root valuations: segment (x1,y1)-(x2,y2) carries (x2-x1) roots of
    // valuation (y1-y2)/(x2-x1); count the segments with valuation <= lambda
    let mut deg = 0usize;
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let num = y1 - y2;
        let den = (x2 - x1) as i64;
        if num * lam_den <= lam_num * den {
            deg += x2 - x1;
        }
    }
    let boundary = n - deg;
    if coeffs[boundary] == 0 && boundary != n {
        return Err(CoreError::SlopeBreak(format!(
            "lambda = {lam_num}/{lam_den}: boundary coefficient x^{boundary} vanishes at working precision"
        )));
    }
    Ok(deg)
}

fn poly_mul(a: &[u64], b: &[u64], ring: &ZpRing) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ring.add(out[i + j], ring.mul(x, y));
        }
    }
    out
}

fn poly_sub(a: &[u64], b: &[u64], ring: &ZpRing) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = ring.sub(x, y);
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

/// Division with remainder by a monic divisor.
fn poly_divrem_monic(a: &[u64], d: &[u64], ring: &ZpRing) -> (Vec<u64>, Vec<u64>) {
    assert_eq!(*d.last().unwrap(), 1, "monic divisor required");
    let mut rem = a.to_vec();
    let dd = d.len() - 1;
    if rem.len() <= dd {
        return (vec![0], rem);
    }
    let mut q = vec![0u64; rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd];
        if c != 0 {
            q[i] = c;
            for (j, &djv) in d.iter().enumerate() {
                let t = ring.mul(c, djv);
                rem[i + j] = ring.sub(rem[i + j], t);
            }
        }
    }
    rem.truncate(dd.max(1));
    (q, rem)
}

/// Solve sigma * g + tau * h = e with deg(sigma) < deg(h), deg(tau) < deg(g),
/// by Gaussian elimination on the Sylvester system with minimal-valuation
/// pivots. Returns (sigma, tau, precision_loss).
fn sylvester_solve(
    g: &[u64],
    h: &[u64],
    e: &[u64],
    ring: &ZpRing,
) -> Result<(Vec<u64>, Vec<u64>, u32)> {
    let dg = g.len() - 1;
    let dh = h.len() - 1;
    let n = dg + dh;
    // unknowns: sigma_0..sigma_{dh-1}, tau_0..tau_{dg-1}
    let mut a = Mat::zeros(n, n);
    for i in 0..dh {
        for (j, &gj) in g.iter().enumerate() {
            if i + j < n {
                a[(i + j, i)] = ring.add(a[(i + j, i)], gj);
            }
        }
    }
    for i in 0..dg {
        for (j, &hj) in h.iter().enumerate() {
            if i + j < n {
                a[(i + j, dh + i)] = ring.add(a[(i + j, dh + i)], hj);
            }
        }
    }
    let mut rhs = vec![0u64; n];
    for (i, &c) in e.iter().enumerate() {
        if i < n {
            rhs[i] = c;
        } else if c != 0 {
            return Err(CoreError::Domain("sylvester rhs degree too large".into()));
        }
    }
    // elimination with min-valuation pivots; track total precision loss
    let mut loss = 0u32;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut x = vec![0u64; n];
    let mut rowsused = vec![false; n];
    let mut pivots: Vec<(usize, usize, u32)> = Vec::new(); // (row, col, val)
    for col in 0..n {
        let mut best: Option<(usize, u32)> = None;
        for r in 0..n {
            if rowsused[r] {
                continue;
            }
            let v = ring.val(a[(r, col)]);
            if v < ring.n && best.map(|(_, bv)| v < bv).unwrap_or(true) {
                best = Some((r, v));
            }
        }
        let Some((pr, pv)) = best else {
            return Err(CoreError::EigensystemNotIsolated(
                "sylvester system singular at working precision".into(),
            ));
        };
        rowsused[pr] = true;
        pivots.push((pr, col, pv));
        loss = loss.max(pv); // crude but monotone; refined below by sum
        // eliminate column from other rows: row_r -= (a_rc / a_prc) row_pr,
        // dividing by p^pv first
        let lead = ring.div_pk(a[(pr, col)], pv)?;
        let lead_inv = ring.inv(lead)?;
        for r in 0..n {
            if r == pr {
                continue;
            }
            let arc = a[(r, col)];
            if arc == 0 {
                continue;
            }
            let vr = ring.val(arc);
            if vr < pv {
                return Err(CoreError::EigensystemNotIsolated(
                    "pivot not minimal; sylvester elimination unstable".into(),
                ));
            }
            let f = ring.mul(ring.div_pk(arc, pv)?, lead_inv);
            for c in 0..n {
                let t = ring.mul(f, a[(pr, c)]);
                a[(r, c)] = ring.sub(a[(r, c)], t);
            }
            let t = ring.mul(f, rhs[pr]);
            rhs[r] = ring.sub(rhs[r], t);
        }
    }
    // back substitution in pivot order (each pivot row now has a single
    // pivot column with value p^pv * unit)
    let mut total_loss = 0u32;
    for &(r, c, v) in &pivots {
        total_loss = total_loss.max(v);
        let lead = ring.div_pk(a[(r, c)], v)?;
        let lead_inv = ring.inv(lead)?;
        // rhs must be divisible by p^v for an exact solution at this precision
        let rv = ring.val(rhs[r]);
        if rv < v {
            return Err(CoreError::EigensystemNotIsolated(
                "sylvester rhs not divisible by pivot valuation".into(),
            ));
        }
        x[c] = ring.mul(ring.div_pk(rhs[r], v)?, lead_inv);
    }
    let _ = perm;
    let sigma = x[..dh].to_vec();
    let tau = x[dh..].to_vec();
    Ok((sigma, tau, total_loss))
}

/// Hensel-style two-factor split of a monic polynomial along a Newton-polygon
/// break: f = g * h with h monic of degree `deg_h` carrying the low-valuation
/// (slope <= lambda) roots. Returns (g, h, buffer) where factors are correct
/// modulo p^(N - buffer).
pub fn split_at_degree(
    f: &[u64],
    deg_h: usize,
    ring: &ZpRing,
) -> Result<(Vec<u64>, Vec<u64>, u32)> {
    let n = f.len() - 1;
    assert_eq!(f[n], 1, "monic input");
    if deg_h == 0 {
        return Ok((f.to_vec(), vec![1], 0));
    }
    if deg_h == n {
        return Ok((vec![1], f.to_vec(), 0));
    }
    let split = n - deg_h;
    // initial h: top coefficients (monic by construction)
    let mut h: Vec<u64> = f[split..].to_vec();
    let (mut g, _r0) = poly_divrem_monic(f, &h, ring);
    let mut buffer = 0u32;
    for _iter in 0..64 {
        let gh = poly_mul(&g, &h, ring);
        let e = poly_sub(f, &gh, ring);
        if e.iter().all(|&c| c == 0) {
            return Ok((g, h, buffer));
        }
        let (sigma, tau, loss) = sylvester_solve(&g, &h, &e, ring)?;
        buffer = buffer.max(loss);
        // g += tau, h += sigma  (so that (g+tau)(h+sigma) = f + O(e^2))
        let mut g2 = g.clone();
        for (i, &t) in tau.iter().enumerate() {
            while g2.len() <= i {
                g2.push(0);
            }
            g2[i] = ring.add(g2[i], t);
        }
        let mut h2 = h.clone();
        for (i, &s) in sigma.iter().enumerate() {
            while h2.len() <= i {
                h2.push(0);
            }
            h2[i] = ring.add(h2[i], s);
        }
        // keep monic shapes
        if *h2.last().unwrap() != 1 || h2.len() != deg_h + 1 {
            h2.truncate(deg_h + 1);
            h2.resize(deg_h + 1, 0);
            h2[deg_h] = 1;
        }
        if g2.len() != n - deg_h + 1 {
            g2.truncate(n - deg_h + 1);
            g2.resize(n - deg_h + 1, 0);
        }
        g2[n - deg_h] = 1;
        // check progress
        let gh2 = poly_mul(&g2, &h2, ring);
        let e2 = poly_sub(f, &gh2, ring);
        let v_old = e.iter().map(|&c| ring.val(c)).min().unwrap_or(ring.n);
        let v_new = e2.iter().map(|&c| ring.val(c)).min().unwrap_or(ring.n);
        if v_new <= v_old && v_new < ring.n {
            return Err(CoreError::SlopeBreak(format!(
                "factor iteration stalled at error valuation {v_new}"
            )));
        }
        g = g2;
        h = h2;
        if v_new >= ring.n {
            return Ok((g, h, buffer));
        }
    }
    Err(CoreError::SlopeBreak("factor iteration did not converge".into()))
}

/// Spectral projector onto the h-part of a split f = g*h (the subspace where
/// h(A) vanishes): pi = (u g)(A) with u g + v h = 1. Returns (pi, buffer).
pub fn spectral_projector(
    a: &Mat,
    g: &[u64],
    h: &[u64],
    ring: &ZpRing,
) -> Result<(Mat, u32)> {
    // solve u g + v h = 1
    let one = vec![1u64];
    let (u, _v, loss) = sylvester_solve(g, h, &one, ring)?;
    let ug = poly_mul(&u, g, ring);
    // evaluate at A by Horner
    let n = a.rows;
    let mut acc = Mat::zeros(n, n);
    for &c in ug.iter().rev() {
        acc = acc.mul(a, ring);
        for i in 0..n {
            acc[(i, i)] = ring.add(acc[(i, i)], c);
        }
    }
    Ok((acc, loss))
}

/// Columns of `m` echelonized into a basis of the column space (unit pivots).
pub fn column_space_basis(m: &Mat, ring: &ZpRing) -> Vec<Vec<u64>> {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for c in 0..m.cols {
        let mut v: Vec<u64> = (0..m.rows).map(|r| m[(r, c)]).collect();
        for (b, &pi) in basis.iter().zip(&pivots) {
            let f = v[pi];
            if f != 0 {
                for j in 0..v.len() {
                    let t = ring.mul(f, b[j]);
                    v[j] = ring.sub(v[j], t);
                }
            }
        }
        if let Some(pi) = (0..v.len()).find(|&j| ring.is_unit(v[j])) {
            let inv = ring.inv(v[pi]).unwrap();
            for x in v.iter_mut() {
                *x = ring.mul(*x, inv);
            }
            basis.push(v);
            pivots.push(pi);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_and_kernel() {
        let ring = ZpRing::new(5, 6);
        // A = [[1, 2, 3], [2, 4, 6]] has rank 1; kernel dim 2
        let mut a = Mat::zeros(2, 3);
        a[(0, 0)] = 1;
        a[(0, 1)] = 2;
        a[(0, 2)] = 3;
        a[(1, 0)] = 2;
        a[(1, 1)] = 4;
        a[(1, 2)] = 6;
        let k = kernel(&a, &ring).unwrap();
        assert_eq!(k.vectors.len(), 2);
        for v in &k.vectors {
            let out = a.mul_vec(v, &ring);
            assert!(out.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn charpoly_small() {
        let ring = ZpRing::new(5, 8);
        let mut a = Mat::zeros(2, 2);
        a[(0, 0)] = 1;
        a[(0, 1)] = 2;
        a[(1, 0)] = 3;
        a[(1, 1)] = 4;
        // det(xI - A) = x^2 - 5x - 2
        let cp = charpoly(&a, &ring);
        assert_eq!(cp, vec![ring.from_i64(-2), ring.from_i64(-5), 1]);
        // 3x3 with known charpoly: companion of x^3 - 7x - 1
        let mut c = Mat::zeros(3, 3);
        c[(0, 2)] = 1; // constant 1 -> -(-1)? companion of x^3 + a2 x^2 + a1 x + a0
        c[(1, 0)] = 1;
        c[(2, 1)] = 1;
        c[(0, 2)] = ring.from_i64(1);
        c[(1, 2)] = ring.from_i64(7);
        c[(2, 2)] = ring.from_i64(0);
        let cp = charpoly(&c, &ring);
        assert_eq!(cp, vec![ring.from_i64(-1), ring.from_i64(-7), 0, 1]);
    }

    #[test]
    fn newton_polygon_and_split() {
        let ring = ZpRing::new(5, 10);
        // f = (x - 2)(x - 3)(x - 5)(x - 25): slopes 0,0,1,2
        let roots = [2i64, 3, 5, 25];
        let mut f = vec![1u64];
        for r in roots {
            f = poly_mul(&f, &[ring.from_i64(-r), 1], &ring);
        }
        assert_eq!(slope_le_degree(&f, &ring, 0, 1).unwrap(), 2);
        assert_eq!(slope_le_degree(&f, &ring, 1, 1).unwrap(), 3);
        assert_eq!(slope_le_degree(&f, &ring, 1, 2).unwrap(), 2); // lambda = 1/2
        // lambda large enough captures everything
        assert_eq!(slope_le_degree(&f, &ring, 2, 1).unwrap(), 4);
        // an uncertain boundary coefficient is an ambiguous split
        let tiny = ZpRing::new(5, 2);
        let f2: Vec<u64> = f.iter().map(|&c| ring.reduce_to(c, &tiny)).collect();
        assert!(matches!(
            slope_le_degree(&f2, &tiny, 1, 1),
            Err(CoreError::SlopeBreak(_))
        ));
        // split ordinary part
        let (g, h, buf) = split_at_degree(&f, 2, &ring).unwrap();
        assert_eq!(buf, 0);
        // h should be (x-2)(x-3) = x^2 - 5x + 6
        assert_eq!(h, vec![ring.from_i64(6), ring.from_i64(-5), 1]);
        let prod = poly_mul(&g, &h, &ring);
        assert_eq!(prod, f);
    }

    #[test]
    fn projector_works() {
        let ring = ZpRing::new(5, 10);
        // diag(2, 3, 5, 50) as a matrix; ordinary part = first two coords
        let mut a = Mat::zeros(4, 4);
        for (i, d) in [2u64, 3, 5, 50].iter().enumerate() {
            a[(i, i)] = *d;
        }
        let f = charpoly(&a, &ring);
        let d = slope_le_degree(&f, &ring, 0, 1).unwrap();
        assert_eq!(d, 2);
        let (g, h, _) = split_at_degree(&f, d, &ring).unwrap();
        let (pi, buf) = spectral_projector(&a, &g, &h, &ring).unwrap();
        // pi^2 = pi mod p^(n - 2 buf)
        let pi2 = pi.mul(&pi, &ring);
        let red = ZpRing::new(5, 10 - 2 * buf.max(1));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(
                    ring.reduce_to(pi2[(i, j)], &red),
                    ring.reduce_to(pi[(i, j)], &red)
                );
            }
        }
        // acts as identity on e0, e1 and kills e2, e3
        for (i, expect) in [(0usize, 1u64), (1, 1), (2, 0), (3, 0)] {
            let mut v = vec![0u64; 4];
            v[i] = 1;
            let out = pi.mul_vec(&v, &ring);
            assert_eq!(ring.reduce_to(out[i], &red), expect, "i={i}");
        }
    }

    #[test]
    fn minpoly_krylov() {
        let ring = ZpRing::new(5, 8);
        let mut a = Mat::zeros(3, 3);
        for (i, d) in [2u64, 3, 3].iter().enumerate() {
            a[(i, i)] = *d;
        }
        let v = vec![1u64, 1, 0];
        let mp = minpoly_on_krylov(&a, &v, &ring).unwrap();
        // minimal polynomial on the span of e0+e1: (x-2)(x-3) = x^2-5x+6
        assert_eq!(mp, vec![ring.from_i64(6), ring.from_i64(-5), 1]);
    }
}
