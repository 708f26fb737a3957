//! Exact linear algebra: Bareiss determinants over integral domains,
//! fraction-free integer nullspaces, and modular elimination with rational
//! reconstruction for large interpolation systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::poly::{mulmod, SparsePoly};

/// Integral domain with exact division, as needed by Bareiss elimination.
pub trait Domain: Clone + Send + Sync {
    fn is_zero_el(&self) -> bool;
    fn mul_el(&self, other: &Self) -> Self;
    fn sub_el(&self, other: &Self) -> Self;
    fn neg_el(&self) -> Self;
    /// `self / other`, known to be exact.
    fn div_exact(&self, other: &Self) -> Self;
    /// Rough cost used to pick cheap pivots.
    fn weight(&self) -> usize {
        1
    }
}

impl Domain for BigInt {
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn mul_el(&self, o: &Self) -> Self {
        self * o
    }
    fn sub_el(&self, o: &Self) -> Self {
        self - o
    }
    fn neg_el(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        let (q, r) = self.div_rem(o);
        debug_assert!(r.is_zero(), "inexact Bareiss division");
        q
    }
    fn weight(&self) -> usize {
        self.bits() as usize
    }
}

impl Domain for BigRational {
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn mul_el(&self, o: &Self) -> Self {
        self * o
    }
    fn sub_el(&self, o: &Self) -> Self {
        self - o
    }
    fn neg_el(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl Domain for SparsePoly {
    fn is_zero_el(&self) -> bool {
        self.is_zero()
    }
    fn mul_el(&self, o: &Self) -> Self {
        self * o
    }
    fn sub_el(&self, o: &Self) -> Self {
        self - o
    }
    fn neg_el(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self.exact_divide(o).expect("Bareiss division is exact")
    }
    fn weight(&self) -> usize {
        self.len()
    }
}

/// Determinant by fraction-free Bareiss elimination. `one` is the unit of
/// the domain (needed for the empty matrix and the first step).
pub fn bareiss_det<T: Domain>(mut m: Vec<Vec<T>>, one: T) -> T {
    let n = m.len();
    if n == 0 {
        return one;
    }
    assert!(m.iter().all(|r| r.len() == n), "square matrix required");
    let mut negate = false;
    let mut prev = one;
    for k in 0..n {
        let pivot = (k..n).filter(|&i| !m[i][k].is_zero_el()).min_by_key(|&i| m[i][k].weight());
        let Some(p) = pivot else {
            return m[k][k].sub_el(&m[k][k]);
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        if k + 1 == n {
            break;
        }
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let prev_ref = &prev;
        bottom.par_iter_mut().for_each(|row| {
            let lead = row[k].clone();
            for j in (k + 1)..n {
                let a = row[j].mul_el(&pivot_row[k]);
                let val = if lead.is_zero_el() || pivot_row[j].is_zero_el() { a } else { a.sub_el(&lead.mul_el(&pivot_row[j])) };
                row[j] = if val.is_zero_el() { val } else { val.div_exact(prev_ref) };
            }
            row[k] = lead.sub_el(&lead);
        });
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg_el()
    } else {
        d
    }
}

/// Rank of a rational matrix.
pub fn rank_rational(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][c].clone();
        for i in (rank + 1)..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            let (top, rest) = m.split_at_mut(i);
            for (x, y) in rest[0][c..cols].iter_mut().zip(&top[rank][c..cols]) {
                *x -= &f * y;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn row_content_reduce(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Basis of the rational nullspace of an integer matrix, as primitive
/// integer vectors, by fraction-free Gauss-Jordan elimination.
pub fn nullspace_integer(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].bits()) else {
            continue;
        };
        a.swap(r, p);
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in 0..ncols {
                row[j] = &row[j] * &pivot_row[c] - &f * &pivot_row[j];
            }
            row_content_reduce(row);
        }
        row_content_reduce(&mut a[r]);
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        // x_f = L, x_{pivot_i} = -a[i][f] * L / a[i][pivot_i]
        let mut l = BigInt::one();
        for (i, &pc) in pivots.iter().enumerate() {
            if !a[i][f].is_zero() {
                l = l.lcm(&a[i][pc]);
            }
        }
        let mut v = vec![BigInt::zero(); ncols];
        v[f] = l.clone();
        for (i, &pc) in pivots.iter().enumerate() {
            if !a[i][f].is_zero() {
                v[pc] = -(&a[i][f] * &l) / &a[i][pc];
            }
        }
        row_content_reduce(&mut v);
        basis.push(v);
    }
    basis
}

/// Reduced row echelon nullspace modulo a prime. Each basis vector has a 1
/// at its free column.
pub fn nullspace_mod(m: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for x in a[r].iter_mut().take(ncols) {
            *x = mulmod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for j in c..ncols {
                if pivot_row[j] != 0 {
                    row[j] = submod(row[j], mulmod(f, pivot_row[j], p), p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; ncols];
        v[f] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = submod(0, a[i][f], p);
        }
        basis.push(v);
    }
    basis
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    crate::poly::powmod(a, p - 2, p)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = crate::poly::powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below 2^62, in decreasing order.
pub fn large_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime_u64(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Combine `x ≡ a (mod m)` with `x ≡ b (mod p)`.
pub fn crt(a: &BigInt, m: &BigInt, b: u64, p: u64) -> (BigInt, BigInt) {
    let pb = BigInt::from(p);
    let a_mod_p = crate::poly::bigint_mod(a, p);
    let m_mod_p = crate::poly::bigint_mod(m, p);
    let t = mulmod(submod(b, a_mod_p, p), inv_mod(m_mod_p, p), p);
    let x = a + m * BigInt::from(t);
    let mm = m * &pb;
    (x.mod_floor(&mm), mm)
}

/// Rational reconstruction of `a mod m` with both parts below sqrt(m/2).
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let g = r1.gcd(&t1);
    if !g.is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn determinants() {
        let m = vec![vec![bi(2), bi(1), bi(3)], vec![bi(0), bi(4), bi(5)], vec![bi(1), bi(0), bi(6)]];
        assert_eq!(bareiss_det(m, bi(1)), bi(2 * 24 - (-5) + 3 * (-4)));
        let singular = vec![vec![bi(1), bi(2)], vec![bi(2), bi(4)]];
        assert_eq!(bareiss_det(singular, bi(1)), bi(0));
        let swap = vec![vec![bi(0), bi(1)], vec![bi(1), bi(0)]];
        assert_eq!(bareiss_det(swap, bi(1)), bi(-1));
    }

    #[test]
    fn integer_nullspace() {
        // u = 3 on {0,1,2}: rows (1,3,9), (0,3,18)
        let m = vec![vec![bi(1), bi(3), bi(9)], vec![bi(0), bi(3), bi(18)]];
        let ns = nullspace_integer(&m, 3);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        let s = if v[2].is_negative() { bi(-1) } else { bi(1) };
        assert_eq!(v.iter().map(|x| x * &s).collect::<Vec<_>>(), vec![bi(9), bi(-6), bi(1)]);
    }

    #[test]
    fn modular_pieces() {
        let ps = large_primes(2);
        assert!(ps[0] > ps[1] && ps[0] < (1 << 62));
        let m = BigInt::from(ps[0]);
        let x = BigRational::new(bi(-7), bi(12));
        let enc = (x.numer() * BigInt::from(inv_mod(crate::poly::bigint_mod(x.denom(), ps[0]), ps[0]))).mod_floor(&m);
        assert_eq!(rational_reconstruct(&enc, &m), Some(x));
        let (a, mm) = crt(&bi(3), &bi(5), 4, 7);
        assert_eq!(mm, bi(35));
        assert_eq!(a, bi(18));
        let ns = nullspace_mod(&[vec![1, 3, 9], vec![0, 3, 18]], 3, 101);
        assert_eq!(ns, vec![vec![9, 95, 1]]);
    }
}
