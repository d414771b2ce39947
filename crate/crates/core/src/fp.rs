//! Arithmetic in the prime field F_p and dense polynomials over it.
//!
//! Polynomials are stored constant term first with no trailing zeros; the
//! zero polynomial is the empty vector. Residues are kept in `[0, p)`.

use std::cmp::Ordering;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue.
pub fn inv(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow(a, (p - 2) as u64, p)
}

/// Reduces an arbitrary integer into `[0, p)`.
pub fn reduce_i64(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// Compares two coefficient vectors read as base-p integers, coordinate 0
/// being the least significant digit. Missing digits count as zero.
pub fn cmp_base_p(a: &[u32], b: &[u32]) -> Ordering {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Advances a base-p counter in place (digit 0 fastest). Returns `false` on
/// wrap-around to all zeros.
pub fn increment(v: &mut [u32], p: u32) -> bool {
    for d in v.iter_mut() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn poly_add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut r: Vec<u32> =
        (0..n).map(|i| add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0), p)).collect();
    trim(&mut r);
    r
}

pub fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut r: Vec<u32> =
        (0..n).map(|i| sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0), p)).collect();
    trim(&mut r);
    r
}

pub fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += x as u64 * y as u64;
        }
        // keep the accumulators bounded for large p and long inputs
        if i % 4096 == 4095 {
            for c in acc.iter_mut() {
                *c %= p as u64;
            }
        }
    }
    let mut r: Vec<u32> = acc.into_iter().map(|c| (c % p as u64) as u32).collect();
    trim(&mut r);
    r
}

/// Euclidean division; `b` must be nonzero.
pub fn poly_divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = inv(b[db], p);
    let mut r: Vec<u32> = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = mul(r[dr], lead_inv, p);
        let shift = dr - db;
        q[shift] = c;
        for (j, &bj) in b[..=db].iter().enumerate() {
            r[shift + j] = sub(r[shift + j], mul(c, bj, p), p);
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    poly_divrem(a, b, p).1
}

pub fn make_monic(a: &mut [u32], p: u32) {
    if let Some(d) = degree(a) {
        let li = inv(a[d], p);
        for c in a.iter_mut() {
            *c = mul(*c, li, p);
        }
    }
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    make_monic(&mut x, p);
    x
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm, if it exists.
pub fn poly_invmod(a: &[u32], m: &[u32], p: u32) -> Option<Vec<u32>> {
    let mut r0 = m.to_vec();
    let mut r1 = poly_rem(a, m, p);
    let mut s0: Vec<u32> = Vec::new();
    let mut s1: Vec<u32> = vec![1];
    trim(&mut r0);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1, p);
        let s = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let c = inv(r0[0], p);
    let mut out: Vec<u32> = s0.iter().map(|&x| mul(x, c, p)).collect();
    trim(&mut out);
    Some(poly_rem(&out, m, p))
}

pub fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    poly_rem(&poly_mul(a, b, p), m, p)
}

pub fn poly_powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut base = poly_rem(a, m, p);
    let mut r = poly_rem(&[1], m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_mulmod(&r, &base, m, p);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mulmod(&base, &base, m, p);
        }
    }
    r
}

/// Ben-Or irreducibility test: a polynomial `f` of degree `n` is irreducible
/// iff `gcd(x^{p^d} - x, f) = 1` for every `1 <= d <= n/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = match degree(f) {
        Some(n) => n,
        None => return false,
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let mut h = poly_rem(&x, f, p);
    for _ in 1..=n / 2 {
        h = poly_powmod(&h, p as u64, f, p);
        let g = poly_gcd(&poly_sub(&h, &x, p), f, p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `n`,
/// enumerating the lower coefficients as a base-p counter.
pub fn least_irreducible(n: usize, p: u32) -> Vec<u32> {
    assert!(n >= 1);
    let mut low = vec![0u32; n];
    loop {
        let mut f = low.clone();
        f.push(1);
        let plausible = n == 1 || f[0] != 0;
        if plausible && is_irreducible(&f, p) {
            return f;
        }
        if !increment(&mut low, p) {
            unreachable!("irreducible polynomials exist in every degree");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let ps: Vec<u32> = (0..20).filter(|&p| is_prime(p)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn least_irreducibles_over_f2() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(4, 2), vec![1, 1, 0, 0, 1]);
        assert_eq!(least_irreducible(1, 2), vec![0, 1]);
    }

    #[test]
    fn irreducibility_agrees_with_root_free_quadratics() {
        // a monic quadratic is irreducible iff it has no root in F_p
        for p in [2u32, 3, 5, 7] {
            for c0 in 0..p {
                for c1 in 0..p {
                    let f = vec![c0, c1, 1];
                    let has_root = (0..p).any(|x| add(add(mul(x, x, p), mul(c1, x, p), p), c0, p) == 0);
                    assert_eq!(is_irreducible(&f, p), !has_root, "p={p} f={f:?}");
                }
            }
        }
    }

    #[test]
    fn divrem_reconstructs() {
        let p = 7;
        let a = vec![3, 0, 5, 1, 6];
        let b = vec![2, 4, 1];
        let (q, r) = poly_divrem(&a, &b, p);
        assert_eq!(poly_add(&poly_mul(&q, &b, p), &r, p), a);
        assert!(degree(&r).is_none_or(|d| d < 2));
    }

    #[test]
    fn inverse_mod_irreducible() {
        let f = least_irreducible(5, 3);
        let a = vec![2, 0, 1, 1];
        let ai = poly_invmod(&a, &f, 3).unwrap();
        assert_eq!(poly_mulmod(&a, &ai, &f, 3), vec![1]);
        assert!(poly_invmod(&[], &f, 3).is_none());
    }

    #[test]
    fn counter_and_ordering() {
        let mut v = vec![1, 1];
        assert!(!increment(&mut v, 2));
        assert_eq!(v, vec![0, 0]);
        assert_eq!(cmp_base_p(&[1, 0], &[0, 1]), Ordering::Less);
        assert_eq!(cmp_base_p(&[1], &[1, 0, 0]), Ordering::Equal);
    }
}
