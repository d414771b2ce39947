//! Univariate polynomials with coefficients in one level of the tower, and
//! deterministic root finding by trace splitting.

use crate::fp;
use crate::tower::Level;

/// Coefficients constant term first; each coefficient is a level element.
pub type UPoly = Vec<Vec<u32>>;

pub fn trim(a: &mut UPoly) {
    while a.last().is_some_and(|c| Level::is_zero(c)) {
        a.pop();
    }
}

pub fn degree(a: &[Vec<u32>]) -> Option<usize> {
    a.iter().rposition(|c| !Level::is_zero(c))
}

pub fn from_fp(lv: &Level, f: &[u32]) -> UPoly {
    let mut out: UPoly = f.iter().map(|&c| lv.scalar(c)).collect();
    trim(&mut out);
    out
}

pub fn sub(lv: &Level, a: &[Vec<u32>], b: &[Vec<u32>]) -> UPoly {
    let n = a.len().max(b.len());
    let z = lv.zero();
    let mut out: UPoly = (0..n).map(|i| lv.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(&mut out);
    out
}

pub fn add(lv: &Level, a: &[Vec<u32>], b: &[Vec<u32>]) -> UPoly {
    let n = a.len().max(b.len());
    let z = lv.zero();
    let mut out: UPoly = (0..n).map(|i| lv.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(&mut out);
    out
}

pub fn mul(lv: &Level, a: &[Vec<u32>], b: &[Vec<u32>]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![lv.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if Level::is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = lv.add(&out[i + j], &lv.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

pub fn divrem(lv: &Level, a: &[Vec<u32>], b: &[Vec<u32>]) -> (UPoly, UPoly) {
    let db = degree(b).expect("division by zero polynomial");
    let li = lv.inv(&b[db]).expect("nonzero leading coefficient");
    let mut r: UPoly = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![lv.zero(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = lv.mul(&r[dr], &li);
        let shift = dr - db;
        for (j, bj) in b[..=db].iter().enumerate() {
            r[shift + j] = lv.sub(&r[shift + j], &lv.mul(&c, bj));
        }
        q[shift] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(lv: &Level, a: &[Vec<u32>], b: &[Vec<u32>]) -> UPoly {
    divrem(lv, a, b).1
}

pub fn make_monic(lv: &Level, a: &mut UPoly) {
    if let Some(d) = degree(a) {
        let li = lv.inv(&a[d]).expect("nonzero");
        for c in a.iter_mut() {
            *c = lv.mul(c, &li);
        }
    }
}

pub fn gcd(lv: &Level, a: &[Vec<u32>], b: &[Vec<u32>]) -> UPoly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(lv, &x, &y);
        x = y;
        y = r;
    }
    make_monic(lv, &mut x);
    x
}

pub fn eval(lv: &Level, a: &[Vec<u32>], x: &[u32]) -> Vec<u32> {
    let mut acc = lv.zero();
    for c in a.iter().rev() {
        acc = lv.add(&lv.mul(&acc, x), c);
    }
    acc
}

fn pow_p_mod(lv: &Level, a: &[Vec<u32>], g: &[Vec<u32>]) -> UPoly {
    let mut e = lv.p;
    let mut base = rem(lv, a, g);
    let mut r: UPoly = rem(lv, &[lv.one()], g);
    while e > 0 {
        if e & 1 == 1 {
            r = rem(lv, &mul(lv, &r, &base), g);
        }
        e >>= 1;
        if e > 0 {
            base = rem(lv, &mul(lv, &base, &base), g);
        }
    }
    r
}

/// `X^{p^i} mod g` for `i = 0..=n`.
fn frobenius_powers(lv: &Level, g: &[Vec<u32>]) -> Vec<UPoly> {
    let mut out = Vec::with_capacity(lv.n + 1);
    let mut cur = rem(lv, &[lv.zero(), lv.one()], g);
    out.push(cur.clone());
    for _ in 0..lv.n {
        cur = pow_p_mod(lv, &cur, g);
        out.push(cur.clone());
    }
    out
}

/// `Tr(δX) mod g`, given `xp[i] = X^{p^i}` modulo a multiple of `g`.
fn trace_poly(lv: &Level, delta: &[u32], xp: &[UPoly], g: &[Vec<u32>]) -> UPoly {
    let mut acc: UPoly = Vec::new();
    let mut d = delta.to_vec();
    for x in xp.iter().take(lv.n) {
        let term: UPoly = x.iter().map(|c| lv.mul(c, &d)).collect();
        acc = add(lv, &acc, &term);
        d = lv.frob(&d);
    }
    rem(lv, &acc, g)
}

/// Splits a squarefree `g` that splits into linear factors over the level.
/// With `all` false only one root is produced, following the smallest factor.
fn split(lv: &Level, g: UPoly, xp: &[UPoly], start: usize, all: bool, out: &mut Vec<Vec<u32>>) {
    match degree(&g) {
        None | Some(0) => return,
        Some(1) => {
            let li = lv.inv(&g[1]).expect("nonzero");
            out.push(lv.neg(&lv.mul(&g[0], &li)));
            return;
        }
        _ => {}
    }
    let dg = degree(&g).unwrap();
    for i in start..lv.n {
        let mut delta = lv.zero();
        delta[i] = 1;
        let t = trace_poly(lv, &delta, xp, &g);
        let mut parts = Vec::new();
        for c in 0..lv.p {
            let shifted = sub(lv, &t, &[lv.scalar(c)]);
            let f = gcd(lv, &shifted, &g);
            if degree(&f).is_some_and(|d| d > 0) {
                parts.push(f);
            }
        }
        if parts.len() > 1 || parts.first().is_some_and(|f| degree(f) != Some(dg)) {
            if all {
                for f in parts {
                    split(lv, f, xp, i + 1, true, out);
                }
            } else {
                let f = parts.into_iter().min_by_key(|f| degree(f)).unwrap();
                split(lv, f, xp, i + 1, false, out);
            }
            return;
        }
    }
    unreachable!("trace splitting separates distinct roots");
}

fn sort_roots(roots: &mut [Vec<u32>]) {
    roots.sort_by(|a, b| fp::cmp_base_p(a, b));
}

/// Distinct roots of `g` in the level, sorted as base-p integers.
pub fn roots(lv: &Level, g: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut g = g.to_vec();
    trim(&mut g);
    match degree(&g) {
        None | Some(0) => return Vec::new(),
        _ => {}
    }
    make_monic(lv, &mut g);
    let xp = frobenius_powers(lv, &g);
    let x = vec![lv.zero(), lv.one()];
    let h = gcd(lv, &g, &sub(lv, &xp[lv.n], &x));
    let mut out = Vec::new();
    split(lv, h, &xp, 0, true, &mut out);
    sort_roots(&mut out);
    out
}

/// Multiplicity of `r` as a root of `g` (zero if not a root).
pub fn root_multiplicity(lv: &Level, g: &[Vec<u32>], r: &[u32]) -> usize {
    let lin = vec![lv.neg(r), lv.one()];
    let mut cur = g.to_vec();
    trim(&mut cur);
    let mut m = 0;
    while !cur.is_empty() {
        let (q, rr) = divrem(lv, &cur, &lin);
        if !rr.is_empty() {
            break;
        }
        cur = q;
        m += 1;
    }
    m
}

/// Least root (as a base-p integer) of an irreducible `f ∈ F_p[X]` whose
/// degree divides the level degree.
pub fn least_root_of_fp_poly(lv: &Level, f: &[u32]) -> Vec<u32> {
    let p = lv.p;
    let m = f.len() - 1;
    if m == 1 {
        let c = fp::mul(fp::neg(f[0], p), fp::inv(f[1], p), p);
        return lv.scalar(c);
    }
    // X^{p^i} mod f has F_p coefficients, so it is computed over F_p
    let mut xp_fp = Vec::with_capacity(lv.n);
    let mut cur = fp::poly_rem(&[0, 1], f, p);
    for _ in 0..lv.n {
        xp_fp.push(cur.clone());
        cur = fp::poly_powmod(&cur, p as u64, f, p);
    }
    let xp: Vec<UPoly> = xp_fp.iter().map(|c| from_fp(lv, c)).collect();
    let g = from_fp(lv, f);
    let mut one = Vec::new();
    split(lv, g, &xp, 0, false, &mut one);
    let r = one.pop().expect("polynomial splits in the level");
    let mut conj = vec![r.clone()];
    let mut cur = lv.frob(&r);
    while cur != r {
        conj.push(cur.clone());
        cur = lv.frob(&cur);
    }
    sort_roots(&mut conj);
    conj.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(p: u32, n: usize) -> Level {
        Level::new(p, fp::least_irreducible(n, p))
    }

    fn all_elements(lv: &Level) -> Vec<Vec<u32>> {
        let mut v = vec![0u32; lv.n];
        let mut out = vec![v.clone()];
        while fp::increment(&mut v, lv.p) {
            out.push(v.clone());
        }
        out
    }

    #[test]
    fn roots_match_exhaustive_scan() {
        for (p, n) in [(2u32, 4usize), (3, 2), (5, 2), (2, 5)] {
            let lv = level(p, n);
            let elems = all_elements(&lv);
            // a few polynomials built from products of linear and random factors
            for seed in 0..6usize {
                let a = &elems[(seed * 7 + 3) % elems.len()];
                let b = &elems[(seed * 13 + 5) % elems.len()];
                let c = &elems[(seed * 5 + 1) % elems.len()];
                let g = vec![c.clone(), b.clone(), a.clone(), lv.one()];
                let expect: Vec<Vec<u32>> =
                    elems.iter().filter(|x| Level::is_zero(&eval(&lv, &g, x))).cloned().collect();
                assert_eq!(roots(&lv, &g), expect, "p={p} n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn multiplicity_counts_repeated_roots() {
        let lv = level(3, 2);
        let r = vec![1, 2];
        let lin = vec![lv.neg(&r), lv.one()];
        let g = mul(&lv, &mul(&lv, &lin, &lin), &[lv.scalar(2), lv.one()]);
        assert_eq!(root_multiplicity(&lv, &g, &r), 2);
        assert_eq!(roots(&lv, &g).len(), 2);
    }

    #[test]
    fn least_root_is_least() {
        let lv = level(2, 6);
        let f = fp::least_irreducible(3, 2);
        let r = least_root_of_fp_poly(&lv, &f);
        let expect = all_elements(&lv).into_iter().find(|x| Level::is_zero(&lv.eval_fp_poly(&f, x))).unwrap();
        assert_eq!(r, expect);
    }
}
