//! Deciding whether a polynomial is F_p-flat, i.e. a constant times a product
//! of factors `λ·X − b` with `λ` a nonzero F_p-vector.
//!
//! For each `λ` (normalised so its first nonzero entry is 1, at index `i`)
//! the variable `X_i` is replaced by `b − Σ_{j≠i} λ_j X_j` with `b` symbolic.
//! `λ·X − b` divides the polynomial exactly when every coefficient (a
//! polynomial in `b`) vanishes, so candidate values of `b` are the roots of
//! the gcd of those coefficients. Each such factor is divided out to full
//! multiplicity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::{Exps, LevelPoly};
use super::FormulaError;
use crate::fp;
use crate::tower::{Level, Tower};
use crate::upoly::{self, UPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFactor {
    pub lambda: Vec<u32>,
    pub b: Vec<u32>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotFlatReason {
    /// Every point is a zero, and generic points have no combination in the base.
    ZeroPolynomial,
    /// What is left after removing every linear factor available at the level.
    Residual(LevelPoly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatnessVerdict {
    Flat { level: usize, constant: Vec<u32>, factors: Vec<LinearFactor> },
    NotFlat { level: usize, reason: NotFlatReason },
}

impl FlatnessVerdict {
    pub fn is_flat(&self) -> bool {
        matches!(self, FlatnessVerdict::Flat { .. })
    }
}

fn lambdas(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut v = vec![0u32; n];
    let mut out = Vec::new();
    while fp::increment(&mut v, p) {
        if v.iter().find(|&&c| c != 0) == Some(&1) {
            out.push(v.clone());
        }
    }
    out
}

/// `X_i − r` where `r = b − Σ_{j≠i} λ_j X_j` is written in the variables `0..n`.
fn pivot_replacement(lv: &Level, level: usize, n: usize, lambda: &[u32], i: usize, b: &[u32]) -> LevelPoly {
    let mut r = LevelPoly::constant(lv, level, n, b.to_vec());
    for (j, &l) in lambda.iter().enumerate() {
        if j != i && l != 0 {
            let mut e = vec![0; n];
            e[j] = 1;
            r.add_term(lv, e, lv.scalar(fp::neg(l, lv.p)));
        }
    }
    r
}

/// Exact division by `X_i − r` (with `r` free of `X_i`); `None` if it does not divide.
fn divide_linear(lv: &Level, q: &LevelPoly, i: usize, r: &LevelPoly) -> Option<LevelPoly> {
    let parts = q.split_var(i);
    let d = parts.len() - 1;
    if d == 0 {
        return None;
    }
    let mut quot = vec![LevelPoly::zero(q.level, q.nvars); d];
    quot[d - 1] = parts[d].clone();
    for k in (1..d).rev() {
        quot[k - 1] = parts[k].add(lv, &r.mul(lv, &quot[k]));
    }
    let remainder = parts[0].add(lv, &r.mul(lv, &quot[0]));
    if !remainder.is_zero() {
        return None;
    }
    let x = LevelPoly::var(lv, q.level, q.nvars, i);
    let mut out = LevelPoly::zero(q.level, q.nvars);
    for part in quot.iter().rev() {
        out = out.mul(lv, &x).add(lv, part);
    }
    Some(out)
}

/// Common roots in the level of the coefficients of `q(X_i := b − Σ λ_j X_j)`.
fn candidate_bs(lv: &Level, q: &LevelPoly, lambda: &[u32], i: usize) -> Vec<Vec<u32>> {
    let n = q.nvars;
    // extra variable `n` stands for b
    let map: Vec<Option<usize>> = (0..n).map(Some).collect();
    let ext = q.remap(n + 1, &map);
    let mut r = LevelPoly::var(lv, q.level, n + 1, n);
    for (j, &l) in lambda.iter().enumerate() {
        if j != i && l != 0 {
            let mut e = vec![0; n + 1];
            e[j] = 1;
            r.add_term(lv, e, lv.scalar(fp::neg(l, lv.p)));
        }
    }
    let s = ext.substitute(lv, i, &r);
    let mut by_mono: BTreeMap<Exps, UPoly> = BTreeMap::new();
    for (e, c) in &s.terms {
        let k = e[n] as usize;
        let mono = e[..n].to_vec();
        let entry = by_mono.entry(mono).or_default();
        if entry.len() <= k {
            entry.resize(k + 1, lv.zero());
        }
        entry[k] = c.clone();
    }
    let mut g: UPoly = Vec::new();
    for c in by_mono.values() {
        g = upoly::gcd(lv, &g, c);
        if upoly::degree(&g) == Some(0) {
            return Vec::new();
        }
    }
    if g.is_empty() {
        return Vec::new();
    }
    upoly::roots(lv, &g)
}

/// Flatness with roots sought only inside the polynomial's own level.
pub fn is_fp_flat(tower: &Tower, poly: &LevelPoly) -> Result<FlatnessVerdict, FormulaError> {
    let level = poly.level;
    let lv = tower.level(level)?;
    if poly.is_zero() {
        return Ok(FlatnessVerdict::NotFlat { level, reason: NotFlatReason::ZeroPolynomial });
    }
    let n = poly.nvars;
    let mut q = poly.clone();
    let mut factors = Vec::new();
    for lambda in lambdas(lv.p, n) {
        if q.as_constant(lv).is_some() {
            break;
        }
        let i = lambda.iter().position(|&c| c != 0).unwrap();
        for b in candidate_bs(lv, &q, &lambda, i) {
            let r = pivot_replacement(lv, level, n, &lambda, i, &b);
            let mut mult = 0;
            while let Some(next) = divide_linear(lv, &q, i, &r) {
                q = next;
                mult += 1;
            }
            if mult > 0 {
                factors.push(LinearFactor { lambda: lambda.clone(), b, multiplicity: mult });
            }
        }
    }
    match q.as_constant(lv) {
        Some(c) => Ok(FlatnessVerdict::Flat { level, constant: c, factors }),
        None => Ok(FlatnessVerdict::NotFlat { level, reason: NotFlatReason::Residual(q) }),
    }
}

fn lcm_upto(d: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=d.max(1)).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

/// Complete decision: every `b` of a linear factor is a root of a polynomial of
/// degree at most `deg P` over the coefficient level, so it lies in the level of
/// degree `n_L · lcm(1..deg P)`. The tower is grown to contain that level when
/// the budget allows; `complete` reports whether it did.
pub fn decide_fp_flat(tower: &Tower, poly: &LevelPoly) -> Result<(Tower, FlatnessVerdict, bool), FormulaError> {
    let n_l = tower.degree(poly.level)?;
    let target = n_l * lcm_upto(poly.total_degree() as usize);
    let mut t = tower.clone();
    let found = (poly.level..t.num_levels()).find(|&i| t.degree(i).is_ok_and(|n| n % target == 0));
    let level = match found {
        Some(l) => Some(l),
        None => {
            let top = t.degree(t.top())?;
            let mult = lcm(top, target) / top;
            match t.grow(mult) {
                Ok(g) => {
                    t = g;
                    Some(t.top())
                }
                Err(e) => {
                    log::info!("flatness decision limited to degree {n_l}: {e}");
                    None
                }
            }
        }
    };
    match level {
        Some(l) => {
            let lifted = embed_poly(&t, poly, l)?;
            let v = is_fp_flat(&t, &lifted)?;
            Ok((t, v, true))
        }
        None => {
            let v = is_fp_flat(&t, poly)?;
            Ok((t, v, false))
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

pub fn embed_poly(tower: &Tower, poly: &LevelPoly, level: usize) -> Result<LevelPoly, FormulaError> {
    let from = poly.level;
    let mut out = LevelPoly::zero(level, poly.nvars);
    for (e, c) in &poly.terms {
        out.terms.insert(e.clone(), tower.embed_coeffs(from, level, c)?);
    }
    Ok(out)
}

/// `constant · Π (λ·X − b)^mult`, for checking a flat verdict.
pub fn reconstruct(tower: &Tower, nvars: usize, verdict: &FlatnessVerdict) -> Result<Option<LevelPoly>, FormulaError> {
    let FlatnessVerdict::Flat { level, constant, factors } = verdict else {
        return Ok(None);
    };
    let lv = tower.level(*level)?;
    let mut acc = LevelPoly::constant(lv, *level, nvars, constant.clone());
    for f in factors {
        let mut lin = LevelPoly::constant(lv, *level, nvars, lv.neg(&f.b));
        for (j, &l) in f.lambda.iter().enumerate() {
            if l != 0 {
                let mut e = vec![0; nvars];
                e[j] = 1;
                lin.add_term(lv, e, lv.scalar(l));
            }
        }
        acc = acc.mul(lv, &lin.pow(lv, f.multiplicity as u32));
    }
    Ok(Some(acc))
}
