//! Sparse multivariate polynomials over F_p and over a tower level.

use std::collections::BTreeMap;
use std::fmt;

use crate::fp;
use crate::tower::Level;

pub type Exps = Vec<u32>;

/// Polynomial with F_p coefficients in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    pub p: u32,
    pub nvars: usize,
    pub terms: BTreeMap<Exps, u32>,
}

impl Poly {
    pub fn zero(p: u32, nvars: usize) -> Poly {
        Poly { p, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(p: u32, nvars: usize, c: u32) -> Poly {
        let mut out = Poly::zero(p, nvars);
        out.add_term(vec![0; nvars], c);
        out
    }

    pub fn var(p: u32, nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut out = Poly::zero(p, nvars);
        out.add_term(e, 1);
        out
    }

    pub fn add_term(&mut self, e: Exps, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot = fp::add(*slot, c, self.p);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, &c)| (e.clone(), fp::neg(c, self.p))).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.p, self.nvars);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &o.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, fp::mul(c1, c2, self.p));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.p, self.nvars, 1);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Whether variable `i` occurs.
    pub fn uses(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    /// Lifts coefficients into a level.
    pub fn to_level(&self, lv: &Level, level: usize) -> LevelPoly {
        let mut out = LevelPoly::zero(level, self.nvars);
        for (e, &c) in &self.terms {
            out.add_term(lv, e.clone(), lv.scalar(c));
        }
        out
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

fn monomial(e: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest total degree first, then reverse lexicographic exponents
        let mut terms: Vec<(&Exps, &u32)> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (e, &c) in terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let m = monomial(e, self.names);
            match (c, m.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{m}")?,
                _ => write!(f, "{c}*{m}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with coefficients in a fixed tower level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPoly {
    pub level: usize,
    pub nvars: usize,
    pub terms: BTreeMap<Exps, Vec<u32>>,
}

impl LevelPoly {
    pub fn zero(level: usize, nvars: usize) -> LevelPoly {
        LevelPoly { level, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(lv: &Level, level: usize, nvars: usize, c: Vec<u32>) -> LevelPoly {
        let mut out = LevelPoly::zero(level, nvars);
        out.add_term(lv, vec![0; nvars], c);
        out
    }

    pub fn var(lv: &Level, level: usize, nvars: usize, i: usize) -> LevelPoly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut out = LevelPoly::zero(level, nvars);
        out.add_term(lv, e, lv.one());
        out
    }

    pub fn add_term(&mut self, lv: &Level, e: Exps, c: Vec<u32>) {
        if Level::is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(slot) => {
                *slot = lv.add(slot, &c);
                if Level::is_zero(slot) {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if no variable occurs.
    pub fn as_constant(&self, lv: &Level) -> Option<Vec<u32>> {
        match self.terms.len() {
            0 => Some(lv.zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn uses(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn add(&self, lv: &Level, o: &LevelPoly) -> LevelPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(lv, e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, lv: &Level) -> LevelPoly {
        LevelPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), lv.neg(c))).collect(), ..self.clone() }
    }

    pub fn sub(&self, lv: &Level, o: &LevelPoly) -> LevelPoly {
        self.add(lv, &o.neg(lv))
    }

    pub fn scale(&self, lv: &Level, c: &[u32]) -> LevelPoly {
        let mut out = LevelPoly::zero(self.level, self.nvars);
        for (e, v) in &self.terms {
            out.add_term(lv, e.clone(), lv.mul(v, c));
        }
        out
    }

    pub fn mul(&self, lv: &Level, o: &LevelPoly) -> LevelPoly {
        let mut out = LevelPoly::zero(self.level, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(lv, e, lv.mul(c1, c2));
            }
        }
        out
    }

    pub fn pow(&self, lv: &Level, k: u32) -> LevelPoly {
        let mut out = LevelPoly::constant(lv, self.level, self.nvars, lv.one());
        for _ in 0..k {
            out = out.mul(lv, self);
        }
        out
    }

    /// Splits by powers of variable `i`: `self = Σ_k out[k] · X_i^k`, where the
    /// parts no longer mention `X_i`.
    pub fn split_var(&self, i: usize) -> Vec<LevelPoly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![LevelPoly::zero(self.level, self.nvars); d + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut e2 = e.clone();
            e2[i] = 0;
            out[k].terms.insert(e2, c.clone());
        }
        out
    }

    /// Substitutes variable `i` by `r` (which must not mention `X_i`).
    pub fn substitute(&self, lv: &Level, i: usize, r: &LevelPoly) -> LevelPoly {
        let parts = self.split_var(i);
        let mut acc = LevelPoly::zero(self.level, self.nvars);
        for part in parts.iter().rev() {
            acc = acc.mul(lv, r).add(lv, part);
        }
        acc
    }

    /// Evaluates at a full assignment of level elements.
    pub fn eval(&self, lv: &Level, values: &[Vec<u32>]) -> Vec<u32> {
        let mut acc = lv.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, v) in e.iter().zip(values) {
                if *k > 0 {
                    t = lv.mul(&t, &lv.pow(v, *k as u64));
                }
            }
            acc = lv.add(&acc, &t);
        }
        acc
    }

    /// Evaluates with only some variables assigned, keeping the rest symbolic.
    pub fn partial_eval(&self, lv: &Level, values: &[Option<Vec<u32>>]) -> LevelPoly {
        let mut out = LevelPoly::zero(self.level, self.nvars);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            let mut e2 = e.clone();
            for (idx, k) in e.iter().enumerate() {
                if *k == 0 {
                    continue;
                }
                if let Some(Some(v)) = values.get(idx) {
                    t = lv.mul(&t, &lv.pow(v, *k as u64));
                    e2[idx] = 0;
                }
            }
            out.add_term(lv, e2, t);
        }
        out
    }

    /// Maps coefficients through `f` (used for embedding into a larger level).
    pub fn map_coeffs(&self, level: usize, f: impl Fn(&[u32]) -> Vec<u32>) -> LevelPoly {
        LevelPoly { level, nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), f(c))).collect() }
    }

    /// Reorders or drops variables: variable `i` becomes `map[i]`; variables
    /// mapped to `None` must not occur.
    pub fn remap(&self, nvars: usize, map: &[Option<usize>]) -> LevelPoly {
        let mut out = LevelPoly::zero(self.level, nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    e2[map[i].expect("dropped variable occurs")] += k;
                }
            }
            out.terms.insert(e2, c.clone());
        }
        out
    }

    pub fn format(&self, names: &[String], fmt_elem: impl Fn(&[u32]) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Exps, &Vec<u32>)> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        terms
            .into_iter()
            .map(|(e, c)| {
                let m = monomial(e, names);
                let cs = fmt_elem(c);
                let scalar_one = cs == "1";
                match (m.is_empty(), scalar_one) {
                    (true, _) => cs,
                    (false, true) => m,
                    (false, false) if cs.contains('+') => format!("({cs})*{m}"),
                    _ => format!("{cs}*{m}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
