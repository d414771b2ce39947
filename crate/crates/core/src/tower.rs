//! A chain of finite fields F_{p^{n_0}} ⊂ F_{p^{n_1}} ⊂ … with explicit embeddings.
//!
//! Level `i` is `F_p[x]/(f_i)` with `f_i` the lexicographically least monic
//! irreducible polynomial of degree `n_i`. The generator of level `i` is sent
//! to the least root of `f_i` inside level `i + 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::fp;
use crate::linalg::{self, Row};
use crate::upoly;

pub const DEFAULT_PRIME_CAP: u32 = 17;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("prime {0} exceeds the supported cap {DEFAULT_PRIME_CAP}")]
    PrimeTooLarge(u32),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("multiplier must be at least 2, got {0}")]
    BadMultiplier(usize),
    #[error("field of size {p}^{n} exceeds the search budget {budget}")]
    BudgetExceeded { p: u32, n: usize, budget: FieldBudget },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("no level with index {0}")]
    NoSuchLevel(usize),
    #[error("cannot embed from level {from} down to level {to}")]
    TargetBelow { from: usize, to: usize },
    #[error("inversion of zero")]
    InverseOfZero,
    #[error("subfield degree {m} does not divide level degree {n}")]
    SubfieldDegree { m: usize, n: usize },
    #[error("cannot parse element {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("corrupt tower record: {0}")]
    Corrupt(String),
}

/// Upper bound on the size `p^n` of any field the tower may contain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FieldBudget(pub BigUint);

impl FieldBudget {
    pub fn pow(base: u32, exp: u32) -> Self {
        FieldBudget(BigUint::from(base).pow(exp))
    }

    pub fn allows(&self, p: u32, n: usize) -> bool {
        BigUint::from(p).pow(n as u32) <= self.0
    }
}

impl Default for FieldBudget {
    fn default() -> Self {
        FieldBudget::pow(2, 24)
    }
}

impl fmt::Display for FieldBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for FieldBudget {
    type Err = String;

    /// Accepts a decimal integer or `base^exp`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some((b, e)) = s.split_once('^') {
            let b: u32 = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
            let e: u32 = e.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            return Ok(FieldBudget::pow(b, e));
        }
        BigUint::from_str(s).map(FieldBudget).map_err(|_| format!("bad budget {s:?}"))
    }
}

impl Serialize for FieldBudget {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldBudget {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerConfig {
    pub p: u32,
    pub n0: usize,
    #[serde(default)]
    pub search_budget: FieldBudget,
}

impl TowerConfig {
    pub fn new(p: u32, n0: usize) -> Self {
        TowerConfig { p, n0, search_budget: FieldBudget::default() }
    }

    pub fn with_budget(mut self, budget: FieldBudget) -> Self {
        self.search_budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), TowerError> {
        if !fp::is_prime(self.p) {
            return Err(TowerError::NotPrime(self.p));
        }
        if self.p > DEFAULT_PRIME_CAP {
            return Err(TowerError::PrimeTooLarge(self.p));
        }
        if self.n0 == 0 {
            return Err(TowerError::ZeroDegree);
        }
        if !self.search_budget.allows(self.p, self.n0) {
            return Err(TowerError::BudgetExceeded { p: self.p, n: self.n0, budget: self.search_budget.clone() });
        }
        Ok(())
    }
}

/// One field `F_p[x]/(f)` of the chain, with its Frobenius matrix cached.
#[derive(Clone, Debug)]
pub struct Level {
    pub p: u32,
    pub n: usize,
    pub poly: Vec<u32>,
    frob: Vec<Row>,
}

impl Level {
    pub fn new(p: u32, poly: Vec<u32>) -> Level {
        let n = poly.len() - 1;
        let mut lv = Level { p, n, poly, frob: Vec::new() };
        let xp = fp::poly_powmod(&[0, 1], p as u64, &lv.poly, p);
        let mut cur = vec![1u32];
        let mut frob = Vec::with_capacity(n);
        for _ in 0..n {
            frob.push(lv.pad(cur.clone()));
            cur = fp::poly_mulmod(&cur, &xp, &lv.poly, p);
        }
        lv.frob = frob;
        lv
    }

    fn pad(&self, mut v: Vec<u32>) -> Vec<u32> {
        v.resize(self.n, 0);
        v
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.n]
    }

    pub fn one(&self) -> Vec<u32> {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u32) -> Vec<u32> {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    /// The class of `x`, or the scalar `x` itself when the level is F_p with `f = x`.
    pub fn generator(&self) -> Vec<u32> {
        fp::poly_rem(&[0, 1], &self.poly, self.p).into_iter().chain(std::iter::repeat(0)).take(self.n).collect()
    }

    pub fn is_zero(a: &[u32]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn is_scalar(a: &[u32]) -> bool {
        a.iter().skip(1).all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| fp::add(x, y, self.p)).collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| fp::sub(x, y, self.p)).collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| fp::neg(x, self.p)).collect()
    }

    pub fn scale(&self, a: &[u32], c: u32) -> Vec<u32> {
        a.iter().map(|&x| fp::mul(x, c, self.p)).collect()
    }

    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        if Level::is_scalar(a) {
            return self.scale(b, a[0]);
        }
        if Level::is_scalar(b) {
            return self.scale(a, b[0]);
        }
        self.pad(fp::poly_mulmod(a, b, &self.poly, self.p))
    }

    pub fn inv(&self, a: &[u32]) -> Option<Vec<u32>> {
        if Level::is_zero(a) {
            return None;
        }
        if Level::is_scalar(a) {
            return Some(self.scalar(fp::inv(a[0], self.p)));
        }
        fp::poly_invmod(a, &self.poly, self.p).map(|v| self.pad(v))
    }

    pub fn pow(&self, a: &[u32], mut e: u64) -> Vec<u32> {
        let mut base = a.to_vec();
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        r
    }

    /// `a^p`, computed as a matrix-vector product.
    pub fn frob(&self, a: &[u32]) -> Vec<u32> {
        linalg::mat_vec(&self.frob, a, self.p)
    }

    pub fn frob_iter(&self, a: &[u32], e: usize) -> Vec<u32> {
        let mut r = a.to_vec();
        for _ in 0..e % self.n.max(1) {
            r = self.frob(&r);
        }
        r
    }

    /// Columns of the F_p-linear map `a ↦ a^{p^e}`.
    pub fn frob_matrix(&self, e: usize) -> Vec<Row> {
        let mut result: Vec<Row> = (0..self.n)
            .map(|j| {
                let mut v = self.zero();
                v[j] = 1;
                v
            })
            .collect();
        let mut base = self.frob.clone();
        let mut e = e % self.n.max(1);
        while e > 0 {
            if e & 1 == 1 {
                result = linalg::compose(&base, &result, self.p);
            }
            e >>= 1;
            if e > 0 {
                base = linalg::compose(&base, &base, self.p);
            }
        }
        result
    }

    /// Evaluates a polynomial with F_p coefficients at `a`.
    pub fn eval_fp_poly(&self, f: &[u32], a: &[u32]) -> Vec<u32> {
        let mut acc = self.zero();
        for &c in f.iter().rev() {
            acc = self.mul(&acc, a);
            acc[0] = fp::add(acc[0], c, self.p);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TowerElement {
    pub level: usize,
    pub coeffs: Vec<u32>,
}

impl TowerElement {
    pub fn is_zero(&self) -> bool {
        Level::is_zero(&self.coeffs)
    }

    /// Order by coefficient vectors read as base-p integers.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        self.level.cmp(&other.level).then_with(|| fp::cmp_base_p(&self.coeffs, &other.coeffs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub poly: Vec<u32>,
}

/// Serializable form of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerRecord {
    pub levels: Vec<LevelRecord>,
    pub embeddings: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct Tower {
    p: u32,
    budget: FieldBudget,
    levels: Vec<Level>,
    embeddings: Vec<Vec<u32>>,
    // images of x^j (j < n_i) of level i inside level i + 1
    embed_cols: Vec<Vec<Row>>,
}

impl Tower {
    pub fn create(config: &TowerConfig) -> Result<Tower, TowerError> {
        config.validate()?;
        let poly = fp::least_irreducible(config.n0, config.p);
        log::debug!("tower base level degree {} poly {:?}", config.n0, poly);
        Ok(Tower {
            p: config.p,
            budget: config.search_budget.clone(),
            levels: vec![Level::new(config.p, poly)],
            embeddings: Vec::new(),
            embed_cols: Vec::new(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn budget(&self) -> &FieldBudget {
        &self.budget
    }

    pub fn set_budget(&mut self, budget: FieldBudget) {
        self.budget = budget;
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> Result<&Level, TowerError> {
        self.levels.get(i).ok_or(TowerError::NoSuchLevel(i))
    }

    pub fn degree(&self, i: usize) -> Result<usize, TowerError> {
        Ok(self.level(i)?.n)
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.n).collect()
    }

    pub fn level_of_degree(&self, n: usize) -> Option<usize> {
        self.levels.iter().position(|l| l.n == n)
    }

    pub fn embedding(&self, i: usize) -> Option<&[u32]> {
        self.embeddings.get(i).map(|v| v.as_slice())
    }

    /// Appends a level of degree `n_last · multiplier`, returning a new tower.
    pub fn grow(&self, multiplier: usize) -> Result<Tower, TowerError> {
        if multiplier < 2 {
            return Err(TowerError::BadMultiplier(multiplier));
        }
        let last = &self.levels[self.top()];
        let n = last.n * multiplier;
        if !self.budget.allows(self.p, n) {
            return Err(TowerError::BudgetExceeded { p: self.p, n, budget: self.budget.clone() });
        }
        let poly = fp::least_irreducible(n, self.p);
        let new = Level::new(self.p, poly);
        let root = upoly::least_root_of_fp_poly(&new, &last.poly);
        log::debug!("grew tower to degree {n}");
        let mut cols = Vec::with_capacity(last.n);
        let mut cur = new.one();
        for _ in 0..last.n {
            cols.push(cur.clone());
            cur = new.mul(&cur, &root);
        }
        let mut out = self.clone();
        out.levels.push(new);
        out.embeddings.push(root);
        out.embed_cols.push(cols);
        Ok(out)
    }

    /// Grows until the top level has degree at least `min_degree`, using the
    /// smallest multiplier that reaches it in one step.
    pub fn grow_to_at_least(&self, min_degree: usize) -> Result<Tower, TowerError> {
        let n = self.levels[self.top()].n;
        if n >= min_degree {
            return Ok(self.clone());
        }
        let m = min_degree.div_ceil(n).max(2);
        self.grow(m)
    }

    pub fn element(&self, level: usize, coeffs: Vec<u32>) -> Result<TowerElement, TowerError> {
        let n = self.degree(level)?;
        if coeffs.len() != n || coeffs.iter().any(|&c| c >= self.p) {
            return Err(TowerError::Parse {
                text: format!("{coeffs:?}"),
                reason: format!("expected {n} residues mod {}", self.p),
            });
        }
        Ok(TowerElement { level, coeffs })
    }

    pub fn zero(&self, level: usize) -> Result<TowerElement, TowerError> {
        Ok(TowerElement { level, coeffs: self.level(level)?.zero() })
    }

    pub fn one(&self, level: usize) -> Result<TowerElement, TowerError> {
        Ok(TowerElement { level, coeffs: self.level(level)?.one() })
    }

    pub fn generator(&self, level: usize) -> Result<TowerElement, TowerError> {
        Ok(TowerElement { level, coeffs: self.level(level)?.generator() })
    }

    fn same(&self, a: &TowerElement, b: &TowerElement) -> Result<&Level, TowerError> {
        if a.level != b.level {
            return Err(TowerError::LevelMismatch(a.level, b.level));
        }
        self.level(a.level)
    }

    pub fn add(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement, TowerError> {
        let lv = self.same(a, b)?;
        Ok(TowerElement { level: a.level, coeffs: lv.add(&a.coeffs, &b.coeffs) })
    }

    pub fn sub(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement, TowerError> {
        let lv = self.same(a, b)?;
        Ok(TowerElement { level: a.level, coeffs: lv.sub(&a.coeffs, &b.coeffs) })
    }

    pub fn neg(&self, a: &TowerElement) -> Result<TowerElement, TowerError> {
        let lv = self.level(a.level)?;
        Ok(TowerElement { level: a.level, coeffs: lv.neg(&a.coeffs) })
    }

    pub fn mul(&self, a: &TowerElement, b: &TowerElement) -> Result<TowerElement, TowerError> {
        let lv = self.same(a, b)?;
        Ok(TowerElement { level: a.level, coeffs: lv.mul(&a.coeffs, &b.coeffs) })
    }

    pub fn inv(&self, a: &TowerElement) -> Result<TowerElement, TowerError> {
        let lv = self.level(a.level)?;
        let coeffs = lv.inv(&a.coeffs).ok_or(TowerError::InverseOfZero)?;
        Ok(TowerElement { level: a.level, coeffs })
    }

    pub fn pow(&self, a: &TowerElement, e: u64) -> Result<TowerElement, TowerError> {
        let lv = self.level(a.level)?;
        Ok(TowerElement { level: a.level, coeffs: lv.pow(&a.coeffs, e) })
    }

    /// Coordinates of the image of level-`from` coordinates in level `to`.
    pub fn embed_coeffs(&self, from: usize, to: usize, coeffs: &[u32]) -> Result<Vec<u32>, TowerError> {
        if to < from {
            return Err(TowerError::TargetBelow { from, to });
        }
        self.level(to)?;
        let mut v = coeffs.to_vec();
        for i in from..to {
            v = linalg::mat_vec(&self.embed_cols[i], &v, self.p);
        }
        Ok(v)
    }

    pub fn embed(&self, x: &TowerElement, target: usize) -> Result<TowerElement, TowerError> {
        Ok(TowerElement { level: target, coeffs: self.embed_coeffs(x.level, target, &x.coeffs)? })
    }

    pub fn frobenius(&self, x: &TowerElement, e: usize) -> Result<TowerElement, TowerError> {
        let lv = self.level(x.level)?;
        Ok(TowerElement { level: x.level, coeffs: lv.frob_iter(&x.coeffs, e) })
    }

    pub fn in_subfield(&self, x: &TowerElement, m: usize) -> Result<bool, TowerError> {
        let lv = self.level(x.level)?;
        if m == 0 || lv.n % m != 0 {
            return Err(TowerError::SubfieldDegree { m, n: lv.n });
        }
        Ok(lv.frob_iter(&x.coeffs, m) == x.coeffs)
    }

    /// RREF basis of F_{p^m} inside level `level`, as the kernel of `Frob^m − id`.
    pub fn subfield_basis(&self, level: usize, m: usize) -> Result<Vec<Row>, TowerError> {
        let lv = self.level(level)?;
        if m == 0 || lv.n % m != 0 {
            return Err(TowerError::SubfieldDegree { m, n: lv.n });
        }
        if m == lv.n {
            return Ok((0..lv.n)
                .map(|j| {
                    let mut v = lv.zero();
                    v[j] = 1;
                    v
                })
                .collect());
        }
        let cols = lv.frob_matrix(m);
        // rows of (F − I): entry (i, j) is cols[j][i] − δ_ij
        let rows: Vec<Row> = (0..lv.n)
            .map(|i| {
                (0..lv.n)
                    .map(|j| {
                        let c = cols[j][i];
                        if i == j {
                            fp::sub(c, 1, self.p)
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        let ker = linalg::kernel(rows, lv.n, self.p);
        Ok(linalg::rref(ker, self.p).0)
    }

    /// True iff no nontrivial F_p-combination of `tuple` lies in F_{p^m}.
    pub fn fp_independent_over(&self, tuple: &[TowerElement], m: usize) -> Result<bool, TowerError> {
        let Some(first) = tuple.first() else {
            return Ok(true);
        };
        if let Some(bad) = tuple.iter().find(|t| t.level != first.level) {
            return Err(TowerError::LevelMismatch(first.level, bad.level));
        }
        let mut rows = self.subfield_basis(first.level, m)?;
        let base = rows.len();
        rows.extend(tuple.iter().map(|t| t.coeffs.clone()));
        Ok(linalg::rank(&rows, self.p) == base + tuple.len())
    }

    /// Parses `[c0, c1, ...]` or an expression in the generator `w`, such as `w^2+2*w+1`.
    pub fn parse_element(&self, text: &str, level: usize) -> Result<TowerElement, TowerError> {
        let lv = self.level(level)?;
        let err = |reason: &str| TowerError::Parse { text: text.to_string(), reason: reason.to_string() };
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err("empty"));
        }
        if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let mut v = Vec::new();
            if !inner.is_empty() {
                for part in inner.split(',') {
                    let c: i64 = part.parse().map_err(|_| err("bad coefficient"))?;
                    v.push(fp::reduce_i64(c, self.p));
                }
            }
            if v.len() > lv.n {
                return Err(err("too many coefficients for level"));
            }
            v.resize(lv.n, 0);
            return Ok(TowerElement { level, coeffs: v });
        }
        let mut poly: Vec<u32> = Vec::new();
        let bytes = t.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign: i64 = 1;
            while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                i += 1;
            }
            let term = &t[start..i];
            if term.is_empty() {
                return Err(err("dangling sign"));
            }
            let (coef, exp) = parse_term(term).ok_or_else(|| err("bad term"))?;
            if poly.len() <= exp {
                poly.resize(exp + 1, 0);
            }
            poly[exp] = fp::add(poly[exp], fp::reduce_i64(sign * coef, self.p), self.p);
        }
        fp::trim(&mut poly);
        let mut v = fp::poly_rem(&poly, &lv.poly, self.p);
        v.resize(lv.n, 0);
        Ok(TowerElement { level, coeffs: v })
    }

    pub fn format_element(&self, x: &TowerElement) -> String {
        let mut parts = Vec::new();
        for (i, &c) in x.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }

    /// All nonzero elements of level `level`, in counter order (only for small levels).
    pub fn elements(&self, level: usize) -> Result<Vec<TowerElement>, TowerError> {
        let n = self.degree(level)?;
        let mut v = vec![0u32; n];
        let mut out = vec![TowerElement { level, coeffs: v.clone() }];
        while fp::increment(&mut v, self.p) {
            out.push(TowerElement { level, coeffs: v.clone() });
        }
        Ok(out)
    }

    pub fn record(&self) -> TowerRecord {
        TowerRecord {
            levels: self.levels.iter().map(|l| LevelRecord { n: l.n, poly: l.poly.clone() }).collect(),
            embeddings: self.embeddings.clone(),
        }
    }

    /// Rebuilds a tower from its record, checking every structural invariant.
    pub fn from_record(p: u32, budget: FieldBudget, rec: &TowerRecord) -> Result<Tower, TowerError> {
        let corrupt = |s: String| TowerError::Corrupt(s);
        let first = rec.levels.first().ok_or_else(|| corrupt("no levels".into()))?;
        TowerConfig { p, n0: first.n, search_budget: budget.clone() }.validate()?;
        if rec.embeddings.len() + 1 != rec.levels.len() {
            return Err(corrupt("embedding count must be one less than level count".into()));
        }
        let mut levels = Vec::new();
        for (i, l) in rec.levels.iter().enumerate() {
            if l.poly.len() != l.n + 1 || l.poly[l.n] != 1 || l.poly.iter().any(|&c| c >= p) {
                return Err(corrupt(format!("level {i}: polynomial is not monic of degree {}", l.n)));
            }
            if !fp::is_irreducible(&l.poly, p) {
                return Err(corrupt(format!("level {i}: polynomial is reducible")));
            }
            if i > 0 {
                let prev = rec.levels[i - 1].n;
                if l.n <= prev || l.n % prev != 0 {
                    return Err(corrupt(format!("level {i}: degree {} not a proper multiple of {prev}", l.n)));
                }
            }
            levels.push(Level::new(p, l.poly.clone()));
        }
        let mut embed_cols = Vec::new();
        for (i, e) in rec.embeddings.iter().enumerate() {
            let up = &levels[i + 1];
            if e.len() != up.n || e.iter().any(|&c| c >= p) {
                return Err(corrupt(format!("embedding {i}: wrong length")));
            }
            if !Level::is_zero(&up.eval_fp_poly(&levels[i].poly, e)) {
                return Err(corrupt(format!("embedding {i}: not a root of the level polynomial")));
            }
            let mut cols = Vec::new();
            let mut cur = up.one();
            for _ in 0..levels[i].n {
                cols.push(cur.clone());
                cur = up.mul(&cur, e);
            }
            embed_cols.push(cols);
        }
        Ok(Tower { p, budget, levels, embeddings: rec.embeddings.clone(), embed_cols })
    }
}

fn parse_term(term: &str) -> Option<(i64, usize)> {
    let mut coef: i64 = 1;
    let mut exp = 0usize;
    for factor in term.split('*') {
        if let Some(rest) = factor.strip_prefix('w') {
            let e = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
            exp += e;
        } else {
            coef = coef.checked_mul(factor.parse().ok()?)?;
        }
    }
    Some((coef, exp))
}
