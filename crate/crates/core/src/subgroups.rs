//! Additive subgroups of F_{p^n}, i.e. F_p-subspaces, in canonical echelon form.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fp;
use crate::linalg::{self, Row};
use crate::tower::{Tower, TowerElement, TowerError};

pub const ENUMERATION_GUARD: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("subspaces live at different levels ({0} vs {1})")]
    LevelMismatch(usize, usize),
    #[error("vector of length {got} in ambient dimension {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("enumeration of {count} subspaces exceeds the guard {guard}")]
    GuardExceeded { count: u128, guard: u128 },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// An F_p-subspace of F_p^n stored as its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    pub p: u32,
    pub level: usize,
    pub n: usize,
    pub basis: Vec<Row>,
}

impl Subspace {
    pub fn zero(p: u32, level: usize, n: usize) -> Subspace {
        Subspace { p, level, n, basis: Vec::new() }
    }

    pub fn full(p: u32, level: usize, n: usize) -> Subspace {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        Subspace { p, level, n, basis }
    }

    pub fn span(p: u32, level: usize, n: usize, vectors: Vec<Row>) -> Result<Subspace, SubspaceError> {
        if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
            return Err(SubspaceError::LengthMismatch { got: bad.len(), want: n });
        }
        let vectors = vectors.into_iter().map(|v| v.into_iter().map(|c| c % p).collect()).collect();
        Ok(Subspace { p, level, n, basis: linalg::rref(vectors, p).0 })
    }

    /// Span of tower elements sharing one level.
    pub fn span_elements(tower: &Tower, level: usize, xs: &[TowerElement]) -> Result<Subspace, SubspaceError> {
        let n = tower.degree(level)?;
        if let Some(bad) = xs.iter().find(|x| x.level != level) {
            return Err(SubspaceError::LevelMismatch(level, bad.level));
        }
        Subspace::span(tower.p(), level, n, xs.iter().map(|x| x.coeffs.clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r.iter().position(|&c| c != 0).expect("basis rows are nonzero")).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.level != other.level {
            return Err(SubspaceError::LevelMismatch(self.level, other.level));
        }
        if self.n != other.n {
            return Err(SubspaceError::LengthMismatch { got: other.n, want: self.n });
        }
        Ok(())
    }

    pub fn reduce(&self, v: &[u32]) -> Row {
        linalg::reduce(v, &self.basis, &self.pivots(), self.p)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.n && linalg::is_zero(&self.reduce(v))
    }

    pub fn contains_element(&self, x: &TowerElement) -> Result<bool, SubspaceError> {
        if x.level != self.level {
            return Err(SubspaceError::LevelMismatch(self.level, x.level));
        }
        Ok(self.contains(&x.coeffs))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Subspace { basis: linalg::rref(rows, self.p).0, ..self.clone() })
    }

    pub fn with_vectors(&self, vs: &[Row]) -> Result<Subspace, SubspaceError> {
        if let Some(bad) = vs.iter().find(|v| v.len() != self.n) {
            return Err(SubspaceError::LengthMismatch { got: bad.len(), want: self.n });
        }
        let mut rows = self.basis.clone();
        rows.extend(vs.iter().cloned());
        Ok(Subspace { basis: linalg::rref(rows, self.p).0, ..self.clone() })
    }

    /// `span(vs) ∩ self`, cheap when `vs` is short: combinations of `vs` that
    /// reduce to zero modulo `self`.
    pub fn meet_span(&self, vs: &[Row]) -> Result<Subspace, SubspaceError> {
        if let Some(bad) = vs.iter().find(|v| v.len() != self.n) {
            return Err(SubspaceError::LengthMismatch { got: bad.len(), want: self.n });
        }
        let reduced: Vec<Row> = vs.iter().map(|v| self.reduce(v)).collect();
        let transposed: Vec<Row> = (0..self.n).map(|j| reduced.iter().map(|r| r[j]).collect()).collect();
        let combos = linalg::kernel(transposed, vs.len(), self.p);
        let rows = combos
            .iter()
            .map(|c| {
                let mut acc = vec![0; self.n];
                for (v, &ci) in vs.iter().zip(c) {
                    if ci != 0 {
                        acc = linalg::add_rows(&acc, &linalg::scale_row(v, ci, self.p), self.p);
                    }
                }
                acc
            })
            .collect();
        Subspace::span(self.p, self.level, self.n, rows)
    }

    /// Zassenhaus: row-reduce `[u | u]` and `[v | 0]`; rows with vanishing
    /// left half carry a basis of the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.p, self.level, self.n));
        }
        let n = self.n;
        let mut rows: Vec<Row> = Vec::with_capacity(self.dim() + other.dim());
        for u in &self.basis {
            let mut r = u.clone();
            r.extend_from_slice(u);
            rows.push(r);
        }
        for v in &other.basis {
            let mut r = v.clone();
            r.extend(std::iter::repeat_n(0, n));
            rows.push(r);
        }
        let (red, _) = linalg::rref(rows, self.p);
        let inter: Vec<Row> = red.into_iter().filter(|r| linalg::is_zero(&r[..n])).map(|r| r[n..].to_vec()).collect();
        Ok(Subspace { basis: linalg::rref(inter, self.p).0, ..self.clone() })
    }

    /// All elements, in counter order over the basis coefficients.
    pub fn elements(&self) -> Vec<Row> {
        let k = self.dim();
        let mut coef = vec![0u32; k];
        let mut out = vec![vec![0u32; self.n]];
        while fp::increment(&mut coef, self.p) {
            let mut v = vec![0u32; self.n];
            for (c, row) in coef.iter().zip(&self.basis) {
                if *c == 0 {
                    continue;
                }
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = fp::add(*x, fp::mul(*c, r, self.p), self.p);
                }
            }
            out.push(v);
        }
        out
    }

    /// Image under an F_p-linear map given by image columns of length `n_out`.
    pub fn image(&self, cols: &[Row], level: usize, n_out: usize) -> Subspace {
        let rows = self.basis.iter().map(|v| linalg::mat_vec(cols, v, self.p)).collect();
        Subspace { p: self.p, level, n: n_out, basis: linalg::rref(rows, self.p).0 }
    }

    /// Ordering key used by enumeration: rows in turn, each read as a base-p integer.
    pub fn cmp_canonical(&self, other: &Subspace) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            for (a, b) in self.basis.iter().zip(&other.basis) {
                match fp::cmp_base_p(a, b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

/// `G ∩ F_{p^m}`, with the subfield computed as the Frobenius kernel.
pub fn intersect_subfield(tower: &Tower, g: &Subspace, m: usize) -> Result<Subspace, SubspaceError> {
    let basis = tower.subfield_basis(g.level, m)?;
    let sub = Subspace { p: g.p, level: g.level, n: g.n, basis };
    g.intersect(&sub)
}

pub fn lift(tower: &Tower, u: &Subspace, target: usize) -> Result<Subspace, SubspaceError> {
    let n = tower.degree(target)?;
    let rows = u.basis.iter().map(|v| tower.embed_coeffs(u.level, target, v)).collect::<Result<Vec<_>, _>>()?;
    Ok(Subspace { p: u.p, level: target, n, basis: linalg::rref(rows, u.p).0 })
}

/// Modular law `A ∩ (B + C) = A ∩ (B + C ∩ (A + B))`.
pub fn modular_law_check(a: &Subspace, b: &Subspace, c: &Subspace) -> Result<bool, SubspaceError> {
    let lhs = a.intersect(&b.sum(c)?)?;
    let rhs = a.intersect(&b.sum(&c.intersect(&a.sum(b)?)?)?)?;
    Ok(lhs == rhs)
}

pub fn gaussian_binomial(n: usize, k: usize, p: u32) -> u128 {
    if k > n {
        return 0;
    }
    let q = p as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

pub fn count_subspaces(p: u32, n: usize) -> u128 {
    (0..=n).map(|k| gaussian_binomial(n, k, p)).sum()
}

/// Every subspace of F_p^n exactly once, by dimension and then canonical order.
pub fn enumerate_subspaces(p: u32, n: usize) -> Result<impl Iterator<Item = Subspace>, SubspaceError> {
    let count = count_subspaces(p, n);
    if count > ENUMERATION_GUARD {
        return Err(SubspaceError::GuardExceeded { count, guard: ENUMERATION_GUARD });
    }
    Ok((0..=n).flat_map(move |k| {
        let mut v = echelon_forms(p, n, k);
        v.sort_by(|a, b| a.cmp_canonical(b));
        v.into_iter()
    }))
}

fn echelon_forms(p: u32, n: usize, k: usize) -> Vec<Subspace> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    pivot_sets(n, k, 0, &mut pivots, &mut |piv| {
        // free slots: positions right of each pivot that are not pivot columns
        let slots: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| ((pc + 1)..n).filter(|c| !piv.contains(c)).map(move |c| (r, c)))
            .collect();
        let mut vals = vec![0u32; slots.len()];
        loop {
            let mut basis = vec![vec![0u32; n]; k];
            for (r, &pc) in piv.iter().enumerate() {
                basis[r][pc] = 1;
            }
            for (&(r, c), &v) in slots.iter().zip(&vals) {
                basis[r][c] = v;
            }
            out.push(Subspace { p, level: 0, n, basis });
            if !fp::increment(&mut vals, p) {
                break;
            }
        }
    });
    out
}

fn pivot_sets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        pivot_sets(n, k, c + 1, cur, f);
        cur.pop();
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, p: u32, n: usize) -> Row {
    (0..n).map(|_| rng.gen_range(0..p)).collect()
}

/// A uniformly random subspace of the given dimension (rejection on rank).
pub fn random_subspace<R: Rng>(rng: &mut R, p: u32, n: usize, dim: usize) -> Subspace {
    assert!(dim <= n);
    loop {
        let rows: Vec<Row> = (0..dim).map(|_| random_vector(rng, p, n)).collect();
        let (basis, _) = linalg::rref(rows, p);
        if basis.len() == dim {
            return Subspace { p, level: 0, n, basis };
        }
    }
}

/// A random subspace whose dimension is drawn uniformly from `0..=n`.
pub fn random_subspace_any<R: Rng>(rng: &mut R, p: u32, n: usize) -> Subspace {
    let dim = rng.gen_range(0..=n);
    random_subspace(rng, p, n, dim)
}
