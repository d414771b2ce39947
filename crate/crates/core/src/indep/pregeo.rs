//! Finite pregeometries: linear or affine span in F_p^d, or an explicit list
//! of closed sets.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::sets::{self, Set};
use super::IndepError;
use crate::linalg::{self, Row};
use crate::subgroups::Subspace;

/// Largest carrier with a precomputed closure table.
pub const MAX_POINTS: usize = 16;
/// Largest number of candidate maps tried when building automorphisms.
pub const AUTOMORPHISM_GUARD: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureKind {
    Linear,
    Affine,
    Table,
}

/// Serializable description of a pregeometry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PregeoSpec {
    pub kind: ClosureKind,
    #[serde(default)]
    pub p: u32,
    #[serde(default)]
    pub d: usize,
    /// Number of points, for tables.
    #[serde(default)]
    pub carrier: Option<usize>,
    /// Closed sets, for tables; the whole carrier is added if missing.
    #[serde(default)]
    pub closure_table: Option<Vec<Vec<usize>>>,
}

pub type Perm = Vec<u8>;

#[derive(Debug)]
pub struct Pregeometry {
    pub kind: ClosureKind,
    pub p: u32,
    pub d: usize,
    n: usize,
    points: Vec<Row>,
    closure: Vec<Set>,
    rank: Vec<u8>,
    autos: OnceLock<Result<Vec<Perm>, IndepError>>,
}

fn point_index(v: &[u32], p: u32) -> usize {
    v.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

fn all_points(p: u32, d: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let mut v = vec![0u32; d];
    loop {
        out.push(v.clone());
        if !crate::fp::increment(&mut v, p) {
            return out;
        }
    }
}

impl Pregeometry {
    pub fn linear(p: u32, d: usize) -> Result<Self, IndepError> {
        Self::vector_space(ClosureKind::Linear, p, d)
    }

    pub fn affine(p: u32, d: usize) -> Result<Self, IndepError> {
        Self::vector_space(ClosureKind::Affine, p, d)
    }

    fn vector_space(kind: ClosureKind, p: u32, d: usize) -> Result<Self, IndepError> {
        if !crate::fp::is_prime(p) {
            return Err(IndepError::Structure(format!("{p} is not prime")));
        }
        let n = (p as u64).checked_pow(d as u32).unwrap_or(u64::MAX);
        if n > MAX_POINTS as u64 {
            return Err(IndepError::TooLarge(format!("{n} points exceed the limit {MAX_POINTS}")));
        }
        let points = all_points(p, d);
        let closure: Vec<Set> = (0..1u64 << n)
            .map(|s| {
                let idx = sets::to_indices(s);
                match kind {
                    ClosureKind::Affine if idx.is_empty() => 0,
                    ClosureKind::Affine => {
                        let x0 = &points[idx[0]];
                        let diffs = idx[1..]
                            .iter()
                            .map(|&i| linalg::add_rows(&points[i], &linalg::scale_row(x0, p - 1, p), p))
                            .collect();
                        let sub = Subspace::span(p, 0, d, diffs).expect("lengths agree");
                        sub.elements()
                            .iter()
                            .fold(0, |acc, v| acc | sets::singleton(point_index(&linalg::add_rows(v, x0, p), p)))
                    }
                    _ => {
                        let sub = Subspace::span(p, 0, d, idx.iter().map(|&i| points[i].clone()).collect())
                            .expect("lengths agree");
                        sub.elements().iter().fold(0, |acc, v| acc | sets::singleton(point_index(v, p)))
                    }
                }
            })
            .collect();
        Ok(Self::finish(kind, p, d, n as usize, points, closure))
    }

    /// Closure = intersection of the listed closed sets containing the argument.
    pub fn from_closed_sets(n: usize, closed: &[Vec<usize>]) -> Result<Self, IndepError> {
        if n > MAX_POINTS {
            return Err(IndepError::TooLarge(format!("{n} points exceed the limit {MAX_POINTS}")));
        }
        let mut flats: Vec<Set> = Vec::new();
        for f in closed {
            if let Some(&bad) = f.iter().find(|&&i| i >= n) {
                return Err(IndepError::Structure(format!("point {bad} outside a carrier of {n}")));
            }
            flats.push(sets::from_indices(f));
        }
        flats.push(sets::full(n));
        let closure = (0..1u64 << n)
            .map(|s| flats.iter().filter(|&&f| sets::is_subset(s, f)).fold(sets::full(n), |acc, &f| acc & f))
            .collect();
        let g = Self::finish(ClosureKind::Table, 0, 0, n, Vec::new(), closure);
        g.validate()?;
        Ok(g)
    }

    pub fn from_spec(spec: &PregeoSpec) -> Result<Self, IndepError> {
        match spec.kind {
            ClosureKind::Linear => Self::linear(spec.p, spec.d),
            ClosureKind::Affine => Self::affine(spec.p, spec.d),
            ClosureKind::Table => {
                let n = spec.carrier.ok_or_else(|| IndepError::Structure("table needs a carrier size".into()))?;
                Self::from_closed_sets(n, spec.closure_table.as_deref().unwrap_or(&[]))
            }
        }
    }

    fn finish(kind: ClosureKind, p: u32, d: usize, n: usize, points: Vec<Row>, closure: Vec<Set>) -> Self {
        let mut g = Pregeometry { kind, p, d, n, points, closure, rank: Vec::new(), autos: OnceLock::new() };
        g.rank = (0..1u64 << n).map(|s| g.greedy_rank(s) as u8).collect();
        g
    }

    fn greedy_rank(&self, s: Set) -> usize {
        let mut basis = 0;
        for i in sets::iter(s) {
            if !sets::contains(self.cl(basis), i) {
                basis |= sets::singleton(i);
            }
        }
        sets::len(basis)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn carrier(&self) -> Set {
        sets::full(self.n)
    }

    pub fn cl(&self, s: Set) -> Set {
        self.closure[s as usize]
    }

    pub fn rank(&self, s: Set) -> usize {
        self.rank[s as usize] as usize
    }

    pub fn point(&self, i: usize) -> Option<&Row> {
        self.points.get(i)
    }

    /// Index of a vector in the carrier (vector-space kinds only).
    pub fn index_of(&self, v: &[u32]) -> usize {
        point_index(v, self.p)
    }

    /// Checks extensivity, monotonicity, idempotence and exchange exhaustively.
    pub fn validate(&self) -> Result<(), IndepError> {
        for s in 0..1u64 << self.n {
            let c = self.cl(s);
            if !sets::is_subset(s, c) || self.cl(c) != c {
                return Err(IndepError::Structure(format!(
                    "closure of {} is not extensive and idempotent",
                    sets::show(s)
                )));
            }
            for i in 0..self.n {
                let t = s | sets::singleton(i);
                if !sets::is_subset(c, self.cl(t)) {
                    return Err(IndepError::Structure(format!("closure is not monotone at {}", sets::show(s))));
                }
                for j in sets::iter(self.cl(t) & !c) {
                    if !sets::contains(self.cl(s | sets::singleton(j)), i) {
                        return Err(IndepError::Structure(format!(
                            "exchange fails: {j} in cl({} + {i}) but {i} not in cl({} + {j})",
                            sets::show(s),
                            sets::show(s)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Closure-preserving bijections of the carrier.
    pub fn automorphisms(&self) -> Result<&[Perm], IndepError> {
        self.autos.get_or_init(|| self.build_automorphisms()).as_ref().map(|v| v.as_slice()).map_err(Clone::clone)
    }

    fn build_automorphisms(&self) -> Result<Vec<Perm>, IndepError> {
        match self.kind {
            ClosureKind::Linear | ClosureKind::Affine => {
                let (p, d) = (self.p, self.d);
                let mats = (p as u64).checked_pow((d * d) as u32).unwrap_or(u64::MAX);
                let shifts = if self.kind == ClosureKind::Affine { self.n as u64 } else { 1 };
                if mats.saturating_mul(shifts) > AUTOMORPHISM_GUARD {
                    return Err(IndepError::TooLarge(format!("{} candidate maps", mats.saturating_mul(shifts))));
                }
                let mut out = Vec::new();
                let mut entries = vec![0u32; d * d];
                loop {
                    // column j is the image of the j-th unit vector
                    let cols: Vec<Row> = entries.chunks(d.max(1)).map(|c| c.to_vec()).collect();
                    if d == 0 || linalg::rank(&cols, p) == d {
                        for t in 0..shifts as usize {
                            let shift =
                                if self.kind == ClosureKind::Affine { self.points[t].clone() } else { vec![0; d] };
                            let perm: Perm = self
                                .points
                                .iter()
                                .map(|v| {
                                    point_index(&linalg::add_rows(&linalg::mat_vec(&cols, v, p), &shift, p), p) as u8
                                })
                                .collect();
                            out.push(perm);
                        }
                    }
                    if !crate::fp::increment(&mut entries, p) {
                        break;
                    }
                }
                Ok(out)
            }
            ClosureKind::Table => {
                let mut fact: u64 = 1;
                for k in 2..=self.n as u64 {
                    fact = fact.saturating_mul(k);
                }
                if fact > AUTOMORPHISM_GUARD {
                    return Err(IndepError::TooLarge(format!("{fact} permutations")));
                }
                let closed: HashSet<Set> = (0..1u64 << self.n).map(|s| self.cl(s)).collect();
                let mut out = Vec::new();
                let mut perm: Vec<u8> = (0..self.n as u8).collect();
                permutations(&mut perm, 0, &mut |p| {
                    if closed.iter().all(|&f| closed.contains(&apply(p, f))) {
                        out.push(p.to_vec());
                    }
                });
                Ok(out)
            }
        }
    }
}

fn permutations(v: &mut Vec<u8>, k: usize, f: &mut dyn FnMut(&[u8])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

pub fn apply(perm: &[u8], s: Set) -> Set {
    sets::iter(s).fold(0, |acc, i| acc | sets::singleton(perm[i] as usize))
}

pub fn fixes_pointwise(perm: &[u8], s: Set) -> bool {
    sets::iter(s).all(|i| perm[i] as usize == i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_plane_over_f2() {
        let g = Pregeometry::linear(2, 2).unwrap();
        assert_eq!(g.size(), 4);
        assert_eq!(g.cl(0), 1);
        assert_eq!(g.cl(sets::from_indices(&[1, 2])), 0b1111);
        assert_eq!(g.rank(0b1111), 2);
        g.validate().unwrap();
        assert_eq!(g.automorphisms().unwrap().len(), 6);
    }

    #[test]
    fn affine_plane_over_f2() {
        let g = Pregeometry::affine(2, 2).unwrap();
        assert_eq!(g.cl(0), 0);
        assert_eq!(g.cl(sets::from_indices(&[0, 3])), sets::from_indices(&[0, 3]));
        assert_eq!(g.cl(sets::from_indices(&[0, 1, 2])), 0b1111);
        assert_eq!(g.rank(0b1111), 3);
        g.validate().unwrap();
        assert_eq!(g.automorphisms().unwrap().len(), 24);
    }

    #[test]
    fn linear_groups_have_the_right_order() {
        assert_eq!(Pregeometry::linear(2, 3).unwrap().automorphisms().unwrap().len(), 168);
        assert_eq!(Pregeometry::linear(3, 2).unwrap().automorphisms().unwrap().len(), 48);
    }

    #[test]
    fn tables_are_validated() {
        // free matroid on three points
        let g =
            Pregeometry::from_closed_sets(3, &[vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]])
                .unwrap();
        assert_eq!(g.rank(0b111), 3);
        assert_eq!(g.automorphisms().unwrap().len(), 6);
        // 0 lies in cl({2}) but 2 does not lie in cl({0})
        assert!(Pregeometry::from_closed_sets(3, &[vec![], vec![0, 1]]).is_err());
    }

    #[test]
    fn too_many_points() {
        assert!(matches!(Pregeometry::linear(5, 2), Err(IndepError::TooLarge(_))));
    }
}
