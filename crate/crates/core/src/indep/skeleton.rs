//! Subspace skeletons: weak and strong independence as lattice conditions on
//! subspaces of F_p^d with a distinguished subgroup Γ.
//!
//! A closed set is a subspace closed under a list of rules "if every premise
//! lies in S then so does the conclusion"; with no rules, closure is span.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sets::{self, Set};
use super::IndepError;
use crate::linalg::Row;
use crate::subgroups::Subspace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub premises: Vec<Row>,
    pub conclusion: Row,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RuleClosure {
    pub rules: Vec<Rule>,
}

impl RuleClosure {
    pub fn span() -> Self {
        RuleClosure { rules: Vec::new() }
    }

    pub fn cl(&self, s: &Subspace) -> Subspace {
        let mut cur = s.clone();
        loop {
            let fire: Vec<Row> = self
                .rules
                .iter()
                .filter(|r| !cur.contains(&r.conclusion) && r.premises.iter().all(|v| cur.contains(v)))
                .map(|r| r.conclusion.clone())
                .collect();
            if fire.is_empty() {
                return cur;
            }
            cur = cur.with_vectors(&fire).expect("rule vectors match the ambient dimension");
        }
    }

    pub fn is_closed(&self, s: &Subspace) -> bool {
        self.rules.iter().all(|r| s.contains(&r.conclusion) || !r.premises.iter().all(|v| s.contains(v)))
    }
}

fn sum(a: &Subspace, b: &Subspace) -> Subspace {
    a.sum(b).expect("subspaces share the ambient space")
}

fn meet(a: &Subspace, b: &Subspace) -> Subspace {
    a.intersect(b).expect("subspaces share the ambient space")
}

/// `E_AC ∩ E_BC = E_C`.
pub fn lattice_flag(ac: &Subspace, bc: &Subspace, c: &Subspace) -> bool {
    meet(ac, bc) == *c
}

/// Weak independence from the closed sets `E_AC`, `E_BC`, `E_C`.
pub fn weak_core(gamma: &Subspace, ac: &Subspace, bc: &Subspace, c: &Subspace) -> bool {
    lattice_flag(ac, bc, c) && meet(gamma, &sum(ac, bc)) == sum(&meet(gamma, ac), &meet(gamma, bc))
}

/// Strong independence from `E_AC`, `E_BC`, `E_ABC`, `E_C`.
pub fn strong_core(gamma: &Subspace, ac: &Subspace, bc: &Subspace, abc: &Subspace, c: &Subspace) -> bool {
    lattice_flag(ac, bc, c) && meet(gamma, abc) == sum(&meet(gamma, ac), &meet(gamma, bc))
}

/// A finite carrier of atoms with a monotone map from atom sets to closed
/// subspaces `E_S`, either generated by atom vectors or given outright.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub p: u32,
    pub d: usize,
    pub gamma: Subspace,
    n: usize,
    closed: Vec<Subspace>,
}

pub const MAX_ATOMS: usize = 12;

impl Skeleton {
    /// `E_S` is the closure of the span of the atom vectors in `S`.
    pub fn from_atoms(
        p: u32,
        d: usize,
        gamma: Subspace,
        closure: &RuleClosure,
        atoms: &[Row],
    ) -> Result<Self, IndepError> {
        if atoms.len() > MAX_ATOMS {
            return Err(IndepError::TooLarge(format!("{} atoms exceed the limit {MAX_ATOMS}", atoms.len())));
        }
        if atoms.iter().any(|a| a.len() != d) {
            return Err(IndepError::Structure(format!("atoms must have length {d}")));
        }
        let closed = (0..1u64 << atoms.len())
            .map(|s| {
                let rows = sets::iter(s).map(|i| atoms[i].clone()).collect();
                Ok(closure.cl(&Subspace::span(p, 0, d, rows)?))
            })
            .collect::<Result<Vec<_>, IndepError>>()?;
        Self::from_closed(p, d, gamma, closed)
    }

    /// `closed[S]` for every atom set `S`; must be monotone.
    pub fn from_closed(p: u32, d: usize, gamma: Subspace, closed: Vec<Subspace>) -> Result<Self, IndepError> {
        let n = closed.len().trailing_zeros() as usize;
        if closed.len() != 1 << n || n > MAX_ATOMS {
            return Err(IndepError::Structure(format!(
                "{} closed sets is not a power of two up to 2^{MAX_ATOMS}",
                closed.len()
            )));
        }
        if gamma.n != d || closed.iter().any(|e| e.n != d || e.p != p) {
            return Err(IndepError::Structure(format!("subspaces must live in F_{p}^{d}")));
        }
        for s in 0..closed.len() {
            for i in 0..n {
                let t = s | 1 << i;
                if !closed[t].contains_subspace(&closed[s]) {
                    return Err(IndepError::Structure(format!(
                        "E_S is not monotone: E_{} is not inside E_{}",
                        sets::show(s as Set),
                        sets::show(t as Set)
                    )));
                }
            }
        }
        Ok(Skeleton { p, d, gamma, n, closed })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn e(&self, s: Set) -> &Subspace {
        &self.closed[s as usize]
    }

    /// Atoms whose own closed set lies in that of `s`.
    pub fn cl(&self, s: Set) -> Set {
        let e = self.e(s);
        (0..self.n)
            .filter(|&i| e.contains_subspace(self.e(sets::singleton(i))))
            .fold(0, |acc, i| acc | sets::singleton(i))
    }

    pub fn weak(&self, a: Set, b: Set, c: Set) -> bool {
        weak_core(&self.gamma, self.e(a | c), self.e(b | c), self.e(c))
    }

    pub fn strong(&self, a: Set, b: Set, c: Set) -> bool {
        strong_core(&self.gamma, self.e(a | c), self.e(b | c), self.e(a | b | c), self.e(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tuples {
    pub r_a: Vec<Row>,
    pub r_b: Vec<Row>,
}

/// Labelled configuration: label sets (strings of letters) map to bases.
/// Undeclared label sets get the closure of the sum of their letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonConfig {
    pub p: u32,
    pub d: usize,
    pub labels: BTreeMap<String, Vec<Row>>,
    pub gamma: Vec<Row>,
    #[serde(default)]
    pub rules: Vec<Rule>,
    #[serde(default)]
    pub families: BTreeMap<String, Vec<Vec<Row>>>,
    #[serde(default)]
    pub tuples: Option<Tuples>,
}

pub fn normalize_label(s: &str) -> String {
    let mut cs: Vec<char> = s.chars().filter(|c| c.is_ascii_alphabetic()).collect();
    cs.sort_unstable();
    cs.dedup();
    cs.into_iter().collect()
}

fn union_label(a: &str, b: &str) -> String {
    normalize_label(&format!("{a}{b}"))
}

impl SkeletonConfig {
    fn span(&self, rows: &[Row]) -> Result<Subspace, IndepError> {
        Ok(Subspace::span(self.p, 0, self.d, rows.to_vec())?)
    }

    pub fn gamma(&self) -> Result<Subspace, IndepError> {
        self.span(&self.gamma)
    }

    pub fn closure(&self) -> RuleClosure {
        RuleClosure { rules: self.rules.clone() }
    }

    fn declared(&self) -> BTreeMap<String, &Vec<Row>> {
        self.labels.iter().map(|(k, v)| (normalize_label(k), v)).collect()
    }

    /// `E_S` for a label set.
    pub fn label(&self, s: &str) -> Result<Subspace, IndepError> {
        let key = normalize_label(s);
        let declared = self.declared();
        if let Some(rows) = declared.get(&key) {
            return self.span(rows);
        }
        let mut acc = match declared.get("") {
            Some(rows) => self.span(rows)?,
            None => Subspace::zero(self.p, 0, self.d),
        };
        for ch in key.chars() {
            let rows = declared.get(&ch.to_string()).ok_or_else(|| IndepError::MissingLabel(ch.to_string()))?;
            acc = sum(&acc, &self.span(rows)?);
        }
        Ok(self.closure().cl(&acc))
    }

    pub fn alphabet(&self) -> Vec<char> {
        let mut cs: Vec<char> =
            self.labels.keys().flat_map(|k| normalize_label(k).chars().collect::<Vec<_>>()).collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    /// Checks that `S ⊆ T` implies `E_S ⊆ E_T` over all label sets.
    pub fn validate(&self) -> Result<(), IndepError> {
        let alpha = self.alphabet();
        if alpha.len() > 8 {
            return Err(IndepError::TooLarge(format!("{} labels", alpha.len())));
        }
        let name = |m: u64| -> String { sets::iter(m).map(|i| alpha[i]).collect() };
        for m in 0..1u64 << alpha.len() {
            let e = self.label(&name(m))?;
            for i in 0..alpha.len() {
                let bigger = m | sets::singleton(i);
                if bigger != m && !self.label(&name(bigger))?.contains_subspace(&e) {
                    return Err(IndepError::Structure(format!(
                        "label map is not monotone: E_{} ⊄ E_{}",
                        name(m),
                        name(bigger)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn indep_w(&self, a: &str, b: &str, c: &str) -> Result<bool, IndepError> {
        let ac = self.label(&union_label(a, c))?;
        let bc = self.label(&union_label(b, c))?;
        Ok(weak_core(&self.gamma()?, &ac, &bc, &self.label(c)?))
    }

    pub fn indep_st(&self, a: &str, b: &str, c: &str) -> Result<bool, IndepError> {
        let ac = self.label(&union_label(a, c))?;
        let bc = self.label(&union_label(b, c))?;
        let abc = self.label(&union_label(&union_label(a, b), c))?;
        Ok(strong_core(&self.gamma()?, &ac, &bc, &abc, &self.label(c)?))
    }

    /// The skeleton whose atoms are the letters of the labels.
    pub fn to_skeleton(&self) -> Result<Skeleton, IndepError> {
        let alpha = self.alphabet();
        if alpha.len() > MAX_ATOMS {
            return Err(IndepError::TooLarge(format!("{} labels", alpha.len())));
        }
        let closed = (0..1u64 << alpha.len())
            .map(|m| self.label(&sets::iter(m).map(|i| alpha[i]).collect::<String>()))
            .collect::<Result<Vec<_>, _>>()?;
        Skeleton::from_closed(self.p, self.d, self.gamma()?, closed)
    }

    pub fn family(&self, name: &str) -> Result<Vec<Subspace>, IndepError> {
        let fam = self.families.get(name).ok_or_else(|| IndepError::MissingFamily(name.to_string()))?;
        fam.iter().map(|rows| self.span(rows)).collect()
    }

    /// Weak independence forced to base monotonicity over a declared family:
    /// every member `D` with `E_C ⊆ D ⊆ E_BC` must give `A ⫝_D BC`.
    pub fn mon_w(&self, a: &str, b: &str, c: &str, family: &str) -> Result<bool, IndepError> {
        let gamma = self.gamma()?;
        let cl = self.closure();
        let ec = self.label(c)?;
        let ac = self.label(&union_label(a, c))?;
        let bc = self.label(&union_label(b, c))?;
        for d in self.family(family)? {
            if !d.contains_subspace(&ec) || !bc.contains_subspace(&d) {
                continue;
            }
            let base = cl.cl(&d);
            let ad = cl.cl(&sum(&ac, &base));
            if !weak_core(&gamma, &ad, &bc, &base) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, d: usize) -> Row {
        let mut v = vec![0; d];
        v[i] = 1;
        v
    }

    fn config(gamma: Vec<Row>, extra: &[(&str, Vec<Row>)]) -> SkeletonConfig {
        let mut labels = BTreeMap::new();
        labels.insert("A".to_string(), vec![e(0, 3)]);
        labels.insert("B".to_string(), vec![e(1, 3)]);
        labels.insert("C".to_string(), vec![]);
        for (k, v) in extra {
            labels.insert(k.to_string(), v.clone());
        }
        SkeletonConfig { p: 2, d: 3, labels, gamma, rules: vec![], families: BTreeMap::new(), tuples: None }
    }

    #[test]
    fn weak_fails_when_gamma_straddles() {
        let c = config(vec![vec![1, 1, 0]], &[]);
        assert!(!c.indep_w("A", "B", "C").unwrap());
        let c = config(vec![e(0, 3)], &[]);
        assert!(c.indep_w("A", "B", "C").unwrap());
    }

    #[test]
    fn strong_is_strictly_stronger() {
        let c =
            config(vec![e(2, 3)], &[("AB", vec![e(0, 3), e(1, 3), e(2, 3)]), ("ABC", vec![e(0, 3), e(1, 3), e(2, 3)])]);
        c.validate().unwrap();
        assert!(c.indep_w("A", "B", "C").unwrap());
        assert!(!c.indep_st("A", "B", "C").unwrap());
    }

    #[test]
    fn base_equal_to_right_side() {
        let c = config(vec![vec![1, 1, 1]], &[]);
        // B = C: E_BC = E_C ⊆ E_AC
        assert!(c.indep_w("A", "C", "C").unwrap());
        assert!(matches!(c.indep_w("A", "Z", "C"), Err(IndepError::MissingLabel(_))));
    }

    #[test]
    fn non_monotone_labels_rejected() {
        let c = config(vec![], &[("AB", vec![e(0, 3)])]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn rule_closure_adds_products() {
        let cl = RuleClosure { rules: vec![Rule { premises: vec![e(0, 3), e(1, 3)], conclusion: e(2, 3) }] };
        let s = Subspace::span(2, 0, 3, vec![e(0, 3), e(1, 3)]).unwrap();
        assert_eq!(cl.cl(&s).dim(), 3);
        let t = Subspace::span(2, 0, 3, vec![e(0, 3)]).unwrap();
        assert!(cl.is_closed(&t));
        assert!(!cl.is_closed(&s));
    }
}
