//! Ternary relations `A ⫝_C B` on subsets of a carrier, and the operations
//! building new relations from old ones.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pregeo::{self, Perm, Pregeometry};
use super::sets::{self, Set};
use super::skeleton::Skeleton;
use super::IndepError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Relation {
    /// `cl(AC) ∩ cl(BC) = cl(C)`.
    A,
    /// Rank additivity `r(AC) + r(BC) - r(C) = r(ABC)`.
    Pregeo,
    /// Weak independence (skeletons).
    W,
    /// Strong independence (skeletons).
    St,
    True,
    /// `∀ D ⊆ cl(BC): R(A, BC, CD)`.
    Mon(Box<Relation>),
    /// As `Mon`, with `D` ranging over closed sets.
    MonClosed(Box<Relation>),
    /// `∀ B' ⊇ B ∃ σ` fixing `cl(BC)` pointwise with `R(σA, B', C)`.
    Star(Box<Relation>),
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::A => write!(f, "a"),
            Relation::Pregeo => write!(f, "pregeo"),
            Relation::W => write!(f, "w"),
            Relation::St => write!(f, "st"),
            Relation::True => write!(f, "true"),
            Relation::Mon(r) => write!(f, "mon({r})"),
            Relation::MonClosed(r) => write!(f, "mon_closed({r})"),
            Relation::Star(r) => write!(f, "star({r})"),
        }
    }
}

impl FromStr for Relation {
    type Err = IndepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || IndepError::UnknownRelation(s.to_string());
        match t.as_str() {
            "a" => return Ok(Relation::A),
            "pregeo" => return Ok(Relation::Pregeo),
            "w" => return Ok(Relation::W),
            "st" => return Ok(Relation::St),
            "true" => return Ok(Relation::True),
            _ => {}
        }
        let open = t.find('(').ok_or_else(bad)?;
        if !t.ends_with(')') {
            return Err(bad());
        }
        let inner: Relation = t[open + 1..t.len() - 1].parse().map_err(|_| bad())?;
        match &t[..open] {
            "mon" => Ok(Relation::Mon(Box::new(inner))),
            "mon_closed" => Ok(Relation::MonClosed(Box::new(inner))),
            "star" => Ok(Relation::Star(Box::new(inner))),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Relation {
    type Error = IndepError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Relation> for String {
    fn from(r: Relation) -> String {
        r.to_string()
    }
}

#[derive(Debug)]
pub enum Structure {
    Pregeo(Pregeometry),
    Skeleton(Skeleton),
}

impl Structure {
    pub fn size(&self) -> usize {
        match self {
            Structure::Pregeo(g) => g.size(),
            Structure::Skeleton(k) => k.size(),
        }
    }

    pub fn carrier(&self) -> Set {
        sets::full(self.size())
    }

    pub fn cl(&self, s: Set) -> Set {
        match self {
            Structure::Pregeo(g) => g.cl(s),
            Structure::Skeleton(k) => k.cl(s),
        }
    }

    pub fn is_closed(&self, s: Set) -> bool {
        self.cl(s) == s
    }

    pub fn automorphisms(&self) -> Result<&[Perm], IndepError> {
        match self {
            Structure::Pregeo(g) => g.automorphisms(),
            Structure::Skeleton(_) => Err(IndepError::Unsupported("automorphisms of a skeleton".into())),
        }
    }

    fn rank(&self, s: Set) -> usize {
        match self {
            Structure::Pregeo(g) => g.rank(s),
            Structure::Skeleton(k) => k.e(s).dim(),
        }
    }
}

/// Memoised evaluation of a relation on one structure.
pub struct Evaluator<'a> {
    st: &'a Structure,
    rel: Relation,
    inner: Option<Box<Evaluator<'a>>>,
    memo: RefCell<HashMap<(Set, Set, Set), bool>>,
    stabilizers: RefCell<HashMap<Set, Vec<usize>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(st: &'a Structure, rel: &Relation) -> Result<Self, IndepError> {
        let inner = match rel {
            Relation::W | Relation::St if matches!(st, Structure::Pregeo(_)) => {
                return Err(IndepError::Unsupported(format!("{rel} needs a skeleton")));
            }
            Relation::Star(r) => {
                st.automorphisms()?;
                Some(Box::new(Evaluator::new(st, r)?))
            }
            Relation::Mon(r) | Relation::MonClosed(r) => Some(Box::new(Evaluator::new(st, r)?)),
            _ => None,
        };
        Ok(Evaluator {
            st,
            rel: rel.clone(),
            inner,
            memo: RefCell::new(HashMap::new()),
            stabilizers: RefCell::new(HashMap::new()),
        })
    }

    pub fn structure(&self) -> &'a Structure {
        self.st
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn eval(&self, a: Set, b: Set, c: Set) -> bool {
        if let Some(&v) = self.memo.borrow().get(&(a, b, c)) {
            return v;
        }
        let v = self.compute(a, b, c);
        self.memo.borrow_mut().insert((a, b, c), v);
        v
    }

    /// Indices of automorphisms fixing `fixed` pointwise.
    pub fn stabilizer(&self, fixed: Set) -> Vec<usize> {
        if let Some(v) = self.stabilizers.borrow().get(&fixed) {
            return v.clone();
        }
        let autos = self.st.automorphisms().unwrap_or(&[]);
        let v: Vec<usize> = (0..autos.len()).filter(|&i| pregeo::fixes_pointwise(&autos[i], fixed)).collect();
        self.stabilizers.borrow_mut().insert(fixed, v.clone());
        v
    }

    fn compute(&self, a: Set, b: Set, c: Set) -> bool {
        let st = self.st;
        match &self.rel {
            Relation::True => true,
            Relation::A => st.cl(a | c) & st.cl(b | c) == st.cl(c),
            Relation::Pregeo => st.rank(a | c) + st.rank(b | c) == st.rank(c) + st.rank(a | b | c),
            Relation::W => match st {
                Structure::Skeleton(k) => k.weak(a, b, c),
                Structure::Pregeo(_) => unreachable!("rejected in new"),
            },
            Relation::St => match st {
                Structure::Skeleton(k) => k.strong(a, b, c),
                Structure::Pregeo(_) => unreachable!("rejected in new"),
            },
            Relation::Mon(_) | Relation::MonClosed(_) => {
                let inner = self.inner.as_ref().expect("inner relation");
                let closed_only = matches!(self.rel, Relation::MonClosed(_));
                sets::subsets(st.cl(b | c))
                    .filter(|&d| !closed_only || st.is_closed(d))
                    .all(|d| inner.eval(a, b | c, c | d))
            }
            Relation::Star(_) => {
                let inner = self.inner.as_ref().expect("inner relation");
                let autos = st.automorphisms().expect("checked in new");
                let stab = self.stabilizer(st.cl(b | c));
                sets::supersets(b, st.carrier())
                    .all(|bb| stab.iter().any(|&i| inner.eval(pregeo::apply(&autos[i], a), bb, c)))
            }
        }
    }
}
