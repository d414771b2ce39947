//! Checks of the usual axioms for a ternary relation on a finite structure.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pregeo;
use super::relation::{Evaluator, Relation, Structure};
use super::sets::{self, Set};
use super::IndepError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    /// Invariance under automorphisms.
    Inv,
    Sym,
    /// `A ⫝_C BD ⇒ A ⫝_C B`.
    Mon,
    /// `A ⫝_C BD ⇒ A ⫝_CD B`.
    Bmon,
    /// `A ⫝_CB D ∧ B ⫝_C D ⇒ AB ⫝_C D`.
    Tra,
    /// `A ⫝_C C`.
    Ex,
    /// Some conjugate of `A` over `cl(C)` is independent from `B`.
    Ext,
    /// `A ⫝_C B ⇒` some conjugate over `cl(BC)` is independent from `BD`.
    Ext2,
    /// `A ⫝_C B ⇒ A ⫝_C cl(BC)`.
    Clo,
}

pub const ALL_PROPERTIES: [Property; 9] = [
    Property::Inv,
    Property::Sym,
    Property::Mon,
    Property::Bmon,
    Property::Tra,
    Property::Ex,
    Property::Ext,
    Property::Ext2,
    Property::Clo,
];

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Inv => "INV",
            Property::Sym => "SYM",
            Property::Mon => "MON",
            Property::Bmon => "BMON",
            Property::Tra => "TRA",
            Property::Ex => "EX",
            Property::Ext => "EXT",
            Property::Ext2 => "EXT2",
            Property::Clo => "CLO",
        }
    }

    fn arity(self) -> usize {
        match self {
            Property::Ex => 2,
            Property::Mon | Property::Bmon | Property::Tra | Property::Ext2 => 4,
            _ => 3,
        }
    }

    fn needs_automorphisms(self) -> bool {
        matches!(self, Property::Inv | Property::Ext | Property::Ext2)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = IndepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_suffix("_FINITE").unwrap_or(&t);
        ALL_PROPERTIES.iter().copied().find(|p| p.name() == t).ok_or_else(|| IndepError::UnknownProperty(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub property: String,
    pub instance: String,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Instances checked; exhaustive when the domain is no larger.
    pub budget: u64,
    pub seed: u64,
    /// Only subsets of at most this many points take part.
    pub max_set_size: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { budget: 1 << 20, seed: 0, max_set_size: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub relation: String,
    pub instances: u64,
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn show_tuple(names: &[&str], xs: &[Set]) -> String {
    names.iter().zip(xs).map(|(n, &x)| format!("{n}={}", sets::show(x))).collect::<Vec<_>>().join(" ")
}

fn check_one(ev: &Evaluator, prop: Property, xs: &[Set], sigma: Option<usize>) -> Option<Violation> {
    let st = ev.structure();
    let r = |a, b, c| ev.eval(a, b, c);
    let v = |failed: bool, names: &[&str], detail: &str| {
        failed.then(|| Violation {
            property: prop.name().into(),
            instance: show_tuple(names, xs),
            detail: detail.into(),
        })
    };
    let conjugate_exists = |a: Set, b: Set, c: Set, fixed: Set| -> bool {
        let autos = st.automorphisms().expect("checked before the run");
        ev.stabilizer(fixed).iter().any(|&i| r(pregeo::apply(&autos[i], a), b, c))
    };
    match prop {
        Property::Inv => {
            let autos = st.automorphisms().expect("checked before the run");
            let s = &autos[sigma.expect("INV instance carries an automorphism")];
            let (a, b, c) = (xs[0], xs[1], xs[2]);
            if r(a, b, c) != r(pregeo::apply(s, a), pregeo::apply(s, b), pregeo::apply(s, c)) {
                let perm: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                return Some(Violation {
                    property: prop.name().into(),
                    instance: format!("{} sigma=[{}]", show_tuple(&["A", "B", "C"], xs), perm.join(",")),
                    detail: "relation changes under the automorphism".into(),
                });
            }
            None
        }
        Property::Sym => {
            let (a, b, c) = (xs[0], xs[1], xs[2]);
            v(r(a, b, c) && !r(b, a, c), &["A", "B", "C"], "A ⫝_C B but not B ⫝_C A")
        }
        Property::Mon => {
            let (a, b, c, d) = (xs[0], xs[1], xs[2], xs[3]);
            v(r(a, b | d, c) && !r(a, b, c), &["A", "B", "C", "D"], "A ⫝_C BD but not A ⫝_C B")
        }
        Property::Bmon => {
            let (a, b, c, d) = (xs[0], xs[1], xs[2], xs[3]);
            v(r(a, b | d, c) && !r(a, b, c | d), &["A", "B", "C", "D"], "A ⫝_C BD but not A ⫝_CD B")
        }
        Property::Tra => {
            let (a, b, c, d) = (xs[0], xs[1], xs[2], xs[3]);
            v(
                r(a, d, c | b) && r(b, d, c) && !r(a | b, d, c),
                &["A", "B", "C", "D"],
                "A ⫝_CB D and B ⫝_C D but not AB ⫝_C D",
            )
        }
        Property::Ex => {
            let (a, c) = (xs[0], xs[1]);
            v(!r(a, c, c), &["A", "C"], "A not independent from C over C")
        }
        Property::Ext => {
            let (a, b, c) = (xs[0], xs[1], xs[2]);
            v(
                !conjugate_exists(a, b, c, st.cl(c)),
                &["A", "B", "C"],
                "no conjugate of A over cl(C) is independent from B",
            )
        }
        Property::Ext2 => {
            let (a, b, c, d) = (xs[0], xs[1], xs[2], xs[3]);
            v(
                r(a, b, c) && !conjugate_exists(a, b | d, c, st.cl(b | c)),
                &["A", "B", "C", "D"],
                "no conjugate of A over cl(BC) is independent from BD",
            )
        }
        Property::Clo => {
            let (a, b, c) = (xs[0], xs[1], xs[2]);
            v(r(a, b, c) && !r(a, st.cl(b | c), c), &["A", "B", "C"], "A ⫝_C B but not A ⫝_C cl(BC)")
        }
    }
}

/// Checks `prop` for `rel` on `st`, exhaustively when the instance count fits
/// the budget and on seeded random instances otherwise.
pub fn check_property(
    st: &Structure,
    rel: &Relation,
    prop: Property,
    opts: &CheckOptions,
) -> Result<PropertyReport, IndepError> {
    let ev = Evaluator::new(st, rel)?;
    let n_autos = if prop.needs_automorphisms() { st.automorphisms()?.len() as u64 } else { 1 };
    let domain: Vec<Set> =
        sets::subsets(st.carrier()).filter(|&s| opts.max_set_size.is_none_or(|m| sets::len(s) <= m)).collect();
    let k = prop.arity();
    let sigma_count = if prop == Property::Inv { n_autos } else { 1 };
    let total = (domain.len() as u128).checked_pow(k as u32).map(|t| t * sigma_count as u128);
    let exhaustive = total.is_some_and(|t| t <= opts.budget as u128);
    let mut violations = Vec::new();
    let mut instances = 0u64;
    let mut visit = |xs: &[Set], sigma: Option<usize>| {
        instances += 1;
        if let Some(v) = check_one(&ev, prop, xs, sigma) {
            violations.push(v);
        }
    };
    if exhaustive {
        let m = domain.len();
        let mut idx = vec![0usize; k];
        'outer: loop {
            let xs: Vec<Set> = idx.iter().map(|&i| domain[i]).collect();
            if prop == Property::Inv {
                for s in 0..n_autos as usize {
                    visit(&xs, Some(s));
                }
            } else {
                visit(&xs, None);
            }
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < m {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.budget {
            let xs: Vec<Set> = (0..k).map(|_| domain[rng.gen_range(0..domain.len())]).collect();
            let sigma = (prop == Property::Inv).then(|| rng.gen_range(0..n_autos as usize));
            visit(&xs, sigma);
        }
    }
    violations.sort();
    violations.dedup();
    Ok(PropertyReport { property: prop.name().into(), relation: rel.to_string(), instances, exhaustive, violations })
}
