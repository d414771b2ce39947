//! Schedules: which formulas are processed, with which parameter tuples.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::GenesisError;
use crate::formulas::{FormulaSpec, QfConjunction};
use crate::subgroups::ENUMERATION_GUARD;
use crate::tower::{Tower, TowerElement};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Every round processes every entry.
    #[default]
    All,
    /// Round `r` (1-based) processes the first `r` entries.
    Cumulative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamSource {
    /// Tuples of element texts, parsed at `level` (default: the base level).
    Explicit {
        tuples: Vec<Vec<String>>,
        #[serde(default)]
        level: usize,
    },
    /// Every tuple over the chain level of the given degree, in counter order.
    AllAtDegree {
        degree: usize,
        #[serde(default)]
        exclude_zero_entries: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub id: String,
    pub formula: FormulaSpec,
    pub parameters: ParamSource,
    /// Solutions per parameter tuple; defaults to one more than the witness arity.
    #[serde(default)]
    pub copies: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default)]
    pub policy: Policy,
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Clone, Debug)]
pub struct CompiledEntry {
    pub id: String,
    pub phi: QfConjunction,
    pub copies: usize,
    pub source: ParamSource,
}

impl Schedule {
    pub fn single(id: &str, formula: &str, parameters: ParamSource, copies: Option<usize>) -> Schedule {
        Schedule {
            policy: Policy::All,
            entries: vec![ScheduleEntry {
                id: id.to_string(),
                formula: FormulaSpec { text: formula.to_string(), witnesses: None, params: None },
                parameters,
                copies,
            }],
        }
    }

    /// Hex sha256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("schedule serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn compile(&self, p: u32) -> Result<Vec<CompiledEntry>, GenesisError> {
        let mut seen = std::collections::BTreeSet::new();
        self.entries
            .iter()
            .map(|e| {
                if !seen.insert(e.id.clone()) {
                    return Err(GenesisError::Schedule(format!("duplicate entry id {:?}", e.id)));
                }
                let phi = QfConjunction::from_spec(&e.formula, p)?;
                let copies = e.copies.unwrap_or(phi.num_witness + 1);
                Ok(CompiledEntry { id: e.id.clone(), phi, copies, source: e.parameters.clone() })
            })
            .collect()
    }

    /// Indices of the entries processed in round `round` (1-based).
    pub fn round_entries(&self, round: usize) -> Vec<usize> {
        match self.policy {
            Policy::All => (0..self.entries.len()).collect(),
            Policy::Cumulative => (0..round.min(self.entries.len())).collect(),
        }
    }
}

impl CompiledEntry {
    /// Parameter tuples embedded into `level`.
    pub fn param_tuples(&self, tower: &Tower, level: usize) -> Result<Vec<Vec<TowerElement>>, GenesisError> {
        let arity = self.phi.num_params;
        let raw: Vec<Vec<TowerElement>> = match &self.source {
            ParamSource::Explicit { tuples, level: src } => {
                if *src > level {
                    return Err(GenesisError::Schedule(format!(
                        "entry {:?}: parameters live above the stage level",
                        self.id
                    )));
                }
                tuples
                    .iter()
                    .map(|t| {
                        if t.len() != arity {
                            return Err(GenesisError::Schedule(format!(
                                "entry {:?}: tuple of length {} for {} parameters",
                                self.id,
                                t.len(),
                                arity
                            )));
                        }
                        t.iter().map(|s| Ok(tower.parse_element(s, *src)?)).collect()
                    })
                    .collect::<Result<_, GenesisError>>()?
            }
            ParamSource::AllAtDegree { degree, exclude_zero_entries } => {
                let src = tower.level_of_degree(*degree).ok_or_else(|| {
                    GenesisError::Schedule(format!("entry {:?}: no chain level of degree {degree}", self.id))
                })?;
                if src > level {
                    return Err(GenesisError::Schedule(format!(
                        "entry {:?}: parameters live above the stage level",
                        self.id
                    )));
                }
                let count = (tower.p() as u128).checked_pow((*degree * arity) as u32);
                if count.is_none_or(|c| c > ENUMERATION_GUARD) {
                    return Err(GenesisError::Schedule(format!("entry {:?}: too many parameter tuples", self.id)));
                }
                let elems = tower.elements(src)?;
                let mut out: Vec<Vec<TowerElement>> = vec![Vec::new()];
                for _ in 0..arity {
                    let mut next = Vec::new();
                    // first parameter varies fastest
                    for e in &elems {
                        for t in &out {
                            let mut t2 = t.clone();
                            t2.push(e.clone());
                            next.push(t2);
                        }
                    }
                    out = next;
                }
                if *exclude_zero_entries {
                    out.retain(|t| t.iter().all(|e| !e.is_zero()));
                }
                out
            }
        };
        raw.into_iter().map(|t| t.iter().map(|b| Ok(tower.embed(b, level)?)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerConfig;

    #[test]
    fn json_round_trip_and_digest() {
        let s = Schedule::single(
            "mult",
            "x1*x2 = y1 & x1 != 0 & x2 != 0",
            ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: true },
            None,
        );
        let text = serde_json::to_string(&s).unwrap();
        let back: Schedule = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.digest(), s.digest());
        assert_eq!(s.digest().len(), 64);
    }

    #[test]
    fn parameter_tuples() {
        let t = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let s = Schedule::single(
            "m",
            "x1*x2 = y1",
            ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: true },
            None,
        );
        let c = s.compile(2).unwrap();
        assert_eq!(c[0].copies, 3);
        assert_eq!(c[0].param_tuples(&t, 0).unwrap().len(), 3);
        let s2 = Schedule::single(
            "e",
            "x2 + x1^2 + y1^2 + y2^2 = 0",
            ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: false },
            Some(3),
        );
        assert_eq!(s2.compile(2).unwrap()[0].param_tuples(&t, 0).unwrap().len(), 16);
    }

    #[test]
    fn cumulative_rounds() {
        let mut s = Schedule::single("a", "x1 = y1", ParamSource::Explicit { tuples: vec![], level: 0 }, None);
        s.entries.push(s.entries[0].clone());
        s.entries[1].id = "b".into();
        assert_eq!(s.round_entries(1), vec![0, 1]);
        s.policy = Policy::Cumulative;
        assert_eq!(s.round_entries(1), vec![0]);
        assert_eq!(s.round_entries(5), vec![0, 1]);
        s.entries[1].id = "a".into();
        assert!(s.compile(2).is_err());
    }
}
