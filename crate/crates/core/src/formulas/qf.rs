//! Quantifier-free conjunctions φ(x, y) of polynomial equations and inequations.

use serde::{Deserialize, Serialize};

use super::parse::{parse_literals, scan_indexed_names, split_indexed};
use super::poly::{LevelPoly, Poly};
use super::FormulaError;
use crate::tower::{Tower, TowerElement};

/// Variables are ordered `x1..xk, y1..yl`; witnesses first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QfConjunction {
    pub p: u32,
    pub num_witness: usize,
    pub num_params: usize,
    pub equations: Vec<Poly>,
    pub inequations: Vec<Poly>,
    pub witness_split: usize,
    pub param_split: usize,
    pub text: String,
}

/// Serializable description used by schedules and the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaSpec {
    pub text: String,
    #[serde(default)]
    pub witnesses: Option<usize>,
    #[serde(default)]
    pub params: Option<usize>,
}

impl QfConjunction {
    /// Parses `text`; arities default to the largest indices that occur.
    pub fn parse(text: &str, p: u32, arity: Option<(usize, usize)>) -> Result<QfConjunction, FormulaError> {
        let (sx, sy) = scan_indexed_names(text)?;
        let (nx, ny) = match arity {
            Some((nx, ny)) => {
                if sx > nx || sy > ny {
                    return Err(FormulaError::UnknownVariable(format!(
                        "variable index beyond declared arity ({nx} witnesses, {ny} parameters)"
                    )));
                }
                (nx, ny)
            }
            None => (sx, sy),
        };
        let resolve = move |s: &str| match split_indexed(s) {
            Some(('x', i)) if i <= nx => Some(i - 1),
            Some(('y', i)) if i <= ny => Some(nx + i - 1),
            _ => None,
        };
        let lits = parse_literals(text, p, nx + ny, &resolve)?;
        if lits.is_empty() {
            return Err(FormulaError::NoLiterals);
        }
        let mut equations = Vec::new();
        let mut inequations = Vec::new();
        for l in lits {
            if l.equation {
                equations.push(l.poly);
            } else {
                inequations.push(l.poly);
            }
        }
        Ok(QfConjunction {
            p,
            num_witness: nx,
            num_params: ny,
            equations,
            inequations,
            witness_split: 0,
            param_split: 0,
            text: text.trim().to_string(),
        })
    }

    pub fn from_spec(spec: &FormulaSpec, p: u32) -> Result<QfConjunction, FormulaError> {
        let arity = match (spec.witnesses, spec.params) {
            (None, None) => None,
            (w, y) => {
                let (sx, sy) = scan_indexed_names(&spec.text)?;
                Some((w.unwrap_or(sx), y.unwrap_or(sy)))
            }
        };
        QfConjunction::parse(&spec.text, p, arity)
    }

    pub fn nvars(&self) -> usize {
        self.num_witness + self.num_params
    }

    pub fn var_names(&self) -> Vec<String> {
        (1..=self.num_witness).map(|i| format!("x{i}")).chain((1..=self.num_params).map(|i| format!("y{i}"))).collect()
    }

    pub fn witness_names(&self) -> Vec<String> {
        (1..=self.num_witness).map(|i| format!("x{i}")).collect()
    }

    /// Substitutes parameters (embedded into `level`), giving polynomials in
    /// the witness variables only, over that level.
    pub fn instantiate(
        &self,
        tower: &Tower,
        params: &[TowerElement],
        level: usize,
    ) -> Result<(Vec<LevelPoly>, Vec<LevelPoly>), FormulaError> {
        if params.len() != self.num_params {
            return Err(FormulaError::Arity { want: self.num_params, got: params.len() });
        }
        let lv = tower.level(level)?;
        let mut assign: Vec<Option<Vec<u32>>> = vec![None; self.num_witness];
        for b in params {
            assign.push(Some(tower.embed(b, level)?.coeffs));
        }
        let map: Vec<Option<usize>> = (0..self.nvars()).map(|i| (i < self.num_witness).then_some(i)).collect();
        let conv = |ps: &[Poly]| -> Vec<LevelPoly> {
            ps.iter().map(|q| q.to_level(lv, level).partial_eval(lv, &assign).remap(self.num_witness, &map)).collect()
        };
        Ok((conv(&self.equations), conv(&self.inequations)))
    }

    /// Checks every literal at a full assignment of witnesses and parameters.
    pub fn holds(
        &self,
        tower: &Tower,
        witness: &[TowerElement],
        params: &[TowerElement],
    ) -> Result<bool, FormulaError> {
        if witness.len() != self.num_witness {
            return Err(FormulaError::Arity { want: self.num_witness, got: witness.len() });
        }
        if params.len() != self.num_params {
            return Err(FormulaError::Arity { want: self.num_params, got: params.len() });
        }
        let level = witness.iter().chain(params).map(|e| e.level).max().unwrap_or(tower.top());
        if let Some(bad) = witness.iter().find(|e| e.level != level) {
            return Err(FormulaError::Tower(crate::tower::TowerError::LevelMismatch(level, bad.level)));
        }
        let lv = tower.level(level)?;
        let mut values: Vec<Vec<u32>> = witness.iter().map(|w| w.coeffs.clone()).collect();
        for b in params {
            values.push(tower.embed(b, level)?.coeffs);
        }
        for q in &self.equations {
            if !crate::tower::Level::is_zero(&q.to_level(lv, level).eval(lv, &values)) {
                return Ok(false);
            }
        }
        for q in &self.inequations {
            if crate::tower::Level::is_zero(&q.to_level(lv, level).eval(lv, &values)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerConfig;

    #[test]
    fn parse_and_check() {
        let t = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let phi = QfConjunction::parse("x1*x2 = y1 & x1 != 0", 2, None).unwrap();
        assert_eq!((phi.num_witness, phi.num_params), (2, 1));
        let w = t.generator(0).unwrap();
        let w1 = t.parse_element("w+1", 0).unwrap();
        assert!(phi.holds(&t, &[w.clone(), w.clone()], std::slice::from_ref(&w1)).unwrap());
        assert!(!phi.holds(&t, &[w.clone(), w1.clone()], &[w1]).unwrap());
    }

    #[test]
    fn declared_arity_is_enforced() {
        assert!(QfConjunction::parse("x3 = 0", 2, Some((2, 0))).is_err());
        let phi = QfConjunction::parse("x1 = 0", 2, Some((2, 1))).unwrap();
        assert_eq!(phi.nvars(), 3);
    }

    #[test]
    fn instantiate_drops_parameters() {
        let t = Tower::create(&TowerConfig::new(2, 2)).unwrap().grow(2).unwrap();
        let phi = QfConjunction::parse("x1^2 = y1", 2, None).unwrap();
        let b = t.generator(0).unwrap();
        let (eqs, neqs) = phi.instantiate(&t, &[b], 1).unwrap();
        assert_eq!(eqs.len(), 1);
        assert!(neqs.is_empty());
        assert_eq!(eqs[0].nvars, 1);
        assert_eq!(eqs[0].total_degree(), 2);
    }
}
