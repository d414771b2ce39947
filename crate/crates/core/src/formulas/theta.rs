//! Bounded search for solution tuples that are F_p-linearly independent over a
//! subfield. A hit certifies the condition; a miss is only "not within bounds".

use serde::{Deserialize, Serialize};

use super::qf::QfConjunction;
use super::solve::{Instance, Stop};
use super::FormulaError;
use crate::linalg;
use crate::subgroups::Subspace;
use crate::tower::{Tower, TowerElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Largest level degree that may be scanned (the tower grows up to it).
    pub max_degree: usize,
    /// Candidate assignments tried per level before giving up on it.
    pub max_candidates: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_degree: 24, max_candidates: 1 << 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaOutcome {
    Found {
        witness: Vec<TowerElement>,
        level: usize,
    },
    /// Every level up to the bound was scanned exhaustively without a hit.
    NotFound {
        degrees_scanned: Vec<usize>,
    },
    /// A field or candidate budget cut the scan short.
    BudgetExhausted {
        degrees_scanned: Vec<usize>,
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub struct LevelSearch {
    pub found: Option<Vec<TowerElement>>,
    pub candidates: u64,
    pub complete: bool,
}

/// First solution whose entries are independent over `avoid`.
///
/// Small levels are scanned in counter order and the result is complete; when
/// the free assignments outnumber `max_candidates` they are sampled instead.
pub fn search_independent(
    tower: &Tower,
    phi: &QfConjunction,
    params: &[TowerElement],
    level: usize,
    avoid: &Subspace,
    max_candidates: u64,
) -> Result<LevelSearch, FormulaError> {
    search_independent_seeded(tower, phi, params, level, avoid, max_candidates, 0)
}

pub fn search_independent_seeded(
    tower: &Tower,
    phi: &QfConjunction,
    params: &[TowerElement],
    level: usize,
    avoid: &Subspace,
    max_candidates: u64,
    seed: u64,
) -> Result<LevelSearch, FormulaError> {
    let inst = Instance::new(tower, phi, params, level)?;
    let p = tower.p();
    let k = phi.num_witness;
    let mut hit = None;
    let mut check = |vals: &[Vec<u32>]| {
        let reduced: Vec<Vec<u32>> = vals.iter().map(|v| avoid.reduce(v)).collect();
        if linalg::rank(&reduced, p) == k {
            hit = Some(vals.to_vec());
            false
        } else {
            true
        }
    };
    let stats = match inst.free_space() {
        Some(space) if space <= max_candidates => inst.enumerate(max_candidates, &mut check),
        _ => inst.enumerate_sampled(seed, max_candidates, &mut check),
    };
    Ok(LevelSearch {
        found: hit.map(|t| t.into_iter().map(|coeffs| TowerElement { level, coeffs }).collect()),
        candidates: stats.candidates,
        complete: stats.stop != Stop::Budget,
    })
}

fn params_level(params: &[TowerElement]) -> usize {
    params.iter().map(|b| b.level).max().unwrap_or(0)
}

/// Next level above `after` whose degree is a proper multiple of `m`, growing
/// the tower by doubling when the chain is exhausted.
fn next_level(
    tower: &mut Tower,
    after: Option<usize>,
    min_level: usize,
    m: usize,
    limits: &SearchLimits,
) -> Result<Option<usize>, String> {
    let start = after.map_or(min_level, |a| a + 1);
    for i in start..tower.num_levels() {
        let n = tower.degree(i).map_err(|e| e.to_string())?;
        if n > limits.max_degree {
            return Ok(None);
        }
        if n > m && n % m == 0 {
            return Ok(Some(i));
        }
    }
    let top = tower.degree(tower.top()).map_err(|e| e.to_string())?;
    if top * 2 > limits.max_degree {
        return Ok(None);
    }
    match tower.grow(2) {
        Ok(t) => {
            *tower = t;
            let i = tower.top();
            let n = top * 2;
            if n > m && n % m == 0 {
                Ok(Some(i))
            } else {
                next_level(tower, Some(i), min_level, m, limits)
            }
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Scans chain levels above degree `m` for a solution independent over F_{p^m}.
pub fn theta_search(
    tower: &Tower,
    phi: &QfConjunction,
    params: &[TowerElement],
    m: usize,
    limits: &SearchLimits,
) -> Result<(Tower, ThetaOutcome), FormulaError> {
    let mut tower = tower.clone();
    let min_level = params_level(params);
    let mut scanned = Vec::new();
    let mut cur = None;
    let mut incomplete = None;
    loop {
        let lvl = match next_level(&mut tower, cur, min_level, m, limits) {
            Ok(Some(l)) => l,
            Ok(None) => break,
            Err(reason) => {
                return Ok((tower, ThetaOutcome::BudgetExhausted { degrees_scanned: scanned, reason }));
            }
        };
        cur = Some(lvl);
        let n = tower.degree(lvl)?;
        let avoid = Subspace { p: tower.p(), level: lvl, n, basis: tower.subfield_basis(lvl, m)? };
        let res = search_independent(&tower, phi, params, lvl, &avoid, limits.max_candidates)?;
        scanned.push(n);
        if let Some(witness) = res.found {
            return Ok((tower, ThetaOutcome::Found { witness, level: lvl }));
        }
        if !res.complete && incomplete.is_none() {
            incomplete = Some(format!("candidate budget {} reached at degree {n}", limits.max_candidates));
        }
    }
    let outcome = match incomplete {
        Some(reason) => ThetaOutcome::BudgetExhausted { degrees_scanned: scanned, reason },
        None => ThetaOutcome::NotFound { degrees_scanned: scanned },
    };
    Ok((tower, outcome))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointSolutions {
    pub level: usize,
    pub rows: Vec<Vec<TowerElement>>,
}

/// `count` solutions whose entries together are independent over F_{p^m}.
pub fn find_joint_independent_solutions(
    tower: &Tower,
    phi: &QfConjunction,
    params: &[TowerElement],
    count: usize,
    m: usize,
    limits: &SearchLimits,
) -> Result<(Tower, JointSolutions), FormulaError> {
    let mut tower = tower.clone();
    if count == 0 {
        let level = tower.top();
        return Ok((tower, JointSolutions { level, rows: Vec::new() }));
    }
    let min_level = params_level(params);
    let mut cur = None;
    let mut best = 0;
    while let Ok(Some(lvl)) = next_level(&mut tower, cur, min_level, m, limits) {
        cur = Some(lvl);
        let n = tower.degree(lvl)?;
        let mut avoid = Subspace { p: tower.p(), level: lvl, n, basis: tower.subfield_basis(lvl, m)? };
        let mut rows = Vec::new();
        while rows.len() < count {
            let res = search_independent(&tower, phi, params, lvl, &avoid, limits.max_candidates)?;
            let Some(row) = res.found else { break };
            let vs: Vec<Vec<u32>> = row.iter().map(|e: &TowerElement| e.coeffs.clone()).collect();
            avoid = avoid.with_vectors(&vs)?;
            rows.push(row);
        }
        best = best.max(rows.len());
        if rows.len() == count {
            return Ok((tower, JointSolutions { level: lvl, rows }));
        }
    }
    Err(FormulaError::NotEnoughSolutions { found: best, wanted: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerConfig;

    fn f4() -> Tower {
        Tower::create(&TowerConfig::new(2, 2)).unwrap()
    }

    #[test]
    fn factorisation_found_above_f4() {
        let t = f4();
        let phi = QfConjunction::parse("x1*x2 = y1 & x1 != 0 & x2 != 0", 2, None).unwrap();
        let w = t.generator(0).unwrap();
        let (t2, out) = theta_search(
            &t,
            &phi,
            std::slice::from_ref(&w),
            2,
            &SearchLimits { max_degree: 8, max_candidates: 1 << 16 },
        )
        .unwrap();
        let ThetaOutcome::Found { witness, level } = out else { panic!("expected a witness") };
        assert!(t2.degree(level).unwrap() <= 8);
        assert!(t2.fp_independent_over(&witness, 2).unwrap());
        assert!(phi.holds(&t2, &witness, &[w]).unwrap());
    }

    #[test]
    fn square_root_never_escapes_the_base() {
        let t = f4();
        let phi = QfConjunction::parse("x1^2 = y1", 2, None).unwrap();
        let w = t.generator(0).unwrap();
        let (_, out) =
            theta_search(&t, &phi, &[w], 2, &SearchLimits { max_degree: 16, max_candidates: 1 << 17 }).unwrap();
        assert_eq!(out, ThetaOutcome::NotFound { degrees_scanned: vec![4, 8, 16] });
    }

    #[test]
    fn identity_formula_not_found() {
        let t = f4();
        let phi = QfConjunction::parse("x1 = y1", 2, None).unwrap();
        let (_, out) =
            theta_search(&t, &phi, &[t.one(0).unwrap()], 2, &SearchLimits { max_degree: 8, max_candidates: 1 << 10 })
                .unwrap();
        assert!(matches!(out, ThetaOutcome::NotFound { .. }));
    }

    #[test]
    fn three_jointly_independent_inverse_pairs() {
        let t = Tower::create(&TowerConfig::new(2, 1)).unwrap();
        let phi = QfConjunction::parse("x1*x2 = 1", 2, None).unwrap();
        let (t2, sols) = find_joint_independent_solutions(&t, &phi, &[], 3, 1, &SearchLimits::default()).unwrap();
        let flat: Vec<TowerElement> = sols.rows.iter().flatten().cloned().collect();
        assert_eq!(flat.len(), 6);
        assert!(t2.fp_independent_over(&flat, 1).unwrap());
        for r in &sols.rows {
            assert!(phi.holds(&t2, r, &[]).unwrap());
        }
    }

    #[test]
    fn zero_count_and_failure() {
        let t = f4();
        let phi = QfConjunction::parse("x1^2 = y1", 2, None).unwrap();
        let w = t.generator(0).unwrap();
        let (_, s) =
            find_joint_independent_solutions(&t, &phi, std::slice::from_ref(&w), 0, 2, &SearchLimits::default())
                .unwrap();
        assert!(s.rows.is_empty());
        let err = find_joint_independent_solutions(
            &t,
            &phi,
            &[w],
            1,
            2,
            &SearchLimits { max_degree: 8, max_candidates: 1 << 10 },
        );
        assert!(matches!(err, Err(FormulaError::NotEnoughSolutions { found: 0, wanted: 1 })));
    }
}
