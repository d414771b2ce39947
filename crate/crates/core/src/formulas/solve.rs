//! Exhaustive witness enumeration for conjunctions at a fixed level.
//!
//! Equations that are linear in some witness variable are used to determine
//! that variable from the others, so only the remaining free variables are
//! enumerated. The elimination plan is chosen to determine as many variables
//! as possible.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::LevelPoly;
use super::qf::QfConjunction;
use super::FormulaError;
use crate::fp;
use crate::tower::{Level, Tower, TowerElement};

#[derive(Clone, Debug)]
struct Step {
    var: usize,
    a: LevelPoly,
    b: LevelPoly,
}

/// Which variables are enumerated, which are solved for, and which equations
/// remain to be checked afterwards.
#[derive(Clone, Debug)]
pub struct Plan {
    pub free: Vec<usize>,
    steps: Vec<Step>,
    checks: Vec<usize>,
}

impl Plan {
    pub fn determined(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.var).collect()
    }
}

pub fn make_plan(eqs: &[LevelPoly], nx: usize) -> Plan {
    let mut best: Vec<(usize, usize)> = Vec::new();
    let mut cur = Vec::new();
    let bound = nx.min(eqs.len());
    plan_dfs(eqs, nx, &mut cur, &mut best, bound);
    let mut steps = Vec::new();
    for &(v, e) in &best {
        let parts = eqs[e].split_var(v);
        steps.push(Step { var: v, a: parts[1].clone(), b: parts[0].clone() });
    }
    let det: Vec<usize> = best.iter().map(|x| x.0).collect();
    let used: Vec<usize> = best.iter().map(|x| x.1).collect();
    Plan {
        free: (0..nx).filter(|v| !det.contains(v)).collect(),
        steps,
        checks: (0..eqs.len()).filter(|e| !used.contains(e)).collect(),
    }
}

fn plan_dfs(eqs: &[LevelPoly], nx: usize, cur: &mut Vec<(usize, usize)>, best: &mut Vec<(usize, usize)>, bound: usize) {
    if cur.len() > best.len() {
        *best = cur.clone();
    }
    if best.len() == bound {
        return;
    }
    for v in (0..nx).rev() {
        if cur.iter().any(|&(w, _)| w == v) {
            continue;
        }
        // an earlier step's equation must not mention a later determined variable
        if cur.iter().any(|&(_, e)| eqs[e].uses(v)) {
            continue;
        }
        for (e, eq) in eqs.iter().enumerate() {
            if cur.iter().any(|&(_, f)| f == e) || eq.degree_in(v) != 1 {
                continue;
            }
            cur.push((v, e));
            plan_dfs(eqs, nx, cur, best, bound);
            cur.pop();
            if best.len() == bound {
                return;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Exhausted,
    Callback,
    Budget,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumStats {
    pub candidates: u64,
    pub stop: Stop,
}

/// Instantiated conjunction at one level, ready for enumeration.
pub struct Instance<'a> {
    pub lv: &'a Level,
    pub nx: usize,
    pub eqs: Vec<LevelPoly>,
    pub neqs: Vec<LevelPoly>,
    pub plan: Plan,
}

impl<'a> Instance<'a> {
    pub fn new(
        tower: &'a Tower,
        phi: &QfConjunction,
        params: &[TowerElement],
        level: usize,
    ) -> Result<Self, FormulaError> {
        let (eqs, neqs) = phi.instantiate(tower, params, level)?;
        let plan = make_plan(&eqs, phi.num_witness);
        log::trace!("solver plan: free {:?}, determined {:?}", plan.free, plan.determined());
        Ok(Instance { lv: tower.level(level)?, nx: phi.num_witness, eqs, neqs, plan })
    }

    /// Calls `f` on every solution in enumeration order until it returns
    /// `false`, the space is exhausted, or `max_candidates` is reached.
    pub fn enumerate(&self, max_candidates: u64, f: &mut dyn FnMut(&[Vec<u32>]) -> bool) -> EnumStats {
        let lv = self.lv;
        let mut values = vec![lv.zero(); self.nx];
        let mut stats = EnumStats { candidates: 0, stop: Stop::Exhausted };
        loop {
            stats.candidates += 1;
            if stats.candidates > max_candidates {
                stats.stop = Stop::Budget;
                return stats;
            }
            if !self.descend(0, &mut values, max_candidates, &mut stats, f) {
                return stats;
            }
            if !self.advance_free(&mut values) {
                return stats;
            }
        }
    }

    /// Number of free assignments, if it fits in a `u64`.
    pub fn free_space(&self) -> Option<u64> {
        let digits = (self.plan.free.len() * self.lv.n) as u32;
        (self.lv.p as u64).checked_pow(digits)
    }

    /// Like [`Instance::enumerate`] but draws free assignments from a seeded
    /// stream instead of counting; never reports exhaustion.
    pub fn enumerate_sampled(
        &self,
        seed: u64,
        max_candidates: u64,
        f: &mut dyn FnMut(&[Vec<u32>]) -> bool,
    ) -> EnumStats {
        let lv = self.lv;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![lv.zero(); self.nx];
        let mut stats = EnumStats { candidates: 0, stop: Stop::Budget };
        while stats.candidates < max_candidates {
            stats.candidates += 1;
            for &v in &self.plan.free {
                for c in values[v].iter_mut() {
                    *c = rng.gen_range(0..lv.p);
                }
            }
            if !self.descend(0, &mut values, max_candidates, &mut stats, f) {
                return stats;
            }
        }
        stats.stop = Stop::Budget;
        stats
    }

    fn advance_free(&self, values: &mut [Vec<u32>]) -> bool {
        for &v in &self.plan.free {
            if fp::increment(&mut values[v], self.lv.p) {
                return true;
            }
        }
        false
    }

    // returns false when enumeration must stop
    fn descend(
        &self,
        step: usize,
        values: &mut Vec<Vec<u32>>,
        max_candidates: u64,
        stats: &mut EnumStats,
        f: &mut dyn FnMut(&[Vec<u32>]) -> bool,
    ) -> bool {
        let lv = self.lv;
        if step == self.plan.steps.len() {
            let ok = self.plan.checks.iter().all(|&e| Level::is_zero(&self.eqs[e].eval(lv, values)))
                && self.neqs.iter().all(|q| !Level::is_zero(&q.eval(lv, values)));
            if ok && !f(values) {
                stats.stop = Stop::Callback;
                return false;
            }
            return true;
        }
        let st = &self.plan.steps[step];
        let a = st.a.eval(lv, values);
        let b = st.b.eval(lv, values);
        if let Some(ai) = lv.inv(&a) {
            values[st.var] = lv.neg(&lv.mul(&b, &ai));
            return self.descend(step + 1, values, max_candidates, stats, f);
        }
        if !Level::is_zero(&b) {
            return true;
        }
        // degenerate: the equation holds for every value of this variable
        let mut v = lv.zero();
        loop {
            values[st.var] = v.clone();
            if !self.descend(step + 1, values, max_candidates, stats, f) {
                return false;
            }
            if !fp::increment(&mut v, lv.p) {
                return true;
            }
            stats.candidates += 1;
            if stats.candidates > max_candidates {
                stats.stop = Stop::Budget;
                return false;
            }
        }
    }
}

/// Compares witness tuples as one base-p counter, `x1`'s constant coefficient
/// being the least significant digit.
pub fn cmp_tuples(a: &[Vec<u32>], b: &[Vec<u32>]) -> Ordering {
    for (x, y) in a.iter().zip(b).rev() {
        match fp::cmp_base_p(x, y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// All solutions at `level`, sorted in counter order.
pub fn solve(
    tower: &Tower,
    phi: &QfConjunction,
    params: &[TowerElement],
    level: usize,
    max_candidates: u64,
) -> Result<Vec<Vec<TowerElement>>, FormulaError> {
    let inst = Instance::new(tower, phi, params, level)?;
    let mut out: Vec<Vec<Vec<u32>>> = Vec::new();
    let stats = inst.enumerate(max_candidates, &mut |vals| {
        out.push(vals.to_vec());
        true
    });
    if stats.stop == Stop::Budget {
        return Err(FormulaError::BudgetExceeded { candidates: max_candidates });
    }
    out.sort_by(|a, b| cmp_tuples(a, b));
    out.dedup();
    Ok(out.into_iter().map(|t| t.into_iter().map(|coeffs| TowerElement { level, coeffs }).collect()).collect())
}
