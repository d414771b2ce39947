//! Independent re-checking of a constructed state: log records, the
//! direct-sum and ball invariants, and every realized axiom instance.

use serde::Serialize;

use super::schedule::CompiledEntry;
use super::state::ConstructionState;
use super::GenesisError;
use crate::formulas::solve::Instance;
use crate::formulas::theta::search_independent_seeded;
use crate::linalg::Row;
use crate::subgroups::{intersect_subfield, lift, Subspace};
use crate::tower::{Tower, TowerElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InstanceVerdict {
    Pass {
        witness: Vec<String>,
        designed: bool,
    },
    /// A premise fails, so the instance holds vacuously.
    Vacuous {
        reason: String,
    },
    Fail {
        reason: String,
    },
}

impl InstanceVerdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, InstanceVerdict::Fail { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub stage: usize,
    pub formula_id: String,
    pub params: Vec<String>,
    pub k: usize,
    pub k_params: usize,
    #[serde(flatten)]
    pub verdict: InstanceVerdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub structural_failures: Vec<String>,
    pub instances: Vec<InstanceReport>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.structural_failures.len() + self.instances.iter().filter(|i| i.verdict.is_fail()).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

fn subfield(tower: &Tower, level: usize, m: usize) -> Result<Subspace, GenesisError> {
    Ok(Subspace { p: tower.p(), level, n: tower.degree(level)?, basis: tower.subfield_basis(level, m)? })
}

/// `span(a, b') ∩ G = span(a_1..a_k)`.
fn split_holds(g: &Subspace, a: &[Row], b_prime: &[Row], k: usize) -> Result<bool, GenesisError> {
    let mut vs = a.to_vec();
    vs.extend(b_prime.iter().cloned());
    let meet = g.meet_span(&vs)?;
    let want = Subspace::span(g.p, g.level, g.n, a[..k].to_vec())?;
    Ok(meet == want)
}

/// Checks one instance of the axiom for `entry` between stages `s` and `s+1`.
pub fn verify_axiom_instance(
    state: &ConstructionState,
    s: usize,
    entry: &CompiledEntry,
    params: &[TowerElement],
    k: usize,
    k_params: usize,
    candidates: u64,
) -> Result<InstanceVerdict, GenesisError> {
    let tower = &state.tower;
    let cur = state.stage(s)?;
    let next = state.stages.get(s + 1).ok_or(GenesisError::StageOutOfRange(s + 1))?;
    let phi = &entry.phi;
    if k > phi.num_witness || k_params > phi.num_params {
        return Err(GenesisError::Dimension(format!(
            "split ({k}, {k_params}) exceeds arity ({}, {})",
            phi.num_witness, phi.num_params
        )));
    }
    let params: Vec<TowerElement> = params.iter().map(|b| tower.embed(b, cur.level)).collect::<Result<_, _>>()?;
    let b_prime: Vec<Row> = params[..k_params].iter().map(|b| b.coeffs.clone()).collect();
    if !cur.group.meet_span(&b_prime)?.is_zero() {
        return Ok(InstanceVerdict::Vacuous { reason: "parameter span meets the group".into() });
    }
    let n_s = tower.degree(cur.level)?;
    let t = next.level;
    let n_t = tower.degree(t)?;
    let base = subfield(tower, t, n_s)?;
    let premise = search_independent_seeded(tower, phi, &params, t, &base, candidates, state.meta.seed)?;
    if premise.found.is_none() {
        return Ok(InstanceVerdict::Vacuous {
            reason: format!("no solution independent over degree {n_s} found at degree {n_t}"),
        });
    }
    let b_up: Vec<Row> =
        params[..k_params].iter().map(|b| tower.embed_coeffs(cur.level, t, &b.coeffs)).collect::<Result<_, _>>()?;
    let fmt =
        |a: &[Row]| a.iter().map(|c| tower.format_element(&TowerElement { level: t, coeffs: c.clone() })).collect();

    let coords: Vec<Row> = params.iter().map(|b| b.coeffs.clone()).collect();
    let designed =
        next.log.iter().find(|r| r.formula_id == entry.id && r.params == coords).and_then(|r| r.solutions.get(k));
    if let Some(row) = designed {
        let elems: Vec<TowerElement> = row.iter().map(|c| TowerElement { level: t, coeffs: c.clone() }).collect();
        if row.iter().all(|c| c.len() == n_t)
            && phi.holds(tower, &elems, &params)?
            && split_holds(&next.group, row, &b_up, k)?
        {
            return Ok(InstanceVerdict::Pass { witness: fmt(row), designed: true });
        }
    }

    let inst = Instance::new(tower, phi, &params, t)?;
    let mut hit: Option<Vec<Row>> = None;
    let mut err = None;
    let mut check = |vals: &[Vec<u32>]| match split_holds(&next.group, vals, &b_up, k) {
        Ok(true) => {
            hit = Some(vals.to_vec());
            false
        }
        Ok(false) => true,
        Err(e) => {
            err = Some(e);
            false
        }
    };
    match inst.free_space() {
        Some(space) if space <= candidates => inst.enumerate(candidates, &mut check),
        _ => inst.enumerate_sampled(state.meta.seed ^ 0x5eed, candidates, &mut check),
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(match hit {
        Some(a) => InstanceVerdict::Pass { witness: fmt(&a), designed: false },
        None => InstanceVerdict::Fail {
            reason: format!(
                "no witness with the required group intersection at degree {n_t} ({})",
                if designed.is_some() { "logged row rejected, search exhausted its budget" } else { "no logged row" }
            ),
        },
    })
}

pub fn check_structure(state: &ConstructionState, out: &mut Vec<String>) -> Result<(), GenesisError> {
    let tower = &state.tower;
    let g0 = &state.stages[0].group;
    let n0 = tower.degree(0)?;
    for (s, st) in state.stages.iter().enumerate() {
        if intersect_subfield(tower, &st.group, n0)? != lift(tower, g0, st.level)? {
            out.push(format!("stage {s}: group meets the base field outside the seed group"));
        }
        if s == 0 {
            continue;
        }
        let prev = &state.stages[s - 1];
        let n_prev = tower.degree(prev.level)?;
        if intersect_subfield(tower, &st.group, n_prev)? != lift(tower, &prev.group, st.level)? {
            out.push(format!("stage {s}: group meets the previous field outside the previous group"));
        }
        let mut all: Vec<Row> = Vec::new();
        for rec in &st.log {
            let Some((_, entry)) = state.entry(&rec.formula_id) else {
                out.push(format!("stage {s}: log names unknown formula {:?}", rec.formula_id));
                continue;
            };
            let params: Vec<TowerElement> =
                rec.params.iter().map(|c| tower.element(prev.level, c.clone())).collect::<Result<_, _>>()?;
            for (j, row) in rec.solutions.iter().enumerate() {
                let elems: Vec<TowerElement> =
                    row.iter().map(|c| tower.element(st.level, c.clone())).collect::<Result<_, _>>()?;
                if !entry.phi.holds(tower, &elems, &params)? {
                    out.push(format!("stage {s}: {} row {j} does not satisfy the formula", rec.formula_id));
                }
                let take = rec.rows_added.get(j).copied().unwrap_or(0);
                if let Some(bad) = row.iter().take(take).position(|c| !st.group.contains(c)) {
                    out.push(format!("stage {s}: {} row {j} entry {bad} is missing from the group", rec.formula_id));
                }
                all.extend(row.iter().cloned());
            }
        }
        let base = subfield(tower, st.level, n_prev)?;
        let joint = base.with_vectors(&all)?;
        if joint.dim() != base.dim() + all.len() {
            out.push(format!("stage {s}: logged solutions are not jointly independent over the previous field"));
        }
    }
    Ok(())
}

/// Re-validates the whole state and every instance `(entry, b, k, k')` that a
/// round processed.
pub fn verify_state(state: &ConstructionState, candidates: u64) -> Result<VerifyReport, GenesisError> {
    let mut report = VerifyReport::default();
    check_structure(state, &mut report.structural_failures)?;
    let tower = &state.tower;
    for s in 0..state.stages.len().saturating_sub(1) {
        let level = state.stages[s].level;
        for id in &state.stages[s + 1].processed {
            let Some((_, entry)) = state.entry(id) else {
                report.structural_failures.push(format!("stage {}: unknown entry {id:?}", s + 1));
                continue;
            };
            for params in entry.param_tuples(tower, level)? {
                let shown: Vec<String> = params.iter().map(|b| tower.format_element(b)).collect();
                for k in 0..=entry.phi.num_witness {
                    for kp in 0..=entry.phi.num_params {
                        let verdict = verify_axiom_instance(state, s, entry, &params, k, kp, candidates)?;
                        if verdict.is_fail() {
                            log::warn!("stage {s}: {id} b={shown:?} k={k} k'={kp} failed");
                        }
                        report.instances.push(InstanceReport {
                            stage: s,
                            formula_id: id.clone(),
                            params: shown.clone(),
                            k,
                            k_params: kp,
                            verdict,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
