//! One round of the construction: realize every scheduled (formula, parameter)
//! pair at a larger field and extend the group by the low triangles.

use super::state::{ConstructionState, LogRecord, SkipRecord, Stage};
use super::GenesisError;
use crate::formulas::theta::search_independent_seeded;
use crate::linalg::Row;
use crate::subgroups::{lift, Subspace};
use crate::tower::{Tower, TowerElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub stage: usize,
    pub degree: usize,
    pub realized: usize,
    pub skipped: usize,
    pub attempts: usize,
}

struct Job {
    entry: usize,
    params: Vec<TowerElement>,
}

enum JobResult {
    Realized(Vec<Vec<TowerElement>>),
    Skipped(String),
    Short { found: usize, wanted: usize },
}

fn job_seed(seed: u64, stage: usize, job: usize, copy: usize) -> u64 {
    seed ^ ((stage as u64) << 48) ^ ((job as u64) << 16) ^ copy as u64
}

/// Smallest chain level above `base` of degree at least `want`, growing if needed.
fn target_level(tower: &Tower, base: usize, want: usize) -> Result<(Tower, usize), GenesisError> {
    for i in base + 1..tower.num_levels() {
        if tower.degree(i)? >= want {
            return Ok((tower.clone(), i));
        }
    }
    let grown = tower.grow_to_at_least(want)?;
    let top = grown.top();
    Ok((grown, top))
}

fn attempt(
    state: &ConstructionState,
    tower: &Tower,
    s: usize,
    n_s: usize,
    target: usize,
    jobs: &[Job],
) -> Result<Vec<JobResult>, GenesisError> {
    let p = tower.p();
    let n = tower.degree(target)?;
    let base_field = Subspace { p, level: target, n, basis: tower.subfield_basis(target, n_s)? };
    let mut avoid = base_field.clone();
    let budget = state.meta.budgets.search_candidates;
    let mut out = Vec::with_capacity(jobs.len());
    for (j, job) in jobs.iter().enumerate() {
        let e = &state.entries[job.entry];
        let mut rows = Vec::new();
        for c in 0..e.copies {
            let seed = job_seed(state.meta.seed, s, j, c);
            let res = search_independent_seeded(tower, &e.phi, &job.params, target, &avoid, budget, seed)?;
            let Some(row) = res.found else { break };
            let vs: Vec<Row> = row.iter().map(|x| x.coeffs.clone()).collect();
            avoid = avoid.with_vectors(&vs)?;
            rows.push(row);
        }
        if rows.len() == e.copies {
            out.push(JobResult::Realized(rows));
            continue;
        }
        if rows.is_empty() {
            let seed = job_seed(state.meta.seed, s, j, usize::MAX >> 8);
            let res = search_independent_seeded(tower, &e.phi, &job.params, target, &base_field, budget, seed)?;
            if res.found.is_none() {
                let how = if res.complete { "exhaustive" } else { "within budget" };
                out.push(JobResult::Skipped(format!(
                    "no solution independent over degree {n_s} at degree {n} ({how})"
                )));
                continue;
            }
        }
        out.push(JobResult::Short { found: rows.len(), wanted: e.copies });
    }
    Ok(out)
}

/// Realizes the round's entries and appends the next stage.
pub fn step(state: &mut ConstructionState) -> Result<StepReport, GenesisError> {
    let s = state.stages.len() - 1;
    let base = state.last().level;
    let n_s = state.tower.degree(base)?;
    let round = s + 1;
    let idxs = state.schedule.round_entries(round);

    let mut jobs = Vec::new();
    for &i in &idxs {
        for params in state.entries[i].param_tuples(&state.tower, base)? {
            jobs.push(Job { entry: i, params });
        }
    }
    let needed: usize =
        jobs.iter().map(|j| state.entries[j.entry].copies * state.entries[j.entry].phi.num_witness).sum();
    let slack = idxs.iter().map(|&i| state.entries[i].phi.num_witness).max().unwrap_or(0) + 2;
    let mut mult = (n_s + needed + slack).div_ceil(n_s).max(2);

    let mut attempts = 0;
    let (tower, target, results) = loop {
        attempts += 1;
        let (tower, target) = target_level(&state.tower, base, n_s * mult)?;
        let results = attempt(state, &tower, s, n_s, target, &jobs)?;
        let short = results.iter().any(|r| matches!(r, JobResult::Short { .. }));
        if !short || attempts > state.meta.budgets.growth_retries {
            break (tower, target, results);
        }
        log::debug!("round {round}: degree {} too small, doubling", tower.degree(target)?);
        mult *= 2;
    };

    let n = tower.degree(target)?;
    let lifted = lift(&tower, &state.last().group, target)?;
    let mut added: Vec<Row> = Vec::new();
    let mut log = Vec::new();
    let mut skipped = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        let e = &state.entries[job.entry];
        let params: Vec<Row> = job.params.iter().map(|b| b.coeffs.clone()).collect();
        match res {
            JobResult::Realized(rows) => {
                let mut rows_added = Vec::with_capacity(rows.len());
                for (j, row) in rows.iter().enumerate() {
                    let take = j.min(row.len());
                    added.extend(row[..take].iter().map(|x| x.coeffs.clone()));
                    rows_added.push(take);
                }
                log.push(LogRecord {
                    formula_id: e.id.clone(),
                    params,
                    solutions: rows.iter().map(|r| r.iter().map(|x| x.coeffs.clone()).collect()).collect(),
                    rows_added,
                });
            }
            JobResult::Skipped(reason) => skipped.push(SkipRecord { formula_id: e.id.clone(), params, reason }),
            JobResult::Short { found, wanted } => skipped.push(SkipRecord {
                formula_id: e.id.clone(),
                params,
                reason: format!("only {found} of {wanted} jointly independent solutions at degree {n}"),
            }),
        }
    }
    let group = lifted.with_vectors(&added)?;
    if group.dim() != lifted.dim() + added.len() {
        return Err(GenesisError::Corrupt("triangle rows are not independent of the lifted group".into()));
    }
    let report = StepReport { stage: s + 1, degree: n, realized: log.len(), skipped: skipped.len(), attempts };
    state.tower = tower;
    state.stages.push(Stage {
        level: target,
        group,
        processed: idxs.iter().map(|&i| state.entries[i].id.clone()).collect(),
        log,
        skipped,
    });
    Ok(report)
}

pub fn run(state: &mut ConstructionState, rounds: usize) -> Result<Vec<StepReport>, GenesisError> {
    (0..rounds).map(|_| step(state)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genesis::schedule::{ParamSource, Schedule};
    use crate::genesis::state::Budgets;
    use crate::subgroups::intersect_subfield;
    use crate::tower::TowerConfig;

    fn mult_state(rounds: usize) -> ConstructionState {
        let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let sched = Schedule::single(
            "mult",
            "x1*x2 = y1 & x1 != 0 & x2 != 0",
            ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: true },
            None,
        );
        let budgets = Budgets { field: "2^48".parse().unwrap(), ..Budgets::default() };
        let mut st = ConstructionState::init(tower, Subspace::zero(2, 0, 2), sched, 7, budgets).unwrap();
        run(&mut st, rounds).unwrap();
        st
    }

    #[test]
    fn one_round_of_products() {
        let st = mult_state(1);
        assert_eq!(st.stages.len(), 2);
        let g1 = &st.stages[1];
        assert_eq!(st.tower.degree(g1.level).unwrap(), 24);
        assert_eq!(g1.log.len(), 3);
        // rows contribute 0, 1 and 2 entries
        assert_eq!(g1.group.dim(), 3 * 3);
        assert!(intersect_subfield(&st.tower, &g1.group, 2).unwrap().is_zero());
        for rec in &g1.log {
            assert_eq!(rec.rows_added, vec![0, 1, 2]);
        }
    }

    #[test]
    fn zero_rounds_is_identity() {
        let st = mult_state(0);
        assert_eq!(st.stages.len(), 1);
    }

    #[test]
    fn square_root_entry_is_skipped() {
        let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let sched = Schedule::single(
            "sqrt",
            "x1^2 = y1",
            ParamSource::Explicit { tuples: vec![vec!["w".into()]], level: 0 },
            None,
        );
        let mut st = ConstructionState::init(tower, Subspace::zero(2, 0, 2), sched, 0, Budgets::default()).unwrap();
        let rep = step(&mut st).unwrap();
        assert_eq!(rep.skipped, 1);
        assert!(st.last().group.is_zero());
        assert!(st.last().skipped[0].reason.contains("exhaustive"));
    }

    #[test]
    fn empty_schedule_only_moves_level() {
        let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let sched = Schedule { policy: Default::default(), entries: vec![] };
        let g0 = Subspace::span(2, 0, 2, vec![vec![1, 0]]).unwrap();
        let mut st = ConstructionState::init(tower, g0, sched, 0, Budgets::default()).unwrap();
        step(&mut st).unwrap();
        assert_eq!(st.last().group.dim(), 1);
        assert!(st.last().log.is_empty());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let st = mult_state(1);
        let text = st.to_json();
        let back = ConstructionState::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn init_rejects_wrong_degree() {
        let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let sched = Schedule { policy: Default::default(), entries: vec![] };
        assert!(ConstructionState::init(tower, Subspace::zero(2, 0, 3), sched, 0, Budgets::default()).is_err());
    }
}
