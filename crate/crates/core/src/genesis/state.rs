//! Construction state and its JSON form.

use serde::{Deserialize, Serialize};

use super::schedule::{CompiledEntry, Schedule};
use super::GenesisError;
use crate::linalg::{self, Row};
use crate::subgroups::Subspace;
use crate::tower::{FieldBudget, Tower, TowerRecord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub formula_id: String,
    /// Parameter coordinates at the previous stage level.
    pub params: Vec<Row>,
    /// Solution matrix, one row per copy, coordinates at this stage level.
    pub solutions: Vec<Vec<Row>>,
    /// How many leading entries of each row went into the group.
    pub rows_added: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub formula_id: String,
    pub params: Vec<Row>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub field: FieldBudget,
    /// Candidates per independent-solution search during a step.
    pub search_candidates: u64,
    /// Candidates for premise and fallback witness searches during verification.
    pub verify_candidates: u64,
    /// Times a round may double its target degree after running out of room.
    pub growth_retries: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            field: FieldBudget::default(),
            search_candidates: 1 << 16,
            verify_candidates: 1 << 12,
            growth_retries: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub budgets: Budgets,
    pub schedule_digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub level_index: usize,
    pub group_basis: Vec<Row>,
    #[serde(default)]
    pub processed: Vec<String>,
    #[serde(default)]
    pub log: Vec<LogRecord>,
    #[serde(default)]
    pub skipped: Vec<SkipRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub p: u32,
    pub tower: TowerRecord,
    pub schedule: Schedule,
    pub stages: Vec<StageRecord>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub level: usize,
    pub group: Subspace,
    pub processed: Vec<String>,
    pub log: Vec<LogRecord>,
    pub skipped: Vec<SkipRecord>,
}

#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub tower: Tower,
    pub schedule: Schedule,
    pub entries: Vec<CompiledEntry>,
    pub stages: Vec<Stage>,
    pub meta: Meta,
}

impl ConstructionState {
    /// One stage holding `g0`, which must live at the tower's base level.
    pub fn init(
        tower: Tower,
        g0: Subspace,
        schedule: Schedule,
        seed: u64,
        budgets: Budgets,
    ) -> Result<Self, GenesisError> {
        let n0 = tower.degree(0)?;
        if g0.level != 0 || g0.n != n0 || g0.p != tower.p() {
            return Err(GenesisError::Dimension(format!(
                "seed group lives at degree {} (level {}), base degree is {n0}",
                g0.n, g0.level
            )));
        }
        let entries = schedule.compile(tower.p())?;
        let meta = Meta { seed, schedule_digest: schedule.digest(), budgets };
        let mut tower = tower;
        tower.set_budget(meta.budgets.field.clone());
        Ok(ConstructionState {
            tower,
            schedule,
            entries,
            stages: vec![Stage { level: 0, group: g0, processed: Vec::new(), log: Vec::new(), skipped: Vec::new() }],
            meta,
        })
    }

    pub fn p(&self) -> u32 {
        self.tower.p()
    }

    pub fn last(&self) -> &Stage {
        self.stages.last().expect("a state has at least one stage")
    }

    pub fn stage(&self, s: usize) -> Result<&Stage, GenesisError> {
        self.stages.get(s).ok_or(GenesisError::StageOutOfRange(s))
    }

    pub fn degree(&self, s: usize) -> Result<usize, GenesisError> {
        Ok(self.tower.degree(self.stage(s)?.level)?)
    }

    pub fn entry(&self, id: &str) -> Option<(usize, &CompiledEntry)> {
        self.entries.iter().enumerate().find(|(_, e)| e.id == id)
    }

    pub fn record(&self) -> StateRecord {
        StateRecord {
            p: self.p(),
            tower: self.tower.record(),
            schedule: self.schedule.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| StageRecord {
                    level_index: s.level,
                    group_basis: s.group.basis.clone(),
                    processed: s.processed.clone(),
                    log: s.log.clone(),
                    skipped: s.skipped.clone(),
                })
                .collect(),
            meta: self.meta.clone(),
        }
    }

    /// Rebuilds a state, re-validating the tower, the schedule digest, stage
    /// ordering and the canonical form of every group basis.
    pub fn from_record(rec: &StateRecord) -> Result<Self, GenesisError> {
        let tower = Tower::from_record(rec.p, rec.meta.budgets.field.clone(), &rec.tower)?;
        if rec.schedule.digest() != rec.meta.schedule_digest {
            return Err(GenesisError::Corrupt("schedule digest mismatch".into()));
        }
        let entries = rec.schedule.compile(rec.p)?;
        if rec.stages.is_empty() {
            return Err(GenesisError::Corrupt("state without stages".into()));
        }
        let mut stages = Vec::with_capacity(rec.stages.len());
        for (i, s) in rec.stages.iter().enumerate() {
            let n = tower.degree(s.level_index)?;
            if let Some(prev) = stages.last().map(|p: &Stage| p.level) {
                if s.level_index <= prev {
                    return Err(GenesisError::Corrupt(format!("stage {i} does not climb the tower")));
                }
            } else if s.level_index != 0 {
                return Err(GenesisError::Corrupt("first stage must sit at the base level".into()));
            }
            let group = Subspace::span(rec.p, s.level_index, n, s.group_basis.clone())?;
            if group.basis != s.group_basis {
                return Err(GenesisError::Corrupt(format!("stage {i}: group basis is not canonical")));
            }
            stages.push(Stage {
                level: s.level_index,
                group,
                processed: s.processed.clone(),
                log: s.log.clone(),
                skipped: s.skipped.clone(),
            });
        }
        Ok(ConstructionState { tower, schedule: rec.schedule.clone(), entries, stages, meta: rec.meta.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GenesisError> {
        let rec: StateRecord = serde_json::from_str(text).map_err(|e| GenesisError::Json(e.to_string()))?;
        Self::from_record(&rec)
    }
}

/// Negative control: drop one canonical basis row of one stage's group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub stage: usize,
    pub drop_row: usize,
}

impl std::str::FromStr for Mutation {
    type Err = GenesisError;

    /// Parses `stage=S,drop_row=R`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut stage = None;
        let mut row = None;
        for part in s.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GenesisError::Mutation(format!("expected key=value, got {part:?}")))?;
            let v: usize = v.trim().parse().map_err(|_| GenesisError::Mutation(format!("bad number {v:?}")))?;
            match k.trim() {
                "stage" => stage = Some(v),
                "drop_row" => row = Some(v),
                other => return Err(GenesisError::Mutation(format!("unknown key {other:?}"))),
            }
        }
        match (stage, row) {
            (Some(stage), Some(drop_row)) => Ok(Mutation { stage, drop_row }),
            _ => Err(GenesisError::Mutation("need both stage and drop_row".into())),
        }
    }
}

impl Mutation {
    pub fn apply(&self, state: &mut ConstructionState) -> Result<(), GenesisError> {
        let st = state.stages.get_mut(self.stage).ok_or(GenesisError::StageOutOfRange(self.stage))?;
        if self.drop_row >= st.group.basis.len() {
            return Err(GenesisError::Mutation(format!(
                "stage {} group has only {} basis rows",
                self.stage,
                st.group.basis.len()
            )));
        }
        st.group.basis.remove(self.drop_row);
        st.group.basis = linalg::rref(std::mem::take(&mut st.group.basis), st.group.p).0;
        Ok(())
    }
}
