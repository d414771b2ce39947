//! Command-line frontend: every subcommand returns a [`CommandResult`] that is
//! printed as JSON, with the exit code derived from its status.

use std::fs;
use std::path::{Path, PathBuf};

use acfg_core::formulas::flat::{embed_poly, reconstruct};
use acfg_core::formulas::parse::{parse_poly, scan_indexed_names, split_indexed};
use acfg_core::formulas::{decide_fp_flat, FlatnessVerdict, NotFlatReason, QfConjunction, SearchLimits, ThetaOutcome};
use acfg_core::genesis::{
    ball_check, check_structure, density_experiment, run, verify_state, AxiomInstance, Budgets, ConstructionState,
    DensityMode, InstanceVerdict, Mutation, Schedule,
};
use acfg_core::indep::lemmas::{
    loc_failure_search, mixed_transitivity_check, mixed_transitivity_suite, mon_a_pregeo_check, quotient_equiv_check,
    quotient_equiv_suite, st_implies_w_exhaustive, weak_tra_suite,
};
use acfg_core::indep::props::ALL_PROPERTIES;
use acfg_core::indep::{
    check_property, sets, CheckOptions, Evaluator, PregeoSpec, Pregeometry, Property, Relation, SkeletonConfig,
    Structure,
};
use acfg_core::subgroups::{count_subspaces, enumerate_subspaces, gaussian_binomial, ENUMERATION_GUARD};
use acfg_core::{FieldBudget, Subspace, Tower, TowerConfig};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
}

impl CommandResult {
    pub fn new(status: Status, payload: Value) -> Self {
        CommandResult { status, payload, diagnostics: Vec::new() }
    }

    pub fn verdict(ok: bool, payload: Value) -> Self {
        Self::new(if ok { Status::Pass } else { Status::Fail }, payload)
    }

    pub fn error(msg: impl Into<String>) -> Self {
        CommandResult { status: Status::Error, payload: Value::Null, diagnostics: vec![msg.into()] }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail | Status::Inconclusive => 1,
            Status::Error => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

#[derive(Parser, Debug)]
#[command(name = "acfg", version, about = "Generic additive subgroups of the algebraic closure of F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the staged construction and write its state.
    Construct {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n0: usize,
        /// `zero`, `full`, a JSON basis such as `[[1,0]]`, elements `w;1`, or a file holding one of these.
        #[arg(long, default_value = "zero")]
        g0: String,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Largest field size, as `2^k` or a decimal number.
        #[arg(long, default_value = "2^64")]
        budget: String,
        #[arg(long)]
        search_candidates: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a state and every axiom instance its rounds processed.
    Verify {
        #[arg(long)]
        state: PathBuf,
        /// Negative control such as `stage=1,drop_row=0`.
        #[arg(long)]
        mutate: Option<String>,
        #[arg(long)]
        candidates: Option<u64>,
    },
    /// Decide whether a polynomial over F_p is a product of linear factors with F_p-rational slopes.
    Flat {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        poly: String,
    },
    /// Search for a solution independent over the base field.
    Theta {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        formula: String,
        /// Comma-separated parameter elements at the base field.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        base_degree: usize,
        /// Largest field degree scanned.
        #[arg(long, default_value_t = 24)]
        max_level: usize,
        #[arg(long, default_value_t = 1 << 20)]
        candidates: u64,
    },
    /// Evaluate one independence relation on one triple.
    Indep {
        #[arg(long, value_enum)]
        mode: IndepMode,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "a")]
        relation: String,
        /// `A;B;C`: point indices such as `0,1;2;` on a pregeometry, labels on a skeleton.
        #[arg(long, default_value = "")]
        triple: String,
        /// Family of subspaces for `mon(w)` and the mixed check.
        #[arg(long)]
        family: Option<String>,
    },
    /// Check properties of a relation on a finite structure.
    Props {
        #[arg(long)]
        relation: String,
        /// A property name or `all`.
        #[arg(long, default_value = "all")]
        property: String,
        /// `linear:P:D`, `affine:P:D`, or a JSON file with a pregeometry or skeleton.
        #[arg(long)]
        structure: String,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        max_set_size: Option<usize>,
    },
    /// Count subspaces of F_p^n and cross-check by enumeration when small.
    CountSubspaces {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
    },
    /// Check that every stage meets the subfield of degree n in h0.
    Ball {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "zero")]
        h0: String,
        #[arg(long)]
        n: usize,
    },
    /// Fraction of the ball around h0 passing a batch of axiom instances.
    Density {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long, default_value = "zero")]
        h0: String,
        /// JSON list of axiom instances.
        #[arg(long)]
        axioms: PathBuf,
        #[arg(long, default_value_t = 1 << 12)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = DensityArg::Strict)]
        density_mode: DensityArg,
    },
    /// Randomised and exhaustive checks of the independence lemmas.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 5)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of pairs for `loc`.
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IndepMode {
    Pregeo,
    Skeleton,
    Quotient,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DensityArg {
    Strict,
    VacuityOff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    WeakTra,
    Mixed,
    MixedRules,
    Quotient,
    StrongWeak,
    Loc,
    MonPregeo,
}

/// Runs one command; failures of the command itself become `error` results.
pub fn execute(cmd: &Command) -> CommandResult {
    match dispatch(cmd) {
        Ok(r) => r,
        Err(e) => CommandResult::error(format!("{e:#}")),
    }
}

fn dispatch(cmd: &Command) -> Result<CommandResult> {
    match cmd {
        Command::Construct { p, n0, g0, schedule, rounds, budget, search_candidates, seed, out } => {
            construct(*p, *n0, g0, schedule, *rounds, budget, *search_candidates, *seed, out.as_deref())
        }
        Command::Verify { state, mutate, candidates } => verify(state, mutate.as_deref(), *candidates),
        Command::Flat { p, poly } => flat(*p, poly),
        Command::Theta { p, formula, params, base_degree, max_level, candidates } => {
            theta(*p, formula, params, *base_degree, *max_level, *candidates)
        }
        Command::Indep { mode, config, relation, triple, family } => {
            indep(*mode, config, relation, triple, family.as_deref())
        }
        Command::Props { relation, property, structure, budget, seed, max_set_size } => props(
            relation,
            property,
            structure,
            CheckOptions { budget: *budget, seed: *seed, max_set_size: *max_set_size },
        ),
        Command::CountSubspaces { p, n } => count(*p, *n),
        Command::Ball { state, h0, n } => ball(state, h0, *n),
        Command::Density { p, n, big_n, h0, axioms, samples, seed, density_mode } => {
            density(*p, *n, *big_n, h0, axioms, *samples, *seed, *density_mode)
        }
        Command::Suite { name, p, d, samples, seed, r } => suite(*name, *p, *d, *samples, *seed, *r),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// A group at `level`: `zero`, `full`, a JSON basis, `;`-separated elements, or a file with one of these.
pub fn parse_group(spec: &str, tower: &Tower, level: usize) -> Result<Subspace> {
    let p = tower.p();
    let n = tower.degree(level)?;
    let text = spec.trim();
    let text = if Path::new(text).is_file() { read(Path::new(text))?.trim().to_string() } else { text.to_string() };
    match text.as_str() {
        "zero" => return Ok(Subspace::zero(p, level, n)),
        "full" => return Ok(Subspace::full(p, level, n)),
        _ => {}
    }
    if text.starts_with("[[") || text == "[]" {
        let rows: Vec<Vec<u32>> = serde_json::from_str(&text).context("group basis")?;
        return Ok(Subspace::span(p, level, n, rows)?);
    }
    let xs = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| tower.parse_element(s, level))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Subspace::span_elements(tower, level, &xs)?)
}

#[allow(clippy::too_many_arguments)]
fn construct(
    p: u32,
    n0: usize,
    g0: &str,
    schedule: &Path,
    rounds: usize,
    budget: &str,
    search_candidates: Option<u64>,
    seed: u64,
    out: Option<&Path>,
) -> Result<CommandResult> {
    let field: FieldBudget = budget.parse().map_err(|e| anyhow!("budget: {e}"))?;
    let sched: Schedule =
        serde_json::from_str(&read(schedule)?).with_context(|| format!("schedule {}", schedule.display()))?;
    let tower = Tower::create(&TowerConfig::new(p, n0).with_budget(field.clone()))?;
    let g0 = parse_group(g0, &tower, 0).context("g0")?;
    let mut budgets = Budgets { field, ..Budgets::default() };
    if let Some(c) = search_candidates {
        budgets.search_candidates = c;
    }
    let mut st = ConstructionState::init(tower, g0, sched, seed, budgets)?;
    let steps = run(&mut st, rounds)?;
    let mut structural = Vec::new();
    check_structure(&st, &mut structural)?;
    let mut diagnostics = Vec::new();
    let stages: Vec<Value> = st
        .stages
        .iter()
        .enumerate()
        .map(|(s, stage)| {
            let skipped: Vec<Value> = stage
                .skipped
                .iter()
                .map(|k| json!({ "formula_id": k.formula_id, "params": k.params, "reason": k.reason }))
                .collect();
            if !skipped.is_empty() {
                diagnostics.push(format!("stage {s}: {} scheduled tuples skipped", skipped.len()));
            }
            json!({
                "stage": s,
                "level": stage.level,
                "degree": st.tower.degree(stage.level).unwrap_or(0),
                "group_dim": stage.group.dim(),
                "processed": stage.processed,
                "realized": stage.log.len(),
                "skipped": skipped,
            })
        })
        .collect();
    if let Some(path) = out {
        fs::write(path, st.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    diagnostics.extend(structural.iter().cloned());
    let payload = json!({
        "p": p,
        "seed": seed,
        "schedule_digest": st.meta.schedule_digest,
        "rounds": steps.len(),
        "stages": stages,
        "direct_sums_verified": structural.is_empty(),
        "out": out.map(|p| p.display().to_string()),
    });
    let mut r = CommandResult::verdict(structural.is_empty(), payload);
    r.diagnostics = diagnostics;
    Ok(r)
}

fn verify(state: &Path, mutate: Option<&str>, candidates: Option<u64>) -> Result<CommandResult> {
    let mut st = ConstructionState::from_json(&read(state)?)?;
    if let Some(m) = mutate {
        m.parse::<Mutation>()?.apply(&mut st)?;
    }
    let candidates = candidates.unwrap_or(st.meta.budgets.verify_candidates);
    let rep = verify_state(&st, candidates)?;
    let count = |f: fn(&InstanceVerdict) -> bool| rep.instances.iter().filter(|i| f(&i.verdict)).count();
    let failing: Vec<_> = rep.instances.iter().filter(|i| i.verdict.is_fail()).collect();
    let mut diagnostics: Vec<String> = failing
        .iter()
        .map(|i| format!("stage {}: {} b=({}) k={} k'={}", i.stage, i.formula_id, i.params.join(", "), i.k, i.k_params))
        .collect();
    diagnostics.extend(rep.structural_failures.iter().cloned());
    let payload = json!({
        "mutation": mutate,
        "failures": rep.failures(),
        "instances": rep.instances.len(),
        "passed_instances": count(|v| matches!(v, InstanceVerdict::Pass { .. })),
        "vacuous_instances": count(|v| matches!(v, InstanceVerdict::Vacuous { .. })),
        "structural_failures": rep.structural_failures,
        "failing_instances": failing,
    });
    let mut r = CommandResult::verdict(rep.passed(), payload);
    r.diagnostics = diagnostics;
    Ok(r)
}

/// Variables `x1..xn` come first, then `y1..ym`.
fn poly_variables(text: &str) -> Result<(usize, usize)> {
    Ok(scan_indexed_names(text)?)
}

fn flat(p: u32, text: &str) -> Result<CommandResult> {
    let (nx, ny) = poly_variables(text)?;
    let nvars = nx + ny;
    let resolve = move |s: &str| match split_indexed(s) {
        Some(('x', i)) if i <= nx => Some(i - 1),
        Some(('y', i)) if i <= ny => Some(nx + i - 1),
        _ => None,
    };
    let tower = Tower::create(&TowerConfig::new(p, 1))?;
    let poly = parse_poly(text, p, nvars, &resolve)?.to_level(tower.level(0)?, 0);
    let (t, verdict, complete) = decide_fp_flat(&tower, &poly)?;
    let el = |level: usize, c: &[u32]| t.format_element(&acfg_core::TowerElement { level, coeffs: c.to_vec() });
    let mut diagnostics = Vec::new();
    let (status, payload) = match &verdict {
        FlatnessVerdict::Flat { level, constant, factors } => {
            let rebuilt = reconstruct(&t, nvars, &verdict)?;
            let matches = rebuilt == Some(embed_poly(&t, &poly, *level)?);
            if !matches {
                diagnostics.push("factorization does not multiply back to the input".into());
            }
            let fs: Vec<Value> = factors
                .iter()
                .map(|f| json!({ "lambda": f.lambda, "b": el(*level, &f.b), "multiplicity": f.multiplicity }))
                .collect();
            let payload = json!({
                "verdict": "flat",
                "degree": t.degree(*level)?,
                "constant": el(*level, constant),
                "factors": fs,
                "reconstructed": matches,
            });
            (if matches { Status::Pass } else { Status::Error }, payload)
        }
        FlatnessVerdict::NotFlat { level, reason } => {
            let reason = match reason {
                NotFlatReason::ZeroPolynomial => "zero polynomial".to_string(),
                NotFlatReason::Residual(r) => format!("residual factor of total degree {}", r.total_degree()),
            };
            let payload = json!({ "verdict": "not_flat", "degree": t.degree(*level)?, "reason": reason });
            (if complete { Status::Fail } else { Status::Inconclusive }, payload)
        }
    };
    if !complete {
        diagnostics.push("field budget stopped the search before the decisive degree".into());
    }
    Ok(CommandResult { status, payload, diagnostics })
}

fn theta(p: u32, formula: &str, params: &str, m: usize, max_degree: usize, candidates: u64) -> Result<CommandResult> {
    let phi = QfConjunction::parse(formula, p, None)?;
    let tower = Tower::create(&TowerConfig::new(p, m))?;
    let params = params
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| tower.parse_element(s, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let limits = SearchLimits { max_degree, max_candidates: candidates };
    let (t, outcome) = acfg_core::formulas::theta_search(&tower, &phi, &params, m, &limits)?;
    Ok(match outcome {
        ThetaOutcome::Found { witness, level } => CommandResult::new(
            Status::Pass,
            json!({
                "outcome": "found",
                "degree": t.degree(level)?,
                "witness": witness.iter().map(|x| t.format_element(x)).collect::<Vec<_>>(),
            }),
        ),
        ThetaOutcome::NotFound { degrees_scanned } => {
            CommandResult::new(Status::Fail, json!({ "outcome": "not_found", "degrees_scanned": degrees_scanned }))
        }
        ThetaOutcome::BudgetExhausted { degrees_scanned, reason } => CommandResult {
            status: Status::Inconclusive,
            payload: json!({ "outcome": "budget_exhausted", "degrees_scanned": degrees_scanned }),
            diagnostics: vec![reason],
        },
    })
}

fn split_triple(triple: &str) -> Result<[String; 3]> {
    let parts: Vec<&str> = triple.split(';').collect();
    match parts.as_slice() {
        [a, b, c] => Ok([a.trim().to_string(), b.trim().to_string(), c.trim().to_string()]),
        _ => bail!("triple must have the form A;B;C, got {triple:?}"),
    }
}

fn point_set(text: &str, size: usize) -> Result<sets::Set> {
    let mut idx = Vec::new();
    for part in text.split(',').filter(|s| !s.trim().is_empty()) {
        let i: usize = part.trim().parse().with_context(|| format!("point index {part:?}"))?;
        if i >= size {
            bail!("point {i} outside a carrier of {size} points");
        }
        idx.push(i);
    }
    Ok(sets::from_indices(&idx))
}

fn indep(mode: IndepMode, config: &Path, relation: &str, triple: &str, family: Option<&str>) -> Result<CommandResult> {
    let text = read(config)?;
    match mode {
        IndepMode::Pregeo => {
            let spec: PregeoSpec = serde_json::from_str(&text).context("pregeometry config")?;
            let st = Structure::Pregeo(Pregeometry::from_spec(&spec)?);
            let rel: Relation = relation.parse()?;
            let [a, b, c] = split_triple(triple)?;
            let n = st.size();
            let (a, b, c) = (point_set(&a, n)?, point_set(&b, n)?, point_set(&c, n)?);
            let holds = Evaluator::new(&st, &rel)?.eval(a, b, c);
            Ok(CommandResult::verdict(
                holds,
                json!({ "relation": rel.to_string(), "a": sets::show(a), "b": sets::show(b), "c": sets::show(c), "holds": holds }),
            ))
        }
        IndepMode::Skeleton => {
            let cfg: SkeletonConfig = serde_json::from_str(&text).context("skeleton config")?;
            cfg.validate()?;
            let rel: Relation = relation.parse()?;
            let [a, b, c] = split_triple(triple)?;
            let holds = match (&rel, family) {
                (Relation::W, _) => cfg.indep_w(&a, &b, &c)?,
                (Relation::St, _) => cfg.indep_st(&a, &b, &c)?,
                (Relation::Mon(inner), Some(f)) if **inner == Relation::W => cfg.mon_w(&a, &b, &c, f)?,
                (Relation::Mon(_), None) => bail!("mon(w) on a skeleton needs --family"),
                _ => bail!("relation {rel} is not available on labelled skeletons; use w, st or mon(w)"),
            };
            Ok(CommandResult::verdict(
                holds,
                json!({ "relation": rel.to_string(), "a": a, "b": b, "c": c, "family": family, "holds": holds }),
            ))
        }
        IndepMode::Quotient => {
            let cfg: SkeletonConfig = serde_json::from_str(&text).context("skeleton config")?;
            let [a, b, c] = split_triple(triple)?;
            let out = quotient_equiv_check(&cfg, &a, &b, &c)?;
            let agrees = out.agrees();
            let mut r = CommandResult::new(
                match agrees {
                    Some(true) => Status::Pass,
                    Some(false) => Status::Fail,
                    None => Status::Inconclusive,
                },
                serde_json::to_value(&out)?,
            );
            if agrees.is_none() {
                r.diagnostics.push("preconditions not met".into());
            }
            Ok(r)
        }
        IndepMode::Mixed => {
            let cfg: SkeletonConfig = serde_json::from_str(&text).context("skeleton config")?;
            let f = family.ok_or_else(|| anyhow!("the mixed check needs --family"))?;
            let out = mixed_transitivity_check(&cfg, f)?;
            let status = match out.implication() {
                Some(true) => Status::Pass,
                Some(false) => Status::Fail,
                None => Status::Inconclusive,
            };
            Ok(CommandResult::new(status, serde_json::to_value(&out)?))
        }
    }
}

/// `linear:P:D`, `affine:P:D`, or a JSON file with a pregeometry spec or a skeleton config.
pub fn load_structure(spec: &str) -> Result<Structure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if let [kind @ ("linear" | "affine"), p, d] = parts.as_slice() {
        let p: u32 = p.parse().context("characteristic")?;
        let d: usize = d.parse().context("dimension")?;
        let g = if *kind == "linear" { Pregeometry::linear(p, d)? } else { Pregeometry::affine(p, d)? };
        return Ok(Structure::Pregeo(g));
    }
    let v: Value = serde_json::from_str(&read(Path::new(spec))?).context("structure file")?;
    if v.get("labels").is_some() {
        let cfg: SkeletonConfig = serde_json::from_value(v)?;
        Ok(Structure::Skeleton(cfg.to_skeleton()?))
    } else {
        let spec: PregeoSpec = serde_json::from_value(v)?;
        Ok(Structure::Pregeo(Pregeometry::from_spec(&spec)?))
    }
}

fn props(relation: &str, property: &str, structure: &str, opts: CheckOptions) -> Result<CommandResult> {
    let st = load_structure(structure)?;
    let rel: Relation = relation.parse()?;
    let wanted: Vec<Property> = if property.eq_ignore_ascii_case("all") {
        ALL_PROPERTIES.to_vec()
    } else {
        property.split(',').map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let mut reports = Vec::new();
    let mut diagnostics = Vec::new();
    for prop in wanted {
        let rep = check_property(&st, &rel, prop, &opts)?;
        if !rep.exhaustive {
            diagnostics.push(format!("{prop}: sampled {} instances", rep.instances));
        }
        reports.push(rep);
    }
    let ok = reports.iter().all(|r| r.holds());
    let summary: Value =
        reports.iter().map(|r| (r.property.clone(), Value::Bool(r.holds()))).collect::<serde_json::Map<_, _>>().into();
    let mut r =
        CommandResult::verdict(ok, json!({ "relation": rel.to_string(), "holds": summary, "reports": reports }));
    r.diagnostics = diagnostics;
    Ok(r)
}

fn count(p: u32, n: usize) -> Result<CommandResult> {
    let oracle = count_subspaces(p, n);
    let by_dim: Vec<String> = (0..=n).map(|k| gaussian_binomial(n, k, p).to_string()).collect();
    let mut diagnostics = Vec::new();
    let enumerated = if oracle <= ENUMERATION_GUARD {
        Some(enumerate_subspaces(p, n)?.count() as u128)
    } else {
        diagnostics.push(format!("{oracle} subspaces exceed the enumeration guard; count is by formula only"));
        None
    };
    let ok = enumerated.is_none_or(|e| e == oracle);
    let mut r = CommandResult::verdict(
        ok,
        json!({
            "p": p,
            "n": n,
            "count": oracle.to_string(),
            "by_dimension": by_dim,
            "enumerated": enumerated.map(|e| e.to_string()),
        }),
    );
    r.diagnostics = diagnostics;
    Ok(r)
}

fn ball(state: &Path, h0: &str, n: usize) -> Result<CommandResult> {
    let st = ConstructionState::from_json(&read(state)?)?;
    let level = st.tower.level_of_degree(n).ok_or_else(|| anyhow!("the state tower has no level of degree {n}"))?;
    let h0 = parse_group(h0, &st.tower, level).context("h0")?;
    let mut stages = Vec::new();
    let mut ok = true;
    for s in 0..st.stages.len() {
        let holds = ball_check(&st, s, &h0, n)?;
        ok &= holds;
        stages.push(json!({ "stage": s, "degree": st.degree(s)?, "holds": holds }));
    }
    Ok(CommandResult::verdict(ok, json!({ "n": n, "h0_dim": h0.dim(), "stages": stages })))
}

#[allow(clippy::too_many_arguments)]
fn density(
    p: u32,
    n: usize,
    big_n: usize,
    h0: &str,
    axioms: &Path,
    samples: u64,
    seed: u64,
    mode: DensityArg,
) -> Result<CommandResult> {
    let batch: Vec<AxiomInstance> = serde_json::from_str(&read(axioms)?).context("axiom batch")?;
    let tower = Tower::create(&TowerConfig::new(p, n))?;
    let h0 = parse_group(h0, &tower, 0).context("h0")?;
    let mode = match mode {
        DensityArg::Strict => DensityMode::Strict,
        DensityArg::VacuityOff => DensityMode::VacuityOff,
    };
    let rep = density_experiment(p, n, big_n, &h0, &batch, samples, seed, mode)?;
    let mut r = CommandResult::new(Status::Pass, serde_json::to_value(&rep)?);
    if !rep.exhaustive {
        r.diagnostics.push(format!("sampled {} subspaces of the ball", rep.total));
    }
    Ok(r)
}

fn suite(name: SuiteName, p: u32, d: usize, samples: u64, seed: u64, r: usize) -> Result<CommandResult> {
    let report = match name {
        SuiteName::WeakTra => weak_tra_suite(p, d, samples, seed)?,
        SuiteName::Mixed => mixed_transitivity_suite(p, d, samples, seed, false)?,
        SuiteName::MixedRules => mixed_transitivity_suite(p, d, samples, seed, true)?,
        SuiteName::Quotient => quotient_equiv_suite(p, d, samples, seed)?,
        SuiteName::StrongWeak => st_implies_w_exhaustive(p, d)?,
        SuiteName::Loc => {
            let rep = loc_failure_search(r)?;
            return Ok(CommandResult::verdict(rep.holds(), serde_json::to_value(&rep)?));
        }
        SuiteName::MonPregeo => {
            let st = Structure::Pregeo(Pregeometry::affine(p, d)?);
            let rep = mon_a_pregeo_check(&st, None, 1 << 24)?;
            let mut out = CommandResult::verdict(rep.agree, serde_json::to_value(&rep)?);
            if !rep.complete {
                out.status = Status::Inconclusive;
            }
            return Ok(out);
        }
    };
    Ok(CommandResult::verdict(report.holds(), serde_json::to_value(&report)?))
}
