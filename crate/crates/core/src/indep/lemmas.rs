//! Finite analogs of the structural lemmas about weak, strong and monotonised
//! independence, each with a seeded generator of instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::props::{check_property, CheckOptions, Property};
use super::relation::{Evaluator, Relation, Structure};
use super::sets::{self, Set};
use super::skeleton::{strong_core, weak_core, Rule, RuleClosure, Skeleton, SkeletonConfig};
use super::IndepError;
use crate::linalg::{self, Row};
use crate::subgroups::{enumerate_subspaces, random_subspace, random_vector, Subspace, ENUMERATION_GUARD};

const REPORT_CAP: usize = 20;

fn sum(a: &Subspace, b: &Subspace) -> Subspace {
    a.sum(b).expect("common ambient space")
}

fn meet(a: &Subspace, b: &Subspace) -> Subspace {
    a.intersect(b).expect("common ambient space")
}

fn show(s: &Subspace) -> String {
    format!("{:?}", s.basis)
}

/// Outcome of a generated family of instances.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    /// Instances generated.
    pub attempts: u64,
    /// Instances passing the declared preconditions.
    pub accepted: u64,
    /// Accepted instances whose premises hold.
    pub nonvacuous: u64,
    pub counterexample_count: u64,
    pub counterexamples: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), ..Default::default() }
    }

    pub fn holds(&self) -> bool {
        self.counterexample_count == 0
    }

    fn counterexample(&mut self, what: String) {
        self.counterexample_count += 1;
        if self.counterexamples.len() < REPORT_CAP {
            self.counterexamples.push(what);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonPregeoReport {
    pub agree: bool,
    pub complete: bool,
    pub triples: u64,
    pub disagreement_count: u64,
    pub disagreements: Vec<String>,
    /// Triples where `a` holds while both `mon(a)` and `pregeo` fail.
    pub separating_count: u64,
    pub separating: Vec<String>,
}

/// Compares `mon(a)` with the pregeometry relation on every triple of subsets
/// (of at most `max_set_size` points), up to `budget` triples.
pub fn mon_a_pregeo_check(
    st: &Structure,
    max_set_size: Option<usize>,
    budget: u64,
) -> Result<MonPregeoReport, IndepError> {
    if !matches!(st, Structure::Pregeo(_)) {
        return Err(IndepError::Unsupported("the comparison needs a pregeometry".into()));
    }
    let a = Evaluator::new(st, &Relation::A)?;
    let mon = Evaluator::new(st, &Relation::Mon(Box::new(Relation::A)))?;
    let pg = Evaluator::new(st, &Relation::Pregeo)?;
    let domain: Vec<Set> =
        sets::subsets(st.carrier()).filter(|&s| max_set_size.is_none_or(|m| sets::len(s) <= m)).collect();
    let mut r = MonPregeoReport {
        agree: true,
        complete: true,
        triples: 0,
        disagreement_count: 0,
        disagreements: Vec::new(),
        separating_count: 0,
        separating: Vec::new(),
    };
    'all: for &x in &domain {
        for &y in &domain {
            for &z in &domain {
                if r.triples >= budget {
                    r.complete = false;
                    break 'all;
                }
                r.triples += 1;
                let shown = || format!("A={} B={} C={}", sets::show(x), sets::show(y), sets::show(z));
                let (m, p) = (mon.eval(x, y, z), pg.eval(x, y, z));
                if m != p {
                    r.agree = false;
                    r.disagreement_count += 1;
                    if r.disagreements.len() < REPORT_CAP {
                        r.disagreements.push(format!("{} mon(a)={m} pregeo={p}", shown()));
                    }
                }
                if !m && !p && a.eval(x, y, z) {
                    r.separating_count += 1;
                    if r.separating.len() < REPORT_CAP {
                        r.separating.push(shown());
                    }
                }
            }
        }
    }
    Ok(r)
}

fn point_key(v: &[u32]) -> Vec<u32> {
    v.iter().rev().copied().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocReduction {
    pub c: Vec<Row>,
    /// `Γ∩(A+B) = Γ∩(A+⟨C⟩) + Γ∩B`.
    pub identity_holds: bool,
}

/// For each `a ∈ A` (in counter order) the least `b ∈ B` with `a + b ∈ Γ`;
/// nonzero choices are collected without repetition.
pub fn greedy_loc_reduction(a: &Subspace, b: &Subspace, gamma: &Subspace) -> Result<LocReduction, IndepError> {
    let p = a.p as u128;
    let work = p.saturating_pow(a.dim() as u32).saturating_mul(p.saturating_pow(b.dim() as u32));
    if work > ENUMERATION_GUARD {
        return Err(IndepError::TooLarge(format!("{work} pairs exceed the guard {ENUMERATION_GUARD}")));
    }
    let mut xs = a.elements();
    xs.sort_by_key(|v| point_key(v));
    let mut ys = b.elements();
    ys.sort_by_key(|v| point_key(v));
    let mut c: Vec<Row> = Vec::new();
    for x in &xs {
        if let Some(y) = ys.iter().find(|y| gamma.contains(&linalg::add_rows(x, y, a.p))) {
            if !linalg::is_zero(y) && !c.contains(y) {
                c.push(y.clone());
            }
        }
    }
    let lhs = meet(gamma, &sum(a, b));
    let rhs = sum(&meet(gamma, &a.with_vectors(&c)?), &meet(gamma, b));
    Ok(LocReduction { c, identity_holds: lhs == rhs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum StarEquivOutcome {
    Precondition { reason: String },
    Evaluated { quotient_side: bool, group_side: bool },
}

impl StarEquivOutcome {
    pub fn agrees(&self) -> Option<bool> {
        match self {
            StarEquivOutcome::Evaluated { quotient_side, group_side } => Some(quotient_side == group_side),
            StarEquivOutcome::Precondition { .. } => None,
        }
    }
}

/// The quotient map by `Γ`: reduce modulo its echelon basis and keep the
/// non-pivot coordinates.
pub fn quotient(gamma: &Subspace, v: &[u32]) -> Row {
    let piv = gamma.pivots();
    gamma.reduce(v).into_iter().enumerate().filter(|(i, _)| !piv.contains(i)).map(|(_, x)| x).collect()
}

fn quotient_space(gamma: &Subspace, s: &Subspace) -> Result<Subspace, IndepError> {
    let rows = s.basis.iter().map(|v| quotient(gamma, v)).collect();
    Ok(Subspace::span(s.p, 0, s.n - gamma.dim(), rows)?)
}

/// Both sides of the equivalence between the quotient intersection and the
/// group condition, given `E_a`, `E_b`, `E_C` and representative tuples.
pub fn quotient_equiv_core(
    gamma: &Subspace,
    ea: &Subspace,
    eb: &Subspace,
    ec: &Subspace,
    r_a: &[Row],
    r_b: &[Row],
) -> Result<StarEquivOutcome, IndepError> {
    let pre = |reason: String| Ok(StarEquivOutcome::Precondition { reason });
    if meet(ea, eb) != *ec {
        return pre("E_a ∩ E_b differs from E_C".into());
    }
    if r_a.len() != r_b.len() {
        return pre(format!("tuples of lengths {} and {}", r_a.len(), r_b.len()));
    }
    if let Some(i) = (0..r_a.len()).find(|&i| !ea.contains(&r_a[i]) || !eb.contains(&r_b[i])) {
        return pre(format!("representative {i} lies outside its space"));
    }
    let p = gamma.p;
    let diffs: Vec<Row> =
        r_a.iter().zip(r_b).map(|(x, y)| linalg::add_rows(x, &linalg::scale_row(y, p - 1, p), p)).collect();
    if let Some(i) = diffs.iter().position(|v| !gamma.contains(v)) {
        return pre(format!("representatives {i} differ outside Γ"));
    }
    let qa = quotient_space(gamma, ea)?;
    let qb = quotient_space(gamma, eb)?;
    let gamma_q: Vec<Row> = r_a.iter().map(|v| quotient(gamma, v)).collect();
    let quotient_side = meet(&qa, &qb) == quotient_space(gamma, ec)?.with_vectors(&gamma_q)?;
    let rhs = sum(&meet(gamma, ea), &meet(gamma, eb)).with_vectors(&diffs)?;
    let group_side = meet(gamma, &sum(ea, eb)) == rhs;
    Ok(StarEquivOutcome::Evaluated { quotient_side, group_side })
}

/// The equivalence for labels `a`, `b`, `c` of a configuration with tuples.
pub fn quotient_equiv_check(cfg: &SkeletonConfig, a: &str, b: &str, c: &str) -> Result<StarEquivOutcome, IndepError> {
    let (r_a, r_b) = match &cfg.tuples {
        Some(t) => (t.r_a.clone(), t.r_b.clone()),
        None => (Vec::new(), Vec::new()),
    };
    quotient_equiv_core(&cfg.gamma()?, &cfg.label(a)?, &cfg.label(b)?, &cfg.label(c)?, &r_a, &r_b)
}

fn small_subspace<R: Rng>(rng: &mut R, p: u32, d: usize, max_dim: usize) -> Subspace {
    let k = rng.gen_range(0..=max_dim);
    random_subspace(rng, p, d, k)
}

fn extend<R: Rng>(rng: &mut R, base: &Subspace, max_extra: usize) -> Subspace {
    let k = rng.gen_range(0..=max_extra);
    let vs: Vec<Row> = (0..k).map(|_| random_vector(rng, base.p, base.n)).collect();
    base.with_vectors(&vs).expect("same ambient space")
}

/// Random configurations meeting the standing hypothesis, until `samples`
/// are accepted or the attempt cap is hit.
pub fn quotient_equiv_suite(p: u32, d: usize, samples: u64, seed: u64) -> Result<SuiteReport, IndepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("quotient_equiv");
    let cap = samples.saturating_mul(100);
    while rep.accepted < samples && rep.attempts < cap {
        rep.attempts += 1;
        let gamma = small_subspace(&mut rng, p, d, d.min(3));
        let ec = small_subspace(&mut rng, p, d, 1);
        let ea = extend(&mut rng, &ec, 2);
        let eb = extend(&mut rng, &ec, 2);
        let pairs: Vec<(Row, Row)> = ea
            .elements()
            .into_iter()
            .flat_map(|x| eb.elements().into_iter().map(move |y| (x.clone(), y)))
            .filter(|(x, y)| gamma.contains(&linalg::add_rows(x, &linalg::scale_row(y, p - 1, p), p)))
            .collect();
        let k = rng.gen_range(0..=2usize);
        let chosen: Vec<&(Row, Row)> = pairs.choose_multiple(&mut rng, k).collect();
        let r_a: Vec<Row> = chosen.iter().map(|(x, _)| x.clone()).collect();
        let r_b: Vec<Row> = chosen.iter().map(|(_, y)| y.clone()).collect();
        match quotient_equiv_core(&gamma, &ea, &eb, &ec, &r_a, &r_b)? {
            StarEquivOutcome::Precondition { .. } => continue,
            StarEquivOutcome::Evaluated { quotient_side, group_side } => {
                rep.accepted += 1;
                if quotient_side {
                    rep.nonvacuous += 1;
                }
                if quotient_side != group_side {
                    rep.counterexample(format!(
                        "Γ={} E_a={} E_b={} E_C={} r_a={r_a:?} r_b={r_b:?}",
                        show(&gamma),
                        show(&ea),
                        show(&eb),
                        show(&ec)
                    ));
                }
            }
        }
    }
    Ok(rep)
}

/// Every subspace `E` with `c ⊆ E ⊆ d`.
pub fn intermediates(c: &Subspace, d: &Subspace) -> Result<Vec<Subspace>, IndepError> {
    let reduced: Vec<Row> = d.basis.iter().map(|v| c.reduce(v)).collect();
    let (w, _) = linalg::rref(reduced, c.p);
    Ok(enumerate_subspaces(c.p, w.len())?
        .map(|s| {
            let vs: Vec<Row> = s.basis.iter().map(|coef| linalg::mat_vec(&w, coef, c.p)).collect();
            c.with_vectors(&vs).expect("same ambient space")
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MixedOutcome {
    Precondition { reason: String },
    Evaluated { mon_w_ab: bool, st_ad: bool, mon_w_ad: bool },
}

impl MixedOutcome {
    /// Whether the implication holds; `None` when a precondition failed.
    pub fn implication(&self) -> Option<bool> {
        match self {
            MixedOutcome::Evaluated { mon_w_ab, st_ad, mon_w_ad } => Some(!(*mon_w_ab && *st_ad) || *mon_w_ad),
            MixedOutcome::Precondition { .. } => None,
        }
    }
}

/// Closed sets `A, B, C, D` with `C ⊆ A` and `C ⊆ B ⊆ D`, and the family of
/// closed intermediates quantified over by the monotonised relation.
pub struct MixedInstance<'a> {
    pub gamma: &'a Subspace,
    pub closure: &'a RuleClosure,
    pub a: &'a Subspace,
    pub b: &'a Subspace,
    pub c: &'a Subspace,
    pub d: &'a Subspace,
    pub family: &'a [Subspace],
}

impl MixedInstance<'_> {
    fn cl_a(&self, e: &Subspace) -> Subspace {
        self.closure.cl(&sum(self.a, e))
    }

    /// `A ⫝^w_E Y` for closed `E ⊆ Y`.
    fn w_at(&self, y: &Subspace, e: &Subspace) -> bool {
        weak_core(self.gamma, &self.cl_a(e), y, e)
    }

    fn mon_w(&self, y: &Subspace) -> bool {
        self.family.iter().filter(|e| e.contains_subspace(self.c) && y.contains_subspace(e)).all(|e| self.w_at(y, e))
    }
}

/// Monotonised weak independence is preserved from `B` to `D` along strong
/// independence over `B`, under the lattice preconditions of each member.
pub fn mixed_transitivity_core(inst: &MixedInstance) -> Result<MixedOutcome, IndepError> {
    let pre = |reason: String| Ok(MixedOutcome::Precondition { reason });
    let (a, b, c, d) = (inst.a, inst.b, inst.c, inst.d);
    let closed = |s: &Subspace| inst.closure.is_closed(s);
    if ![a, b, c, d].iter().all(|s| closed(s)) {
        return pre("A, B, C, D must be closed".into());
    }
    if !a.contains_subspace(c) || !b.contains_subspace(c) || !d.contains_subspace(b) {
        return pre("need C ⊆ A and C ⊆ B ⊆ D".into());
    }
    let ab = inst.cl_a(b);
    for e in inst.family.iter().filter(|e| e.contains_subspace(c) && d.contains_subspace(e)) {
        if !closed(e) {
            return pre(format!("family member {} is not closed", show(e)));
        }
        let eb = meet(e, b);
        if !inst.family.contains(&eb) {
            return pre(format!("family lacks E ∩ B for E = {}", show(e)));
        }
        let ae = inst.cl_a(e);
        if meet(&ae, &ab) != inst.cl_a(&eb) {
            return pre(format!("cl(AE) ∩ cl(AB) ≠ cl(A(E∩B)) for E = {}", show(e)));
        }
        if meet(&sum(&ae, &ab), d) != sum(e, b) {
            return pre(format!("(cl(AE) + cl(AB)) ∩ D ≠ E + B for E = {}", show(e)));
        }
        if meet(&ae, d) != *e {
            return pre(format!("cl(AE) ∩ D ≠ E for E = {}", show(e)));
        }
    }
    let st_ad = strong_core(inst.gamma, &ab, d, &inst.cl_a(d), b);
    Ok(MixedOutcome::Evaluated { mon_w_ab: inst.mon_w(b), st_ad, mon_w_ad: inst.mon_w(d) })
}

/// The implication for labels `A`, `B`, `C`, `D` of a configuration, with
/// intermediates taken from the named family.
pub fn mixed_transitivity_check(cfg: &SkeletonConfig, family: &str) -> Result<MixedOutcome, IndepError> {
    let closure = cfg.closure();
    let family: Vec<Subspace> = cfg.family(family)?.iter().map(|e| closure.cl(e)).collect();
    let (gamma, a, b, c, d) = (cfg.gamma()?, cfg.label("AC")?, cfg.label("BC")?, cfg.label("C")?, cfg.label("BCD")?);
    mixed_transitivity_core(&MixedInstance {
        gamma: &gamma,
        closure: &closure,
        a: &a,
        b: &b,
        c: &c,
        d: &d,
        family: &family,
    })
}

fn random_rules<R: Rng>(rng: &mut R, p: u32, d: usize) -> RuleClosure {
    let k = rng.gen_range(0..=2);
    let rules = (0..k)
        .map(|_| Rule {
            premises: (0..rng.gen_range(1..=2)).map(|_| random_vector(rng, p, d)).collect(),
            conclusion: random_vector(rng, p, d),
        })
        .collect();
    RuleClosure { rules }
}

/// Random closed configurations with `dim D/C ≤ 3` and the family of all
/// closed intermediates, until `samples` pass the preconditions.
pub fn mixed_transitivity_suite(
    p: u32,
    d: usize,
    samples: u64,
    seed: u64,
    with_rules: bool,
) -> Result<SuiteReport, IndepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("mixed_transitivity");
    let cap = samples.saturating_mul(100);
    while rep.accepted < samples && rep.attempts < cap {
        rep.attempts += 1;
        let closure = if with_rules { random_rules(&mut rng, p, d) } else { RuleClosure::span() };
        let c = closure.cl(&small_subspace(&mut rng, p, d, 1));
        let b = closure.cl(&extend(&mut rng, &c, 1));
        let dd = closure.cl(&extend(&mut rng, &b, 2));
        if dd.dim() - c.dim() > 3 {
            continue;
        }
        let a = closure.cl(&extend(&mut rng, &c, 2));
        let gamma = small_subspace(&mut rng, p, d, d.min(3));
        let mut family: Vec<Subspace> = Vec::new();
        for e in intermediates(&c, &dd)? {
            let e = closure.cl(&e);
            if dd.contains_subspace(&e) && !family.contains(&e) {
                family.push(e);
            }
        }
        let inst = MixedInstance { gamma: &gamma, closure: &closure, a: &a, b: &b, c: &c, d: &dd, family: &family };
        let out = mixed_transitivity_core(&inst)?;
        let MixedOutcome::Evaluated { mon_w_ab, st_ad, .. } = out else { continue };
        rep.accepted += 1;
        if mon_w_ab && st_ad {
            rep.nonvacuous += 1;
        }
        if out.implication() == Some(false) {
            rep.counterexample(format!(
                "Γ={} A={} B={} C={} D={} rules={}",
                show(&gamma),
                show(&a),
                show(&b),
                show(&c),
                show(&dd),
                closure.rules.len()
            ));
        }
    }
    Ok(rep)
}

/// A random monotone map from the subsets of `n` atoms to subspaces: each
/// `E_S` is the sum of its maximal proper parts plus optional extra vectors.
pub fn random_monotone_skeleton<R: Rng>(rng: &mut R, p: u32, d: usize, n: usize) -> Result<Skeleton, IndepError> {
    let mut closed: Vec<Subspace> = Vec::with_capacity(1 << n);
    closed.push(small_subspace(rng, p, d, 1));
    for s in 1..1usize << n {
        let mut e = Subspace::zero(p, 0, d);
        for i in sets::iter(s as Set) {
            e = sum(&e, &closed[s & !(1 << i)]);
        }
        let extra = if sets::len(s as Set) == 1 { 1 } else { rng.gen_range(0..=1) };
        let vs: Vec<Row> = (0..extra).map(|_| random_vector(rng, p, d)).collect();
        closed.push(e.with_vectors(&vs)?);
    }
    let gamma = small_subspace(rng, p, d, d.min(3));
    Skeleton::from_closed(p, d, gamma, closed)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let v = [a, b, c, d];
                    if (0..4).all(|i| v.contains(&i)) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// Transitivity of weak independence on random four-atom skeletons, over all
/// role assignments, until `samples` instances satisfy both premises.
pub fn weak_tra_suite(p: u32, d: usize, samples: u64, seed: u64) -> Result<SuiteReport, IndepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("weak_transitivity");
    let perms = permutations4();
    let cap = samples.saturating_mul(1000);
    while rep.nonvacuous < samples && rep.attempts < cap {
        let sk = random_monotone_skeleton(&mut rng, p, d, 4)?;
        for perm in &perms {
            rep.attempts += 1;
            rep.accepted += 1;
            let [a, b, c, dd] = perm.map(sets::singleton);
            if sk.weak(a, dd, c | b) && sk.weak(b, dd, c) {
                rep.nonvacuous += 1;
                if !sk.weak(a | b, dd, c) {
                    rep.counterexample(format!(
                        "Γ={} roles={perm:?} E={:?}",
                        show(&sk.gamma),
                        (0..16).map(|s| sk.e(s).basis.clone()).collect::<Vec<_>>()
                    ));
                }
            }
        }
    }
    Ok(rep)
}

/// Strong implies weak over every assignment of `E_C ⊆ E_AC, E_BC ⊆ E_ABC`
/// and every `Γ` in `F_p^d`.
pub fn st_implies_w_exhaustive(p: u32, d: usize) -> Result<SuiteReport, IndepError> {
    let all: Vec<Subspace> = enumerate_subspaces(p, d)?.collect();
    let m = all.len();
    if (m as u128).pow(3) > ENUMERATION_GUARD {
        return Err(IndepError::TooLarge(format!("{m} subspaces of F_{p}^{d}")));
    }
    let index = |s: &Subspace| all.iter().position(|t| t == s).expect("enumeration is complete");
    let mut inside = vec![vec![false; m]; m];
    let mut meet_t = vec![vec![0usize; m]; m];
    let mut join_t = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in 0..m {
            inside[i][j] = all[j].contains_subspace(&all[i]);
            meet_t[i][j] = index(&meet(&all[i], &all[j]));
            join_t[i][j] = index(&sum(&all[i], &all[j]));
        }
    }
    let mut rep = SuiteReport::new("strong_implies_weak");
    for g in 0..m {
        for c in 0..m {
            for ac in (0..m).filter(|&x| inside[c][x]) {
                for bc in (0..m).filter(|&x| inside[c][x]) {
                    if meet_t[ac][bc] != c {
                        rep.attempts += (0..m).filter(|&x| inside[join_t[ac][bc]][x]).count() as u64;
                        continue;
                    }
                    for abc in (0..m).filter(|&x| inside[join_t[ac][bc]][x]) {
                        rep.attempts += 1;
                        rep.accepted += 1;
                        if meet_t[g][abc] != join_t[meet_t[g][ac]][meet_t[g][bc]] {
                            continue;
                        }
                        rep.nonvacuous += 1;
                        let (gs, acs, bcs, abcs, cs) = (&all[g], &all[ac], &all[bc], &all[abc], &all[c]);
                        debug_assert!(strong_core(gs, acs, bcs, abcs, cs));
                        if !weak_core(gs, acs, bcs, cs) {
                            rep.counterexample(format!(
                                "Γ={} AC={} BC={} ABC={} C={}",
                                show(gs),
                                show(acs),
                                show(bcs),
                                show(abcs),
                                show(cs)
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// The finite analog of the failure of local character: atoms `t`, `t_i`,
/// `t_i'` in `F_p^{3r+1}` where `t` and `t_i` together force `m_i`, and
/// `Γ = ⟨m_i + t_i'⟩`. Labels: `t` for `t`, `a, b, …` for the `t_i` and
/// `A, B, …` for the `t_i'`.
pub fn loc_witness_config(r: usize) -> Result<SkeletonConfig, IndepError> {
    if !(2..=5).contains(&r) {
        return Err(IndepError::TooLarge(format!("r = {r} outside 2..=5")));
    }
    let d = 3 * r + 1;
    let unit = |i: usize| -> Row {
        let mut v = vec![0u32; d];
        v[i] = 1;
        v
    };
    let (t, ti, tpi, mi) = (0, |i: usize| 1 + i, |i: usize| 1 + r + i, |i: usize| 1 + 2 * r + i);
    let mut labels = std::collections::BTreeMap::new();
    labels.insert("t".to_string(), vec![unit(t)]);
    for i in 0..r {
        labels.insert(((b'a' + i as u8) as char).to_string(), vec![unit(ti(i))]);
        labels.insert(((b'A' + i as u8) as char).to_string(), vec![unit(tpi(i))]);
    }
    let rules = (0..r).map(|i| Rule { premises: vec![unit(t), unit(ti(i))], conclusion: unit(mi(i)) }).collect();
    let gamma = (0..r).map(|i| linalg::add_rows(&unit(mi(i)), &unit(tpi(i)), 2)).collect();
    Ok(SkeletonConfig { p: 2, d, labels, gamma, rules, families: Default::default(), tuples: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocCase {
    /// Indices `i` whose pair `t_i, t_i'` is in the base.
    pub pairs: Vec<usize>,
    /// Weak independence fails with `D` the remaining `t_i`.
    pub expected_fails: bool,
    /// The least failing `D` (by size, then atom mask), as a label.
    pub witness: Option<String>,
    pub mon_w: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocReport {
    pub r: usize,
    pub cases: Vec<LocCase>,
    /// Monotonised weak independence over the whole pair block.
    pub full_base_mon_w: bool,
}

impl LocReport {
    pub fn holds(&self) -> bool {
        self.full_base_mon_w && self.cases.iter().all(|c| c.expected_fails && c.witness.is_some() && !c.mon_w)
    }
}

/// For every base made of fewer than `r` pairs, searches all `D` inside the
/// pair block for a failure of `t ⫝^w_{A_0 D} (pairs)`.
pub fn loc_failure_search(r: usize) -> Result<LocReport, IndepError> {
    let cfg = loc_witness_config(r)?;
    let alpha = cfg.alphabet();
    let st = Structure::Skeleton(cfg.to_skeleton()?);
    let Structure::Skeleton(sk) = &st else { unreachable!() };
    let atom = |ch: char| sets::singleton(alpha.iter().position(|&c| c == ch).expect("declared label"));
    let t_i = |i: usize| atom((b'a' + i as u8) as char);
    let tp_i = |i: usize| atom((b'A' + i as u8) as char);
    let t = atom('t');
    let block: Set = (0..r).fold(0, |acc, i| acc | t_i(i) | tp_i(i));
    let label = |s: Set| -> String { sets::iter(s).map(|i| alpha[i]).collect() };
    let mon_w = Evaluator::new(&st, &Relation::Mon(Box::new(Relation::W)))?;
    let mut cases = Vec::new();
    for pairs in 0..(1u64 << r) - 1 {
        let idx: Vec<usize> = sets::iter(pairs).collect();
        let a0: Set = idx.iter().fold(0, |acc, &i| acc | t_i(i) | tp_i(i));
        let expected: Set = (0..r).filter(|i| !idx.contains(i)).fold(0, |acc, i| acc | t_i(i));
        let mut ds: Vec<Set> = sets::subsets(block & !a0).collect();
        ds.sort_by_key(|&s| (sets::len(s), s));
        let witness = ds.into_iter().find(|&dd| !sk.weak(t, block, a0 | dd)).map(label);
        cases.push(LocCase {
            pairs: idx,
            expected_fails: !sk.weak(t, block, a0 | expected),
            witness,
            mon_w: mon_w.eval(t, block, a0),
        });
    }
    Ok(LocReport { r, cases, full_base_mon_w: mon_w.eval(t, block, block) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureLemmaReport {
    pub relation: String,
    pub inv: bool,
    pub ext2: bool,
    pub clo: bool,
}

impl ClosureLemmaReport {
    /// Invariance and EXT2 force closure on the right.
    pub fn consistent(&self) -> bool {
        !(self.inv && self.ext2) || self.clo
    }
}

pub fn closure_lemma_check(
    st: &Structure,
    rel: &Relation,
    opts: &CheckOptions,
) -> Result<ClosureLemmaReport, IndepError> {
    let holds = |p| check_property(st, rel, p, opts).map(|r| r.holds());
    Ok(ClosureLemmaReport {
        relation: rel.to_string(),
        inv: holds(Property::Inv)?,
        ext2: holds(Property::Ext2)?,
        clo: holds(Property::Clo)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indep::pregeo::Pregeometry;

    fn e(i: usize, d: usize) -> Row {
        let mut v = vec![0; d];
        v[i] = 1;
        v
    }

    fn span(d: usize, rows: Vec<Row>) -> Subspace {
        Subspace::span(2, 0, d, rows).unwrap()
    }

    #[test]
    fn greedy_reduction_small_instance() {
        let gamma = span(4, vec![vec![1, 0, 1, 0]]);
        let r = greedy_loc_reduction(&span(4, vec![e(0, 4)]), &span(4, vec![e(2, 4), e(3, 4)]), &gamma).unwrap();
        assert_eq!(r.c, vec![e(2, 4)]);
        assert!(r.identity_holds);
        let zero = Subspace::zero(2, 0, 4);
        let r = greedy_loc_reduction(&span(4, vec![e(0, 4)]), &span(4, vec![e(1, 4)]), &zero).unwrap();
        assert!(r.c.is_empty() && r.identity_holds);
    }

    #[test]
    fn monotonised_a_on_the_plane() {
        let st = Structure::Pregeo(Pregeometry::linear(2, 2).unwrap());
        let r = mon_a_pregeo_check(&st, None, u64::MAX).unwrap();
        assert!(r.agree && r.complete);
        assert_eq!(r.triples, 16 * 16 * 16);
        let st = Structure::Pregeo(Pregeometry::affine(2, 2).unwrap());
        let r = mon_a_pregeo_check(&st, None, u64::MAX).unwrap();
        assert!(r.agree);
        assert!(r.separating.contains(&"A={0,1} B={2,3} C={}".to_string()));
    }

    #[test]
    fn quotient_equivalence_without_tuples() {
        let gamma = span(3, vec![vec![1, 1, 0]]);
        let out = quotient_equiv_core(
            &gamma,
            &span(3, vec![e(0, 3)]),
            &span(3, vec![e(1, 3)]),
            &Subspace::zero(2, 0, 3),
            &[],
            &[],
        )
        .unwrap();
        assert_eq!(out, StarEquivOutcome::Evaluated { quotient_side: false, group_side: false });
        let bad = quotient_equiv_core(
            &gamma,
            &span(3, vec![e(0, 3)]),
            &span(3, vec![e(0, 3)]),
            &Subspace::zero(2, 0, 3),
            &[],
            &[],
        )
        .unwrap();
        assert!(matches!(bad, StarEquivOutcome::Precondition { .. }));
    }

    #[test]
    fn quotient_equivalence_with_a_tuple() {
        // r^a = e1, r^b = e2 with e1 - e2 in Γ
        let gamma = span(3, vec![vec![1, 1, 0]]);
        let out = quotient_equiv_core(
            &gamma,
            &span(3, vec![e(0, 3)]),
            &span(3, vec![e(1, 3)]),
            &Subspace::zero(2, 0, 3),
            &[e(0, 3)],
            &[e(1, 3)],
        )
        .unwrap();
        assert_eq!(out, StarEquivOutcome::Evaluated { quotient_side: true, group_side: true });
    }

    #[test]
    fn intermediates_between_subspaces() {
        let c = span(4, vec![e(0, 4)]);
        let d = span(4, vec![e(0, 4), e(1, 4), e(2, 4)]);
        let all = intermediates(&c, &d).unwrap();
        // subspaces of F_2^2
        assert_eq!(all.len(), 5);
        assert!(all.iter().all(|x| x.contains_subspace(&c) && d.contains_subspace(x)));
    }

    #[test]
    fn mixed_transitivity_degenerate_cases() {
        let gamma = Subspace::zero(2, 0, 3);
        let cl = RuleClosure::span();
        let a = span(3, vec![e(0, 3)]);
        let b = span(3, vec![e(1, 3)]);
        let c = Subspace::zero(2, 0, 3);
        let family = intermediates(&c, &b).unwrap();
        let out = mixed_transitivity_core(&MixedInstance {
            gamma: &gamma,
            closure: &cl,
            a: &a,
            b: &b,
            c: &c,
            d: &b,
            family: &family,
        })
        .unwrap();
        assert_eq!(out, MixedOutcome::Evaluated { mon_w_ab: true, st_ad: true, mon_w_ad: true });
    }

    #[test]
    fn loc_witness_for_two_pairs() {
        let r = loc_failure_search(2).unwrap();
        assert_eq!(r.cases.len(), 3);
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.cases[0].witness.as_deref(), Some("a"));
    }

    #[test]
    fn strong_implies_weak_in_small_dimension() {
        let r = st_implies_w_exhaustive(2, 2).unwrap();
        assert!(r.holds());
        assert!(r.nonvacuous > 0);
    }

    #[test]
    fn suites_are_seeded() {
        assert_eq!(weak_tra_suite(2, 4, 50, 1).unwrap(), weak_tra_suite(2, 4, 50, 1).unwrap());
        assert_eq!(
            mixed_transitivity_suite(2, 4, 30, 2, true).unwrap(),
            mixed_transitivity_suite(2, 4, 30, 2, true).unwrap()
        );
    }
}
