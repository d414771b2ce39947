//! Acceptance gate: one line per criterion, nonzero exit when any fails.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use acfg_core::formulas::flat::{embed_poly, reconstruct};
use acfg_core::formulas::parse::parse_poly;
use acfg_core::formulas::{decide_fp_flat, FlatnessVerdict};
use acfg_core::genesis::{
    ball_check, congruence_solution, product_witness, run, verify_state, Budgets, ConstructionState, Mutation,
    ParamSource, Schedule,
};
use acfg_core::indep::lemmas::{
    greedy_loc_reduction, loc_failure_search, mixed_transitivity_suite, mon_a_pregeo_check, quotient_equiv_suite,
    weak_tra_suite,
};
use acfg_core::indep::{check_property, sets, CheckOptions, Evaluator, Pregeometry, Property, Relation, Structure};
use acfg_core::subgroups::{enumerate_subspaces, modular_law_check, random_subspace};
use acfg_core::{Subspace, Tower, TowerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20;

type Artifacts = Vec<(String, String)>;

struct Outcome {
    ok: bool,
    detail: String,
    artifacts: Artifacts,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into(), artifacts: Vec::new() }
    }

    fn with(mut self, name: &str, text: String) -> Self {
        self.artifacts.push((name.to_string(), text));
        self
    }
}

// ---- independent oracles ----

/// Number of subspaces of F_q^n by the recursion on dimension.
fn gaussian_total(q: u128, n: u32) -> u128 {
    let mut total = 0;
    for k in 0..=n {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k {
            num *= q.pow(n - i) - 1;
            den *= q.pow(i + 1) - 1;
        }
        total += num / den;
    }
    total
}

/// Every element of the span, by closing `{0}` under adding multiples of each generator.
fn span_set(p: u32, n: usize, gens: &[Vec<u32>]) -> BTreeSet<Vec<u32>> {
    let mut out: BTreeSet<Vec<u32>> = BTreeSet::from([vec![0; n]]);
    for g in gens {
        let mut next = BTreeSet::new();
        for x in &out {
            for c in 0..p {
                next.insert(x.iter().zip(g).map(|(&a, &b)| (a + c * b) % p).collect::<Vec<u32>>());
            }
        }
        out = next;
    }
    out
}

fn set_of(s: &Subspace) -> BTreeSet<Vec<u32>> {
    span_set(s.p, s.n, &s.basis)
}

fn set_sum(p: u32, a: &BTreeSet<Vec<u32>>, b: &BTreeSet<Vec<u32>>) -> BTreeSet<Vec<u32>> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.iter().zip(y).map(|(&u, &v)| (u + v) % p).collect())).collect()
}

fn set_meet(a: &BTreeSet<Vec<u32>>, b: &BTreeSet<Vec<u32>>) -> BTreeSet<Vec<u32>> {
    a.intersection(b).cloned().collect()
}

/// Closure and rank on the points of a linear or affine F_p-geometry, from element sets.
struct PointModel {
    p: u32,
    points: Vec<Vec<u32>>,
    affine: bool,
}

impl PointModel {
    fn of(g: &Pregeometry, affine: bool) -> Self {
        let points = (0..g.size()).map(|i| g.point(i).unwrap().clone()).collect();
        PointModel { p: 2, points, affine }
    }

    fn hull(&self, s: u64) -> BTreeSet<Vec<u32>> {
        let pts: Vec<&Vec<u32>> = sets::iter(s).map(|i| &self.points[i]).collect();
        let n = self.points[0].len();
        if !self.affine {
            return span_set(self.p, n, &pts.into_iter().cloned().collect::<Vec<_>>());
        }
        let Some((x0, rest)) = pts.split_first() else { return BTreeSet::new() };
        let diffs: Vec<Vec<u32>> =
            rest.iter().map(|x| x.iter().zip(x0.iter()).map(|(&a, &b)| (a + self.p - b) % self.p).collect()).collect();
        span_set(self.p, n, &diffs)
            .into_iter()
            .map(|v| v.iter().zip(x0.iter()).map(|(&a, &b)| (a + b) % self.p).collect())
            .collect()
    }

    fn cl(&self, s: u64) -> u64 {
        let h = self.hull(s);
        (0..self.points.len()).filter(|&i| h.contains(&self.points[i])).fold(0, |acc, i| acc | 1 << i)
    }

    fn rank(&self, s: u64) -> usize {
        let h = self.hull(s);
        if h.is_empty() {
            return 0;
        }
        let log = (h.len() as f64).log(self.p as f64).round() as usize;
        if self.affine {
            log + 1
        } else {
            log
        }
    }

    fn a(&self, a: u64, b: u64, c: u64) -> bool {
        self.cl(a | c) & self.cl(b | c) == self.cl(c)
    }

    fn mon_a(&self, a: u64, b: u64, c: u64) -> bool {
        sets::subsets(self.cl(b | c)).all(|d| self.a(a, b | c, c | d))
    }

    fn pregeo(&self, a: u64, b: u64, c: u64) -> bool {
        self.rank(a | c) + self.rank(b | c) == self.rank(c) + self.rank(a | b | c)
    }
}

// ---- criteria ----

fn subspace_counts() -> Outcome {
    let mut ok = true;
    let mut shown = Vec::new();
    for (p, n) in [(2u32, 2usize), (2, 3), (2, 4), (3, 2), (3, 3)] {
        let subs: Vec<Subspace> = enumerate_subspaces(p, n).unwrap().collect();
        let distinct: HashSet<&Vec<Vec<u32>>> = subs.iter().map(|s| &s.basis).collect();
        let want = gaussian_total(p as u128, n as u32);
        ok &= subs.len() as u128 == want && distinct.len() == subs.len();
        shown.push(format!("({p},{n})={}", subs.len()));
    }
    ok &= gaussian_total(2, 3) == 16 && gaussian_total(2, 4) == 67;
    Outcome::new(ok, shown.join(" "))
}

fn flatness() -> Outcome {
    let resolve = |s: &str| match s {
        "X" => Some(0),
        "Y" => Some(1),
        _ => None,
    };
    let decide = |p: u32, text: &str| {
        let tower = Tower::create(&TowerConfig::new(p, 1)).unwrap();
        let poly = parse_poly(text, p, 2, &resolve).unwrap().to_level(tower.level(0).unwrap(), 0);
        let (t, v, complete) = decide_fp_flat(&tower, &poly).unwrap();
        (t, poly, v, complete)
    };
    let (t, poly, v, complete) = decide(5, "X^2 + Y^2");
    let rebuilt = match &v {
        FlatnessVerdict::Flat { level, .. } => {
            reconstruct(&t, 2, &v).unwrap() == Some(embed_poly(&t, &poly, *level).unwrap())
        }
        _ => false,
    };
    let mut ok = complete && rebuilt;
    let (_, _, v3, c3) = decide(3, "X^2 + Y^2");
    ok &= c3 && !v3.is_flat();
    for p in [2, 3, 5] {
        let (_, _, v, c) = decide(p, "X*Y - 1");
        ok &= c && !v.is_flat();
    }
    Outcome::new(ok, format!("X^2+Y^2 flat at 5 (reconstructed: {rebuilt}), verdicts exact"))
}

fn modular_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    let mut oracle_mismatch = 0;
    for (p, n) in [(2u32, 8usize), (3, 4)] {
        for _ in 0..10_000 {
            let mut pick = || {
                let d = rng.gen_range(0..=n.min(4));
                random_subspace(&mut rng, p, n, d)
            };
            let (a, b, c) = (pick(), pick(), pick());
            let lib = modular_law_check(&a, &b, &c).unwrap();
            let (sa, sb, sc) = (set_of(&a), set_of(&b), set_of(&c));
            let lhs = set_meet(&sa, &set_sum(p, &sb, &sc));
            let rhs = set_meet(&sa, &set_sum(p, &sb, &set_meet(&sc, &set_sum(p, &sa, &sb))));
            violations += usize::from(!lib);
            oracle_mismatch += usize::from(lib != (lhs == rhs));
        }
    }
    Outcome::new(
        violations == 0 && oracle_mismatch == 0,
        format!("20000 triples, {violations} violations, {oracle_mismatch} oracle mismatches"),
    )
}

fn mon_a_pregeo() -> Outcome {
    let lin2 = Structure::Pregeo(Pregeometry::linear(2, 2).unwrap());
    let lin3 = Structure::Pregeo(Pregeometry::linear(2, 3).unwrap());
    let ag = Structure::Pregeo(Pregeometry::affine(2, 2).unwrap());
    let r1 = mon_a_pregeo_check(&lin2, None, u64::MAX).unwrap();
    let r2 = mon_a_pregeo_check(&lin3, Some(2), u64::MAX).unwrap();
    let r3 = mon_a_pregeo_check(&ag, None, u64::MAX).unwrap();
    let mut ok = [&r1, &r2, &r3].iter().all(|r| r.agree && r.complete) && r3.separating_count >= 1;
    let mut oracle_mismatch = 0u64;
    for (st, affine) in [(&lin2, false), (&ag, true)] {
        let Structure::Pregeo(g) = st else { unreachable!() };
        let model = PointModel::of(g, affine);
        let mon = Evaluator::new(st, &"mon(a)".parse().unwrap()).unwrap();
        let pg = Evaluator::new(st, &Relation::Pregeo).unwrap();
        let full = st.carrier();
        for a in sets::subsets(full) {
            for b in sets::subsets(full) {
                for c in sets::subsets(full) {
                    let m = model.mon_a(a, b, c);
                    oracle_mismatch += u64::from(m != mon.eval(a, b, c) || model.pregeo(a, b, c) != pg.eval(a, b, c));
                    oracle_mismatch += u64::from(m != model.pregeo(a, b, c));
                }
            }
        }
    }
    ok &= oracle_mismatch == 0;
    let detail = format!(
        "triples {}/{}/{}, separating {} (e.g. {}), oracle mismatches {oracle_mismatch}",
        r1.triples,
        r2.triples,
        r3.triples,
        r3.separating_count,
        r3.separating.first().map(String::as_str).unwrap_or("-")
    );
    Outcome::new(ok, detail).with("mon_a_pregeo", serde_json::to_string(&(r1, r2, r3)).unwrap())
}

fn bmon_and_ext2() -> Outcome {
    let mut ok = true;
    let mut reports = Vec::new();
    for st in
        [Structure::Pregeo(Pregeometry::linear(2, 2).unwrap()), Structure::Pregeo(Pregeometry::affine(2, 2).unwrap())]
    {
        for base in ["a", "pregeo"] {
            for (rel, prop) in [(format!("mon({base})"), Property::Bmon), (format!("star({base})"), Property::Ext2)] {
                let r = check_property(&st, &rel.parse().unwrap(), prop, &CheckOptions::default()).unwrap();
                ok &= r.exhaustive && r.holds();
                reports.push(r);
            }
        }
    }
    let n = reports.iter().map(|r| r.instances).sum::<u64>();
    Outcome::new(ok, format!("8 exhaustive checks, {n} instances"))
        .with("properties", serde_json::to_string(&reports).unwrap())
}

fn mult_state() -> ConstructionState {
    let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
    let sched = Schedule::single(
        "mult",
        "x1*x2 = y1 & x1 != 0 & x2 != 0",
        ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: true },
        None,
    );
    let budgets = Budgets { field: "2^48".parse().unwrap(), ..Budgets::default() };
    let mut st = ConstructionState::init(tower, Subspace::zero(2, 0, 2), sched, SEED, budgets).unwrap();
    run(&mut st, 2).unwrap();
    st
}

fn construction() -> Outcome {
    let st = mult_state();
    let rep = verify_state(&st, 1 << 10).unwrap();
    // (b, k, k') over F_4 \ {0}, k ≤ 2, k' ≤ 1, for each of the two rounds
    let mut ok = rep.passed() && rep.instances.len() == 2 * 3 * 3 * 2;
    let s = st.stages.len() - 1;
    let g = &st.last().group;
    let mut products = 0;
    for b in st.tower.elements(0).unwrap().into_iter().filter(|b| !b.is_zero()) {
        if let Some(w) = product_witness(&st, s, &b).unwrap() {
            let lv = st.tower.level(w.left.level).unwrap();
            let target = st.tower.embed(&b, w.left.level).unwrap().coeffs;
            if lv.mul(&w.left.coeffs, &w.right.coeffs) == target
                && g.contains(&w.left.coeffs)
                && g.contains(&w.right.coeffs)
            {
                products += 1;
            }
        }
    }
    ok &= products == 3;
    let mut mutated = st.clone();
    "stage=1,drop_row=0".parse::<Mutation>().unwrap().apply(&mut mutated).unwrap();
    let neg = verify_state(&mutated, 1 << 8).unwrap();
    ok &= !neg.passed();
    Outcome::new(
        ok,
        format!(
            "{} instances, {} failures, {products}/3 units are products, mutation gives {} failures",
            rep.instances.len(),
            rep.failures(),
            neg.failures()
        ),
    )
    .with("mult_state", st.to_json())
    .with("mult_verify", serde_json::to_string(&rep).unwrap())
}

fn congruence_state() -> ConstructionState {
    let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
    let sched = Schedule::single(
        "endo",
        "x2 + x1^2 + y1^2 + y2^2 = 0",
        ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: false },
        Some(3),
    );
    let budgets = Budgets { field: "2^128".parse().unwrap(), ..Budgets::default() };
    let mut st = ConstructionState::init(tower, Subspace::zero(2, 0, 2), sched, SEED, budgets).unwrap();
    run(&mut st, 1).unwrap();
    st
}

fn congruences() -> Outcome {
    let st = congruence_state();
    let g = &st.last().group;
    let lv = st.tower.level(g.level).unwrap();
    let mut misses = 0;
    for c1 in st.tower.elements(0).unwrap() {
        for c2 in st.tower.elements(0).unwrap() {
            let hit = congruence_solution(&st.tower, g, &[c1.clone(), c2.clone()], &[0, 1]).unwrap().is_some_and(|x| {
                let a = st.tower.embed(&c1, g.level).unwrap().coeffs;
                let b = st.tower.embed(&c2, g.level).unwrap().coeffs;
                g.contains(&lv.sub(&x.coeffs, &a)) && g.contains(&lv.frob(&lv.sub(&x.coeffs, &b)))
            });
            misses += usize::from(!hit);
        }
    }
    let rep = verify_state(&st, 1 << 10).unwrap();
    Outcome::new(
        misses == 0 && rep.passed(),
        format!("16 pairs at degree {}, {misses} misses, verify failures {}", lv.n, rep.failures()),
    )
    .with("endo_state", st.to_json())
}

fn ball_invariant() -> Outcome {
    let mut ok = true;
    let mut stages = 0;
    let seeded = {
        let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
        let sched = Schedule::single(
            "mult",
            "x1*x2 = y1 & x1 != 0 & x2 != 0",
            ParamSource::Explicit { tuples: vec![vec!["w".into()]], level: 0 },
            None,
        );
        let g0 = Subspace::span(2, 0, 2, vec![vec![1, 0]]).unwrap();
        let mut st = ConstructionState::init(tower, g0.clone(), sched, SEED, Budgets::default()).unwrap();
        run(&mut st, 2).unwrap();
        (st, g0)
    };
    let states = [(mult_state(), Subspace::zero(2, 0, 2)), (congruence_state(), Subspace::zero(2, 0, 2)), seeded];
    for (st, g0) in &states {
        for s in 0..st.stages.len() {
            ok &= ball_check(st, s, g0, 2).unwrap();
            stages += 1;
        }
    }
    Outcome::new(ok, format!("{} states, {stages} stages", states.len()))
}

fn loc() -> Outcome {
    let mut ok = true;
    let mut shown = Vec::new();
    let mut reports = Vec::new();
    for r in [2, 3] {
        let rep = loc_failure_search(r).unwrap();
        ok &= rep.holds() && rep.cases.len() == (1 << r) - 1;
        shown.push(format!("r={r}: {} bases", rep.cases.len()));
        reports.push(rep);
    }
    Outcome::new(ok, shown.join(", ")).with("loc", serde_json::to_string(&reports).unwrap())
}

fn transitivity_suites() -> Outcome {
    let w = weak_tra_suite(2, 6, 10_000, SEED).unwrap();
    let m = mixed_transitivity_suite(2, 5, 10_000, SEED, false).unwrap();
    let mr = mixed_transitivity_suite(2, 5, 10_000, SEED, true).unwrap();
    let ok = w.holds() && w.nonvacuous >= 10_000 && [&m, &mr].iter().all(|r| r.holds() && r.accepted == 10_000);
    Outcome::new(
        ok,
        format!(
            "weak: {} nonvacuous; mixed: {} accepted ({} nonvacuous); with rules: {} accepted ({} nonvacuous); counterexamples {}",
            w.nonvacuous,
            m.accepted,
            m.nonvacuous,
            mr.accepted,
            mr.nonvacuous,
            w.counterexample_count + m.counterexample_count + mr.counterexample_count
        ),
    )
    .with("suites", serde_json::to_string(&(w, m, mr)).unwrap())
}

fn greedy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations = 0;
    for _ in 0..1000 {
        let mut pick = |max: usize| {
            let d = rng.gen_range(0..=max);
            random_subspace(&mut rng, 2, 6, d)
        };
        let (a, b, g) = (pick(3), pick(3), pick(4));
        let r = greedy_loc_reduction(&a, &b, &g).unwrap();
        let (sa, sb, sg) = (set_of(&a), set_of(&b), set_of(&g));
        let sac = span_set(2, 6, &a.basis.iter().chain(&r.c).cloned().collect::<Vec<_>>());
        let lhs = set_meet(&sg, &set_sum(2, &sa, &sb));
        let rhs = set_sum(2, &set_meet(&sg, &sac), &set_meet(&sg, &sb));
        let good = r.c.len() <= sa.len() && r.c.iter().all(|v| sb.contains(v)) && lhs == rhs && r.identity_holds;
        violations += usize::from(!good);
    }
    Outcome::new(violations == 0, format!("1000 instances, {violations} violations"))
}

fn quotient_equivalence() -> Outcome {
    let r = quotient_equiv_suite(2, 5, 1000, SEED).unwrap();
    Outcome::new(
        r.holds() && r.accepted == 1000,
        format!("{} accepted, {} nonvacuous, {} disagreements", r.accepted, r.nonvacuous, r.counterexample_count),
    )
    .with("quotient", serde_json::to_string(&r).unwrap())
}

type Criterion = (usize, &'static str, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    (1, "subspace counts", 5, subspace_counts),
    (2, "flatness verdicts", 1, flatness),
    (3, "modular law", 10, modular_law),
    (4, "mon(a) agrees with pregeometric independence", 60, mon_a_pregeo),
    (5, "BMON of mon(R), EXT2 of star(R)", 60, bmon_and_ext2),
    (6, "construction and verification", 30, construction),
    (7, "Frobenius congruences", 60, congruences),
    (8, "ball invariant", 5, ball_invariant),
    (9, "local character failure witnesses", 30, loc),
    (10, "weak and mixed transitivity suites", 120, transitivity_suites),
    (11, "greedy reduction identity", 30, greedy),
    (12, "quotient equivalence", 30, quotient_equivalence),
];

fn run_criterion(f: fn() -> Outcome) -> (Outcome, Duration) {
    let t0 = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Outcome::new(false, format!("panicked: {}", msg.unwrap_or_default()))
    });
    (out, t0.elapsed())
}

fn cli_run(dir: &std::path::Path, tag: &str) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    let sched = dir.join("mult.json");
    std::fs::write(
        &sched,
        r#"{"entries":[{"id":"mult","formula":{"text":"x1*x2 = y1 & x1 != 0 & x2 != 0"},"parameters":{"all_at_degree":{"degree":2,"exclude_zero_entries":true}}}]}"#,
    )
    .unwrap();
    let state = dir.join(format!("state-{tag}.json"));
    let bin = env!("CARGO_BIN_EXE_acfg");
    let construct = Command::new(bin)
        .args(["construct", "--p", "2", "--n0", "2", "--rounds", "2", "--seed", "7", "--schedule"])
        .arg(&sched)
        .arg("--out")
        .arg(&state)
        .output()
        .unwrap();
    let verify = Command::new(bin).args(["verify", "--state"]).arg(&state).output().unwrap();
    let text = String::from_utf8(construct.stdout).unwrap().replace(&state.display().to_string(), "STATE");
    (std::fs::read(&state).unwrap(), text.into_bytes(), verify.stdout)
}

fn main() {
    let mut failed = Vec::new();
    let mut first: Artifacts = Vec::new();
    for (n, name, bound, f) in CRITERIA {
        let (out, dt) = run_criterion(f);
        let in_time = dt <= Duration::from_secs(bound);
        let ok = out.ok && in_time;
        let timing = if in_time { String::new() } else { format!(", over the {bound}s bound") };
        println!("criterion {n:>2} {}: {name}: {} ({:.2?}{timing})", if ok { "PASS" } else { "FAIL" }, out.detail, dt);
        if !ok {
            failed.push(n);
        }
        first.extend(out.artifacts);
    }

    let t0 = Instant::now();
    let mut second: Artifacts = Vec::new();
    for (_, _, _, f) in CRITERIA {
        second.extend(run_criterion(f).0.artifacts);
    }
    let dir = tempfile::tempdir().unwrap();
    let a = cli_run(dir.path(), "a");
    let b = cli_run(dir.path(), "b");
    let differing: Vec<&str> = first.iter().zip(&second).filter(|(x, y)| x != y).map(|(x, _)| x.0.as_str()).collect();
    let ok = first.len() == second.len() && differing.is_empty() && a == b && !a.0.is_empty();
    println!(
        "criterion 13 {}: determinism: {} artifacts and the CLI state, construct and verify outputs compared{} ({:.2?})",
        if ok { "PASS" } else { "FAIL" },
        first.len(),
        if differing.is_empty() { String::new() } else { format!("; differing: {}", differing.join(", ")) },
        t0.elapsed()
    );
    if !ok {
        failed.push(13);
    }

    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
