use std::time::Instant;

use acfg_core::genesis::{
    ball_check, congruence_solution, product_witness, run, verify_state, Budgets, ConstructionState, Mutation,
    ParamSource, Schedule,
};
use acfg_core::{Subspace, Tower, TowerConfig};

fn products(rounds: usize, seed: u64) -> ConstructionState {
    let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
    let sched = Schedule::single(
        "mult",
        "x1*x2 = y1 & x1 != 0 & x2 != 0",
        ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: true },
        None,
    );
    let budgets = Budgets { field: "2^48".parse().unwrap(), ..Budgets::default() };
    let mut st = ConstructionState::init(tower, Subspace::zero(2, 0, 2), sched, seed, budgets).unwrap();
    run(&mut st, rounds).unwrap();
    st
}

#[test]
fn two_rounds_make_every_unit_a_product() {
    let t0 = Instant::now();
    let st = products(2, 11);
    assert_eq!(st.tower.degree(st.last().level).unwrap(), 48);
    let rep = verify_state(&st, 1 << 10).unwrap();
    assert!(rep.passed(), "{:?}", rep.structural_failures);
    assert_eq!(rep.instances.len(), 2 * 18);
    let s = st.stages.len() - 1;
    for b in st.tower.elements(0).unwrap().into_iter().filter(|b| !b.is_zero()) {
        let w = product_witness(&st, s, &b).unwrap().expect("product found");
        let lv = st.tower.level(w.left.level).unwrap();
        assert_eq!(lv.mul(&w.left.coeffs, &w.right.coeffs), st.tower.embed(&b, w.left.level).unwrap().coeffs);
        assert!(st.last().group.contains(&w.left.coeffs) && st.last().group.contains(&w.right.coeffs));
    }
    for s in 0..st.stages.len() {
        assert!(ball_check(&st, s, &Subspace::zero(2, 0, 2), 2).unwrap());
    }
    assert!(t0.elapsed().as_secs() < 30);
}

#[test]
fn mutations_of_either_stage_fail() {
    let base = products(2, 11);
    for stage in 1..=2 {
        let mut st = base.clone();
        Mutation { stage, drop_row: 0 }.apply(&mut st).unwrap();
        assert!(!verify_state(&st, 1 << 8).unwrap().passed(), "stage {stage}");
    }
}

#[test]
fn identical_seeds_give_identical_states() {
    assert_eq!(products(2, 5).to_json(), products(2, 5).to_json());
}

#[test]
fn nonzero_seed_group_is_preserved() {
    let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
    let sched = Schedule::single(
        "mult",
        "x1*x2 = y1 & x1 != 0 & x2 != 0",
        ParamSource::Explicit { tuples: vec![vec!["w".into()]], level: 0 },
        None,
    );
    let g0 = Subspace::span(2, 0, 2, vec![vec![1, 0]]).unwrap();
    let mut st = ConstructionState::init(tower, g0.clone(), sched, 0, Budgets::default()).unwrap();
    run(&mut st, 2).unwrap();
    for s in 0..st.stages.len() {
        assert!(ball_check(&st, s, &g0, 2).unwrap());
    }
    assert!(verify_state(&st, 1 << 10).unwrap().passed());
}

#[test]
fn frobenius_congruences_are_all_solvable() {
    let t0 = Instant::now();
    let tower = Tower::create(&TowerConfig::new(2, 2)).unwrap();
    let sched = Schedule::single(
        "endo",
        "x2 + x1^2 + y1^2 + y2^2 = 0",
        ParamSource::AllAtDegree { degree: 2, exclude_zero_entries: false },
        Some(3),
    );
    let budgets = Budgets { field: "2^128".parse().unwrap(), ..Budgets::default() };
    let mut st = ConstructionState::init(tower, Subspace::zero(2, 0, 2), sched, 1, budgets).unwrap();
    run(&mut st, 1).unwrap();
    let g = &st.last().group;
    let lv = st.tower.level(g.level).unwrap();
    for c1 in st.tower.elements(0).unwrap() {
        for c2 in st.tower.elements(0).unwrap() {
            let x = congruence_solution(&st.tower, g, &[c1.clone(), c2.clone()], &[0, 1]).unwrap().expect("solvable");
            let a = st.tower.embed(&c1, g.level).unwrap().coeffs;
            let b = st.tower.embed(&c2, g.level).unwrap().coeffs;
            assert!(g.contains(&lv.sub(&x.coeffs, &a)));
            assert!(g.contains(&lv.frob(&lv.sub(&x.coeffs, &b))));
        }
    }
    eprintln!("degree {} in {:?}", lv.n, t0.elapsed());
}
