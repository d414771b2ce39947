//! Balls `{H : H ∩ F_{p^n} = H0}` and finite density experiments over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::ConstructionState;
use super::GenesisError;
use crate::formulas::solve::Instance;
use crate::formulas::theta::search_independent;
use crate::formulas::{FormulaSpec, QfConjunction};
use crate::linalg::Row;
use crate::subgroups::{
    count_subspaces, enumerate_subspaces, intersect_subfield, lift, random_vector, Subspace, ENUMERATION_GUARD,
};
use crate::tower::{Tower, TowerConfig};

/// Whether stage `s` meets the subfield of degree `n` exactly in `h0`.
pub fn ball_check(state: &ConstructionState, s: usize, h0: &Subspace, n: usize) -> Result<bool, GenesisError> {
    let st = state.stage(s)?;
    let tower = &state.tower;
    let deg = tower.degree(st.level)?;
    if deg % n != 0 {
        return Err(GenesisError::Dimension(format!("{n} does not divide the stage degree {deg}")));
    }
    if tower.degree(h0.level)? != n {
        return Err(GenesisError::Dimension(format!("seed group does not live at degree {n}")));
    }
    Ok(intersect_subfield(tower, &st.group, n)? == lift(tower, h0, st.level)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomInstance {
    pub formula: FormulaSpec,
    /// Parameter texts at the small field.
    pub params: Vec<String>,
    pub k: usize,
    pub k_params: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// Group-premise failure counts as a pass.
    #[default]
    Strict,
    /// The conclusion is demanded whenever the formula premise is witnessed.
    VacuityOff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub fraction: f64,
    pub passed: u64,
    pub total: u64,
    pub exhaustive: bool,
}

struct Prepared {
    k: usize,
    b_prime: Vec<Row>,
    /// `None` when the formula premise is not witnessed.
    solutions: Option<Vec<Vec<Row>>>,
}

const SOLUTION_CAP: u64 = 1 << 16;

fn prepare(tower: &Tower, top: usize, n: usize, inst: &AxiomInstance) -> Result<Prepared, GenesisError> {
    let phi = QfConjunction::from_spec(&inst.formula, tower.p())?;
    if inst.k > phi.num_witness || inst.k_params > phi.num_params {
        return Err(GenesisError::Dimension(format!("split ({}, {}) exceeds arity", inst.k, inst.k_params)));
    }
    let params = inst
        .params
        .iter()
        .map(|s| tower.parse_element(s, 0).and_then(|b| tower.embed(&b, top)))
        .collect::<Result<Vec<_>, _>>()?;
    let base = Subspace { p: tower.p(), level: top, n: tower.degree(top)?, basis: tower.subfield_basis(top, n)? };
    let theta = search_independent(tower, &phi, &params, top, &base, SOLUTION_CAP)?;
    let b_prime = params[..inst.k_params].iter().map(|b| b.coeffs.clone()).collect();
    if theta.found.is_none() {
        return Ok(Prepared { k: inst.k, b_prime, solutions: None });
    }
    let solver = Instance::new(tower, &phi, &params, top)?;
    let mut sols = Vec::new();
    solver.enumerate(SOLUTION_CAP, &mut |v| {
        sols.push(v.to_vec());
        true
    });
    Ok(Prepared { k: inst.k, b_prime, solutions: Some(sols) })
}

fn passes(h: &Subspace, inst: &Prepared, mode: DensityMode) -> Result<bool, GenesisError> {
    let Some(sols) = &inst.solutions else { return Ok(true) };
    if mode == DensityMode::Strict && !h.meet_span(&inst.b_prime)?.is_zero() {
        return Ok(true);
    }
    for a in sols {
        let mut vs = a.clone();
        vs.extend(inst.b_prime.iter().cloned());
        let want = Subspace::span(h.p, h.level, h.n, a[..inst.k].to_vec())?;
        if h.meet_span(&vs)? == want {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Fraction of subspaces `H ≤ F_{p^N}` with `H ∩ F_{p^n} = H0` passing every
/// instance of `batch`; exhaustive when the subspace lattice has at most
/// `sample_size` members, sampled otherwise.
#[allow(clippy::too_many_arguments)]
pub fn density_experiment(
    p: u32,
    n: usize,
    big_n: usize,
    h0: &Subspace,
    batch: &[AxiomInstance],
    sample_size: u64,
    seed: u64,
    mode: DensityMode,
) -> Result<DensityReport, GenesisError> {
    if n == 0 || !big_n.is_multiple_of(n) {
        return Err(GenesisError::Dimension(format!("{n} does not divide {big_n}")));
    }
    if h0.n != n || h0.p != p {
        return Err(GenesisError::Dimension(format!("seed group does not live in F_{p}^{n}")));
    }
    let mut tower = Tower::create(&TowerConfig::new(p, n))?;
    if big_n > n {
        tower = tower.grow(big_n / n)?;
    }
    let top = tower.top();
    let h0 = Subspace { level: 0, ..h0.clone() };
    let seed_group = lift(&tower, &h0, top)?;
    let small = Subspace { p, level: top, n: big_n, basis: tower.subfield_basis(top, n)? };
    let prepared = batch.iter().map(|i| prepare(&tower, top, n, i)).collect::<Result<Vec<_>, _>>()?;

    let in_ball = |h: &Subspace| -> Result<bool, GenesisError> { Ok(h.intersect(&small)? == seed_group) };
    let mut passed = 0u64;
    let mut total = 0u64;
    let count = count_subspaces(p, big_n);
    let exhaustive = count <= sample_size as u128 && count <= ENUMERATION_GUARD;
    if exhaustive {
        for h in enumerate_subspaces(p, big_n)? {
            let h = Subspace { level: top, ..h };
            if !in_ball(&h)? {
                continue;
            }
            total += 1;
            if prepared.iter().map(|i| passes(&h, i, mode)).collect::<Result<Vec<_>, _>>()?.iter().all(|&b| b) {
                passed += 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let room = big_n - n;
        while total < sample_size {
            let extra = rng.gen_range(0..=room);
            let vs: Vec<Row> = (0..extra).map(|_| random_vector(&mut rng, p, big_n)).collect();
            let h = seed_group.with_vectors(&vs)?;
            if !in_ball(&h)? {
                continue;
            }
            total += 1;
            let mut ok = true;
            for i in &prepared {
                if !passes(&h, i, mode)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                passed += 1;
            }
        }
    }
    let fraction = if total == 0 { 1.0 } else { passed as f64 / total as f64 };
    Ok(DensityReport { fraction, passed, total, exhaustive })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mult_instance(b: &str, k: usize, kp: usize) -> AxiomInstance {
        AxiomInstance {
            formula: FormulaSpec { text: "x1*x2 = y1 & x1 != 0 & x2 != 0".into(), witnesses: None, params: None },
            params: vec![b.into()],
            k,
            k_params: kp,
        }
    }

    #[test]
    fn empty_batch_has_full_density() {
        let h0 = Subspace::zero(2, 0, 2);
        let r = density_experiment(2, 2, 4, &h0, &[], 100, 1, DensityMode::Strict).unwrap();
        assert_eq!(r.fraction, 1.0);
        assert!(r.exhaustive);
        // subspaces of F_2^4 meeting F_4 trivially
        assert_eq!(r.total, 1 + 12 + 16);
    }

    #[test]
    fn full_seed_with_vacuity_off_never_passes() {
        let h0 = Subspace::full(2, 0, 2);
        let batch = [mult_instance("1", 0, 1)];
        let off = density_experiment(2, 2, 4, &h0, &batch, 100, 1, DensityMode::VacuityOff).unwrap();
        assert_eq!(off.passed, 0);
        let strict = density_experiment(2, 2, 4, &h0, &batch, 100, 1, DensityMode::Strict).unwrap();
        assert_eq!(strict.fraction, 1.0);
    }

    #[test]
    fn sampled_mode_stays_in_the_ball() {
        let h0 = Subspace::span(2, 0, 2, vec![vec![1, 0]]).unwrap();
        let batch = [mult_instance("w", 1, 1)];
        let a = density_experiment(2, 2, 6, &h0, &batch, 50, 9, DensityMode::Strict).unwrap();
        let b = density_experiment(2, 2, 6, &h0, &batch, 50, 9, DensityMode::Strict).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a.total, 50);
        assert_eq!(a, b);
    }
}
