//! Consequences of genericity checked on a finished stage: products of group
//! elements and simultaneous Frobenius congruences.

use serde::Serialize;

use super::state::ConstructionState;
use super::GenesisError;
use crate::linalg::{self, Row};
use crate::subgroups::Subspace;
use crate::tower::{Level, Tower, TowerElement};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductWitness {
    pub left: TowerElement,
    pub right: TowerElement,
    /// Whether the left factor came from the construction log.
    pub from_log: bool,
}

/// Finds `g1, g2` in the stage-`s` group with `g1 * g2 = b`, both memberships
/// re-checked directly. Logged solution entries are tried first, then the
/// group is enumerated when it has at most `2^20` elements.
pub fn product_witness(
    state: &ConstructionState,
    s: usize,
    b: &TowerElement,
) -> Result<Option<ProductWitness>, GenesisError> {
    let tower = &state.tower;
    let st = state.stage(s)?;
    let level = st.level;
    let lv = tower.level(level)?;
    let b = tower.embed(b, level)?;
    let try_left = |g1: &[u32]| -> Option<Row> {
        if Level::is_zero(g1) || !st.group.contains(g1) {
            return None;
        }
        let g2 = lv.mul(&b.coeffs, &lv.inv(g1)?);
        st.group.contains(&g2).then_some(g2)
    };
    for t in 1..=s {
        let from = state.stages[t].level;
        for rec in &state.stages[t].log {
            for row in &rec.solutions {
                for x in row {
                    let g1 = tower.embed_coeffs(from, level, x)?;
                    if let Some(g2) = try_left(&g1) {
                        return Ok(Some(ProductWitness {
                            left: TowerElement { level, coeffs: g1 },
                            right: TowerElement { level, coeffs: g2 },
                            from_log: true,
                        }));
                    }
                }
            }
        }
    }
    if st.group.dim() <= 20 {
        for g1 in st.group.elements() {
            if let Some(g2) = try_left(&g1) {
                return Ok(Some(ProductWitness {
                    left: TowerElement { level, coeffs: g1 },
                    right: TowerElement { level, coeffs: g2 },
                    from_log: false,
                }));
            }
        }
    }
    Ok(None)
}

/// Annihilator rows: `y` with `y · v = 0` for every `v` in the subspace.
fn annihilator(g: &Subspace) -> Vec<Row> {
    linalg::kernel(g.basis.clone(), g.n, g.p)
}

/// Some `x` at `g`'s level with `Frob^{e_i}(x - c_i) ∈ g` for every `i`, found
/// by linear algebra and re-checked directly.
pub fn congruence_solution(
    tower: &Tower,
    g: &Subspace,
    cs: &[TowerElement],
    frob: &[usize],
) -> Result<Option<TowerElement>, GenesisError> {
    if cs.len() != frob.len() {
        return Err(GenesisError::Dimension(format!("{} constants for {} maps", cs.len(), frob.len())));
    }
    let level = g.level;
    let lv = tower.level(level)?;
    let n = lv.n;
    let p = g.p;
    let cs: Vec<Row> = cs.iter().map(|c| Ok(tower.embed(c, level)?.coeffs)).collect::<Result<_, GenesisError>>()?;
    // Frob^{-e} G = Frob^{n-e} G
    let mut eqs: Vec<Row> = Vec::new();
    let mut rhs: Vec<u32> = Vec::new();
    for (c, &e) in cs.iter().zip(frob) {
        let back = (n - e % n) % n;
        let cols = lv.frob_matrix(back);
        let gi = g.image(&cols, level, n);
        for y in annihilator(&gi) {
            let dot = y.iter().zip(c).fold(0u64, |acc, (&a, &b)| acc + a as u64 * b as u64) % p as u64;
            eqs.push(y);
            rhs.push(dot as u32);
        }
    }
    let x = if eqs.is_empty() {
        vec![0; n]
    } else {
        let cols: Vec<Row> = (0..n).map(|j| eqs.iter().map(|r| r[j]).collect()).collect();
        match linalg::solve_combination(&cols, &rhs, p) {
            Some(x) => x,
            None => return Ok(None),
        }
    };
    for (c, &e) in cs.iter().zip(frob) {
        if !g.contains(&lv.frob_iter(&lv.sub(&x, c), e)) {
            return Err(GenesisError::Corrupt("congruence solution failed its direct check".into()));
        }
    }
    Ok(Some(TowerElement { level, coeffs: x }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerConfig;

    #[test]
    fn congruence_in_a_small_field() {
        let t = Tower::create(&TowerConfig::new(2, 4)).unwrap();
        let g = Subspace::span(2, 0, 4, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let lv = t.level(0).unwrap();
        for c1 in t.elements(0).unwrap() {
            for c2 in t.elements(0).unwrap() {
                let got = congruence_solution(&t, &g, &[c1.clone(), c2.clone()], &[0, 1]).unwrap();
                let brute = t.elements(0).unwrap().into_iter().find(|x| {
                    g.contains(&lv.sub(&x.coeffs, &c1.coeffs)) && g.contains(&lv.frob(&lv.sub(&x.coeffs, &c2.coeffs)))
                });
                assert_eq!(got.is_some(), brute.is_some());
            }
        }
    }

    #[test]
    fn zero_group_forces_equal_constants() {
        let t = Tower::create(&TowerConfig::new(3, 2)).unwrap();
        let g = Subspace::zero(3, 0, 2);
        let a = t.generator(0).unwrap();
        assert!(congruence_solution(&t, &g, &[a.clone(), a.clone()], &[0, 1]).unwrap().is_some());
        assert!(congruence_solution(&t, &g, &[a, t.one(0).unwrap()], &[0, 1]).unwrap().is_none());
    }
}
