use serde::Serialize;

use super::{classical_bound, BellFunctional};
use crate::boxes::CorrelationBox;
use crate::cube::deterministic_maps;
use crate::error::{Error, Result};
use crate::solvers::{lp_solve, LinearProgram, LpStatus, Sense, VarBound};

use super::classical::STRATEGY_CAP;

/// Largest dense tableau (rows × columns) the membership LPs will build.
const TABLEAU_CAP: usize = 50_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct LocalWeight {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Separation {
    /// Coefficients in `[−1, 1]` maximizing `⟨t, P⟩ − classical_bound(t)`.
    pub functional: BellFunctional,
    pub box_value: f64,
    pub classical_bound: f64,
    pub gap: f64,
    /// Raw Farkas vector of the weights LP, read as a Bell functional.
    pub farkas: BellFunctional,
}

#[derive(Clone, Debug, Serialize)]
pub struct LhvMembership {
    pub member: bool,
    /// Nonzero weights of a local decomposition when `member`.
    pub weights: Vec<LocalWeight>,
    pub separation: Option<Separation>,
}

fn strategy_pairs(m: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    let maps = deterministic_maps(m, n, STRATEGY_CAP)?;
    let rows = n * n * m * m + 1;
    if maps.len() * maps.len() * rows > TABLEAU_CAP {
        return Err(Error::Overflow(format!("{} strategy pairs are too many for the dense LP", maps.len() * maps.len())));
    }
    Ok(maps)
}

/// Decides whether `p` is a mixture of deterministic local strategies.
pub fn lhv_membership(p: &CorrelationBox) -> Result<LhvMembership> {
    let (m, n) = (p.m(), p.n());
    let maps = strategy_pairs(m, n)?;
    let k = maps.len();
    let entries = n * n * m * m;

    // One column per pair (g, h); one row per (a, b, x, y) plus normalization.
    let mut a = vec![vec![0.0; k * k]; entries + 1];
    for (gi, g) in maps.iter().enumerate() {
        for (hi, h) in maps.iter().enumerate() {
            let col = gi * k + hi;
            for x in 0..m {
                for y in 0..m {
                    a[p.index(g[x], h[y], x, y)][col] = 1.0;
                }
            }
            a[entries][col] = 1.0;
        }
    }
    let mut b = p.probabilities().to_vec();
    b.push(1.0);
    let lp = LinearProgram::standard(Sense::Minimize, vec![0.0; k * k], a, b);
    let sol = lp_solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let weights = sol
                .x
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 1e-12)
                .map(|(col, &w)| LocalWeight { alice: maps[col / k].clone(), bob: maps[col % k].clone(), weight: w })
                .collect();
            Ok(LhvMembership { member: true, weights, separation: None })
        }
        LpStatus::Infeasible => {
            let farkas = BellFunctional::new(m, n, sol.dual[..entries].to_vec())?;
            let separation = separating_functional(p, &maps, farkas)?;
            Ok(LhvMembership { member: false, weights: vec![], separation: Some(separation) })
        }
        LpStatus::Unbounded => unreachable!("feasibility LP has a zero objective"),
    }
}

/// `max ⟨t, P⟩ − s` subject to `⟨t, D_gh⟩ ≤ s` for every deterministic box
/// and `−1 ≤ t ≤ 1`.
fn separating_functional(p: &CorrelationBox, maps: &[Vec<usize>], farkas: BellFunctional) -> Result<Separation> {
    let (m, n) = (p.m(), p.n());
    let entries = n * n * m * m;
    let k = maps.len();
    let pairs = k * k;
    // columns: t (entries, free) | s (free) | slack per pair | upper | lower
    let cols = entries + 1 + pairs + 2 * entries;
    let mut a = Vec::with_capacity(pairs + 2 * entries);
    let mut b = Vec::with_capacity(pairs + 2 * entries);
    for (gi, g) in maps.iter().enumerate() {
        for (hi, h) in maps.iter().enumerate() {
            let mut row = vec![0.0; cols];
            for x in 0..m {
                for y in 0..m {
                    row[p.index(g[x], h[y], x, y)] += 1.0;
                }
            }
            row[entries] = -1.0;
            row[entries + 1 + gi * k + hi] = 1.0;
            a.push(row);
            b.push(0.0);
        }
    }
    for i in 0..entries {
        let mut up = vec![0.0; cols];
        up[i] = 1.0;
        up[entries + 1 + pairs + i] = 1.0;
        a.push(up);
        b.push(1.0);
        let mut lo = vec![0.0; cols];
        lo[i] = -1.0;
        lo[entries + 1 + pairs + entries + i] = 1.0;
        a.push(lo);
        b.push(1.0);
    }
    let mut objective = vec![0.0; cols];
    objective[..entries].copy_from_slice(p.probabilities());
    objective[entries] = -1.0;
    let mut bounds = vec![VarBound::NonNegative; cols];
    for bnd in bounds.iter_mut().take(entries + 1) {
        *bnd = VarBound::Free;
    }
    let sol = lp_solve(&LinearProgram { sense: Sense::Maximize, objective, a, b, bounds })?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::invalid("separation LP did not reach an optimum"));
    }
    let functional = BellFunctional::new(m, n, sol.x[..entries].to_vec())?;
    let box_value = functional.evaluate(p)?;
    let cb = classical_bound(&functional)?.value;
    Ok(Separation { functional, box_value, classical_bound: cb, gap: box_value - cb, farkas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{isotropic_box, pr_box, uniform_box};

    #[test]
    fn uniform_is_local() {
        let r = lhv_membership(&uniform_box(2, 2).unwrap()).unwrap();
        assert!(r.member);
        let total: f64 = r.weights.iter().map(|w| w.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pr_box_is_separated() {
        let r = lhv_membership(&pr_box()).unwrap();
        assert!(!r.member);
        let s = r.separation.unwrap();
        assert!(s.gap >= 2.0 - 1e-9, "gap {}", s.gap);
        // the raw Farkas vector separates too
        let fv = s.farkas.evaluate(&pr_box()).unwrap();
        assert!(fv > classical_bound(&s.farkas).unwrap().value + 1e-9);
    }

    #[test]
    fn isotropic_boundary() {
        assert!(lhv_membership(&isotropic_box(0.5).unwrap()).unwrap().member);
        assert!(!lhv_membership(&isotropic_box(0.502).unwrap()).unwrap().member);
    }

    #[test]
    fn weights_reproduce_the_box() {
        let p = isotropic_box(0.3).unwrap();
        let r = lhv_membership(&p).unwrap();
        let mut rebuilt = [0.0; 16];
        for w in &r.weights {
            for x in 0..2 {
                for y in 0..2 {
                    rebuilt[p.index(w.alice[x], w.bob[y], x, y)] += w.weight;
                }
            }
        }
        for (a, b) in rebuilt.iter().zip(p.probabilities()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
