//! Primal-dual interior point method for block-diagonal SDPs.
//!
//! Problems use the pair
//!
//! ```text
//! (P)  max ⟨C, X⟩  s.t. ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! (D)  min bᵀy     s.t. Z = Σ y_i A_i − C ⪰ 0
//! ```
//!
//! and are solved with the HKM direction and a Mehrotra predictor-corrector
//! from an infeasible start.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{symmetric_eigenvalues, RealMatrix};

/// One entry of a symmetric block matrix. Off-diagonal entries stand for both
/// `(row, col)` and `(col, row)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Constraint {
    pub entries: Vec<SymEntry>,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SemidefiniteProgram {
    pub blocks: Vec<usize>,
    pub objective: Vec<SymEntry>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SdpSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    /// `y` holds a ray with `Σ y_i A_i ⪰ 0` and `bᵀy = −1`.
    PrimalInfeasible,
    /// `x` holds a ray with `⟨A_i, X⟩ = 0`, `X ⪰ 0` and `⟨C, X⟩ = 1`.
    DualInfeasible,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖b − A(X)‖∞`
    pub primal: f64,
    /// `‖Σ y_i A_i − C − Z‖∞`
    pub dual: f64,
    /// `|pobj − dobj| / (1 + |pobj| + |dobj|)`
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<RealMatrix>,
    pub y: Vec<f64>,
    pub z: Vec<RealMatrix>,
    pub pobj: f64,
    pub dobj: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("malformed SDP: {0}")]
    Malformed(String),
    #[error("interior point method hit the iteration limit (primal {:.2e}, dual {:.2e}, gap {:.2e})", .0.residuals.primal, .0.residuals.dual, .0.residuals.gap)]
    MaxIterExceeded(Box<SdpSolution>),
    #[error("interior point method stalled (primal {:.2e}, dual {:.2e}, gap {:.2e})", .0.residuals.primal, .0.residuals.dual, .0.residuals.gap)]
    Stalled(Box<SdpSolution>),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl SdpError {
    pub fn last_iterate(&self) -> Option<&SdpSolution> {
        match self {
            SdpError::MaxIterExceeded(s) | SdpError::Stalled(s) => Some(s),
            _ => None,
        }
    }
}

impl SemidefiniteProgram {
    pub fn new(blocks: Vec<usize>) -> Self {
        Self { blocks, ..Default::default() }
    }

    pub fn add_objective(&mut self, block: usize, row: usize, col: usize, value: f64) {
        self.objective.push(SymEntry { block, row, col, value });
    }

    /// Appends a constraint and returns its index.
    pub fn add_constraint(&mut self, entries: Vec<SymEntry>, rhs: f64) -> usize {
        self.constraints.push(Constraint { entries, rhs });
        self.constraints.len() - 1
    }

    fn check(&self) -> Result<(), SdpError> {
        if self.blocks.is_empty() || self.blocks.contains(&0) {
            return Err(SdpError::Malformed("blocks must be non-empty with positive sides".into()));
        }
        let scalar_dim: usize = self.blocks.iter().map(|s| s * (s + 1) / 2).sum();
        if self.constraints.len() > scalar_dim {
            return Err(SdpError::Malformed(format!(
                "{} constraints exceed the scalar dimension {scalar_dim}",
                self.constraints.len()
            )));
        }
        let all = self.objective.iter().chain(self.constraints.iter().flat_map(|c| &c.entries));
        for e in all {
            let side = *self.blocks.get(e.block).ok_or_else(|| SdpError::Malformed(format!("no block {}", e.block)))?;
            if e.row >= side || e.col >= side {
                return Err(SdpError::Malformed(format!("entry ({}, {}) outside block {} of side {side}", e.row, e.col, e.block)));
            }
            if !e.value.is_finite() {
                return Err(SdpError::Malformed("non-finite entry".into()));
            }
        }
        if self.constraints.iter().any(|c| !c.rhs.is_finite()) {
            return Err(SdpError::Malformed("non-finite right-hand side".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("SDP serializes")
    }
}

/// Upper-triangle entry with the weight `w` such that the matrix is
/// `w (e_r e_cᵀ + e_c e_rᵀ)`.
#[derive(Clone, Copy)]
struct Term {
    r: usize,
    c: usize,
    w: f64,
}

/// Constraint or objective matrix grouped by block.
type Sparse = Vec<Vec<Term>>;

fn compile(entries: &[SymEntry], nblocks: usize) -> Sparse {
    let mut merged: Vec<BTreeMap<(usize, usize), f64>> = vec![BTreeMap::new(); nblocks];
    for e in entries {
        let key = (e.row.min(e.col), e.row.max(e.col));
        *merged[e.block].entry(key).or_insert(0.0) += e.value;
    }
    merged
        .into_iter()
        .map(|m| {
            m.into_iter()
                .filter(|(_, v)| *v != 0.0)
                .map(|((r, c), v)| Term { r, c, w: if r == c { 0.5 * v } else { v } })
                .collect()
        })
        .collect()
}

fn sparse_dot(a: &Sparse, x: &[RealMatrix]) -> f64 {
    let mut s = 0.0;
    for (blk, terms) in a.iter().enumerate() {
        let xb = &x[blk];
        for t in terms {
            s += t.w * (xb[(t.r, t.c)] + xb[(t.c, t.r)]);
        }
    }
    s
}

fn sparse_add(target: &mut [RealMatrix], a: &Sparse, scale: f64) {
    for (blk, terms) in a.iter().enumerate() {
        for t in terms {
            target[blk][(t.r, t.c)] += scale * t.w;
            target[blk][(t.c, t.r)] += scale * t.w;
        }
    }
}

fn sparse_frobenius(a: &Sparse) -> f64 {
    a.iter()
        .flatten()
        .map(|t| if t.r == t.c { 4.0 * t.w * t.w } else { 2.0 * t.w * t.w })
        .sum::<f64>()
        .sqrt()
}

type Blocks = Vec<RealMatrix>;

fn zeros_like(sizes: &[usize]) -> Blocks {
    sizes.iter().map(|&s| RealMatrix::zeros(s, s)).collect()
}

fn dot(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn max_abs(a: &Blocks) -> f64 {
    a.iter().map(RealMatrix::max_abs).fold(0.0, f64::max)
}

struct Problem {
    sizes: Vec<usize>,
    c: Sparse,
    a: Vec<Sparse>,
    b: Vec<f64>,
}

impl Problem {
    fn a_op(&self, x: &Blocks) -> Vec<f64> {
        self.a.iter().map(|ai| sparse_dot(ai, x)).collect()
    }

    fn at_op(&self, y: &[f64]) -> Blocks {
        let mut out = zeros_like(&self.sizes);
        for (ai, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                sparse_add(&mut out, ai, yi);
            }
        }
        out
    }

    fn c_dense(&self) -> Blocks {
        let mut out = zeros_like(&self.sizes);
        sparse_add(&mut out, &self.c, 1.0);
        out
    }

    /// Schur complement `M_ij = Tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &Blocks, zi: &Blocks) -> RealMatrix {
        let m = self.a.len();
        let mut out = RealMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for blk in 0..self.sizes.len() {
                    let (ti, tj) = (&self.a[i][blk], &self.a[j][blk]);
                    if ti.is_empty() || tj.is_empty() {
                        continue;
                    }
                    let (xb, zb) = (&x[blk], &zi[blk]);
                    for e in ti {
                        for f in tj {
                            // Tr((e_r e_cᵀ + e_c e_rᵀ) X (e_p e_qᵀ + e_q e_pᵀ) Z⁻¹)
                            let (r, c, p, q) = (e.r, e.c, f.r, f.c);
                            let v = xb[(c, p)] * zb[(q, r)]
                                + xb[(c, q)] * zb[(p, r)]
                                + xb[(r, p)] * zb[(q, c)]
                                + xb[(r, q)] * zb[(p, c)];
                            s += e.w * f.w * v;
                        }
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

fn cholesky_blocks(x: &Blocks) -> Option<Blocks> {
    x.iter().map(RealMatrix::cholesky).collect()
}

/// Largest `α` with `X + α dX ⪰ 0` given the Cholesky factor of `X`.
fn max_step(chol: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for (l, d) in chol.iter().zip(dx) {
        let li = l.lower_inverse();
        let w = li.matmul(d).matmul(&li.transpose());
        let lmin = symmetric_eigenvalues(&w)[0];
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

/// Factors `M`, adding a growing diagonal shift if it is numerically singular.
fn factor_schur(m: &RealMatrix) -> Result<RealMatrix, SdpError> {
    if let Some(l) = m.cholesky() {
        return Ok(l);
    }
    let n = m.rows();
    let scale = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 1e-14 * scale;
    for _ in 0..12 {
        let mut reg = m.clone();
        for i in 0..n {
            reg[(i, i)] += shift;
        }
        if let Some(l) = reg.cholesky() {
            return Ok(l);
        }
        shift *= 10.0;
    }
    Err(SdpError::Numerical("Schur complement is not positive definite".into()))
}

struct Direction {
    dx: Blocks,
    dy: Vec<f64>,
    dz: Blocks,
}

pub fn sdp_solve(p: &SemidefiniteProgram, settings: SdpSettings) -> Result<SdpSolution, SdpError> {
    p.check()?;
    if settings.tol.is_nan() || settings.tol < 1e-9 {
        return Err(SdpError::Malformed(format!("tolerance {} below 1e-9", settings.tol)));
    }
    let nb = p.blocks.len();
    let prob = Problem {
        sizes: p.blocks.clone(),
        c: compile(&p.objective, nb),
        a: p.constraints.iter().map(|c| compile(&c.entries, nb)).collect(),
        b: p.constraints.iter().map(|c| c.rhs).collect(),
    };
    let m = prob.a.len();
    let n_total: usize = p.blocks.iter().sum();
    let cmat = prob.c_dense();

    // Initial point following the usual scaling heuristic.
    let nf = n_total as f64;
    let alpha0 = prob
        .a
        .iter()
        .zip(&prob.b)
        .map(|(ai, bi)| nf * (1.0 + bi.abs()) / (1.0 + sparse_frobenius(ai)))
        .fold(1.0, f64::max);
    let beta0 = (1.0 + prob.a.iter().map(sparse_frobenius).fold(sparse_frobenius(&prob.c), f64::max)) / nf.sqrt();
    let mut x: Blocks = p.blocks.iter().map(|&s| RealMatrix::scaled_identity(s, 10.0 * alpha0)).collect();
    let mut z: Blocks = p.blocks.iter().map(|&s| RealMatrix::scaled_identity(s, 10.0 * beta0)).collect();
    let mut y = vec![0.0; m];

    let mut small_steps = 0;

    for iter in 0..=settings.max_iter {
        let ax = prob.a_op(&x);
        let rp: Vec<f64> = prob.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut f = prob.at_op(&y);
        for (fb, (cb, zb)) in f.iter_mut().zip(cmat.iter().zip(&z)) {
            fb.add_scaled(cb, -1.0);
            fb.add_scaled(zb, -1.0);
        }
        let pobj = dot(&cmat, &x);
        let dobj: f64 = prob.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let residuals = Residuals {
            primal: rp.iter().fold(0.0, |s: f64, v| s.max(v.abs())),
            dual: max_abs(&f),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        let snapshot = |status| SdpSolution {
            status,
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            pobj,
            dobj,
            residuals,
            iterations: iter,
        };

        if residuals.primal <= settings.tol && residuals.dual <= settings.tol && residuals.gap <= settings.tol {
            return Ok(snapshot(SdpStatus::Optimal));
        }

        // Ray tests: a huge objective with comparatively small residual.
        if dobj < 0.0 {
            let cf: f64 = f
                .iter()
                .zip(&cmat)
                .map(|(fb, cb)| {
                    let mut s = fb.clone();
                    s.add_scaled(cb, 1.0);
                    s.max_abs()
                })
                .fold(0.0, f64::max);
            if cf / -dobj < 1e-8 && -dobj > 1e8 {
                let mut sol = snapshot(SdpStatus::PrimalInfeasible);
                let s = -dobj;
                sol.y.iter_mut().for_each(|v| *v /= s);
                sol.z.iter_mut().for_each(|zb| zb.scale(1.0 / s));
                return Ok(sol);
            }
        }
        if pobj > 0.0 {
            let ax_norm = ax.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
            if ax_norm / pobj < 1e-8 && pobj > 1e8 {
                let mut sol = snapshot(SdpStatus::DualInfeasible);
                sol.x.iter_mut().for_each(|xb| xb.scale(1.0 / pobj));
                return Ok(sol);
            }
        }

        if iter == settings.max_iter {
            return Err(SdpError::MaxIterExceeded(Box::new(snapshot(SdpStatus::Optimal))));
        }
        if small_steps >= 5 {
            return Err(SdpError::Stalled(Box::new(snapshot(SdpStatus::Optimal))));
        }

        let zi: Blocks = z
            .iter()
            .map(|zb| zb.spd_inverse())
            .collect::<Option<_>>()
            .ok_or_else(|| SdpError::Numerical("dual slack lost definiteness".into()))?;
        let lx = cholesky_blocks(&x).ok_or_else(|| SdpError::Numerical("primal iterate lost definiteness".into()))?;
        let lz = cholesky_blocks(&z).ok_or_else(|| SdpError::Numerical("dual slack lost definiteness".into()))?;
        let schur = prob.schur(&x, &zi);
        let lm = factor_schur(&schur)?;
        let mu = dot(&x, &z) / nf;

        // HKM direction for complementarity target σμ, optionally with the
        // second-order correction dXa·dZa.
        let direction = |sigma_mu: f64, corr: Option<&Direction>| -> Direction {
            // W = σμ Z⁻¹ − X − (X F + dXa dZa) Z⁻¹
            let w_of = |extra: &Blocks| -> Blocks {
                (0..nb)
                    .map(|k| {
                        let mut inner = x[k].matmul(&extra[k]);
                        if let Some(d) = corr {
                            inner.add_scaled(&d.dx[k].matmul(&d.dz[k]), 1.0);
                        }
                        let mut w = inner.matmul(&zi[k]);
                        w.scale(-1.0);
                        w.add_scaled(&zi[k], sigma_mu);
                        w.add_scaled(&x[k], -1.0);
                        w
                    })
                    .collect()
            };
            let w = w_of(&f);
            let rhs: Vec<f64> = prob.a_op(&w).iter().zip(&rp).map(|(a, r)| a - r).collect();
            let dy = lm.cholesky_solve(&rhs);
            let mut dz = prob.at_op(&dy);
            for (d, fb) in dz.iter_mut().zip(&f) {
                d.add_scaled(fb, 1.0);
            }
            let mut dx = w_of(&dz);
            dx.iter_mut().for_each(RealMatrix::symmetrize);
            Direction { dx, dy, dz }
        };

        let pred = direction(0.0, None);
        let ap = max_step(&lx, &pred.dx).min(1.0);
        let ad = max_step(&lz, &pred.dz).min(1.0);
        let mut xa = x.clone();
        let mut za = z.clone();
        for k in 0..nb {
            xa[k].add_scaled(&pred.dx[k], ap);
            za[k].add_scaled(&pred.dz[k], ad);
        }
        let mu_aff = dot(&xa, &za) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr = direction(sigma * mu, Some(&pred));
        let ap = (0.95 * max_step(&lx, &corr.dx)).min(1.0);
        let ad = (0.95 * max_step(&lz, &corr.dz)).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            small_steps += 1;
        } else {
            small_steps = 0;
        }
        for k in 0..nb {
            x[k].add_scaled(&corr.dx[k], ap);
            x[k].symmetrize();
            z[k].add_scaled(&corr.dz[k], ad);
            z[k].symmetrize();
        }
        for (yi, d) in y.iter_mut().zip(&corr.dy) {
            *yi += ad * d;
        }
    }
    unreachable!("loop returns on the last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::lp::{lp_solve, LinearProgram, LpStatus, Sense};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(block: usize, row: usize, col: usize, value: f64) -> SymEntry {
        SymEntry { block, row, col, value }
    }

    #[test]
    fn trace_one() {
        let mut p = SemidefiniteProgram::new(vec![2]);
        p.add_objective(0, 0, 0, 1.0);
        p.add_objective(0, 1, 1, 1.0);
        p.add_constraint(vec![e(0, 0, 0, 1.0), e(0, 1, 1, 1.0)], 1.0);
        let s = sdp_solve(&p, SdpSettings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.pobj - 1.0).abs() < 1e-7);
        assert!((s.dobj - 1.0).abs() < 1e-7);
    }

    #[test]
    fn eigenvalue_bound() {
        // min t s.t. tI − (Z+X) ⪰ 0, posed as (D) with y = t, A = I, C = Z+X
        let mut p = SemidefiniteProgram::new(vec![2]);
        p.add_objective(0, 0, 0, 1.0);
        p.add_objective(0, 1, 1, -1.0);
        p.add_objective(0, 0, 1, 1.0);
        p.add_constraint(vec![e(0, 0, 0, 1.0), e(0, 1, 1, 1.0)], 1.0);
        let s = sdp_solve(&p, SdpSettings::default()).unwrap();
        assert!((s.dobj - 2f64.sqrt()).abs() < 1e-7, "{}", s.dobj);
        assert!(s.pobj <= s.dobj + 1e-8);
    }

    #[test]
    fn rejects_loose_tolerance_and_bad_entries() {
        let mut p = SemidefiniteProgram::new(vec![2]);
        p.add_constraint(vec![e(0, 0, 0, 1.0)], 1.0);
        assert!(sdp_solve(&p, SdpSettings { tol: 1e-12, max_iter: 10 }).is_err());
        p.add_constraint(vec![e(0, 3, 0, 1.0)], 1.0);
        assert!(matches!(sdp_solve(&p, SdpSettings::default()), Err(SdpError::Malformed(_))));
    }

    #[test]
    fn diagonal_sdp_matches_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(2..=6);
            let m = rng.gen_range(1..n);
            let mut a: Vec<Vec<f64>> = (0..m - 1).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            a.push(vec![1.0; n]);
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lp = lp_solve(&LinearProgram::standard(Sense::Maximize, c.clone(), a.clone(), b.clone())).unwrap();
            assert_eq!(lp.status, LpStatus::Optimal);

            let mut p = SemidefiniteProgram::new(vec![1; n]);
            for (j, cj) in c.iter().enumerate() {
                p.add_objective(j, 0, 0, *cj);
            }
            for (row, bi) in a.iter().zip(&b) {
                p.add_constraint(row.iter().enumerate().map(|(j, v)| e(j, 0, 0, *v)).collect(), *bi);
            }
            let s = sdp_solve(&p, SdpSettings::default()).unwrap();
            assert!((s.pobj - lp.value).abs() < 1e-7, "{} vs {}", s.pobj, lp.value);
            assert!(s.pobj <= s.dobj + 1e-8);
        }
    }

    #[test]
    fn weak_duality_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let mut p = SemidefiniteProgram::new(vec![n, 2]);
            for r in 0..n {
                for c in r..n {
                    p.add_objective(0, r, c, rng.gen_range(-1.0..1.0));
                }
            }
            // trace constraint keeps the primal bounded; extra random ones
            // are made consistent with a known interior point
            let mut tr: Vec<SymEntry> = (0..n).map(|i| e(0, i, i, 1.0)).collect();
            tr.push(e(1, 0, 0, 1.0));
            tr.push(e(1, 1, 1, 1.0));
            p.add_constraint(tr, 1.0);
            let x0 = 1.0 / (n + 2) as f64;
            for _ in 0..2 {
                let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let v = rng.gen_range(-1.0..1.0);
                let rhs = if r == c { v * x0 } else { 0.0 };
                p.add_constraint(vec![e(0, r, c, v)], rhs);
            }
            let s = sdp_solve(&p, SdpSettings::default()).unwrap();
            assert_eq!(s.status, SdpStatus::Optimal);
            assert!(s.pobj <= s.dobj + 1e-8);
            assert!(s.residuals.primal <= 1e-8 && s.residuals.dual <= 1e-8);
            for xb in &s.x {
                assert!(symmetric_eigenvalues(xb)[0] >= -1e-8);
            }
        }
    }

    #[test]
    fn infeasible_primal_is_detected() {
        // X00 = −1 has no PSD solution.
        let mut p = SemidefiniteProgram::new(vec![2]);
        p.add_constraint(vec![e(0, 0, 0, 1.0)], -1.0);
        let s = sdp_solve(&p, SdpSettings::default()).unwrap();
        assert_eq!(s.status, SdpStatus::PrimalInfeasible);
        assert!(s.y[0] > 0.0);
    }

    #[test]
    fn json_dump_round_trips() {
        let mut p = SemidefiniteProgram::new(vec![2]);
        p.add_objective(0, 0, 1, 1.0);
        p.add_constraint(vec![e(0, 0, 0, 1.0)], 1.0);
        let back: SemidefiniteProgram = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(back.blocks, p.blocks);
        assert_eq!(back.constraints.len(), 1);
    }
}
