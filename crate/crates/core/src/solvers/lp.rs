//! Dense two-phase simplex with Bland's rule.
//!
//! Problems are given in equality form `A x = b` with per-variable bounds
//! `x_j ≥ 0` or free. Infeasible problems come back with a Farkas vector.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub bounds: Vec<VarBound>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// Optimal dual multipliers, or the Farkas vector `y` when infeasible
    /// (`yᵀA ≤ 0` on bounded columns, `= 0` on free ones, `yᵀb > 0`).
    pub dual: Vec<f64>,
    /// `max_j |x_j · reduced_cost_j|` at the returned pair.
    pub slackness: f64,
    /// `‖Ax − b‖∞` at the returned point.
    pub primal_residual: f64,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("simplex failed: {0}")]
    Numerical(String),
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const PRESOLVE_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;

impl LinearProgram {
    /// `min/max cᵀx` subject to `A x = b`, `x ≥ 0`.
    pub fn standard(sense: Sense, objective: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        let n = objective.len();
        Self { sense, objective, a, b, bounds: vec![VarBound::NonNegative; n] }
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        if self.a.len() != self.b.len() {
            return Err(LpError::Malformed(format!("{} rows but {} right-hand sides", self.a.len(), self.b.len())));
        }
        if let Some(r) = self.a.iter().position(|row| row.len() != n) {
            return Err(LpError::Malformed(format!("row {r} has the wrong length")));
        }
        let finite = self.objective.iter().chain(&self.b).chain(self.a.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(LpError::Malformed("non-finite data".into()));
        }
        Ok(())
    }
}

/// Column map from user variables to nonnegative solver columns.
struct Split {
    /// `(plus, minus)` solver column per user variable.
    cols: Vec<(usize, Option<usize>)>,
    width: usize,
}

impl Split {
    fn new(bounds: &[VarBound]) -> Self {
        let mut cols = Vec::with_capacity(bounds.len());
        let mut width = 0;
        for b in bounds {
            match b {
                VarBound::NonNegative => {
                    cols.push((width, None));
                    width += 1;
                }
                VarBound::Free => {
                    cols.push((width, Some(width + 1)));
                    width += 2;
                }
            }
        }
        Self { cols, width }
    }

    fn expand_row(&self, row: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        for (j, &(p, m)) in self.cols.iter().enumerate() {
            out[p] = row[j];
            if let Some(m) = m {
                out[m] = -row[j];
            }
        }
        out
    }

    fn collapse(&self, x: &[f64]) -> Vec<f64> {
        self.cols.iter().map(|&(p, m)| x[p] - m.map_or(0.0, |m| x[m])).collect()
    }
}

enum Presolved {
    Rows(Vec<usize>),
    Inconsistent(Vec<f64>),
}

/// Finds a maximal independent subset of rows. A dependent row whose
/// right-hand side does not follow yields a Farkas vector directly.
fn presolve(a: &[Vec<f64>], b: &[f64]) -> Presolved {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(1.0_f64, |s, v| s.max(v.abs()));
    let tol = PRESOLVE_TOL * scale;
    let mut w: Vec<Vec<f64>> = a.to_vec();
    let mut comb: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
    let mut rhs = b.to_vec();
    let mut pivoted = vec![false; m];
    for col in 0..n {
        let best = (0..m)
            .filter(|&r| !pivoted[r])
            .max_by(|&r, &s| w[r][col].abs().total_cmp(&w[s][col].abs()));
        let Some(p) = best else { break };
        if w[p][col].abs() <= tol {
            continue;
        }
        pivoted[p] = true;
        let (prow, pcomb, prhs) = (w[p].clone(), comb[p].clone(), rhs[p]);
        for r in 0..m {
            if pivoted[r] || w[r][col] == 0.0 {
                continue;
            }
            let f = w[r][col] / prow[col];
            for (x, y) in w[r].iter_mut().zip(&prow) {
                *x -= f * y;
            }
            for (x, y) in comb[r].iter_mut().zip(&pcomb) {
                *x -= f * y;
            }
            rhs[r] -= f * prhs;
        }
    }
    let bscale = b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    for r in 0..m {
        if !pivoted[r] && rhs[r].abs() > PRESOLVE_TOL * bscale.max(scale) {
            let s = rhs[r].signum();
            return Presolved::Inconsistent(comb[r].iter().map(|v| v * s).collect());
        }
    }
    Presolved::Rows((0..m).filter(|&r| pivoted[r]).collect())
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Number of structural columns; artificial columns follow.
    n: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        *self.t[i].last().unwrap()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= piv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&prow) {
                *x -= f * y;
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let width = self.t[0].len() - 1;
        let mut r = cost.to_vec();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb == 0.0 {
                continue;
            }
            for j in 0..width {
                r[j] -= cb * self.t[i][j];
            }
        }
        r
    }

    /// Runs Bland's rule on `cost` over the columns allowed by `enter_ok`.
    /// Returns `false` if the objective is unbounded below.
    fn optimize(&mut self, cost: &[f64], enter_ok: impl Fn(usize) -> bool) -> Result<bool, LpError> {
        let width = cost.len();
        for _ in 0..MAX_PIVOTS {
            let r = self.reduced_costs(cost);
            let Some(c) = (0..width).find(|&j| enter_ok(j) && r[j] < -COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((i, _)) => self.pivot(i, c),
            }
        }
        Err(LpError::Numerical(format!("no convergence after {MAX_PIVOTS} pivots")))
    }

    /// `y = c_B B⁻¹`, read from the artificial columns.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.t.len();
        (0..m)
            .map(|k| self.basis.iter().enumerate().map(|(i, &bv)| cost[bv] * self.t[i][self.n + k]).sum())
            .collect()
    }
}

pub fn lp_solve(p: &LinearProgram) -> Result<LpSolution, LpError> {
    p.validate()?;
    let nvars = p.objective.len();
    let split = Split::new(&p.bounds);
    let a_std: Vec<Vec<f64>> = p.a.iter().map(|r| split.expand_row(r)).collect();
    let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let c_std = split.expand_row(&p.objective.iter().map(|c| sign * c).collect::<Vec<_>>());
    let n = split.width;

    let rows = match presolve(&a_std, &p.b) {
        Presolved::Inconsistent(y) => {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; nvars],
                value: f64::NAN,
                dual: y,
                slackness: 0.0,
                primal_residual: f64::NAN,
            });
        }
        Presolved::Rows(r) => r,
    };
    let m = rows.len();

    if m == 0 {
        // Only bounds: optimal at 0 unless some column can decrease forever.
        if c_std.iter().any(|&c| c < -COST_TOL) {
            return Ok(unbounded(nvars, p.b.len()));
        }
        let x = vec![0.0; nvars];
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            value: 0.0,
            dual: vec![0.0; p.b.len()],
            slackness: 0.0,
            primal_residual: residual(p, &vec![0.0; nvars]),
        });
    }

    let flips: Vec<f64> = rows.iter().map(|&r| if p.b[r] < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut t = Vec::with_capacity(m);
    for (k, &r) in rows.iter().enumerate() {
        let mut row = Vec::with_capacity(n + m + 1);
        row.extend(a_std[r].iter().map(|v| v * flips[k]));
        row.extend((0..m).map(|i| if i == k { 1.0 } else { 0.0 }));
        row.push(p.b[r] * flips[k]);
        t.push(row);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), n };

    // Phase 1
    let mut cost1 = vec![0.0; n + m];
    cost1[n..].iter_mut().for_each(|c| *c = 1.0);
    tab.optimize(&cost1, |_| true)?;
    let infeas: f64 = tab.basis.iter().enumerate().filter(|(_, &bv)| bv >= n).map(|(i, _)| tab.rhs(i)).sum();
    let bscale = p.b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    if infeas > 1e-9 * bscale {
        let y_flipped = tab.duals(&cost1);
        let mut y = vec![0.0; p.b.len()];
        for (k, &r) in rows.iter().enumerate() {
            y[r] = y_flipped[k] * flips[k];
        }
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; nvars],
            value: f64::NAN,
            dual: y,
            slackness: 0.0,
            primal_residual: f64::NAN,
        });
    }

    // Drive artificials out of the basis.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[i][j].abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase 2
    let mut cost2 = c_std.clone();
    cost2.extend(std::iter::repeat_n(0.0, m));
    if !tab.optimize(&cost2, |j| j < n)? {
        return Ok(unbounded(nvars, p.b.len()));
    }

    let mut xs = vec![0.0; n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            xs[bv] = tab.rhs(i).max(0.0);
        }
    }
    let y_flipped = tab.duals(&cost2);
    let mut y = vec![0.0; p.b.len()];
    for (k, &r) in rows.iter().enumerate() {
        y[r] = sign * y_flipped[k] * flips[k];
    }
    let x = split.collapse(&xs);
    let value: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    // complementary slackness on the user's variables
    let mut slackness = 0.0_f64;
    for j in 0..nvars {
        let aty: f64 = (0..p.b.len()).map(|i| p.a[i][j] * y[i]).sum();
        let rc = p.objective[j] - aty;
        slackness = slackness.max((x[j] * rc).abs());
        if p.bounds[j] == VarBound::Free {
            slackness = slackness.max(rc.abs());
        }
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal_residual: residual(p, &x),
        x,
        value,
        dual: y,
        slackness,
    })
}

fn unbounded(nvars: usize, nrows: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Unbounded,
        x: vec![0.0; nvars],
        value: f64::NAN,
        dual: vec![0.0; nrows],
        slackness: f64::NAN,
        primal_residual: f64::NAN,
    }
}

fn residual(p: &LinearProgram, x: &[f64]) -> f64 {
    p.a.iter()
        .zip(&p.b)
        .map(|(row, b)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_equality() {
        let p = LinearProgram::standard(Sense::Maximize, vec![1.0], vec![vec![1.0]], vec![1.0]);
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_feasibility() {
        let p = LinearProgram::standard(Sense::Minimize, vec![0.0, 0.0], vec![vec![1.0, 1.0]], vec![1.0]);
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-12);
        assert!(s.x.iter().all(|&v| v >= 0.0));
    }

    fn check_farkas(p: &LinearProgram, y: &[f64]) {
        let yb: f64 = y.iter().zip(&p.b).map(|(a, b)| a * b).sum();
        assert!(yb > 1e-9, "yᵀb = {yb}");
        for j in 0..p.objective.len() {
            let v: f64 = (0..p.b.len()).map(|i| y[i] * p.a[i][j]).sum();
            match p.bounds[j] {
                VarBound::NonNegative => assert!(v <= 1e-9, "column {j}: {v}"),
                VarBound::Free => assert!(v.abs() <= 1e-9, "free column {j}: {v}"),
            }
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        // x1 + x2 = 1, x1 + x2 = 2 (inconsistent, caught in presolve)
        let p = LinearProgram::standard(Sense::Minimize, vec![0.0, 0.0], vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0]);
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        check_farkas(&p, &s.dual);

        // x1 - x2 = -1 with x1 + x2 = 0, x ≥ 0 (needs phase 1)
        let p = LinearProgram::standard(Sense::Minimize, vec![1.0, 1.0], vec![vec![1.0, -1.0], vec![1.0, 1.0]], vec![-1.0, 0.0]);
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        check_farkas(&p, &s.dual);
    }

    #[test]
    fn unbounded_detected() {
        let p = LinearProgram::standard(Sense::Maximize, vec![1.0, 0.0], vec![vec![1.0, -1.0]], vec![0.0]);
        assert_eq!(lp_solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_duals() {
        // min x0 + 2 x1 with x0 free, x0 - x1 = -3, x0 + x1 = 5
        let p = LinearProgram {
            sense: Sense::Minimize,
            objective: vec![1.0, 2.0],
            a: vec![vec![1.0, -1.0], vec![1.0, 1.0]],
            b: vec![-3.0, 5.0],
            bounds: vec![VarBound::Free, VarBound::NonNegative],
        };
        let s = lp_solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 4.0).abs() < 1e-12);
        let by: f64 = s.dual.iter().zip(&p.b).map(|(a, b)| a * b).sum();
        assert!((by - s.value).abs() < 1e-10);
    }

    /// Enumerates basic feasible solutions of `{Ax = b, x ≥ 0}` directly.
    fn vertex_oracle(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
        let m = a.len();
        let n = c.len();
        let mut best: Option<f64> = None;
        let mut subset: Vec<usize> = (0..m).collect();
        loop {
            // Solve A_S x_S = b by Gaussian elimination.
            let mut mat: Vec<Vec<f64>> = (0..m).map(|i| {
                let mut r: Vec<f64> = subset.iter().map(|&j| a[i][j]).collect();
                r.push(b[i]);
                r
            }).collect();
            let mut ok = true;
            for col in 0..m {
                let p = (col..m).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs())).unwrap();
                if mat[p][col].abs() < 1e-12 {
                    ok = false;
                    break;
                }
                mat.swap(col, p);
                for r in 0..m {
                    if r != col {
                        let f = mat[r][col] / mat[col][col];
                        for k in col..=m {
                            mat[r][k] -= f * mat[col][k];
                        }
                    }
                }
            }
            if ok {
                let xs: Vec<f64> = (0..m).map(|i| mat[i][m] / mat[i][i]).collect();
                if xs.iter().all(|&v| v >= -1e-12) {
                    let v: f64 = subset.iter().zip(&xs).map(|(&j, x)| c[j] * x).sum();
                    best = Some(best.map_or(v, |b: f64| b.min(v)));
                }
            }
            // next combination
            let mut i = m;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if subset[i] < n - m + i {
                    subset[i] += 1;
                    for k in i + 1..m {
                        subset[k] = subset[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn agrees_with_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut compared = 0;
        for _ in 0..300 {
            let n = rng.gen_range(2..=8);
            let m = rng.gen_range(1..n.min(4) + 1).min(n - 1).max(1);
            let mut a: Vec<Vec<f64>> = (0..m - 1).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            a.push(vec![1.0; n]); // keeps the feasible set bounded
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = lp_solve(&LinearProgram::standard(Sense::Minimize, c.clone(), a.clone(), b.clone())).unwrap();
            let oracle = vertex_oracle(&a, &b, &c).expect("feasible by construction");
            assert_eq!(s.status, LpStatus::Optimal);
            assert!((s.value - oracle).abs() < 1e-8, "{} vs {}", s.value, oracle);
            assert!(s.slackness < 1e-8);
            assert!(s.primal_residual < 1e-9);
            compared += 1;
        }
        assert_eq!(compared, 300);
    }
}
