//! The NPA hierarchy: moment matrices indexed by projector words, their
//! equality structure, and the SDPs that test boxes or bound functionals.

mod words;

use std::collections::HashMap;

use serde::Serialize;

use crate::bounds::BellFunctional;
use crate::boxes::{CorrelationBox, QuantumRealization};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, RealMatrix};
use crate::solvers::{sdp_solve, SdpSettings, SdpSolution, SemidefiniteProgram, SymEntry};

pub use words::{reduce, sequence_set, Letter, Party, Word};

pub const WORD_CAP: usize = 5000;
pub const DEFAULT_FEAS_TOL: f64 = 1e-7;

/// What a class of moment-matrix entries is pinned to by the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Anchor {
    Identity,
    Alice { x: usize, a: usize },
    Bob { y: usize, b: usize },
    Joint { a: usize, b: usize, x: usize, y: usize },
}

#[derive(Clone, Debug)]
pub struct MomentProblem {
    pub m: usize,
    pub n: usize,
    pub level: usize,
    pub words: Vec<Word>,
    /// Representative word of each class; class 0 is the identity.
    pub classes: Vec<Word>,
    /// `pair_class[s * len + t]`; `None` marks a zero entry.
    pair_class: Vec<Option<usize>>,
    pub anchors: Vec<(usize, Anchor)>,
    lookup: HashMap<Word, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentMatrix {
    pub level: usize,
    pub words: Vec<String>,
    pub values: RealMatrix,
}

impl MomentProblem {
    pub fn build(m: usize, n: usize, level: usize) -> Result<Self> {
        if m == 0 || n < 2 {
            return Err(Error::invalid("need at least one setting and two outcomes"));
        }
        if level == 0 {
            return Err(Error::invalid("level must be at least 1"));
        }
        let words = sequence_set(m, n, level, WORD_CAP)
            .ok_or_else(|| Error::Overflow(format!("level {level} needs more than {WORD_CAP} words")))?;
        let len = words.len();
        let mut lookup: HashMap<Word, usize> = HashMap::new();
        let mut classes = Vec::new();
        let mut pair_class = vec![None; len * len];
        let adjoints: Vec<Word> = words.iter().map(Word::adjoint).collect();
        for s in 0..len {
            for t in s..len {
                let w = adjoints[s].times(&words[t]);
                if w.is_zero {
                    continue;
                }
                let key = w.symmetric_key();
                let next = classes.len();
                let id = *lookup.entry(key.clone()).or_insert(next);
                if id == next {
                    classes.push(key);
                }
                pair_class[s * len + t] = Some(id);
                pair_class[t * len + s] = Some(id);
            }
        }
        debug_assert!(classes[0].is_empty());

        let mut anchors = vec![(0, Anchor::Identity)];
        for x in 0..m {
            for a in 0..n - 1 {
                let w = reduce(&[Letter::alice(x, a)]);
                anchors.push((lookup[&w], Anchor::Alice { x, a }));
            }
        }
        for y in 0..m {
            for b in 0..n - 1 {
                let w = reduce(&[Letter::bob(y, b)]);
                anchors.push((lookup[&w], Anchor::Bob { y, b }));
            }
        }
        for x in 0..m {
            for y in 0..m {
                for a in 0..n - 1 {
                    for b in 0..n - 1 {
                        let w = reduce(&[Letter::alice(x, a), Letter::bob(y, b)]);
                        anchors.push((lookup[&w], Anchor::Joint { a, b, x, y }));
                    }
                }
            }
        }
        Ok(Self { m, n, level, words, classes, pair_class, anchors, lookup })
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn class_of(&self, s: usize, t: usize) -> Option<usize> {
        self.pair_class[s * self.size() + t]
    }

    /// Class holding the expectation of `w`, if it appears in the matrix.
    pub fn class_of_word(&self, w: &Word) -> Option<usize> {
        self.lookup.get(&w.symmetric_key()).copied()
    }

    fn anchor_value(&self, anchor: Anchor, p: &CorrelationBox) -> f64 {
        let m = self.m as f64;
        match anchor {
            Anchor::Identity => 1.0,
            Anchor::Alice { x, a } => (0..self.m).map(|y| p.alice_marginal(a, x, y)).sum::<f64>() / m,
            Anchor::Bob { y, b } => (0..self.m).map(|x| p.bob_marginal(b, y, x)).sum::<f64>() / m,
            Anchor::Joint { a, b, x, y } => p.get(a, b, x, y),
        }
    }

    fn check_box(&self, p: &CorrelationBox) -> Result<()> {
        if (p.m(), p.n()) != (self.m, self.n) {
            return Err(Error::dim(format!("box is (m={}, n={}), hierarchy is (m={}, n={})", p.m(), p.n(), self.m, self.n)));
        }
        let ns = p.is_nonsignalling(1e-8);
        if !ns.ok {
            return Err(Error::invalid(format!("box is signalling (violation {:.3e})", ns.max_violation)));
        }
        Ok(())
    }

    /// Entries of class `k` as SDP entries in block 0 (upper triangle).
    fn class_entries(&self) -> Vec<Vec<SymEntry>> {
        let len = self.size();
        let mut out = vec![Vec::new(); self.classes.len()];
        for s in 0..len {
            for t in s..len {
                if let Some(k) = self.class_of(s, t) {
                    out[k].push(SymEntry { block: 0, row: s, col: t, value: 1.0 });
                }
            }
        }
        out
    }

    /// Largest deviation of `gamma` from the class equalities, the zero
    /// pattern and the anchors of `p`.
    pub fn constraint_residual(&self, gamma: &RealMatrix, p: &CorrelationBox) -> Result<f64> {
        self.check_box(p)?;
        let len = self.size();
        if gamma.rows() != len || gamma.cols() != len {
            return Err(Error::dim(format!("moment matrix must be {len}x{len}")));
        }
        let mut first: Vec<Option<f64>> = vec![None; self.classes.len()];
        let mut worst = 0.0_f64;
        for s in 0..len {
            for t in 0..len {
                let v = gamma[(s, t)];
                match self.class_of(s, t) {
                    None => worst = worst.max(v.abs()),
                    Some(k) => match first[k] {
                        None => first[k] = Some(v),
                        Some(f) => worst = worst.max((v - f).abs()),
                    },
                }
            }
        }
        for &(k, anchor) in &self.anchors {
            let v = first[k].unwrap_or(0.0);
            worst = worst.max((v - self.anchor_value(anchor, p)).abs());
        }
        Ok(worst)
    }

    /// The moment matrix `Γ_st = Re Tr(ρ S†T)` of a projective realization.
    pub fn moments_of(&self, r: &QuantumRealization) -> Result<MomentMatrix> {
        let (m, n) = r.validate()?;
        if (m, n) != (self.m, self.n) {
            return Err(Error::dim("realization does not match the hierarchy"));
        }
        for povm in r.e.iter().chain(&r.f) {
            for e in povm {
                if (e * e).max_abs_diff(e) > 1e-10 {
                    return Err(Error::invalid("moment matrices need projective measurements"));
                }
            }
        }
        let (da, db) = (r.e[0][0].rows(), r.f[0][0].rows());
        let party_op = |letters: &[Letter], d: usize, ops: &Vec<Vec<ComplexMatrix>>| {
            letters.iter().fold(ComplexMatrix::identity(d), |acc, l| &acc * &ops[l.setting][l.outcome])
        };
        let len = self.size();
        let ops: Vec<ComplexMatrix> = self
            .words
            .iter()
            .map(|w| kron(&party_op(&w.alice, da, &r.e), &party_op(&w.bob, db, &r.f)))
            .collect();
        // Tr(ρ S† T) = Tr(T · ρ S†)
        let rho_adj: Vec<ComplexMatrix> = ops.iter().map(|o| &r.rho * &o.adjoint()).collect();
        let mut values = RealMatrix::zeros(len, len);
        for s in 0..len {
            for t in 0..len {
                values[(s, t)] = ops[t].trace_product(&rho_adj[s]).re;
            }
        }
        Ok(MomentMatrix { level: self.level, words: self.words.iter().map(Word::to_string).collect(), values })
    }

    /// Linear form `const + Σ_k w_k Γ[k]` of `⟨t, P⟩`, with eliminated
    /// outcomes expanded through `E_{n−1} = 1 − Σ_{a<n−1} E_a`.
    pub fn functional_form(&self, t: &BellFunctional) -> Result<(f64, Vec<f64>)> {
        if (t.m(), t.n()) != (self.m, self.n) {
            return Err(Error::dim("functional does not match the hierarchy"));
        }
        let n = self.n;
        // E_x^a as a combination of (coefficient, letter or identity)
        let expand = |party: Party, s: usize, a: usize| -> Vec<(f64, Option<Letter>)> {
            let letter = |o| Letter { party, setting: s, outcome: o };
            if a + 1 < n {
                vec![(1.0, Some(letter(a)))]
            } else {
                let mut v = vec![(1.0, None)];
                v.extend((0..n - 1).map(|o| (-1.0, Some(letter(o)))));
                v
            }
        };
        let mut weights = vec![0.0; self.classes.len()];
        for a in 0..n {
            for b in 0..n {
                for x in 0..self.m {
                    for y in 0..self.m {
                        let c = t.get(a, b, x, y);
                        if c == 0.0 {
                            continue;
                        }
                        for (ca, la) in expand(Party::A, x, a) {
                            for (cb, lb) in expand(Party::B, y, b) {
                                let letters: Vec<Letter> = la.into_iter().chain(lb).collect();
                                let k = self.class_of_word(&reduce(&letters)).expect("level ≥ 1 holds all AB words");
                                weights[k] += c * ca * cb;
                            }
                        }
                    }
                }
            }
        }
        let constant = weights[0];
        weights[0] = 0.0;
        Ok((constant, weights))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NpaCertificate {
    /// A PSD completion satisfying every constraint.
    MomentMatrix(MomentMatrix),
    /// `X ⪰ 0`, `Tr X = 1`, orthogonal to every free class, with
    /// `⟨Γ_fixed, X⟩ < 0` for the box-determined part of `Γ`.
    DualRay { matrix: RealMatrix },
}

#[derive(Clone, Debug, Serialize)]
pub struct NpaFeasibility {
    pub feasible: bool,
    /// Largest `λ` with `Γ − λI ⪰ 0` over completions.
    pub margin: f64,
    pub certificate: NpaCertificate,
    pub solver: SolverReport,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

impl From<&SdpSolution> for SolverReport {
    fn from(s: &SdpSolution) -> Self {
        Self {
            iterations: s.iterations,
            primal_residual: s.residuals.primal,
            dual_residual: s.residuals.dual,
            gap: s.residuals.gap,
        }
    }
}

/// Tests whether `p` admits a level-`level` certificate.
pub fn npa_feasible(p: &CorrelationBox, level: usize, tol: f64) -> Result<NpaFeasibility> {
    let prob = MomentProblem::build(p.m(), p.n(), level)?;
    prob.check_box(p)?;
    let len = prob.size();
    let entries = prob.class_entries();

    let mut fixed = vec![None; prob.classes.len()];
    for &(k, anchor) in &prob.anchors {
        fixed[k] = Some(prob.anchor_value(anchor, p));
    }

    // (D): Z = Σ_free y_k G_k − t I + Γ_fixed, minimize −t.
    let mut sdp = SemidefiniteProgram::new(vec![len]);
    let mut free = Vec::new();
    for (k, ents) in entries.iter().enumerate() {
        match fixed[k] {
            Some(v) => {
                for e in ents {
                    sdp.add_objective(0, e.row, e.col, -v);
                }
            }
            None => {
                sdp.add_constraint(ents.clone(), 0.0);
                free.push(k);
            }
        }
    }
    let t_index = sdp.add_constraint((0..len).map(|i| SymEntry { block: 0, row: i, col: i, value: -1.0 }).collect(), -1.0);

    let sol = sdp_solve(&sdp, SdpSettings::default())?;
    let margin = sol.y[t_index];
    let feasible = margin >= -tol;
    let certificate = if feasible {
        let mut gamma = sol.z[0].clone();
        for i in 0..len {
            gamma[(i, i)] += margin;
        }
        NpaCertificate::MomentMatrix(MomentMatrix {
            level,
            words: prob.words.iter().map(Word::to_string).collect(),
            values: gamma,
        })
    } else {
        NpaCertificate::DualRay { matrix: sol.x[0].clone() }
    };
    Ok(NpaFeasibility { feasible, margin, certificate, solver: SolverReport::from(&sol) })
}

#[derive(Clone, Debug, Serialize)]
pub struct NpaBound {
    /// Certified upper bound on `⟨t, P⟩` over level-`level` boxes.
    pub value: f64,
    /// Value attained by the optimal moment matrix.
    pub attained: f64,
    pub solver: Option<SolverReport>,
}

/// Maximizes `⟨t, P⟩` over boxes with a level-`level` certificate.
pub fn npa_bound(t: &BellFunctional, level: usize) -> Result<NpaBound> {
    let prob = MomentProblem::build(t.m(), t.n(), level)?;
    let (constant, weights) = prob.functional_form(t)?;
    let scale = weights.iter().fold(0.0_f64, |acc, w| acc.max(w.abs()));
    if scale < 1e-14 {
        return Ok(NpaBound { value: constant, attained: constant, solver: None });
    }
    // unit max-norm weights
    let weights: Vec<f64> = weights.iter().map(|w| w / scale).collect();
    let entries = prob.class_entries();
    let mut sdp = SemidefiniteProgram::new(vec![prob.size()]);
    for e in &entries[0] {
        sdp.add_objective(0, e.row, e.col, -1.0);
    }
    for (k, ents) in entries.iter().enumerate().skip(1) {
        sdp.add_constraint(ents.clone(), -weights[k]);
    }
    let sol = sdp_solve(&sdp, SdpSettings::default())?;
    Ok(NpaBound {
        value: constant - scale * sol.pobj,
        attained: constant - scale * sol.dobj,
        solver: Some(SolverReport::from(&sol)),
    })
}
