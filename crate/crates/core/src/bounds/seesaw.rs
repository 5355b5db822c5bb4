use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::BellFunctional;
use crate::boxes::QuantumRealization;
use crate::error::{Error, Result};
use crate::linalg::{column, eigh, kron, partial_trace, random_state, random_unitary, ComplexMatrix, Subsystem};

const MAX_DIM: usize = 8;
const MAX_SWEEPS: usize = 1000;
const STOP_IMPROVEMENT: f64 = 1e-13;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeeSawOptions {
    pub d_a: usize,
    pub d_b: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl SeeSawOptions {
    pub fn qubits(restarts: usize, seed: u64) -> Self {
        Self { d_a: 2, d_b: 2, restarts, seed }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeeSaw {
    pub value: f64,
    pub realization: QuantumRealization,
    /// Bell value after each sweep, one list per restart.
    #[serde(skip)]
    pub histories: Vec<Vec<f64>>,
}

type Measurements = Vec<Vec<ComplexMatrix>>;

fn random_projective(m: usize, n: usize, d: usize, rng: &mut ChaCha8Rng) -> Measurements {
    (0..m)
        .map(|_| {
            let u = random_unitary(d, rng);
            (0..n)
                .map(|a| {
                    let mut e = ComplexMatrix::zeros(d, d);
                    for j in (a..d).step_by(n) {
                        e = &e + &ComplexMatrix::projector(&column(&u, j));
                    }
                    e
                })
                .collect()
        })
        .collect()
}

fn bell_operator(t: &BellFunctional, e: &Measurements, f: &Measurements) -> ComplexMatrix {
    let (m, n) = (t.m(), t.n());
    let (da, db) = (e[0][0].rows(), f[0][0].rows());
    let mut w = ComplexMatrix::zeros(da * db, da * db);
    for x in 0..m {
        for a in 0..n {
            // Σ_{b,y} t F_y^b, then one Kronecker product per (a, x)
            let mut g = ComplexMatrix::zeros(db, db);
            for y in 0..m {
                for b in 0..n {
                    let c = t.get(a, b, x, y);
                    if c != 0.0 {
                        g = &g + &f[y][b].scale_real(c);
                    }
                }
            }
            w = &w + &kron(&e[x][a], &g);
        }
    }
    w.hermitian_part()
}

/// Re-splits each pair of outcomes of one measurement to maximize
/// `Σ_a Tr(E_a K_a)`; never decreases the objective.
fn improve_measurement(povm: &mut [ComplexMatrix], k: &[ComplexMatrix]) -> Result<()> {
    let n = povm.len();
    let d = povm[0].rows();
    for a in 0..n {
        for b in a + 1..n {
            let support = &povm[a] + &povm[b];
            let diff = &k[a] - &k[b];
            let restricted = (&(&support * &diff) * &support).hermitian_part();
            let eig = eigh(&restricted)?;
            let mut ea = ComplexMatrix::zeros(d, d);
            for (i, &lam) in eig.values.iter().enumerate() {
                if lam > 1e-14 {
                    ea = &ea + &ComplexMatrix::projector(&eig.vector(i));
                }
            }
            // components of the support with λ ≤ 0 stay with (or move to) b;
            // the kernel of the support is excluded by construction
            let ea = (&(&support * &ea) * &support).hermitian_part();
            let eb = (&support - &ea).hermitian_part();
            let before = povm[a].trace_product(&k[a]).re + povm[b].trace_product(&k[b]).re;
            let after = ea.trace_product(&k[a]).re + eb.trace_product(&k[b]).re;
            if after >= before {
                povm[a] = ea;
                povm[b] = eb;
            }
        }
    }
    Ok(())
}

/// Effective operators `K_x^a` on the party being updated.
fn effective(t: &BellFunctional, rho: &ComplexMatrix, other: &Measurements, alice_side: bool, dims: (usize, usize)) -> Result<Vec<Vec<ComplexMatrix>>> {
    let (m, n) = (t.m(), t.n());
    let (da, db) = dims;
    let mut out = Vec::with_capacity(m);
    for x in 0..m {
        let mut row = Vec::with_capacity(n);
        for a in 0..n {
            let d_other = if alice_side { db } else { da };
            let mut g = ComplexMatrix::zeros(d_other, d_other);
            for y in 0..m {
                for b in 0..n {
                    let c = if alice_side { t.get(a, b, x, y) } else { t.get(b, a, y, x) };
                    if c != 0.0 {
                        g = &g + &other[y][b].scale_real(c);
                    }
                }
            }
            let k = if alice_side {
                let op = kron(&ComplexMatrix::identity(da), &g);
                partial_trace(&(rho * &op), (da, db), Subsystem::B)?
            } else {
                let op = kron(&g, &ComplexMatrix::identity(db));
                partial_trace(&(rho * &op), (da, db), Subsystem::A)?
            };
            row.push(k.hermitian_part());
        }
        out.push(row);
    }
    Ok(out)
}

/// Alternating ascent over the state and both parties' projective
/// measurements. The result is a lower bound on the quantum value.
pub fn see_saw_lower_bound(t: &BellFunctional, opts: SeeSawOptions) -> Result<SeeSaw> {
    if opts.d_a == 0 || opts.d_b == 0 || opts.d_a > MAX_DIM || opts.d_b > MAX_DIM {
        return Err(Error::invalid(format!("local dimensions must lie in 1..={MAX_DIM}")));
    }
    let restarts = opts.restarts.max(1);
    let (m, n) = (t.m(), t.n());
    let (da, db) = (opts.d_a, opts.d_b);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, QuantumRealization)> = None;
    let mut histories = Vec::with_capacity(restarts);

    for _ in 0..restarts {
        let mut psi = random_state(da * db, &mut rng);
        let mut e = random_projective(m, n, da, &mut rng);
        let mut f = random_projective(m, n, db, &mut rng);
        let mut history = Vec::new();
        let mut value = f64::NEG_INFINITY;
        for _ in 0..MAX_SWEEPS {
            let rho = ComplexMatrix::projector(&psi);
            let ka = effective(t, &rho, &f, true, (da, db))?;
            for x in 0..m {
                improve_measurement(&mut e[x], &ka[x])?;
            }
            let kb = effective(t, &rho, &e, false, (da, db))?;
            for y in 0..m {
                improve_measurement(&mut f[y], &kb[y])?;
            }
            let w = bell_operator(t, &e, &f);
            let eig = eigh(&w)?;
            let top = eig.values.len() - 1;
            let current = w.expectation(&psi).re;
            // keep the old state on exact ties so the sweep stays monotone
            if eig.values[top] > current {
                psi = eig.vector(top);
            }
            let new_value = eig.values[top].max(current);
            history.push(new_value);
            let improvement = new_value - value;
            value = new_value;
            if improvement < STOP_IMPROVEMENT {
                break;
            }
        }
        histories.push(history);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, QuantumRealization::from_pure(&psi, e, f)));
        }
    }
    let (value, realization) = best.expect("at least one restart");
    Ok(SeeSaw { value, realization, histories })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::box_from_quantum;

    #[test]
    fn chsh_reaches_tsirelson() {
        let s = see_saw_lower_bound(&BellFunctional::chsh(), SeeSawOptions::qubits(20, 0)).unwrap();
        assert!(s.value >= 2.0 * 2f64.sqrt() - 1e-4, "{}", s.value);
        assert!(s.value <= 2.0 * 2f64.sqrt() + 1e-9);
        let p = box_from_quantum(&s.realization).unwrap();
        assert!((BellFunctional::chsh().evaluate(&p).unwrap() - s.value).abs() < 1e-9);
    }

    #[test]
    fn trivial_functionals() {
        let z = see_saw_lower_bound(&BellFunctional::constant(2, 2, 0.0).unwrap(), SeeSawOptions::qubits(2, 1)).unwrap();
        assert!(z.value.abs() < 1e-12);
        let ones = see_saw_lower_bound(&BellFunctional::constant(2, 2, 1.0).unwrap(), SeeSawOptions::qubits(2, 1)).unwrap();
        assert!((ones.value - 4.0).abs() < 1e-8);
    }

    #[test]
    fn histories_are_monotone_and_seed_is_deterministic() {
        let t = BellFunctional::from_fn(2, 3, |a, b, x, y| ((a * 7 + b * 3 + x * 5 + y) % 5) as f64 - 2.0).unwrap();
        let opts = SeeSawOptions { d_a: 3, d_b: 3, restarts: 3, seed: 9 };
        let s = see_saw_lower_bound(&t, opts).unwrap();
        for h in &s.histories {
            assert!(h.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
        let again = see_saw_lower_bound(&t, opts).unwrap();
        assert_eq!(s.value, again.value);
    }
}
