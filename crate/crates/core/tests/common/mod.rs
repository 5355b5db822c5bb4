#![allow(dead_code)]

use nonlocal::boxes::QuantumRealization;
use nonlocal::bounds::BellFunctional;
use nonlocal::cube::CubeElement;
use nonlocal::linalg::{column, random_state, random_unitary, ComplexMatrix, C64};
use nonlocal::solvers::{lp_solve, LinearProgram, LpStatus, Sense, VarBound};
use rand::Rng;

/// Random projective measurements `[x][a]` with rank-one outcomes on `C^n`.
pub fn random_basis_measurements<R: Rng>(m: usize, n: usize, rng: &mut R) -> Vec<Vec<ComplexMatrix>> {
    (0..m)
        .map(|_| {
            let u = random_unitary(n, rng);
            (0..n).map(|a| ComplexMatrix::projector(&column(&u, a))).collect()
        })
        .collect()
}

pub fn random_two_qubit_realization<R: Rng>(rng: &mut R) -> QuantumRealization {
    let psi = random_state(4, rng);
    QuantumRealization::from_pure(&psi, random_basis_measurements(2, 2, rng), random_basis_measurements(2, 2, rng))
}

pub fn random_functional<R: Rng>(m: usize, n: usize, rng: &mut R) -> BellFunctional {
    BellFunctional::from_fn(m, n, |_, _, _, _| rng.gen_range(-1.0..1.0)).unwrap()
}

/// Positivity in the quotient by an LP: real shifts `u_x` and imaginary
/// shifts `v_x`, both summing to zero, with `Re z_ax + u_x ≥ 0` and
/// `Im z_ax + v_x = 0`.
pub fn lp_is_positive(t: &CubeElement) -> bool {
    let (m, n) = (t.m(), t.n());
    // columns: u (m, free) | v (m, free) | s (n·m, ≥ 0)
    let cols = 2 * m + n * m;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..m {
        for k in 0..n {
            let z: C64 = t.get(k, x);
            let mut re = vec![0.0; cols];
            re[x] = 1.0;
            re[2 * m + x * n + k] = -1.0;
            a.push(re);
            b.push(-z.re);
            let mut im = vec![0.0; cols];
            im[m + x] = 1.0;
            a.push(im);
            b.push(-z.im);
        }
    }
    let mut su = vec![0.0; cols];
    let mut sv = vec![0.0; cols];
    for x in 0..m {
        su[x] = 1.0;
        sv[m + x] = 1.0;
    }
    a.push(su);
    b.push(0.0);
    a.push(sv);
    b.push(0.0);
    let mut bounds = vec![VarBound::Free; 2 * m];
    bounds.extend(std::iter::repeat_n(VarBound::NonNegative, n * m));
    let lp = LinearProgram { sense: Sense::Minimize, objective: vec![0.0; cols], a, b, bounds };
    match lp_solve(&lp).unwrap().status {
        LpStatus::Optimal => true,
        LpStatus::Infeasible => false,
        LpStatus::Unbounded => unreachable!("zero objective"),
    }
}

/// Random element: half the time with a valid imaginary part, and real
/// columns shifted so roughly half are positive.
pub fn random_cube_element<R: Rng>(rng: &mut R) -> CubeElement {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=4);
    let valid_im = rng.gen_bool(0.5);
    let im_shift: Vec<f64> = {
        let mut v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = v.iter().sum::<f64>() / m as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        v
    };
    let re_shift: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut re: Vec<f64> = (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let bias = rng.gen_range(0.0..0.8) * m as f64;
    let mut out = Vec::with_capacity(n * m);
    for a in 0..n {
        for x in 0..m {
            let idx = a * m + x;
            re[idx] += re_shift[x] + bias / m as f64;
            let im = if valid_im { im_shift[x] } else { im_shift[x] + rng.gen_range(-0.1..0.1) };
            out.push(C64::new(re[idx], im));
        }
    }
    CubeElement::new(m, n, out).unwrap()
}
