mod common;

use nonlocal::approx::{approximate, box_from_realization, canonicalize_realization, grid_angle, grid_size, TwoQubitRealization};
use nonlocal::boxes::{box_from_quantum, deterministic_box, CorrelationBox};
use nonlocal::bounds::{classical_bound, is_block_positive, lhv_membership, BellFunctional};
use nonlocal::cube::{CubeElement, DualFunctional};
use nonlocal::linalg::{random_state, ComplexMatrix, C64};
use nonlocal::npa::npa_bound;
use nonlocal::steering::{assemblage_bound, lhs_bound, lhs_bound_sdp, SteeringFunctional};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_state_functional(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DualFunctional {
    let cols: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    DualFunctional::from_fn(m, n, |a, x| C64::new(cols[x][a], 0.0))
}

/// An element of the null space: column-constant shifts summing to zero.
fn random_null_element(m: usize, n: usize, rng: &mut ChaCha8Rng) -> CubeElement {
    let mut c: Vec<C64> = (0..m).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let mean = c.iter().sum::<C64>() / m as f64;
    c.iter_mut().for_each(|v| *v -= mean);
    CubeElement::from_fn(m, n, |_, x| c[x])
}

fn random_lhv_box(rng: &mut ChaCha8Rng) -> CorrelationBox {
    let (m, n) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
    let mut p: Option<CorrelationBox> = None;
    let mut total = 0.0;
    for _ in 0..rng.gen_range(1..=5) {
        let g: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
        let h: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
        let d = deterministic_box(n, &g, &h).unwrap();
        let w: f64 = rng.gen_range(0.1..1.0);
        total += w;
        p = Some(match p {
            None => d,
            Some(prev) => prev.mix(&d, w / total).unwrap(),
        });
    }
    p.unwrap()
}

fn random_steering_functional(m: usize, n: usize, d: usize, rng: &mut ChaCha8Rng) -> SteeringFunctional {
    let f = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    ComplexMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .hermitian_part()
                })
                .collect()
        })
        .collect();
    SteeringFunctional::new(m, n, d, f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_basis_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = common::random_cube_element(&mut r);
        let back = t.to_group_basis().to_cube();
        prop_assert!(back.sub(&t).is_zero());
    }

    #[test]
    fn positivity_ignores_the_null_space(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = common::random_cube_element(&mut r);
        let z = random_null_element(t.m(), t.n(), &mut r);
        prop_assert!(z.is_zero());
        prop_assert_eq!(t.add(&z).is_positive(), t.is_positive());
    }

    #[test]
    fn positive_elements_pair_nonnegatively_with_states(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = common::random_cube_element(&mut r);
        prop_assume!(t.is_positive());
        for _ in 0..5 {
            let f = random_state_functional(t.m(), t.n(), &mut r);
            prop_assert!(f.is_state());
            let v = f.pair(&t).unwrap();
            prop_assert!(v.re >= -1e-9 && v.im.abs() <= 1e-9, "pairing {v}");
        }
    }

    #[test]
    fn nonnegative_functionals_are_block_positive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let t = BellFunctional::from_fn(m, n, |_, _, _, _| r.gen_range(0.0..1.0)).unwrap();
        prop_assert!(is_block_positive(&t).unwrap());
    }

    #[test]
    fn canonicalization_preserves_the_box(seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi = random_state(4, &mut r);
        let e = common::random_basis_measurements(2, 2, &mut r);
        let f = common::random_basis_measurements(2, 2, &mut r);
        let direct = box_from_quantum(&nonlocal::boxes::QuantumRealization::from_pure(&psi, e.clone(), f.clone())).unwrap();
        let canon = canonicalize_realization(&psi, &e, &f).unwrap();
        let d = box_from_realization(&canon).l1_distance(&direct).unwrap();
        prop_assert!(d <= 1e-9, "distance {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lhv_mixtures_are_members(seed in any::<u64>()) {
        let p = random_lhv_box(&mut rng(seed));
        prop_assert!(lhv_membership(&p).unwrap().member);
    }

    #[test]
    fn npa_is_monotone_and_dominates_classical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = common::random_functional(2, 2, &mut r);
        let classical = classical_bound(&t).unwrap().value;
        let one = npa_bound(&t, 1).unwrap().value;
        let two = npa_bound(&t, 2).unwrap().value;
        prop_assert!(two <= one + 1e-6, "level 2 {two} above level 1 {one}");
        prop_assert!(classical <= two + 1e-6, "classical {classical} above level 2 {two}");
    }

    #[test]
    fn approximation_meets_its_tolerance(seed in any::<u64>(), eps in 0.05f64..1.0) {
        let mut r = rng(seed);
        let psi = random_state(4, &mut r);
        let alpha = r.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let beta = r.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let real = TwoQubitRealization::new(psi, alpha, beta).unwrap();
        let a = approximate(&real, eps).unwrap();
        prop_assert!(a.distance <= eps, "distance {} > eps {eps}", a.distance);
        let n = grid_size(eps).unwrap();
        if alpha >= grid_angle(1, n) && beta >= grid_angle(1, n) {
            prop_assert!(a.distance <= a.bound + 1e-12, "distance {} > bound {}", a.distance, a.bound);
        }
    }

    #[test]
    fn steering_bounds_are_ordered(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (m, n, d) = (r.gen_range(2..=3), 2, 2);
        let f = random_steering_functional(m, n, d, &mut r);
        let lhs = lhs_bound(&f).unwrap();
        let sdp = lhs_bound_sdp(&f).unwrap();
        let quantum = assemblage_bound(&f).unwrap();
        prop_assert!((lhs - sdp).abs() <= 1e-5 * (1.0 + lhs.abs()), "enumeration {lhs}, sdp {sdp}");
        prop_assert!(lhs <= quantum + 1e-5, "lhs {lhs} above quantum {quantum}");
    }
}
