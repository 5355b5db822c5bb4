use serde::Serialize;

use super::BellFunctional;
use crate::cube::deterministic_maps;
use crate::error::Result;

/// Per-party cap on the number of deterministic strategies.
pub const STRATEGY_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalBound {
    pub value: f64,
    /// Maximizing strategies, `alice[x]` and `bob[y]` are outcomes.
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

/// Maximum of `t` over deterministic strategy pairs. Alice's strategies are
/// enumerated; Bob best-responds setting by setting, which reaches the same
/// maximum as the full pair enumeration.
pub fn classical_bound(t: &BellFunctional) -> Result<ClassicalBound> {
    let (m, n) = (t.m(), t.n());
    let strategies = deterministic_maps(m, n, STRATEGY_CAP)?;
    let mut best: Option<ClassicalBound> = None;
    for g in &strategies {
        let mut value = 0.0;
        let mut h = vec![0; m];
        for y in 0..m {
            let mut top = f64::NEG_INFINITY;
            for b in 0..n {
                let s: f64 = (0..m).map(|x| t.get(g[x], b, x, y)).sum();
                if s > top {
                    top = s;
                    h[y] = b;
                }
            }
            value += top;
        }
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(ClassicalBound { value, alice: g.clone(), bob: h });
        }
    }
    Ok(best.expect("at least one strategy"))
}

/// Whether `t` is nonnegative on every product of local states, i.e. on
/// every deterministic strategy pair.
pub fn is_block_positive(t: &BellFunctional) -> Result<bool> {
    Ok(-classical_bound(&t.scale(-1.0))?.value >= -1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(t: &BellFunctional) -> f64 {
        let maps = deterministic_maps(t.m(), t.n(), usize::MAX).unwrap();
        let mut best = f64::NEG_INFINITY;
        for g in &maps {
            for h in &maps {
                best = best.max(t.deterministic_value(g, h));
            }
        }
        best
    }

    #[test]
    fn examples() {
        assert_eq!(classical_bound(&BellFunctional::chsh()).unwrap().value, 2.0);
        assert_eq!(classical_bound(&BellFunctional::constant(2, 2, 1.0).unwrap()).unwrap().value, 4.0);
        assert_eq!(classical_bound(&BellFunctional::constant(2, 2, 0.0).unwrap()).unwrap().value, 0.0);
    }

    #[test]
    fn matches_pair_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let (m, n) = (rng.gen_range(1..=3), rng.gen_range(2..=3));
            let t = BellFunctional::from_fn(m, n, |_, _, _, _| rng.gen_range(-1.0..1.0)).unwrap();
            let c = classical_bound(&t).unwrap();
            assert!((c.value - brute_force(&t)).abs() < 1e-12);
            assert!((t.deterministic_value(&c.alice, &c.bob) - c.value).abs() < 1e-12);
        }
    }

    #[test]
    fn block_positivity() {
        assert!(is_block_positive(&BellFunctional::constant(2, 2, 1.0).unwrap()).unwrap());
        assert!(!is_block_positive(&BellFunctional::chsh()).unwrap());
        // shifting CHSH by 2·(unit) lifts its minimum −2 to 0
        let shifted = BellFunctional::chsh().add(&BellFunctional::unit(2, 2).unwrap().scale(2.0)).unwrap();
        assert!(is_block_positive(&shifted).unwrap());
        assert!(!is_block_positive(&BellFunctional::chsh().add(&BellFunctional::unit(2, 2).unwrap().scale(1.9)).unwrap()).unwrap());
    }

    #[test]
    fn overflow_is_reported() {
        let t = BellFunctional::constant(14, 2, 0.0).unwrap();
        assert!(classical_bound(&t).is_err());
    }
}
