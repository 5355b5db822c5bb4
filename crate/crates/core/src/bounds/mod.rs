//! Bell functionals and their classical, NPA and see-saw bounds.

mod classical;
mod functional;
mod lhv;
mod seesaw;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::npa::npa_bound;

pub use classical::{classical_bound, is_block_positive, ClassicalBound, STRATEGY_CAP};
pub use functional::BellFunctional;
pub use lhv::{lhv_membership, LhvMembership, LocalWeight, Separation};
pub use seesaw::{see_saw_lower_bound, SeeSaw, SeeSawOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "cone", rename_all = "snake_case")]
pub enum Cone {
    Classical,
    NpaLevel { level: usize },
}

/// `sup φ(v)/φ(e)` over the normalized states of `cone`; with `φ(e) = 1` on
/// every box this is the largest value of `v`.
pub fn n_bound(v: &BellFunctional, cone: Cone) -> Result<f64> {
    match cone {
        Cone::Classical => Ok(classical_bound(v)?.value),
        Cone::NpaLevel { level } => Ok(npa_bound(v, level)?.value),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolationRatio {
    pub classical: f64,
    pub quantum_upper: f64,
    pub quantum_lower: f64,
    pub ratio_upper: f64,
    pub ratio_lower: f64,
}

/// Brackets quantum/classical between the see-saw and NPA values.
pub fn violation_ratio(t: &BellFunctional, level: usize, seesaw: SeeSawOptions) -> Result<ViolationRatio> {
    let classical = classical_bound(t)?.value;
    if classical <= 1e-9 {
        return Err(Error::invalid(format!("classical bound {classical} is not positive; the ratio is undefined")));
    }
    let quantum_upper = npa_bound(t, level)?.value;
    let quantum_lower = see_saw_lower_bound(t, seesaw)?.value;
    Ok(ViolationRatio {
        classical,
        quantum_upper,
        quantum_lower,
        ratio_upper: quantum_upper / classical,
        ratio_lower: quantum_lower / classical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chsh_ratio() {
        let r = violation_ratio(&BellFunctional::chsh(), 1, SeeSawOptions::qubits(10, 0)).unwrap();
        assert!((r.ratio_upper - 2f64.sqrt()).abs() < 1e-3);
        assert!((r.ratio_lower - 2f64.sqrt()).abs() < 1e-3);
        assert!(r.ratio_lower <= r.ratio_upper + 1e-4);
    }

    #[test]
    fn trivial_ratios() {
        let ones = violation_ratio(&BellFunctional::constant(2, 2, 1.0).unwrap(), 1, SeeSawOptions::qubits(2, 0)).unwrap();
        assert!((ones.ratio_upper - 1.0).abs() < 1e-6 && (ones.ratio_lower - 1.0).abs() < 1e-6);
        // depends on Alice only: quantum and classical coincide
        let alice = BellFunctional::from_fn(2, 2, |a, _, x, _| if a == x { 1.0 } else { 0.2 }).unwrap();
        let r = violation_ratio(&alice, 1, SeeSawOptions::qubits(3, 0)).unwrap();
        assert!((r.ratio_upper - 1.0).abs() < 1e-6, "{r:?}");
        assert!(violation_ratio(&BellFunctional::constant(2, 2, 0.0).unwrap(), 1, SeeSawOptions::qubits(1, 0)).is_err());
    }

    #[test]
    fn n_bound_laws() {
        let e = BellFunctional::unit(2, 2).unwrap();
        assert!((n_bound(&e, Cone::Classical).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(n_bound(&BellFunctional::chsh().scale(2.0), Cone::Classical).unwrap(), 4.0);
        assert!((n_bound(&e, Cone::NpaLevel { level: 1 }).unwrap() - 1.0).abs() < 1e-9);
    }
}
