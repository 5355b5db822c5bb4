//! The non-commuting cube `U_{m,n}` at the coefficient level, and its dual
//! `V_{m,n}`.
//!
//! An element `t = Σ z_ax p_ax` is stored as its coefficient array; two arrays
//! represent the same element iff they differ by something in the null space
//! `J` (columns constant per setting, constants summing to zero).

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::C64;

pub const COEFF_TOL: f64 = 1e-10;

/// Coefficients `z[a][x]` stored row-major with `a` outer.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeElement {
    m: usize,
    n: usize,
    z: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualFunctional {
    m: usize,
    n: usize,
    f: Vec<C64>,
}

fn check_shape(m: usize, n: usize, len: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("m and n must be positive"));
    }
    if len != m * n {
        return Err(Error::dim(format!("{len} coefficients for m={m}, n={n}")));
    }
    Ok(())
}

macro_rules! coefficient_array {
    ($ty:ident, $field:ident) => {
        impl $ty {
            pub fn new(m: usize, n: usize, $field: Vec<C64>) -> Result<Self> {
                check_shape(m, n, $field.len())?;
                Ok(Self { m, n, $field })
            }

            pub fn from_real(m: usize, n: usize, re: &[f64]) -> Result<Self> {
                Self::new(m, n, re.iter().map(|&v| C64::new(v, 0.0)).collect())
            }

            pub fn from_fn(m: usize, n: usize, mut g: impl FnMut(usize, usize) -> C64) -> Self {
                let mut data = Vec::with_capacity(m * n);
                for a in 0..n {
                    for x in 0..m {
                        data.push(g(a, x));
                    }
                }
                Self { m, n, $field: data }
            }

            pub fn m(&self) -> usize {
                self.m
            }

            pub fn n(&self) -> usize {
                self.n
            }

            /// Coefficient at outcome `a`, setting `x` (both 0-based).
            pub fn get(&self, a: usize, x: usize) -> C64 {
                self.$field[a * self.m + x]
            }

            pub fn coefficients(&self) -> &[C64] {
                &self.$field
            }

            fn column(&self, x: usize) -> impl Iterator<Item = C64> + '_ {
                (0..self.n).map(move |a| self.get(a, x))
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                Repr {
                    m: self.m,
                    n: self.n,
                    re: self.$field.iter().map(|c| c.re).collect(),
                    im: self.$field.iter().map(|c| c.im).collect(),
                }
                .serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let r = Repr::deserialize(d)?;
                if r.re.len() != r.im.len() {
                    return Err(serde::de::Error::custom("re and im lengths differ"));
                }
                let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
                $ty::new(r.m, r.n, data).map_err(serde::de::Error::custom)
            }
        }
    };
}

#[derive(Serialize, Deserialize)]
struct Repr {
    m: usize,
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

coefficient_array!(CubeElement, z);
coefficient_array!(DualFunctional, f);

impl CubeElement {
    /// The generator `p_ax`.
    pub fn projection(m: usize, n: usize, a: usize, x: usize) -> Self {
        Self::from_fn(m, n, |b, y| if (b, y) == (a, x) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    fn column_means(&self) -> Vec<C64> {
        (0..self.m).map(|x| self.column(x).sum::<C64>() / self.n as f64).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.m, self.n), (other.m, other.n));
        Self { m: self.m, n: self.n, z: self.z.iter().zip(&other.z).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.m, self.n), (other.m, other.n));
        Self { m: self.m, n: self.n, z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect() }
    }

    pub fn is_zero(&self) -> bool {
        let mut total = C64::new(0.0, 0.0);
        for x in 0..self.m {
            let first = self.get(0, x);
            if self.column(x).any(|v| (v - first).norm() > COEFF_TOL) {
                return false;
            }
            total += first;
        }
        total.norm() <= COEFF_TOL
    }

    /// Representative of `t + J` whose column means are all equal.
    pub fn canonical_rep(&self) -> Self {
        let means = self.column_means();
        let overall = means.iter().sum::<C64>() / self.m as f64;
        Self::from_fn(self.m, self.n, |a, x| self.get(a, x) - (means[x] - overall))
    }

    pub fn is_positive(&self) -> bool {
        let mut im_total = 0.0;
        let mut min_total = 0.0;
        for x in 0..self.m {
            let im0 = self.get(0, x).im;
            if self.column(x).any(|v| (v.im - im0).abs() > COEFF_TOL) {
                return false;
            }
            im_total += im0;
            min_total += self.column(x).map(|v| v.re).fold(f64::INFINITY, f64::min);
        }
        im_total.abs() <= COEFF_TOL && min_total >= -COEFF_TOL
    }

    pub fn to_group_basis(&self) -> GroupCoefficients {
        let n = self.n as f64;
        let unit = self.z.iter().sum::<C64>() / n;
        let shifts = (0..self.m)
            .map(|x| {
                (1..self.n)
                    .map(|k| {
                        (0..self.n)
                            .map(|a| root_of_unity(self.n, (a * k) as i64) * self.get(a, x))
                            .sum::<C64>()
                            / n
                    })
                    .collect()
            })
            .collect();
        GroupCoefficients { m: self.m, n: self.n, unit, shifts }
    }
}

/// `exp(2πi·k/n)`.
fn root_of_unity(n: usize, k: i64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k.rem_euclid(n as i64) as f64) / n as f64)
}

/// Expansion of a cube element over `{1} ∪ {s_x^k : k = 1..n−1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupCoefficients {
    pub m: usize,
    pub n: usize,
    pub unit: C64,
    /// `shifts[x][k-1]` multiplies `s_x^k`.
    pub shifts: Vec<Vec<C64>>,
}

impl GroupCoefficients {
    /// A coefficient array for the same element, using `1 = (1/m)Σ_{a,x} p_ax`
    /// and `s_x^k = Σ_a ω^{−ak} p_ax`.
    pub fn to_cube(&self) -> CubeElement {
        CubeElement::from_fn(self.m, self.n, |a, x| {
            let mut v = self.unit / self.m as f64;
            for k in 1..self.n {
                v += root_of_unity(self.n, -((a * k) as i64)) * self.shifts[x][k - 1];
            }
            v
        })
    }
}

impl DualFunctional {
    fn column_sums(&self) -> Vec<C64> {
        (0..self.m).map(|x| self.column(x).sum()).collect()
    }

    pub fn in_v(&self) -> bool {
        let sums = self.column_sums();
        sums.iter().all(|s| (s - sums[0]).norm() <= COEFF_TOL)
    }

    pub fn is_positive(&self) -> bool {
        self.in_v() && self.f.iter().all(|v| v.im.abs() <= COEFF_TOL && v.re >= -1e-12)
    }

    pub fn is_state(&self) -> bool {
        self.is_positive() && self.column_sums().iter().all(|s| (s - 1.0).norm() <= COEFF_TOL)
    }

    /// The deterministic state `f_ax = δ_{a, g(x)}`.
    pub fn deterministic(n: usize, g: &[usize]) -> Self {
        Self::from_fn(g.len(), n, |a, x| C64::new(if g[x] == a { 1.0 } else { 0.0 }, 0.0))
    }

    /// `Σ f_ax z_ax`, defined on the quotient only when `f ∈ V_{m,n}`.
    pub fn pair(&self, t: &CubeElement) -> Result<C64> {
        if (self.m, self.n) != (t.m, t.n) {
            return Err(Error::dim(format!("functional is {}x{}, element {}x{}", self.m, self.n, t.m, t.n)));
        }
        if !self.in_v() {
            return Err(Error::invalid("functional is not in V (outcome sums depend on the setting)"));
        }
        Ok(self.f.iter().zip(&t.z).map(|(a, b)| a * b).sum())
    }
}

/// All `n^m` maps from settings to outcomes, in lexicographic order with the
/// first setting most significant.
pub fn deterministic_maps(m: usize, n: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    let count = (n as u128).checked_pow(m as u32).filter(|&c| c <= cap as u128);
    let Some(count) = count else {
        return Err(Error::Overflow(format!("{n}^{m} deterministic assignments exceed {cap}")));
    };
    let mut out = Vec::with_capacity(count as usize);
    let mut g = vec![0usize; m];
    for _ in 0..count {
        out.push(g.clone());
        for x in (0..m).rev() {
            g[x] += 1;
            if g[x] < n {
                break;
            }
            g[x] = 0;
        }
    }
    Ok(out)
}

pub fn vertex_states(m: usize, n: usize) -> Result<Vec<DualFunctional>> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("m and n must be positive"));
    }
    Ok(deterministic_maps(m, n, 1_000_000)?.iter().map(|g| DualFunctional::deterministic(n, g)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(m: usize, n: usize, cols: &[&[f64]]) -> CubeElement {
        CubeElement::from_fn(m, n, |a, x| C64::new(cols[x][a], 0.0))
    }

    #[test]
    fn null_space_examples() {
        assert!(re(2, 2, &[&[1.0, 1.0], &[-1.0, -1.0]]).is_zero());
        assert!(!CubeElement::projection(2, 2, 0, 0).is_zero());
        assert!(!re(2, 2, &[&[3.0, 3.0], &[3.0, 3.0]]).is_zero());
    }

    #[test]
    fn canonical_rep_examples() {
        let z = re(2, 2, &[&[1.0, 1.0], &[-1.0, -1.0]]);
        assert!(z.canonical_rep().coefficients().iter().all(|c| c.norm() < 1e-15));
        let eq = re(2, 3, &[&[1.0, 2.0, 3.0], &[0.0, 4.0, 2.0]]);
        assert_eq!(eq.canonical_rep(), eq);
    }

    #[test]
    fn positivity_examples() {
        assert!(re(2, 2, &[&[1.0, -0.5], &[2.0, 3.0]]).is_positive());
        assert!(!re(2, 2, &[&[-1.0, -1.0], &[0.5, 0.5]]).is_positive());
        assert!(re(1, 3, &[&[0.0, 1.0, 2.0]]).is_positive());
    }

    #[test]
    fn group_basis_examples() {
        let g = CubeElement::from_real(1, 2, &[1.0, 0.0]).unwrap().to_group_basis();
        assert!((g.unit - 0.5).norm() < 1e-15);
        assert!((g.shifts[0][0] - 0.5).norm() < 1e-15);

        let ones = re(3, 2, &[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]).to_group_basis();
        assert!((ones.unit - 3.0).norm() < 1e-14);
        assert!(ones.shifts.iter().flatten().all(|c| c.norm() < 1e-14));

        let w = root_of_unity(3, 1);
        let t = CubeElement::from_fn(2, 3, |a, x| if x == 0 { w.conj().powu(a as u32) } else { C64::new(0.0, 0.0) });
        let g = t.to_group_basis();
        assert!((g.shifts[0][0] - 1.0).norm() < 1e-14);
        assert!(g.shifts[0][1].norm() < 1e-14);
        assert!(g.shifts[1].iter().all(|c| c.norm() < 1e-14));
        assert!(g.to_cube().sub(&t).is_zero());
    }

    #[test]
    fn pairing_examples() {
        let z = re(2, 2, &[&[0.3, 0.7], &[-2.0, 5.0]]);
        let f = DualFunctional::deterministic(2, &[0, 0]);
        assert!((f.pair(&z).unwrap() - C64::new(0.3 - 2.0, 0.0)).norm() < 1e-15);
        let u = DualFunctional::from_fn(2, 3, |_, _| C64::new(1.0 / 3.0, 0.0));
        let p = CubeElement::projection(2, 3, 0, 0);
        assert!((u.pair(&p).unwrap() - 1.0 / 3.0).norm() < 1e-15);
        let bad = DualFunctional::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(bad.pair(&z).is_err());
    }

    #[test]
    fn vertex_state_counts() {
        assert_eq!(vertex_states(1, 2).unwrap().len(), 2);
        assert_eq!(vertex_states(2, 2).unwrap().len(), 4);
        let v = vertex_states(3, 3).unwrap();
        assert_eq!(v.len(), 27);
        assert!(v.iter().all(DualFunctional::is_state));
        assert!(vertex_states(30, 2).is_err());
    }

    #[test]
    fn json_layout() {
        let t = CubeElement::new(2, 1, vec![C64::new(1.0, 2.0), C64::new(3.0, 0.0)]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"m":2,"n":1,"re":[1.0,3.0],"im":[2.0,0.0]}"#);
        let back: CubeElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<CubeElement>(r#"{"m":2,"n":2,"re":[1.0],"im":[0.0]}"#).is_err());
    }
}
