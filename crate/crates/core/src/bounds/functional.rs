use serde::{Deserialize, Deserializer, Serialize};

use crate::boxes::CorrelationBox;
use crate::error::{Error, Result};

/// Real coefficients `t_abxy` in `(a, b, x, y)` row-major order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellFunctional {
    m: usize,
    n: usize,
    t: Vec<f64>,
}

#[derive(Deserialize)]
struct Repr {
    m: usize,
    n: usize,
    t: Vec<f64>,
}

impl<'de> Deserialize<'de> for BellFunctional {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        BellFunctional::new(r.m, r.n, r.t).map_err(serde::de::Error::custom)
    }
}

impl BellFunctional {
    pub fn new(m: usize, n: usize, t: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("m and n must be positive"));
        }
        if t.len() != n * n * m * m {
            return Err(Error::dim(format!("{} coefficients for m={m}, n={n}", t.len())));
        }
        if t.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("functional has non-finite coefficients"));
        }
        Ok(Self { m, n, t })
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut t = Vec::with_capacity(n * n * m * m);
        for a in 0..n {
            for b in 0..n {
                for x in 0..m {
                    for y in 0..m {
                        t.push(f(a, b, x, y));
                    }
                }
            }
        }
        Self::new(m, n, t)
    }

    /// `(−1)^{a ⊕ b ⊕ xy}`, classical bound 2.
    pub fn chsh() -> Self {
        Self::from_fn(2, 2, |a, b, x, y| if (a ^ b) == (x & y) { 1.0 } else { -1.0 }).expect("valid")
    }

    pub fn constant(m: usize, n: usize, c: f64) -> Result<Self> {
        Self::from_fn(m, n, |_, _, _, _| c)
    }

    /// The functional of the unit: `1/m²` everywhere, so `⟨e, P⟩ = 1` on
    /// every normalized box.
    pub fn unit(m: usize, n: usize) -> Result<Self> {
        Self::constant(m, n, 1.0 / (m * m) as f64)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.t
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.t[((a * self.n + b) * self.m + x) * self.m + y]
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m, n: self.n, t: self.t.iter().map(|v| s * v).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other.m, other.n)?;
        Ok(Self { m: self.m, n: self.n, t: self.t.iter().zip(&other.t).map(|(a, b)| a + b).collect() })
    }

    fn same_shape(&self, m: usize, n: usize) -> Result<()> {
        if (self.m, self.n) != (m, n) {
            return Err(Error::dim(format!("functional is (m={}, n={}), other is (m={m}, n={n})", self.m, self.n)));
        }
        Ok(())
    }

    /// `⟨t, P⟩ = Σ t_abxy P(ab|xy)`.
    pub fn evaluate(&self, p: &CorrelationBox) -> Result<f64> {
        self.same_shape(p.m(), p.n())?;
        Ok(self.t.iter().zip(p.probabilities()).map(|(a, b)| a * b).sum())
    }

    /// Value on the product of deterministic strategies `g` (Alice) and `h` (Bob).
    pub fn deterministic_value(&self, g: &[usize], h: &[usize]) -> f64 {
        let mut s = 0.0;
        for x in 0..self.m {
            for y in 0..self.m {
                s += self.get(g[x], h[y], x, y);
            }
        }
        s
    }
}
