//! Finite-dimensional approximation of 2×2 quantum boxes by the universal
//! projector family on `⊕_{k=1}^N C²`.
//!
//! Both parties use the same model: block `k` carries `|0⟩⟨0|` for the first
//! setting and `|ψ_k⟩⟨ψ_k|`, `ψ_k = cos α_k|0⟩ + sin α_k|1⟩`, `α_k = kπ/(2N)`,
//! for the second.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boxes::{box_from_quantum, CorrelationBox, QuantumRealization};
use crate::error::{Error, Result};
use crate::linalg::consts::real_qubit;
use crate::linalg::{eigh, inner, norm, ComplexMatrix, C64};

const ANGLE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct TwoQubitRealization {
    psi: Vec<C64>,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RealizationRepr {
    psi: VectorRepr,
    alpha: f64,
    beta: f64,
}

impl Serialize for TwoQubitRealization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RealizationRepr {
            psi: VectorRepr { re: self.psi.iter().map(|z| z.re).collect(), im: self.psi.iter().map(|z| z.im).collect() },
            alpha: self.alpha,
            beta: self.beta,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwoQubitRealization {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RealizationRepr::deserialize(d)?;
        if r.psi.re.len() != r.psi.im.len() {
            return Err(serde::de::Error::custom("psi.re and psi.im differ in length"));
        }
        let psi = r.psi.re.iter().zip(&r.psi.im).map(|(&a, &b)| C64::new(a, b)).collect();
        TwoQubitRealization::new(psi, r.alpha, r.beta).map_err(serde::de::Error::custom)
    }
}

fn check_angle(angle: f64, what: &str) -> Result<f64> {
    if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&angle) {
        return Err(Error::invalid(format!("{what} = {angle} lies outside [0, π/2]")));
    }
    Ok(angle.clamp(0.0, FRAC_PI_2))
}

/// Canonical projective measurements `[x][a]` for second-setting angle `angle`.
fn canonical_measurements(angle: f64) -> Vec<Vec<ComplexMatrix>> {
    vec![
        vec![ComplexMatrix::projector(&real_qubit(0.0)), ComplexMatrix::projector(&real_qubit(FRAC_PI_2))],
        vec![ComplexMatrix::projector(&real_qubit(angle)), ComplexMatrix::projector(&real_qubit(angle + FRAC_PI_2))],
    ]
}

impl TwoQubitRealization {
    pub fn new(psi: Vec<C64>, alpha: f64, beta: f64) -> Result<Self> {
        if psi.len() != 4 {
            return Err(Error::dim(format!("psi has {} entries, expected 4", psi.len())));
        }
        if (norm(&psi) - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("psi has norm {}", norm(&psi))));
        }
        Ok(Self { psi, alpha: check_angle(alpha, "alpha")?, beta: check_angle(beta, "beta")? })
    }

    pub fn psi(&self) -> &[C64] {
        &self.psi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn to_quantum(&self) -> QuantumRealization {
        QuantumRealization::from_pure(&self.psi, canonical_measurements(self.alpha), canonical_measurements(self.beta))
    }
}

/// `p(ab|xy) = ⟨ψ|Q_ax ⊗ Q_by|ψ⟩` in the canonical gauge.
pub fn box_from_realization(r: &TwoQubitRealization) -> CorrelationBox {
    box_from_quantum(&r.to_quantum()).expect("canonical realizations are valid")
}

/// Unit vector spanning a rank-one projector.
fn range_vector(q: &ComplexMatrix) -> Vec<C64> {
    let eig = eigh(q).expect("checked Hermitian");
    eig.vector(eig.values.len() - 1)
}

fn check_rank_one_pair(povm: &[ComplexMatrix], who: &str) -> Result<()> {
    if povm.len() != 2 || povm.iter().any(|q| q.rows() != 2 || q.cols() != 2) {
        return Err(Error::dim(format!("{who}: expected two 2x2 outcome projectors")));
    }
    for q in povm {
        if q.hermitian_deviation() > 1e-10 || (q * q).max_abs_diff(q) > 1e-10 || (q.trace() - 1.0).norm() > 1e-10 {
            return Err(Error::invalid(format!("{who}: outcomes must be rank-one projectors")));
        }
    }
    if (&povm[0] + &povm[1]).max_abs_diff(&ComplexMatrix::identity(2)) > 1e-10 {
        return Err(Error::invalid(format!("{who}: outcomes do not sum to the identity")));
    }
    Ok(())
}

/// Local unitary taking the first-setting outcome-0 projector to `|0⟩⟨0|`
/// and the second-setting one to `|ψ_θ⟩⟨ψ_θ|` with `θ ∈ [0, π/2]`.
fn canonical_frame(q: &[Vec<ComplexMatrix>], who: &str) -> Result<(ComplexMatrix, f64)> {
    if q.len() != 2 {
        return Err(Error::dim(format!("{who}: expected two settings")));
    }
    for povm in q {
        check_rank_one_pair(povm, who)?;
    }
    let u0 = range_vector(&q[0][0]);
    let u1 = vec![-u0[1].conj(), u0[0].conj()];
    let v = range_vector(&q[1][0]);
    let (c0, c1) = (inner(&u0, &v), inner(&u1, &v));
    let theta = c1.norm().atan2(c0.norm());
    let phase = if c0.norm() > 1e-15 && c1.norm() > 1e-15 { C64::from_polar(1.0, c0.arg() - c1.arg()) } else { C64::new(1.0, 0.0) };
    // rows are ⟨u0| and e^{iφ}⟨u1|
    let w = ComplexMatrix::from_fn(2, 2, |i, j| if i == 0 { u0[j].conj() } else { phase * u1[j].conj() });
    Ok((w, theta))
}

/// Applies local unitaries so the realization is in canonical gauge.
pub fn canonicalize_realization(psi: &[C64], e: &[Vec<ComplexMatrix>], f: &[Vec<ComplexMatrix>]) -> Result<TwoQubitRealization> {
    if psi.len() != 4 {
        return Err(Error::dim(format!("psi has {} entries, expected 4", psi.len())));
    }
    let (wa, alpha) = canonical_frame(e, "Alice")?;
    let (wb, beta) = canonical_frame(f, "Bob")?;
    let mut out = crate::linalg::kron(&wa, &wb).matvec(psi);
    crate::linalg::normalize(&mut out);
    TwoQubitRealization::new(out, alpha, beta)
}

/// Tsirelson-optimal realization in canonical gauge.
pub fn tsirelson_two_qubit() -> TwoQubitRealization {
    let r = crate::boxes::tsirelson_realization();
    let eig = eigh(&r.rho).expect("Hermitian");
    let psi = eig.vector(eig.values.len() - 1);
    canonicalize_realization(&psi, &r.e, &r.f).expect("projective qubit realization")
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalModel {
    #[serde(rename = "N")]
    n: usize,
    /// `projectors[x][a]`, each `2N × 2N`.
    projectors: Vec<Vec<ComplexMatrix>>,
}

pub fn grid_angle(k: usize, n: usize) -> f64 {
    k as f64 * PI / (2 * n) as f64
}

pub fn universal_model(n: usize) -> Result<UniversalModel> {
    if n == 0 {
        return Err(Error::invalid("grid size N must be at least 1"));
    }
    let dim = 2 * n;
    let mut p00 = ComplexMatrix::zeros(dim, dim);
    let mut p01 = ComplexMatrix::zeros(dim, dim);
    for k in 1..=n {
        let o = 2 * (k - 1);
        p00[(o, o)] = C64::new(1.0, 0.0);
        let (c, s) = (grid_angle(k, n).cos(), grid_angle(k, n).sin());
        let block = [[c * c, c * s], [c * s, s * s]];
        for i in 0..2 {
            for j in 0..2 {
                p01[(o + i, o + j)] = C64::new(block[i][j], 0.0);
            }
        }
    }
    let id = ComplexMatrix::identity(dim);
    let p10 = &id - &p00;
    let p11 = &id - &p01;
    Ok(UniversalModel { n, projectors: vec![vec![p00, p10], vec![p01, p11]] })
}

impl UniversalModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn projector(&self, a: usize, x: usize) -> &ComplexMatrix {
        &self.projectors[x][a]
    }

    pub fn measurements(&self) -> Vec<Vec<ComplexMatrix>> {
        self.projectors.clone()
    }
}

/// Grid index `k ∈ 1..=N` nearest to `angle`, ties to the smaller index.
pub fn choose_index(angle: f64, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("grid size N must be at least 1"));
    }
    let angle = check_angle(angle, "angle")?;
    let mut best = (1, f64::NEG_INFINITY);
    for k in 1..=n {
        let overlap = (grid_angle(k, n) - angle).cos();
        if overlap > best.1 + 1e-15 {
            best = (k, overlap);
        }
    }
    Ok(best.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxScheme {
    /// Mixture over the two grid frames bracketing each angle, weighted so
    /// the averaged Bloch vector points along the target frame.
    #[default]
    Bracketing,
    /// Single pure state embedded at the nearest grid block.
    NearestPure,
}

/// One grid frame used by a party: block `k`, optionally reflected by
/// `diag(1, −1)` so it stands for angle `−α_k`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Frame {
    pub block: usize,
    pub reflected: bool,
    pub weight: f64,
}

fn frames(angle: f64, n: usize, scheme: ApproxScheme) -> Result<Vec<Frame>> {
    let nearest = choose_index(angle, n)?;
    let single = |block| vec![Frame { block, reflected: false, weight: 1.0 }];
    if scheme == ApproxScheme::NearestPure {
        return Ok(single(nearest));
    }
    let step = grid_angle(1, n);
    let (lo, hi, lo_frame, hi_block) = if angle <= step {
        (-step, step, (1, true), 1)
    } else {
        let k = ((angle / step).floor() as usize).clamp(1, n - 1);
        (grid_angle(k, n), grid_angle(k + 1, n), (k, false), k + 1)
    };
    let (wl, wh) = ((2.0 * (hi - angle)).sin(), (2.0 * (angle - lo)).sin());
    if wl + wh <= 1e-15 || wl <= 1e-15 || wh <= 1e-15 || n == 1 {
        return Ok(single(nearest));
    }
    Ok(vec![
        Frame { block: lo_frame.0, reflected: lo_frame.1, weight: wl / (wl + wh) },
        Frame { block: hi_block, reflected: false, weight: wh / (wl + wh) },
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct Approximation {
    #[serde(rename = "N")]
    pub n: usize,
    pub k0: usize,
    pub l0: usize,
    pub scheme: ApproxScheme,
    pub alice_frames: Vec<Frame>,
    pub bob_frames: Vec<Frame>,
    /// State on `C^{2N} ⊗ C^{2N}`.
    #[serde(skip)]
    pub rho: ComplexMatrix,
    #[serde(rename = "box")]
    pub approx_box: CorrelationBox,
    pub distance: f64,
    /// `16 sin²(π/(4N))`.
    pub bound: f64,
}

/// Grid size `ceil(π/√eps)`.
pub fn grid_size(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 4.0) {
        return Err(Error::invalid(format!("eps = {eps} must lie in (0, 4]")));
    }
    Ok((PI / eps.sqrt()).ceil() as usize)
}

pub fn approximate(r: &TwoQubitRealization, eps: f64) -> Result<Approximation> {
    approximate_with(r, eps, ApproxScheme::default())
}

pub fn approximate_with(r: &TwoQubitRealization, eps: f64, scheme: ApproxScheme) -> Result<Approximation> {
    let n = grid_size(eps)?;
    let model = universal_model(n)?;
    let dim = model.dim();
    let alice = frames(r.alpha, n, scheme)?;
    let bob = frames(r.beta, n, scheme)?;

    let sign = |frame: &Frame, i: usize| if frame.reflected && i == 1 { -1.0 } else { 1.0 };
    let mut rho = ComplexMatrix::zeros(dim * dim, dim * dim);
    for fa in &alice {
        for fb in &bob {
            let mut embedded = vec![C64::new(0.0, 0.0); dim * dim];
            for i in 0..2 {
                for j in 0..2 {
                    let target = (2 * (fa.block - 1) + i) * dim + 2 * (fb.block - 1) + j;
                    embedded[target] = r.psi[2 * i + j] * sign(fa, i) * sign(fb, j);
                }
            }
            rho = &rho + &ComplexMatrix::projector(&embedded).scale_real(fa.weight * fb.weight);
        }
    }

    let mut p = vec![0.0; 16];
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let op = crate::linalg::kron(model.projector(a, x), model.projector(b, y));
                    p[((a * 2 + b) * 2 + x) * 2 + y] = rho.trace_product(&op).re;
                }
            }
        }
    }
    let approx_box = CorrelationBox::new(2, 2, p)?;
    let distance = box_from_realization(r).l1_distance(&approx_box)?;
    Ok(Approximation {
        n,
        k0: choose_index(r.alpha, n)?,
        l0: choose_index(r.beta, n)?,
        scheme,
        alice_frames: alice,
        bob_frames: bob,
        rho,
        approx_box,
        distance,
        bound: 16.0 * (PI / (4 * n) as f64).sin().powi(2),
    })
}
