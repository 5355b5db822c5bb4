//! Assemblages `σ(a|x)`, steering functionals and their LHS / quantum bounds.
//!
//! Hermitian matrix variables are handed to the real SDP solver through the
//! embedding `H ↦ [[Re H, −Im H], [Im H, Re H]]`, under which
//! `Tr(H ω) = ½⟨E(H), X⟩` for `ω = ((X₁₁ + X₂₂) + i(X₂₁ − X₁₂))/2`.

use serde::{Deserialize, Deserializer, Serialize};

use crate::boxes::{check_density, check_povms};
use crate::cube::deterministic_maps;
use crate::error::{Error, Result};
use crate::linalg::{max_eigenvalue, min_eigenvalue, partial_trace, ComplexMatrix, RealMatrix, Subsystem, C64};
use crate::npa::SolverReport;
use crate::solvers::{sdp_solve, SdpSettings, SemidefiniteProgram, SymEntry};

/// Cap on the number of deterministic response functions `n^m`.
pub const RESPONSE_CAP: usize = 4096;
pub const DEFAULT_STEERING_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct Assemblage {
    m: usize,
    n: usize,
    d: usize,
    /// `sigma[x][a]`
    sigma: Vec<Vec<ComplexMatrix>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteeringFunctional {
    m: usize,
    n: usize,
    d: usize,
    /// `f[x][a]`
    #[serde(rename = "F")]
    f: Vec<Vec<ComplexMatrix>>,
}

#[derive(Deserialize)]
struct AssemblageRepr {
    m: usize,
    n: usize,
    d: usize,
    sigma: Vec<Vec<ComplexMatrix>>,
}

#[derive(Deserialize)]
struct FunctionalRepr {
    m: usize,
    n: usize,
    d: usize,
    #[serde(rename = "F")]
    f: Vec<Vec<ComplexMatrix>>,
}

impl<'de> Deserialize<'de> for Assemblage {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = AssemblageRepr::deserialize(d)?;
        Assemblage::new(r.m, r.n, r.d, r.sigma).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for SteeringFunctional {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FunctionalRepr::deserialize(d)?;
        SteeringFunctional::new(r.m, r.n, r.d, r.f).map_err(serde::de::Error::custom)
    }
}

fn check_shape(m: usize, n: usize, d: usize, mats: &[Vec<ComplexMatrix>]) -> Result<()> {
    if m == 0 || n == 0 || d == 0 {
        return Err(Error::invalid("m, n and d must be positive"));
    }
    if mats.len() != m || mats.iter().any(|row| row.len() != n) {
        return Err(Error::dim(format!("expected {m} settings with {n} outcomes each")));
    }
    if mats.iter().flatten().any(|s| s.rows() != d || s.cols() != d) {
        return Err(Error::dim(format!("every matrix must be {d}x{d}")));
    }
    Ok(())
}

impl Assemblage {
    pub fn new(m: usize, n: usize, d: usize, sigma: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        check_shape(m, n, d, &sigma)?;
        for (x, row) in sigma.iter().enumerate() {
            for (a, s) in row.iter().enumerate() {
                if min_eigenvalue(s)? < -1e-10 {
                    return Err(Error::invalid(format!("σ({a}|{x}) is not PSD")));
                }
            }
        }
        let out = Self { m, n, d, sigma };
        let rho = out.reduced_state();
        for x in 1..m {
            if out.marginal(x).max_abs_diff(&rho) > 1e-9 {
                return Err(Error::invalid(format!("Σ_a σ(a|{x}) differs from Σ_a σ(a|0)")));
            }
        }
        if (rho.trace() - 1.0).norm() > 1e-9 {
            return Err(Error::invalid("Σ_a σ(a|x) does not have unit trace"));
        }
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: usize, x: usize) -> &ComplexMatrix {
        &self.sigma[x][a]
    }

    fn marginal(&self, x: usize) -> ComplexMatrix {
        self.sigma[x].iter().fold(ComplexMatrix::zeros(self.d, self.d), |acc, s| &acc + s)
    }

    /// Bob's reduced state `ρ_B = Σ_a σ(a|0)`.
    pub fn reduced_state(&self) -> ComplexMatrix {
        self.marginal(0)
    }
}

impl SteeringFunctional {
    pub fn new(m: usize, n: usize, d: usize, f: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        check_shape(m, n, d, &f)?;
        for (x, row) in f.iter().enumerate() {
            for (a, fa) in row.iter().enumerate() {
                let dev = fa.hermitian_deviation();
                if dev > 1e-12 {
                    return Err(Error::invalid(format!("F({a}|{x}) is not Hermitian (deviation {dev:.2e})")));
                }
            }
        }
        Ok(Self { m, n, d, f })
    }

    pub fn zero(m: usize, n: usize, d: usize) -> Self {
        Self { m, n, d, f: vec![vec![ComplexMatrix::zeros(d, d); n]; m] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, a: usize, x: usize) -> &ComplexMatrix {
        &self.f[x][a]
    }

    /// `Σ_x F_{g(x), x}` for a deterministic response `g`.
    fn response_operator(&self, g: &[usize]) -> ComplexMatrix {
        g.iter()
            .enumerate()
            .fold(ComplexMatrix::zeros(self.d, self.d), |acc, (x, &a)| &acc + &self.f[x][a])
            .hermitian_part()
    }
}

/// `σ(a|x) = Tr_A(ρ (E_x^a ⊗ 1))` for a state on `C^dA ⊗ C^d`.
pub fn assemblage_from_state(rho: &ComplexMatrix, e: &[Vec<ComplexMatrix>]) -> Result<Assemblage> {
    let (m, n, da) = check_povms(e, "Alice")?;
    if !rho.rows().is_multiple_of(da) {
        return Err(Error::dim(format!("state side {} is not a multiple of {da}", rho.rows())));
    }
    let d = rho.rows() / da;
    check_density(rho, da * d)?;
    let id = ComplexMatrix::identity(d);
    let sigma = e
        .iter()
        .map(|povm| {
            povm.iter()
                .map(|ea| Ok(partial_trace(&(rho * &crate::linalg::kron(ea, &id)), (da, d), Subsystem::A)?.hermitian_part()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Assemblage::new(m, n, d, sigma)
}

fn check_pair(f: &SteeringFunctional, s: &Assemblage) -> Result<()> {
    if (f.m, f.n, f.d) != (s.m, s.n, s.d) {
        return Err(Error::dim(format!(
            "functional is (m={}, n={}, d={}), assemblage is (m={}, n={}, d={})",
            f.m, f.n, f.d, s.m, s.n, s.d
        )));
    }
    Ok(())
}

/// `⟨F, σ⟩ = Σ Tr(F_ax σ(a|x))`.
pub fn steering_value(f: &SteeringFunctional, s: &Assemblage) -> Result<f64> {
    check_pair(f, s)?;
    let mut total = C64::new(0.0, 0.0);
    for x in 0..f.m {
        for a in 0..f.n {
            total += f.f[x][a].trace_product(&s.sigma[x][a]);
        }
    }
    if total.im.abs() > 1e-10 * (1.0 + total.re.abs()) {
        return Err(Error::invalid(format!("steering value has imaginary part {:.3e}", total.im)));
    }
    Ok(total.re)
}

/// `max_g λ_max(Σ_x F_{g(x),x})`, the largest value over LHS assemblages.
pub fn lhs_bound(f: &SteeringFunctional) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for g in deterministic_maps(f.m, f.n, RESPONSE_CAP)? {
        best = best.max(max_eigenvalue(&f.response_operator(&g))?);
    }
    Ok(best)
}

/// Orthonormal Hermitian basis of `d×d` matrices.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..d {
        let mut h = ComplexMatrix::zeros(d, d);
        h[(k, k)] = C64::new(1.0, 0.0);
        out.push(h);
    }
    for k in 0..d {
        for l in k + 1..d {
            let mut h = ComplexMatrix::zeros(d, d);
            h[(k, l)] = C64::new(r, 0.0);
            h[(l, k)] = C64::new(r, 0.0);
            out.push(h);
            let mut h = ComplexMatrix::zeros(d, d);
            h[(k, l)] = C64::new(0.0, r);
            h[(l, k)] = C64::new(0.0, -r);
            out.push(h);
        }
    }
    out
}

/// Upper-triangle entries of `scale · E(H)` in `block`.
fn embed(h: &ComplexMatrix, block: usize, scale: f64, out: &mut Vec<SymEntry>) {
    let d = h.rows();
    let mut push = |row: usize, col: usize, value: f64| {
        if value != 0.0 {
            out.push(SymEntry { block, row, col, value: scale * value });
        }
    };
    for r in 0..d {
        for c in r..d {
            push(r, c, h[(r, c)].re);
            push(d + r, d + c, h[(r, c)].re);
        }
        for c in 0..d {
            push(r, d + c, -h[(r, c)].im);
        }
    }
}

/// `ω = ((X₁₁ + X₂₂) + i(X₂₁ − X₁₂))/2`.
fn complexify(x: &RealMatrix) -> ComplexMatrix {
    let d = x.rows() / 2;
    ComplexMatrix::from_fn(d, d, |i, j| {
        C64::new(0.5 * (x[(i, j)] + x[(d + i, d + j)]), 0.5 * (x[(d + i, j)] - x[(i, d + j)]))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LhsComponent {
    pub response: Vec<usize>,
    pub state: ComplexMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct LhsMembership {
    pub member: bool,
    /// `min(0, min_F ⟨F, σ⟩)` over functionals with `Σ_x F_{g(x),x} ⪰ 0` for
    /// every `g` and total trace budget 1.
    pub margin: f64,
    /// Unnormalized hidden states `ω_g` when `member`.
    pub decomposition: Vec<LhsComponent>,
    /// Largest entrywise error of the decomposition.
    pub decomposition_residual: f64,
    /// A functional with `⟨F, σ⟩ > lhs_bound(F)` when not a member.
    pub violating_functional: Option<SteeringFunctional>,
    pub solver: SolverReport,
}

pub fn lhs_membership(s: &Assemblage, tol: f64) -> Result<LhsMembership> {
    let (m, n, d) = (s.m, s.n, s.d);
    let responses = deterministic_maps(m, n, RESPONSE_CAP)?;
    let basis = hermitian_basis(d);
    let per_g = n.pow(m as u32 - 1) as f64;
    let nblocks = responses.len();

    let mut sdp = SemidefiniteProgram::new(
        std::iter::repeat_n(2 * d, nblocks).chain(std::iter::once(1)).collect(),
    );
    sdp.add_objective(nblocks, 0, 0, -1.0);
    // parameters of F, skipping the gauge directions (a = n−1, x ≥ 1)
    let mut params = Vec::new();
    for x in 0..m {
        for a in 0..n {
            if a == n - 1 && x >= 1 {
                continue;
            }
            for (j, h) in basis.iter().enumerate() {
                let mut entries = Vec::new();
                for (gi, g) in responses.iter().enumerate() {
                    if g[x] == a {
                        embed(h, gi, 1.0, &mut entries);
                    }
                }
                let tr = h.trace().re;
                if tr != 0.0 {
                    entries.push(SymEntry { block: nblocks, row: 0, col: 0, value: -per_g * tr });
                }
                sdp.add_constraint(entries, h.trace_product(&s.sigma[x][a]).re);
                params.push((a, x, j));
            }
        }
    }
    let sol = sdp_solve(&sdp, SdpSettings::default())?;
    let margin = sol.dobj.min(0.0);
    let member = margin >= -tol;
    let solver = SolverReport::from(&sol);

    if member {
        let decomposition: Vec<LhsComponent> = responses
            .iter()
            .enumerate()
            .map(|(gi, g)| LhsComponent { response: g.clone(), state: complexify(&sol.x[gi]).scale_real(2.0).hermitian_part() })
            .collect();
        let mut residual = 0.0_f64;
        for x in 0..m {
            for a in 0..n {
                let sum = decomposition
                    .iter()
                    .filter(|c| c.response[x] == a)
                    .fold(ComplexMatrix::zeros(d, d), |acc, c| &acc + &c.state);
                residual = residual.max(sum.max_abs_diff(&s.sigma[x][a]));
            }
        }
        return Ok(LhsMembership {
            member,
            margin,
            decomposition,
            decomposition_residual: residual,
            violating_functional: None,
            solver,
        });
    }

    let mut f = vec![vec![ComplexMatrix::zeros(d, d); n]; m];
    for (&(a, x, j), &y) in params.iter().zip(&sol.y) {
        f[x][a] = &f[x][a] + &basis[j].scale_real(-y);
    }
    let f = f.into_iter().map(|row| row.into_iter().map(|m| m.hermitian_part()).collect()).collect();
    Ok(LhsMembership {
        member,
        margin,
        decomposition: vec![],
        decomposition_residual: f64::NAN,
        violating_functional: Some(SteeringFunctional::new(m, n, d, f)?),
        solver,
    })
}

/// `max Σ_g Tr(ω_g Σ_x F_{g(x),x})` over `ω_g ⪰ 0` with `Σ_g Tr ω_g = 1`,
/// solved as an SDP.
pub fn lhs_bound_sdp(f: &SteeringFunctional) -> Result<f64> {
    let responses = deterministic_maps(f.m, f.n, RESPONSE_CAP)?;
    let d = f.d;
    let mut sdp = SemidefiniteProgram::new(vec![2 * d; responses.len()]);
    let mut trace = Vec::new();
    for (gi, g) in responses.iter().enumerate() {
        let mut obj = Vec::new();
        embed(&f.response_operator(g), gi, 0.5, &mut obj);
        sdp.objective.extend(obj);
        embed(&ComplexMatrix::identity(d), gi, 0.5, &mut trace);
    }
    sdp.add_constraint(trace, 1.0);
    Ok(sdp_solve(&sdp, SdpSettings::default())?.dobj)
}

/// Largest `⟨F, σ⟩` over all assemblages (every valid assemblage is
/// quantum), certified by the dual objective.
pub fn assemblage_bound(f: &SteeringFunctional) -> Result<f64> {
    let (m, n, d) = (f.m, f.n, f.d);
    let block = |x: usize, a: usize| x * n + a;
    let mut sdp = SemidefiniteProgram::new(vec![2 * d; m * n]);
    for x in 0..m {
        for a in 0..n {
            let mut obj = Vec::new();
            embed(&f.f[x][a], block(x, a), 0.5, &mut obj);
            sdp.objective.extend(obj);
        }
    }
    let basis = hermitian_basis(d);
    for x in 1..m {
        for h in &basis {
            let mut entries = Vec::new();
            for a in 0..n {
                embed(h, block(x, a), 0.5, &mut entries);
                embed(h, block(0, a), -0.5, &mut entries);
            }
            sdp.add_constraint(entries, 0.0);
        }
    }
    let mut trace = Vec::new();
    for a in 0..n {
        embed(&ComplexMatrix::identity(d), block(0, a), 0.5, &mut trace);
    }
    sdp.add_constraint(trace, 1.0);
    Ok(sdp_solve(&sdp, SdpSettings::default())?.dobj)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SteeringViolation {
    pub lhs: f64,
    pub quantum: f64,
    pub ratio: f64,
}

pub fn steering_violation(f: &SteeringFunctional) -> Result<SteeringViolation> {
    let lhs = lhs_bound(f)?;
    if lhs <= 1e-9 {
        return Err(Error::invalid(format!("LHS bound {lhs} is not positive; the ratio is undefined")));
    }
    let quantum = assemblage_bound(f)?;
    Ok(SteeringViolation { lhs, quantum, ratio: quantum / lhs })
}

pub mod fixtures {
    use super::*;
    use crate::boxes::basis_measurement;
    use crate::linalg::consts::{ket, pauli_x, pauli_z, phi_plus, real_qubit};

    /// `F_{a,0} = (−1)^a Z`, `F_{a,1} = (−1)^a X`.
    pub fn zx_functional() -> SteeringFunctional {
        let sign = |a: usize| if a == 0 { 1.0 } else { -1.0 };
        let f = vec![
            (0..2).map(|a| pauli_z().scale_real(sign(a))).collect(),
            (0..2).map(|a| pauli_x().scale_real(sign(a))).collect(),
        ];
        SteeringFunctional::new(2, 2, 2, f).expect("valid")
    }

    pub fn zx_measurements() -> Vec<Vec<ComplexMatrix>> {
        use std::f64::consts::FRAC_PI_2;
        use std::f64::consts::FRAC_PI_4;
        vec![
            basis_measurement(&[ket(2, 0), ket(2, 1)]),
            basis_measurement(&[real_qubit(FRAC_PI_4), real_qubit(FRAC_PI_4 + FRAC_PI_2)]),
        ]
    }

    /// `Φ⁺` with Alice measuring Z and X.
    pub fn phi_plus_assemblage() -> Assemblage {
        assemblage_from_state(&ComplexMatrix::projector(&phi_plus()), &zx_measurements()).expect("valid")
    }

    /// Same measurements on the maximally mixed state.
    pub fn product_assemblage() -> Assemblage {
        assemblage_from_state(&ComplexMatrix::identity(4).scale_real(0.25), &zx_measurements()).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::linalg::consts::ket;
    use crate::linalg::kron;

    #[test]
    fn phi_plus_z_assemblage() {
        let s = phi_plus_assemblage();
        let half_proj = |i| ComplexMatrix::projector(&ket(2, i)).scale_real(0.5);
        assert!(s.get(0, 0).max_abs_diff(&half_proj(0)) < 1e-14);
        assert!(s.get(1, 0).max_abs_diff(&half_proj(1)) < 1e-14);
        for x in 0..2 {
            let sum = s.get(0, x) + s.get(1, x);
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
        }
    }

    #[test]
    fn product_state_factorizes() {
        let ra = ComplexMatrix::diag(&[0.7, 0.3]);
        let rb = ComplexMatrix::diag(&[0.2, 0.8]);
        let s = assemblage_from_state(&kron(&ra, &rb), &zx_measurements()).unwrap();
        for x in 0..2 {
            for a in 0..2 {
                let p = ra.trace_product(&zx_measurements()[x][a]).re;
                assert!(s.get(a, x).max_abs_diff(&rb.scale_real(p)) < 1e-14);
            }
        }
    }

    #[test]
    fn values_and_bounds() {
        let f = zx_functional();
        assert!((steering_value(&f, &phi_plus_assemblage()).unwrap() - 2.0).abs() < 1e-14);
        assert!(steering_value(&f, &product_assemblage()).unwrap().abs() < 1e-14);
        assert_eq!(steering_value(&SteeringFunctional::zero(2, 2, 2), &phi_plus_assemblage()).unwrap(), 0.0);
        assert!((lhs_bound(&f).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((lhs_bound_sdp(&f).unwrap() - 2f64.sqrt()).abs() < 1e-6);
        assert!((assemblage_bound(&f).unwrap() - 2.0).abs() < 1e-6);
        assert_eq!(lhs_bound(&SteeringFunctional::zero(2, 2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn single_setting_closed_form() {
        let c = [0.3, 1.7];
        let f = SteeringFunctional::new(
            1,
            2,
            2,
            vec![(0..2).map(|a| ComplexMatrix::projector(&ket(2, a)).scale_real(c[a])).collect()],
        )
        .unwrap();
        assert!((lhs_bound(&f).unwrap() - 1.7).abs() < 1e-14);
        assert!((assemblage_bound(&f).unwrap() - 1.7).abs() < 1e-6);
    }

    #[test]
    fn membership() {
        let p = lhs_membership(&product_assemblage(), DEFAULT_STEERING_TOL).unwrap();
        assert!(p.member);
        assert!(p.decomposition_residual < 1e-6);

        let q = lhs_membership(&phi_plus_assemblage(), DEFAULT_STEERING_TOL).unwrap();
        assert!(!q.member);
        let f = q.violating_functional.unwrap();
        assert!(steering_value(&f, &phi_plus_assemblage()).unwrap() > lhs_bound(&f).unwrap() + 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        let mut sigma = vec![vec![ComplexMatrix::identity(2).scale_real(0.25); 2]; 2];
        sigma[1][0] = ComplexMatrix::diag(&[0.5, 0.0]);
        sigma[1][1] = ComplexMatrix::diag(&[0.0, 0.0]);
        assert!(Assemblage::new(2, 2, 2, sigma).is_err());
        let mut f = vec![vec![ComplexMatrix::zeros(2, 2); 2]; 2];
        f[0][0][(0, 1)] = C64::new(1.0, 0.0);
        assert!(SteeringFunctional::new(2, 2, 2, f).is_err());
    }

    #[test]
    fn json_layout() {
        let s = serde_json::to_value(phi_plus_assemblage()).unwrap();
        assert_eq!(s["sigma"].as_array().unwrap().len(), 2);
        let back: Assemblage = serde_json::from_value(s).unwrap();
        assert_eq!(back.m(), 2);
        let f = serde_json::to_value(zx_functional()).unwrap();
        assert!(f.get("F").is_some());
        let _: SteeringFunctional = serde_json::from_value(f).unwrap();
    }
}
