//! Command-line front end. Every command prints one JSON `CommandResult`
//! with sorted keys and floats rounded to 12 significant digits; `gen`
//! prints the fixture itself so it can be fed back as input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::approx::{approximate_with, canonicalize_realization, tsirelson_two_qubit, ApproxScheme, TwoQubitRealization};
use crate::boxes::{box_from_quantum, isotropic_box, pr_box, tsirelson_realization, uniform_box, CorrelationBox, QuantumRealization};
use crate::bounds::{classical_bound, lhv_membership, see_saw_lower_bound, BellFunctional, SeeSawOptions};
use crate::cube::{CubeElement, DualFunctional};
use crate::error::Error;
use crate::linalg::eigh;
use crate::npa::{npa_bound, npa_feasible, NpaCertificate};
use crate::steering::{
    assemblage_bound, fixtures as steering_fixtures, lhs_bound, lhs_bound_sdp, lhs_membership, steering_value, Assemblage,
    SteeringFunctional,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

/// Tolerance for the non-signalling check in `classify`.
const SIGNALLING_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "nonlocal", version, about = "Bell nonlocality and steering toolkit")]
pub struct Cli {
    /// NPA hierarchy level.
    #[arg(long, global = true, default_value_t = 1)]
    pub level: usize,
    /// Feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Non-signalling, LHV and NPA membership of a box.
    Classify {
        #[arg(long = "box")]
        box_file: PathBuf,
        /// Include the NPA certificate in the output.
        #[arg(long)]
        certificate: bool,
    },
    /// Classical bound, NPA upper bound and see-saw lower bound of a Bell functional.
    Bell {
        #[arg(long)]
        functional: PathBuf,
        #[arg(long, default_value_t = 2)]
        d_a: usize,
        #[arg(long, default_value_t = 2)]
        d_b: usize,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
    },
    /// Steering functionals and assemblages.
    Steer {
        #[arg(long)]
        functional: Option<PathBuf>,
        #[arg(long)]
        assemblage: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<SteerMode>,
    },
    /// Finite-dimensional approximation of a two-qubit box.
    Approx {
        #[arg(long)]
        realization: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Bracketing)]
        scheme: SchemeArg,
    },
    /// Writes a fixture.
    Gen {
        #[arg(value_enum)]
        fixture: Fixture,
        /// Visibility for `isotropic`.
        #[arg(long)]
        v: Option<f64>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Cube elements and dual functionals.
    Cube {
        #[arg(long)]
        element: Option<PathBuf>,
        #[arg(long)]
        dual: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SteerMode {
    Membership,
    Lhs,
    Quantum,
    Violation,
    Value,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Bracketing,
    NearestPure,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Fixture {
    Pr,
    Uniform,
    Isotropic,
    Tsirelson,
    TsirelsonRealization,
    Chsh,
    Ones,
    Zx,
    PhiPlusAssemblage,
    ProductAssemblage,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_solver_failure() {
            CliError::Solver(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
pub struct CommandResult {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub diagnostics: Value,
}

/// Rounds every non-integer number to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            let r = if r == 0.0 { 0.0 } else { r };
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Invalid(e.to_string()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("malformed {what} {}: {e}", path.display())))
}

/// Accepts either a canonical `{psi, alpha, beta}` realization or a pure
/// projective qubit realization `{rho, E, F}`.
fn read_realization(path: &Path) -> CliResult<TwoQubitRealization> {
    let raw: Value = read_json(path, "realization")?;
    if raw.get("psi").is_some() {
        return serde_json::from_value(raw).map_err(|e| CliError::Invalid(format!("malformed realization: {e}")));
    }
    let q: QuantumRealization = serde_json::from_value(raw).map_err(|e| CliError::Invalid(format!("malformed realization: {e}")))?;
    q.validate()?;
    let eig = eigh(&q.rho)?;
    let top = eig.values.len() - 1;
    if (eig.values[top] - 1.0).abs() > 1e-10 {
        return Err(CliError::Invalid("realization state is not pure".into()));
    }
    Ok(canonicalize_realization(&eig.vector(top), &q.e, &q.f)?)
}

fn path_str(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

fn classify(cli: &Cli, path: &Path, certificate: bool) -> CliResult<CommandResult> {
    let p: CorrelationBox = read_json(path, "box")?;
    let ns = p.is_nonsignalling(SIGNALLING_TOL);
    let lhv = lhv_membership(&p)?;
    let mut outputs = json!({
        "nonsignalling": ns.ok,
        "signalling_violation": ns.max_violation,
        "lhv": lhv.member,
    });
    if let Some(sep) = &lhv.separation {
        outputs["separating_functional"] = json!({
            "functional": to_value(&sep.functional)?,
            "box_value": sep.box_value,
            "classical_bound": sep.classical_bound,
            "gap": sep.gap,
        });
    }
    let mut diagnostics = json!({});
    if ns.ok {
        let npa = npa_feasible(&p, cli.level, cli.tol)?;
        outputs["npa_feasible_at_level"] = json!(npa.feasible);
        outputs["npa_margin"] = json!(npa.margin);
        if certificate {
            outputs["certificate"] = match &npa.certificate {
                NpaCertificate::MomentMatrix(mm) => to_value(mm)?,
                other => to_value(other)?,
            };
        }
        diagnostics["npa_solver"] = to_value(&npa.solver)?;
    } else {
        outputs["npa_feasible_at_level"] = json!(false);
    }
    Ok(CommandResult {
        command: "classify".into(),
        inputs: json!({"box": path_str(path), "level": cli.level, "tol": cli.tol}),
        outputs,
        diagnostics,
    })
}

fn bell(cli: &Cli, path: &Path, d_a: usize, d_b: usize, restarts: usize) -> CliResult<CommandResult> {
    let t: BellFunctional = read_json(path, "functional")?;
    let classical = classical_bound(&t)?;
    if classical.value <= 1e-9 {
        return Err(CliError::Invalid(format!("classical bound {} is not positive; the ratio is undefined", classical.value)));
    }
    let upper = npa_bound(&t, cli.level)?;
    let lower = see_saw_lower_bound(&t, SeeSawOptions { d_a, d_b, restarts, seed: cli.seed })?;
    Ok(CommandResult {
        command: "bell".into(),
        inputs: json!({
            "functional": path_str(path),
            "level": cli.level,
            "d_a": d_a,
            "d_b": d_b,
            "restarts": restarts,
            "seed": cli.seed,
        }),
        outputs: json!({
            "classical": classical.value,
            "classical_strategy": {"alice": classical.alice, "bob": classical.bob},
            "quantum_upper": upper.value,
            "quantum_lower": lower.value,
            "ratio_upper": upper.value / classical.value,
            "ratio_lower": lower.value / classical.value,
        }),
        diagnostics: json!({"npa_solver": to_value(&upper.solver)?, "npa_attained": upper.attained}),
    })
}

fn steer(cli: &Cli, functional: Option<&Path>, assemblage: Option<&Path>, mode: Option<SteerMode>) -> CliResult<CommandResult> {
    let f: Option<SteeringFunctional> = functional.map(|p| read_json(p, "steering functional")).transpose()?;
    let s: Option<Assemblage> = assemblage.map(|p| read_json(p, "assemblage")).transpose()?;
    let mode = match (mode, &f, &s) {
        (Some(m), _, _) => m,
        (None, Some(_), Some(_)) => SteerMode::Value,
        (None, Some(_), None) => SteerMode::Violation,
        (None, None, Some(_)) => SteerMode::Membership,
        (None, None, None) => return Err(CliError::Invalid("steer needs --functional and/or --assemblage".into())),
    };
    let need_f = || f.as_ref().ok_or_else(|| CliError::Invalid("this mode needs --functional".into()));
    let need_s = || s.as_ref().ok_or_else(|| CliError::Invalid("this mode needs --assemblage".into()));
    let mut diagnostics = json!({});
    let outputs = match mode {
        SteerMode::Membership => {
            let r = lhs_membership(need_s()?, cli.tol)?;
            diagnostics["solver"] = to_value(&r.solver)?;
            let mut out = json!({"member": r.member, "margin": r.margin});
            if r.member {
                out["decomposition_residual"] = json!(r.decomposition_residual);
            }
            if let Some(v) = &r.violating_functional {
                out["violating_functional"] = to_value(v)?;
            }
            out
        }
        SteerMode::Lhs => {
            let f = need_f()?;
            json!({"lhs": lhs_bound(f)?, "lhs_sdp": lhs_bound_sdp(f)?})
        }
        SteerMode::Quantum => json!({"quantum": assemblage_bound(need_f()?)?}),
        SteerMode::Violation => {
            let f = need_f()?;
            let lhs = lhs_bound(f)?;
            if lhs <= 1e-9 {
                return Err(CliError::Invalid(format!("LHS bound {lhs} is not positive; the ratio is undefined")));
            }
            let quantum = assemblage_bound(f)?;
            json!({"lhs": lhs, "quantum": quantum, "ratio": quantum / lhs})
        }
        SteerMode::Value => json!({"value": steering_value(need_f()?, need_s()?)?}),
    };
    Ok(CommandResult {
        command: "steer".into(),
        inputs: json!({
            "functional": functional.map(path_str),
            "assemblage": assemblage.map(path_str),
            "mode": format!("{mode:?}").to_lowercase(),
            "tol": cli.tol,
        }),
        outputs,
        diagnostics,
    })
}

fn approx(path: &Path, eps: f64, scheme: SchemeArg) -> CliResult<CommandResult> {
    let r = read_realization(path)?;
    let scheme = match scheme {
        SchemeArg::Bracketing => ApproxScheme::Bracketing,
        SchemeArg::NearestPure => ApproxScheme::NearestPure,
    };
    let a = approximate_with(&r, eps, scheme)?;
    Ok(CommandResult {
        command: "approx".into(),
        inputs: json!({"realization": path_str(path), "eps": eps, "scheme": scheme}),
        outputs: to_value(&a)?,
        diagnostics: json!({"alpha": r.alpha(), "beta": r.beta(), "within_eps": a.distance <= eps}),
    })
}

fn cube(element: Option<&Path>, dual: Option<&Path>) -> CliResult<CommandResult> {
    let t: Option<CubeElement> = element.map(|p| read_json(p, "cube element")).transpose()?;
    let f: Option<DualFunctional> = dual.map(|p| read_json(p, "dual functional")).transpose()?;
    if t.is_none() && f.is_none() {
        return Err(CliError::Invalid("cube needs --element and/or --dual".into()));
    }
    let mut outputs = json!({});
    if let Some(t) = &t {
        outputs["element"] = json!({
            "is_zero": t.is_zero(),
            "positive": t.is_positive(),
            "canonical_rep": to_value(&t.canonical_rep())?,
            "group_basis": to_value(&t.to_group_basis())?,
        });
    }
    if let Some(f) = &f {
        outputs["dual"] = json!({"in_v": f.in_v(), "positive": f.is_positive(), "state": f.is_state()});
    }
    if let (Some(t), Some(f)) = (&t, &f) {
        let z = f.pair(t)?;
        outputs["pairing"] = json!({"re": z.re, "im": z.im});
    }
    Ok(CommandResult {
        command: "cube".into(),
        inputs: json!({"element": element.map(path_str), "dual": dual.map(path_str)}),
        outputs,
        diagnostics: json!({}),
    })
}

fn fixture(which: Fixture, v: Option<f64>, m: usize, n: usize) -> CliResult<Value> {
    let value = match which {
        Fixture::Pr => to_value(&pr_box())?,
        Fixture::Uniform => to_value(&uniform_box(m, n)?)?,
        Fixture::Isotropic => {
            let v = v.ok_or_else(|| CliError::Invalid("isotropic needs --v".into()))?;
            to_value(&isotropic_box(v)?)?
        }
        Fixture::Tsirelson => to_value(&box_from_quantum(&tsirelson_realization())?)?,
        Fixture::TsirelsonRealization => to_value(&tsirelson_two_qubit())?,
        Fixture::Chsh => to_value(&BellFunctional::chsh())?,
        Fixture::Ones => to_value(&BellFunctional::constant(m, n, 1.0)?)?,
        Fixture::Zx => to_value(&steering_fixtures::zx_functional())?,
        Fixture::PhiPlusAssemblage => to_value(&steering_fixtures::phi_plus_assemblage())?,
        Fixture::ProductAssemblage => to_value(&steering_fixtures::product_assemblage())?,
    };
    Ok(value)
}

/// Runs a parsed command and returns the text to emit.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let result = match &cli.command {
        Command::Gen { fixture: which, v, m, n } => {
            return serde_json::to_string_pretty(&fixture(*which, *v, *m, *n)?).map_err(|e| CliError::Invalid(e.to_string()));
        }
        Command::Classify { box_file, certificate } => classify(cli, box_file, *certificate)?,
        Command::Bell { functional, d_a, d_b, restarts } => bell(cli, functional, *d_a, *d_b, *restarts)?,
        Command::Steer { functional, assemblage, mode } => steer(cli, functional.as_deref(), assemblage.as_deref(), *mode)?,
        Command::Approx { realization, eps, scheme } => approx(realization, *eps, *scheme)?,
        Command::Cube { element, dual } => cube(element.as_deref(), dual.as_deref())?,
    };
    let value = round_floats(to_value(&result)?);
    serde_json::to_string_pretty(&value).map_err(|e| CliError::Invalid(e.to_string()))
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Invalid(format!("cannot write output: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

/// Parses `args`, runs the command and maps failures to exit codes.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { EXIT_OK });
        }
    };
    match execute(&cli).and_then(|text| emit(&cli, &text)) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        let v = round_floats(json!({"a": 0.1 + 0.2, "b": [1, 2.0, -0.0], "c": 1.234_567_890_123_456_7e-20}));
        assert_eq!(v["a"], json!(0.3));
        assert_eq!(v["b"], json!([1, 2.0, 0.0]));
        assert_eq!(v["c"], json!(1.23456789012e-20));
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::InvalidInput("x".into())).exit_code(), EXIT_INVALID);
        assert_eq!(CliError::from(Error::Sdp(crate::solvers::SdpError::Numerical("x".into()))).exit_code(), EXIT_SOLVER);
    }
}
