use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use symcalc::fredholm::{fredholm_report, FredholmOptions};
use symcalc::io::{read_json, KernelSpec};
use symcalc::kernel::{make_power_pole, validate_admissible, SpaceParams};
use symcalc::lab::grid::log_gaussian;
use symcalc::lab::identities::{check_commutation, check_lifting, standard_test_function, LiftKind};
use symcalc::lab::mellin_op::{check_zbeta, log_grid_function};
use symcalc::mellin::{mellin_symbol, mellin_symbol_oracle};
use symcalc::rectangle::rectangle_grid;
use symcalc::symbol::{assemble_symbol_bessel_with, assemble_symbol_lp, det, Lift, OperatorExpression};

const ORACLE_THRESHOLD: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "symcalc", version, about = "Symbol calculus for Mellin and Fourier convolution operators on the half-line")]
struct Cli {
    /// Output directory (analyze) or output file / directory (other commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomised trial functions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Ellipticity threshold on min |det|.
    #[arg(long, global = true)]
    tol_ell: Option<f64>,
    /// Samples per rectangle leg.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble the symbol of an operator and report ellipticity and index.
    Analyze {
        /// Analysis spec (JSON).
        spec: PathBuf,
    },
    /// Check one operator identity numerically.
    VerifyIdentities {
        #[arg(long, value_enum)]
        case: Case,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        c: C64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        s: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        gamma: Option<C64>,
        #[arg(long, default_value_t = 1 << 14)]
        n: usize,
        /// Weight line for the zbeta case.
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
    },
    /// Compare closed-form Mellin symbols with quadrature along a line.
    Oracle {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -8.0)]
        xi_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 8.0)]
        xi_max: f64,
        #[arg(long, default_value_t = 161)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
enum Case {
    Commutation,
    LiftingK1,
    LiftingK2,
    Zbeta,
}

impl Case {
    fn threshold(self, s: f64) -> f64 {
        match self {
            Case::Commutation if s.fract() == 0.0 => 1e-8,
            Case::Commutation => 5e-3,
            Case::LiftingK1 | Case::Zbeta => 1e-6,
            Case::LiftingK2 => 1e-5,
        }
    }
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(1, e.to_string())
    }
}

fn input<T>(field: &str, r: symcalc::Result<T>) -> Result<T, Fail> {
    r.map_err(|e| Fail(1, format!("{field}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    p: f64,
    #[serde(default)]
    gamma_weight: f64,
    #[serde(default)]
    s: f64,
    #[serde(default)]
    bessel_gamma: Option<[f64; 2]>,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Setting {
    Lp,
    Bessel,
}

#[derive(Deserialize)]
struct GridSpec {
    n_per_leg: usize,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Tolerances {
    tol_ell: Option<f64>,
    closure_tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSpec {
    space: RawSpace,
    setting: Setting,
    expression: OperatorExpression,
    grid: Option<GridSpec>,
    #[serde(default)]
    tolerances: Tolerances,
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Fail(1, format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Fail(1, format!("{}: {e}", path.display())))
}

/// `--out` names a file unless it is an existing directory.
fn out_file(out: &Option<PathBuf>, default: &str) -> PathBuf {
    match out {
        Some(p) if p.is_dir() => p.join(default),
        Some(p) => p.clone(),
        None => PathBuf::from(default),
    }
}

fn analyze(cli: &Cli, spec_path: &Path) -> Result<u8, Fail> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| Fail(1, format!("{}: {e}", spec_path.display())))?;
    let spec: AnalysisSpec = serde_json::from_str(&text).map_err(|e| Fail(1, format!("spec: {e}")))?;
    let (p, gw, s) = (spec.space.p, spec.space.gamma_weight, spec.space.s);
    if !(p > 1.0 && p.is_finite()) {
        return Err(Fail(1, format!("space.p = {p}: p must lie in (1, ∞)")));
    }
    let sp = input("space.gamma_weight / space.s", SpaceParams::new(p, gw, s))?;
    if sp.gamma_weight != 0.0 {
        return Err(Fail(1, "space.gamma_weight: symbol assembly supports the unweighted space only (gamma_weight = 0)".into()));
    }
    let n = cli.grid.or(spec.grid.map(|g| g.n_per_leg)).unwrap_or(256);
    if n < 8 {
        return Err(Fail(1, format!("grid.n_per_leg = {n}: at least 8 required")));
    }
    let mut opt = FredholmOptions::default();
    if let Some(t) = spec.tolerances.tol_ell {
        opt.tol_ell = t;
    }
    if let Some(t) = spec.tolerances.closure_tol {
        opt.closure_tol = t;
    }
    if let Some(t) = cli.tol_ell {
        opt.tol_ell = t;
    }
    if !(opt.tol_ell > 0.0) {
        return Err(Fail(1, format!("tolerances.tol_ell = {}: must be positive", opt.tol_ell)));
    }
    let grid = rectangle_grid(n);
    let field = match spec.setting {
        Setting::Lp => {
            if sp.s != 0.0 {
                return Err(Fail(1, format!("space.s = {}: the lp setting needs s = 0; use setting \"bessel\"", sp.s)));
            }
            input("expression", assemble_symbol_lp(&spec.expression, sp.p, &grid))?
        }
        Setting::Bessel => {
            let gamma = spec.space.bessel_gamma.map_or(C64::new(0.0, 1.0), |[re, im]| C64::new(re, im));
            let lift = Lift { p: sp.p, s: sp.s, gamma };
            input("expression", assemble_symbol_bessel_with(&spec.expression, lift, &grid))?
        }
    };

    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut trace = csv::Writer::from_writer(vec![]);
    trace.write_record(["arclen", "leg", "coord", "re_det", "im_det"])?;
    for (pt, m) in &field.samples {
        let d = det(m);
        trace.write_record([
            format!("{:.17e}", pt.arclen),
            pt.leg.name().to_string(),
            format!("{:.17e}", pt.coord),
            format!("{:.17e}", d.re),
            format!("{:.17e}", d.im),
        ])?;
    }
    let trace = String::from_utf8(trace.into_inner().map_err(|e| Fail(1, e.to_string()))?)?;
    write_file(&dir.join("symbol_trace.csv"), &trace)?;

    let report = fredholm_report(&field, &opt).map_err(|e| Fail(1, format!("analysis: {e}")))?;
    write_file(&dir.join("report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(if report.elliptic { 0 } else { 2 })
}

#[derive(Serialize)]
struct VerifyResult {
    identity: String,
    parameters: serde_json::Value,
    rel_residual: f64,
    threshold: f64,
    passed: bool,
    remainder_norm: Option<f64>,
    grid: symcalc::lab::grid::GridMeta,
}

fn verify(cli: &Cli, case: Case, c: C64, s: f64, gamma: Option<C64>, n: usize, beta: f64) -> Result<u8, Fail> {
    let gamma = gamma.unwrap_or_else(|| C64::from_polar(1.0, 0.75 * PI));
    let run = || -> symcalc::Result<_> {
        match case {
            Case::Commutation => check_commutation(c, s, gamma, &standard_test_function(n)?),
            Case::LiftingK1 => check_lifting(LiftKind::K1, c, s, gamma, &standard_test_function(n)?),
            Case::LiftingK2 => check_lifting(LiftKind::K2, c, s, gamma, &standard_test_function(n)?),
            Case::Zbeta => {
                let k = make_power_pole(c, 1)?;
                let f = log_grid_function(n, log_gaussian(0.0, 1.0))?;
                check_zbeta(&k, beta, &f)
            }
        }
    };
    let r = run()?;
    let threshold = case.threshold(s);
    let mut parameters = serde_json::json!({
        "c": [c.re, c.im],
        "s": s,
        "gamma": [gamma.re, gamma.im],
        "n": n,
        "seed": cli.seed,
    });
    if let Case::Zbeta = case {
        parameters["beta"] = beta.into();
    }
    let result = VerifyResult {
        identity: serde_json::to_value(case)?.as_str().unwrap_or_default().to_string(),
        parameters,
        rel_residual: r.rel_residual,
        threshold,
        passed: r.rel_residual <= threshold,
        remainder_norm: r.remainder_norm,
        grid: r.grid,
    };
    write_file(&out_file(&cli.out, "result.json"), &(serde_json::to_string_pretty(&result)? + "\n"))?;
    Ok(if result.passed { 0 } else { 2 })
}

fn oracle(cli: &Cli, kernel: &Path, beta: f64, xi_min: f64, xi_max: f64, n: usize) -> Result<u8, Fail> {
    let k = input("kernel", read_json::<KernelSpec>(kernel).and_then(|s| s.build()))?;
    let rep = validate_admissible(&k);
    if !rep.admissible {
        return Err(Fail(1, format!("kernel: inadmissible: {}", rep.violations.join("; "))));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Fail(1, format!("beta = {beta}: must lie in (0, 1)")));
    }
    if !(xi_min.is_finite() && xi_max.is_finite() && xi_min <= xi_max) || n == 0 {
        return Err(Fail(1, "xi-min/xi-max/n: need finite xi-min <= xi-max and n >= 1".into()));
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["xi", "re_closed", "im_closed", "re_oracle", "im_oracle", "abs_err"])?;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let xi = if n == 1 { xi_min } else { xi_min + (xi_max - xi_min) * j as f64 / (n - 1) as f64 };
        let a = input("kernel", mellin_symbol(&k, beta, xi))?;
        let b = input("kernel", mellin_symbol_oracle(&k, beta, xi))?;
        let err = (a - b).norm();
        worst = worst.max(err);
        w.write_record([xi, a.re, a.im, b.re, b.im, err].map(|v| format!("{v:.17e}")))?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| Fail(1, e.to_string()))?)?;
    write_file(&out_file(&cli.out, "symbols.csv"), &text)?;
    Ok(if worst <= ORACLE_THRESHOLD { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Analyze { spec } => analyze(&cli, spec),
        Cmd::VerifyIdentities { case, c, s, gamma, n, beta } => verify(&cli, *case, *c, *s, *gamma, *n, *beta),
        Cmd::Oracle { kernel, beta, xi_min, xi_max, n } => oracle(&cli, kernel, *beta, *xi_min, *xi_max, *n),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
