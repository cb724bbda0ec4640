//! Command implementations behind the `dsbs` binary. Each command returns
//! its printed output so that tests can call it directly.

pub mod format;
pub mod report;
pub mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use dsbs_core::binary::{d2, h2, DsbsParams};
use dsbs_core::envelopes::{
    phi, phi_q, phi_tilde, psi, psi_q, tabulate, tabulate_family, Family, QParam, Surface,
};
use dsbs_core::hulls::PairMode;
use dsbs_core::mre::dd2;
use dsbs_core::stationary::{case_rule, count_roots_scan, solve_root, Case, RootProblem};
use dsbs_core::verify::{verify_all, ClaimId, VerifyConfig};
use serde_json::{json, Value};
use thiserror::Error;

pub use format::fmt_g;

pub const RHO_MIN: f64 = 1e-6;
pub const GRID_MIN: usize = 51;
pub const GRID_MAX: usize = 2001;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] dsbs_core::error::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage and parameter errors, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn check_rho(rho: f64) -> Result<DsbsParams> {
    if !(rho > RHO_MIN && rho < 1.0 - RHO_MIN) {
        return Err(usage(format!("--rho {rho} must lie in (1e-6, 1 - 1e-6)")));
    }
    Ok(DsbsParams::new(rho)?)
}

pub fn check_grid(n: usize) -> Result<usize> {
    if !(GRID_MIN..=GRID_MAX).contains(&n) {
        return Err(usage(format!("--grid {n} must lie in [{GRID_MIN}, {GRID_MAX}]")));
    }
    Ok(n)
}

/// Writes `contents` through a temporary file in the same directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

/// Functions available to `eval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EvalFn {
    H2,
    D2,
    Dd2,
    Phi,
    Psi,
    #[value(name = "phi_q")]
    PhiQ,
    #[value(name = "psi_q")]
    PsiQ,
    #[value(name = "phi_tilde")]
    PhiTilde,
}

/// Coordinates supplied to `eval`; which ones are required depends on the
/// function.
#[derive(Debug, Clone, Copy, Default)]
pub struct Point {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub q: Option<f64>,
}

fn need(x: Option<f64>, name: &str, f: EvalFn) -> Result<f64> {
    let v = x.ok_or_else(|| usage(format!("{f:?} requires --{name}")))?;
    if name != "q" && !(0.0..=1.0).contains(&v) {
        return Err(usage(format!("--{name} {v} must lie in [0, 1]")));
    }
    Ok(v)
}

/// Value of an evaluation together with the inner optimizer, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Named by-products: `p_star` for `dd2`, `t_opt` for the `q` families.
    pub extra: Vec<(&'static str, f64)>,
}

pub fn evaluate(f: EvalFn, pt: &Point, params: &DsbsParams) -> Result<Evaluation> {
    let plain = |value| Evaluation { value, extra: vec![] };
    Ok(match f {
        EvalFn::H2 => plain(h2(need(pt.a, "a", f)?)),
        EvalFn::D2 => plain(d2(need(pt.a, "a", f)?)),
        EvalFn::Dd2 => {
            let r = dd2(need(pt.a, "a", f)?, need(pt.b, "b", f)?, params)?;
            Evaluation {
                value: r.value,
                extra: vec![("p_star", r.p_star)],
            }
        }
        EvalFn::Phi => plain(phi(need(pt.s, "s", f)?, need(pt.t, "t", f)?, params)),
        EvalFn::Psi => plain(psi(need(pt.s, "s", f)?, need(pt.t, "t", f)?, params)),
        EvalFn::PhiTilde => plain(phi_tilde(need(pt.s, "s", f)?, need(pt.t, "t", f)?, params)),
        EvalFn::PhiQ | EvalFn::PsiQ => {
            let s = need(pt.s, "s", f)?;
            let qp = QParam::with_q(need(pt.q, "q", f)?)?;
            let e = if f == EvalFn::PhiQ {
                phi_q(s, &qp, params)
            } else {
                psi_q(s, &qp, params)
            };
            Evaluation {
                value: e.value,
                extra: vec![("t_opt", e.arg)],
            }
        }
    })
}

/// `eval`: one `name = value` line per quantity, 12 significant digits, or a
/// JSON object with full precision.
pub fn cmd_eval(f: EvalFn, pt: &Point, params: &DsbsParams, as_json: bool) -> Result<String> {
    let e = evaluate(f, pt, params)?;
    if as_json {
        let mut obj = serde_json::Map::new();
        obj.insert("value".into(), json!(e.value));
        for (k, v) in &e.extra {
            obj.insert((*k).into(), json!(v));
        }
        return Ok(format!("{}\n", Value::Object(obj)));
    }
    let mut out = format!("value = {}\n", fmt_g(e.value));
    for (k, v) in &e.extra {
        out.push_str(&format!("{k} = {}\n", fmt_g(*v)));
    }
    Ok(out)
}

/// Exponents of the one-parameter curves written by `figure`.
pub const FIGURE_PHI_Q: [f64; 6] = [1.0, 2.0, 10.0, -0.5, -2.0, -10.0];
pub const FIGURE_PSI_Q: [f64; 3] = [0.25, 0.5, 0.75];

/// Files written by `figure`.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub files: Vec<PathBuf>,
    /// Extremes of `phi - phi_tilde` over the lattice.
    pub min_gap: f64,
    pub max_gap: f64,
}

/// `figure`: lattice CSVs of `phi`, `phi_tilde`, `psi`, the curve table
/// `q_family.csv`, and optionally SVG plots.
pub fn cmd_figure(params: &DsbsParams, n: usize, out_dir: &Path, with_svg: bool) -> Result<FigureOutput> {
    let n = check_grid(n)?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut files = Vec::new();
    let mut emit = |name: &str, text: String| -> Result<()> {
        let path = out_dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        files.push(path);
        Ok(())
    };
    let phi_v = tabulate(Surface::Phi, params, n);
    let tilde_v = tabulate(Surface::PhiTilde, params, n);
    let psi_v = tabulate(Surface::Psi, params, n);
    emit("phi.csv", format::lattice_csv(n, &phi_v))?;
    emit("phi_tilde.csv", format::lattice_csv(n, &tilde_v))?;
    emit("psi.csv", format::lattice_csv(n, &psi_v))?;

    let axis = dsbs_core::search::linspace(0.0, 1.0, n);
    let mut rows = Vec::new();
    let mut series = Vec::new();
    let curves = FIGURE_PHI_Q
        .iter()
        .map(|&q| (Family::PhiQ, q))
        .chain(FIGURE_PSI_Q.iter().map(|&q| (Family::PsiQ, q)));
    for (family, q) in curves {
        let qp = QParam::with_q(q)?;
        let ys: Vec<f64> = tabulate_family(family, &qp, params, n)
            .into_iter()
            .map(|e| e.value)
            .collect();
        for (s, y) in axis.iter().zip(&ys) {
            rows.push(vec![
                fmt_g(qp.q_conj),
                fmt_g(*s),
                fmt_g(*y),
                family.name().to_string(),
            ]);
        }
        series.push(svg::Series {
            label: format!("{} q'={}", family.name(), fmt_g(qp.q_conj)),
            xs: axis.clone(),
            ys,
        });
    }
    emit("q_family.csv", format::csv(&["q_conj", "s", "value", "family"], rows))?;

    if with_svg {
        let rho = fmt_g(params.rho());
        emit("phi.svg", svg::heatmap(&format!("phi, rho = {rho}"), n, &phi_v, 8))?;
        emit("phi_tilde.svg", svg::heatmap(&format!("phi_tilde, rho = {rho}"), n, &tilde_v, 8))?;
        emit("psi.svg", svg::heatmap(&format!("psi, rho = {rho}"), n, &psi_v, 8))?;
        emit(
            "q_family.svg",
            svg::line_chart(&format!("one-parameter families, rho = {rho}"), "s", "value", &series),
        )?;
    }
    let gaps = phi_v.iter().zip(&tilde_v).map(|(p, t)| p - t);
    let (min_gap, max_gap) = gaps.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
        (lo.min(g), hi.max(g))
    });
    Ok(FigureOutput {
        files,
        min_gap,
        max_gap,
    })
}

/// Options of `verify` beyond the core configuration defaults.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub grid_n: usize,
    pub tolerance: Option<f64>,
    pub pairs: Option<u64>,
    pub scan_n: Option<usize>,
    pub seed: Option<u64>,
    pub inject_fault: Option<String>,
    pub out: PathBuf,
}

/// Result of `verify`: the JSON report, the printed summary and whether
/// every claim passed.
#[derive(Debug, Clone)]
pub struct VerifyOutput {
    pub report: Value,
    pub summary: String,
    pub passed: bool,
}

pub fn verify_config(opts: &VerifyOptions) -> Result<VerifyConfig> {
    let mut cfg = VerifyConfig::new(opts.grid_n);
    if let Some(tol) = opts.tolerance {
        if !(tol > 0.0) {
            return Err(usage("--tol must be positive"));
        }
        cfg.tolerances.convexity = tol;
    }
    if let Some(pairs) = opts.pairs {
        cfg.pair_mode = PairMode::Sampled {
            pairs,
            seed: opts.seed.unwrap_or(cfg.seed),
        };
    }
    if let Some(n) = opts.scan_n {
        cfg.scan_n = n;
    }
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(id) = &opts.inject_fault {
        cfg.inject_fault = Some(id.parse::<ClaimId>().map_err(|_| {
            usage(format!(
                "--inject-fault {id}: expected one of {}",
                ClaimId::ALL.map(|c| c.as_str()).join(", ")
            ))
        })?);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `verify`: runs every claim, writes the JSON report and summarizes one
/// claim per line.
pub fn cmd_verify(params: &DsbsParams, opts: &VerifyOptions) -> Result<VerifyOutput> {
    let cfg = verify_config(opts)?;
    let rep = verify_all(params, &cfg)?;
    let value = report::to_json(&rep);
    debug_assert!(report::validate(&value).is_ok());
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    write_atomic(&opts.out, text.as_bytes())?;
    let mut summary = String::new();
    for (c, ms) in rep.claims.iter().zip(&rep.runtime_ms) {
        summary.push_str(&format!(
            "{:<3} {} worst={} ({:.0} ms) {}\n",
            c.id.as_str(),
            if c.passed { "PASS" } else { "FAIL" },
            fmt_g(c.worst_violation),
            ms,
            c.anchor
        ));
    }
    Ok(VerifyOutput {
        report: value,
        summary,
        passed: rep.passed(),
    })
}

/// How `roots` receives its problem.
#[derive(Debug, Clone, Copy)]
pub enum RootsInput {
    Direct { theta: f64, v: f64, r: f64 },
    Exponents { p: f64, q: f64, rho: f64 },
}

pub const ROOTS_SCAN_N: usize = 1_000_000;

/// Case of an exponent pair: forward for `p, q > 1`, reverse for
/// `p, q in (0, 1)`, mixed for `p in (0, 1)` and `q < 0`.
pub fn classify(qp: &QParam) -> Option<Case> {
    let (p, q) = (qp.p, qp.q);
    if p > 1.0 && q > 1.0 {
        Some(Case::Forward)
    } else if p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0 {
        Some(Case::Reverse)
    } else if p > 0.0 && p < 1.0 && q < 0.0 {
        Some(Case::Mixed)
    } else {
        None
    }
}

/// `roots`: the root of the scalar equation with diagnostics. Problems
/// outside the uniqueness hypothesis are reported, not rejected.
pub fn cmd_roots(input: RootsInput, scan_n: usize) -> Result<String> {
    let mut out = String::new();
    let prob = match input {
        RootsInput::Direct { theta, v, r } => RootProblem::unchecked(theta, v, r),
        RootsInput::Exponents { p, q, rho } => {
            let params = check_rho(rho)?;
            let qp = QParam::new(p, q)?;
            let rho2 = rho * rho;
            let cmp = if qp.r > rho2 { ">" } else if qp.r < rho2 { "<" } else { "=" };
            out.push_str(&format!("r = {} {cmp} rho^2 = {}\n", fmt_g(qp.r), fmt_g(rho2)));
            let case = classify(&qp).ok_or_else(|| {
                usage("exponents must be forward (p, q > 1), reverse (p, q in (0, 1)) or mixed (p in (0, 1), q < 0)")
            })?;
            out.push_str(&format!("case = {case:?}\n"));
            match case_rule(case, &qp) {
                Ok(rule) => RootProblem::unchecked(params.theta(), rule.exponent, qp.r),
                Err(_) => {
                    out.push_str("no root: neither 1/(p-1) nor 1/(q-1) has magnitude above 1 in this case\n");
                    return Ok(out);
                }
            }
        }
    };
    if !(prob.theta > 0.0 && prob.theta < 1.0 && prob.v.is_finite()) {
        return Err(usage("theta must lie in (0, 1) and v must be finite"));
    }
    out.push_str(&format!(
        "theta = {}\nv = {}\nr = {}\n",
        fmt_g(prob.theta),
        fmt_g(prob.v),
        fmt_g(prob.r)
    ));
    let valid = RootProblem::new(prob.theta, prob.v, prob.r).is_ok();
    out.push_str(&format!(
        "hypothesis (|v| > 1, 0 < r <= rho^2) = {}\n",
        if valid { "holds" } else { "fails" }
    ));
    match solve_root(&prob) {
        Ok(root) => {
            out.push_str(&format!(
                "z = {}\nh = {}\neta0 = {}\nh0 = {}\nresidual = {}\n",
                fmt_g(root.z),
                fmt_g(root.h),
                fmt_g(root.eta0),
                fmt_g(root.h0),
                fmt_g(dsbs_core::stationary::root_residual(root.h, &prob))
            ));
        }
        Err(e) => out.push_str(&format!("no root: {e}\n")),
    }
    out.push_str(&format!("scan_count = {} (n = {scan_n})\n", count_roots_scan(&prob, scan_n)));
    Ok(out)
}
