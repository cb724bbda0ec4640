//! Lagrangian extremum problems over marginal pairs, the stationarity system
//! of their interior critical points, and the scalar root equation those
//! points reduce to.
//!
//! With `z = e^h` the root equation reads
//! `z^{r v} = ((1 + θ z)^v θ + (θ + z)^v) / ((θ + z)^v θ + (1 + θ z)^v)`;
//! all evaluations happen in `h` with log-sum-exp.

use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{d2, Coupling2x2, DsbsParams};
use crate::envelopes::{phi_tilde, QParam, S0Region};
use crate::error::{Error, Result};
use crate::mre::dd2_value;
use crate::search::{bisect_root, golden, linspace, Extremum, Sense};

/// Upper end of the bracket search in `h`.
pub const H_CAP: f64 = 1e4;
/// Lower end of the logarithmic scan grid.
pub const SCAN_H_MIN: f64 = 1e-6;

/// Parameters `(θ, v, r)` of the scalar root equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootProblem {
    pub theta: f64,
    pub v: f64,
    pub r: f64,
}

fn rho_of_theta(theta: f64) -> f64 {
    (1.0 - theta) / (1.0 + theta)
}

impl RootProblem {
    /// Requires `|v| > 1`, `θ in (0, 1)` and `0 < r <= ρ^2` with
    /// `ρ = (1 - θ) / (1 + θ)`.
    pub fn new(theta: f64, v: f64, r: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Domain {
                what: "theta",
                value: theta,
                domain: "(0, 1)",
            });
        }
        if !(v.abs() > 1.0) || !v.is_finite() {
            return Err(Error::Domain {
                what: "v",
                value: v,
                domain: "|v| > 1",
            });
        }
        let rho = rho_of_theta(theta);
        if !(r > 0.0 && r <= rho * rho) {
            return Err(Error::Domain {
                what: "r",
                value: r,
                domain: "(0, rho^2]",
            });
        }
        Ok(RootProblem { theta, v, r })
    }

    /// No validation; for observations outside the hypothesis range.
    pub fn unchecked(theta: f64, v: f64, r: f64) -> Self {
        RootProblem { theta, v, r }
    }

    pub fn rho(&self) -> f64 {
        rho_of_theta(self.theta)
    }
}

/// `ln(alpha + beta e^h)` for positive `alpha`, `beta` without overflow.
#[inline]
fn ln_affine_exp(alpha: f64, beta: f64, h: f64) -> f64 {
    if h > 0.0 {
        h + (beta + alpha * (-h).exp()).ln()
    } else {
        (alpha + beta * h.exp()).ln()
    }
}

#[inline]
fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln((1 + θ e^h)^v θ + (θ + e^h)^v)`.
#[inline]
fn g_log(h: f64, theta: f64, v: f64) -> f64 {
    let first = v * ln_affine_exp(1.0, theta, h) + theta.ln();
    let second = v * ln_affine_exp(theta, 1.0, h);
    log_add_exp(first, second)
}

/// `(1 + θ e^h) / (θ + e^h)`, decreasing from 1 at `h = 0` towards `θ`.
pub fn eta_of_h(h: f64, theta: f64) -> f64 {
    if h > 700.0 {
        return theta;
    }
    let w = (-h).exp();
    (w + theta) / (theta * w + 1.0)
}

/// The auxiliary function whose positive roots are the roots of the scalar
/// equation via `z = e^h`; exactly zero at `h = 0`.
pub fn aux_phi_h(h: f64, prob: &RootProblem) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let RootProblem { theta, v, r } = *prob;
    g_log(h, theta, v) - g_log(-h, theta, v) - h * v - r * v * h
}

/// Left side minus right side of the turning-point equation in `η`.
fn turning_gap(eta: f64, prob: &RootProblem) -> f64 {
    let RootProblem { theta, v, r } = *prob;
    r * (eta.powf(v) + eta.powf(-v)) + eta + 1.0 / eta - (1.0 - r) * (theta + 1.0 / theta)
}

/// The turning point `η0 < 1` of the auxiliary function, by bisection in `η`.
pub fn eta0(prob: &RootProblem) -> Result<f64> {
    let lo = prob.theta;
    let hi = 1.0;
    let (f_lo, f_hi) = (turning_gap(lo, prob), turning_gap(hi, prob));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::Invariant(format!(
            "no sign change of the turning-point equation on [theta, 1]: \
             f(theta) = {f_lo:e}, f(1) = {f_hi:e}"
        )));
    }
    Ok(bisect_root(lo, hi, |e| turning_gap(e, prob)))
}

/// `h0` with `eta_of_h(h0) = η0`.
pub fn h0_threshold(prob: &RootProblem) -> Result<f64> {
    let eta = eta0(prob)?;
    let theta = prob.theta;
    Ok(((1.0 - eta * theta) / (eta - theta)).ln())
}

/// Root of the scalar equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub z: f64,
    pub h: f64,
    pub h0: f64,
    pub eta0: f64,
}

/// The unique root `z > 1`: bisection of the auxiliary function on `(h0, H)`
/// with `H` doubled until the sign flips, up to [`H_CAP`].
pub fn solve_root(prob: &RootProblem) -> Result<Root> {
    let eta = eta0(prob)?;
    let h0 = ((1.0 - eta * prob.theta) / (eta - prob.theta)).ln();
    let f0 = aux_phi_h(h0, prob);
    if f0 == 0.0 {
        return Err(Error::NoRoot(format!("auxiliary function vanishes at h0 = {h0}")));
    }
    let mut hi = (2.0 * h0).max(1.0);
    loop {
        let f_hi = aux_phi_h(hi, prob);
        if f_hi.signum() != f0.signum() || f_hi == 0.0 {
            break;
        }
        if hi >= H_CAP {
            return Err(Error::NoRoot(format!(
                "no sign change of the auxiliary function on ({h0}, {H_CAP}]"
            )));
        }
        hi = (2.0 * hi).min(H_CAP);
    }
    let h = bisect_root(h0, hi, |h| aux_phi_h(h, prob));
    Ok(Root {
        z: h.exp(),
        h,
        h0,
        eta0: eta,
    })
}

pub fn solve_root_z(prob: &RootProblem) -> Result<f64> {
    solve_root(prob).map(|r| r.z)
}

/// `|log lhs - log rhs|` of the scalar equation at `z = e^h`, evaluated in
/// the `z` form rather than through the auxiliary function.
pub fn root_residual(h: f64, prob: &RootProblem) -> f64 {
    let RootProblem { theta, v, r } = *prob;
    // ln(1 + θ z), ln(θ + z)
    let l1 = ln_affine_exp(1.0, theta, h);
    let l2 = ln_affine_exp(theta, 1.0, h);
    let num = log_add_exp(v * l1 + theta.ln(), v * l2);
    let den = log_add_exp(v * l2 + theta.ln(), v * l1);
    (r * v * h - (num - den)).abs()
}

/// Logarithmic grid of `n` points on `[SCAN_H_MIN, H_CAP]`.
pub fn scan_grid(n: usize) -> Vec<f64> {
    let (lo, hi) = (SCAN_H_MIN.ln(), H_CAP.ln());
    linspace(lo, hi, n.max(2)).into_iter().map(f64::exp).collect()
}

/// Rounding bound of [`aux_phi_h`]: a small multiple of the unit roundoff
/// times the magnitudes of the cancelling terms.
pub fn aux_noise(h: f64, prob: &RootProblem) -> f64 {
    let RootProblem { theta, v, r } = *prob;
    let scale = g_log(h, theta, v).abs() + g_log(-h, theta, v).abs() + (v * h).abs() * (1.0 + r.abs());
    64.0 * f64::EPSILON * scale
}

/// Sign changes of the auxiliary function along [`scan_grid`]. Samples within
/// [`aux_noise`] of zero carry no sign and are skipped.
pub fn count_roots_scan(prob: &RootProblem, n: usize) -> usize {
    let grid = scan_grid(n);
    let mut count = 0;
    let mut last = 0.0f64;
    for &h in &grid {
        let f = aux_phi_h(h, prob);
        if f.abs() <= aux_noise(h, prob) {
            continue;
        }
        let s = f.signum();
        if last != 0.0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sign changes of the discrete derivative of the auxiliary function on `n`
/// equispaced points of `[0, h_max]`. A unimodal profile gives 1.
pub fn derivative_sign_changes(prob: &RootProblem, h_max: f64, n: usize) -> usize {
    let hs = linspace(0.0, h_max, n.max(3));
    let vals: Vec<f64> = hs.iter().map(|&h| aux_phi_h(h, prob)).collect();
    let mut count = 0;
    let mut last = 0.0f64;
    for w in vals.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        let s = d.signum();
        if last != 0.0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Which extremum problem a stationary point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Both exponents in `(1, inf)`; `X` and `Y` marginals at most 1/2.
    Forward,
    /// Both exponents in `(0, 1)`; `Y` marginal at least 1/2.
    Reverse,
    /// `p in (0, 1)`, `q < 0`; the root variable is attached to `Y`.
    Mixed,
}

/// How a case maps onto the root equation: the exponent used as `v`, and
/// whether the `(p, q)` roles are swapped so that the root variable belongs
/// to the `Y` side (realized by transposing the coupling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseRule {
    pub exponent: f64,
    pub transposed: bool,
}

/// The single table of case conventions.
pub fn case_rule(case: Case, qp: &QParam) -> Result<CaseRule> {
    let rule = match case {
        Case::Forward if qp.v > 1.0 => CaseRule {
            exponent: qp.v,
            transposed: false,
        },
        Case::Forward if qp.u > 1.0 => CaseRule {
            exponent: qp.u,
            transposed: true,
        },
        Case::Reverse if qp.v < -1.0 => CaseRule {
            exponent: qp.v,
            transposed: false,
        },
        Case::Mixed if qp.u < -1.0 => CaseRule {
            exponent: qp.u,
            transposed: true,
        },
        _ => {
            return Err(Error::Domain {
                what: "exponents",
                value: qp.r,
                domain: "outside the case's parameter range",
            })
        }
    };
    Ok(rule)
}

/// The root problem attached to `(qp, case)`.
pub fn root_problem(qp: &QParam, params: &DsbsParams, case: Case) -> Result<RootProblem> {
    let rule = case_rule(case, qp)?;
    RootProblem::new(params.theta(), rule.exponent, qp.r)
}

/// An interior critical point of a Lagrangian problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub z: f64,
    pub coupling: Coupling2x2,
    /// `D2` of the `X = 1` marginal.
    pub s: f64,
    /// `D2` of the `Y = 1` marginal.
    pub t: f64,
    pub residual_x: f64,
    pub residual_y: f64,
}

/// Logarithmic residuals of the two stationarity chains
/// `(q00+q01)/(q10+q11))^{1/p} = q00 θ / q10 = q01 / (q11 θ)` and
/// `((q00+q10)/(q01+q11))^{1/q} = q00 θ / q01 = q10 / (q11 θ)`.
pub fn stationarity_residuals(c: &Coupling2x2, qp: &QParam, theta: f64) -> (f64, f64) {
    let chain = |ratio: f64, exp_inv: f64, left: f64, right: f64| {
        let base = exp_inv * ratio.ln();
        let (l, r) = (left.ln(), right.ln());
        (base - l).abs().max((base - r).abs()).max((l - r).abs())
    };
    let rx = chain(
        (c.q00 + c.q01) / (c.q10 + c.q11),
        qp.lambda,
        c.q00 * theta / c.q10,
        c.q01 / (c.q11 * theta),
    );
    let ry = chain(
        (c.q00 + c.q10) / (c.q01 + c.q11),
        qp.mu,
        c.q00 * theta / c.q01,
        c.q10 / (c.q11 * theta),
    );
    (rx, ry)
}

/// Residual above which a reconstruction is rejected.
pub const RECONSTRUCT_LIMIT: f64 = 1e-6;

/// The coupling attached to a root `z`: with `y = ((z+θ)/(1+θz))^v` the cells
/// are proportional to `(y z, z θ, y θ, 1)`, transposed when the case puts the
/// root variable on the `Y` side.
pub fn reconstruct_coupling(
    z: f64,
    qp: &QParam,
    params: &DsbsParams,
    case: Case,
) -> Result<StationaryPoint> {
    if !(z >= 1.0) {
        return Err(Error::Domain {
            what: "z",
            value: z,
            domain: "z >= 1",
        });
    }
    let rule = case_rule(case, qp)?;
    let theta = params.theta();
    let y = ((z + theta) / (1.0 + theta * z)).powf(rule.exponent);
    let raw = Coupling2x2::from_weights(y * z, z * theta, y * theta, 1.0)?;
    let coupling = if rule.transposed { raw.transpose() } else { raw };
    let (residual_x, residual_y) = stationarity_residuals(&coupling, qp, theta);
    let worst = residual_x.max(residual_y);
    if !(worst <= RECONSTRUCT_LIMIT) {
        return Err(Error::Inconsistent {
            residual: worst,
            limit: RECONSTRUCT_LIMIT,
        });
    }
    Ok(StationaryPoint {
        z,
        coupling,
        s: d2(coupling.marginal_x1()),
        t: d2(coupling.marginal_y1()),
        residual_x,
        residual_y,
    })
}

/// Root solve followed by reconstruction.
pub fn stationary_point(qp: &QParam, params: &DsbsParams, case: Case) -> Result<StationaryPoint> {
    let prob = root_problem(qp, params, case)?;
    let z = solve_root_z(&prob)?;
    reconstruct_coupling(z, qp, params, case)
}

/// The forward Lagrangian `phi_tilde(s, t) - s / p - t / q`.
pub fn forward_lagrangian(s: f64, t: f64, qp: &QParam, params: &DsbsParams) -> f64 {
    phi_tilde(s, t, params) - qp.lambda * s - qp.mu * t
}

/// Which extremum problem to solve by brute force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// min over `a, b in [0, 1/2]` of the lower increasing envelope minus the
    /// weighted marginal divergences.
    ForwardMin,
    /// max over `a in [0, 1/2]`, `b in [1/2, 1]` of `DD2(a, b)` minus the
    /// weighted marginal divergences.
    ReverseMax,
    /// max over `a` of min over `b`, both in `[0, 1/2]`.
    MixedMaxMin,
}

/// Optimizer of a Lagrangian problem, in both parameterizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaResult {
    pub value: f64,
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub t: f64,
}

pub const GAMMA_GRID: usize = 401;

/// `min(D2(a), ...)` form of the lower increasing envelope in marginal
/// coordinates, as a function of `(a, b) in [0, 1/2]^2`.
fn forward_bar(a: f64, b: f64, params: &DsbsParams, region: &S0Region) -> f64 {
    if region.contains_ab(a, b) {
        d2(a)
    } else if region.contains_ab(b, a) {
        d2(b)
    } else {
        dd2_value(a, b, params)
    }
}

fn objective(problem: Problem, qp: &QParam, params: &DsbsParams) -> impl Fn(f64, f64) -> f64 + Sync {
    let params = *params;
    let region = S0Region::new(&params);
    let (lambda, mu) = (qp.lambda, qp.mu);
    move |a: f64, b: f64| match problem {
        Problem::ForwardMin => forward_bar(a, b, &params, &region) - lambda * d2(a) - mu * d2(b),
        Problem::ReverseMax => dd2_value(a, b, &params) - lambda * d2(a) - mu * d2(b),
        Problem::MixedMaxMin => dd2_value(a, b, &params) - mu * d2(b) - lambda * d2(a),
    }
}

fn b_range(problem: Problem) -> (f64, f64) {
    match problem {
        Problem::ReverseMax => (0.5, 1.0),
        _ => (0.0, 0.5),
    }
}

fn coordinate_refine(
    start: (f64, f64),
    step: (f64, f64),
    bounds_b: (f64, f64),
    sense: Sense,
    f: &(impl Fn(f64, f64) -> f64 + Sync),
) -> (f64, f64, f64) {
    let (mut a, mut b) = start;
    let mut val = f(a, b);
    for _ in 0..3 {
        let ea = golden(
            (a - step.0).max(0.0),
            (a + step.0).min(0.5),
            1e-12,
            sense,
            |x| f(x, b),
        );
        if sense.better(ea.value, val) {
            a = ea.arg;
            val = ea.value;
        }
        let eb = golden(
            (b - step.1).max(bounds_b.0),
            (b + step.1).min(bounds_b.1),
            1e-12,
            sense,
            |y| f(a, y),
        );
        if sense.better(eb.value, val) {
            b = eb.arg;
            val = eb.value;
        }
    }
    (a, b, val)
}

fn inner_min_b(a: f64, grid_b: &[f64], f: &(impl Fn(f64, f64) -> f64 + Sync)) -> Extremum {
    let vals: Vec<f64> = grid_b.iter().map(|&b| f(a, b)).collect();
    crate::search::refine_on_grid(grid_b, &vals, 1e-12, Sense::Min, |b| f(a, b))
}

/// Brute-force optimizer of a Lagrangian problem on an `n x n` grid of
/// marginals with golden-section polishing. For the max-min problem the
/// explicit `a = 0` (that is, `s = 1`) candidate is also compared.
pub fn gamma_extremum(qp: &QParam, params: &DsbsParams, problem: Problem, n: usize) -> GammaResult {
    let n = n.max(3);
    let f = objective(problem, qp, params);
    let grid_a = linspace(0.0, 0.5, n);
    let (blo, bhi) = b_range(problem);
    let grid_b = linspace(blo, bhi, n);
    let step = (grid_a[1] - grid_a[0], grid_b[1] - grid_b[0]);
    let (a, b, value) = match problem {
        Problem::ForwardMin | Problem::ReverseMax => {
            let sense = if problem == Problem::ForwardMin {
                Sense::Min
            } else {
                Sense::Max
            };
            let rows: Vec<(f64, usize)> = grid_a
                .par_iter()
                .map(|&a| {
                    let vals: Vec<f64> = grid_b.iter().map(|&b| f(a, b)).collect();
                    let j = crate::search::best_index(&vals, sense);
                    (vals[j], j)
                })
                .collect();
            let vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let i = crate::search::best_index(&vals, sense);
            let j = rows[i].1;
            coordinate_refine((grid_a[i], grid_b[j]), step, (blo, bhi), sense, &f)
        }
        Problem::MixedMaxMin => {
            let outer = |a: f64| inner_min_b(a, &grid_b, &f);
            let inner: Vec<Extremum> = grid_a.par_iter().map(|&a| outer(a)).collect();
            let vals: Vec<f64> = inner.iter().map(|e| e.value).collect();
            let i = crate::search::best_index(&vals, Sense::Max);
            let mut best = (grid_a[i], inner[i].arg, inner[i].value);
            let lo = grid_a[i.saturating_sub(1)];
            let hi = grid_a[(i + 1).min(n - 1)];
            let e = golden(lo, hi, 1e-10, Sense::Max, |a| outer(a).value);
            if e.value > best.2 {
                best = (e.arg, outer(e.arg).arg, e.value);
            }
            let boundary = outer(0.0);
            if boundary.value > best.2 {
                best = (0.0, boundary.arg, boundary.value);
            }
            best
        }
    };
    GammaResult {
        value,
        a,
        b,
        s: d2(a),
        t: d2(b),
    }
}

/// Lagrangian objective of `problem` at marginals `(a, b)`.
pub fn gamma_objective(problem: Problem, qp: &QParam, params: &DsbsParams, a: f64, b: f64) -> f64 {
    objective(problem, qp, params)(a, b)
}

/// True iff `r > ρ^2`. The boundary `r = ρ^2` is not hypercontractive.
pub fn hypercontractive_regime(qp: &QParam, params: &DsbsParams) -> bool {
    let rho = params.rho();
    qp.r > rho * rho
}
