//! Envelope functions on divergence coordinates `(s, t) = (D2(a), D2(b))`:
//! the lower and upper boundary surfaces `phi` and `psi`, their one-parameter
//! slices `phi_q` and `psi_q`, and the increasing envelopes of each.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{d2, d2_inv_clamped, DsbsParams};
use crate::error::{Error, Result};
use crate::mre::dd2_value;
use crate::search::{best_index, golden, linspace, Extremum, Sense};

/// Points in the `t` grid that seeds the inner optimizations.
pub const INNER_GRID: usize = 2001;
/// Final bracket width of golden-section refinements.
pub const REFINE_WIDTH: f64 = 1e-12;

/// Lagrangian weights attached to a pair of exponents `(p, q)`.
///
/// Infinite exponents are allowed and give zero weight. Fields that involve
/// a division by zero are stored as `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParam {
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    pub mu: f64,
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub q_conj: f64,
}

fn recip(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

fn conjugate(q: f64) -> f64 {
    if q.is_infinite() {
        1.0
    } else if q == 1.0 {
        f64::INFINITY
    } else {
        q / (q - 1.0)
    }
}

impl QParam {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (what, x) in [("p", p), ("q", q)] {
            if x.is_nan() || x == 0.0 {
                return Err(Error::Domain {
                    what,
                    value: x,
                    domain: "nonzero extended reals",
                });
            }
        }
        let (pm, qm) = (p - 1.0, q - 1.0);
        let r = if pm == 0.0 || qm == 0.0 { 0.0 } else { pm * qm };
        Ok(QParam {
            p,
            q,
            lambda: 1.0 / p,
            mu: 1.0 / q,
            r,
            u: recip(pm),
            v: recip(qm),
            q_conj: conjugate(q),
        })
    }

    /// Only `q` matters for the one-parameter envelopes; `p` is set to `+inf`.
    pub fn with_q(q: f64) -> Result<Self> {
        QParam::new(f64::INFINITY, q)
    }

    /// Builds the weights from the conjugate exponent `q' = q / (q - 1)`.
    pub fn from_conjugate(q_conj: f64) -> Result<Self> {
        QParam::with_q(conjugate(q_conj))
    }
}

/// The region where the plane `(alpha, beta) -> alpha` is tangent to the lower
/// increasing envelope, together with its transpose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S0Region {
    crossover: f64,
}

impl S0Region {
    pub fn new(params: &DsbsParams) -> Self {
        S0Region {
            crossover: params.crossover(),
        }
    }

    /// Membership in terms of `a = d2_inv(alpha)`, `b = d2_inv(beta)`:
    /// `b >= a * c`, written as `1/2 - b <= 2 (1/2 - a)(1/2 - c)`, which is
    /// exact at `a = 1/2`.
    #[inline]
    pub fn contains_ab(&self, a: f64, b: f64) -> bool {
        0.5 - b <= 2.0 * (0.5 - a) * (0.5 - self.crossover)
    }

    pub fn contains(&self, alpha: f64, beta: f64) -> bool {
        self.contains_ab(d2_inv_clamped(alpha), d2_inv_clamped(beta))
    }

    pub fn contains_transpose(&self, alpha: f64, beta: f64) -> bool {
        self.contains(beta, alpha)
    }

    /// Largest `beta` with `(alpha, beta)` in the region.
    pub fn boundary(&self, alpha: f64) -> f64 {
        let a = d2_inv_clamped(alpha);
        d2(0.5 - 2.0 * (0.5 - a) * (0.5 - self.crossover))
    }
}

/// Which boundary surface an inner optimization runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PhiQ,
    PsiQ,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::PhiQ => "phi_q",
            Family::PsiQ => "psi_q",
        }
    }
}

/// `d2_inv(i / (n - 1))` for `i = 0..n`.
pub fn inverse_axis(n: usize) -> Vec<f64> {
    if n == INNER_GRID {
        return inner_axis().to_vec();
    }
    compute_axis(n)
}

fn compute_axis(n: usize) -> Vec<f64> {
    linspace(0.0, 1.0, n)
        .into_par_iter()
        .map(d2_inv_clamped)
        .collect()
}

fn inner_axis() -> &'static [f64] {
    static AXIS: OnceLock<Vec<f64>> = OnceLock::new();
    AXIS.get_or_init(|| compute_axis(INNER_GRID))
}

pub fn phi(s: f64, t: f64, params: &DsbsParams) -> f64 {
    dd2_value(d2_inv_clamped(s), d2_inv_clamped(t), params)
}

pub fn psi(s: f64, t: f64, params: &DsbsParams) -> f64 {
    dd2_value(d2_inv_clamped(s), 1.0 - d2_inv_clamped(t), params)
}

/// The lower increasing envelope in closed form, from `a = d2_inv(alpha)` and
/// `b = d2_inv(beta)`.
#[inline]
pub fn phi_tilde_ab(alpha: f64, beta: f64, a: f64, b: f64, params: &DsbsParams) -> f64 {
    let region = S0Region::new(params);
    if region.contains_ab(a, b) {
        alpha
    } else if region.contains_ab(b, a) {
        beta
    } else {
        dd2_value(a, b, params)
    }
}

pub fn phi_tilde(alpha: f64, beta: f64, params: &DsbsParams) -> f64 {
    let alpha = alpha.clamp(0.0, 1.0);
    let beta = beta.clamp(0.0, 1.0);
    phi_tilde_ab(
        alpha,
        beta,
        d2_inv_clamped(alpha),
        d2_inv_clamped(beta),
        params,
    )
}

/// Inner objective at `b` for fixed `a`.
#[inline]
fn inner_objective(family: Family, a: f64, b: f64, t: f64, mu: f64, params: &DsbsParams) -> f64 {
    let partner = match family {
        Family::PhiQ => b,
        Family::PsiQ => 1.0 - b,
    };
    dd2_value(a, partner, params) - mu * t
}

fn inner_extremum(family: Family, s: f64, qp: &QParam, params: &DsbsParams) -> Extremum {
    let a = d2_inv_clamped(s);
    let mu = qp.mu;
    let sense = match family {
        Family::PhiQ => Sense::Min,
        Family::PsiQ => Sense::Max,
    };
    let axis = inner_axis();
    let n = axis.len();
    let step = 1.0 / (n - 1) as f64;
    let values: Vec<f64> = axis
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let t = if j == n - 1 { 1.0 } else { j as f64 * step };
            inner_objective(family, a, b, t, mu, params)
        })
        .collect();
    let j = best_index(&values, sense);
    let seed = Extremum {
        arg: if j == n - 1 { 1.0 } else { j as f64 * step },
        value: values[j],
    };
    // refine in b, which decreases as t increases
    let b_lo = axis[(j + 1).min(n - 1)];
    let b_hi = axis[j.saturating_sub(1)];
    if b_hi <= b_lo {
        return seed;
    }
    let refined = golden(b_lo, b_hi, REFINE_WIDTH, sense, |b| {
        inner_objective(family, a, b, d2(b), mu, params)
    });
    if sense.better(refined.value, seed.value) {
        Extremum {
            arg: d2(refined.arg),
            value: refined.value,
        }
    } else {
        seed
    }
}

/// `min_t phi(s, t) - t / q` with its minimizing `t`.
pub fn phi_q(s: f64, qp: &QParam, params: &DsbsParams) -> Extremum {
    inner_extremum(Family::PhiQ, s.clamp(0.0, 1.0), qp, params)
}

/// `max_t psi(s, t) - t / q` with its maximizing `t`.
pub fn psi_q(s: f64, qp: &QParam, params: &DsbsParams) -> Extremum {
    inner_extremum(Family::PsiQ, s.clamp(0.0, 1.0), qp, params)
}

pub fn family_value(family: Family, s: f64, qp: &QParam, params: &DsbsParams) -> Extremum {
    match family {
        Family::PhiQ => phi_q(s, qp, params),
        Family::PsiQ => psi_q(s, qp, params),
    }
}

fn check_oracle_n(n: usize) -> Result<()> {
    if n < 101 {
        return Err(Error::Domain {
            what: "oracle grid size",
            value: n as f64,
            domain: "n >= 101",
        });
    }
    Ok(())
}

fn extremum_over_block(
    s_axis: &[f64],
    t_axis: &[f64],
    sense: Sense,
    f: impl Fn(f64, f64) -> f64 + Sync,
) -> f64 {
    let start = match sense {
        Sense::Min => f64::INFINITY,
        Sense::Max => f64::NEG_INFINITY,
    };
    let rows: Vec<f64> = s_axis
        .par_iter()
        .map(|&a| {
            t_axis.iter().fold(start, |acc, &b| {
                let v = f(a, b);
                if sense.better(v, acc) {
                    v
                } else {
                    acc
                }
            })
        })
        .collect();
    rows.into_iter()
        .fold(start, |acc, v| if sense.better(v, acc) { v } else { acc })
}

/// Minimum of `phi` over the `n x n` lattice on `[alpha, 1] x [beta, 1]`.
pub fn phi_tilde_oracle(alpha: f64, beta: f64, params: &DsbsParams, n: usize) -> Result<f64> {
    check_oracle_n(n)?;
    let sa: Vec<f64> = linspace(alpha.clamp(0.0, 1.0), 1.0, n)
        .into_iter()
        .map(d2_inv_clamped)
        .collect();
    let tb: Vec<f64> = linspace(beta.clamp(0.0, 1.0), 1.0, n)
        .into_iter()
        .map(d2_inv_clamped)
        .collect();
    Ok(extremum_over_block(&sa, &tb, Sense::Min, |a, b| {
        dd2_value(a, b, params)
    }))
}

/// Maximum of `psi` over the `n x n` lattice on `[0, alpha] x [0, beta]`.
pub fn psi_tilde_oracle(alpha: f64, beta: f64, params: &DsbsParams, n: usize) -> Result<f64> {
    check_oracle_n(n)?;
    let sa: Vec<f64> = linspace(0.0, alpha.clamp(0.0, 1.0), n)
        .into_iter()
        .map(d2_inv_clamped)
        .collect();
    let tb: Vec<f64> = linspace(0.0, beta.clamp(0.0, 1.0), n)
        .into_iter()
        .map(d2_inv_clamped)
        .collect();
    Ok(extremum_over_block(&sa, &tb, Sense::Max, |a, b| {
        dd2_value(a, 1.0 - b, params)
    }))
}

fn family_for_tilde(qp: &QParam) -> Result<(Family, Sense)> {
    let q = qp.q;
    if q >= 1.0 {
        Ok((Family::PhiQ, Sense::Min))
    } else if q < 0.0 {
        Ok((Family::PhiQ, Sense::Max))
    } else if q > 0.0 && q < 1.0 {
        Ok((Family::PsiQ, Sense::Max))
    } else {
        Err(Error::Domain {
            what: "q",
            value: q,
            domain: "q != 0",
        })
    }
}

fn one_d_envelope(alpha: f64, qp: &QParam, params: &DsbsParams) -> Result<f64> {
    let (family, sense) = family_for_tilde(qp)?;
    let alpha = alpha.clamp(0.0, 1.0);
    let grid = match sense {
        Sense::Min => linspace(alpha, 1.0, INNER_GRID),
        Sense::Max => linspace(0.0, alpha, INNER_GRID),
    };
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&s| family_value(family, s, qp, params).value)
        .collect();
    Ok(vals[best_index(&vals, sense)])
}

/// `min_{s >= alpha} phi_q(s)` over a 2001-point grid; requires `q >= 1`.
pub fn phi_q_tilde(alpha: f64, qp: &QParam, params: &DsbsParams) -> Result<f64> {
    if !(qp.q >= 1.0) {
        return Err(Error::Domain {
            what: "q",
            value: qp.q,
            domain: "[1, inf] for the lower envelope",
        });
    }
    one_d_envelope(alpha, qp, params)
}

/// `max_{s <= alpha}` of `phi_q` (for `q < 0`) or of `psi_q` (for `0 < q < 1`)
/// over a 2001-point grid.
pub fn psi_q_tilde(alpha: f64, qp: &QParam, params: &DsbsParams) -> Result<f64> {
    if qp.q >= 1.0 || qp.q == 0.0 || qp.q.is_nan() {
        return Err(Error::Domain {
            what: "q",
            value: qp.q,
            domain: "q < 0 or 0 < q < 1 for the upper envelope",
        });
    }
    one_d_envelope(alpha, qp, params)
}

/// Surfaces that can be tabulated on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Phi,
    PhiTilde,
    Psi,
}

/// Samples of `surface` at `(i, j) / (n - 1)`, row-major in the first
/// coordinate.
pub fn tabulate(surface: Surface, params: &DsbsParams, n: usize) -> Vec<f64> {
    let axis = inverse_axis(n);
    let coords = linspace(0.0, 1.0, n);
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let axis = &axis;
            let coords = &coords;
            (0..n).map(move |j| {
                let (a, b) = (axis[i], axis[j]);
                match surface {
                    Surface::Phi => dd2_value(a, b, params),
                    Surface::Psi => dd2_value(a, 1.0 - b, params),
                    Surface::PhiTilde => phi_tilde_ab(coords[i], coords[j], a, b, params),
                }
            })
        })
        .collect()
}

/// `family` evaluated at `i / (n - 1)`.
pub fn tabulate_family(
    family: Family,
    qp: &QParam,
    params: &DsbsParams,
    n: usize,
) -> Vec<Extremum> {
    linspace(0.0, 1.0, n)
        .into_par_iter()
        .map(|s| family_value(family, s, qp, params))
        .collect()
}

fn lattice_stride(n_fine: usize, n_test: usize) -> Result<usize> {
    if n_test < 2 || n_fine < n_test || !(n_fine - 1).is_multiple_of(n_test - 1) {
        return Err(Error::Domain {
            what: "lattice sizes",
            value: n_fine as f64,
            domain: "(n_fine - 1) divisible by (n_test - 1)",
        });
    }
    Ok((n_fine - 1) / (n_test - 1))
}

/// Running extremum over the quadrant `{(k, l): k >= i, l >= j}` (for
/// `Sense::Min`) or `{k <= i, l <= j}` (for `Sense::Max`), in place.
fn quadrant_scan(values: &mut [f64], n: usize, sense: Sense) {
    let pick = |x: f64, y: f64| if sense.better(y, x) { y } else { x };
    match sense {
        Sense::Min => {
            for i in (0..n).rev() {
                for j in (0..n).rev() {
                    let mut v = values[i * n + j];
                    if j + 1 < n {
                        v = pick(v, values[i * n + j + 1]);
                    }
                    if i + 1 < n {
                        v = pick(v, values[(i + 1) * n + j]);
                    }
                    values[i * n + j] = v;
                }
            }
        }
        Sense::Max => {
            for i in 0..n {
                for j in 0..n {
                    let mut v = values[i * n + j];
                    if j > 0 {
                        v = pick(v, values[i * n + j - 1]);
                    }
                    if i > 0 {
                        v = pick(v, values[(i - 1) * n + j]);
                    }
                    values[i * n + j] = v;
                }
            }
        }
    }
}

fn subsample(values: &[f64], n_fine: usize, n_test: usize, stride: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_test * n_test);
    for i in 0..n_test {
        for j in 0..n_test {
            out.push(values[i * stride * n_fine + j * stride]);
        }
    }
    out
}

/// The grid oracle for the lower increasing envelope of `phi`, evaluated at
/// the `n_test x n_test` lattice using a shared `n_fine` grid.
pub fn phi_tilde_lattice(params: &DsbsParams, n_fine: usize, n_test: usize) -> Result<Vec<f64>> {
    let stride = lattice_stride(n_fine, n_test)?;
    let mut vals = tabulate(Surface::Phi, params, n_fine);
    quadrant_scan(&mut vals, n_fine, Sense::Min);
    Ok(subsample(&vals, n_fine, n_test, stride))
}

/// As [`phi_tilde_lattice`] for the upper increasing envelope of `psi`.
pub fn psi_tilde_lattice(params: &DsbsParams, n_fine: usize, n_test: usize) -> Result<Vec<f64>> {
    let stride = lattice_stride(n_fine, n_test)?;
    let mut vals = tabulate(Surface::Psi, params, n_fine);
    quadrant_scan(&mut vals, n_fine, Sense::Max);
    Ok(subsample(&vals, n_fine, n_test, stride))
}

/// One-dimensional increasing envelope of the `q` family on a shared grid,
/// sampled at `n_test` points. The case split follows [`phi_q_tilde`] and
/// [`psi_q_tilde`].
pub fn q_tilde_lattice(
    qp: &QParam,
    params: &DsbsParams,
    n_fine: usize,
    n_test: usize,
) -> Result<Vec<f64>> {
    let stride = lattice_stride(n_fine, n_test)?;
    let (family, sense) = family_for_tilde(qp)?;
    let mut vals: Vec<f64> = tabulate_family(family, qp, params, n_fine)
        .into_iter()
        .map(|e| e.value)
        .collect();
    let pick = |x: f64, y: f64| if sense.better(y, x) { y } else { x };
    match sense {
        Sense::Min => {
            for i in (0..n_fine - 1).rev() {
                vals[i] = pick(vals[i], vals[i + 1]);
            }
        }
        Sense::Max => {
            for i in 1..n_fine {
                vals[i] = pick(vals[i], vals[i - 1]);
            }
        }
    }
    Ok((0..n_test).map(|i| vals[i * stride]).collect())
}
