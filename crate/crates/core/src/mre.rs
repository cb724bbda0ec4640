//! The minimum relative entropy `DD2(a, b)` over couplings of the binary
//! marginals `a = P[X=1]`, `b = P[Y=1]`, its closed-form minimizer, and a
//! brute-force oracle that does not use the closed form.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::binary::{d2, kl_joint, Coupling2x2, DsbsParams, PROB_SLACK};
use crate::error::{check_unit, Error, Result};
use crate::search::{golden_by, linspace, Extremum};

/// Minimum relative entropy at a marginal pair together with its minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MreResult {
    pub value: f64,
    pub p_star: f64,
    pub coupling: Coupling2x2,
}

/// A point `(D2(a), D2(b), DD2(a, b))` of the minimum-relative-entropy region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Feasible range of `q11` for marginals `(a, b)`.
pub fn feasible_interval(a: f64, b: f64) -> (f64, f64) {
    ((a + b - 1.0).max(0.0), a.min(b))
}

/// Relative entropy in bits of the coupling `[[1+p-a-b, b-p], [a-p, p]]`.
pub fn d2ab(a: f64, b: f64, p: f64, params: &DsbsParams) -> Result<f64> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    let (lower, upper) = feasible_interval(a, b);
    if !(p >= lower - PROB_SLACK && p <= upper + PROB_SLACK) {
        return Err(Error::Infeasible { p, lower, upper });
    }
    let p = p.clamp(lower, upper);
    Ok(kl_joint(&Coupling2x2::with_marginals_unchecked(a, b, p), params))
}

/// Closed-form minimizer of `p -> d2ab(a, b, p)`: the smaller root of
/// `(k-1) p^2 - ((k-1)(a+b) + 1) p + k a b = 0`, in the rationalized form
/// `2kab / (B + sqrt(Delta))` with `B = (k-1)(a+b) + 1`.
pub fn p_star(a: f64, b: f64, params: &DsbsParams) -> Result<f64> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    p_star_unchecked(a, b, params)
}

fn p_star_unchecked(a: f64, b: f64, params: &DsbsParams) -> Result<f64> {
    let m = params.k_minus_1();
    let k = params.k();
    let big_b = m * (a + b) + 1.0;
    // Delta = B^2 - 4k(k-1)ab expanded into a sum of nonnegative terms
    let diff = a - b;
    let delta = m * m * diff * diff + 2.0 * m * (a + b - 2.0 * a * b) + 1.0;
    if delta < -1e-12 {
        return Err(Error::Invariant(format!(
            "negative discriminant {delta} at (a, b) = ({a}, {b})"
        )));
    }
    let p = 2.0 * k * a * b / (big_b + delta.max(0.0).sqrt());
    let (lower, upper) = feasible_interval(a, b);
    Ok(p.clamp(lower, upper))
}

#[inline]
fn is_corner(a: f64, b: f64) -> bool {
    a == 0.0 || a == 1.0 || b == 0.0 || b == 1.0
}

/// `DD2(a, b)` with its minimizing coupling.
pub fn dd2(a: f64, b: f64, params: &DsbsParams) -> Result<MreResult> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    let p = if is_corner(a, b) {
        // the feasible interval is a single point
        feasible_interval(a, b).0
    } else {
        p_star_unchecked(a, b, params)?
    };
    let coupling = Coupling2x2::with_marginals_unchecked(a, b, p);
    Ok(MreResult {
        value: kl_joint(&coupling, params),
        p_star: p,
        coupling,
    })
}

/// Value of `DD2(a, b)` for `a, b` already in `[0, 1]` (clamped). This is the
/// hot path used by the envelope and grid routines.
#[inline]
pub fn dd2_value(a: f64, b: f64, params: &DsbsParams) -> f64 {
    let a = a.clamp(0.0, 1.0);
    let b = b.clamp(0.0, 1.0);
    let p = if is_corner(a, b) {
        feasible_interval(a, b).0
    } else {
        // the discriminant is a sum of nonnegative terms, so this cannot fail
        p_star_unchecked(a, b, params).unwrap_or(0.0)
    };
    kl_joint(&Coupling2x2::with_marginals_unchecked(a, b, p), params)
}

/// Change in `q ln(q / pc)` when `q` moves by `d`, in nats, without
/// evaluating either endpoint separately.
#[inline]
fn cell_delta(q: f64, d: f64, pc: f64) -> f64 {
    if q <= 0.0 {
        if d <= 0.0 {
            0.0
        } else {
            d * (d / pc).ln()
        }
    } else {
        let q2 = q + d;
        if q2 <= 0.0 {
            -(q * (q / pc).ln())
        } else {
            d * (q2 / pc).ln() + q * (d / q).ln_1p()
        }
    }
}

/// `d2ab(p1 + delta) - d2ab(p1)` in nats, accurate relative to `delta` so that
/// comparisons near the minimum are not swamped by rounding in the values.
fn d2ab_increment(a: f64, b: f64, p1: f64, delta: f64, params: &DsbsParams) -> f64 {
    let c = Coupling2x2::with_marginals_unchecked(a, b, p1);
    let pj = params.joint();
    cell_delta(c.q00, delta, pj[0])
        + cell_delta(c.q01, -delta, pj[1])
        + cell_delta(c.q10, -delta, pj[2])
        + cell_delta(c.q11, delta, pj[3])
}

/// Brute-force minimization of `d2ab` over `p`: an equispaced grid of
/// `grid_n` feasible values, then golden-section refinement of the best
/// bracket to width `1e-12`. Independent of the closed form.
pub fn dd2_oracle_argmin(a: f64, b: f64, params: &DsbsParams, grid_n: usize) -> Extremum {
    let grid_n = grid_n.max(100);
    let (lower, upper) = feasible_interval(a, b);
    if upper - lower <= 0.0 {
        return Extremum {
            arg: lower,
            value: d2ab(a, b, lower, params).unwrap_or(f64::NAN),
        };
    }
    let grid = linspace(lower, upper, grid_n);
    let mut best = 0;
    for i in 1..grid_n {
        if d2ab_increment(a, b, grid[best], grid[i] - grid[best], params) < 0.0 {
            best = i;
        }
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid_n - 1)];
    let prefer = |x: f64, y: f64| {
        let inc = d2ab_increment(a, b, x, y - x, params);
        if inc > 0.0 {
            Ordering::Less
        } else if inc < 0.0 {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    };
    let mut arg = golden_by(lo, hi, 1e-12, prefer);
    for cand in [lo, hi, grid[best]] {
        if prefer(cand, arg) == Ordering::Less {
            arg = cand;
        }
    }
    Extremum {
        arg,
        value: kl_joint(&Coupling2x2::with_marginals_unchecked(a, b, arg), params),
    }
}

/// Value of [`dd2_oracle_argmin`].
pub fn dd2_oracle(a: f64, b: f64, params: &DsbsParams, grid_n: usize) -> f64 {
    dd2_oracle_argmin(a, b, params, grid_n).value
}

/// `(D2(a), D2(b), DD2(a, b))` on the `n x n` lattice over `[0, 1]^2`, row-major
/// in `a`.
pub fn region_sample(params: &DsbsParams, n: usize) -> Vec<RegionPoint> {
    let n = n.max(2);
    let axis = linspace(0.0, 1.0, n);
    let div: Vec<f64> = axis.iter().map(|&a| d2(a)).collect();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let axis = &axis;
            let div = &div;
            (0..n).map(move |j| RegionPoint {
                x: div[i],
                y: div[j],
                z: dd2_value(axis[i], axis[j], params),
            })
        })
        .collect()
}
