//! Double discrete Legendre transforms. Independent of the hull code and
//! used to cross-check it.

use rayon::prelude::*;

use super::GridFn;
use crate::search::linspace;

fn conjugate_then_back(xs: &[f64], f: &[f64], slopes: &[f64]) -> Vec<f64> {
    let conj: Vec<f64> = slopes
        .iter()
        .map(|&s| {
            xs.iter()
                .zip(f)
                .map(|(&x, &v)| s * x - v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    xs.iter()
        .map(|&x| {
            slopes
                .iter()
                .zip(&conj)
                .map(|(&s, &c)| s * x - c)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Biconjugate of a 1-D sampled function over the exact slope set: every
/// chord slope between two samples. O(n^3) and exact up to rounding.
pub fn biconjugate_1d_exact(f: &GridFn) -> Vec<f64> {
    assert_eq!(f.dims(), 1, "one-dimensional samples expected");
    let n = f.n();
    let xs = linspace(0.0, 1.0, n);
    let v = f.values();
    let mut slopes = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            slopes.push((v[j] - v[i]) / (xs[j] - xs[i]));
        }
    }
    conjugate_then_back(&xs, v, &slopes)
}

/// Biconjugate of a 2-D sampled function over an `m x m` slope lattice on
/// `[-slope_max, slope_max]^2`. A lower bound on the convex envelope whose
/// error is at most the slope spacing when every subgradient of the envelope
/// lies inside the slope box.
pub fn biconjugate_2d(f: &GridFn, slope_max: f64, m: usize) -> Vec<f64> {
    assert_eq!(f.dims(), 2, "two-dimensional samples expected");
    let n = f.n();
    let axis = linspace(0.0, 1.0, n);
    let slope_axis = linspace(-slope_max, slope_max, m.max(2));
    let v = f.values();
    let pts: Vec<(f64, f64)> = (0..n * n).map(|k| (axis[k / n], axis[k % n])).collect();
    let slopes: Vec<(f64, f64)> = slope_axis
        .iter()
        .flat_map(|&a| slope_axis.iter().map(move |&b| (a, b)))
        .collect();
    let conj: Vec<f64> = slopes
        .par_iter()
        .map(|&(sa, sb)| {
            pts.iter()
                .zip(v)
                .map(|(&(x, y), &fv)| sa * x + sb * y - fv)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    pts.par_iter()
        .map(|&(x, y)| {
            slopes
                .iter()
                .zip(&conj)
                .map(|(&(sa, sb), &c)| sa * x + sb * y - c)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}
