//! Convex and concave envelopes of sampled functions on the uniform lattice
//! over `[0, 1]` or `[0, 1]^2`, and lattice certificates of convexity,
//! concavity, slope bounds and monotonicity.

mod certify;
mod hull1d;
mod hull3d;
mod legendre;

use serde::Serialize;

pub use certify::{
    check_midpoint_concave, check_midpoint_convex, check_monotone, check_slope_bounds,
    ConvexityReport, PairMode, SlopeSense, FULL_ENUMERATION_MAX_N,
};
pub use legendre::{biconjugate_1d_exact, biconjugate_2d};

use crate::error::{Error, Result};
use crate::search::linspace;

/// A function sampled on the uniform lattice with `n` points per axis.
/// Two-dimensional samples are row-major: `values[i * n + j]` is the value at
/// `(i, j) / (n - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFn {
    dims: usize,
    n: usize,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(dims: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if dims != 1 && dims != 2 {
            return Err(Error::Domain {
                what: "dims",
                value: dims as f64,
                domain: "{1, 2}",
            });
        }
        if n < 3 {
            return Err(Error::Domain {
                what: "n",
                value: n as f64,
                domain: "n >= 3",
            });
        }
        let expected = if dims == 1 { n } else { n * n };
        if values.len() != expected {
            return Err(Error::Invariant(format!(
                "expected {expected} samples, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                what: "sample",
                value: *bad,
                domain: "finite reals",
            });
        }
        Ok(GridFn { dims, n, values })
    }

    pub fn new_1d(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        GridFn::new(1, n, values)
    }

    pub fn new_2d(n: usize, values: Vec<f64>) -> Result<Self> {
        GridFn::new(2, n, values)
    }

    pub fn sample_1d(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFn::new_1d(linspace(0.0, 1.0, n.max(2)).into_iter().map(f).collect())
    }

    pub fn sample_2d(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let axis = linspace(0.0, 1.0, n.max(2));
        let mut values = Vec::with_capacity(n * n);
        for &x in &axis {
            for &y in &axis {
                values.push(f(x, y));
            }
        }
        GridFn::new_2d(n, values)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Lattice spacing `1 / (n - 1)`.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.n - 1) as f64
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn at2(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFn::new(self.dims, self.n, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn negate(&self) -> Self {
        GridFn {
            dims: self.dims,
            n: self.n,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Largest absolute pointwise difference; `inf` on a shape mismatch.
    pub fn max_abs_diff(&self, other: &GridFn) -> f64 {
        if self.dims != other.dims || self.n != other.n {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Pointwise-largest convex minorant of `f` on its lattice.
pub fn lower_convex_envelope(f: &GridFn) -> GridFn {
    let values = match f.dims {
        1 => hull1d::lower_envelope(&f.values),
        _ => hull3d::lower_envelope(f.n, &f.values),
    };
    GridFn {
        dims: f.dims,
        n: f.n,
        values,
    }
}

/// Pointwise-smallest concave majorant, as `-lower_convex_envelope(-f)`.
pub fn upper_concave_envelope(f: &GridFn) -> GridFn {
    lower_convex_envelope(&f.negate()).negate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(GridFn::new_1d(vec![0.0, 1.0]).is_err());
        assert!(GridFn::new_2d(3, vec![0.0; 8]).is_err());
        assert!(GridFn::new_1d(vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(GridFn::new(3, 3, vec![0.0; 27]).is_err());
        let g = GridFn::sample_2d(3, |x, y| x + 10.0 * y).unwrap();
        assert_eq!(g.at2(1, 2), 0.5 + 10.0);
        assert_eq!(g.spacing(), 0.5);
    }
}
