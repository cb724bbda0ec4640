//! One-dimensional search primitives shared by the optimizers: bisection on a
//! sign change, golden-section search, and grid-seeded extremum search.

use std::cmp::Ordering;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Whether a search minimizes or maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    /// True when `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }
}

/// Location and value of a one-dimensional extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
}

/// Bisection for a root of `f` on `[lo, hi]` given `f(lo)` and `f(hi)` of
/// opposite sign. Runs to ulp resolution.
pub fn bisect_root(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search on `[lo, hi]` driven by a comparator. `prefer(x, y)`
/// returns `Ordering::Less` when `x` is strictly better than `y`. Stops when
/// the bracket is narrower than `width`. Returns the bracket midpoint.
pub fn golden_by(
    mut lo: f64,
    mut hi: f64,
    width: f64,
    mut prefer: impl FnMut(f64, f64) -> Ordering,
) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    for _ in 0..400 {
        if hi - lo <= width {
            break;
        }
        if prefer(x1, x2) != Ordering::Greater {
            // keep [lo, x2]
            hi = x2;
            x2 = x1;
            x1 = hi - INV_PHI * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + INV_PHI * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for an extremum of `f` on `[lo, hi]`. The bracket
/// endpoints are also evaluated so boundary extrema are returned exactly.
pub fn golden(lo: f64, hi: f64, width: f64, sense: Sense, f: impl Fn(f64) -> f64) -> Extremum {
    let arg = golden_by(lo, hi, width, |x, y| {
        let (fx, fy) = (f(x), f(y));
        if sense.better(fx, fy) {
            Ordering::Less
        } else if sense.better(fy, fx) {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    let mut best = Extremum { arg: lo, value: f(lo) };
    for x in [arg, hi] {
        let v = f(x);
        if sense.better(v, best.value) {
            best = Extremum { arg: x, value: v };
        }
    }
    best
}

/// Index of the best value; ties resolve to the smallest index.
pub fn best_index(values: &[f64], sense: Sense) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if sense.better(v, values[best]) {
            best = i;
        }
    }
    best
}

/// Extremum of `f` over `grid` (sorted ascending), refined by golden-section
/// in the bracket formed by the neighbours of the best grid point. `grid_values`
/// are `f` at the grid points, supplied by the caller so that grids can be
/// evaluated with cached inputs.
pub fn refine_on_grid(
    grid: &[f64],
    grid_values: &[f64],
    width: f64,
    sense: Sense,
    f: impl Fn(f64) -> f64,
) -> Extremum {
    debug_assert_eq!(grid.len(), grid_values.len());
    let i = best_index(grid_values, sense);
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let seed = Extremum {
        arg: grid[i],
        value: grid_values[i],
    };
    if hi <= lo {
        return seed;
    }
    let refined = golden(lo, hi, width, sense, f);
    if sense.better(refined.value, seed.value) {
        refined
    } else {
        seed
    }
}

/// `n` equispaced points on `[lo, hi]`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect_root(0.0, 2.0, |x| x * x - 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn golden_interior_and_boundary() {
        let e = golden(0.0, 1.0, 1e-12, Sense::Min, |x| (x - 0.3).powi(2));
        assert!((e.arg - 0.3).abs() < 1e-7);
        // boundary minimum with infinite slope is returned exactly
        let e = golden(0.0, 1.0, 1e-12, Sense::Min, |x| x.sqrt());
        assert_eq!(e.arg, 0.0);
        assert_eq!(e.value, 0.0);
        let e = golden(0.0, 1.0, 1e-12, Sense::Max, |x| x.sqrt());
        assert_eq!(e.arg, 1.0);
    }

    #[test]
    fn ties_take_smallest_index() {
        assert_eq!(best_index(&[3.0, 1.0, 1.0, 2.0], Sense::Min), 1);
        assert_eq!(best_index(&[3.0, 3.0, 1.0], Sense::Max), 0);
    }

    #[test]
    fn grid_refinement() {
        let grid = linspace(0.0, 1.0, 11);
        let f = |x: f64| -(x - 0.537).powi(2);
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let e = refine_on_grid(&grid, &vals, 1e-12, Sense::Max, f);
        assert!((e.arg - 0.537).abs() < 1e-7);
        assert!(e.value.abs() < 1e-14);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.2, 1.0, 7);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[6], 1.0);
    }
}
