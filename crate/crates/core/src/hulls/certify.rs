//! Lattice certificates. Every check reports the worst violation and the
//! lattice points that attain it; ties go to the first pair in lattice order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::GridFn;

/// Largest `n` for which [`PairMode::Auto`] enumerates all midpoint pairs.
pub const FULL_ENUMERATION_MAX_N: usize = 201;
const AUTO_PAIRS: u64 = 10_000_000;
const AUTO_SEED: u64 = 0x5eed;

/// How midpoint pairs are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairMode {
    /// Full enumeration up to [`FULL_ENUMERATION_MAX_N`], sampling beyond.
    Auto,
    Full,
    Sampled { pairs: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub passed: bool,
    pub worst_violation: f64,
    /// Lattice multi-indices attaining the worst violation: the two endpoints
    /// and the midpoint for midpoint checks, the two neighbours for
    /// difference checks.
    pub witness: Vec<Vec<usize>>,
    pub checked: u64,
    pub tolerance: f64,
}

impl ConvexityReport {
    fn from_worst(worst: Worst, checked: u64, tolerance: f64) -> Self {
        ConvexityReport {
            passed: worst.value <= tolerance,
            worst_violation: worst.value,
            witness: worst.witness,
            checked,
            tolerance,
        }
    }
}

#[derive(Debug, Clone)]
struct Worst {
    value: f64,
    witness: Vec<Vec<usize>>,
}

impl Worst {
    fn none() -> Self {
        Worst {
            value: f64::NEG_INFINITY,
            witness: Vec::new(),
        }
    }

    /// Later candidates replace the current one only when strictly worse.
    fn merge(self, other: Worst) -> Worst {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

fn multi(f: &GridFn, k: usize) -> Vec<usize> {
    if f.dims() == 1 {
        vec![k]
    } else {
        vec![k / f.n(), k % f.n()]
    }
}

/// `sign * (f(mid) - (f(x) + f(y)) / 2)`: positive values violate convexity
/// for `sign = 1` and concavity for `sign = -1`.
fn midpoint_scan(f: &GridFn, sign: f64, mode: PairMode) -> (Worst, u64) {
    let n = f.n();
    let mode = match mode {
        PairMode::Auto if n <= FULL_ENUMERATION_MAX_N => PairMode::Full,
        PairMode::Auto => PairMode::Sampled {
            pairs: AUTO_PAIRS,
            seed: AUTO_SEED,
        },
        m => m,
    };
    let v = f.values();
    let viol = |x: usize, y: usize, m: usize| sign * (v[m] - 0.5 * (v[x] + v[y]));
    match (mode, f.dims()) {
        (PairMode::Full, 1) => {
            let mut best = (f64::NEG_INFINITY, 0, 0);
            let mut count = 0u64;
            for i in 0..n {
                for k in (i + 2..n).step_by(2) {
                    let d = viol(i, k, (i + k) / 2);
                    count += 1;
                    if d > best.0 {
                        best = (d, i, k);
                    }
                }
            }
            let (d, i, k) = best;
            (
                Worst {
                    value: d,
                    witness: vec![vec![i], vec![k], vec![(i + k) / 2]],
                },
                count,
            )
        }
        (PairMode::Full, _) => {
            let rows: Vec<(f64, usize, usize, u64)> = (0..n * n)
                .into_par_iter()
                .map(|a| {
                    let (i, j) = (a / n, a % n);
                    let mut best = (f64::NEG_INFINITY, a, a, 0u64);
                    let mut count = 0u64;
                    for k in (i..n).step_by(2) {
                        let l0 = if k == i { j + 2 } else { j & 1 };
                        let mi = (i + k) / 2;
                        for l in (l0..n).step_by(2) {
                            let b = k * n + l;
                            let m = mi * n + (j + l) / 2;
                            let d = viol(a, b, m);
                            count += 1;
                            if d > best.0 {
                                best = (d, a, b, 0);
                            }
                        }
                    }
                    best.3 = count;
                    best
                })
                .collect();
            let mut worst = (f64::NEG_INFINITY, 0, 0);
            let mut total = 0u64;
            for (d, a, b, c) in rows {
                total += c;
                if d > worst.0 {
                    worst = (d, a, b);
                }
            }
            let (d, a, b) = worst;
            let (i, j, k, l) = (a / n, a % n, b / n, b % n);
            (
                Worst {
                    value: d,
                    witness: vec![vec![i, j], vec![k, l], vec![(i + k) / 2, (j + l) / 2]],
                },
                total,
            )
        }
        (PairMode::Sampled { pairs, seed }, dims) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = Worst::none();
            let mut count = 0u64;
            // a random lattice coordinate with the same parity as `c`
            let partner = |rng: &mut ChaCha8Rng, c: usize| {
                let par = c & 1;
                par + 2 * rng.gen_range(0..(n - par).div_ceil(2))
            };
            for _ in 0..pairs {
                let (x, y, m) = if dims == 1 {
                    let i = rng.gen_range(0..n);
                    let k = partner(&mut rng, i);
                    (i, k, (i + k) / 2)
                } else {
                    let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    let (k, l) = (partner(&mut rng, i), partner(&mut rng, j));
                    (i * n + j, k * n + l, ((i + k) / 2) * n + (j + l) / 2)
                };
                if x == y {
                    continue;
                }
                count += 1;
                let d = viol(x, y, m);
                if d > worst.value {
                    worst = Worst {
                        value: d,
                        witness: vec![multi(f, x), multi(f, y), multi(f, m)],
                    };
                }
            }
            (worst, count)
        }
        (PairMode::Auto, _) => unreachable!("auto mode is resolved above"),
    }
}

/// Midpoint convexity on the lattice: `f(mid) <= (f(x) + f(y)) / 2 + tol` for
/// every pair whose midpoint is a lattice point.
pub fn check_midpoint_convex(f: &GridFn, tol: f64, mode: PairMode) -> ConvexityReport {
    let (worst, count) = midpoint_scan(f, 1.0, mode);
    ConvexityReport::from_worst(worst, count, tol)
}

/// Midpoint concavity: `f(mid) >= (f(x) + f(y)) / 2 - tol`.
pub fn check_midpoint_concave(f: &GridFn, tol: f64, mode: PairMode) -> ConvexityReport {
    let (worst, count) = midpoint_scan(f, -1.0, mode);
    ConvexityReport::from_worst(worst, count, tol)
}

/// Direction of a slope bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlopeSense {
    AtMost,
    AtLeast,
}

/// Visits forward differences along `axis` as `(from, to, difference)`.
fn forward_differences(f: &GridFn, axis: usize, mut visit: impl FnMut(usize, usize, f64)) {
    let n = f.n();
    let v = f.values();
    if f.dims() == 1 {
        for i in 0..n - 1 {
            visit(i, i + 1, v[i + 1] - v[i]);
        }
        return;
    }
    for i in 0..n {
        for j in 0..n {
            let (a, b) = match axis {
                0 if i + 1 < n => (i * n + j, (i + 1) * n + j),
                1 if j + 1 < n => (i * n + j, i * n + j + 1),
                _ => continue,
            };
            visit(a, b, v[b] - v[a]);
        }
    }
}

/// Forward difference quotients along `axis` (0 or 1) compared with `bound`.
pub fn check_slope_bounds(
    f: &GridFn,
    axis: usize,
    bound: f64,
    sense: SlopeSense,
    tol: f64,
) -> ConvexityReport {
    assert!(axis < f.dims(), "axis {axis} out of range");
    let inv_h = (f.n() - 1) as f64;
    let mut worst = Worst::none();
    let mut count = 0;
    forward_differences(f, axis, |a, b, d| {
        let quotient = d * inv_h;
        let viol = match sense {
            SlopeSense::AtMost => quotient - bound,
            SlopeSense::AtLeast => bound - quotient,
        };
        count += 1;
        if viol > worst.value {
            worst = Worst {
                value: viol,
                witness: vec![multi(f, a), multi(f, b)],
            };
        }
    });
    ConvexityReport::from_worst(worst, count, tol)
}

/// Nondecreasing along every axis: forward differences `>= -tol`.
pub fn check_monotone(f: &GridFn, tol: f64) -> ConvexityReport {
    let mut worst = Worst::none();
    let mut count = 0;
    for axis in 0..f.dims() {
        let mut local = Worst::none();
        forward_differences(f, axis, |a, b, d| {
            count += 1;
            if -d > local.value {
                local = Worst {
                    value: -d,
                    witness: vec![multi(f, a), multi(f, b)],
                };
            }
        });
        worst = worst.merge(local);
    }
    ConvexityReport::from_worst(worst, count, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_convex_not_concave() {
        let f = GridFn::sample_1d(21, |x| x * x).unwrap();
        assert!(check_midpoint_convex(&f, 1e-12, PairMode::Full).passed);
        let r = check_midpoint_concave(&f, 1e-12, PairMode::Full);
        assert!(!r.passed);
        // widest pair
        assert_eq!(r.witness, vec![vec![0], vec![20], vec![10]]);
        assert!((r.worst_violation - 0.25).abs() < 1e-12);
    }

    #[test]
    fn full_pair_count_2d() {
        let f = GridFn::sample_2d(5, |x, y| x * x + y * y).unwrap();
        let r = check_midpoint_convex(&f, 1e-12, PairMode::Full);
        assert!(r.passed);
        // each parity class of sizes 3x3, 3x2, 2x3, 2x2 contributes C(size, 2)
        assert_eq!(r.checked, 36 + 15 + 15 + 6);
    }

    #[test]
    fn sampled_matches_full_on_dent() {
        let mut vals = GridFn::sample_2d(9, |x, y| x * x + y * y).unwrap().into_values();
        vals[4 * 9 + 4] += 0.5;
        let f = GridFn::new_2d(9, vals).unwrap();
        let full = check_midpoint_convex(&f, 1e-9, PairMode::Full);
        assert!(!full.passed);
        assert_eq!(full.witness[2], vec![4, 4]);
        let sampled = check_midpoint_convex(&f, 1e-9, PairMode::Sampled { pairs: 20_000, seed: 1 });
        assert!(!sampled.passed);
        assert_eq!(sampled.witness[2], vec![4, 4]);
        let again = check_midpoint_convex(&f, 1e-9, PairMode::Sampled { pairs: 20_000, seed: 1 });
        assert_eq!(sampled, again);
    }

    #[test]
    fn slopes_and_monotone() {
        let plane = GridFn::sample_2d(11, |x, y| x + y).unwrap();
        for axis in 0..2 {
            for sense in [SlopeSense::AtMost, SlopeSense::AtLeast] {
                let r = check_slope_bounds(&plane, axis, 1.0, sense, 1e-12);
                assert!(r.passed, "{axis} {sense:?} {}", r.worst_violation);
            }
        }
        assert!(check_monotone(&GridFn::sample_1d(5, |_| 2.0).unwrap(), 0.0).passed);
        let dec = check_monotone(&GridFn::sample_1d(5, |x| -x).unwrap(), 1e-12);
        assert!(!dec.passed);
        assert_eq!(dec.witness, vec![vec![0], vec![1]]);
    }
}
