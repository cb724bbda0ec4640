//! Binary entropy, its inverse, binary convolution and relative entropy for
//! binary and 2x2 distributions. All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Slack allowed on probabilities for accumulated rounding.
pub const PROB_SLACK: f64 = 1e-12;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Prob(f64);

impl Prob {
    /// Values within [`PROB_SLACK`] of the unit interval are clamped onto it.
    pub fn new(value: f64) -> Result<Self> {
        if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&value) {
            return Err(Error::Domain {
                what: "probability",
                value,
                domain: "[0, 1]",
            });
        }
        Ok(Prob(value.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Prob(1.0 - self.0)
    }
}

impl From<Prob> for f64 {
    fn from(p: Prob) -> f64 {
        p.0
    }
}

/// Distribution on `{0, 1}` given by its mass on 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryDist {
    p1: Prob,
}

impl BinaryDist {
    pub fn new(p1: Prob) -> Self {
        BinaryDist { p1 }
    }

    pub fn uniform() -> Self {
        BinaryDist { p1: Prob(0.5) }
    }

    pub fn p1(&self) -> f64 {
        self.p1.0
    }

    pub fn p0(&self) -> f64 {
        1.0 - self.p1.0
    }
}

/// Joint distribution on `{0, 1}^2`, indexed `q[x][y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling2x2 {
    pub q00: f64,
    pub q01: f64,
    pub q10: f64,
    pub q11: f64,
}

impl Coupling2x2 {
    pub fn new(q00: f64, q01: f64, q10: f64, q11: f64) -> Result<Self> {
        for (what, v) in [("q00", q00), ("q01", q01), ("q10", q10), ("q11", q11)] {
            if v.is_nan() || v < -PROB_SLACK {
                return Err(Error::Domain {
                    what,
                    value: v,
                    domain: "[0, 1]",
                });
            }
        }
        let sum = q00 + q01 + q10 + q11;
        if (sum - 1.0).abs() > PROB_SLACK {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Coupling2x2 {
            q00: q00.max(0.0),
            q01: q01.max(0.0),
            q10: q10.max(0.0),
            q11: q11.max(0.0),
        })
    }

    /// Normalizes four nonnegative weights.
    pub fn from_weights(w00: f64, w01: f64, w10: f64, w11: f64) -> Result<Self> {
        let total = w00 + w01 + w10 + w11;
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Invariant(format!(
                "coupling weights must have a positive finite sum, got {total}"
            )));
        }
        Coupling2x2::new(w00 / total, w01 / total, w10 / total, w11 / total)
    }

    /// The coupling with marginals `(a, b)` and `q11 = p`.
    pub(crate) fn with_marginals_unchecked(a: f64, b: f64, p: f64) -> Self {
        Coupling2x2 {
            q00: ((1.0 - a - b) + p).max(0.0),
            q01: (b - p).max(0.0),
            q10: (a - p).max(0.0),
            q11: p.max(0.0),
        }
    }

    pub fn cells(&self) -> [f64; 4] {
        [self.q00, self.q01, self.q10, self.q11]
    }

    /// Mass of `X = 1`.
    pub fn marginal_x1(&self) -> f64 {
        self.q10 + self.q11
    }

    /// Mass of `Y = 1`.
    pub fn marginal_y1(&self) -> f64 {
        self.q01 + self.q11
    }

    pub fn transpose(&self) -> Self {
        Coupling2x2 {
            q00: self.q00,
            q01: self.q10,
            q10: self.q01,
            q11: self.q11,
        }
    }
}

/// The doubly symmetric binary source with correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DsbsParams {
    rho: f64,
    k: f64,
    k_minus_1: f64,
    theta: f64,
}

impl DsbsParams {
    pub const MIN_RHO: f64 = 1e-6;

    pub fn new(rho: f64) -> Result<Self> {
        if !(Self::MIN_RHO..1.0).contains(&rho) {
            return Err(Error::Domain {
                what: "rho",
                value: rho,
                domain: "[1e-6, 1)",
            });
        }
        let ratio = (1.0 + rho) / (1.0 - rho);
        let om = 1.0 - rho;
        Ok(DsbsParams {
            rho,
            k: ratio * ratio,
            // k - 1 = 4 rho / (1 - rho)^2, free of cancellation for small rho.
            k_minus_1: 4.0 * rho / (om * om),
            theta: om / (1.0 + rho),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_minus_1(&self) -> f64 {
        self.k_minus_1
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Crossover probability of the channel from X to Y.
    pub fn crossover(&self) -> f64 {
        (1.0 - self.rho) / 2.0
    }

    /// `P_XY(x, y)` as `[p00, p01, p10, p11]`.
    pub fn joint(&self) -> [f64; 4] {
        let same = (1.0 + self.rho) / 4.0;
        let diff = (1.0 - self.rho) / 4.0;
        [same, diff, diff, same]
    }

    pub fn joint_coupling(&self) -> Coupling2x2 {
        let [q00, q01, q10, q11] = self.joint();
        Coupling2x2 { q00, q01, q10, q11 }
    }
}

#[inline]
fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Binary entropy in bits. The argument is clamped onto `[0, 1]`.
pub fn h2(a: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    let lo = a.min(1.0 - a);
    if lo <= 0.0 {
        return 0.0;
    }
    // -lo ln lo - (1 - lo) ln(1 - lo), with ln_1p for the larger mass
    (-xlogx(lo) - (1.0 - lo) * (-lo).ln_1p()) / LN2
}

/// `1 - h2(a)`, the relative entropy from `(a, 1 - a)` to the uniform
/// distribution, evaluated without cancellation near `a = 1/2`.
pub fn d2(a: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    let lo = a.min(1.0 - a);
    let nats = if lo < 0.25 {
        // lo ln(2 lo) + (1 - lo) ln(2 (1 - lo))
        let small = if lo <= 0.0 { 0.0 } else { lo * (2.0 * lo).ln() };
        small + (1.0 - lo) * (LN2 + (-lo).ln_1p())
    } else {
        // lo = 1/2 - x exactly (Sterbenz)
        let x = 0.5 - lo;
        (0.5 - x) * (-2.0 * x).ln_1p() + (0.5 + x) * (2.0 * x).ln_1p()
    };
    (nats / LN2).max(0.0)
}

/// Bisection on `[lo, hi]` for an increasing predicate boundary: returns the
/// point where `below(x)` switches from true to false, to ulp resolution.
fn bisect_switch(mut lo: f64, mut hi: f64, below: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..1100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse of `h2` restricted to `[0, 1/2]`.
pub fn h2_inv(y: f64) -> Result<f64> {
    let y = check_unit("entropy", y)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    Ok(bisect_switch(0.0, 0.5, |a| h2(a) < y))
}

/// Inverse of `d2` restricted to `[0, 1/2]`; equals `h2_inv(1 - s)`.
pub fn d2_inv(s: f64) -> Result<f64> {
    let s = check_unit("divergence", s)?;
    Ok(d2_inv_clamped(s))
}

/// `d2_inv` for arguments already known to lie in `[0, 1]` (clamped).
pub(crate) fn d2_inv_clamped(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    if s == 0.0 {
        return 0.5;
    }
    if s == 1.0 {
        return 0.0;
    }
    // d2 is decreasing on [0, 1/2]
    bisect_switch(0.0, 0.5, |a| d2(a) > s)
}

/// Binary convolution `x * y = x (1 - y) + y (1 - x)`.
pub fn bconv(x: f64, y: f64) -> f64 {
    x + y - 2.0 * x * y
}

/// Binary deconvolution: the `x` solving `x * y = z`.
pub fn bdeconv(z: f64, y: f64) -> Result<f64> {
    let denom = 1.0 - 2.0 * y;
    if denom.abs() < 1e-15 {
        return Err(Error::Singularity { y });
    }
    Ok((z - y) / denom)
}

/// Relative entropy `D(q || p)` in bits; `+inf` when `q` is not absolutely
/// continuous with respect to `p`.
pub fn kl_binary(q: &BinaryDist, p: &BinaryDist) -> f64 {
    kl_binary_strict(q, p).unwrap_or(f64::INFINITY)
}

/// As [`kl_binary`] but reports a support violation as an error.
pub fn kl_binary_strict(q: &BinaryDist, p: &BinaryDist) -> Result<f64> {
    let mut total = 0.0;
    for (qm, pm) in [(q.p0(), p.p0()), (q.p1(), p.p1())] {
        if qm <= 0.0 {
            continue;
        }
        if pm <= 0.0 {
            return Err(Error::Divergence { q_mass: qm });
        }
        total += qm * (qm / pm).ln();
    }
    Ok((total / LN2).max(0.0))
}

/// Relative entropy from a 2x2 coupling to the DSBS joint distribution, in bits.
pub fn kl_joint(q: &Coupling2x2, params: &DsbsParams) -> f64 {
    let p = params.joint();
    let nats: f64 = q
        .cells()
        .iter()
        .zip(p.iter())
        .map(|(&qc, &pc)| if qc <= 0.0 { 0.0 } else { qc * (qc / pc).ln() })
        .sum();
    (nats / LN2).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_anchors() {
        assert_eq!(h2(0.5), 1.0);
        assert_eq!(h2(0.0), 0.0);
        assert_eq!(h2(1.0), 0.0);
        // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated in 50-digit arithmetic
        assert!((h2(0.11) - 0.499915958164528).abs() < 1e-14);
        assert_eq!(d2(0.5), 0.0);
        assert_eq!(d2(0.0), 1.0);
    }

    #[test]
    fn d2_matches_one_minus_h2() {
        for i in 0..=1000 {
            let a = i as f64 / 1000.0;
            assert!((d2(a) - (1.0 - h2(a))).abs() < 1e-15, "a = {a}");
        }
    }

    #[test]
    fn inverse_anchors() {
        assert_eq!(h2_inv(1.0).unwrap(), 0.5);
        assert_eq!(h2_inv(0.0).unwrap(), 0.0);
        assert!((h2_inv(h2(0.11)).unwrap() - 0.11).abs() < 1e-10);
        assert!((d2_inv(d2(0.2)).unwrap() - 0.2).abs() < 1e-10);
        assert_eq!(d2_inv(0.0).unwrap(), 0.5);
        assert_eq!(d2_inv(1.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_domain_errors() {
        assert!(matches!(h2_inv(1.5), Err(Error::Domain { .. })));
        assert!(matches!(h2_inv(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(d2_inv(f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn d2_inv_is_precise_near_zero_divergence() {
        // near s = 0 the inverse is 1/2 - sqrt(s ln2 / 2) to leading order
        let s = 1e-12;
        let a = d2_inv(s).unwrap();
        assert!((d2(a) - s).abs() < 1e-20);
        assert!(((0.5 - a) - (s * LN2 / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn convolution_anchors() {
        assert_eq!(bconv(0.37, 0.0), 0.37);
        assert_eq!(bconv(0.3, 0.5), 0.5);
        assert!((bconv(0.2, 0.05) - 0.23).abs() < 1e-15);
        assert_eq!(bdeconv(0.2, 0.2).unwrap(), 0.0);
        assert!((bdeconv(bconv(0.1, 0.2), 0.2).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(bdeconv(0.3, 0.5), Err(Error::Singularity { .. })));
    }

    #[test]
    fn binary_kl() {
        let u = BinaryDist::uniform();
        assert_eq!(kl_binary(&u, &u), 0.0);
        let a = 0.3;
        let q = BinaryDist::new(Prob::new(a).unwrap());
        assert!((kl_binary(&q, &u) - (1.0 - h2(a))).abs() < 1e-15);
        let point0 = BinaryDist::new(Prob::new(0.0).unwrap());
        assert!((kl_binary(&point0, &u) - 1.0).abs() < 1e-15);
        let point1 = BinaryDist::new(Prob::new(1.0).unwrap());
        assert_eq!(kl_binary(&u, &point1), f64::INFINITY);
        assert!(matches!(
            kl_binary_strict(&u, &point1),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn joint_kl_anchors() {
        let params = DsbsParams::new(0.9).unwrap();
        assert_eq!(kl_joint(&params.joint_coupling(), &params), 0.0);
        let unit = Coupling2x2::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!((kl_joint(&unit, &params) - (2.0 - 1.9f64.log2())).abs() < 1e-14);
        // product of uniform marginals at rho = 0.9, four-term sum in
        // 50-digit arithmetic
        let product = Coupling2x2::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert!((kl_joint(&product, &params) - 1.1979643381655696).abs() < 1e-14);
    }

    #[test]
    fn params_invariants() {
        for rho in [1e-6, 0.1, 0.5, 0.9, 0.999] {
            let p = DsbsParams::new(rho).unwrap();
            assert!(p.k() > 1.0);
            assert!(p.theta() > 0.0 && p.theta() < 1.0);
            assert!((p.k() * p.theta() * p.theta() - 1.0).abs() < 1e-9);
            let t = p.theta();
            assert!((rho * rho - ((1.0 - t) / (1.0 + t)).powi(2)).abs() < 1e-12);
            assert!((p.k_minus_1() - (p.k() - 1.0)).abs() <= 1e-9 * p.k());
        }
        assert!(DsbsParams::new(0.0).is_err());
        assert!(DsbsParams::new(1e-7).is_err());
        assert!(DsbsParams::new(1.0).is_err());
    }

    #[test]
    fn prob_slack() {
        assert_eq!(Prob::new(1.0 + 1e-13).unwrap().value(), 1.0);
        assert_eq!(Prob::new(-1e-13).unwrap().value(), 0.0);
        assert!(Prob::new(1.0 + 1e-9).is_err());
        assert!(Coupling2x2::new(0.5, 0.5, 0.1, 0.0).is_err());
    }
}
