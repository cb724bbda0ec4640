//! The claim registry and the runner that certifies every claim at a given
//! correlation and grid size, producing a deterministic report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::binary::DsbsParams;
use crate::envelopes::{
    phi, psi_tilde_lattice, q_tilde_lattice, tabulate, tabulate_family, Family, QParam, Surface,
    INNER_GRID,
};
use crate::error::{Error, Result};
use crate::hulls::{
    check_midpoint_concave, check_midpoint_convex, check_monotone, check_slope_bounds,
    lower_convex_envelope, upper_concave_envelope, ConvexityReport, GridFn, PairMode, SlopeSense,
};
use crate::mre::{dd2_oracle_argmin, dd2_value, p_star};
use crate::stationary::{
    count_roots_scan, gamma_extremum, root_residual, solve_root, Problem, RootProblem,
};

pub const GRID_MIN: usize = 51;
pub const GRID_MAX: usize = 1001;

/// Identifier of a registered claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClaimId {
    T1,
    T2,
    T3,
    C,
    L1,
    L2,
    L3,
    E,
    P,
    U,
    H,
    B,
}

impl ClaimId {
    pub const ALL: [ClaimId; 12] = [
        ClaimId::T1,
        ClaimId::T2,
        ClaimId::T3,
        ClaimId::C,
        ClaimId::L1,
        ClaimId::L2,
        ClaimId::L3,
        ClaimId::E,
        ClaimId::P,
        ClaimId::U,
        ClaimId::H,
        ClaimId::B,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::T1 => "T1",
            ClaimId::T2 => "T2",
            ClaimId::T3 => "T3",
            ClaimId::C => "C",
            ClaimId::L1 => "L1",
            ClaimId::L2 => "L2",
            ClaimId::L3 => "L3",
            ClaimId::E => "E",
            ClaimId::P => "P",
            ClaimId::U => "U",
            ClaimId::H => "H",
            ClaimId::B => "B",
        }
    }

    /// Short statement of what the claim certifies.
    pub fn anchor(self) -> &'static str {
        match self {
            ClaimId::T1 => "the lower increasing envelope phi_tilde is convex on the unit square",
            ClaimId::T2 => "psi is concave on the unit square",
            ClaimId::T3 => "phi_q is concave for q < 0",
            ClaimId::C => "phi_q is convex for q >= 1 and psi_q is concave for 0 < q < 1",
            ClaimId::L1 => "slopes of the lower envelope are at most 1, of the upper envelopes at least 1",
            ClaimId::L2 => "the upper increasing envelope of psi equals psi and psi is nondecreasing",
            ClaimId::L3 => "for q < 0 the upper increasing envelope of phi_q equals phi_q",
            ClaimId::E => "the convex hull of phi_tilde and the concave hull of psi are fixpoints",
            ClaimId::P => "the closed-form minimizer agrees with brute-force minimization",
            ClaimId::U => "the scalar root equation has exactly one root z > 1",
            ClaimId::H => "for r > rho^2 the Lagrangian optimizer is (s, t) = (0, 0)",
            ClaimId::B => "for p > 1 the boundary s = 1 is not a minimizer",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invariant(format!("unknown claim id {s:?}")))
    }
}

/// Tolerances used by the claims.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Midpoint convexity and concavity.
    pub convexity: f64,
    /// Slack on the slope bound 1.
    pub slope: f64,
    /// Oracle agreement for the envelope of `psi`.
    pub psi_oracle: f64,
    pub monotone: f64,
    /// Oracle agreement for the envelope of `phi_q`.
    pub q_oracle: f64,
    /// The envelope fixpoint gap must be below `envelope_scale / grid_n`.
    pub envelope_scale: f64,
    /// Gap at the doubled grid over the gap at the base grid.
    pub envelope_ratio: f64,
    /// Gaps below this are treated as exact and skip the ratio test.
    pub envelope_floor: f64,
    pub p_star: f64,
    pub root_residual: f64,
    /// Allowed optimizer distance from the origin, in grid cells.
    pub optimizer_cells: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            convexity: 1e-9,
            slope: 1e-8,
            psi_oracle: 1e-5,
            monotone: 1e-10,
            q_oracle: 1e-6,
            envelope_scale: 0.4,
            envelope_ratio: 0.6,
            envelope_floor: 1e-9,
            p_star: 1e-9,
            root_residual: 1e-10,
            optimizer_cells: 1.0,
        }
    }
}

/// Exponents used by the one-parameter claims.
pub const PHI_Q_CONCAVE: [f64; 3] = [-0.5, -2.0, -10.0];
pub const PHI_Q_CONVEX: [f64; 3] = [1.0, 2.0, 10.0];
pub const PSI_Q_CONCAVE: [f64; 3] = [0.25, 0.5, 0.75];
pub const SLOPE_Q: [f64; 2] = [-2.0, -10.0];

/// Run configuration for [`verify_all`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub grid_n: usize,
    pub tolerances: Tolerances,
    pub pair_mode: PairMode,
    /// Points of the one-dimensional grids; at least `grid_n`.
    pub grid_1d: usize,
    /// Test lattice of the oracle claims; `INNER_GRID - 1` must be a
    /// multiple of `oracle_test_n - 1`.
    pub oracle_test_n: usize,
    pub p_samples: usize,
    pub root_samples: usize,
    pub scan_n: usize,
    pub gamma_n: usize,
    pub seed: u64,
    pub inject_fault: Option<ClaimId>,
}

impl VerifyConfig {
    pub fn new(grid_n: usize) -> Self {
        VerifyConfig {
            grid_n,
            tolerances: Tolerances::default(),
            pair_mode: PairMode::Auto,
            grid_1d: grid_n.max(501),
            oracle_test_n: 101,
            p_samples: 2000,
            root_samples: 200,
            scan_n: 100_000,
            gamma_n: 201,
            seed: 0x5eed,
            inject_fault: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(GRID_MIN..=GRID_MAX).contains(&self.grid_n) {
            return Err(Error::Domain {
                what: "grid_n",
                value: self.grid_n as f64,
                domain: "[51, 1001]",
            });
        }
        if self.oracle_test_n < 3 || !(INNER_GRID - 1).is_multiple_of(self.oracle_test_n - 1) {
            return Err(Error::Domain {
                what: "oracle_test_n",
                value: self.oracle_test_n as f64,
                domain: "n - 1 dividing 2000",
            });
        }
        if self.grid_1d < 3 || self.gamma_n < 101 || self.scan_n < 100_000 {
            return Err(Error::Invariant(
                "grid_1d >= 3, gamma_n >= 101 and scan_n >= 1e5 are required".into(),
            ));
        }
        Ok(())
    }
}

/// Where a claim's worst violation occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Which sub-check produced the violation.
    pub check: String,
    /// Lattice indices or sample indices.
    pub indices: Vec<Vec<usize>>,
    /// Lattice coordinates or sampled parameters.
    pub coords: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimRecord {
    pub id: ClaimId,
    pub anchor: String,
    pub passed: bool,
    pub worst_violation: f64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub rho: f64,
    pub grid_n: usize,
    pub tolerances: Tolerances,
    pub version: String,
}

/// One record per registered claim in registry order. Wall-clock times are
/// kept apart from the records so that the records are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub meta: ReportMeta,
    pub claims: Vec<ClaimRecord>,
    pub runtime_ms: Vec<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn claim(&self, id: ClaimId) -> Option<&ClaimRecord> {
        self.claims.iter().find(|c| c.id == id)
    }
}

/// Outcome of one sub-check.
#[derive(Debug, Clone)]
struct Outcome {
    check: String,
    violation: f64,
    tolerance: f64,
    indices: Vec<Vec<usize>>,
    coords: Vec<Vec<f64>>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.violation <= self.tolerance
    }

    /// Violation relative to tolerance, for picking the most severe sub-check.
    fn severity(&self) -> f64 {
        if self.tolerance > 0.0 {
            self.violation / self.tolerance
        } else if self.violation > 0.0 {
            f64::INFINITY
        } else {
            self.violation
        }
    }

    fn from_report(check: impl Into<String>, r: &ConvexityReport, n: usize) -> Self {
        let scale = 1.0 / (n - 1) as f64;
        Outcome {
            check: check.into(),
            violation: r.worst_violation,
            tolerance: r.tolerance,
            indices: r.witness.clone(),
            coords: r
                .witness
                .iter()
                .map(|ix| ix.iter().map(|&i| i as f64 * scale).collect())
                .collect(),
        }
    }
}

fn assemble(id: ClaimId, outcomes: Vec<Outcome>) -> ClaimRecord {
    let passed = outcomes.iter().all(Outcome::passed);
    let worst = outcomes
        .into_iter()
        .reduce(|acc, o| if o.severity() > acc.severity() { o } else { acc })
        .expect("every claim has at least one sub-check");
    ClaimRecord {
        id,
        anchor: id.anchor().to_string(),
        passed,
        worst_violation: worst.violation,
        witness: Witness {
            check: worst.check,
            indices: worst.indices,
            coords: worst.coords,
        },
    }
}

/// Adds a bump of height `h` at the centre of the lattice.
fn plant(values: &mut [f64], n: usize, dims: usize, h: f64) {
    let c = n / 2;
    let k = if dims == 1 { c } else { c * n + c };
    values[k] += h;
}

struct Runner<'a> {
    params: DsbsParams,
    cfg: &'a VerifyConfig,
}

impl Runner<'_> {
    fn fault(&self, id: ClaimId) -> bool {
        self.cfg.inject_fault == Some(id)
    }

    fn n(&self) -> usize {
        self.cfg.grid_n
    }

    fn tol(&self) -> &Tolerances {
        &self.cfg.tolerances
    }

    fn surface(&self, s: Surface, n: usize) -> Vec<f64> {
        tabulate(s, &self.params, n)
    }

    fn family(&self, family: Family, q: f64, n: usize) -> Vec<f64> {
        let qp = QParam::with_q(q).expect("registered exponents are valid");
        tabulate_family(family, &qp, &self.params, n)
            .into_iter()
            .map(|e| e.value)
            .collect()
    }

    fn t1(&self) -> Vec<Outcome> {
        let n = self.n();
        let mut v = self.surface(Surface::PhiTilde, n);
        if self.fault(ClaimId::T1) {
            plant(&mut v, n, 2, 1e-3);
        }
        let f = GridFn::new_2d(n, v).expect("finite samples");
        let r = check_midpoint_convex(&f, self.tol().convexity, self.cfg.pair_mode);
        vec![Outcome::from_report("phi_tilde midpoint convexity", &r, n)]
    }

    fn t2(&self) -> Vec<Outcome> {
        let n = self.n();
        let mut v = self.surface(Surface::Psi, n);
        if self.fault(ClaimId::T2) {
            plant(&mut v, n, 2, -1e-3);
        }
        let f = GridFn::new_2d(n, v).expect("finite samples");
        let r = check_midpoint_concave(&f, self.tol().convexity, self.cfg.pair_mode);
        vec![Outcome::from_report("psi midpoint concavity", &r, n)]
    }

    fn one_d(&self, id: ClaimId, family: Family, q: f64, convex: bool) -> Outcome {
        let m = self.cfg.grid_1d;
        let mut v = self.family(family, q, m);
        if self.fault(id) {
            plant(&mut v, m, 1, if convex { 1e-3 } else { -1e-3 });
        }
        let f = GridFn::new_1d(v).expect("finite samples");
        let tol = self.tol().convexity;
        let r = if convex {
            check_midpoint_convex(&f, tol, PairMode::Full)
        } else {
            check_midpoint_concave(&f, tol, PairMode::Full)
        };
        let shape = if convex { "convexity" } else { "concavity" };
        Outcome::from_report(format!("{} q={q} {shape}", family.name()), &r, m)
    }

    fn t3(&self) -> Vec<Outcome> {
        PHI_Q_CONCAVE
            .iter()
            .map(|&q| self.one_d(ClaimId::T3, Family::PhiQ, q, false))
            .collect()
    }

    fn c(&self) -> Vec<Outcome> {
        let mut out: Vec<Outcome> = PHI_Q_CONVEX
            .iter()
            .map(|&q| self.one_d(ClaimId::C, Family::PhiQ, q, true))
            .collect();
        out.extend(
            PSI_Q_CONCAVE
                .iter()
                .map(|&q| self.one_d(ClaimId::C, Family::PsiQ, q, false)),
        );
        out
    }

    fn l1(&self) -> Vec<Outcome> {
        let n = self.n();
        let tol = self.tol().slope;
        let mut lower = lower_convex_envelope(
            &GridFn::new_2d(n, self.surface(Surface::PhiTilde, n)).expect("finite samples"),
        )
        .into_values();
        if self.fault(ClaimId::L1) {
            plant(&mut lower, n, 2, 0.1);
        }
        let lower = GridFn::new_2d(n, lower).expect("finite samples");
        let upper = upper_concave_envelope(
            &GridFn::new_2d(n, self.surface(Surface::Psi, n)).expect("finite samples"),
        );
        let mut out = Vec::new();
        for axis in 0..2 {
            let r = check_slope_bounds(&lower, axis, 1.0, SlopeSense::AtMost, tol);
            out.push(Outcome::from_report(format!("lower envelope of phi_tilde, axis {axis}, slope <= 1"), &r, n));
            let r = check_slope_bounds(&upper, axis, 1.0, SlopeSense::AtLeast, tol);
            out.push(Outcome::from_report(format!("upper envelope of psi, axis {axis}, slope >= 1"), &r, n));
        }
        let m = self.cfg.grid_1d;
        for &q in &SLOPE_Q {
            let qp = QParam::with_q(q).expect("registered exponents are valid");
            let tilde = self.q_tilde(&qp, m);
            let env = upper_concave_envelope(&GridFn::new_1d(tilde).expect("finite samples"));
            let r = check_slope_bounds(&env, 0, 1.0, SlopeSense::AtLeast, tol);
            out.push(Outcome::from_report(format!("upper envelope of phi_q q={q}, slope >= 1"), &r, m));
        }
        out
    }

    /// Increasing envelope of the `q` family on `m` points.
    fn q_tilde(&self, qp: &QParam, m: usize) -> Vec<f64> {
        q_tilde_lattice(qp, &self.params, m, m).expect("equal lattices are compatible")
    }

    fn l2(&self) -> Vec<Outcome> {
        let nt = self.cfg.oracle_test_n;
        let mut oracle = psi_tilde_lattice(&self.params, INNER_GRID, nt).expect("compatible lattice");
        if self.fault(ClaimId::L2) {
            plant(&mut oracle, nt, 2, 1e-3);
        }
        let psi = self.surface(Surface::Psi, nt);
        let (k, diff) = worst_abs_diff(&oracle, &psi);
        let scale = 1.0 / (nt - 1) as f64;
        let (i, j) = (k / nt, k % nt);
        let gap = Outcome {
            check: format!("oracle of the upper increasing envelope of psi, n_fine={INNER_GRID}"),
            violation: diff,
            tolerance: self.tol().psi_oracle,
            indices: vec![vec![i, j]],
            coords: vec![vec![i as f64 * scale, j as f64 * scale]],
        };
        let m = self.n().max(self.cfg.grid_1d);
        let psi_m = GridFn::new_2d(m, self.surface(Surface::Psi, m)).expect("finite samples");
        let r = check_monotone(&psi_m, self.tol().monotone);
        vec![gap, Outcome::from_report("psi nondecreasing", &r, m)]
    }

    fn l3(&self) -> Vec<Outcome> {
        let nt = self.cfg.oracle_test_n;
        let scale = 1.0 / (nt - 1) as f64;
        SLOPE_Q
            .iter()
            .map(|&q| {
                let qp = QParam::with_q(q).expect("registered exponents are valid");
                let mut oracle =
                    q_tilde_lattice(&qp, &self.params, INNER_GRID, nt).expect("compatible lattice");
                if self.fault(ClaimId::L3) {
                    plant(&mut oracle, nt, 1, 1e-3);
                }
                let direct = self.family(Family::PhiQ, q, nt);
                let (k, diff) = worst_abs_diff(&oracle, &direct);
                Outcome {
                    check: format!("oracle of the upper increasing envelope of phi_q q={q}"),
                    violation: diff,
                    tolerance: self.tol().q_oracle,
                    indices: vec![vec![k]],
                    coords: vec![vec![k as f64 * scale]],
                }
            })
            .collect()
    }

    /// Largest `|hull(f) - f|` on the `n` lattice.
    fn hull_gap(&self, surface: Surface, n: usize, fault: bool) -> (usize, f64) {
        let mut v = self.surface(surface, n);
        if fault {
            let h = if surface == Surface::PhiTilde { 0.1 } else { -0.1 };
            plant(&mut v, n, 2, h);
        }
        let f = GridFn::new_2d(n, v).expect("finite samples");
        let env = match surface {
            Surface::Psi => upper_concave_envelope(&f),
            _ => lower_convex_envelope(&f),
        };
        worst_abs_diff(env.values(), f.values())
    }

    fn e(&self) -> Vec<Outcome> {
        let n = self.n();
        let n2 = 2 * n - 1;
        let t = *self.tol();
        let fault = self.fault(ClaimId::E);
        let mut out = Vec::new();
        for (surface, name) in [(Surface::PhiTilde, "phi_tilde"), (Surface::Psi, "psi")] {
            let (k, gap) = self.hull_gap(surface, n, fault);
            let (k2, gap2) = self.hull_gap(surface, n2, fault);
            let scale = 1.0 / (n - 1) as f64;
            out.push(Outcome {
                check: format!("envelope gap of {name} at n={n}"),
                violation: gap,
                tolerance: t.envelope_scale / n as f64,
                indices: vec![vec![k / n, k % n]],
                coords: vec![vec![(k / n) as f64 * scale, (k % n) as f64 * scale]],
            });
            // the ratio is meaningless once both gaps are at rounding level
            let ratio = if gap.max(gap2) <= t.envelope_floor {
                0.0
            } else {
                gap2 / gap.max(t.envelope_floor)
            };
            let scale2 = 1.0 / (n2 - 1) as f64;
            out.push(Outcome {
                check: format!("envelope gap ratio of {name}, n={n2} over n={n}"),
                violation: ratio,
                tolerance: t.envelope_ratio,
                indices: vec![vec![k2 / n2, k2 % n2]],
                coords: vec![vec![(k2 / n2) as f64 * scale2, (k2 % n2) as f64 * scale2]],
            });
        }
        out
    }

    fn p(&self) -> Vec<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        let mut arg = (0.0, 0usize, [0.0; 2]);
        let mut val = (0.0, 0usize, [0.0; 2]);
        let shift = if self.fault(ClaimId::P) { 1e-6 } else { 0.0 };
        for i in 0..self.cfg.p_samples {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            let closed = p_star(a, b, &self.params).expect("unit marginals") + shift;
            let oracle = dd2_oracle_argmin(a, b, &self.params, 1000);
            let da = (closed - oracle.arg).abs();
            let dv = (dd2_value(a, b, &self.params) - oracle.value).abs();
            if da > arg.0 {
                arg = (da, i, [a, b]);
            }
            if dv > val.0 {
                val = (dv, i, [a, b]);
            }
        }
        let tol = self.tol().p_star;
        [("minimizer", arg), ("minimum", val)]
            .into_iter()
            .map(|(what, (d, i, ab))| Outcome {
                check: format!("closed-form {what} vs brute force"),
                violation: d,
                tolerance: tol,
                indices: vec![vec![i]],
                coords: vec![ab.to_vec()],
            })
            .collect()
    }

    fn u(&self) -> Vec<Outcome> {
        let problems = sample_root_problems(self.cfg.root_samples, self.cfg.seed);
        let mut count = (0.0, 0usize);
        let mut resid = (0.0, 0usize);
        for (i, prob) in problems.iter().enumerate() {
            let roots = count_roots_scan(prob, self.cfg.scan_n);
            let off = (roots as f64 - 1.0).abs();
            if off > count.0 {
                count = (off, i);
            }
            let r = match solve_root(prob) {
                Ok(root) => {
                    let h = if self.fault(ClaimId::U) && i == 0 {
                        root.h + 1.0
                    } else {
                        root.h
                    };
                    root_residual(h, prob)
                }
                Err(_) => f64::INFINITY,
            };
            if r > resid.0 || (r.is_infinite() && !resid.0.is_infinite()) {
                resid = (r, i);
            }
        }
        let coords = |i: usize| {
            let p = problems[i];
            vec![vec![p.theta, p.v, p.r]]
        };
        vec![
            Outcome {
                check: format!("root count deviation from 1, scan n={}", self.cfg.scan_n),
                violation: count.0,
                tolerance: 0.0,
                indices: vec![vec![count.1]],
                coords: coords(count.1),
            },
            Outcome {
                check: "log residual of the solved root".into(),
                violation: resid.0,
                tolerance: self.tol().root_residual,
                indices: vec![vec![resid.1]],
                coords: coords(resid.1),
            },
        ]
    }

    fn h(&self) -> Vec<Outcome> {
        let n = self.cfg.gamma_n;
        let cell = 0.5 / (n - 1) as f64;
        let shift = if self.fault(ClaimId::H) { 3.0 * cell } else { 0.0 };
        let mut worst: Option<Outcome> = None;
        for (p, q, problem) in hypercontractive_settings(self.params.rho()) {
            let qp = QParam::new(p, q).expect("settings are valid exponents");
            let g = gamma_extremum(&qp, &self.params, problem, n);
            let dist = (g.a - 0.5 + shift).abs().max((g.b - 0.5).abs());
            let o = Outcome {
                check: format!("{problem:?} optimizer distance from (1/2, 1/2) in cells, p={p}, q={q}"),
                violation: dist / cell,
                tolerance: self.tol().optimizer_cells,
                indices: vec![],
                coords: vec![vec![p, q], vec![g.a, g.b]],
            };
            if worst.as_ref().is_none_or(|w| o.violation > w.violation) {
                worst = Some(o);
            }
        }
        vec![worst.expect("settings are nonempty")]
    }

    fn b(&self) -> Vec<Outcome> {
        let eps = 1e-4;
        let mut worst: Option<Outcome> = None;
        for (p, q) in boundary_settings() {
            let qp = QParam::new(p, q).expect("settings are valid exponents");
            for t in [0.2, 0.5, 0.8] {
                let g = |s: f64| phi(s, t, &self.params) - qp.lambda * s - qp.mu * t;
                let mut d = g(1.0 - eps) - g(1.0);
                if self.fault(ClaimId::B) {
                    d += 1.0;
                }
                let o = Outcome {
                    check: format!("g(1 - {eps}, t) - g(1, t) < 0, p={p}, q={q}, t={t}"),
                    violation: d,
                    tolerance: 0.0,
                    indices: vec![],
                    coords: vec![vec![p, q, t]],
                };
                // strict inequality: zero counts as a violation
                let o = Outcome {
                    violation: if o.violation == 0.0 { f64::MIN_POSITIVE } else { o.violation },
                    ..o
                };
                if worst.as_ref().is_none_or(|w| o.violation > w.violation) {
                    worst = Some(o);
                }
            }
        }
        vec![worst.expect("settings are nonempty")]
    }

    fn run(&self, id: ClaimId) -> ClaimRecord {
        let outcomes = match id {
            ClaimId::T1 => self.t1(),
            ClaimId::T2 => self.t2(),
            ClaimId::T3 => self.t3(),
            ClaimId::C => self.c(),
            ClaimId::L1 => self.l1(),
            ClaimId::L2 => self.l2(),
            ClaimId::L3 => self.l3(),
            ClaimId::E => self.e(),
            ClaimId::P => self.p(),
            ClaimId::U => self.u(),
            ClaimId::H => self.h(),
            ClaimId::B => self.b(),
        };
        assemble(id, outcomes)
    }
}

fn worst_abs_diff(x: &[f64], y: &[f64]) -> (usize, f64) {
    let mut best = (0, 0.0);
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        let d = (a - b).abs();
        if d > best.1 {
            best = (k, d);
        }
    }
    best
}

/// Random valid root problems: `theta` uniform on `[0.02, 0.9]`, `|v|` on
/// `(1, 50]` with a random sign, and `r / rho^2` uniform on `(0, 1)`.
pub fn sample_root_problems(count: usize, seed: u64) -> Vec<RootProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let theta = rng.gen_range(0.02..=0.9);
        let mag: f64 = 50.0 - rng.gen_range(0.0..49.0);
        let v = if rng.gen::<bool>() { mag } else { -mag };
        let rho = (1.0 - theta) / (1.0 + theta);
        let frac: f64 = rng.gen_range(0.0..1.0);
        if frac == 0.0 {
            continue;
        }
        if let Ok(p) = RootProblem::new(theta, v, rho * rho * frac) {
            out.push(p);
        }
    }
    out
}

/// Ten exponent pairs with `r > rho^2`: five forward, five reverse.
pub fn hypercontractive_settings(rho: f64) -> Vec<(f64, f64, Problem)> {
    let forward = [(0.5, 0.9), (0.3, 0.3), (0.8, 0.95), (0.1, 1.5), (0.6, 0.6)]
        .map(|(x, y)| (1.0 + rho.powf(x), 1.0 + rho.powf(y), Problem::ForwardMin));
    let reverse = [(0.5, 0.9), (0.3, 0.3), (0.8, 0.95), (0.1, 1.5), (0.6, 0.6)]
        .map(|(x, y)| (1.0 - rho.powf(x), 1.0 - rho.powf(y), Problem::ReverseMax));
    forward.into_iter().chain(reverse).collect()
}

/// Forward exponent pairs for the boundary check.
pub fn boundary_settings() -> Vec<(f64, f64)> {
    vec![(1.5, 1.5), (2.0, 3.0), (4.0, 1.2)]
}

/// Runs every registered claim in registry order.
pub fn verify_all(params: &DsbsParams, cfg: &VerifyConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let runner = Runner {
        params: *params,
        cfg,
    };
    let mut claims = Vec::with_capacity(ClaimId::ALL.len());
    let mut runtime_ms = Vec::with_capacity(ClaimId::ALL.len());
    for id in ClaimId::ALL {
        let start = Instant::now();
        claims.push(runner.run(id));
        runtime_ms.push(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(VerificationReport {
        meta: ReportMeta {
            rho: params.rho(),
            grid_n: cfg.grid_n,
            tolerances: cfg.tolerances,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        claims,
        runtime_ms,
    })
}

/// Runs a single claim.
pub fn verify_claim(params: &DsbsParams, cfg: &VerifyConfig, id: ClaimId) -> Result<ClaimRecord> {
    cfg.validate()?;
    let runner = Runner {
        params: *params,
        cfg,
    };
    Ok(runner.run(id))
}
