//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dsbs_cli::cmd_figure;
use dsbs_core::binary::DsbsParams;
use dsbs_core::envelopes::{phi, phi_tilde, QParam};
use dsbs_core::hulls::{check_midpoint_concave, check_midpoint_convex, GridFn, PairMode};
use dsbs_core::mre::{dd2_value, p_star};
use dsbs_core::stationary::{stationary_point, Case};
use dsbs_core::verify::{verify_claim, ClaimId, ClaimRecord, VerifyConfig};

type Criterion = (u32, fn() -> Line, Option<Duration>);

struct Line {
    passed: bool,
    detail: String,
}

fn params(rho: f64) -> DsbsParams {
    DsbsParams::new(rho).expect("fixed correlations are valid")
}

fn config(grid_n: usize) -> VerifyConfig {
    VerifyConfig::new(grid_n)
}

/// Runs `id` at each correlation and folds the records.
fn claims(rhos: &[f64], cfg: &VerifyConfig, ids: &[ClaimId]) -> Line {
    let mut passed = true;
    let mut parts = Vec::new();
    for &rho in rhos {
        for &id in ids {
            let rec: ClaimRecord = match verify_claim(&params(rho), cfg, id) {
                Ok(r) => r,
                Err(e) => {
                    return Line {
                        passed: false,
                        detail: format!("{id} at rho={rho}: {e}"),
                    }
                }
            };
            passed &= rec.passed;
            parts.push(format!("{id}@{rho} worst={:.3e} [{}]", rec.worst_violation, rec.witness.check));
        }
    }
    Line {
        passed,
        detail: parts.join("; "),
    }
}

fn with_budget(line: Line, took: Duration, budget: Option<Duration>) -> Line {
    match budget {
        Some(b) if took > b => Line {
            passed: false,
            detail: format!("{} (over the {:.0} s budget)", line.detail, b.as_secs_f64()),
        },
        _ => line,
    }
}

fn criterion_1() -> Line {
    let mut cfg = config(201);
    cfg.p_samples = 3334;
    claims(&[0.1, 0.5, 0.9], &cfg, &[ClaimId::P])
}

fn criterion_2() -> Line {
    claims(&[0.5, 0.9], &config(201), &[ClaimId::T1])
}

fn criterion_3() -> Line {
    claims(&[0.5, 0.9], &config(201), &[ClaimId::T2])
}

fn criterion_4() -> Line {
    claims(&[0.5, 0.9], &config(201), &[ClaimId::T3])
}

fn criterion_5() -> Line {
    claims(&[0.5, 0.9], &config(201), &[ClaimId::C])
}

fn criterion_6() -> Line {
    let mut cfg = config(201);
    cfg.grid_1d = 201;
    claims(&[0.9], &cfg, &[ClaimId::L1])
}

fn criterion_7() -> Line {
    claims(&[0.9], &config(201), &[ClaimId::L2])
}

fn criterion_8() -> Line {
    claims(&[0.9], &config(201), &[ClaimId::L3])
}

fn criterion_9() -> Line {
    claims(&[0.9], &config(201), &[ClaimId::E])
}

fn criterion_10() -> Line {
    let mut cfg = config(201);
    cfg.root_samples = 200;
    cfg.scan_n = 1_000_000;
    claims(&[0.9], &cfg, &[ClaimId::U])
}

fn criterion_11() -> Line {
    let rho = 0.9;
    let p = params(rho);
    let h = 1e-5;
    let mut worst: (f64, String) = (0.0, String::new());
    let mut count = 0;
    for &frac in &[0.3, 0.5, 0.7, 0.9, 0.98] {
        for &pm in &[0.3, 0.6, 1.0, 2.0] {
            let qp = QParam::new(1.0 + pm, 1.0 + frac * rho * rho / pm).expect("forward exponents");
            count += 1;
            let sp = match stationary_point(&qp, &p, Case::Forward) {
                Ok(sp) => sp,
                Err(e) => {
                    return Line {
                        passed: false,
                        detail: format!("p={} q={}: {e}", qp.p, qp.q),
                    }
                }
            };
            let g = |s: f64, t: f64| phi(s, t, &p) - qp.lambda * s - qp.mu * t;
            let ds = (g(sp.s + h, sp.t) - g(sp.s - h, sp.t)) / (2.0 * h);
            let dt = (g(sp.s, sp.t + h) - g(sp.s, sp.t - h)) / (2.0 * h);
            let m = ds.abs().max(dt.abs());
            if m >= worst.0 {
                worst = (m, format!("p={:.4} q={:.4}", qp.p, qp.q));
            }
        }
    }
    Line {
        passed: worst.0 < 1e-4,
        detail: format!("{count} settings, max |grad| = {:.3e} at {}", worst.0, worst.1),
    }
}

fn criterion_12() -> Line {
    claims(&[0.9], &config(201), &[ClaimId::H])
}

fn criterion_13() -> Line {
    let mut worst = 0.0f64;
    for rho in [0.1, 0.5, 0.9] {
        let p = params(rho);
        let diffs = [
            dd2_value(0.5, 0.5, &p),
            dd2_value(0.0, 0.0, &p) - (2.0 - (1.0 + rho).log2()),
            dd2_value(0.0, 1.0, &p) - (2.0 - (1.0 - rho).log2()),
            p_star(0.5, 0.5, &p).unwrap_or(f64::NAN) - (1.0 + rho) / 4.0,
        ];
        for d in diffs {
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d.abs() });
        }
        for k in 0..=20 {
            let beta = k as f64 / 20.0;
            worst = worst.max((phi_tilde(0.0, beta, &p) - beta).abs());
        }
    }
    Line {
        passed: worst <= 1e-12,
        detail: format!("max anchor error {worst:.3e}"),
    }
}

fn read_table(path: &Path) -> Result<Vec<Vec<String>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn num(s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("bad number {s:?}"))
}

fn figure_checks(dir: &Path) -> Result<String, String> {
    let n = 101;
    let out = cmd_figure(&params(0.9), n, dir, false).map_err(|e| e.to_string())?;
    let phi_rows = read_table(&dir.join("phi.csv"))?;
    let tilde_rows = read_table(&dir.join("phi_tilde.csv"))?;
    if phi_rows.len() != n * n || tilde_rows.len() != n * n {
        return Err("lattice CSVs have the wrong row count".into());
    }
    let mut max_gap = f64::NEG_INFINITY;
    for (a, b) in phi_rows.iter().zip(&tilde_rows) {
        let gap = num(&a[2])? - num(&b[2])?;
        // both values are printed to 12 significant digits
        if gap < -1e-11 {
            return Err(format!("phi_tilde exceeds phi at ({}, {})", a[0], a[1]));
        }
        max_gap = max_gap.max(gap);
    }
    if max_gap <= 0.01 {
        return Err(format!("max gap {max_gap} is not above 0.01"));
    }
    let mut curves: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for row in read_table(&dir.join("q_family.csv"))? {
        curves.entry((row[3].clone(), row[0].clone())).or_default().push(num(&row[2])?);
    }
    if curves.len() != 9 {
        return Err(format!("expected 9 curves, found {}", curves.len()));
    }
    let mut worst = f64::NEG_INFINITY;
    for ((family, qc), ys) in &curves {
        let q_conj = num(qc)?;
        let q = if q_conj.is_infinite() { 1.0 } else { q_conj / (q_conj - 1.0) };
        let f = GridFn::new_1d(ys.clone()).map_err(|e| e.to_string())?;
        let r = match (family.as_str(), q >= 1.0) {
            ("phi_q", true) => check_midpoint_convex(&f, 1e-9, PairMode::Full),
            _ => check_midpoint_concave(&f, 1e-9, PairMode::Full),
        };
        if !r.passed {
            return Err(format!("{family} q'={qc}: violation {:.3e}", r.worst_violation));
        }
        worst = worst.max(r.worst_violation);
    }
    Ok(format!(
        "{} files, max gap {max_gap:.4}, curve shape worst {worst:.3e}",
        out.files.len()
    ))
}

fn criterion_14() -> Line {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            return Line {
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    match figure_checks(dir.path()) {
        Ok(detail) => Line { passed: true, detail },
        Err(detail) => Line { passed: false, detail },
    }
}

fn main() -> ExitCode {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let criteria: [Criterion; 14] = [
        (1, criterion_1, secs(30)),
        (2, criterion_2, secs(180)),
        (3, criterion_3, secs(180)),
        (4, criterion_4, None),
        (5, criterion_5, None),
        (6, criterion_6, None),
        (7, criterion_7, None),
        (8, criterion_8, None),
        (9, criterion_9, None),
        (10, criterion_10, secs(120)),
        (11, criterion_11, None),
        (12, criterion_12, None),
        (13, criterion_13, None),
        (14, criterion_14, secs(60)),
    ];
    let mut failed = 0;
    for (k, run, budget) in criteria {
        let start = Instant::now();
        let line = run();
        let took = start.elapsed();
        let line = with_budget(line, took, budget);
        if !line.passed {
            failed += 1;
        }
        println!(
            "criterion {k:>2} {} ({:.1} s) {}",
            if line.passed { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            line.detail
        );
    }
    println!("{} of 14 criteria passed", 14 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
