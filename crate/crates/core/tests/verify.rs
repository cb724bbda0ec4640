use dsbs_core::binary::DsbsParams;
use dsbs_core::hulls::PairMode;
use dsbs_core::verify::*;

fn cheap(grid_n: usize) -> VerifyConfig {
    let mut cfg = VerifyConfig::new(grid_n);
    cfg.pair_mode = PairMode::Sampled { pairs: 20_000, seed: 11 };
    cfg.grid_1d = 201;
    cfg.p_samples = 200;
    cfg.root_samples = 20;
    cfg.scan_n = 100_000;
    cfg.gamma_n = 101;
    cfg
}

#[test]
fn every_claim_passes_at_moderate_correlation() {
    let params = DsbsParams::new(0.5).unwrap();
    let report = verify_all(&params, &cheap(101)).unwrap();
    assert_eq!(report.claims.len(), ClaimId::ALL.len());
    assert_eq!(report.runtime_ms.len(), report.claims.len());
    for c in &report.claims {
        assert!(c.passed, "{} failed: {}", c.id, c.worst_violation);
    }
    assert!(report.passed());
}

#[test]
fn reports_are_deterministic() {
    let params = DsbsParams::new(0.9).unwrap();
    let cfg = cheap(51);
    let a = verify_all(&params, &cfg).unwrap();
    let b = verify_all(&params, &cfg).unwrap();
    assert_eq!(a.meta, b.meta);
    assert_eq!(a.claims, b.claims);
}

#[test]
fn injected_faults_are_caught() {
    let params = DsbsParams::new(0.9).unwrap();
    for id in ClaimId::ALL {
        let mut cfg = cheap(51);
        // sampled pairs could miss a single planted bump
        cfg.pair_mode = PairMode::Full;
        cfg.inject_fault = Some(id);
        let rec = verify_claim(&params, &cfg, id).unwrap();
        assert!(!rec.passed, "{id} survived its fault");
        assert!(!rec.witness.coords.is_empty() || !rec.witness.indices.is_empty(), "{id}");
        // other claims are untouched by the fault
        let other = ClaimId::ALL.iter().copied().find(|&o| o != id).unwrap();
        assert!(verify_claim(&params, &cfg, other).unwrap().passed, "{other} with fault {id}");
    }
}

#[test]
fn claim_ids_round_trip() {
    for id in ClaimId::ALL {
        assert_eq!(id.as_str().parse::<ClaimId>().unwrap(), id);
        assert_eq!(id.as_str().to_lowercase().parse::<ClaimId>().unwrap(), id);
        assert!(!id.anchor().is_empty());
    }
    assert!("Z9".parse::<ClaimId>().is_err());
}

#[test]
fn config_validation() {
    assert!(VerifyConfig::new(50).validate().is_err());
    assert!(VerifyConfig::new(1002).validate().is_err());
    assert!(VerifyConfig::new(201).validate().is_ok());
    let mut cfg = VerifyConfig::new(201);
    cfg.oracle_test_n = 7;
    assert!(cfg.validate().is_err());
}

#[test]
fn root_samples_are_reproducible_and_valid() {
    let a = sample_root_problems(30, 5);
    assert_eq!(a, sample_root_problems(30, 5));
    assert_ne!(a, sample_root_problems(30, 6));
    for p in a {
        assert!(p.r > 0.0 && p.r < p.rho().powi(2));
        assert!(p.v.abs() > 1.0);
    }
}
