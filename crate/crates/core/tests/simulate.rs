use std::sync::Arc;

use rmae::autgroup::sample_blta_pl;
use rmae::codespec::{CodeSpec, Constraint};
use rmae::encdec::BranchMode;
use rmae::sim::{records_to_csv, run_bler, wilson_interval, BlerRecord, DecoderSpec, StopRule, Z95};

fn rm25() -> Arc<Constraint> {
    Arc::new(Constraint::full(&CodeSpec::reed_muller(2, 5).unwrap()))
}

fn decoders() -> Vec<DecoderSpec> {
    vec![
        DecoderSpec::Sc,
        DecoderSpec::Scl { list: 4 },
        DecoderSpec::Ae {
            list: 2,
            perms: sample_blta_pl(5, 4, 9).unwrap(),
            mode: BranchMode::Shared,
        },
    ]
}

#[test]
fn independent_of_worker_count() {
    let c = rm25();
    let stop = StopRule {
        min_errors: 40,
        max_trials: 3000,
    };
    for d in decoders() {
        let one = run_bler(&c, &d, &[1.0, 2.0], stop, 11, 1).unwrap();
        let three = run_bler(&c, &d, &[1.0, 2.0], stop, 11, 3).unwrap();
        assert_eq!(one, three, "{}", d.label());
        let other_seed = run_bler(&c, &d, &[1.0, 2.0], stop, 12, 1).unwrap();
        assert_ne!(one, other_seed);
    }
}

#[test]
fn stops_at_exactly_min_errors() {
    let c = rm25();
    let stop = StopRule {
        min_errors: 25,
        max_trials: 1_000_000,
    };
    let pts = run_bler(&c, &DecoderSpec::Sc, &[0.0], stop, 1, 2).unwrap();
    assert_eq!(pts[0].block_errors, 25);
    assert!(pts[0].trials < 1_000_000);
    let (lo, hi) = pts[0].ci95;
    assert!(lo < pts[0].bler && pts[0].bler < hi);
}

#[test]
fn stops_at_max_trials() {
    let c = rm25();
    let stop = StopRule {
        min_errors: 1_000_000,
        max_trials: 500,
    };
    let pts = run_bler(&c, &DecoderSpec::Scl { list: 2 }, &[3.0], stop, 1, 1).unwrap();
    assert_eq!(pts[0].trials, 500);
}

#[test]
fn error_rate_falls_with_snr() {
    let c = rm25();
    let stop = StopRule {
        min_errors: 200,
        max_trials: 20_000,
    };
    let pts = run_bler(&c, &DecoderSpec::Scl { list: 4 }, &[0.0, 2.0, 4.0], stop, 5, 1).unwrap();
    assert!(pts[0].bler > pts[1].bler && pts[1].bler > pts[2].bler);
}

#[test]
fn rejects_bad_settings() {
    let c = rm25();
    let ok = StopRule {
        min_errors: 1,
        max_trials: 1,
    };
    assert!(run_bler(&c, &DecoderSpec::Sc, &[1.0], ok, 0, 0).is_err());
    let zero = StopRule {
        min_errors: 0,
        max_trials: 1,
    };
    assert!(run_bler(&c, &DecoderSpec::Sc, &[1.0], zero, 0, 1).is_err());
    assert!(run_bler(&c, &DecoderSpec::Scl { list: 0 }, &[1.0], ok, 0, 1).is_err());
    let empty = DecoderSpec::Ae {
        list: 2,
        perms: vec![],
        mode: BranchMode::Shared,
    };
    assert!(run_bler(&c, &empty, &[1.0], ok, 0, 1).is_err());
}

#[test]
fn labels_and_csv() {
    let labels: Vec<String> = decoders().iter().map(DecoderSpec::label).collect();
    assert_eq!(labels, ["SC", "SCL-4", "AE-4-SCL-2"]);
    let p = run_bler(
        &rm25(),
        &DecoderSpec::Sc,
        &[1.0],
        StopRule {
            min_errors: 5,
            max_trials: 100,
        },
        3,
        1,
    )
    .unwrap();
    let csv = records_to_csv(&[BlerRecord::new("SC", &p[0])]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("decoder,ebn0_db,trials,errors,bler,ci_low,ci_high"));
    assert!(lines.next().unwrap().starts_with("SC,1,"));
}

#[test]
fn wilson_interval_edges() {
    assert_eq!(wilson_interval(5, 5, Z95).1, 1.0);
    let (lo, hi) = wilson_interval(50, 100, Z95);
    assert!((lo + hi - 1.0).abs() < 1e-12);
    // 0.5 +- 0.0961 for n = 100
    assert!((hi - 0.596_1).abs() < 1e-3);
}
