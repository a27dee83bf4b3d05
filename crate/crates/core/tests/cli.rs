use std::fs;
use std::process::Command;

use clap::Parser;
use rmae::cli::{parse_variant, run, CampaignConfig, Cli};
use rmae::codespec::{CodeSpec, Constraint};

fn run_args(args: &[&str]) -> rmae::Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("rmae").chain(args.iter().copied())).unwrap();
    let mut out = Vec::new();
    run(&cli, &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

#[test]
fn construct_prints_small_matrices() {
    let text = run_args(&["construct", "--r", "1", "--n", "3", "--variant", "1"]).unwrap();
    assert!(text.contains("code R(1, 3): N = 8, K = 4"));
    assert!(text.contains("V =\n10000000\n01000000\n00100000\n00011000"));
    assert!(text.contains("W =\n00011000\n00000100\n00000010\n00000001"));
}

#[test]
fn construct_reports_counts() {
    let text = run_args(&["construct", "--variant", "3"]).unwrap();
    assert!(text.contains("code R(3, 7): N = 128, K = 64"));
    assert!(text.contains("D = 22"));
    assert!(text.contains("dynamic frozen bits: 15"));
    assert!(text.contains("stable variants: 8"));
    assert!(!text.contains("V ="));
    assert!(run_args(&["construct", "--variant", "9"]).is_err());
    assert!(run_args(&["construct", "--variant", "x"]).is_err());
}

#[test]
fn constraint_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    run_args(&["construct", "--r", "2", "--n", "6", "--variant", "1,2", "--out", path.to_str().unwrap()])
        .unwrap();
    let loaded = Constraint::from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
    let spec = CodeSpec::reed_muller(2, 6).unwrap();
    assert_eq!(loaded, Constraint::build(&spec, &[1, 2]).unwrap());
    let again = run_args(&["construct", "--constraint", path.to_str().unwrap()]).unwrap();
    assert!(again.contains("variant: [1, 2]"));
    // a tampered rule table is rejected
    let text = fs::read_to_string(&path).unwrap().replacen("kind = \"dynamic\"", "kind = \"zero\"", 1);
    assert!(Constraint::from_toml(&text).is_err());
}

#[test]
fn variant_syntax() {
    assert_eq!(parse_variant("full").unwrap(), None);
    assert_eq!(parse_variant("none").unwrap(), Some(vec![]));
    assert_eq!(parse_variant("1, 3").unwrap(), Some(vec![1, 3]));
    assert!(parse_variant("1;3").is_err());
}

#[test]
fn stability_and_memory_commands() {
    let text = run_args(&["stability", "--r", "2", "--n", "5", "--samples", "10"]).unwrap();
    assert!(text.contains("stable: 10"));
    let text = run_args(&["stability", "--r", "3", "--n", "7", "--group", "lta", "--samples", "20"]).unwrap();
    assert!(text.contains("unstable: "));
    let text = run_args(&["memory", "--r", "3", "--n", "7", "--m", "8"]).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("R(3;7),8,22,"));
    assert!(row.ends_with(",65536"));
}

#[test]
fn sample_and_memory_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("perms.toml");
    let p = path.to_str().unwrap();
    run_args(&["sample", "--group", "lta", "--n", "8", "--count", "8", "--seed", "4", "--out", p]).unwrap();
    let perms = rmae::autgroup::perms_from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(perms.len(), 8);
    let text = run_args(&["memory", "--r", "5", "--n", "8", "--perms", p]).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("R(5;8),8,8,"));
    run_args(&["sample", "--n", "5", "--count", "3", "--include-identity", "--out", p]).unwrap();
    let perms = rmae::autgroup::perms_from_toml(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(perms[0].is_identity() && !perms[1].is_identity());
}

#[test]
fn analyze_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spectrum = dir.path().join("w.csv");
    let bound = dir.path().join("b.csv");
    let text = run_args(&[
        "analyze", "--r", "1", "--n", "3", "--variant", "none", "--ebn0", "3,4",
        "--spectrum-out", spectrum.to_str().unwrap(), "--bound-out", bound.to_str().unwrap(),
    ])
    .unwrap();
    assert!(text.contains("exact"));
    assert_eq!(fs::read_to_string(&spectrum).unwrap(), "weight,count\n0,1\n4,14\n8,1\n");
    assert_eq!(fs::read_to_string(&bound).unwrap().lines().count(), 3);
    let text = run_args(&["analyze", "--r", "3", "--n", "7", "--variant", "none", "--method", "formula"]).unwrap();
    assert!(text.contains("16,94488"));
    let text = run_args(&["analyze", "--r", "2", "--n", "5", "--method", "scl", "--list", "64", "--wmax", "8"]).unwrap();
    assert!(text.contains("not exact"));
    assert!(run_args(&["analyze", "--r", "3", "--n", "7", "--method", "formula"]).is_err());
}

#[test]
fn campaign_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("perms.toml"),
        rmae::autgroup::perms_to_toml(&rmae::autgroup::sample_blta_pl(5, 4, 2).unwrap()),
    )
    .unwrap();
    let config = dir.path().join("campaign.toml");
    fs::write(
        &config,
        r#"
seed = 3
ebn0_db = [1.0, 2.0]

[code]
r = 2
n = 5
variant = [1, 2]

[stop]
min_errors = 20
max_trials = 2000

[[decoder]]
kind = "scl"
list = 4

[[decoder]]
kind = "ae"
list = 2
m = 4
group = "blta-pl"
include_identity = true

[[decoder]]
kind = "ae"
list = 2
perm_file = "perms.toml"
label = "from-file"

[output]
csv = "out.csv"
json = "out.json"
"#,
    )
    .unwrap();
    let cfg = CampaignConfig::from_toml(&fs::read_to_string(&config).unwrap()).unwrap();
    assert_eq!(cfg.decoders.len(), 3);
    run_args(&["simulate", "--config", config.to_str().unwrap()]).unwrap();
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let labels: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels, ["SCL-4", "SCL-4", "AE-4-SCL-2", "AE-4-SCL-2", "from-file", "from-file"]);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 6);
    let stdout = run_args(&[
        "simulate", "--config", config.to_str().unwrap(), "--ebn0", "1", "--max-trials", "50",
        "--csv", dir.path().join("b.csv").to_str().unwrap(),
    ])
    .unwrap();
    assert!(stdout.is_empty());
    let small = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(small.lines().count(), 4);
    assert!(CampaignConfig::from_toml("bogus = 1").is_err());
}

#[test]
fn campaign_determinism_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(
        &config,
        "ebn0_db = [1.5]\nseed = 9\n[code]\nr = 2\nn = 5\n[stop]\nmin_errors = 30\nmax_trials = 5000\n[[decoder]]\nkind = \"sc\"\n",
    )
    .unwrap();
    let c = config.to_str().unwrap();
    assert_eq!(
        run_args(&["simulate", "--config", c]).unwrap(),
        run_args(&["--workers", "3", "simulate", "--config", c]).unwrap()
    );
}

#[test]
fn table_recipe() {
    let text = run_args(&["repro", "table1"]).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let stable: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    let unknown: Vec<&str> = rows.iter().map(|r| r[5]).collect();
    assert_eq!(stable, ["22", "29", "29", "8"]);
    assert_eq!(unknown, ["65536", "333824", "190464", "75776"]);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rmae");
    let ok = Command::new(bin).args(["construct", "--r", "1", "--n", "3"]).output().unwrap();
    assert!(ok.status.success());
    let bad = Command::new(bin).args(["construct", "--r", "9", "--n", "3"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error: "));
    let capped = Command::new(bin)
        .args(["analyze", "--r", "3", "--n", "7", "--method", "brute"])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
}
