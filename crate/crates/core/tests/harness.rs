use std::collections::BTreeSet;

use efikit::harness::anchors::{is_registered, ANCHORS};
use efikit::harness::config::{FamilyChoice, PairChoice};
use efikit::harness::report::SCHEMA_VERSION;
use efikit::harness::{self, Command, ExperimentConfig, Report, VerifySection};
use efikit::Error;

const DOC_EXAMPLE: &str = r#"
seed = 7

[params]
n = 4
m = 2
eps = 0.25
r = 13
delta = 2.0
gamma = 0.5
l_max = 14
samples = 8
advice = 4
k = 1.0
ell = 1

[input]
pair = "orthogonal"
family = "toy"
state = "random"

[verify]
suite = "all"
pairs = 1000

[output]
dir = "out"
"#;

fn quick() -> ExperimentConfig {
    ExperimentConfig {
        verify: VerifySection::quick(),
        ..Default::default()
    }
}

fn check<'a>(rep: &'a Report, name: &str) -> &'a harness::Check {
    rep.checks
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check named {name:?}"))
}

/// Rows of a table as string fields, header first.
fn table(rep: &Report, stem: &str) -> Vec<Vec<String>> {
    let bytes = rep
        .tables
        .get(stem)
        .unwrap_or_else(|| panic!("no table {stem}"));
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(bytes.as_slice())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = rows[0].iter().position(|h| h == name).unwrap();
    rows[1..].iter().map(|r| r[i].clone()).collect()
}

#[test]
fn documented_example_parses() {
    let cfg = ExperimentConfig::parse(DOC_EXAMPLE).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.params.eps, Some(0.25));
    assert_eq!(cfg.params.samples, Some(8));
    assert_eq!(cfg.input.pair, PairChoice::Orthogonal);
    assert_eq!(cfg.input.family, FamilyChoice::Toy);
    assert_eq!(cfg.verify.pairs, 1000);
    assert_eq!(cfg.output.dir.as_deref(), Some(std::path::Path::new("out")));
}

#[test]
fn empty_file_is_the_default() {
    assert_eq!(
        ExperimentConfig::parse("").unwrap(),
        ExperimentConfig::default()
    );
}

#[test]
fn malformed_configs_are_config_errors() {
    for text in [
        "sede = 1",
        "[params]\nepsilon = 0.1",
        "seed = \"seven\"",
        "[params]\neps = 1.5",
        "[params]\neps = 0.0",
        "[params]\ngamma = -1.0",
        "[params]\nm = 0",
        "[params]\nsamples = 1",
        "[input]\npair = \"parallel\"",
        "[verify]\nsuite = \"everything\"",
        "[verify]\nmc_samples = 1",
        "seed = ",
    ] {
        match ExperimentConfig::parse(text) {
            Err(Error::Config(_)) => {}
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}

#[test]
fn missing_file_is_a_config_error() {
    let err = ExperimentConfig::load(std::path::Path::new("/nonexistent/efikit.toml")).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn run_validates_before_work() {
    let mut cfg = ExperimentConfig::default();
    cfg.params.eps = Some(2.0);
    for cmd in [Command::Pipeline, Command::Kolmo, Command::Verify] {
        assert!(matches!(harness::run(cmd, &cfg), Err(Error::Config(_))));
    }
}

fn assert_same_outputs(a: &Report, b: &Report) {
    assert_eq!(a.checks_csv().unwrap(), b.checks_csv().unwrap());
    assert_eq!(a.tables, b.tables);
    assert_eq!(a.parameters, b.parameters);
    assert_eq!(a.notes, b.notes);
}

#[test]
fn runs_are_deterministic() {
    let mut cfg = quick();
    cfg.seed = 11;
    for cmd in [
        Command::Kolmo,
        Command::Pipeline,
        Command::Entropy,
        Command::Extract,
    ] {
        let a = harness::run(cmd, &cfg).unwrap();
        let b = harness::run(cmd, &cfg).unwrap();
        assert_same_outputs(&a, &b);
    }
    cfg.verify.suite = harness::Suite::Metrics;
    let a = harness::run(Command::Verify, &cfg).unwrap();
    let b = harness::run(Command::Verify, &cfg).unwrap();
    assert_same_outputs(&a, &b);
}

#[test]
fn seed_changes_monte_carlo_draws() {
    let mut cfg = quick();
    cfg.input.family = FamilyChoice::Haar;
    let a = harness::run(Command::Kolmo, &cfg).unwrap();
    cfg.seed = 1;
    let b = harness::run(Command::Kolmo, &cfg).unwrap();
    assert_ne!(a.tables, b.tables);
}

#[test]
fn quick_verify_passes_and_uses_every_anchor() {
    let rep = harness::run(Command::Verify, &quick()).unwrap();
    for c in rep.failures() {
        eprintln!(
            "FAIL {} value={} bound={} {}",
            c.name, c.value, c.bound, c.detail
        );
    }
    assert!(rep.passed);
    let used: BTreeSet<&str> = rep.checks.iter().map(|c| c.anchor.as_str()).collect();
    for tag in &used {
        assert!(is_registered(tag), "unregistered anchor {tag}");
    }
    for (tag, _) in ANCHORS {
        assert!(used.contains(tag), "anchor {tag} never checked");
    }
}

#[test]
fn every_criterion_has_parts() {
    for k in 1..=12u8 {
        let rep = harness::run_criterion(k, &quick()).unwrap();
        assert!(!rep.checks.is_empty(), "criterion {k}");
    }
    assert!(harness::run_criterion(0, &quick()).is_err());
    assert!(harness::run_criterion(13, &quick()).is_err());
}

#[test]
fn toy_family_decider_has_advantage() {
    let rep = harness::run(Command::Kolmo, &quick()).unwrap();
    assert!(rep.passed);
    let adv = check(&rep, "Helstrom decider advantage");
    assert!(adv.value >= 0.1, "advantage {}", adv.value);
    assert!(check(&rep, "extracted average distance vs 1/4").value >= 0.25);
    let rows = table(&rep, "classification");
    assert!(rows.len() > 1);
    for label in column(&rows, "label") {
        assert!(
            ["low", "high", "neither"].contains(&label.as_str()),
            "{label}"
        );
    }
}

#[test]
fn haar_family_has_no_advantage() {
    let mut cfg = quick();
    cfg.input.family = FamilyChoice::Haar;
    let rep = harness::run(Command::Kolmo, &cfg).unwrap();
    let c = check(&rep, "all-Haar advantage vs 3 SE");
    assert!(c.pass && c.value <= c.bound);
}

#[test]
fn codec_cap_overflow_is_a_config_error() {
    let mut cfg = quick();
    cfg.params.l_max = Some(27);
    assert!(matches!(
        harness::run(Command::Kolmo, &cfg),
        Err(Error::Config(_))
    ));
}

#[test]
fn orthogonal_pair_pipeline() {
    let rep = harness::run(Command::Pipeline, &quick()).unwrap();
    assert!(rep.passed);
    let rows = table(&rep, "pipeline");
    let gap: f64 = column(&rows, "gap")[0].parse().unwrap();
    assert!((gap - 1.0).abs() < 1e-9);
    assert_eq!(column(&rows, "m")[0], "2");
    assert_eq!(column(&rows, "stretch")[0], "2");
    assert!(check(&rep, "log|L| coefficient cancels exactly").pass);
}

#[test]
fn identical_pair_is_refused_downstream() {
    let mut cfg = quick();
    cfg.input.pair = PairChoice::Identical;
    let rep = harness::run(Command::Pipeline, &cfg).unwrap();
    assert!(!rep.passed);
    assert!(!check(&rep, "entropy gap is non-degenerate").pass);
    assert!(rep
        .notes
        .iter()
        .any(|n| n.contains("downstream stages skipped")));
    assert!(!rep.tables.contains_key("pipeline"));
}

#[test]
fn near_orthogonal_pair_has_positive_gap() {
    let mut cfg = quick();
    cfg.input.pair = PairChoice::NearOrthogonal;
    let rep = harness::run(Command::Pipeline, &cfg).unwrap();
    assert!(check(&rep, "entropy gap S(sigma1) - S(sigma0)").value > 0.0);
    assert!(check(&rep, "block-diagonal entropy formula residual").pass);
}

#[test]
fn eps_sweep_tightens_the_tau1_bound() {
    let mut bounds = Vec::new();
    for eps in [0.45, 0.3, 0.2] {
        let mut cfg = quick();
        cfg.params.eps = Some(eps);
        let rep = harness::run(Command::Pipeline, &cfg).unwrap();
        assert!(rep.passed, "eps {eps}");
        let rows = table(&rep, "pipeline");
        let bound: f64 = column(&rows, "tau1_bound")[0].parse().unwrap();
        let dist: f64 = column(&rows, "tau1_distance")[0].parse().unwrap();
        assert!(dist <= bound);
        bounds.push(bound);
    }
    assert!(bounds.windows(2).all(|w| w[1] < w[0]), "{bounds:?}");
}

#[test]
fn entropy_and_extract_commands_pass() {
    for cmd in [Command::Entropy, Command::Extract] {
        let rep = harness::run(cmd, &quick()).unwrap();
        assert!(rep.passed, "{}", cmd.name());
        assert_eq!(rep.command, cmd.name());
    }
}

#[test]
fn report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out");
    let rep = harness::run(Command::Kolmo, &quick()).unwrap();
    let written = rep.write_to(&out).unwrap();
    let names: BTreeSet<String> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for f in [
        "report.json",
        "checks.csv",
        "complexity.csv",
        "classification.csv",
    ] {
        assert!(names.contains(f), "missing {f}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    assert_eq!(SCHEMA_VERSION, 1);
    assert_eq!(json["command"], "kolmo");
    assert_eq!(json["checks"].as_array().unwrap().len(), rep.checks.len());
    let csv = std::fs::read(out.join("checks.csv")).unwrap();
    assert_eq!(csv, rep.checks_csv().unwrap());
    assert_eq!(
        std::fs::read(out.join("complexity.csv")).unwrap(),
        rep.tables["complexity"]
    );
}
