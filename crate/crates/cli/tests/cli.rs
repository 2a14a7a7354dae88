use std::process::Command;

use procosheaf::json::FamMorDto;
use procosheaf_cli::export::{export_fixture, import, ExportFormat, Exported, Imported};
use procosheaf_cli::fixtures::FixtureKind;
use procosheaf_cli::{run_suite, Ctx, Registry, VerificationReport};

fn procosh(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_procosh")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn every_shipped_fixture_loads() {
    let r = Registry::shipped().unwrap();
    for d in r.descriptors() {
        r.load_fixture(&d.name).unwrap_or_else(|e| panic!("{}: {e:#}", d.name));
    }
}

#[test]
fn reports_are_deterministic_given_the_seed() {
    let ctx = Ctx { seed: 42, ..Ctx::new(Registry::shipped().unwrap()) };
    for suite in ["fam-regularity", "key-lemma", "bundle"] {
        let a = run_suite(suite, &ctx).unwrap().without_timing();
        let b = run_suite(suite, &ctx).unwrap().without_timing();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn reports_round_trip_through_json() {
    let r = Registry::shipped().unwrap();
    let ctx = Ctx { fixture: Some("cantor-z2-dropped".into()), ..Ctx::new(r) };
    let report = run_suite("glil", &ctx).unwrap();
    assert_eq!(report.failed, 1);
    let back: VerificationReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn exported_cosheaves_reimport_levelwise_equal() {
    let r = Registry::shipped().unwrap();
    let names: Vec<String> = r.positive(FixtureKind::Cosheaf, "").iter().map(|d| d.name.clone()).collect();
    for name in names {
        let text = export_fixture(&r, &name, ExportFormat::Json, 3).unwrap();
        let Exported::Cosheaf(before) = serde_json::from_str(&text).unwrap() else { panic!("{name} is not a cosheaf") };
        let Imported::Cosheaf(after) = import(&text).unwrap() else { panic!("{name} did not import as a cosheaf") };
        for n in 0..=3 {
            assert_eq!(procosheaf::json::FamObjDto::from(&after.level(n)), before.levels[n], "{name} level {n}");
        }
        assert_eq!(export_fixture(&r, &name, ExportFormat::Json, 3).unwrap(), text, "{name} export is not stable");
    }
}

#[test]
fn exported_morphism_has_base_and_fibre_tables() {
    let r = Registry::shipped().unwrap();
    let text = export_fixture(&r, "fold-two-points", ExportFormat::Json, 0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["kind"], "morphism");
    assert_eq!(v["data"]["base"], serde_json::json!([0, 0]));
    assert_eq!(v["data"]["fibre_maps"].as_array().unwrap().len(), 2);
    let dto: FamMorDto = serde_json::from_value(v["data"].clone()).unwrap();
    assert!(dto.fibre_maps.iter().all(|m| m.table.is_some()));
}

#[test]
fn bundle_exports_as_dot_and_json() {
    let r = Registry::shipped().unwrap();
    let dot = export_fixture(&r, "double-cantor", ExportFormat::Dot, 2).unwrap();
    assert!(dot.starts_with("digraph bundle"));
    let text = export_fixture(&r, "double-cantor", ExportFormat::Json, 2).unwrap();
    let Imported::Bundle(p) = import(&text).unwrap() else { panic!("not a bundle") };
    assert_eq!((0..=2).map(|n| p.total.size(n)).collect::<Vec<_>>(), [2, 4, 8]);
}

#[test]
fn exit_codes() {
    assert_eq!(procosh(&["verify", "--suite", "glil"]).0, 0);
    assert_eq!(procosh(&["verify", "--suite", "glil", "--fixture", "cantor-z2-dropped"]).0, 1);
    assert_eq!(procosh(&["verify", "--suite", "no-such-suite"]).0, 2);
    assert_eq!(procosh(&["verify", "--no-such-flag"]).0, 2);
    assert_eq!(procosh(&["demo", "no-such-demo"]).0, 2);
    assert_eq!(procosh(&["export", "--fixture", "no-such-fixture"]).0, 2);
}

#[test]
fn verify_all_flags_a_corrupted_fixture() {
    let (code, out) = procosh(&["verify", "--suite", "all", "--fixture", "z3-corrupt-mult", "--format", "json"]);
    assert_eq!(code, 1);
    let reports: Vec<VerificationReport> = serde_json::from_str(&out).unwrap();
    let failures: Vec<_> = reports.iter().flat_map(|r| &r.failures).collect();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|f| !f.witness.is_null()));
}

#[test]
fn cantor_dot_export_from_the_binary() {
    let (code, out) = procosh(&["export", "--fixture", "cantor", "--format", "dot", "--truncation", "2"]);
    assert_eq!(code, 0);
    let nodes: std::collections::BTreeSet<&str> = out.split('"').skip(1).step_by(2).collect();
    assert_eq!(nodes.len(), 7);
}

#[test]
fn fixture_directory_override() {
    let dir = std::env::temp_dir().join(format!("procosh-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("one.json"), r#"[{"name": "only-cantor", "kind": "space", "generator": "cantor"}]"#)
        .unwrap();
    let out =
        Command::new(env!("CARGO_BIN_EXE_procosh")).arg("list").env("PROCOSH_FIXTURE_DIR", &dir).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(out.status.success());
    assert!(text.contains("only-cantor"));
    assert!(!text.contains("cantor-z2"));
}
