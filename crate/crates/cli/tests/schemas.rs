use std::path::Path;

use procosheaf_cli::export::{export_fixture, ExportFormat};
use procosheaf_cli::{run_suite, Ctx, Registry};
use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema").join(name);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&v).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{what}: {errors:?}");
}

#[test]
fn shipped_fixture_files_match_their_schema() {
    let v = schema("fixture.v1.schema.json");
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid(&v, &doc, &path.display().to_string());
    }
    let bad = serde_json::json!([{ "name": "x", "kind": "nope", "generator": "cantor" }]);
    assert!(!v.is_valid(&bad));
}

#[test]
fn reports_match_their_schema() {
    let v = schema("report.v1.schema.json");
    let r = Registry::shipped().unwrap();
    for fixture in [None, Some("bad-coequalizer")] {
        let ctx = Ctx { fixture: fixture.map(str::to_string), ..Ctx::new(r.clone()) };
        let report = run_suite("fam-regularity", &ctx).unwrap();
        assert_valid(&v, &serde_json::to_value([report]).unwrap(), "fam-regularity report");
    }
}

#[test]
fn exports_match_their_schema() {
    let v = schema("export.v1.schema.json");
    let r = Registry::shipped().unwrap();
    for name in ["cantor", "one-point", "cantor-z2", "point-s3", "two-point-family", "double-cantor", "fold-two-points"]
    {
        let doc: Value = serde_json::from_str(&export_fixture(&r, name, ExportFormat::Json, 2).unwrap()).unwrap();
        assert_valid(&v, &doc, name);
    }
}
