//! Runs the acceptance criteria and prints one line per criterion.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use procosheaf::cosheaf::Cosheaf;
use procosheaf::fincat::FinObj;
use procosheaf::prospace::ProSpace;
use procosheaf::prosys::Flag;
use procosheaf_cli::demo::run_demo;
use procosheaf_cli::{run_suite, Ctx, Registry, VerificationReport, SUITES};

struct Outcome {
    ok: bool,
    detail: String,
}

fn ctx(seed: u64) -> Ctx {
    Ctx { seed, ..Ctx::new(Registry::shipped().expect("shipped fixtures parse")) }
}

fn suite(name: &str, seed: u64) -> VerificationReport {
    run_suite(name, &ctx(seed)).expect("known suite")
}

fn summary(r: &VerificationReport) -> String {
    let mut s = format!("{} cases, {} failed", r.cases_run, r.failed);
    if let Some(f) = r.failures.first() {
        s += &format!("; first failure: {} {}", f.message, f.witness);
    }
    s
}

fn passing_suite(name: &str, seed: u64, min_cases: usize) -> Outcome {
    let r = suite(name, seed);
    Outcome { ok: r.ok() && r.cases_run >= min_cases, detail: summary(&r) }
}

fn key_lemma() -> Outcome {
    passing_suite("key-lemma", 7, 50)
}

fn fam_regularity() -> Outcome {
    passing_suite("fam-regularity", 1, 100)
}

fn glil() -> Outcome {
    let mut o = passing_suite("glil", 0, 1);
    let g = Cosheaf::constant(&FinObj::cyclic(2), &ProSpace::cantor()).global_cosections().unwrap();
    let orders: Vec<u128> = (0..=3).map(|n| g.level(n).order()).collect();
    o.ok &= orders == [2, 4, 16, 256];
    o.detail += &format!("; cantor Z/2 orders {orders:?}");
    o
}

fn hom_formula() -> Outcome {
    let r = suite("hom-formula", 0);
    let exact = r.flags.get(&Flag::Exact).copied().unwrap_or(0);
    Outcome { ok: r.ok() && exact > 0, detail: format!("{}; {exact} exact", summary(&r)) }
}

fn cosheafification() -> Outcome {
    passing_suite("cosheafification", 0, 1)
}

fn costalk() -> Outcome {
    passing_suite("costalk", 0, 1)
}

fn bundle() -> Outcome {
    passing_suite("bundle", 0, 50)
}

fn inv_decompose() -> Outcome {
    passing_suite("inv-decompose", 0, 1)
}

fn negative_controls() -> Outcome {
    let registry = Registry::shipped().unwrap();
    let mut covered = BTreeSet::new();
    let mut problems = Vec::new();
    for d in registry.descriptors().filter(|d| d.negative) {
        for s in &d.suites {
            let c = Ctx { fixture: Some(d.name.clone()), ..Ctx::new(registry.clone()) };
            let r = run_suite(s, &c).expect("known suite");
            let witnessed = r.failed > 0 && r.failures.iter().all(|f| !f.witness.is_null());
            if witnessed {
                covered.insert(s.as_str());
            } else {
                problems.push(format!("{} on {s}", d.name));
            }
        }
    }
    let missing: Vec<_> = SUITES.iter().filter(|s| !covered.contains(**s)).collect();
    Outcome {
        ok: problems.is_empty() && missing.is_empty(),
        detail: format!("{} suites witnessed; not failing: {problems:?}; uncovered: {missing:?}", covered.len()),
    }
}

fn demos() -> Outcome {
    let c = run_demo("cantor-coproduct", 3).unwrap().global_orders();
    let p = run_demo("one-point-product", 3).unwrap().global_orders();
    let g = run_demo("group-bundle", 3).unwrap();
    let want = |xs: &[&str]| xs.iter().map(|s| Some(s.to_string())).collect::<Vec<_>>();
    Outcome {
        ok: c == want(&["2", "4", "16", "256"]) && p == want(&["1", "2", "4", "8"]) && g.ok(),
        detail: format!("cantor {c:?}, one-point {p:?}, group axioms pass {}", g.ok()),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 10] = [
        ("1 key lemma", key_lemma, 30),
        ("2 fam regularity", fam_regularity, 60),
        ("3 global cosections", glil, 10),
        ("4 hom formula", hom_formula, 60),
        ("5 cosheafification", cosheafification, 120),
        ("6 costalks and skyscrapers", costalk, 10),
        ("7 bundle equivalence", bundle, 30),
        ("8 inverse-limit decomposition", inv_decompose, 30),
        ("9 negative controls", negative_controls, 10),
        ("demos", demos, 10),
    ];
    let mut all = true;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let o = run();
        let t = start.elapsed();
        let in_time = t <= Duration::from_secs(budget);
        let ok = o.ok && in_time;
        all &= ok;
        println!(
            "criterion {name}: {} ({:.2}s of {budget}s) {}",
            if ok { "PASS" } else { "FAIL" },
            t.as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
