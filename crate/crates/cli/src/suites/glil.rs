use anyhow::Result;
use procosheaf::cosheaf::Cosheaf;
use procosheaf::fam;
use procosheaf::fincat::Kind;
use procosheaf::prosys::Flag;
use procosheaf::Error;
use serde_json::json;

use super::Ctx;
use crate::fixtures::{FixtureDescriptor, FixtureKind};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "glil";
pub const LEVELS: usize = 6;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    for d in ctx.fixtures(FixtureKind::Cosheaf, NAME) {
        rec.case(Some(&d.name), ctx.seed, || check(&ctx.registry.cosheaf(&d.name)?, &d));
    }
    rec.finish()
}

fn check(a: &Cosheaf, d: &FixtureDescriptor) -> Result<Flag> {
    if !a.kind().has_coproducts() {
        let r = a.global_cosections();
        ensure(
            matches!(r, Err(Error::NoCoproduct(_))),
            "global cosections of groups must be refused",
            || json!({ "kind": a.kind() }),
        )?;
        return Ok(Flag::Exact);
    }
    let gc = a.global_cosections()?;
    let whole = a.cosections(&a.base().whole())?;
    for n in 0..=LEVELS {
        let level = a.level(n);
        let expected = fam::global_cosections(&level)?.obj;
        ensure(
            gc.level(n) == expected,
            "global cosections differ from the levelwise coproduct",
            || json!({ "level": n }),
        )?;
        ensure(
            whole.level(n) == expected,
            "cosections of the whole space differ from the levelwise coproduct",
            || json!({ "level": n }),
        )?;
        let oracle = match a.kind() {
            Kind::Set => level.fibres().iter().map(|f| f.order()).sum::<u128>(),
            _ => level.fibres().iter().fold(1u128, |acc, f| acc.saturating_mul(f.order())),
        };
        ensure(
            gc.level(n).order() == oracle,
            "global cosection order differs from the fibre count",
            || json!({ "level": n, "expected": oracle.to_string(), "got": gc.level(n).order().to_string() }),
        )?;
        if n < LEVELS {
            let t = fam::global_map(&a.transition(n))?;
            ensure(
                gc.transition(n) == t,
                "global cosection transition differs from the induced map",
                || json!({ "level": n }),
            )?;
            ensure(
                whole.transition(n) == t,
                "whole-space cosection transition differs from the induced map",
                || json!({ "level": n }),
            )?;
        }
    }
    if let Some(v) = d.expected("global-orders") {
        let orders: Vec<u128> = serde_json::from_value(v.clone())?;
        for (n, &want) in orders.iter().enumerate() {
            let got = gc.level(n).order();
            ensure(
                got == want,
                "global cosection order differs from the frozen value",
                || json!({ "level": n, "expected": want.to_string(), "got": got.to_string() }),
            )?;
        }
    }
    Ok(Flag::Exact)
}
