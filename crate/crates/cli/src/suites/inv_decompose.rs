use anyhow::Result;
use procosheaf::cosheaf::{inv_decompose, CosectionOracle, Cosheaf, CosheafOracle};
use procosheaf::fincat::Kind;
use procosheaf::prospace::ProSpace;
use procosheaf::prosys::{normalize, Flag};
use procosheaf::random;
use serde_json::json;

use super::Ctx;
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "inv-decompose";
pub const RANDOM_CASES: usize = 8;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    if ctx.random_cases() {
        for i in 0..RANDOM_CASES {
            let seed = ctx.case_seed(i);
            rec.case(None, seed, || {
                let space = if i % 2 == 0 { ProSpace::cantor() } else { ProSpace::one_point() };
                let kind = if i % 4 < 2 { Kind::Set } else { Kind::AbelianGroup };
                let a = random::cosheaf_over(&space, kind, seed, 2, i % 8 < 4);
                check(&CosheafOracle::new(&a), &a, ctx)
            });
        }
    }
    for d in ctx.fixtures(FixtureKind::Cosheaf, NAME) {
        rec.case(Some(&d.name), ctx.seed, || {
            let a = ctx.registry.cosheaf(&d.name)?;
            if !a.kind().has_coproducts() {
                return Ok(Flag::Exact);
            }
            check(&CosheafOracle::new(&a), &a, ctx)
        });
    }
    for d in ctx.fixtures(FixtureKind::Oracle, NAME) {
        let Some(reference) = d.params.get("cosheaf").and_then(|v| v.as_str()).map(str::to_string) else {
            continue;
        };
        rec.case(Some(&d.name), ctx.seed, || {
            let Loaded::Oracle(o) = ctx.registry.load_fixture(&d.name)? else {
                unreachable!("oracle fixtures load to oracles")
            };
            check(o.as_ref(), &ctx.registry.cosheaf(&reference)?, ctx)
        });
    }
    rec.finish()
}

/// The chain rebuilt from the oracle's cell images agrees with the
/// eventual-image normalization of the reference cosheaf.
fn check(o: &dyn CosectionOracle, a: &Cosheaf, ctx: &Ctx) -> Result<Flag> {
    let dec = inv_decompose(o, ctx.truncation, ctx.window)?;
    let chain = dec.to_chain()?;
    chain.check(dec.truncation())?;
    if let Some((n, x)) = dec.mismatch_with_normalization(a)? {
        let got = dec.levels[n].fibre(x).order();
        ensure(
            false,
            "decomposition differs from the normalized cosheaf",
            || json!({ "level": n, "point": x, "fibre_order": got.to_string(), "original_order": a.level(n).fibre(x).order().to_string() }),
        )?;
    }
    Ok(normalize(a.chain(), ctx.window).flag)
}
