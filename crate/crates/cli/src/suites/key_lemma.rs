use std::sync::Arc;

use anyhow::Result;
use procosheaf::cosheaf::{disjoint_union_witness, CosectionOracle, CosheafOracle};
use procosheaf::fincat::Kind;
use procosheaf::prospace::{ClopenSet, ProSpace};
use procosheaf::prosys::Flag;
use procosheaf::random;
use rand::Rng;
use serde_json::json;

use super::{clopen_json, disjoint_pair, Ctx};
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "key-lemma";
pub const RANDOM_CASES: usize = 60;
const MAX_LEVEL: usize = 4;
const PAIRS_PER_FIXTURE: usize = 4;
const FIXTURE_SEED_OFFSET: usize = 1 << 16;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    let max_level = MAX_LEVEL.min(ctx.truncation).max(1);
    if ctx.random_cases() {
        for i in 0..RANDOM_CASES {
            let seed = ctx.case_seed(i);
            rec.case(None, seed, || {
                let mut rng = ctx.rng(seed);
                let space = if i % 2 == 0 { ProSpace::cantor() } else { ProSpace::one_point() };
                let kind = if i % 4 < 2 { Kind::Set } else { Kind::AbelianGroup };
                let a = random::cosheaf_over(&space, kind, seed, 3, rng.gen_bool(0.5));
                let (u, v) = disjoint_pair(&space, &mut rng, max_level)?;
                check_pair(&CosheafOracle::new(&a), &u, &v, ctx.truncation.max(max_level))
            });
        }
    }
    let mut oracles: Vec<(String, Arc<dyn CosectionOracle>)> = Vec::new();
    for d in ctx.fixtures(FixtureKind::Cosheaf, NAME).into_iter().chain(ctx.fixtures(FixtureKind::Oracle, NAME)) {
        match ctx.registry.load_fixture(&d.name) {
            Ok(Loaded::Cosheaf(a)) => {
                if a.kind().has_coproducts() && a.base().size(max_level) >= 2 {
                    oracles.push((d.name.clone(), Arc::new(CosheafOracle::new(&a))));
                }
            }
            Ok(Loaded::Oracle(o)) => {
                if o.kind().has_coproducts() {
                    oracles.push((d.name.clone(), o));
                }
            }
            Ok(_) => {}
            Err(e) => rec.case(Some(&d.name), ctx.seed, || Err(e)),
        }
    }
    for (name, o) in &oracles {
        for j in 0..PAIRS_PER_FIXTURE {
            let seed = ctx.case_seed(FIXTURE_SEED_OFFSET + j);
            rec.case(Some(name), seed, || {
                let (u, v) = disjoint_pair(o.space(), &mut ctx.rng(seed), max_level)?;
                check_pair(o.as_ref(), &u, &v, ctx.truncation.max(max_level))
            });
        }
    }
    rec.finish()
}

/// The comparison `cos(U) ⊔ cos(V) → cos(U ⊔ V)` is an isomorphism,
/// natural in the level, at every level from the clopens' up to `top`.
fn check_pair(o: &dyn CosectionOracle, u: &ClopenSet, v: &ClopenSet, top: usize) -> Result<Flag> {
    for m in u.level.max(v.level)..=top {
        let w = disjoint_union_witness(o, u, v, m)?;
        ensure(w.holds(), "cosections of a disjoint union are not the coproduct", || {
            json!({
                "level": m,
                "u": clopen_json(u),
                "v": clopen_json(v),
                "invertible": w.inverse.is_some(),
                "round_trip": w.round_trip,
                "natural": w.natural,
                "comparison_dom_order": w.comparison.dom().order().to_string(),
                "comparison_cod_order": w.comparison.cod().order().to_string(),
            })
        })?;
    }
    Ok(Flag::Exact)
}
