use anyhow::{anyhow, Result};
use procosheaf::cosheaf::{hom_cosheaf, Cosheaf};
use procosheaf::fam::{self, FamMor};
use procosheaf::fincat::Kind;
use procosheaf::prosys::{Flag, HomPolicy, ProChain};
use procosheaf::random;
use rand::Rng;
use serde_json::json;

use super::Ctx;
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "hom-formula";
pub const RANDOM_CASES: usize = 30;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    if ctx.random_cases() {
        for i in 0..RANDOM_CASES {
            let seed = ctx.case_seed(i);
            rec.case(None, seed, || {
                let mut rng = ctx.rng(seed);
                let kind = if i % 2 == 0 { Kind::Set } else { Kind::AbelianGroup };
                let len = rng.gen_range(1..=3);
                let a = eventually_constant(&mut rng, kind, len)?;
                let b = eventually_constant(&mut rng, kind, if i % 4 < 2 { 1 } else { 2 })?;
                check_pair(&a, &b, ctx)
            });
        }
    }
    for d in ctx.fixtures(FixtureKind::HomPair, NAME) {
        rec.case(Some(&d.name), ctx.seed, || {
            let Loaded::HomPair { source, target } = ctx.registry.load_fixture(&d.name)? else {
                unreachable!("hom-pair fixtures load to pairs")
            };
            check_pair(&source, &target, ctx)
        });
    }
    for d in ctx.fixtures(FixtureKind::Cosheaf, NAME) {
        let Ok(a) = ctx.registry.cosheaf(&d.name) else {
            rec.case(Some(&d.name), ctx.seed, || Err(anyhow!("fixture does not load")));
            continue;
        };
        let Some(c) = a.chain().info().constant_from else { continue };
        rec.case(Some(&d.name), ctx.seed, || {
            check_declared(&a, "source", c, ctx)?;
            Ok(Flag::Exact)
        });
    }
    rec.finish()
}

/// A chain of `len` random families that is constant from level `len - 1`.
fn eventually_constant(rng: &mut impl Rng, kind: Kind, len: usize) -> Result<Cosheaf> {
    let max = if kind == Kind::Set { 2 } else { 4 };
    let mut levels = vec![random::family(rng, kind, 2, max)];
    let mut transitions = Vec::new();
    while levels.len() < len {
        let below = random::family(rng, kind, 2, max);
        if let Some(t) = random::fam_map(rng, levels.last().unwrap(), &below)? {
            levels.push(below);
            transitions.push(t);
        }
    }
    levels.reverse();
    transitions.reverse();
    Ok(Cosheaf::limit_of_chain(ProChain::from_levels(levels, transitions)?)?)
}

fn image_orders(t: &FamMor) -> Result<Vec<u128>> {
    let (cover, _) = fam::image_factor(t)?;
    Ok(cover.cod().fibres().iter().map(|f| f.order()).collect())
}

/// Declared constancy from level `c`, and stabilization of images by the
/// declared bound at every level up to the truncation.
fn check_declared(x: &Cosheaf, side: &str, c: usize, ctx: &Ctx) -> Result<()> {
    let w = ctx.window;
    for k in c..c + w {
        let t = x.transition(k);
        ensure(
            t.try_is_mono()? && t.try_is_epi()?,
            "declared constant chain has a non-invertible transition",
            || json!({ "side": side, "declared_constant_from": c, "level": k }),
        )?;
    }
    let Some(bound) = x.chain().info().bound() else { return Ok(()) };
    for j in 0..=ctx.truncation.max(c) {
        let (lo, hi) = (x.chain().transition_to(j + bound, j)?, x.chain().transition_to(j + bound + w, j)?);
        let (il, ih) = (image_orders(&lo)?, image_orders(&hi)?);
        ensure(
            il == ih,
            "images have not stabilized by the declared bound",
            || json!({ "side": side, "level": j, "bound": bound, "orders_at_bound": il.iter().map(u128::to_string).collect::<Vec<_>>(), "orders_later": ih.iter().map(u128::to_string).collect::<Vec<_>>() }),
        )?;
    }
    Ok(())
}

fn check_pair(a: &Cosheaf, b: &Cosheaf, ctx: &Ctx) -> Result<Flag> {
    let w = ctx.window;
    let ca = a.chain().info().constant_from.ok_or_else(|| anyhow!("source is not declared eventually constant"))?;
    let cb = b.chain().info().constant_from.ok_or_else(|| anyhow!("target is not declared eventually constant"))?;
    let bound = a.chain().info().bound().ok_or_else(|| anyhow!("source has no declared stabilization bound"))?;
    check_declared(a, "source", ca, ctx)?;
    check_declared(b, "target", cb, ctx)?;
    let lookahead = bound.max(w);
    let n = ctx.truncation.max(ca).max(cb);
    let policy = HomPolicy { truncation: n, normalize_lookahead: Some(lookahead), identify_window: w };
    let hom = hom_cosheaf(a, b, policy)?;

    let top = a.chain().transition_to(n + lookahead, n)?;
    let (cover, _) = fam::image_factor(&top)?;
    let target = b.level(n);
    let brute = fam::hom_set(cover.cod(), &target)?;
    ensure(
        hom.count() == brute.len(),
        "Hom classes differ from brute-force Hom on the plateau",
        || json!({ "level": n, "classes": hom.count(), "brute_force": brute.len() }),
    )?;

    // The canonical map from plateau maps to classes seen from level n.
    let mut seen: Vec<FamMor> = Vec::new();
    for g in fam::hom_set(&a.level(n), &target)? {
        let r = fam::compose(&g, &top)?;
        if !seen.contains(&r) {
            seen.push(r);
        }
    }
    let mut images: Vec<FamMor> = Vec::with_capacity(brute.len());
    for phi in &brute {
        let r = fam::compose(phi, &cover)?;
        ensure(!images.contains(&r), "canonical map is not injective", || json!({ "level": n }))?;
        images.push(r);
    }
    ensure(
        images.len() == seen.len() && images.iter().all(|r| seen.contains(r)),
        "canonical map is not surjective",
        || json!({ "level": n, "plateau_maps": images.len(), "classes_from_level": seen.len() }),
    )?;
    let next = hom_cosheaf(a, b, HomPolicy { truncation: n + 1, ..policy })?;
    ensure(
        next.count() == hom.count(),
        "Hom classes change past the plateau",
        || json!({ "level": n, "classes": hom.count(), "classes_next": next.count() }),
    )?;
    Ok(hom.flag)
}
