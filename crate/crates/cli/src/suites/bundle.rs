use std::collections::BTreeMap;

use anyhow::Result;
use procosheaf::bundle::{
    self, bundle_round_trip_failure, chain_difference, check_group_object, finite_group_object, from_bundle,
    from_group_object, group_round_trip_failure, to_bundle, to_group_object, GroupLevel, GroupObjectData, ProBundle,
};
use procosheaf::cosheaf::Cosheaf;
use procosheaf::fam::FamObj;
use procosheaf::fincat::{self, FinObj, Kind};
use procosheaf::prospace::ProSpace;
use procosheaf::prosys::Flag;
use procosheaf::random;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::{clopen_json, Ctx};
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "bundle";
pub const RANDOM_CASES: usize = 64;
const MAX_FIBRE: usize = 3;
const MAX_GROUP: usize = 8;
const PRODUCT_LEVELS: usize = 3;

fn space(i: usize) -> ProSpace {
    match i % 3 {
        0 => ProSpace::cantor(),
        1 => ProSpace::one_point(),
        _ => ProSpace::finite(3),
    }
}

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    let levels = ctx.truncation;
    if ctx.random_cases() {
        for i in 0..RANDOM_CASES {
            let seed = ctx.case_seed(i);
            rec.case(None, seed, || {
                let mut rng = ctx.rng(seed);
                let x = space(i / 4);
                match i % 4 {
                    0 => {
                        set_round_trip(&random::cosheaf_over(&x, Kind::Set, seed, MAX_FIBRE, rng.gen_bool(0.5)), levels)
                    }
                    1 => scrambled_bundle(&mut rng),
                    2 => group_round_trip(
                        &random::cosheaf_over(&x, Kind::Group, seed, MAX_GROUP, rng.gen_bool(0.5)),
                        levels,
                    ),
                    _ => relabelled_group_object(&mut rng),
                }
            });
        }
        for i in 0..3 {
            let seed = ctx.case_seed((1 << 16) + i);
            rec.case(None, seed, || terminal_example(&space(i), &mut ctx.rng(seed), levels));
        }
    }
    for d in ctx.fixtures(FixtureKind::Bundle, NAME).into_iter().chain(ctx.fixtures(FixtureKind::GroupObject, NAME)) {
        rec.case(Some(&d.name), ctx.seed, || match ctx.registry.load_fixture(&d.name)? {
            Loaded::Bundle(b) => bundle_fixture(&b, levels),
            Loaded::GroupObject(g) => group_object_checks(&g, levels),
            _ => unreachable!("bundle fixtures load to bundles"),
        });
    }
    rec.finish()
}

fn set_round_trip(a: &Cosheaf, levels: usize) -> Result<Flag> {
    let b = to_bundle(a)?;
    let bad = b.check(levels)?;
    ensure(bad.is_none(), "bundle projection does not commute with transitions", || json!({ "level": bad }))?;
    let back = chain_difference(&from_bundle(&b)?, a, levels);
    ensure(back.is_none(), "from_bundle ∘ to_bundle differs from the cosheaf", || json!({ "level": back }))?;
    let trip = bundle_round_trip_failure(&b, levels)?;
    ensure(trip.is_none(), "to_bundle ∘ from_bundle is not isomorphic to the bundle", || json!({ "level": trip }))?;
    let square = from_bundle(&b.fibre_product(&b)?)?;
    for n in 0..=levels.min(PRODUCT_LEVELS) {
        let want: Vec<u128> = a.level(n).fibres().iter().map(|f| f.order() * f.order()).collect();
        let got: Vec<u128> = square.level(n).fibres().iter().map(FinObj::order).collect();
        ensure(
            got == want,
            "fibre product fibres are not products of fibres",
            || json!({ "level": n, "expected": want.iter().map(u128::to_string).collect::<Vec<_>>(), "got": got.iter().map(u128::to_string).collect::<Vec<_>>() }),
        )?;
    }
    Ok(Flag::Exact)
}

/// A finite bundle whose total space is not sorted by fibre.
fn scrambled_bundle(rng: &mut impl Rng) -> Result<Flag> {
    let base = rng.gen_range(1..=4);
    let total = rng.gen_range(0..=8);
    let p: Vec<usize> = (0..total).map(|_| rng.gen_range(0..base)).collect();
    let p2 = p.clone();
    let b = ProBundle::new(ProSpace::finite(total), ProSpace::finite(base), move |_| p2.clone());
    bundle_fixture(&b, 2)?;
    let a = from_bundle(&b)?;
    let want: Vec<u128> = (0..base).map(|x| p.iter().filter(|&&y| y == x).count() as u128).collect();
    let got: Vec<u128> = a.level(0).fibres().iter().map(FinObj::order).collect();
    ensure(
        got == want,
        "cosheaf of a bundle has the wrong fibres",
        || json!({ "projection": p, "fibres": got.iter().map(u128::to_string).collect::<Vec<_>>() }),
    )?;
    Ok(Flag::Exact)
}

fn bundle_fixture(b: &ProBundle, levels: usize) -> Result<Flag> {
    let bad = b.check(levels)?;
    ensure(bad.is_none(), "bundle projection does not commute with transitions", || json!({ "level": bad }))?;
    let trip = bundle_round_trip_failure(b, levels)?;
    ensure(trip.is_none(), "to_bundle ∘ from_bundle is not isomorphic to the bundle", || json!({ "level": trip }))?;
    let a = from_bundle(b)?;
    let again = chain_difference(&from_bundle(&to_bundle(&a)?)?, &a, levels);
    ensure(again.is_none(), "from_bundle ∘ to_bundle differs from the cosheaf", || json!({ "level": again }))?;
    Ok(Flag::Exact)
}

fn group_object_checks(d: &GroupObjectData, levels: usize) -> Result<Flag> {
    let report = check_group_object(d, levels);
    if let Some(f) = report.first_failure() {
        ensure(
            false,
            "group-object axiom fails",
            || json!({ "level": f.level, "axiom": f.axiom, "elements": f.witness }),
        )?;
    }
    let trip = group_round_trip_failure(d, levels)?;
    ensure(
        trip.is_none(),
        "to_group_object ∘ from_group_object is not isomorphic to the group object",
        || json!({ "level": trip }),
    )?;
    Ok(Flag::Exact)
}

fn group_round_trip(g: &Cosheaf, levels: usize) -> Result<Flag> {
    let d = to_group_object(g)?;
    group_object_checks(&d, levels)?;
    let back = chain_difference(&from_group_object(&d, levels)?, g, levels);
    ensure(
        back.is_none(),
        "from_group_object ∘ to_group_object differs from the cosheaf",
        || json!({ "level": back }),
    )?;
    let sets = chain_difference(&bundle::underlying_sets(g)?, &from_bundle(&d.underlying)?, levels);
    ensure(sets.is_none(), "underlying bundle differs from the underlying sets", || json!({ "level": sets }))?;
    Ok(Flag::Exact)
}

/// A group object on a finite base stored under a random relabelling of
/// its total space.
fn relabelled_group_object(rng: &mut impl Rng) -> Result<Flag> {
    let fam = random::family(rng, Kind::Group, 3, MAX_GROUP);
    let d0 = to_group_object(&Cosheaf::finite(fam.clone()))?;
    let total = d0.underlying.total.size(0);
    let mut sigma: Vec<usize> = (0..total).collect();
    sigma.shuffle(rng);
    let (p, l) = (d0.underlying.projection_table(0), d0.level(0));
    let mut projection = vec![0; total];
    let mut inv = vec![0; total];
    for e in 0..total {
        projection[sigma[e]] = p[e];
        inv[sigma[e]] = sigma[l.inv[e]];
    }
    let mult: BTreeMap<(usize, usize), usize> =
        l.mult.iter().map(|(&(a, b), &c)| ((sigma[a], sigma[b]), sigma[c])).collect();
    let unit = l.unit.iter().map(|&u| sigma[u]).collect();
    let d = finite_group_object(total, fam.len(), projection, GroupLevel { mult, unit, inv });
    group_object_checks(&d, 2)?;
    let g = from_group_object(&d, 2)?;
    for x in 0..fam.len() {
        let iso = fincat::find_iso(g.level(0).fibre(x), fam.fibre(x))?;
        ensure(
            iso.is_some(),
            "relabelled group object changes a fibre group",
            || json!({ "index": x, "relabelling": sigma }),
        )?;
    }
    Ok(Flag::Exact)
}

/// The identity bundle corresponds to the terminal cosheaf, whose
/// cosections over `U` are the points of `U`.
fn terminal_example(x: &ProSpace, rng: &mut impl Rng, levels: usize) -> Result<Flag> {
    let t = from_bundle(&ProBundle::identity(x))?;
    let diff = chain_difference(&t, &Cosheaf::terminal(Kind::Set, x), levels);
    ensure(diff.is_none(), "identity bundle does not give the terminal cosheaf", || json!({ "level": diff }))?;
    ensure(FamObj::constant(&FinObj::set(1), x.size(0)) == t.level(0), "terminal fibres are not points", || json!({}))?;
    for _ in 0..4 {
        let level = rng.gen_range(0..=levels.min(3));
        let subset: Vec<usize> = (0..x.size(level)).filter(|_| rng.gen_bool(0.5)).collect();
        let u = x.clopen(level, subset)?;
        for m in level..=levels {
            let points = x.at_level(&u, m)?.len() as u128;
            let got = t.cosection_at(&u, m)?.obj().order();
            ensure(
                got == points,
                "terminal cosections differ from the clopen",
                || json!({ "clopen": clopen_json(&u), "level": m, "points": points.to_string(), "cosections": got.to_string() }),
            )?;
        }
    }
    Ok(Flag::Exact)
}
