use std::collections::BTreeSet;

use anyhow::Result;
use procosheaf::fam::{self, FamMor, FamObj};
use procosheaf::fincat::{FinMor, FinObj, Kind};
use procosheaf::json::FamMorDto;
use procosheaf::prosys::Flag;
use procosheaf::random;
use rand::Rng;
use serde_json::{json, Value};

use super::Ctx;
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "fam-regularity";
pub const RANDOM_CASES: usize = 120;
const MAX_INDEX: usize = 4;
const MAX_SET_FIBRE: usize = 6;
const MAX_GROUP_ORDER: usize = 8;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    if ctx.random_cases() {
        for i in 0..RANDOM_CASES {
            let seed = ctx.case_seed(i);
            rec.case(None, seed, || {
                let mut rng = ctx.rng(seed);
                let (kind, max) = match i % 3 {
                    0 => (Kind::Set, MAX_SET_FIBRE),
                    1 => (Kind::AbelianGroup, MAX_GROUP_ORDER),
                    _ => (Kind::Group, MAX_GROUP_ORDER),
                };
                let f = random::any_fam_map(&mut rng, kind, MAX_INDEX, max)?;
                check_map(&f, &mut rng)?;
                Ok(Flag::Exact)
            });
        }
    }
    for d in ctx.fixtures(FixtureKind::Morphism, NAME) {
        let seed = ctx.case_seed(1 << 16);
        rec.case(Some(&d.name), seed, || {
            let Loaded::Morphism { map, claimed_coequalizer } = ctx.registry.load_fixture(&d.name)? else {
                unreachable!("morphism fixtures load to morphisms")
            };
            check_map(&map, &mut ctx.rng(seed))?;
            if let Some(q) = claimed_coequalizer {
                check_claimed_coequalizer(&map, &q)?;
            }
            Ok(Flag::Exact)
        });
    }
    rec.finish()
}

fn map_json(f: &FamMor) -> Value {
    serde_json::to_value(FamMorDto::from(f)).unwrap_or(Value::Null)
}

fn check_map(f: &FamMor, rng: &mut impl Rng) -> Result<()> {
    let (e, m) = fam::image_factor(f)?;
    ensure(
        fam::compose(&m, &e)? == *f,
        "image factorization does not compose to the map",
        || json!({ "map": map_json(f) }),
    )?;
    ensure(e.try_is_epi()?, "image cover is not epic", || json!({ "map": map_json(f), "cover": map_json(&e) }))?;
    ensure(
        m.try_is_mono()?,
        "image inclusion is not monic",
        || json!({ "map": map_json(f), "inclusion": map_json(&m) }),
    )?;
    check_image_orders(f, &m)?;
    check_image_uniqueness(f, &e, &m)?;
    check_pullback_of_epi(&e, rng)?;

    let (k1, k2) = fam::kernel_pair(f)?;
    let (_, q) = fam::coeq_kernel_pair(f)?;
    ensure(
        fam::coequalizes(&q, &k1, &k2)?,
        "coequalizer does not coequalize the kernel pair",
        || json!({ "map": map_json(f), "coequalizer": map_json(&q) }),
    )?;
    if f.kind() == Kind::Set {
        let count = mediating_count(&q, f)?;
        ensure(
            count == 1,
            "the map does not factor uniquely through the coequalizer",
            || json!({ "map": map_json(f), "mediating_maps": count }),
        )?;
        let t_cod = random::family(rng, Kind::Set, MAX_INDEX, 3);
        if let Some(t) = random::fam_map(rng, f.dom(), &t_cod)? {
            if fam::coequalizes(&t, &k1, &k2)? {
                let count = mediating_count(&q, &t)?;
                ensure(
                    count == 1,
                    "a coequalizing map does not factor uniquely",
                    || json!({ "map": map_json(f), "test_map": map_json(&t), "mediating_maps": count }),
                )?;
            }
        }
    }
    Ok(())
}

/// Fibre orders of the image against the union of images (sets) or the
/// subgroup they generate (groups), computed by closure.
fn check_image_orders(f: &FamMor, m: &FamMor) -> Result<()> {
    let ys: BTreeSet<usize> = f.base().iter().copied().collect();
    ensure(
        m.base().iter().copied().eq(ys.iter().copied()),
        "image index set is not the base image",
        || json!({ "map": map_json(f), "image_base": m.base() }),
    )?;
    for (k, &y) in m.base().iter().enumerate() {
        let mut gens = BTreeSet::new();
        for x in f.preimage(y) {
            gens.extend(f.fibre_map(x).table()?);
        }
        let expected = closure_order(f.cod().fibre(y), gens)?;
        let got = m.dom().fibre(k).order();
        ensure(
            got == expected as u128,
            "image fibre has the wrong order",
            || json!({ "map": map_json(f), "index": y, "expected": expected, "got": got.to_string() }),
        )?;
    }
    Ok(())
}

fn closure_order(obj: &FinObj, gens: BTreeSet<usize>) -> Result<usize> {
    if obj.kind() == Kind::Set {
        return Ok(gens.len());
    }
    let mut reached: BTreeSet<usize> = gens.clone();
    reached.insert(0);
    let mut frontier: Vec<usize> = reached.iter().copied().collect();
    while let Some(a) = frontier.pop() {
        for &g in &gens {
            for c in [obj.op(a, g), obj.op(g, a)].into_iter().flatten() {
                if reached.insert(c) {
                    frontier.push(c);
                }
            }
        }
    }
    Ok(reached.len())
}

/// Reindexing the image gives a second factorization; the comparison
/// must be the unique map over both, and invertible.
fn check_image_uniqueness(f: &FamMor, e: &FamMor, m: &FamMor) -> Result<()> {
    let img = e.cod();
    let k = img.len();
    let rev = FamObj::new(img.kind(), img.fibres().iter().rev().cloned().collect())?;
    let sigma = FamMor::new(
        img.clone(),
        rev.clone(),
        (0..k).map(|z| k - 1 - z).collect(),
        img.fibres().iter().map(FinMor::identity).collect(),
    )?;
    let e2 = fam::compose(&sigma, e)?;
    let m2 = fam::compose(m, &sigma.inverse()?)?;
    let phi = fam::factor_through_mono(m, &m2)?;
    ensure(
        phi.try_is_mono()? && phi.try_is_epi()?,
        "comparison of image factorizations is not invertible",
        || json!({ "map": map_json(f) }),
    )?;
    ensure(
        fam::compose(&phi, e)? == e2,
        "comparison does not commute with the covers",
        || json!({ "map": map_json(f) }),
    )?;
    for (z, &y) in m.base().iter().enumerate() {
        let w = m2.base().iter().position(|&v| v == y).expect("same image indices");
        let (src, tgt) = (m.fibre_map(z).table()?, m2.fibre_map(w).table()?);
        let choices: u128 = src.iter().map(|&c| tgt.iter().filter(|&&d| d == c).count() as u128).product();
        ensure(
            choices == 1,
            "comparison of image factorizations is not unique",
            || json!({ "map": map_json(f), "index": y, "comparisons": choices.to_string() }),
        )?;
    }
    Ok(())
}

fn check_pullback_of_epi(e: &FamMor, rng: &mut impl Rng) -> Result<()> {
    let target = e.cod();
    let c = random::family(rng, e.kind(), MAX_INDEX, 4);
    let g = match random::fam_map(rng, &c, target)? {
        Some(g) => g,
        None => FamMor::identity(target),
    };
    let (_, p1, p2) = fam::pullback(e, &g)?;
    ensure(
        fam::compose(e, &p1)? == fam::compose(&g, &p2)?,
        "pullback square does not commute",
        || json!({ "epi": map_json(e), "along": map_json(&g) }),
    )?;
    ensure(
        p2.try_is_epi()?,
        "pullback of an epimorphism is not epic",
        || json!({ "epi": map_json(e), "along": map_json(&g), "failing_index": p2.epi_witness().ok().flatten() }),
    )?;
    Ok(())
}

/// Number of set-family maps `u` with `u ∘ q = t`, counted index by index
/// and element by element.
fn mediating_count(q: &FamMor, t: &FamMor) -> Result<u128> {
    let mut total = 1u128;
    for z in 0..q.cod().len() {
        let over = q.preimage(z);
        let targets: BTreeSet<usize> = over.iter().map(|&x| t.base()[x]).collect();
        let w = match (targets.len(), targets.iter().next()) {
            (1, Some(&w)) => w,
            (0, _) => {
                let size = q.cod().fibre(z).size().unwrap_or(0) as u32;
                let free: u128 =
                    t.cod().fibres().iter().map(|b| (b.size().unwrap_or(0) as u128).saturating_pow(size)).sum();
                total *= free;
                continue;
            }
            _ => return Ok(0),
        };
        let size = q.cod().fibre(z).size().unwrap_or(0);
        let mut forced: Vec<Option<usize>> = vec![None; size];
        for &x in &over {
            let (qt, tt) = (q.fibre_map(x).table()?, t.fibre_map(x).table()?);
            for (a, &b) in qt.iter().enumerate() {
                match forced[b] {
                    Some(v) if v != tt[a] => return Ok(0),
                    _ => forced[b] = Some(tt[a]),
                }
            }
        }
        let free = t.cod().fibre(w).size().unwrap_or(0) as u128;
        total *= forced.iter().map(|v| if v.is_some() { 1 } else { free }).product::<u128>();
    }
    Ok(total)
}

fn check_claimed_coequalizer(f: &FamMor, claimed: &FamMor) -> Result<()> {
    let (k1, k2) = fam::kernel_pair(f)?;
    let (c1, c2) = (fam::compose(claimed, &k1)?, fam::compose(claimed, &k2)?);
    if let Some(i) = (0..k1.dom().len()).find(|&i| c1.base()[i] != c2.base()[i] || c1.fibre_map(i) != c2.fibre_map(i)) {
        let element = (0..k1.dom().fibre(i).size().unwrap_or(0))
            .find(|&a| c1.base()[i] != c2.base()[i] || c1.fibre_map(i).apply(a) != c2.fibre_map(i).apply(a));
        ensure(false, "claimed coequalizer does not coequalize the kernel pair", || {
            json!({
                "map": map_json(f),
                "claimed": map_json(claimed),
                "kernel_pair_index": [k1.base()[i], k2.base()[i]],
                "elements": element.map(|a| [k1.fibre_map(i).apply(a), k2.fibre_map(i).apply(a)]),
            })
        })?;
    }
    let (_, q) = fam::coeq_kernel_pair(f)?;
    if f.kind() == Kind::Set {
        let there = mediating_count(&q, claimed)?;
        let back = mediating_count(claimed, &q)?;
        ensure(
            there == 1 && back == 1,
            "claimed coequalizer is not isomorphic to the computed one",
            || json!({ "map": map_json(f), "claimed": map_json(claimed), "mediating": [there.to_string(), back.to_string()] }),
        )?;
    } else {
        ensure(
            claimed.cod().len() == q.cod().len(),
            "claimed coequalizer has the wrong index set",
            || json!({ "map": map_json(f), "claimed": map_json(claimed) }),
        )?;
    }
    Ok(())
}
