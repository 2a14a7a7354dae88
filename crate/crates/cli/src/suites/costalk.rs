use anyhow::{anyhow, Result};
use procosheaf::cosheaf::{cosheafify_finite, skyscraper_counit, skyscraper_finite, Cosheaf, PrecosheafFinite};
use procosheaf::fam::{self, FamMor, FamObj};
use procosheaf::fincat::{self, FinMor, FinObj, Kind};
use procosheaf::prospace::{PointThread, ProSpace};
use procosheaf::prosys::Flag;
use procosheaf::random;
use rand::Rng;
use serde_json::json;

use super::{same_space, Ctx};
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "costalk";
pub const ADJUNCTION_CASES: usize = 24;
pub const PRECOSHEAF_CASES: usize = 10;
const SPACE_CHECK_LEVELS: usize = 6;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    let levels = ctx.truncation + ctx.window;
    let threads: Vec<(String, ProSpace, PointThread)> = ctx
        .fixtures(FixtureKind::Thread, NAME)
        .into_iter()
        .filter_map(|d| match ctx.registry.load_fixture(&d.name) {
            Ok(Loaded::Thread { space, thread }) => Some((d.name, space, thread)),
            _ => None,
        })
        .collect();
    let all_threads: Vec<(String, ProSpace, PointThread)> = ctx
        .registry
        .positive(FixtureKind::Thread, NAME)
        .into_iter()
        .filter_map(|d| match ctx.registry.load_fixture(&d.name) {
            Ok(Loaded::Thread { space, thread }) => Some((d.name.clone(), space, thread)),
            _ => None,
        })
        .collect();
    let cosheaves: Vec<(String, Cosheaf)> = ctx
        .registry
        .positive(FixtureKind::Cosheaf, NAME)
        .into_iter()
        .filter_map(|d| ctx.registry.cosheaf(&d.name).ok().map(|a| (d.name.clone(), a)))
        .collect();

    for (name, space, t) in &threads {
        rec.case(Some(name), ctx.seed, || {
            check_thread(space, t, levels)?;
            for (_, a) in cosheaves.iter().filter(|(_, a)| same_space(a.base(), space, SPACE_CHECK_LEVELS)) {
                check_costalk(a, t, levels)?;
            }
            let others: Vec<&PointThread> = all_threads
                .iter()
                .filter(|(n, s, _)| n != name && same_space(s, space, SPACE_CHECK_LEVELS))
                .map(|(_, _, s)| s)
                .collect();
            check_skyscraper(space, t, &others, levels)?;
            Ok(Flag::Exact)
        });
    }
    for d in ctx.fixtures(FixtureKind::Cosheaf, NAME) {
        rec.case(Some(&d.name), ctx.seed, || {
            let a = ctx.registry.cosheaf(&d.name)?;
            let mut ts: Vec<PointThread> = all_threads
                .iter()
                .filter(|(_, s, _)| same_space(s, a.base(), SPACE_CHECK_LEVELS))
                .map(|(_, _, t)| t.clone())
                .collect();
            for x in 0..a.base().size(1).min(3) {
                ts.push(thread_above(a.base(), 1, x, levels + 1)?);
            }
            for t in &ts {
                check_costalk(&a, t, levels)?;
            }
            Ok(Flag::Exact)
        });
    }
    let mut precosheaves: Vec<(Option<String>, u64, PrecosheafFinite)> = ctx
        .fixtures(FixtureKind::Precosheaf, NAME)
        .into_iter()
        .filter_map(|d| match ctx.registry.load_fixture(&d.name) {
            Ok(Loaded::Precosheaf(p)) => Some((Some(d.name), ctx.seed, p)),
            _ => None,
        })
        .collect();
    if ctx.random_cases() {
        for i in 0..PRECOSHEAF_CASES {
            let seed = ctx.case_seed(i);
            precosheaves.push((None, seed, random::image_precosheaf(&mut ctx.rng(seed), 1 + i % 3, 3)));
        }
    }
    for (name, seed, p) in &precosheaves {
        rec.case(name.as_deref(), *seed, || check_cosheafified_costalks(p, levels));
    }
    if ctx.random_cases() {
        for i in 0..ADJUNCTION_CASES {
            let seed = ctx.case_seed((1 << 16) + i);
            rec.case(None, seed, || {
                let mut rng = ctx.rng(seed);
                let kind = [Kind::Set, Kind::AbelianGroup, Kind::Group][i % 3];
                let a = loop {
                    let a = random::family(&mut rng, kind, 3, 4);
                    if !a.is_empty() {
                        break a;
                    }
                };
                let x = rng.gen_range(0..a.len());
                let c = random::object(&mut rng, kind, 4);
                check_adjunction(&a, x, &c)
            });
        }
    }
    rec.finish()
}

/// The thread that follows `x` at level `n0` and then the least point
/// above at each further level, recorded through level `top`.
fn thread_above(space: &ProSpace, n0: usize, x: usize, top: usize) -> Result<PointThread> {
    let mut prefix = vec![0; n0 + 1];
    prefix[n0] = x;
    for k in (0..n0).rev() {
        prefix[k] = space.chain().transition(k).apply(prefix[k + 1]);
    }
    for k in n0..top {
        let t = space.chain().transition(k);
        let y = (0..space.size(k + 1))
            .find(|&y| t.apply(y) == prefix[k])
            .ok_or_else(|| anyhow!("no point above {} at level {}", prefix[k], k + 1))?;
        prefix.push(y);
    }
    Ok(PointThread::generated(move |n| prefix[n.min(prefix.len() - 1)]))
}

fn check_thread(space: &ProSpace, t: &PointThread, levels: usize) -> Result<()> {
    for k in 0..levels {
        let (hi, lo) = (t.at(k + 1)?, t.at(k)?);
        let ok = hi < space.size(k + 1) && space.chain().transition(k).apply(hi) == lo;
        ensure(
            ok,
            "thread is not a point of the space",
            || json!({ "level": k, "above": hi, "below": lo, "projects_to": (hi < space.size(k + 1)).then(|| space.chain().transition(k).apply(hi)) }),
        )?;
    }
    Ok(())
}

/// The costalk chain against the fibres along the thread and against the
/// cosections of the cells containing it.
fn check_costalk(a: &Cosheaf, t: &PointThread, levels: usize) -> Result<()> {
    let c = a.costalk(t)?;
    for n in 0..=levels {
        let x = t.at(n)?;
        let fibre = a.level(n).fibre(x).clone();
        ensure(
            c.level(n) == fibre,
            "costalk level is not the fibre at the thread",
            || json!({ "level": n, "point": x }),
        )?;
        if a.kind().has_coproducts() {
            let cell = a.cosection_at(&a.base().cell(n, x)?, n)?;
            ensure(
                cell.obj() == &fibre,
                "cosections of the cell differ from the fibre",
                || json!({ "level": n, "point": x }),
            )?;
        }
        if n < levels {
            let (t_n, y) = (a.transition(n), t.at(n + 1)?);
            ensure(
                t_n.base()[y] == x && &c.transition(n) == t_n.fibre_map(y),
                "costalk transition is not the fibre map along the thread",
                || json!({ "level": n, "point": y }),
            )?;
        }
    }
    Ok(())
}

fn check_skyscraper(space: &ProSpace, t: &PointThread, others: &[&PointThread], levels: usize) -> Result<()> {
    let c = FinObj::set(2);
    let sky = Cosheaf::skyscraper(t, &c, space)?;
    let empty = FinObj::initial(Kind::Set);
    for s in std::iter::once(t).chain(others.iter().copied()) {
        let costalk = sky.costalk(s)?;
        for n in 0..=levels {
            let want = if s.at(n)? == t.at(n)? { &c } else { &empty };
            ensure(
                &costalk.level(n) == want,
                "skyscraper costalk is wrong",
                || json!({ "level": n, "thread_point": t.at(n).ok(), "probe_point": s.at(n).ok() }),
            )?;
        }
    }
    Ok(())
}

/// Costalks of the cosheafification of a finite precosheaf are its values
/// at the points.
fn check_cosheafified_costalks(p: &PrecosheafFinite, levels: usize) -> Result<Flag> {
    let c = cosheafify_finite(p)?;
    let a = Cosheaf::finite(c.family.clone());
    for x in 0..p.points() {
        let costalk = a.costalk(&PointThread::generated(move |_| x))?;
        for n in 0..=levels {
            ensure(
                &costalk.level(n) == p.value(1 << x),
                "cosheafification changes a costalk",
                || json!({ "point": x, "level": n }),
            )?;
        }
    }
    Ok(Flag::Exact)
}

/// `Hom(Sky_x c, A) ≅ Hom(c, A_x)` with its unit and counit on a finite
/// base.
fn check_adjunction(a: &FamObj, x: usize, c: &FinObj) -> Result<Flag> {
    let k = a.len();
    let sky = skyscraper_finite(k, x, c)?;
    let pro = Cosheaf::skyscraper(&PointThread::generated(move |_| x), c, &ProSpace::finite(k))?;
    ensure(pro.level(0) == sky, "skyscraper cosheaf differs from the finite skyscraper", || json!({ "point": x }))?;

    let counit = skyscraper_counit(a, x)?;
    ensure(
        counit.fibre_map(x) == &FinMor::identity(a.fibre(x)),
        "counit is not the identity at the point",
        || json!({ "point": x }),
    )?;
    let sky_counit = skyscraper_counit(&sky, x)?;
    ensure(
        sky_counit == FamMor::identity(&sky),
        "counit on a skyscraper is not the identity",
        || json!({ "point": x }),
    )?;

    let homs = procosheaf::cosheaf::hom_cosheaf_finite(&sky, a)?;
    let at_point = fincat::hom_set(c, a.fibre(x))?;
    ensure(
        homs.len() == at_point.len(),
        "Hom out of the skyscraper differs from Hom into the costalk",
        || json!({ "point": x, "cosheaf_maps": homs.len(), "costalk_maps": at_point.len() }),
    )?;
    let sky_a = skyscraper_finite(k, x, a.fibre(x))?;
    for phi in &at_point {
        let maps = (0..k).map(|p| if p == x { phi.clone() } else { FinMor::identity(sky.fibre(p)) }).collect();
        let lifted = FamMor::new(sky.clone(), sky_a.clone(), (0..k).collect(), maps)?;
        let psi = fam::compose(&counit, &lifted)?;
        ensure(
            psi.fibre_map(x) == phi,
            "transpose does not restrict to the map at the point",
            || json!({ "point": x }),
        )?;
        ensure(homs.contains(&psi), "transpose is not a map of cosheaves", || json!({ "point": x }))?;
    }
    for psi in &homs {
        ensure(
            at_point.contains(psi.fibre_map(x)),
            "restriction leaves Hom into the costalk",
            || json!({ "point": x }),
        )?;
    }
    Ok(Flag::Exact)
}
