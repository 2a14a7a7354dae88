use std::collections::BTreeMap;

use anyhow::Result;
use itertools::Itertools;
use procosheaf::cosheaf::{
    as_precosheaf, cosheafify_finite, hom_cosheaf_finite, induced_transformation, natural_transformations,
    PrecosheafFinite,
};
use procosheaf::fam::FamObj;
use procosheaf::fincat::{self, FinMor, FinObj, Kind};
use procosheaf::prosys::Flag;
use procosheaf::random;
use serde_json::json;

use super::Ctx;
use crate::fixtures::{FixtureKind, Loaded};
use crate::report::{ensure, Recorder, VerificationReport};

const NAME: &str = "cosheafification";
const EXHAUSTIVE_POINTS: usize = 2;
const MAX_VALUE: usize = 2;
pub const SAMPLE_CASES: usize = 12;
const SAMPLE_POINTS: usize = 3;
const MAX_B_FIBRE: usize = 2;

pub fn run(ctx: &Ctx) -> VerificationReport {
    let mut rec = Recorder::new(NAME, ctx.seed, ctx.truncation, ctx.window);
    if ctx.random_cases() {
        for points in 0..=EXHAUSTIVE_POINTS {
            for p in all_precosheaves(points, MAX_VALUE) {
                rec.case(None, ctx.seed, || check(&p));
            }
        }
        for i in 0..SAMPLE_CASES {
            let seed = ctx.case_seed(i);
            rec.case(None, seed, || check(&random::image_precosheaf(&mut ctx.rng(seed), SAMPLE_POINTS, 3)));
        }
    }
    for d in ctx.fixtures(FixtureKind::Precosheaf, NAME) {
        rec.case(Some(&d.name), ctx.seed, || match ctx.registry.load_fixture(&d.name)? {
            Loaded::Precosheaf(p) => check(&p),
            _ => unreachable!("precosheaf fixtures load to precosheaves"),
        });
    }
    rec.finish()
}

/// Every functorial set-valued precosheaf on `points` points with values
/// of size at most `max`.
pub fn all_precosheaves(points: usize, max: usize) -> Vec<PrecosheafFinite> {
    let masks = 1u32 << points;
    let pairs: Vec<(u32, u32)> =
        (0..masks).flat_map(|u| (0..masks).filter(move |&v| v & u == v && v != u).map(move |v| (v, u))).collect();
    let mut out = Vec::new();
    for sizes in (0..masks).map(|_| 0..=max).multi_cartesian_product() {
        let values: Vec<FinObj> = sizes.iter().map(|&s| FinObj::set(s)).collect();
        let homs: Vec<Vec<FinMor>> = pairs
            .iter()
            .map(|&(v, u)| fincat::hom_set(&values[v as usize], &values[u as usize]).expect("small sets"))
            .collect();
        let choices = if homs.is_empty() { vec![Vec::new()] } else { homs.iter().multi_cartesian_product().collect() };
        for choice in choices {
            let maps: BTreeMap<(u32, u32), FinMor> = pairs.iter().copied().zip(choice.into_iter().cloned()).collect();
            let p = PrecosheafFinite::new(Kind::Set, points, values.clone(), maps).expect("well-formed precosheaf");
            if p.functoriality_failure().expect("composable maps").is_none() {
                out.push(p);
            }
        }
    }
    out
}

/// Composition with the counit gives a bijection
/// `Hom(B, P^cosh) → Hom_pre(B, P)` for every small cosheaf `B`.
fn check(p: &PrecosheafFinite) -> Result<Flag> {
    if let Some((w, v, u)) = p.functoriality_failure()? {
        ensure(false, "precosheaf is not functorial", || json!({ "w": w, "v": v, "u": u }))?;
    }
    let c = cosheafify_finite(p)?;
    for x in 0..p.points() {
        ensure(c.family.fibre(x) == p.value(1 << x), "cosheafification changes a costalk", || json!({ "point": x }))?;
    }
    let bs: Vec<FamObj> = (0..p.points())
        .map(|_| 0..=MAX_B_FIBRE)
        .multi_cartesian_product()
        .map(|sizes| FamObj::new(Kind::Set, sizes.into_iter().map(FinObj::set).collect()).expect("set family"))
        .collect();
    let bs = if bs.is_empty() { vec![FamObj::empty(Kind::Set)] } else { bs };
    for b in bs.iter().filter(|_| p.kind() == Kind::Set) {
        let sizes: Vec<u128> = b.fibres().iter().map(FinObj::order).collect();
        let natural = natural_transformations(&as_precosheaf(b)?, p)?;
        let mut images: Vec<Vec<FinMor>> = Vec::new();
        for psi in hom_cosheaf_finite(b, &c.family)? {
            let induced = induced_transformation(&psi)?;
            let comp = induced
                .iter()
                .zip(&c.counit)
                .map(|(t, e)| fincat::compose(e, t))
                .collect::<procosheaf::Result<Vec<FinMor>>>()?;
            ensure(natural.contains(&comp), "counit composite is not natural", || json!({ "b_fibres": sizes }))?;
            ensure(!images.contains(&comp), "counit composition is not injective", || json!({ "b_fibres": sizes }))?;
            images.push(comp);
        }
        ensure(
            images.len() == natural.len(),
            "counit composition is not surjective",
            || json!({ "b_fibres": sizes, "cosheaf_maps": images.len(), "transformations": natural.len() }),
        )?;
    }
    Ok(Flag::Exact)
}
