//! Seeded generators for finite objects, maps, families and cosheaves.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cosheaf::{Cosheaf, PrecosheafFinite};
use crate::error::Result;
use crate::fam::{FamMor, FamObj};
use crate::fincat::{self, Factor, FinMor, FinObj, GroupTable, Kind};
use crate::prospace::ProSpace;
use crate::prosys::{ChainInfo, ProChain};

/// Groups of order at most 8 used by the generators.
pub fn small_groups() -> Vec<FinObj> {
    let mut out: Vec<FinObj> = (1..=8).map(FinObj::cyclic_group).collect();
    out.push(FinObj::symmetric3());
    out.push(FinObj::group(GroupTable::dihedral8()));
    out.push(FinObj::group(GroupTable::quaternion8()));
    let klein = FinObj::abelian(vec![Factor::cyclic(2).unwrap(); 2]);
    out.push(FinObj::group_from_rows(&klein.op_table().unwrap()).unwrap());
    out
}

/// Abelian groups of order at most 8.
pub fn small_abelian() -> Vec<FinObj> {
    let c = |n| Factor::cyclic(n).unwrap();
    let mut out: Vec<FinObj> = (1..=8).map(FinObj::cyclic).collect();
    out.push(FinObj::abelian(vec![c(2), c(2)]));
    out.push(FinObj::abelian(vec![c(2), c(4)]));
    out.push(FinObj::abelian(vec![c(2), c(2), c(2)]));
    out
}

pub fn object(rng: &mut impl Rng, kind: Kind, max_size: usize) -> FinObj {
    match kind {
        Kind::Set => FinObj::set(rng.gen_range(0..=max_size)),
        Kind::Group => pick_bounded(rng, small_groups(), max_size),
        Kind::AbelianGroup => pick_bounded(rng, small_abelian(), max_size),
    }
}

fn pick_bounded(rng: &mut impl Rng, pool: Vec<FinObj>, max: usize) -> FinObj {
    let pool: Vec<FinObj> = pool.into_iter().filter(|g| g.order() <= max.max(1) as u128).collect();
    pool.choose(rng).unwrap().clone()
}

/// A uniformly chosen map `a → b`, if any exists.
pub fn map(rng: &mut impl Rng, a: &FinObj, b: &FinObj) -> Result<Option<FinMor>> {
    if a.kind() == Kind::Set {
        let (n, m) = (a.size().unwrap(), b.size().unwrap());
        if m == 0 && n > 0 {
            return Ok(None);
        }
        return Ok(Some(FinMor::new(a.clone(), b.clone(), (0..n).map(|_| rng.gen_range(0..m)).collect())?));
    }
    Ok(fincat::hom_set(a, b)?.choose(rng).cloned())
}

pub fn family(rng: &mut impl Rng, kind: Kind, max_len: usize, max_fibre: usize) -> FamObj {
    let n = rng.gen_range(if kind.is_group() { 1 } else { 0 }..=max_len);
    FamObj::new(kind, (0..n).map(|_| object(rng, kind, max_fibre)).collect()).unwrap()
}

/// A random map of families `a → b`, choosing for each index a target
/// that admits a fibre map.
pub fn fam_map(rng: &mut impl Rng, a: &FamObj, b: &FamObj) -> Result<Option<FamMor>> {
    let mut base = Vec::new();
    let mut maps = Vec::new();
    for x in 0..a.len() {
        let mut targets: Vec<usize> = (0..b.len()).collect();
        targets.shuffle(rng);
        let mut found = None;
        for y in targets {
            if let Some(f) = map(rng, a.fibre(x), b.fibre(y))? {
                found = Some((y, f));
                break;
            }
        }
        let Some((y, f)) = found else { return Ok(None) };
        base.push(y);
        maps.push(f);
    }
    Ok(Some(FamMor::new(a.clone(), b.clone(), base, maps)?))
}

/// A random map between random families, retried until one exists.
pub fn any_fam_map(rng: &mut impl Rng, kind: Kind, max_len: usize, max_fibre: usize) -> Result<FamMor> {
    loop {
        let (a, b) = (family(rng, kind, max_len, max_fibre), family(rng, kind, max_len, max_fibre));
        if let Some(m) = fam_map(rng, &a, &b)? {
            return Ok(m);
        }
    }
}

/// A deterministic generator for the cell `(n, x)` of a seeded system.
pub fn cell_rng(seed: u64, n: usize, x: usize) -> ChaCha8Rng {
    let mut z = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (x as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// A seeded cosheaf over a surjective space. Level-0 fibres are random;
/// each fibre above is a random object with a map to the fibre below that
/// the generator chooses among the available ones. With `epic`, fibre maps
/// are surjective and no fibre is empty.
pub fn cosheaf_over(space: &ProSpace, kind: Kind, seed: u64, max_fibre: usize, epic: bool) -> Cosheaf {
    let s1 = space.clone();
    let fibre: std::sync::Arc<dyn Fn(usize, usize) -> (FinObj, Option<FinMor>) + Send + Sync> =
        std::sync::Arc::new(move |n, x| fibre_at(&s1, kind, seed, max_fibre, epic, n, x));
    let (f1, f2) = (fibre.clone(), fibre);
    let (s2, s3) = (space.clone(), space.clone());
    let chain = ProChain::new(
        move |n| FamObj::new(kind, (0..s2.size(n)).map(|x| f1(n, x).0).collect()).unwrap(),
        move |n| {
            let base = s3.chain().transition(n).table().unwrap();
            let dom = FamObj::new(kind, (0..base.len()).map(|x| f2(n + 1, x).0).collect()).unwrap();
            let cod = FamObj::new(kind, (0..s3.size(n)).map(|x| f2(n, x).0).collect()).unwrap();
            let maps = (0..base.len()).map(|x| f2(n + 1, x).1.unwrap()).collect();
            FamMor::new(dom, cod, base, maps).unwrap()
        },
        ChainInfo { stabilization_bound: None, constant_from: None, epic: epic && space.is_surjective() },
    );
    Cosheaf::with_base_surjectivity(chain, space.is_surjective()).unwrap()
}

fn fibre_at(
    space: &ProSpace,
    kind: Kind,
    seed: u64,
    max_fibre: usize,
    epic: bool,
    n: usize,
    x: usize,
) -> (FinObj, Option<FinMor>) {
    let mut rng = cell_rng(seed, n, x);
    if n == 0 {
        let lo = if epic && kind == Kind::Set { 1 } else { 0 };
        let obj = match kind {
            Kind::Set => FinObj::set(rng.gen_range(lo..=max_fibre)),
            _ => object(&mut rng, kind, max_fibre),
        };
        return (obj, None);
    }
    let parent = space.chain().transition(n - 1).apply(x);
    let below = fibre_at(space, kind, seed, max_fibre, epic, n - 1, parent).0;
    loop {
        let obj = match kind {
            Kind::Set if epic => FinObj::set(rng.gen_range(below.size().unwrap().max(1)..=max_fibre.max(1))),
            _ => object(&mut rng, kind, max_fibre),
        };
        if let Ok(Some(f)) = map(&mut rng, &obj, &below) {
            if !epic || f.is_epi() {
                return (obj, Some(f));
            }
        }
        if kind != Kind::Set && epic {
            return (below.clone(), Some(FinMor::identity(&below)));
        }
    }
}

/// A precosheaf on `points` points: the subsets of a random target hit by
/// random maps out of random sets at each point, plus one base point, with
/// the inclusions. Not a cosheaf, since the empty set gets a point.
pub fn image_precosheaf(rng: &mut impl Rng, points: usize, max_target: usize) -> PrecosheafFinite {
    let target = rng.gen_range(1..=max_target.max(1));
    let hits: Vec<Vec<usize>> = (0..points)
        .map(|_| {
            let k = rng.gen_range(0..=2);
            (0..k).map(|_| rng.gen_range(0..target)).collect()
        })
        .collect();
    let full = (1u32 << points) - 1;
    let subsets: Vec<Vec<usize>> = (0..=full)
        .map(|u| {
            let mut s: Vec<usize> = std::iter::once(0)
                .chain((0..points).filter(|x| u >> x & 1 == 1).flat_map(|x| hits[x].clone()))
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let values: Vec<FinObj> = subsets.iter().map(|s| FinObj::set(s.len())).collect();
    let mut maps = BTreeMap::new();
    for u in 0..=full {
        for v in (0..=full).filter(|&v| v & u == v && v != u) {
            let table = subsets[v as usize].iter().map(|e| subsets[u as usize].binary_search(e).unwrap()).collect();
            maps.insert((v, u), FinMor::new(values[v as usize].clone(), values[u as usize].clone(), table).unwrap());
        }
    }
    PrecosheafFinite::new(Kind::Set, points, values, maps).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_cosheaves_are_deterministic_and_well_formed() {
        let x = ProSpace::cantor();
        let a = cosheaf_over(&x, Kind::Set, 11, 3, false);
        let b = cosheaf_over(&x, Kind::Set, 11, 3, false);
        a.check(4).unwrap();
        assert_eq!(a.level(4), b.level(4));
        let e = cosheaf_over(&x, Kind::AbelianGroup, 5, 4, true);
        e.check(3).unwrap();
        assert!((0..3).all(|n| e.transition(n).is_epi()));
        let s = cosheaf_over(&ProSpace::one_point(), Kind::Set, 3, 3, true);
        assert!((0..4).all(|n| s.transition(n).is_epi()));
    }

    #[test]
    fn image_precosheaves_are_functorial() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = image_precosheaf(&mut rng, 3, 3);
            assert_eq!(p.functoriality_failure().unwrap(), None);
        }
    }
}
