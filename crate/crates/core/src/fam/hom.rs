use itertools::Itertools;

use super::{FamMor, FamObj};
use crate::error::{mismatch, Error, Result};
use crate::fincat::{self, FinMor, FinObj, MAX_HOM};

/// Disjoint union of the index sets; fibres carried over. Available for
/// every instance.
pub fn coproduct(a: &FamObj, b: &FamObj) -> Result<(FamObj, FamMor, FamMor)> {
    let (obj, mut inj) = coproduct_many(&[a.clone(), b.clone()])?;
    let i2 = inj.pop().unwrap();
    let i1 = inj.pop().unwrap();
    Ok((obj, i1, i2))
}

pub fn coproduct_many(parts: &[FamObj]) -> Result<(FamObj, Vec<FamMor>)> {
    let kind = parts.first().map(FamObj::kind).ok_or(Error::EmptyFamily("fam::coproduct_many"))?;
    for p in parts {
        kind.expect(p.kind())?;
    }
    let obj = FamObj::new_unchecked(kind, parts.iter().flat_map(|p| p.fibres().iter().cloned()).collect());
    let mut offset = 0;
    let injections = parts
        .iter()
        .map(|p| {
            let base = (offset..offset + p.len()).collect();
            offset += p.len();
            FamMor::new_unchecked(p.clone(), obj.clone(), base, p.fibres().iter().map(FinMor::identity).collect())
        })
        .collect();
    Ok((obj, injections))
}

/// Copairing `[f_0, …, f_k]` out of `coproduct_many` of the domains.
pub fn copair(maps: &[FamMor]) -> Result<FamMor> {
    let target = maps.first().ok_or(Error::EmptyFamily("fam::copair"))?.cod().clone();
    if maps.iter().any(|m| *m.cod() != target) {
        return Err(mismatch("copairing maps with different codomains"));
    }
    let doms: Vec<FamObj> = maps.iter().map(|m| m.dom().clone()).collect();
    let (sum, _) = coproduct_many(&doms)?;
    let base = maps.iter().flat_map(|m| m.base().iter().copied()).collect();
    let fibre_maps = maps.iter().flat_map(|m| m.fibre_maps().iter().cloned()).collect();
    Ok(FamMor::new_unchecked(sum, target, base, fibre_maps))
}

/// `⊔_x A_x` in the base category with its coprojections.
pub fn global_cosections(a: &FamObj) -> Result<fincat::Coproduct> {
    fincat::coproduct_many(a.kind(), a.fibres())
}

/// The induced map `⊔_x A_x → ⊔_y B_y` on global cosections.
pub fn global_map(m: &FamMor) -> Result<FinMor> {
    let src = global_cosections(m.dom())?;
    let tgt = global_cosections(m.cod())?;
    let comps = m
        .fibre_maps()
        .iter()
        .zip(m.base())
        .map(|(phi, &y)| fincat::compose(&tgt.injections[y], phi))
        .collect::<Result<Vec<_>>>()?;
    let out = fincat::copair(m.kind(), &comps, &tgt.obj)?;
    debug_assert_eq!(out.dom(), &src.obj);
    Ok(out)
}

/// Maps out of the formal coproduct of a family: tuples of fibre maps
/// `A_x → d`, in lexicographic order of the fibrewise Hom-sets.
pub fn hom_out(a: &FamObj, d: &FinObj) -> Result<Vec<Vec<FinMor>>> {
    a.kind().expect(d.kind())?;
    let homs = a.fibres().iter().map(|f| fincat::hom_set(f, d)).collect::<Result<Vec<_>>>()?;
    let count = homs.iter().fold(1u128, |acc, h| acc.saturating_mul(h.len() as u128));
    if count > MAX_HOM as u128 {
        return Err(Error::TooLarge(format!("{count} tuples of fibre maps")));
    }
    if homs.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    Ok(homs.iter().multi_cartesian_product().map(|t| t.into_iter().cloned().collect()).collect())
}

/// All maps of families `a → b`, enumerated base function first.
pub fn hom_set(a: &FamObj, b: &FamObj) -> Result<Vec<FamMor>> {
    a.kind().expect(b.kind())?;
    if a.is_empty() {
        return Ok(vec![FamMor::from_empty(b)]);
    }
    let mut out = Vec::new();
    for base in (0..a.len()).map(|_| 0..b.len()).multi_cartesian_product() {
        let homs = base
            .iter()
            .enumerate()
            .map(|(x, &y)| fincat::hom_set(a.fibre(x), b.fibre(y)))
            .collect::<Result<Vec<_>>>()?;
        for maps in homs.iter().multi_cartesian_product() {
            if out.len() >= MAX_HOM {
                return Err(Error::TooLarge("family Hom-set".into()));
            }
            out.push(FamMor::new_unchecked(a.clone(), b.clone(), base.clone(), maps.into_iter().cloned().collect()));
        }
    }
    Ok(out)
}

/// An isomorphism of families, matching fibres up to isomorphism.
pub fn find_iso(a: &FamObj, b: &FamObj) -> Result<Option<FamMor>> {
    a.kind().expect(b.kind())?;
    if a.len() != b.len() {
        return Ok(None);
    }
    let mut used = vec![false; b.len()];
    let mut base = Vec::with_capacity(a.len());
    let mut maps = Vec::with_capacity(a.len());
    if match_fibres(a, b, &mut used, &mut base, &mut maps)? {
        Ok(Some(FamMor::new_unchecked(a.clone(), b.clone(), base, maps)))
    } else {
        Ok(None)
    }
}

fn match_fibres(
    a: &FamObj,
    b: &FamObj,
    used: &mut [bool],
    base: &mut Vec<usize>,
    maps: &mut Vec<FinMor>,
) -> Result<bool> {
    let x = base.len();
    if x == a.len() {
        return Ok(true);
    }
    for y in 0..b.len() {
        if used[y] {
            continue;
        }
        if let Some(iso) = fincat::find_iso(a.fibre(x), b.fibre(y))? {
            used[y] = true;
            base.push(y);
            maps.push(iso);
            if match_fibres(a, b, used, base, maps)? {
                return Ok(true);
            }
            used[y] = false;
            base.pop();
            maps.pop();
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{Factor, Kind};

    #[test]
    fn global_cosections_of_families() {
        let a = FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap();
        assert_eq!(global_cosections(&a).unwrap().obj.order(), 5);
        let v = FamObj::constant(&FinObj::cyclic(2), 2);
        let klein = FinObj::abelian(vec![Factor::cyclic(2).unwrap(); 2]);
        assert_eq!(global_cosections(&v).unwrap().obj, klein);
        let g = FamObj::point(FinObj::cyclic_group(2));
        assert!(global_cosections(&g).is_err());
    }

    #[test]
    fn hom_out_counts() {
        let e = FamObj::empty(Kind::Set);
        assert_eq!(hom_out(&e, &FinObj::set(3)).unwrap().len(), 1);
        let a = FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap();
        assert_eq!(hom_out(&a, &FinObj::set(2)).unwrap().len(), 32);
        let g = FamObj::new(Kind::Group, vec![FinObj::cyclic_group(2), FinObj::cyclic_group(3)]).unwrap();
        assert_eq!(hom_out(&g, &FinObj::symmetric3()).unwrap().len(), 12);
    }

    #[test]
    fn hom_set_counts() {
        let a = FamObj::new(Kind::Set, vec![FinObj::set(1), FinObj::set(1)]).unwrap();
        let b = FamObj::point(FinObj::set(2));
        assert_eq!(hom_set(&a, &b).unwrap().len(), 4);
        let z = FamObj::point(FinObj::cyclic(2));
        assert_eq!(hom_set(&z, &z).unwrap().len(), 2);
        let t = super::super::terminal(Kind::Set);
        assert_eq!(hom_set(&a, &t).unwrap().len(), 1);
    }

    #[test]
    fn global_map_of_a_fold() {
        let c = FinObj::cyclic(2);
        let a = FamObj::constant(&c, 2);
        let fold = FamMor::new(a, FamObj::point(c.clone()), vec![0, 0], vec![FinMor::identity(&c); 2]).unwrap();
        let g = global_map(&fold).unwrap();
        assert_eq!(g.table().unwrap(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn iso_search_permutes_indices() {
        let a = FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap();
        let b = FamObj::new(Kind::Set, vec![FinObj::set(3), FinObj::set(2)]).unwrap();
        let iso = find_iso(&a, &b).unwrap().unwrap();
        assert_eq!(iso.base(), &[1, 0]);
        assert!(find_iso(&a, &FamObj::constant(&FinObj::set(2), 2)).unwrap().is_none());
    }
}
