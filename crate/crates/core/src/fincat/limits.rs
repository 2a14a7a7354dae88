use std::collections::BTreeSet;

use super::morphism::{compose, FinMor, MorData};
use super::object::decode;
use super::object::{FinObj, Kind, Repr};
use super::sub::{abelian_sub, sub_from_elements};
use super::table::GroupTable;
use crate::error::{mismatch, Error, Result};

/// A product object with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub obj: FinObj,
    pub p1: FinMor,
    pub p2: FinMor,
}

/// Binary product. Carrier labels are row-major pairs.
pub fn product(a: &FinObj, b: &FinObj) -> Result<Product> {
    a.same_kind(b)?;
    let obj = match (&a.0, &b.0) {
        (Repr::Set(n), Repr::Set(m)) => FinObj::set(n * m),
        (Repr::Group(s), Repr::Group(t)) => {
            let (n, m) = (s.order(), t.order());
            FinObj::group(GroupTable::from_fn_unchecked(n * m, |x, y| s.mul(x / m, y / m) * m + t.mul(x % m, y % m)))
        }
        (Repr::Abelian(fa), Repr::Abelian(fb)) => FinObj::abelian(fa.iter().chain(fb.iter()).cloned().collect()),
        _ => unreachable!(),
    };
    let (p1, p2) = match (&a.0, &b.0) {
        (Repr::Abelian(fa), Repr::Abelian(fb)) => {
            let (k, l) = (fa.len(), fb.len());
            let proj = |target: usize, offset: usize, cod: &FinObj| {
                let fs = obj.factors().unwrap();
                let blocks =
                    (0..k + l)
                        .map(|i| {
                            (0..target)
                                .map(|j| {
                                    if i == j + offset {
                                        (0..fs[i].order()).collect()
                                    } else {
                                        vec![0; fs[i].order()]
                                    }
                                })
                                .collect()
                        })
                        .collect();
                FinMor::from_blocks_unchecked(obj.clone(), cod.clone(), blocks)
            };
            (proj(k, 0, a), proj(l, k, b))
        }
        _ => {
            let m = b.size().unwrap();
            let n = obj.size().unwrap();
            (
                FinMor::from_table_unchecked(obj.clone(), a.clone(), (0..n).map(|x| x / m).collect()),
                FinMor::from_table_unchecked(obj.clone(), b.clone(), (0..n).map(|x| x % m).collect()),
            )
        }
    };
    Ok(Product { obj, p1, p2 })
}

/// The pairing `⟨f, g⟩ : X → A × B` into `product(A, B)`.
pub fn pair(f: &FinMor, g: &FinMor) -> Result<FinMor> {
    if f.dom() != g.dom() {
        return Err(mismatch("pairing maps with different domains"));
    }
    let prod = product(f.cod(), g.cod())?;
    Ok(match (&f.data, &g.data) {
        (MorData::Table(ft), MorData::Table(gt)) => {
            let m = g.cod().size().unwrap();
            let table = ft.iter().zip(gt.iter()).map(|(&x, &y)| x * m + y).collect();
            FinMor::from_table_unchecked(f.dom().clone(), prod.obj, table)
        }
        (MorData::Blocks(fb), MorData::Blocks(gb)) => {
            let blocks = fb.iter().zip(gb.iter()).map(|(r, s)| r.iter().chain(s.iter()).cloned().collect()).collect();
            FinMor::from_blocks_unchecked(f.dom().clone(), prod.obj, blocks)
        }
        _ => unreachable!(),
    })
}

/// Equalizer of a parallel pair, as the inclusion of `{x : f(x) = g(x)}`.
pub fn equalizer(f: &FinMor, g: &FinMor) -> Result<FinMor> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(mismatch("equalizer of a non-parallel pair"));
    }
    if f == g {
        return Ok(FinMor::identity(f.dom()));
    }
    let dom = f.dom();
    let sub = match (&f.data, &g.data) {
        (MorData::Table(ft), MorData::Table(gt)) => {
            let elems: BTreeSet<usize> = (0..ft.len()).filter(|&x| ft[x] == gt[x]).collect();
            sub_from_elements(dom, &elems)
        }
        _ => {
            let n = dom.enumerable_size()?;
            let fs = dom.factors().unwrap();
            let gens = (0..n).map(|x| decode(fs, x)).filter(|c| f.apply_coords(c) == g.apply_coords(c)).collect();
            abelian_sub(dom, gens)?
        }
    };
    Ok(sub.inclusion().clone())
}

/// Pullback of a cospan `a → c ← b`, computed from the product and an
/// equalizer; returns the apex projections.
pub fn pullback(f: &FinMor, g: &FinMor) -> Result<(FinObj, FinMor, FinMor)> {
    if f.cod() != g.cod() {
        return Err(mismatch("pullback of maps with different codomains"));
    }
    let prod = product(f.dom(), g.dom())?;
    let e = equalizer(&compose(f, &prod.p1)?, &compose(g, &prod.p2)?)?;
    let p1 = compose(&prod.p1, &e)?;
    let p2 = compose(&prod.p2, &e)?;
    Ok((e.dom().clone(), p1, p2))
}

/// A coproduct with its coprojections.
#[derive(Clone, Debug)]
pub struct Coproduct {
    pub obj: FinObj,
    pub injections: Vec<FinMor>,
}

/// Finite coproduct of a list of objects: disjoint union of sets, direct
/// sum of abelian groups. The empty list gives the initial object.
pub fn coproduct_many(kind: Kind, objs: &[FinObj]) -> Result<Coproduct> {
    if !kind.has_coproducts() {
        return Err(Error::NoCoproduct(kind));
    }
    for o in objs {
        kind.expect(o.kind())?;
    }
    match kind {
        Kind::Set => {
            let sizes: Vec<usize> = objs.iter().map(|o| o.size().unwrap()).collect();
            let total: usize = sizes.iter().sum();
            let obj = FinObj::set(total);
            let mut offset = 0;
            let injections = objs
                .iter()
                .zip(&sizes)
                .map(|(o, &n)| {
                    let inj = FinMor::from_table_unchecked(o.clone(), obj.clone(), (offset..offset + n).collect());
                    offset += n;
                    inj
                })
                .collect();
            Ok(Coproduct { obj, injections })
        }
        Kind::AbelianGroup => {
            let factors: Vec<_> = objs.iter().flat_map(|o| o.factors().unwrap().iter().cloned()).collect();
            let obj = FinObj::abelian(factors.clone());
            let mut offset = 0;
            let injections = objs
                .iter()
                .map(|o| {
                    let own = o.factors().unwrap();
                    let blocks = own
                        .iter()
                        .enumerate()
                        .map(|(i, f)| {
                            (0..factors.len())
                                .map(|j| if j == offset + i { (0..f.order()).collect() } else { vec![0; f.order()] })
                                .collect()
                        })
                        .collect();
                    offset += own.len();
                    FinMor::from_blocks_unchecked(o.clone(), obj.clone(), blocks)
                })
                .collect();
            Ok(Coproduct { obj, injections })
        }
        Kind::Group => unreachable!(),
    }
}

pub fn coproduct(a: &FinObj, b: &FinObj) -> Result<Coproduct> {
    a.same_kind(b)?;
    coproduct_many(a.kind(), &[a.clone(), b.clone()])
}

/// The copairing `[f_0, …, f_k] : ⊔ dom(f_i) → target` out of
/// `coproduct_many` of the domains.
pub fn copair(kind: Kind, maps: &[FinMor], target: &FinObj) -> Result<FinMor> {
    if !kind.has_coproducts() {
        return Err(Error::NoCoproduct(kind));
    }
    kind.expect(target.kind())?;
    if let Some(f) = maps.iter().find(|f| f.cod() != target) {
        return Err(mismatch(format!("copairing a map into {:?}, expected {:?}", f.cod(), target)));
    }
    let doms: Vec<FinObj> = maps.iter().map(|f| f.dom().clone()).collect();
    let sum = coproduct_many(kind, &doms)?.obj;
    Ok(match kind {
        Kind::Set => {
            let table = maps.iter().flat_map(|f| f.table_ref().unwrap().iter().copied()).collect();
            FinMor::from_table_unchecked(sum, target.clone(), table)
        }
        _ => {
            let blocks = maps.iter().flat_map(|f| f.blocks().unwrap().iter().cloned()).collect();
            FinMor::from_blocks_unchecked(sum, target.clone(), blocks)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{find_iso, Factor};

    #[test]
    fn product_of_z2_and_z3_is_cyclic() {
        let p = product(&FinObj::cyclic(2), &FinObj::cyclic(3)).unwrap();
        assert_eq!(p.obj.order(), 6);
        assert!(find_iso(&p.obj, &FinObj::cyclic(6)).unwrap().is_some());
        let pg = product(&FinObj::cyclic_group(2), &FinObj::cyclic_group(3)).unwrap();
        assert!(find_iso(&pg.obj, &FinObj::cyclic_group(6)).unwrap().is_some());
    }

    #[test]
    fn pairing_recovers_components() {
        let x = FinObj::set(3);
        let f = FinMor::new(x.clone(), FinObj::set(2), vec![0, 1, 1]).unwrap();
        let g = FinMor::new(x, FinObj::set(4), vec![3, 0, 2]).unwrap();
        let p = product(f.cod(), g.cod()).unwrap();
        let h = pair(&f, &g).unwrap();
        assert_eq!(compose(&p.p1, &h).unwrap(), f);
        assert_eq!(compose(&p.p2, &h).unwrap(), g);
    }

    #[test]
    fn equalizer_of_identity_and_negation() {
        let z4 = FinObj::cyclic(4);
        let neg = FinMor::new(z4.clone(), z4.clone(), vec![0, 3, 2, 1]).unwrap();
        let e = equalizer(&FinMor::identity(&z4), &neg).unwrap();
        assert_eq!(e.table().unwrap(), vec![0, 2]);
    }

    #[test]
    fn pullback_of_reductions() {
        let z4 = FinObj::cyclic(4);
        let r = FinMor::new(z4, FinObj::cyclic(2), vec![0, 1, 0, 1]).unwrap();
        let (apex, p1, p2) = pullback(&r, &r).unwrap();
        assert_eq!(apex.order(), 8);
        assert_eq!(compose(&r, &p1).unwrap(), compose(&r, &p2).unwrap());
    }

    #[test]
    fn coproducts_by_instance() {
        let c = coproduct(&FinObj::set(2), &FinObj::set(3)).unwrap();
        assert_eq!(c.obj.order(), 5);
        let v = coproduct(&FinObj::cyclic(2), &FinObj::cyclic(2)).unwrap();
        let klein = FinObj::abelian(vec![Factor::cyclic(2).unwrap(), Factor::cyclic(2).unwrap()]);
        assert_eq!(v.obj, klein);
        assert!(v.injections.iter().all(FinMor::is_mono));
        let e = coproduct(&FinObj::cyclic_group(2), &FinObj::cyclic_group(2));
        assert!(matches!(e, Err(Error::NoCoproduct(Kind::Group))));
    }

    #[test]
    fn copair_restricts_to_components() {
        let t = FinObj::set(2);
        let f = FinMor::new(FinObj::set(2), t.clone(), vec![1, 1]).unwrap();
        let g = FinMor::new(FinObj::set(1), t.clone(), vec![0]).unwrap();
        let c = coproduct(f.dom(), g.dom()).unwrap();
        let h = copair(Kind::Set, &[f.clone(), g.clone()], &t).unwrap();
        assert_eq!(compose(&h, &c.injections[0]).unwrap(), f);
        assert_eq!(compose(&h, &c.injections[1]).unwrap(), g);
    }
}
