//! Precosheaves on a finite discrete space, indexed by subset masks.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{mismatch, Error, Result};
use crate::fam::{FamMor, FamObj};
use crate::fincat::{self, FinMor, FinObj, Kind};

/// Largest finite base handled by mask indexing.
pub const MAX_POINTS: usize = 12;

/// A precosheaf on `{0, …, n-1}`: an object per subset and a map per strict
/// inclusion `V ⊊ U`, keyed by `(V, U)` masks.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecosheafFinite {
    kind: Kind,
    points: usize,
    values: Vec<FinObj>,
    maps: BTreeMap<(u32, u32), FinMor>,
}

fn is_strict_subset(v: u32, u: u32) -> bool {
    v & u == v && v != u
}

fn members(u: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&x| u >> x & 1 == 1)
}

impl PrecosheafFinite {
    /// Every strict inclusion must carry a map with the right ends.
    pub fn new(kind: Kind, points: usize, values: Vec<FinObj>, maps: BTreeMap<(u32, u32), FinMor>) -> Result<Self> {
        if points > MAX_POINTS {
            return Err(Error::TooLarge(format!("{points} points")));
        }
        if values.len() != 1 << points {
            return Err(mismatch(format!("{points} points need {} values", 1usize << points)));
        }
        for v in &values {
            kind.expect(v.kind())?;
        }
        let full = (1u32 << points) - 1;
        for u in 0..=full {
            for v in 0..=full {
                if !is_strict_subset(v, u) {
                    continue;
                }
                let m = maps.get(&(v, u)).ok_or_else(|| mismatch(format!("missing map for {v:#b} ⊂ {u:#b}")))?;
                if m.dom() != &values[v as usize] || m.cod() != &values[u as usize] {
                    return Err(mismatch(format!("map for {v:#b} ⊂ {u:#b} has the wrong ends")));
                }
            }
        }
        if maps.keys().any(|&(v, u)| !is_strict_subset(v, u) || u > full) {
            return Err(mismatch("map keyed by a pair that is not a strict inclusion"));
        }
        Ok(Self { kind, points, values, maps })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn full(&self) -> u32 {
        (1u32 << self.points) - 1
    }

    pub fn value(&self, u: u32) -> &FinObj {
        &self.values[u as usize]
    }

    /// The map for `V ⊆ U`, the identity when equal.
    pub fn map(&self, v: u32, u: u32) -> Result<FinMor> {
        if v == u {
            return Ok(FinMor::identity(self.value(u)));
        }
        self.maps.get(&(v, u)).cloned().ok_or_else(|| mismatch(format!("{v:#b} is not inside {u:#b}")))
    }

    /// The first triple `W ⊂ V ⊂ U` where composition fails.
    pub fn functoriality_failure(&self) -> Result<Option<(u32, u32, u32)>> {
        let full = self.full();
        for u in 0..=full {
            for v in (0..=full).filter(|&v| is_strict_subset(v, u)) {
                for w in (0..=full).filter(|&w| is_strict_subset(w, v)) {
                    if fincat::compose(&self.maps[&(v, u)], &self.maps[&(w, v)])? != self.maps[&(w, u)] {
                        return Ok(Some((w, v, u)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Coproduct comparison `⊔_{x∈U} P({x}) → P(U)` for every `U`.
    pub fn comparisons(&self) -> Result<Vec<FinMor>> {
        if !self.kind.has_coproducts() {
            return Err(Error::NoCoproduct(self.kind));
        }
        (0..=self.full())
            .map(|u| {
                let comps = members(u).map(|x| self.map(1 << x, u)).collect::<Result<Vec<_>>>()?;
                fincat::copair(self.kind, &comps, self.value(u))
            })
            .collect()
    }

    pub fn is_cosheaf(&self) -> Result<bool> {
        Ok(self.comparisons()?.iter().all(FinMor::is_iso))
    }
}

/// A family over the points viewed as a precosheaf: `U ↦ ⊔_{x∈U} A_x` with
/// the sub-coproduct inclusions.
pub fn as_precosheaf(a: &FamObj) -> Result<PrecosheafFinite> {
    let kind = a.kind();
    if !kind.has_coproducts() {
        return Err(Error::NoCoproduct(kind));
    }
    let n = a.len();
    if n > MAX_POINTS {
        return Err(Error::TooLarge(format!("{n} points")));
    }
    let full = (1u32 << n) - 1;
    let sums = (0..=full)
        .map(|u| fincat::coproduct_many(kind, &members(u).map(|x| a.fibre(x).clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = BTreeMap::new();
    for u in 0..=full {
        let pos: Vec<usize> = members(u).collect();
        for v in (0..=full).filter(|&v| is_strict_subset(v, u)) {
            let comps: Vec<FinMor> =
                members(v).map(|x| sums[u as usize].injections[pos.binary_search(&x).unwrap()].clone()).collect();
            maps.insert((v, u), fincat::copair(kind, &comps, &sums[u as usize].obj)?);
        }
    }
    PrecosheafFinite::new(kind, n, sums.into_iter().map(|s| s.obj).collect(), maps)
}

/// The cosheafification of a finite precosheaf with its counit.
#[derive(Clone, Debug)]
pub struct Cosheafification {
    /// Costalks `P({x})`.
    pub family: FamObj,
    pub as_precosheaf: PrecosheafFinite,
    /// `ε_U : ⊔_{x∈U} P({x}) → P(U)`, indexed by mask.
    pub counit: Vec<FinMor>,
}

pub fn cosheafify_finite(p: &PrecosheafFinite) -> Result<Cosheafification> {
    let family = FamObj::new(p.kind, (0..p.points).map(|x| p.value(1 << x).clone()).collect())?;
    let as_pre = as_precosheaf(&family)?;
    let counit = p.comparisons()?;
    Ok(Cosheafification { family, as_precosheaf: as_pre, counit })
}

/// All natural transformations `P → Q`, each as its components by mask.
pub fn natural_transformations(p: &PrecosheafFinite, q: &PrecosheafFinite) -> Result<Vec<Vec<FinMor>>> {
    p.kind.expect(q.kind)?;
    if p.points != q.points {
        return Err(mismatch("precosheaves on different bases"));
    }
    let homs = (0..=p.full()).map(|u| fincat::hom_set(p.value(u), q.value(u))).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    extend_transformation(p, q, &homs, &mut chosen, &mut out)?;
    Ok(out)
}

fn extend_transformation(
    p: &PrecosheafFinite,
    q: &PrecosheafFinite,
    homs: &[Vec<FinMor>],
    chosen: &mut Vec<FinMor>,
    out: &mut Vec<Vec<FinMor>>,
) -> Result<()> {
    let u = chosen.len() as u32;
    if u > p.full() {
        out.push(chosen.clone());
        return Ok(());
    }
    'candidates: for eta in &homs[u as usize] {
        for x in members(u) {
            let v = u & !(1 << x);
            let left = fincat::compose(eta, &p.map(v, u)?)?;
            let right = fincat::compose(&q.map(v, u)?, &chosen[v as usize])?;
            if left != right {
                continue 'candidates;
            }
        }
        chosen.push(eta.clone());
        extend_transformation(p, q, homs, chosen, out)?;
        chosen.pop();
    }
    Ok(())
}

/// Maps of families over the identity of the points.
pub fn hom_cosheaf_finite(a: &FamObj, b: &FamObj) -> Result<Vec<FamMor>> {
    a.kind().expect(b.kind())?;
    if a.len() != b.len() {
        return Err(mismatch("families over different bases"));
    }
    let homs = (0..a.len()).map(|x| fincat::hom_set(a.fibre(x), b.fibre(x))).collect::<Result<Vec<_>>>()?;
    if homs.is_empty() {
        return Ok(vec![FamMor::identity(a)]);
    }
    let base: Vec<usize> = (0..a.len()).collect();
    Ok(homs
        .iter()
        .multi_cartesian_product()
        .map(|maps| FamMor::new_unchecked(a.clone(), b.clone(), base.clone(), maps.into_iter().cloned().collect()))
        .collect())
}

/// The transformation of precosheaves `U ↦ ⊔_{x∈U} ψ_x` induced by a map of
/// families over the identity.
pub fn induced_transformation(psi: &FamMor) -> Result<Vec<FinMor>> {
    let (src, tgt) = (as_precosheaf(psi.dom())?, as_precosheaf(psi.cod())?);
    (0..=src.full())
        .map(|u| {
            let pts: Vec<usize> = members(u).collect();
            let comps = pts
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    let inj = injection(&tgt, u, k)?;
                    fincat::compose(&inj, psi.fibre_map(x))
                })
                .collect::<Result<Vec<_>>>()?;
            fincat::copair(psi.kind(), &comps, tgt.value(u))
        })
        .collect()
}

fn injection(p: &PrecosheafFinite, u: u32, k: usize) -> Result<FinMor> {
    let x = members(u).nth(k).ok_or_else(|| mismatch("injection index out of range"))?;
    p.map(1 << x, u)
}

/// The family with `c` at `x` and the initial object elsewhere.
pub fn skyscraper_finite(points: usize, x: usize, c: &FinObj) -> Result<FamObj> {
    if x >= points {
        return Err(Error::OutOfRange { label: x, size: points });
    }
    let z = FinObj::initial(c.kind());
    FamObj::new(c.kind(), (0..points).map(|p| if p == x { c.clone() } else { z.clone() }).collect())
}

/// `sky_x(A_x) → A`: the identity at `x`, the unique map elsewhere.
pub fn skyscraper_counit(a: &FamObj, x: usize) -> Result<FamMor> {
    let sky = skyscraper_finite(a.len(), x, a.fibre(x))?;
    let maps = (0..a.len())
        .map(|p| if p == x { FinMor::identity(a.fibre(x)) } else { FinMor::from_initial(a.fibre(p)) })
        .collect();
    FamMor::new(sky, a.clone(), (0..a.len()).collect(), maps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_pre(points: usize, c: &FinObj) -> PrecosheafFinite {
        let full = (1u32 << points) - 1;
        let mut maps = BTreeMap::new();
        for u in 0..=full {
            for v in (0..=full).filter(|&v| is_strict_subset(v, u)) {
                maps.insert((v, u), FinMor::identity(c));
            }
        }
        PrecosheafFinite::new(c.kind(), points, vec![c.clone(); 1 << points], maps).unwrap()
    }

    #[test]
    fn families_are_cosheaves() {
        let a = FamObj::new(Kind::Set, vec![FinObj::set(1), FinObj::set(2)]).unwrap();
        let p = as_precosheaf(&a).unwrap();
        assert_eq!(p.functoriality_failure().unwrap(), None);
        assert!(p.is_cosheaf().unwrap());
        assert_eq!(p.value(0b11).order(), 3);
        let c = cosheafify_finite(&p).unwrap();
        assert!(c.counit.iter().all(FinMor::is_iso));
    }

    #[test]
    fn constant_precosheaf_is_not_a_cosheaf() {
        let p = constant_pre(2, &FinObj::set(2));
        assert!(!p.is_cosheaf().unwrap());
        let c = cosheafify_finite(&p).unwrap();
        assert_eq!(c.family.len(), 2);
        assert_eq!(c.as_precosheaf.value(0b11).order(), 4);
        assert_eq!(c.as_precosheaf.value(0).order(), 0);
    }

    #[test]
    fn natural_transformations_of_families_match_fibrewise_maps() {
        let a = FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(1)]).unwrap();
        let b = FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(2)]).unwrap();
        let nat = natural_transformations(&as_precosheaf(&a).unwrap(), &as_precosheaf(&b).unwrap()).unwrap();
        assert_eq!(nat.len(), hom_cosheaf_finite(&a, &b).unwrap().len());
        assert_eq!(nat.len(), 8);
    }

    #[test]
    fn skyscraper_counit_at_a_point() {
        let a = FamObj::new(Kind::AbelianGroup, vec![FinObj::cyclic(2), FinObj::cyclic(3)]).unwrap();
        let e = skyscraper_counit(&a, 1).unwrap();
        assert_eq!(e.dom().fibre(0).order(), 1);
        assert_eq!(e.fibre_map(1), &FinMor::identity(&FinObj::cyclic(3)));
    }
}
