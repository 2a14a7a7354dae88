//! Cosection oracles: anything that hands out objects over clopens at each
//! level, with inclusions and transitions. Used to rebuild a chain of
//! families and to test the disjoint-union property.

use super::Cosheaf;
use crate::error::{Error, Result};
use crate::fam::{FamMor, FamObj};
use crate::fincat::{self, FinMor, FinObj, Kind};
use crate::prospace::{ClopenSet, ProSpace};
use crate::prosys::{normalize, ProChain};

pub trait CosectionOracle: Send + Sync {
    fn space(&self) -> &ProSpace;
    fn kind(&self) -> Kind;
    /// Highest level the oracle can answer at, if bounded.
    fn available(&self) -> Option<usize> {
        None
    }
    /// The object over `U` at level `m`.
    fn cosection(&self, u: &ClopenSet, m: usize) -> Result<FinObj>;
    /// The map induced by `V ⊆ U` at level `m`.
    fn inclusion(&self, v: &ClopenSet, u: &ClopenSet, m: usize) -> Result<FinMor>;
    /// The transition over `U` from level `m + 1` to `m`.
    fn transition(&self, u: &ClopenSet, m: usize) -> Result<FinMor>;

    fn transition_to(&self, u: &ClopenSet, m: usize, n: usize) -> Result<FinMor> {
        if m < n {
            return Err(Error::LevelOrder { from: m, to: n });
        }
        let mut acc = FinMor::identity(&self.cosection(u, m)?);
        for k in (n..m).rev() {
            acc = fincat::compose(&self.transition(u, k)?, &acc)?;
        }
        Ok(acc)
    }
}

/// The oracle of a cosheaf's own cosections.
#[derive(Clone, Debug)]
pub struct CosheafOracle {
    pub cosheaf: Cosheaf,
}

impl CosheafOracle {
    pub fn new(cosheaf: &Cosheaf) -> Self {
        Self { cosheaf: cosheaf.clone() }
    }
}

impl CosectionOracle for CosheafOracle {
    fn space(&self) -> &ProSpace {
        self.cosheaf.base()
    }
    fn kind(&self) -> Kind {
        self.cosheaf.kind()
    }
    fn cosection(&self, u: &ClopenSet, m: usize) -> Result<FinObj> {
        Ok(self.cosheaf.cosection_at(u, m)?.sum.obj)
    }
    fn inclusion(&self, v: &ClopenSet, u: &ClopenSet, m: usize) -> Result<FinMor> {
        self.cosheaf.cosection_inclusion(v, u, m)
    }
    fn transition(&self, u: &ClopenSet, m: usize) -> Result<FinMor> {
        self.cosheaf.cosection_transition(u, m)
    }
}

/// The same object over every clopen with identity maps. A precosheaf that
/// is not a cosheaf once the space has two disjoint nonempty clopens.
#[derive(Clone, Debug)]
pub struct ConstantPrecosheaf {
    pub space: ProSpace,
    pub value: FinObj,
}

impl CosectionOracle for ConstantPrecosheaf {
    fn space(&self) -> &ProSpace {
        &self.space
    }
    fn kind(&self) -> Kind {
        self.value.kind()
    }
    fn cosection(&self, _: &ClopenSet, _: usize) -> Result<FinObj> {
        Ok(self.value.clone())
    }
    fn inclusion(&self, _: &ClopenSet, _: &ClopenSet, _: usize) -> Result<FinMor> {
        Ok(FinMor::identity(&self.value))
    }
    fn transition(&self, _: &ClopenSet, _: usize) -> Result<FinMor> {
        Ok(FinMor::identity(&self.value))
    }
}

/// Replaces every proper inclusion of the wrapped oracle by a constant map
/// onto the base point.
#[derive(Clone, Debug)]
pub struct CorruptInclusions<O> {
    pub inner: O,
}

impl<O: CosectionOracle> CosectionOracle for CorruptInclusions<O> {
    fn space(&self) -> &ProSpace {
        self.inner.space()
    }
    fn kind(&self) -> Kind {
        self.inner.kind()
    }
    fn available(&self) -> Option<usize> {
        self.inner.available()
    }
    fn cosection(&self, u: &ClopenSet, m: usize) -> Result<FinObj> {
        self.inner.cosection(u, m)
    }
    fn inclusion(&self, v: &ClopenSet, u: &ClopenSet, m: usize) -> Result<FinMor> {
        let honest = self.inner.inclusion(v, u, m)?;
        if self.space().same(v, u)? {
            return Ok(honest);
        }
        match self.kind() {
            Kind::Set if honest.cod().order() > 0 => FinMor::constant(honest.dom(), honest.cod(), 0),
            Kind::Set => Ok(honest),
            _ => FinMor::zero(honest.dom(), honest.cod()),
        }
    }
    fn transition(&self, u: &ClopenSet, m: usize) -> Result<FinMor> {
        self.inner.transition(u, m)
    }
}

/// The comparison `O(U) ⊔ O(V) → O(U ⊔ V)` at one level with its
/// constructed inverse.
#[derive(Clone, Debug)]
pub struct DisjointUnionWitness {
    pub level: usize,
    pub comparison: FinMor,
    pub inverse: Option<FinMor>,
    /// Both composites of comparison and inverse are identities.
    pub round_trip: bool,
    /// The comparison commutes with the transitions from level `m + 1`.
    pub natural: bool,
}

impl DisjointUnionWitness {
    pub fn holds(&self) -> bool {
        self.inverse.is_some() && self.round_trip && self.natural
    }
}

fn comparison(o: &dyn CosectionOracle, u: &ClopenSet, v: &ClopenSet, w: &ClopenSet, m: usize) -> Result<FinMor> {
    fincat::copair(o.kind(), &[o.inclusion(u, w, m)?, o.inclusion(v, w, m)?], &o.cosection(w, m)?)
}

/// Tests the disjoint-union property of an oracle for disjoint clopens at
/// a level no lower than either of theirs.
pub fn disjoint_union_witness(
    o: &dyn CosectionOracle,
    u: &ClopenSet,
    v: &ClopenSet,
    m: usize,
) -> Result<DisjointUnionWitness> {
    let kind = o.kind();
    if !kind.has_coproducts() {
        return Err(Error::NoCoproduct(kind));
    }
    let space = o.space();
    if m < u.level.max(v.level) {
        return Err(Error::LevelOrder { from: m, to: u.level.max(v.level) });
    }
    if !space.is_disjoint(u, v)? {
        return Err(Error::Precondition("disjoint-union witness needs disjoint clopens".into()));
    }
    let w = space.join(u, v)?;
    let kappa = comparison(o, u, v, &w, m)?;
    let inverse = if kappa.try_is_iso()? { Some(kappa.inverse()?) } else { None };
    let round_trip = match &inverse {
        Some(inv) => {
            fincat::compose(&kappa, inv)? == FinMor::identity(kappa.cod())
                && fincat::compose(inv, &kappa)? == FinMor::identity(kappa.dom())
        }
        None => false,
    };
    let upper = comparison(o, u, v, &w, m + 1)?;
    let sum_lo = fincat::coproduct(&o.cosection(u, m)?, &o.cosection(v, m)?)?;
    let down = fincat::copair(
        kind,
        &[
            fincat::compose(&sum_lo.injections[0], &o.transition(u, m)?)?,
            fincat::compose(&sum_lo.injections[1], &o.transition(v, m)?)?,
        ],
        &sum_lo.obj,
    )?;
    let natural = fincat::compose(&kappa, &down)? == fincat::compose(&o.transition(&w, m)?, &upper)?;
    Ok(DisjointUnionWitness { level: m, comparison: kappa, inverse, round_trip, natural })
}

impl Cosheaf {
    pub fn disjoint_union_witness(&self, u: &ClopenSet, v: &ClopenSet, m: usize) -> Result<DisjointUnionWitness> {
        disjoint_union_witness(&CosheafOracle::new(self), u, v, m)
    }
}

/// A chain of families rebuilt from a cosection oracle: the fibre over
/// `x ∈ X_n` is the image of the cosections of the cell of `x`, taken
/// `lookahead` levels up, in the global cosections at level `n`.
#[derive(Clone, Debug)]
pub struct InvDecomposition {
    pub lookahead: usize,
    pub levels: Vec<FamObj>,
    pub transitions: Vec<FamMor>,
    /// Fibre inclusions into the global cosections at each level.
    pub images: Vec<Vec<FinMor>>,
}

pub fn inv_decompose(o: &dyn CosectionOracle, truncation: usize, lookahead: usize) -> Result<InvDecomposition> {
    if let Some(avail) = o.available() {
        if truncation + lookahead > avail {
            return Err(Error::Precondition(format!(
                "truncation {truncation} with lookahead {lookahead} exceeds oracle levels up to {avail}"
            )));
        }
    }
    let space = o.space();
    let kind = o.kind();
    let whole = space.whole();
    let mut levels = Vec::new();
    let mut images = Vec::new();
    for n in 0..=truncation {
        let down = o.transition_to(&whole, n + lookahead, n)?;
        let mut fibres = Vec::new();
        let mut monos = Vec::new();
        for x in 0..space.size(n) {
            let cell = space.cell(n, x)?;
            let f = fincat::compose(&down, &o.inclusion(&cell, &whole, n + lookahead)?)?;
            let (_, mono) = fincat::image_factor(&f)?;
            fibres.push(mono.dom().clone());
            monos.push(mono);
        }
        levels.push(FamObj::new(kind, fibres)?);
        images.push(monos);
    }
    let mut transitions = Vec::new();
    for n in 0..truncation {
        let base = space.chain().transition(n).table()?;
        let t = o.transition(&whole, n)?;
        let maps = (0..base.len())
            .map(|x| {
                let g = fincat::compose(&t, &images[n + 1][x])?;
                fincat::factor_through_mono(&g, &images[n][base[x]]).map_err(|_| {
                    Error::Precondition(format!("oracle transitions do not preserve cell images at level {n}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        transitions.push(FamMor::new(levels[n + 1].clone(), levels[n].clone(), base, maps)?);
    }
    Ok(InvDecomposition { lookahead, levels, transitions, images })
}

impl InvDecomposition {
    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    /// The rebuilt levels as a chain with a constant tail after the
    /// truncation level.
    pub fn to_chain(&self) -> Result<ProChain<FamMor>> {
        ProChain::from_levels(self.levels.clone(), self.transitions.clone())
    }

    /// Compares with the epi-normalization of `a` at the same lookahead:
    /// at each level, each rebuilt fibre and the corresponding normalized
    /// fibre are the same subobject of the global cosections. Returns the
    /// first `(level, point)` where they differ.
    pub fn mismatch_with_normalization(&self, a: &Cosheaf) -> Result<Option<(usize, usize)>> {
        let norm = normalize(a.chain(), self.lookahead);
        for (n, monos) in self.images.iter().enumerate() {
            let incl = norm.inclusion.at(n);
            let global = crate::fam::global_cosections(&a.level(n))?;
            for (x, m1) in monos.iter().enumerate() {
                if m1.cod() != &global.obj {
                    return Ok(Some((n, x)));
                }
                let same = match incl.base().iter().position(|&y| y == x) {
                    Some(i) => {
                        let m2 = fincat::compose(&global.injections[x], incl.fibre_map(i))?;
                        fincat::factor_through_mono(m1, &m2).is_ok() && fincat::factor_through_mono(&m2, m1).is_ok()
                    }
                    None => m1.dom().order() == FinObj::initial(a.kind()).order(),
                };
                if !same {
                    return Ok(Some((n, x)));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::FinObj;

    #[test]
    fn constant_precosheaf_fails_the_disjoint_union_test() {
        let x = ProSpace::cantor();
        let c = ConstantPrecosheaf { space: x.clone(), value: FinObj::set(2) };
        let (u, v) = (x.cell(1, 0).unwrap(), x.cell(1, 1).unwrap());
        let w = disjoint_union_witness(&c, &u, &v, 1).unwrap();
        assert!(!w.holds());
        let a = Cosheaf::constant(&FinObj::set(2), &x);
        assert!(a.disjoint_union_witness(&u, &v, 2).unwrap().holds());
    }

    #[test]
    fn rebuilds_a_constant_cosheaf() {
        let a = Cosheaf::constant(&FinObj::cyclic(2), &ProSpace::cantor());
        let d = inv_decompose(&CosheafOracle::new(&a), 3, 1).unwrap();
        assert_eq!(d.levels[3].len(), 8);
        assert!(d.levels[3].fibres().iter().all(|f| f.order() == 2));
        assert_eq!(d.mismatch_with_normalization(&a).unwrap(), None);
        let bad = CorruptInclusions { inner: CosheafOracle::new(&a) };
        let d = inv_decompose(&bad, 3, 1).unwrap();
        assert!(d.levels[2].fibres().iter().all(FinObj::is_trivial));
        assert_eq!(d.mismatch_with_normalization(&a).unwrap(), Some((1, 0)));
    }
}
