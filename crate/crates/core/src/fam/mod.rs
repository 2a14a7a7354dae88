//! Finite families of objects of a base category and maps between them.
//!
//! A family over the finite index `{0, …, n-1}` is the same thing as a
//! cosheaf on an `n`-point discrete space with the given costalks.

mod hom;
mod regular;

use crate::error::{mismatch, Error, Result};
use crate::fincat::{self, FinMor, FinObj, Kind};

pub use hom::{copair, coproduct, coproduct_many, find_iso, global_cosections, global_map, hom_out, hom_set};
pub use regular::{
    coeq_kernel_pair, coequalizes, equalizer, factor_through_mono, image_factor, kernel_pair, limit_finite, pair,
    product, pullback, terminal, to_terminal, Cone, FiniteDiagram,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamObj {
    kind: Kind,
    fibres: Vec<FinObj>,
}

impl FamObj {
    pub fn new(kind: Kind, fibres: Vec<FinObj>) -> Result<Self> {
        for f in &fibres {
            kind.expect(f.kind())?;
        }
        Ok(Self { kind, fibres })
    }

    pub(crate) fn new_unchecked(kind: Kind, fibres: Vec<FinObj>) -> Self {
        Self { kind, fibres }
    }

    /// The empty family, initial in `Fam(D)`.
    pub fn empty(kind: Kind) -> Self {
        Self { kind, fibres: Vec::new() }
    }

    pub fn point(fibre: FinObj) -> Self {
        Self { kind: fibre.kind(), fibres: vec![fibre] }
    }

    /// `n` copies of one object.
    pub fn constant(fibre: &FinObj, n: usize) -> Self {
        Self { kind: fibre.kind(), fibres: vec![fibre.clone(); n] }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.fibres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibres.is_empty()
    }

    pub fn fibre(&self, x: usize) -> &FinObj {
        &self.fibres[x]
    }

    pub fn fibres(&self) -> &[FinObj] {
        &self.fibres
    }

    /// The subfamily on `points` (in the given order) with its inclusion.
    pub fn restrict(&self, points: &[usize]) -> Result<(FamObj, FamMor)> {
        if let Some(&x) = points.iter().find(|&&x| x >= self.len()) {
            return Err(Error::OutOfRange { label: x, size: self.len() });
        }
        let sub = FamObj::new_unchecked(self.kind, points.iter().map(|&x| self.fibres[x].clone()).collect());
        let maps = points.iter().map(|&x| FinMor::identity(&self.fibres[x])).collect();
        let inc = FamMor::new_unchecked(sub.clone(), self.clone(), points.to_vec(), maps);
        Ok((sub, inc))
    }

    /// Reindexing along a map of finite sets `g : X → Y`: the fibre at `x`
    /// is the fibre of `self` at `g(x)`.
    pub fn inverse_image(&self, g: &[usize]) -> Result<FamObj> {
        if let Some(&y) = g.iter().find(|&&y| y >= self.len()) {
            return Err(Error::OutOfRange { label: y, size: self.len() });
        }
        Ok(FamObj::new_unchecked(self.kind, g.iter().map(|&y| self.fibres[y].clone()).collect()))
    }
}

/// A map of families: a base function together with fibre maps
/// `A_x → B_{f(x)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamMor {
    dom: FamObj,
    cod: FamObj,
    base: Vec<usize>,
    maps: Vec<FinMor>,
}

impl FamMor {
    pub fn new(dom: FamObj, cod: FamObj, base: Vec<usize>, maps: Vec<FinMor>) -> Result<Self> {
        let m = Self { dom, cod, base, maps };
        m.check()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(dom: FamObj, cod: FamObj, base: Vec<usize>, maps: Vec<FinMor>) -> Self {
        Self { dom, cod, base, maps }
    }

    /// Validates the shape, reporting the first offending index.
    pub fn check(&self) -> Result<()> {
        self.dom.kind.expect(self.cod.kind)?;
        if self.base.len() != self.dom.len() || self.maps.len() != self.dom.len() {
            return Err(mismatch(format!(
                "base table of length {} and {} fibre maps over an index of size {}",
                self.base.len(),
                self.maps.len(),
                self.dom.len()
            )));
        }
        for (x, (&y, phi)) in self.base.iter().zip(&self.maps).enumerate() {
            if y >= self.cod.len() {
                return Err(Error::OutOfRange { label: y, size: self.cod.len() });
            }
            if phi.dom() != self.dom.fibre(x) || phi.cod() != self.cod.fibre(y) {
                return Err(mismatch(format!("fibre map at {x} does not run from A_{x} to B_{y}")));
            }
        }
        Ok(())
    }

    pub fn identity(a: &FamObj) -> Self {
        Self::new_unchecked(
            a.clone(),
            a.clone(),
            (0..a.len()).collect(),
            a.fibres.iter().map(FinMor::identity).collect(),
        )
    }

    /// The unique map out of the empty family.
    pub fn from_empty(b: &FamObj) -> Self {
        Self::new_unchecked(FamObj::empty(b.kind), b.clone(), Vec::new(), Vec::new())
    }

    pub fn dom(&self) -> &FamObj {
        &self.dom
    }

    pub fn cod(&self) -> &FamObj {
        &self.cod
    }

    pub fn kind(&self) -> Kind {
        self.dom.kind
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn fibre_map(&self, x: usize) -> &FinMor {
        &self.maps[x]
    }

    pub fn fibre_maps(&self) -> &[FinMor] {
        &self.maps
    }

    /// Points of the domain over `y`.
    pub fn preimage(&self, y: usize) -> Vec<usize> {
        (0..self.base.len()).filter(|&x| self.base[x] == y).collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FamMor) -> Result<FamMor> {
        compose(g, self)
    }
}

/// `g ∘ f`.
pub fn compose(g: &FamMor, f: &FamMor) -> Result<FamMor> {
    if f.cod != g.dom {
        return Err(mismatch("composing families over mismatched objects"));
    }
    let base = f.base.iter().map(|&y| g.base[y]).collect();
    let maps =
        f.maps.iter().zip(&f.base).map(|(phi, &y)| fincat::compose(&g.maps[y], phi)).collect::<Result<Vec<_>>>()?;
    Ok(FamMor::new_unchecked(f.dom.clone(), g.cod.clone(), base, maps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_along_the_base() {
        let a = FamObj::constant(&FinObj::set(2), 2);
        let b = FamObj::point(FinObj::set(3));
        let c = FamObj::point(FinObj::set(1));
        let f0 = FinMor::new(FinObj::set(2), FinObj::set(3), vec![0, 1]).unwrap();
        let f1 = FinMor::new(FinObj::set(2), FinObj::set(3), vec![2, 2]).unwrap();
        let f = FamMor::new(a.clone(), b.clone(), vec![0, 0], vec![f0, f1]).unwrap();
        let g = FamMor::new(b, c.clone(), vec![0], vec![FinMor::to_terminal(&FinObj::set(3))]).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf.base(), &[0, 0]);
        assert_eq!(gf.fibre_map(1).table().unwrap(), vec![0, 0]);
        assert_eq!(compose(&FamMor::identity(&c), &gf).unwrap(), gf);
    }

    #[test]
    fn validation_catches_wrong_fibres() {
        let a = FamObj::point(FinObj::set(2));
        let b = FamObj::constant(&FinObj::set(2), 2);
        let bad = FinMor::identity(&FinObj::set(3));
        assert!(FamMor::new(a.clone(), b.clone(), vec![0], vec![bad]).is_err());
        assert!(FamMor::new(a.clone(), b.clone(), vec![2], vec![FinMor::identity(&FinObj::set(2))]).is_err());
        assert!(FamObj::new(Kind::Set, vec![FinObj::cyclic(2)]).is_err());
    }
}
