use super::{compose, FamMor, FamObj};
use crate::error::{mismatch, Error, Result};
use crate::fincat::{self, FinMor, FinObj, Kind};

/// A finite diagram whose limit is computed fibrewise.
#[derive(Clone, Debug)]
pub enum FiniteDiagram<'a> {
    Terminal(Kind),
    Product(&'a FamObj, &'a FamObj),
    Equalizer(&'a FamMor, &'a FamMor),
    Pullback(&'a FamMor, &'a FamMor),
}

/// A limit cone: the apex with one leg per diagram vertex that is not
/// determined by the others (both factors of a product or pullback, the
/// inclusion of an equalizer).
#[derive(Clone, Debug)]
pub struct Cone {
    pub apex: FamObj,
    pub legs: Vec<FamMor>,
}

pub fn limit_finite(d: FiniteDiagram<'_>) -> Result<Cone> {
    match d {
        FiniteDiagram::Terminal(kind) => Ok(Cone { apex: terminal(kind), legs: Vec::new() }),
        FiniteDiagram::Product(a, b) => {
            let (apex, p1, p2) = product(a, b)?;
            Ok(Cone { apex, legs: vec![p1, p2] })
        }
        FiniteDiagram::Equalizer(f, g) => {
            let e = equalizer(f, g)?;
            Ok(Cone { apex: e.dom().clone(), legs: vec![e] })
        }
        FiniteDiagram::Pullback(f, g) => {
            let (apex, p1, p2) = pullback(f, g)?;
            Ok(Cone { apex, legs: vec![p1, p2] })
        }
    }
}

/// One index with the terminal fibre.
pub fn terminal(kind: Kind) -> FamObj {
    FamObj::point(FinObj::terminal(kind))
}

/// The map to the terminal family.
pub fn to_terminal(a: &FamObj) -> FamMor {
    let t = terminal(a.kind());
    let maps = a.fibres().iter().map(FinMor::to_terminal).collect();
    FamMor::new_unchecked(a.clone(), t, vec![0; a.len()], maps)
}

/// Product indexed by `X × Y` (row-major) with fibres `A_x × B_y`.
pub fn product(a: &FamObj, b: &FamObj) -> Result<(FamObj, FamMor, FamMor)> {
    a.kind().expect(b.kind())?;
    let mut fibres = Vec::with_capacity(a.len() * b.len());
    let (mut m1, mut m2) = (Vec::new(), Vec::new());
    for x in 0..a.len() {
        for y in 0..b.len() {
            let p = fincat::product(a.fibre(x), b.fibre(y))?;
            fibres.push(p.obj);
            m1.push(p.p1);
            m2.push(p.p2);
        }
    }
    let apex = FamObj::new_unchecked(a.kind(), fibres);
    let n = b.len();
    let b1 = (0..apex.len()).map(|k| k / n).collect();
    let b2 = (0..apex.len()).map(|k| k % n).collect();
    Ok((
        apex.clone(),
        FamMor::new_unchecked(apex.clone(), a.clone(), b1, m1),
        FamMor::new_unchecked(apex, b.clone(), b2, m2),
    ))
}

/// Mediating map `⟨f, g⟩` into `product(cod f, cod g)`.
pub fn pair(f: &FamMor, g: &FamMor) -> Result<FamMor> {
    if f.dom() != g.dom() {
        return Err(mismatch("pairing maps with different domains"));
    }
    let (apex, _, _) = product(f.cod(), g.cod())?;
    let n = g.cod().len();
    let base = f.base().iter().zip(g.base()).map(|(&x, &y)| x * n + y).collect();
    let maps =
        f.fibre_maps().iter().zip(g.fibre_maps()).map(|(p, q)| fincat::pair(p, q)).collect::<Result<Vec<_>>>()?;
    Ok(FamMor::new_unchecked(f.dom().clone(), apex, base, maps))
}

/// Equalizer: indexed by `{x : f(x) = g(x)}` with fibres `Eq(φ_x, ψ_x)`.
pub fn equalizer(f: &FamMor, g: &FamMor) -> Result<FamMor> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(mismatch("equalizer of a non-parallel pair"));
    }
    let pts: Vec<usize> = (0..f.dom().len()).filter(|&x| f.base()[x] == g.base()[x]).collect();
    let incs = pts.iter().map(|&x| fincat::equalizer(f.fibre_map(x), g.fibre_map(x))).collect::<Result<Vec<_>>>()?;
    let apex = FamObj::new_unchecked(f.kind(), incs.iter().map(|m| m.dom().clone()).collect());
    Ok(FamMor::new_unchecked(apex, f.dom().clone(), pts, incs))
}

/// Pullback of a cospan, from the product and an equalizer.
pub fn pullback(f: &FamMor, g: &FamMor) -> Result<(FamObj, FamMor, FamMor)> {
    if f.cod() != g.cod() {
        return Err(mismatch("pullback of maps with different codomains"));
    }
    let (_, p1, p2) = product(f.dom(), g.dom())?;
    let e = equalizer(&compose(f, &p1)?, &compose(g, &p2)?)?;
    Ok((e.dom().clone(), compose(&p1, &e)?, compose(&p2, &e)?))
}

/// The kernel pair of `m`, as the two projections of `m ×_B m`.
pub fn kernel_pair(m: &FamMor) -> Result<(FamMor, FamMor)> {
    let (_, p1, p2) = pullback(m, m)?;
    Ok((p1, p2))
}

/// Image factorization `m = mono ∘ repi`. The image is indexed by the
/// image of the base function (in increasing order) and its fibre over
/// `y` is the joint image of the fibre maps over `y`.
pub fn image_factor(m: &FamMor) -> Result<(FamMor, FamMor)> {
    let mut ys: Vec<usize> = m.base().to_vec();
    ys.sort_unstable();
    ys.dedup();
    let mut fibres = Vec::with_capacity(ys.len());
    let mut incs = Vec::with_capacity(ys.len());
    let mut lifts: Vec<Option<FinMor>> = vec![None; m.dom().len()];
    for &y in &ys {
        let over = m.preimage(y);
        let maps: Vec<FinMor> = over.iter().map(|&x| m.fibre_map(x).clone()).collect();
        let (sub, ls) = fincat::joint_image(&maps)?;
        fibres.push(sub.object().clone());
        incs.push(sub.inclusion().clone());
        for (x, l) in over.into_iter().zip(ls) {
            lifts[x] = Some(l);
        }
    }
    let img = FamObj::new_unchecked(m.kind(), fibres);
    let pos = |y: usize| ys.binary_search(&y).unwrap();
    let repi = FamMor::new_unchecked(
        m.dom().clone(),
        img.clone(),
        m.base().iter().map(|&y| pos(y)).collect(),
        lifts.into_iter().map(Option::unwrap).collect(),
    );
    let mono = FamMor::new_unchecked(img, m.cod().clone(), ys, incs);
    Ok((repi, mono))
}

/// The unique `h` with `mono ∘ h = f`, for `mono` monic.
pub fn factor_through_mono(f: &FamMor, mono: &FamMor) -> Result<FamMor> {
    if f.cod() != mono.cod() {
        return Err(mismatch("lift through a mono with a different codomain"));
    }
    let mut base = Vec::with_capacity(f.dom().len());
    let mut maps = Vec::with_capacity(f.dom().len());
    for (x, &y) in f.base().iter().enumerate() {
        let z = mono
            .base()
            .iter()
            .position(|&w| w == y)
            .ok_or_else(|| Error::Precondition(format!("index {y} is not in the image")))?;
        base.push(z);
        maps.push(fincat::factor_through_mono(f.fibre_map(x), mono.fibre_map(z))?);
    }
    Ok(FamMor::new_unchecked(f.dom().clone(), mono.dom().clone(), base, maps))
}

/// Coequalizer of the kernel pair of `m`: the image with its regular
/// epimorphism leg.
pub fn coeq_kernel_pair(m: &FamMor) -> Result<(FamObj, FamMor)> {
    let (repi, _) = image_factor(m)?;
    Ok((repi.cod().clone(), repi))
}

/// Whether `q ∘ p1 = q ∘ p2`.
pub fn coequalizes(q: &FamMor, p1: &FamMor, p2: &FamMor) -> Result<bool> {
    Ok(compose(q, p1)? == compose(q, p2)?)
}

impl FamMor {
    /// Base surjective and every fibre of the codomain is the joint image
    /// of the fibre maps over it.
    pub fn try_is_epi(&self) -> Result<bool> {
        Ok(self.epi_witness()?.is_none())
    }

    /// The first codomain index at which the epi test fails.
    pub fn epi_witness(&self) -> Result<Option<usize>> {
        for y in 0..self.cod().len() {
            let over = self.preimage(y);
            if over.is_empty() {
                return Ok(Some(y));
            }
            let maps: Vec<FinMor> = over.iter().map(|&x| self.fibre_map(x).clone()).collect();
            if !fincat::joint_image(&maps)?.0.is_whole() {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }

    /// Base injective and every fibre map monic.
    pub fn try_is_mono(&self) -> Result<bool> {
        let mut seen = vec![false; self.cod().len()];
        if !self.base().iter().all(|&y| !std::mem::replace(&mut seen[y], true)) {
            return Ok(false);
        }
        for phi in self.fibre_maps() {
            if !phi.try_is_mono()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_epi(&self) -> bool {
        self.try_is_epi().expect("epi test within enumeration limits")
    }

    pub fn is_mono(&self) -> bool {
        self.try_is_mono().expect("mono test within enumeration limits")
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// Inverse of an isomorphism of families.
    pub fn inverse(&self) -> Result<FamMor> {
        if !self.try_is_mono()? || !self.try_is_epi()? {
            return Err(Error::Precondition("family map is not invertible".into()));
        }
        let mut base = vec![0; self.cod().len()];
        let mut maps: Vec<Option<FinMor>> = vec![None; self.cod().len()];
        for (x, &y) in self.base().iter().enumerate() {
            base[y] = x;
            maps[y] = Some(self.fibre_map(x).inverse()?);
        }
        Ok(FamMor::new_unchecked(
            self.cod().clone(),
            self.dom().clone(),
            base,
            maps.into_iter().map(Option::unwrap).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::Factor;

    #[test]
    fn product_with_terminal() {
        let a = FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap();
        let (apex, p1, _) = product(&a, &terminal(Kind::Set)).unwrap();
        assert_eq!(apex.len(), 2);
        assert!(p1.is_iso());
    }

    #[test]
    fn joint_image_of_z2_and_z3_in_z6() {
        let z6 = FinObj::cyclic(6);
        let a = FamObj::new(Kind::AbelianGroup, vec![FinObj::cyclic(2), FinObj::cyclic(3)]).unwrap();
        let b = FamObj::point(z6.clone());
        let i2 = FinMor::new(FinObj::cyclic(2), z6.clone(), vec![0, 3]).unwrap();
        let i3 = FinMor::new(FinObj::cyclic(3), z6.clone(), vec![0, 2, 4]).unwrap();
        let m = FamMor::new(a, b, vec![0, 0], vec![i2, i3]).unwrap();
        let (repi, mono) = image_factor(&m).unwrap();
        assert_eq!(mono.dom().fibre(0).order(), 6);
        assert!(repi.is_epi());
        assert!(m.is_epi());
        assert_eq!(compose(&mono, &repi).unwrap(), m);
    }

    #[test]
    fn abelian_joint_epi_is_not_pullback_stable() {
        let z2 = FinObj::cyclic(2);
        let v = FinObj::abelian(vec![Factor::cyclic(2).unwrap(), Factor::cyclic(2).unwrap()]);
        let first = FinMor::new(z2.clone(), v.clone(), vec![0, 2]).unwrap();
        let second = FinMor::new(z2.clone(), v.clone(), vec![0, 1]).unwrap();
        let e =
            FamMor::new(FamObj::constant(&z2, 2), FamObj::point(v.clone()), vec![0, 0], vec![first, second]).unwrap();
        assert!(e.is_epi());
        let diagonal = FinMor::new(z2.clone(), v.clone(), vec![0, 3]).unwrap();
        let g = FamMor::new(FamObj::point(z2.clone()), FamObj::point(v), vec![0], vec![diagonal]).unwrap();
        let (apex, _, p2) = pullback(&e, &g).unwrap();
        assert!(apex.fibres().iter().all(|f| f.order() == 1));
        assert!(!p2.is_epi());
    }

    #[test]
    fn group_joint_epi_is_not_pullback_stable() {
        let s3 = FinObj::symmetric3();
        let z2 = FinObj::cyclic_group(2);
        let z3 = FinObj::cyclic_group(3);
        let flips: Vec<FinMor> =
            [1, 2].iter().map(|&t| FinMor::new(z2.clone(), s3.clone(), vec![0, t]).unwrap()).collect();
        let e = FamMor::new(FamObj::constant(&z2, 2), FamObj::point(s3.clone()), vec![0, 0], flips).unwrap();
        assert!(e.is_epi());
        let rotation = crate::fincat::hom_set(&z3, &s3).unwrap().into_iter().find(FinMor::is_mono).unwrap();
        let g = FamMor::new(FamObj::point(z3), FamObj::point(s3), vec![0], vec![rotation]).unwrap();
        let (_, _, p2) = pullback(&e, &g).unwrap();
        assert!(!p2.is_epi());
    }

    #[test]
    fn equalizer_shrinks_one_fibre() {
        let z2 = FinObj::abelian(vec![Factor::cyclic(2).unwrap()]);
        let a = FamObj::constant(&z2, 2);
        let id = FamMor::identity(&a);
        let zero = FinMor::zero(&z2, &z2).unwrap();
        let g = FamMor::new(a.clone(), a.clone(), vec![0, 1], vec![FinMor::identity(&z2), zero]).unwrap();
        let e = equalizer(&id, &g).unwrap();
        assert_eq!(e.dom().len(), 2);
        assert_eq!(e.dom().fibre(0).order(), 2);
        assert_eq!(e.dom().fibre(1).order(), 1);
    }

    #[test]
    fn pullback_of_coprojections_is_empty() {
        let a = FamObj::point(FinObj::set(2));
        let b = FamObj::point(FinObj::set(1));
        let (_, i1, i2) = super::super::coproduct(&a, &b).unwrap();
        let (apex, _, _) = pullback(&i1, &i2).unwrap();
        assert!(apex.is_empty());
    }

    #[test]
    fn fold_coequalizer_is_one_copy() {
        let c = FinObj::set(2);
        let a = FamObj::constant(&c, 2);
        let fold =
            FamMor::new(a, FamObj::point(c.clone()), vec![0, 0], vec![FinMor::identity(&c), FinMor::identity(&c)])
                .unwrap();
        let (q, leg) = coeq_kernel_pair(&fold).unwrap();
        assert_eq!(q, FamObj::point(c));
        let (p1, p2) = kernel_pair(&fold).unwrap();
        assert!(coequalizes(&leg, &p1, &p2).unwrap());
    }
}
