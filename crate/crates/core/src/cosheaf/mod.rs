//! Profinite cosheaves presented as chains of finite families.
//!
//! Level `n` of a cosheaf is a family over the finite set `X_n`; the base
//! space is read off from the index sets and base functions. Cosections,
//! costalks and global cosections are derived from the chain.

mod cosections;
mod finite;
mod hom;
mod oracle;

use crate::error::{Error, Result};
use crate::fam::{self, FamMor, FamObj};
use crate::fincat::{self, FinMor, FinObj, Kind};
use crate::prospace::{PointThread, ProSpace};
use crate::prosys::{ChainInfo, ChainMor, ProChain};

pub use cosections::{CosectionLevel, TupleClasses};
pub use finite::{
    as_precosheaf, cosheafify_finite, hom_cosheaf_finite, induced_transformation, natural_transformations,
    skyscraper_counit, skyscraper_finite, Cosheafification, PrecosheafFinite,
};
pub use hom::{hom_cosheaf, CosheafHom, EpiCertificate};
pub use oracle::{
    disjoint_union_witness, inv_decompose, ConstantPrecosheaf, CorruptInclusions, CosectionOracle, CosheafOracle,
    DisjointUnionWitness, InvDecomposition,
};

/// Levels at which generator threads are validated when no other bound
/// is given.
pub const THREAD_CHECK_LEVELS: usize = 6;

#[derive(Clone, Debug)]
pub struct Cosheaf {
    chain: ProChain<FamMor>,
    base: ProSpace,
    kind: Kind,
}

impl Cosheaf {
    /// The cosheaf presented by a chain of families. The base is
    /// surjective when the chain is declared epic.
    pub fn limit_of_chain(chain: ProChain<FamMor>) -> Result<Self> {
        let surjective = chain.info().epic;
        Self::with_base_surjectivity(chain, surjective)
    }

    /// As [`Cosheaf::limit_of_chain`], declaring whether the base
    /// transitions are surjective.
    pub fn with_base_surjectivity(chain: ProChain<FamMor>, surjective: bool) -> Result<Self> {
        let kind = chain.level(0).kind();
        let info = ChainInfo { epic: surjective, ..chain.info() };
        let base_chain = chain
            .map(
                |_, a: &FamObj| FinObj::set(a.len()),
                |_, t: &FamMor| {
                    FinMor::new(FinObj::set(t.dom().len()), FinObj::set(t.cod().len()), t.base().to_vec())
                        .expect("base functions are set maps")
                },
            )
            .with_info(info);
        let base = ProSpace::from_chain(base_chain)?;
        Ok(Self { chain, base, kind })
    }

    /// The cosheaf on a finite discrete space given by one family.
    pub fn finite(a: FamObj) -> Self {
        Self::limit_of_chain(ProChain::constant(a)).expect("constant chain of sets")
    }

    /// Every fibre `c`, fibre maps the identity.
    pub fn constant(c: &FinObj, space: &ProSpace) -> Self {
        let (c1, c2) = (c.clone(), c.clone());
        let (s1, s2) = (space.clone(), space.clone());
        let chain = ProChain::new(
            move |n| FamObj::constant(&c1, s1.size(n)),
            move |n| {
                let base = s2.chain().transition(n).table().unwrap();
                let dom = FamObj::constant(&c2, base.len());
                let cod = FamObj::constant(&c2, s2.size(n));
                let maps = vec![FinMor::identity(&c2); base.len()];
                FamMor::new(dom, cod, base, maps).unwrap()
            },
            ChainInfo { epic: space.is_surjective(), ..space.chain().info() },
        );
        Self::with_base_surjectivity(chain, space.is_surjective()).unwrap()
    }

    /// The terminal cosheaf: a terminal fibre everywhere.
    pub fn terminal(kind: Kind, space: &ProSpace) -> Self {
        Self::constant(&FinObj::terminal(kind), space)
    }

    /// The skyscraper at a point: `c` on the thread, the initial object
    /// elsewhere.
    pub fn skyscraper(x: &PointThread, c: &FinObj, space: &ProSpace) -> Result<Self> {
        let at = thread_reader(x, space)?;
        space.check_thread(x, THREAD_CHECK_LEVELS)?;
        let (c1, c2) = (c.clone(), c.clone());
        let (s1, s2) = (space.clone(), space.clone());
        let at2 = at.clone();
        let fibres = move |s: &ProSpace, n: usize, c: &FinObj, x: usize| -> FamObj {
            let z = FinObj::initial(c.kind());
            let fibres = (0..s.size(n)).map(|p| if p == x { c.clone() } else { z.clone() }).collect();
            FamObj::new(c.kind(), fibres).expect("fibres of one instance")
        };
        let chain = ProChain::new(
            move |n| fibres(&s1, n, &c1, at(n)),
            move |n| {
                let base = s2.chain().transition(n).table().unwrap();
                let (hi, lo) = (at2(n + 1), at2(n));
                let dom = fibres(&s2, n + 1, &c2, hi);
                let cod = fibres(&s2, n, &c2, lo);
                let maps = (0..base.len())
                    .map(|p| if p == hi { FinMor::identity(&c2) } else { FinMor::from_initial(cod.fibre(base[p])) })
                    .collect();
                FamMor::new(dom, cod, base, maps).unwrap()
            },
            ChainInfo { epic: false, ..space.chain().info() },
        );
        Self::with_base_surjectivity(chain, space.is_surjective())
    }

    pub fn chain(&self) -> &ProChain<FamMor> {
        &self.chain
    }

    pub fn base(&self) -> &ProSpace {
        &self.base
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn level(&self, n: usize) -> FamObj {
        self.chain.level(n)
    }

    pub fn transition(&self, n: usize) -> FamMor {
        self.chain.transition(n)
    }

    /// Checks well-formedness of levels `0..=n`.
    pub fn check(&self, n: usize) -> Result<()> {
        self.chain.check(n)?;
        for k in 0..=n {
            let a = self.level(k);
            if a.kind() != self.kind {
                return Err(Error::KindMismatch { expected: self.kind, found: a.kind() });
            }
            if k < n {
                self.transition(k).check()?;
            }
        }
        Ok(())
    }

    /// Layered DOT rendering of levels `0..=n`, each node labelled by its fibre.
    pub fn to_dot(&self, n: usize) -> String {
        use std::fmt::Write;
        let mut s = String::from("digraph cosheaf {\n  rankdir=BT;\n");
        for k in 0..=n {
            let a = self.level(k);
            for x in 0..a.len() {
                let f = a.fibre(x);
                let _ = writeln!(s, "  \"{k}:{x}\" [label=\"{k}:{x}\\n{f} |{}|\"];", f.order());
            }
        }
        for k in 0..n {
            let t = self.transition(k);
            for (x, y) in t.base().iter().enumerate() {
                let _ = writeln!(s, "  \"{}:{x}\" -> \"{k}:{y}\";", k + 1);
            }
        }
        s.push_str("}\n");
        s
    }

    /// The costalk at a point: the chain of fibres along the thread.
    pub fn costalk(&self, x: &PointThread) -> Result<ProChain<FinMor>> {
        let at = thread_reader(x, &self.base)?;
        self.base.check_thread(x, THREAD_CHECK_LEVELS)?;
        let (a1, a2) = (at.clone(), at);
        Ok(self
            .chain
            .map(move |n, a: &FamObj| a.fibre(a1(n)).clone(), move |n, t: &FamMor| t.fibre_map(a2(n + 1)).clone()))
    }

    /// Levelwise global cosections `A_n(X_n) = ⊔_x (A_n)_x`.
    pub fn global_cosections(&self) -> Result<ProChain<FinMor>> {
        if !self.kind.has_coproducts() {
            return Err(Error::NoCoproduct(self.kind));
        }
        Ok(self.chain.map(
            |_, a: &FamObj| fam::global_cosections(a).expect("coproduct-capable instance").obj,
            |_, t: &FamMor| fam::global_map(t).expect("coproduct-capable instance"),
        ))
    }

    /// Re-indexing along `n ↦ n + k`.
    pub fn shift(&self, k: usize) -> Self {
        Self::with_base_surjectivity(self.chain.shift(k), self.base.is_surjective()).unwrap()
    }

    /// The same cosheaf with memo stores cleared.
    pub fn unmemoized(&self) -> Self {
        Self::with_base_surjectivity(self.chain.unmemoized(), self.base.is_surjective()).unwrap()
    }

    /// The projection from `shift(j)` onto the finite cosheaf `A_j`.
    pub fn projection_to_level(&self, j: usize) -> CosheafMor {
        let dom = self.shift(j);
        let cod = Cosheaf::finite(self.level(j));
        let chain = self.chain.clone();
        let maps = ChainMor::new(dom.chain.clone(), cod.chain.clone(), move |n| {
            chain.transition_to(n + j, j).expect("ordered levels")
        });
        CosheafMor { dom, cod, maps }
    }

    /// Direct image along compatible level maps `g_n : X_n → Y_n`. The
    /// fibre over `y` is the coproduct of the fibres over `g_n^{-1}(y)`.
    pub fn direct_image(&self, g: &ChainMor<FinMor>, target: &ProSpace) -> Result<Cosheaf> {
        if !self.kind.has_coproducts() {
            return Err(Error::NoCoproduct(self.kind));
        }
        let (a1, a2) = (self.chain.clone(), self.chain.clone());
        let (g1, g2) = (g.clone(), g.clone());
        let (t1, t2) = (target.clone(), target.clone());
        let kind = self.kind;
        let pushed = move |a: &FamObj, gt: &[usize], ysize: usize| -> Vec<(Vec<usize>, fincat::Coproduct)> {
            (0..ysize)
                .map(|y| {
                    let pts: Vec<usize> = (0..gt.len()).filter(|&x| gt[x] == y).collect();
                    let fibres: Vec<FinObj> = pts.iter().map(|&x| a.fibre(x).clone()).collect();
                    (pts, fincat::coproduct_many(kind, &fibres).unwrap())
                })
                .collect()
        };
        let pushed2 = pushed;
        let chain = ProChain::new(
            move |n| {
                let gt = g1.at(n).table().unwrap();
                let fibres = pushed(&a1.level(n), &gt, t1.size(n)).into_iter().map(|(_, c)| c.obj).collect();
                FamObj::new(kind, fibres).unwrap()
            },
            move |n| {
                let (ghi, glo) = (g2.at(n + 1).table().unwrap(), g2.at(n).table().unwrap());
                let t = a2.transition(n);
                let hi = pushed2(t.dom(), &ghi, t2.size(n + 1));
                let lo = pushed2(t.cod(), &glo, t2.size(n));
                let ybase = t2.chain().transition(n).table().unwrap();
                let maps = hi
                    .iter()
                    .enumerate()
                    .map(|(y, (pts, c))| {
                        let (lpts, lc) = &lo[ybase[y]];
                        let comps: Vec<FinMor> = pts
                            .iter()
                            .map(|&x| {
                                let k = lpts.iter().position(|&p| p == t.base()[x]).expect("level maps commute");
                                fincat::compose(&lc.injections[k], t.fibre_map(x)).unwrap()
                            })
                            .collect();
                        let m = fincat::copair(kind, &comps, &lc.obj).unwrap();
                        debug_assert_eq!(m.dom(), &c.obj);
                        m
                    })
                    .collect();
                let dom = FamObj::new(kind, hi.into_iter().map(|(_, c)| c.obj).collect()).unwrap();
                let cod = FamObj::new(kind, lo.into_iter().map(|(_, c)| c.obj).collect()).unwrap();
                FamMor::new(dom, cod, ybase, maps).unwrap()
            },
            ChainInfo { epic: self.chain.info().epic && target.is_surjective(), ..self.chain.info() },
        );
        Cosheaf::with_base_surjectivity(chain, target.is_surjective())
    }

    /// Levelwise product over the product of the bases.
    pub fn product(&self, other: &Cosheaf) -> Result<Cosheaf> {
        if self.kind != other.kind {
            return Err(Error::KindMismatch { expected: self.kind, found: other.kind });
        }
        let (a1, b1, a2, b2) = (self.chain.clone(), other.chain.clone(), self.chain.clone(), other.chain.clone());
        let info = ChainInfo {
            stabilization_bound: None,
            constant_from: match (a1.info().constant_from, b1.info().constant_from) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            },
            epic: false,
        };
        let chain = ProChain::new(
            move |n| fam::product(&a1.level(n), &b1.level(n)).unwrap().0,
            move |n| {
                let (_, p1, p2) = fam::product(&a2.level(n + 1), &b2.level(n + 1)).unwrap();
                fam::pair(
                    &fam::compose(&a2.transition(n), &p1).unwrap(),
                    &fam::compose(&b2.transition(n), &p2).unwrap(),
                )
                .unwrap()
            },
            info,
        );
        Cosheaf::with_base_surjectivity(chain, self.base.is_surjective() && other.base.is_surjective())
    }
}

type ThreadReader = std::sync::Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// Level reader for a thread. A recorded prefix suffices on a base that is
/// constant from its last recorded level.
fn thread_reader(x: &PointThread, space: &ProSpace) -> Result<ThreadReader> {
    if x.is_total() {
        let x = x.clone();
        return Ok(std::sync::Arc::new(move |n| x.at(n).unwrap()));
    }
    match space.chain().info().constant_from {
        Some(c) if c <= x.known() => {
            let k = x.known();
            let x = x.clone();
            Ok(std::sync::Arc::new(move |n| x.at(n.min(k)).unwrap()))
        }
        _ => Err(Error::ThreadTooShort { needed: usize::MAX, known: x.known() }),
    }
}

/// A strict map of cosheaves: family maps at every level commuting with
/// the transitions.
#[derive(Clone, Debug)]
pub struct CosheafMor {
    pub dom: Cosheaf,
    pub cod: Cosheaf,
    pub maps: ChainMor<FamMor>,
}

impl CosheafMor {
    pub fn new(dom: Cosheaf, cod: Cosheaf, maps: impl Fn(usize) -> FamMor + Send + Sync + 'static) -> Self {
        let maps = ChainMor::new(dom.chain.clone(), cod.chain.clone(), maps);
        Self { dom, cod, maps }
    }

    pub fn identity(a: &Cosheaf) -> Self {
        Self { dom: a.clone(), cod: a.clone(), maps: ChainMor::identity(&a.chain) }
    }

    pub fn at(&self, n: usize) -> FamMor {
        self.maps.at(n)
    }

    /// First level below `n` where a square fails to commute.
    pub fn check(&self, n: usize) -> Result<Option<usize>> {
        for k in 0..=n {
            self.at(k).check()?;
        }
        self.maps.check(n)
    }

    /// Levelwise equalizer of a parallel pair.
    pub fn equalizer(f: &CosheafMor, g: &CosheafMor) -> Result<(Cosheaf, CosheafMor)> {
        if f.dom.chain.id() != g.dom.chain.id() || f.cod.chain.id() != g.cod.chain.id() {
            return Err(Error::Precondition("equalizer needs a common chain presentation".into()));
        }
        let (f1, g1, f2, g2) = (f.clone(), g.clone(), f.clone(), g.clone());
        let dom = f.dom.chain.clone();
        let chain = ProChain::new(
            move |n| fam::equalizer(&f1.at(n), &g1.at(n)).unwrap().dom().clone(),
            move |n| {
                let hi = fam::equalizer(&f2.at(n + 1), &g2.at(n + 1)).unwrap();
                let lo = fam::equalizer(&f2.at(n), &g2.at(n)).unwrap();
                let down = fam::compose(&dom.transition(n), &hi).unwrap();
                fam::factor_through_mono(&down, &lo).expect("equalizers are natural")
            },
            ChainInfo { stabilization_bound: None, constant_from: f.dom.chain.info().constant_from, epic: false },
        );
        let eq = Cosheaf::with_base_surjectivity(chain, false)?;
        let (f3, g3) = (f.clone(), g.clone());
        let inc = CosheafMor::new(eq.clone(), f.dom.clone(), move |n| fam::equalizer(&f3.at(n), &g3.at(n)).unwrap());
        Ok((eq, inc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_cosheaf_over_cantor() {
        let x = ProSpace::cantor();
        let a = Cosheaf::constant(&FinObj::cyclic(2), &x);
        a.check(4).unwrap();
        let g = a.global_cosections().unwrap();
        let orders: Vec<u128> = (0..4).map(|n| g.level(n).order()).collect();
        assert_eq!(orders, vec![2, 4, 16, 256]);
        let s = a.costalk(&PointThread::cantor(|k| k % 2 == 0)).unwrap();
        for n in 0..5 {
            assert_eq!(s.level(n), FinObj::cyclic(2));
            assert_eq!(s.transition(n), FinMor::identity(&FinObj::cyclic(2)));
        }
    }

    #[test]
    fn skyscraper_fibres() {
        let x = ProSpace::cantor();
        let p = PointThread::cantor(|_| false);
        let q = PointThread::cantor(|k| k >= 2);
        let s = Cosheaf::skyscraper(&p, &FinObj::set(3), &x).unwrap();
        s.check(4).unwrap();
        let at_p = s.costalk(&p).unwrap();
        let at_q = s.costalk(&q).unwrap();
        for n in 0..5 {
            assert_eq!(at_p.level(n).order(), 3);
            assert_eq!(at_q.level(n).order(), if n <= 2 { 3 } else { 0 });
        }
    }

    #[test]
    fn product_with_terminal_keeps_fibres() {
        let x = ProSpace::finite(2);
        let a = Cosheaf::finite(FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap());
        let t = Cosheaf::terminal(Kind::Set, &ProSpace::finite(1));
        let p = a.product(&t).unwrap();
        assert!(fam::find_iso(&p.level(2), &a.level(2)).unwrap().is_some());
        let _ = x;
    }

    #[test]
    fn projection_to_a_level_commutes() {
        let a = Cosheaf::constant(&FinObj::set(2), &ProSpace::cantor());
        let p = a.projection_to_level(2);
        assert_eq!(p.check(3).unwrap(), None);
        assert!(p.at(1).is_epi());
    }

    #[test]
    fn direct_image_to_a_point() {
        let x = ProSpace::cantor();
        let a = Cosheaf::constant(&FinObj::set(2), &x);
        let pt = ProSpace::finite(1);
        let xc = x.chain().clone();
        let g = ChainMor::new(x.chain().clone(), pt.chain().clone(), move |n| FinMor::to_terminal(&xc.level(n)));
        let d = a.direct_image(&g, &pt).unwrap();
        d.check(3).unwrap();
        for n in 0..4 {
            assert_eq!(d.level(n).len(), 1);
            assert_eq!(d.level(n).fibre(0).order(), 2 << n);
        }
    }

    #[test]
    fn plain_groups_have_no_global_cosections_object() {
        let a = Cosheaf::constant(&FinObj::cyclic_group(2), &ProSpace::cantor());
        assert!(matches!(a.global_cosections(), Err(Error::NoCoproduct(Kind::Group))));
    }
}
