use itertools::Itertools;

use super::Cosheaf;
use crate::error::{Error, Result};
use crate::fincat::{self, FinMor, FinObj, MAX_HOM};
use crate::prospace::ClopenSet;
use crate::prosys::{ChainInfo, Flag, ProChain};

/// `A_m(f_m(U))` as a coproduct of fibres at level `m`.
#[derive(Clone, Debug)]
pub struct CosectionLevel {
    pub level: usize,
    /// `f_m(U)`, ascending.
    pub points: Vec<usize>,
    pub sum: fincat::Coproduct,
}

impl CosectionLevel {
    pub fn obj(&self) -> &FinObj {
        &self.sum.obj
    }

    fn injection_at(&self, x: usize) -> Result<&FinMor> {
        let k = self
            .points
            .binary_search(&x)
            .map_err(|_| Error::Precondition(format!("point {x} is not in the cosection support")))?;
        Ok(&self.sum.injections[k])
    }
}

impl Cosheaf {
    /// Cosections of `U` at level `m`. Below the clopen's level this needs
    /// surjective base transitions.
    pub fn cosection_at(&self, u: &ClopenSet, m: usize) -> Result<CosectionLevel> {
        if !self.kind.has_coproducts() {
            return Err(Error::NoCoproduct(self.kind));
        }
        let points: Vec<usize> = self.base.at_level(u, m)?.into_iter().collect();
        let a = self.level(m);
        let fibres: Vec<FinObj> = points.iter().map(|&x| a.fibre(x).clone()).collect();
        let sum = fincat::coproduct_many(self.kind, &fibres)?;
        Ok(CosectionLevel { level: m, points, sum })
    }

    /// The map `A_m(f_m(V)) → A_m(f_m(U))` for `V ⊆ U`.
    pub fn cosection_inclusion(&self, v: &ClopenSet, u: &ClopenSet, m: usize) -> Result<FinMor> {
        if !self.base.is_subset(v, u)? {
            return Err(Error::Precondition("cosection inclusion needs V ⊆ U".into()));
        }
        let (cv, cu) = (self.cosection_at(v, m)?, self.cosection_at(u, m)?);
        let comps = cv.points.iter().map(|&x| cu.injection_at(x).cloned()).collect::<Result<Vec<_>>>()?;
        fincat::copair(self.kind, &comps, cu.obj())
    }

    /// The restricted transition `A_{m+1}(f_{m+1}(U)) → A_m(f_m(U))`.
    pub fn cosection_transition(&self, u: &ClopenSet, m: usize) -> Result<FinMor> {
        let (hi, lo) = (self.cosection_at(u, m + 1)?, self.cosection_at(u, m)?);
        let t = self.transition(m);
        let comps = hi
            .points
            .iter()
            .map(|&x| fincat::compose(lo.injection_at(t.base()[x])?, t.fibre_map(x)))
            .collect::<Result<Vec<_>>>()?;
        fincat::copair(self.kind, &comps, lo.obj())
    }

    /// The chain of cosections of `U`, re-indexed so that level `k` is
    /// absolute level `level(U) + k`.
    pub fn cosections(&self, u: &ClopenSet) -> Result<ProChain<FinMor>> {
        let start = u.level;
        self.cosection_at(u, start)?;
        let (a1, a2, u1, u2) = (self.clone(), self.clone(), u.clone(), u.clone());
        let info = self.chain.info();
        Ok(ProChain::new(
            move |k| a1.cosection_at(&u1, start + k).expect("clopen checked at its level").sum.obj,
            move |k| a2.cosection_transition(&u2, start + k).expect("restricted transitions exist"),
            ChainInfo { constant_from: info.constant_from.map(|c| c.saturating_sub(start)), ..info },
        ))
    }

    /// Maps out of the cosections of `U` into `d`: tuples of fibre maps at
    /// absolute level `level(U) + truncation`. With a positive window,
    /// tuples agreeing after the restricted transition from
    /// `window` levels further up are identified.
    pub fn hom_out_of_cosections(
        &self,
        u: &ClopenSet,
        d: &FinObj,
        truncation: usize,
        window: usize,
    ) -> Result<TupleClasses> {
        self.kind.expect(d.kind())?;
        let m = u.level + truncation;
        let points: Vec<usize> = self.base.at_level(u, m)?.into_iter().collect();
        let a = self.level(m);
        let per_point = points.iter().map(|&x| fincat::hom_set(a.fibre(x), d)).collect::<Result<Vec<_>>>()?;
        let flag = match self.chain.info().constant_from {
            Some(c) if c <= m => Flag::Exact,
            _ => Flag::Truncated,
        };
        let mut classes = TupleClasses { level: m, points, per_point, representatives: None, flag };
        if window > 0 {
            classes.identify(self, u, window)?;
        }
        Ok(classes)
    }
}

/// Classes of maps out of a formal coproduct of fibres.
#[derive(Clone, Debug)]
pub struct TupleClasses {
    pub level: usize,
    pub points: Vec<usize>,
    /// `Hom((A_m)_x, d)` for each support point.
    pub per_point: Vec<Vec<FinMor>>,
    representatives: Option<Vec<Vec<usize>>>,
    pub flag: Flag,
}

impl TupleClasses {
    /// Number of classes.
    pub fn count(&self) -> u128 {
        match &self.representatives {
            Some(r) => r.len() as u128,
            None => self.per_point.iter().fold(1u128, |acc, h| acc.saturating_mul(h.len() as u128)),
        }
    }

    /// The `k`-th class as a tuple of fibre maps.
    pub fn tuple(&self, k: u128) -> Result<Vec<FinMor>> {
        if k >= self.count() {
            return Err(Error::OutOfRange { label: k as usize, size: self.count().min(usize::MAX as u128) as usize });
        }
        let idx = match &self.representatives {
            Some(r) => r[k as usize].clone(),
            None => {
                let mut rest = k;
                let mut idx = vec![0; self.per_point.len()];
                for (i, h) in self.per_point.iter().enumerate().rev() {
                    idx[i] = (rest % h.len() as u128) as usize;
                    rest /= h.len() as u128;
                }
                idx
            }
        };
        Ok(idx.iter().zip(&self.per_point).map(|(&i, h)| h[i].clone()).collect())
    }

    fn identify(&mut self, a: &Cosheaf, u: &ClopenSet, window: usize) -> Result<()> {
        if self.count() > MAX_HOM as u128 {
            return Err(Error::TooLarge(format!("{} tuples of fibre maps", self.count())));
        }
        let top = self.level + window;
        let t = a.chain.transition_to(top, self.level)?;
        let hi: Vec<usize> = a.base.at_level(u, top)?.into_iter().collect();
        let pos: Vec<usize> =
            hi.iter().map(|&x| self.points.binary_search(&t.base()[x]).expect("support maps down")).collect();
        let mut keys: Vec<Vec<FinMor>> = Vec::new();
        let mut reps = Vec::new();
        for idx in self.per_point.iter().map(|h| 0..h.len()).multi_cartesian_product() {
            let key = hi
                .iter()
                .zip(&pos)
                .map(|(&x, &p)| fincat::compose(&self.per_point[p][idx[p]], t.fibre_map(x)))
                .collect::<Result<Vec<_>>>()?;
            if !keys.contains(&key) {
                keys.push(key);
                reps.push(idx);
            }
        }
        if self.per_point.is_empty() {
            reps = vec![Vec::new()];
        }
        self.representatives = Some(reps);
        Ok(())
    }
}
