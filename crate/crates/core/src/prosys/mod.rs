//! Inverse systems over the natural-number chain, generated lazily from
//! level and transition oracles and memoized on first use.

mod arrow;
mod normalize;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

pub use arrow::Arrow;
pub use normalize::{hom_to_finite, normalize, HomClasses, HomPolicy, Normalized};

/// Soundness of a truncated computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// Certified by declared bounds.
    Exact,
    /// Correct for the truncated diagram; later levels may change it.
    Truncated,
    /// A declared bound was missing or too large for the lookahead used.
    Heuristic,
}

impl Flag {
    /// The weaker of two flags.
    pub fn meet(self, other: Flag) -> Flag {
        self.max(other)
    }
}

type Oracle<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;

/// A pure function of the level with an optional memo store.
pub struct Lazy<T> {
    f: Oracle<T>,
    memo: Option<Arc<RwLock<HashMap<usize, T>>>>,
}

impl<T: Clone> Lazy<T> {
    pub fn new(f: impl Fn(usize) -> T + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), memo: Some(Arc::default()) }
    }

    pub fn get(&self, n: usize) -> T {
        let Some(memo) = &self.memo else {
            return (self.f)(n);
        };
        if let Some(v) = memo.read().unwrap().get(&n) {
            return v.clone();
        }
        // evaluated outside the lock so oracles may consult other memoized
        // values; a concurrent duplicate evaluation yields an equal value
        let v = (self.f)(n);
        memo.write().unwrap().entry(n).or_insert(v).clone()
    }

    /// Same oracle with a fresh, empty memo store, or none.
    pub fn fresh(&self, memoized: bool) -> Self {
        Self { f: self.f.clone(), memo: memoized.then(Arc::default) }
    }

    pub fn cached(&self) -> usize {
        self.memo.as_ref().map_or(0, |m| m.read().unwrap().len())
    }
}

impl<T> Clone for Lazy<T> {
    fn clone(&self) -> Self {
        Self { f: self.f.clone(), memo: self.memo.clone() }
    }
}

/// Declared facts about a chain that finite data cannot establish.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainInfo {
    /// `b` such that `Img(trans(m → j))` is the same for all `m ≥ j + b`.
    pub stabilization_bound: Option<usize>,
    /// Level from which all transitions are identities.
    pub constant_from: Option<usize>,
    /// All transitions are epimorphisms.
    pub epic: bool,
}

impl ChainInfo {
    /// Known image-stabilization bound; an eventually constant chain
    /// stabilizes by the level where it becomes constant.
    pub fn bound(&self) -> Option<usize> {
        match (self.stabilization_bound, self.constant_from) {
            (Some(b), Some(c)) => Some(b.min(c)),
            (b, c) => b.or(c),
        }
    }

    pub fn finite() -> Self {
        Self { stabilization_bound: Some(0), constant_from: Some(0), epic: true }
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// An inverse system `S_0 ← S_1 ← S_2 ← …`; `transition(n)` runs from
/// level `n + 1` to level `n`.
pub struct ProChain<A: Arrow> {
    id: u64,
    levels: Lazy<A::Obj>,
    transitions: Lazy<A>,
    info: ChainInfo,
}

impl<A: Arrow> Clone for ProChain<A> {
    fn clone(&self) -> Self {
        Self { id: self.id, levels: self.levels.clone(), transitions: self.transitions.clone(), info: self.info }
    }
}

impl<A: Arrow> fmt::Debug for ProChain<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProChain").field("id", &self.id).field("info", &self.info).finish_non_exhaustive()
    }
}

impl<A: Arrow> ProChain<A> {
    pub fn new(
        levels: impl Fn(usize) -> A::Obj + Send + Sync + 'static,
        transitions: impl Fn(usize) -> A + Send + Sync + 'static,
        info: ChainInfo,
    ) -> Self {
        Self { id: fresh_id(), levels: Lazy::new(levels), transitions: Lazy::new(transitions), info }
    }

    /// The constant system at one object.
    pub fn constant(obj: A::Obj) -> Self {
        let o = obj.clone();
        Self::new(move |_| obj.clone(), move |_| A::identity(&o), ChainInfo::finite())
    }

    /// Finitely many levels followed by a constant tail at the last one.
    /// `transitions[n]` runs from `levels[n + 1]` to `levels[n]`.
    pub fn from_levels(levels: Vec<A::Obj>, transitions: Vec<A>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyFamily("ProChain::from_levels"));
        }
        if transitions.len() + 1 != levels.len() {
            return Err(mismatch(format!("{} levels need {} transitions", levels.len(), levels.len() - 1)));
        }
        for (n, t) in transitions.iter().enumerate() {
            if t.source() != &levels[n + 1] || t.target() != &levels[n] {
                return Err(mismatch(format!("transition {n} does not run from level {} to level {n}", n + 1)));
            }
        }
        let last = levels.len() - 1;
        let epic = transitions.iter().map(A::try_is_epi).collect::<Result<Vec<_>>>()?.into_iter().all(|e| e);
        let info = ChainInfo { stabilization_bound: None, constant_from: Some(last), epic };
        let ls = levels.clone();
        let tail = A::identity(&levels[last]);
        Ok(Self::new(
            move |n| ls[n.min(last)].clone(),
            move |n| {
                if n < last {
                    transitions[n].clone()
                } else {
                    tail.clone()
                }
            },
            info,
        ))
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn info(&self) -> ChainInfo {
        self.info
    }

    /// Replaces the declared facts. The caller vouches for them.
    pub fn with_info(mut self, info: ChainInfo) -> Self {
        self.info = info;
        self
    }

    pub fn level(&self, n: usize) -> A::Obj {
        self.levels.get(n)
    }

    pub fn transition(&self, n: usize) -> A {
        self.transitions.get(n)
    }

    /// Composite transition from level `m` down to level `n`.
    pub fn transition_to(&self, m: usize, n: usize) -> Result<A> {
        if m < n {
            return Err(Error::LevelOrder { from: m, to: n });
        }
        let mut acc = A::identity(&self.level(m));
        for k in (n..m).rev() {
            acc = A::compose(&self.transition(k), &acc)?;
        }
        Ok(acc)
    }

    /// Levels `0..=n` with their transitions.
    pub fn truncate(&self, n: usize) -> TruncatedDiagram<A> {
        TruncatedDiagram {
            levels: (0..=n).map(|k| self.level(k)).collect(),
            transitions: (0..n).map(|k| self.transition(k)).collect(),
        }
    }

    /// Levelwise image under a functor given on objects and on
    /// transitions.
    pub fn map<B: Arrow>(
        &self,
        on_level: impl Fn(usize, &A::Obj) -> B::Obj + Send + Sync + 'static,
        on_transition: impl Fn(usize, &A) -> B + Send + Sync + 'static,
    ) -> ProChain<B> {
        let (s, t) = (self.clone(), self.clone());
        ProChain {
            id: fresh_id(),
            levels: Lazy::new(move |n| on_level(n, &s.level(n))),
            transitions: Lazy::new(move |n| on_transition(n, &t.transition(n))),
            info: self.info,
        }
    }

    /// The cofinal re-indexing `n ↦ n + k`.
    pub fn shift(&self, k: usize) -> Self {
        let (s, t) = (self.clone(), self.clone());
        let info = ChainInfo { constant_from: self.info.constant_from.map(|c| c.saturating_sub(k)), ..self.info };
        Self::new(move |n| s.level(n + k), move |n| t.transition(n + k), info)
    }

    /// The same chain evaluated without memo stores.
    pub fn unmemoized(&self) -> Self {
        Self {
            id: self.id,
            levels: self.levels.fresh(false),
            transitions: self.transitions.fresh(false),
            info: self.info,
        }
    }

    /// Checks that every transition in `0..n` runs between the right
    /// levels.
    pub fn check(&self, n: usize) -> Result<()> {
        for k in 0..n {
            let t = self.transition(k);
            if t.source() != &self.level(k + 1) || t.target() != &self.level(k) {
                return Err(mismatch(format!("transition {k} does not run from level {} to level {k}", k + 1)));
            }
        }
        Ok(())
    }

    /// Whether the two chains agree on levels and transitions up to `n`.
    pub fn agrees_with(&self, other: &ProChain<A>, n: usize) -> bool
    where
        A: PartialEq,
    {
        (0..=n).all(|k| self.level(k) == other.level(k)) && (0..n).all(|k| self.transition(k) == other.transition(k))
    }
}

/// A materialized finite piece of a chain.
#[derive(Clone, Debug)]
pub struct TruncatedDiagram<A: Arrow> {
    pub levels: Vec<A::Obj>,
    pub transitions: Vec<A>,
}

/// A strict map of chains: level maps commuting with the transitions.
pub struct ChainMor<A: Arrow> {
    pub dom: ProChain<A>,
    pub cod: ProChain<A>,
    maps: Lazy<A>,
}

impl<A: Arrow> Clone for ChainMor<A> {
    fn clone(&self) -> Self {
        Self { dom: self.dom.clone(), cod: self.cod.clone(), maps: self.maps.clone() }
    }
}

impl<A: Arrow> fmt::Debug for ChainMor<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainMor").field("dom", &self.dom).field("cod", &self.cod).finish_non_exhaustive()
    }
}

impl<A: Arrow> ChainMor<A> {
    pub fn new(dom: ProChain<A>, cod: ProChain<A>, maps: impl Fn(usize) -> A + Send + Sync + 'static) -> Self {
        Self { dom, cod, maps: Lazy::new(maps) }
    }

    pub fn identity(c: &ProChain<A>) -> Self {
        let s = c.clone();
        Self::new(c.clone(), c.clone(), move |n| A::identity(&s.level(n)))
    }

    pub fn at(&self, n: usize) -> A {
        self.maps.get(n)
    }

    /// The first level below `n` at which a level map has the wrong ends
    /// or a naturality square fails.
    pub fn check(&self, n: usize) -> Result<Option<usize>> {
        for k in 0..=n {
            let m = self.at(k);
            if m.source() != &self.dom.level(k) || m.target() != &self.cod.level(k) {
                return Ok(Some(k));
            }
        }
        for k in 0..n {
            let lhs = A::compose(&self.cod.transition(k), &self.at(k + 1))?;
            let rhs = A::compose(&self.at(k), &self.dom.transition(k))?;
            if lhs != rhs {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn compose(g: &ChainMor<A>, f: &ChainMor<A>) -> ChainMor<A> {
        let (g2, f2) = (g.clone(), f.clone());
        ChainMor::new(f.dom.clone(), g.cod.clone(), move |n| {
            A::compose(&g2.at(n), &f2.at(n)).expect("composable chain maps")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{FinMor, FinObj};

    fn zp_tower(p: usize) -> ProChain<FinMor> {
        ProChain::new(
            move |n| FinObj::cyclic(p.pow(n as u32)),
            move |n| {
                let (m, k) = (p.pow(n as u32 + 1), p.pow(n as u32));
                FinMor::new(FinObj::cyclic(m), FinObj::cyclic(k), (0..m).map(|x| x % k).collect()).unwrap()
            },
            ChainInfo { stabilization_bound: Some(0), constant_from: None, epic: true },
        )
    }

    #[test]
    fn composite_transitions() {
        let s = zp_tower(2);
        let t = s.transition_to(3, 1).unwrap();
        assert_eq!(t.table().unwrap(), vec![0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(s.transition_to(2, 2).unwrap(), FinMor::identity(&s.level(2)));
        assert!(matches!(s.transition_to(1, 2), Err(Error::LevelOrder { .. })));
        s.check(4).unwrap();
    }

    #[test]
    fn tail_constant_chains() {
        let a = FinObj::set(3);
        let b = FinObj::set(2);
        let t = FinMor::new(a.clone(), b.clone(), vec![0, 1, 1]).unwrap();
        let s = ProChain::from_levels(vec![b, a.clone()], vec![t]).unwrap();
        assert_eq!(s.level(7), a);
        assert_eq!(s.transition(5), FinMor::identity(&a));
        assert_eq!(s.info().constant_from, Some(1));
        assert!(s.info().epic);
        assert_eq!(s.truncate(3).levels.len(), 4);
    }

    #[test]
    fn memoization_is_transparent() {
        let s = zp_tower(3);
        let u = s.unmemoized();
        assert!(s.agrees_with(&u, 4));
        assert!(s.levels.cached() > 0);
        assert_eq!(u.levels.cached(), 0);
    }

    #[test]
    fn shifting_drops_levels() {
        let s = zp_tower(2).shift(2);
        assert_eq!(s.level(0).order(), 4);
        assert_eq!(s.transition(0).cod().order(), 4);
    }
}
