//! Profinite spaces presented as chains of finite sets, with their clopen
//! algebra and points.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{mismatch, Error, Result};
use crate::fincat::{self, FinMor, FinObj, Kind};
use crate::prosys::{ChainInfo, ProChain};

/// `X = lim X_n` for a chain of finite sets.
#[derive(Clone, Debug)]
pub struct ProSpace {
    chain: ProChain<FinMor>,
    surjective: bool,
}

impl ProSpace {
    /// Wraps a chain of finite sets. The surjectivity flag is taken from
    /// the chain's declared facts.
    pub fn from_chain(chain: ProChain<FinMor>) -> Result<Self> {
        Kind::Set.expect(chain.level(0).kind())?;
        let surjective = chain.info().epic;
        Ok(Self { chain, surjective })
    }

    /// The Cantor space: level `n` is `{0,1}^n` as integers below `2^n`,
    /// and the transition drops the last bit.
    pub fn cantor() -> Self {
        let chain = ProChain::new(
            |n| FinObj::set(1 << n),
            |n| {
                let m = 1usize << (n + 1);
                FinMor::new(FinObj::set(m), FinObj::set(m / 2), (0..m).map(|x| x >> 1).collect()).unwrap()
            },
            ChainInfo { stabilization_bound: Some(0), constant_from: None, epic: true },
        );
        Self { chain, surjective: true }
    }

    /// The one-point compactification of a countable discrete set: level
    /// `n` has the points `0..n` and the cell `n` of everything else, which
    /// contains the point at infinity.
    pub fn one_point() -> Self {
        let chain = ProChain::new(
            |n| FinObj::set(n + 1),
            |n| FinMor::new(FinObj::set(n + 2), FinObj::set(n + 1), (0..n + 2).map(|i| i.min(n)).collect()).unwrap(),
            ChainInfo { stabilization_bound: Some(0), constant_from: None, epic: true },
        );
        Self { chain, surjective: true }
    }

    /// A finite discrete space.
    pub fn finite(n: usize) -> Self {
        Self { chain: ProChain::constant(FinObj::set(n)), surjective: true }
    }

    /// Levelwise product, row-major at each level.
    pub fn product(&self, other: &ProSpace) -> Self {
        let (a, b) = (self.chain.clone(), other.chain.clone());
        let (a2, b2) = (a.clone(), b.clone());
        let info = ChainInfo {
            stabilization_bound: match (a.info().bound(), b.info().bound()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            },
            constant_from: match (a.info().constant_from, b.info().constant_from) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            },
            epic: a.info().epic && b.info().epic,
        };
        let chain = ProChain::new(
            move |n| FinObj::set(a.level(n).size().unwrap() * b.level(n).size().unwrap()),
            move |n| {
                let p = fincat::product(&a2.level(n + 1), &b2.level(n + 1)).unwrap();
                fincat::pair(
                    &fincat::compose(&a2.transition(n), &p.p1).unwrap(),
                    &fincat::compose(&b2.transition(n), &p.p2).unwrap(),
                )
                .unwrap()
            },
            info,
        );
        Self { chain, surjective: self.surjective && other.surjective }
    }

    pub fn chain(&self) -> &ProChain<FinMor> {
        &self.chain
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn size(&self, n: usize) -> usize {
        self.chain.level(n).size().unwrap()
    }

    /// `trans(m → n)` as a label table.
    pub fn projection(&self, m: usize, n: usize) -> Result<Vec<usize>> {
        self.chain.transition_to(m, n)?.table()
    }

    pub fn clopen(&self, level: usize, subset: impl IntoIterator<Item = usize>) -> Result<ClopenSet> {
        let subset: BTreeSet<usize> = subset.into_iter().collect();
        let n = self.size(level);
        if let Some(&x) = subset.iter().find(|&&x| x >= n) {
            return Err(Error::OutOfRange { label: x, size: n });
        }
        Ok(ClopenSet { level, subset })
    }

    pub fn whole(&self) -> ClopenSet {
        ClopenSet { level: 0, subset: (0..self.size(0)).collect() }
    }

    pub fn empty(&self) -> ClopenSet {
        ClopenSet { level: 0, subset: BTreeSet::new() }
    }

    /// The single level-`n` cell over `x`.
    pub fn cell(&self, n: usize, x: usize) -> Result<ClopenSet> {
        self.clopen(n, [x])
    }

    fn check(&self, u: &ClopenSet) -> Result<()> {
        let n = self.size(u.level);
        match u.subset.iter().find(|&&x| x >= n) {
            Some(&x) => Err(Error::OutOfRange { label: x, size: n }),
            None => Ok(()),
        }
    }

    /// The same clopen represented at level `m ≥ level(U)`.
    pub fn lift(&self, u: &ClopenSet, m: usize) -> Result<ClopenSet> {
        self.check(u)?;
        let t = self.projection(m, u.level)?;
        Ok(ClopenSet { level: m, subset: (0..t.len()).filter(|x| u.subset.contains(&t[*x])).collect() })
    }

    /// `f_m(U)` for `m ≤ level(U)`, the forward image along the composite
    /// transition. Needs surjective transitions to be the image of the
    /// denoted set.
    pub fn image(&self, u: &ClopenSet, m: usize) -> Result<BTreeSet<usize>> {
        if !self.surjective {
            return Err(Error::Precondition("forward images of clopens need surjective transitions".into()));
        }
        self.check(u)?;
        let t = self.projection(u.level, m)?;
        Ok(u.subset.iter().map(|&x| t[x]).collect())
    }

    /// `f_m(U)` at any level: the image below the clopen's level, the lift
    /// above it.
    pub fn at_level(&self, u: &ClopenSet, m: usize) -> Result<BTreeSet<usize>> {
        if m <= u.level {
            self.image(u, m)
        } else {
            Ok(self.lift(u, m)?.subset)
        }
    }

    fn common(&self, u: &ClopenSet, v: &ClopenSet) -> Result<(ClopenSet, ClopenSet)> {
        let m = u.level.max(v.level);
        Ok((self.lift(u, m)?, self.lift(v, m)?))
    }

    pub fn meet(&self, u: &ClopenSet, v: &ClopenSet) -> Result<ClopenSet> {
        let (a, b) = self.common(u, v)?;
        Ok(ClopenSet { level: a.level, subset: a.subset.intersection(&b.subset).copied().collect() })
    }

    pub fn join(&self, u: &ClopenSet, v: &ClopenSet) -> Result<ClopenSet> {
        let (a, b) = self.common(u, v)?;
        Ok(ClopenSet { level: a.level, subset: a.subset.union(&b.subset).copied().collect() })
    }

    pub fn complement(&self, u: &ClopenSet) -> Result<ClopenSet> {
        self.check(u)?;
        Ok(ClopenSet { level: u.level, subset: (0..self.size(u.level)).filter(|x| !u.subset.contains(x)).collect() })
    }

    pub fn is_disjoint(&self, u: &ClopenSet, v: &ClopenSet) -> Result<bool> {
        Ok(self.meet(u, v)?.subset.is_empty())
    }

    /// Equality of denoted sets.
    pub fn same(&self, u: &ClopenSet, v: &ClopenSet) -> Result<bool> {
        let (a, b) = self.common(u, v)?;
        Ok(a.subset == b.subset)
    }

    pub fn is_subset(&self, u: &ClopenSet, v: &ClopenSet) -> Result<bool> {
        let (a, b) = self.common(u, v)?;
        Ok(a.subset.is_subset(&b.subset))
    }

    /// All partitions of `U` into nonempty clopens representable at its
    /// own level, as blocks of level cells.
    pub fn partitions(&self, u: &ClopenSet) -> Result<Vec<Vec<ClopenSet>>> {
        self.check(u)?;
        let elems: Vec<usize> = u.subset.iter().copied().collect();
        Ok(set_partitions(elems.len())
            .into_iter()
            .map(|rgs| {
                let blocks = rgs.iter().copied().max().map_or(0, |b| b + 1);
                (0..blocks)
                    .map(|b| ClopenSet {
                        level: u.level,
                        subset: elems.iter().zip(&rgs).filter(|(_, &r)| r == b).map(|(&e, _)| e).collect(),
                    })
                    .collect()
            })
            .collect())
    }

    /// The thread through `x` at level `n`, recorded down to level 0.
    pub fn thread_through(&self, n: usize, x: usize) -> Result<PointThread> {
        if x >= self.size(n) {
            return Err(Error::OutOfRange { label: x, size: self.size(n) });
        }
        let mut prefix = vec![x];
        for k in (0..n).rev() {
            let t = self.chain.transition(k).table()?;
            prefix.push(t[*prefix.last().unwrap()]);
        }
        prefix.reverse();
        Ok(PointThread { prefix, extender: None })
    }

    /// Validates a thread against the transitions on its recorded prefix
    /// and, for generator threads, up to `n`.
    pub fn check_thread(&self, x: &PointThread, n: usize) -> Result<()> {
        let top = if x.is_total() { x.known().max(n) } else { x.known() };
        for k in 0..top {
            let (hi, lo) = (x.at(k + 1)?, x.at(k)?);
            if hi >= self.size(k + 1) || self.chain.transition(k).apply(hi) != lo {
                return Err(mismatch(format!("thread is not compatible between levels {} and {k}", k + 1)));
            }
        }
        Ok(())
    }

    /// Membership of a point in a clopen.
    pub fn contains(&self, u: &ClopenSet, x: &PointThread) -> Result<bool> {
        Ok(u.subset.contains(&x.at(u.level)?))
    }

    /// Layered DOT rendering of levels `0..=n`.
    pub fn to_dot(&self, n: usize) -> String {
        let mut s = String::from("digraph space {\n  rankdir=BT;\n");
        for k in 0..=n {
            let _ = write!(s, "  subgraph level{k} {{ rank=same;");
            for x in 0..self.size(k) {
                let _ = write!(s, " \"{k}:{x}\";");
            }
            s.push_str(" }\n");
        }
        for k in 0..n {
            let t = self.chain.transition(k);
            for x in 0..self.size(k + 1) {
                let _ = writeln!(s, "  \"{}:{x}\" -> \"{k}:{}\";", k + 1, t.apply(x));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Restricted growth strings of length `n`: each encodes one set
/// partition of `{0, …, n-1}`.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            prefix.push(b);
            go(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), 0, n, &mut out);
    out
}

/// A clopen subset `f_n^{-1}(subset)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClopenSet {
    pub level: usize,
    pub subset: BTreeSet<usize>,
}

impl ClopenSet {
    pub fn is_empty(&self) -> bool {
        self.subset.is_empty()
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.subset, self.level)
    }
}

type Extender = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// A point `(x_0, x_1, …)` given by a recorded prefix and, for generator
/// points, an oracle for every level.
#[derive(Clone)]
pub struct PointThread {
    prefix: Vec<usize>,
    extender: Option<Extender>,
}

impl PointThread {
    pub fn from_prefix(prefix: Vec<usize>) -> Self {
        Self { prefix, extender: None }
    }

    pub fn generated(f: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        Self { prefix: Vec::new(), extender: Some(Arc::new(f)) }
    }

    /// The Cantor point with binary expansion given by `bit(k)`.
    pub fn cantor(bit: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        Self::generated(move |n| (0..n).fold(0, |acc, k| acc << 1 | usize::from(bit(k))))
    }

    /// Point `k` of the one-point compactification; `None` is the point at
    /// infinity.
    pub fn one_point(k: Option<usize>) -> Self {
        match k {
            Some(k) => Self::generated(move |n| k.min(n)),
            None => Self::generated(|n| n),
        }
    }

    /// Number of levels recorded without the extender.
    pub fn known(&self) -> usize {
        self.prefix.len().saturating_sub(1)
    }

    pub fn at(&self, n: usize) -> Result<usize> {
        match (self.prefix.get(n), &self.extender) {
            (Some(&x), _) => Ok(x),
            (None, Some(f)) => Ok(f(n)),
            (None, None) => Err(Error::ThreadTooShort { needed: n, known: self.known() }),
        }
    }

    /// Whether the thread is defined at every level.
    pub fn is_total(&self) -> bool {
        self.extender.is_some()
    }
}

impl fmt::Debug for PointThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = (0..4).map_while(|n| self.at(n).ok()).map(|x| x.to_string()).collect();
        write!(f, "PointThread({}{})", shown.join(","), if self.is_total() { ",…" } else { "" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_lift_and_image() {
        let x = ProSpace::cantor();
        let u = x.clopen(1, [0]).unwrap();
        let l = x.lift(&u, 2).unwrap();
        assert_eq!(l.subset, BTreeSet::from([0, 1]));
        assert_eq!(x.image(&l, 1).unwrap(), BTreeSet::from([0]));
        assert_eq!(x.lift(&u, 1).unwrap(), u);
        assert_eq!(x.lift(&x.whole(), 3).unwrap().subset.len(), 8);
    }

    #[test]
    fn boolean_operations() {
        let x = ProSpace::cantor();
        let a = x.clopen(1, [0]).unwrap();
        let b = x.clopen(1, [1]).unwrap();
        assert!(x.is_disjoint(&a, &b).unwrap());
        assert!(x.same(&x.join(&a, &b).unwrap(), &x.whole()).unwrap());
        let c = x.clopen(2, [1]).unwrap();
        assert_eq!(x.meet(&a, &c).unwrap().subset, BTreeSet::from([1]));
        assert!(x.meet(&a, &x.complement(&a).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn bell_numbers() {
        let x = ProSpace::finite(5);
        let bells: Vec<usize> = (0..=5).map(|k| x.partitions(&x.clopen(0, 0..k).unwrap()).unwrap().len()).collect();
        assert_eq!(bells, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn threads_and_membership() {
        let x = ProSpace::cantor();
        let zero = PointThread::cantor(|_| false);
        assert!(!x.contains(&x.clopen(1, [1]).unwrap(), &zero).unwrap());
        let t = PointThread::from_prefix(vec![0, 0, 1]);
        assert!(x.contains(&x.clopen(2, [1]).unwrap(), &t).unwrap());
        assert!(matches!(x.contains(&x.clopen(3, [1]).unwrap(), &t), Err(Error::ThreadTooShort { .. })));
        x.check_thread(&t, 2).unwrap();
        assert!(x.check_thread(&PointThread::from_prefix(vec![0, 1, 0]), 2).is_err());
        let inf = PointThread::one_point(None);
        ProSpace::one_point().check_thread(&inf, 5).unwrap();
    }

    #[test]
    fn dot_export_of_cantor() {
        let dot = ProSpace::cantor().to_dot(2);
        let nodes: BTreeSet<&str> = dot.split('"').skip(1).step_by(2).collect();
        assert_eq!(nodes.len(), 7);
        assert_eq!(dot.matches("->").count(), 6);
    }
}
