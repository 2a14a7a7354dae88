use super::{Arrow, ChainInfo, ChainMor, Flag, Lazy, ProChain};
use crate::error::{Error, Result};

/// An eventual-image normalization with its inclusion into the original
/// chain.
#[derive(Clone, Debug)]
pub struct Normalized<A: Arrow> {
    pub chain: ProChain<A>,
    pub inclusion: ChainMor<A>,
    pub flag: Flag,
}

/// Replaces level `j` by the image of `trans(j + lookahead → j)`, so that
/// the transitions become epic once the lookahead reaches the declared
/// stabilization bound. Without a sound bound the result is flagged
/// heuristic.
pub fn normalize<A: Arrow>(s: &ProChain<A>, lookahead: usize) -> Normalized<A> {
    let info = s.info();
    if info.epic {
        return Normalized { chain: s.clone(), inclusion: ChainMor::identity(s), flag: Flag::Exact };
    }
    let sound = info.bound().is_some_and(|b| b <= lookahead);
    let src = s.clone();
    let incl: Lazy<A> = Lazy::new(move |j| {
        let t = src.transition_to(j + lookahead, j).expect("ordered levels");
        t.image().expect("image within enumeration limits").1
    });
    let (i1, i2, src) = (incl.clone(), incl.clone(), s.clone());
    let new_info =
        ChainInfo { stabilization_bound: sound.then_some(0), constant_from: info.constant_from, epic: sound };
    let chain = ProChain::new(
        move |j| i1.get(j).source().clone(),
        move |j| {
            let down = A::compose(&src.transition(j), &i2.get(j + 1)).expect("composable");
            down.lift_through(&i2.get(j)).expect("images form a decreasing chain")
        },
        new_info,
    );
    let i3 = incl;
    let inclusion = ChainMor::new(chain.clone(), s.clone(), move |j| i3.get(j));
    Normalized { chain, inclusion, flag: if sound { Flag::Exact } else { Flag::Heuristic } }
}

/// Evaluation policy for maps out of a chain into a finite object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomPolicy {
    /// Level at which class representatives are taken.
    pub truncation: usize,
    /// Normalize first with this lookahead.
    pub normalize_lookahead: Option<usize>,
    /// Maps at the truncation level are identified when they agree after
    /// precomposition with `trans(truncation + identify_window → truncation)`.
    pub identify_window: usize,
}

impl HomPolicy {
    pub fn at(truncation: usize) -> Self {
        Self { truncation, normalize_lookahead: None, identify_window: 0 }
    }
}

/// Classes of `colim_i Hom(S_i, d)` seen from a truncation level.
#[derive(Clone, Debug)]
pub struct HomClasses<A: Arrow> {
    pub level: usize,
    pub representatives: Vec<A>,
    pub flag: Flag,
    chain: ProChain<A>,
    probe: A,
}

impl<A: Arrow> HomClasses<A> {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// The chain the classes were computed on (normalized if requested).
    pub fn chain(&self) -> &ProChain<A> {
        &self.chain
    }

    /// Class of a map `S_i → d` for `i` at most the truncation level.
    pub fn classify(&self, i: usize, f: &A) -> Result<Option<usize>> {
        if i > self.level {
            return Err(Error::LevelOrder { from: self.level, to: i });
        }
        let g = A::compose(f, &self.chain.transition_to(self.level, i)?)?;
        let key = A::compose(&g, &self.probe)?;
        for (k, r) in self.representatives.iter().enumerate() {
            if A::compose(r, &self.probe)? == key {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

/// `colim_i Hom(S_i, d)`: maps out of the truncation level, identified
/// along precomposition. Exact when the chain is declared constant by the
/// truncation level; otherwise truncated.
pub fn hom_to_finite<A: Arrow>(s: &ProChain<A>, d: &A::Obj, policy: HomPolicy) -> Result<HomClasses<A>> {
    let (chain, norm_flag) = match policy.normalize_lookahead {
        Some(l) => {
            let n = normalize(s, l);
            (n.chain, n.flag)
        }
        None => (s.clone(), Flag::Exact),
    };
    let n = policy.truncation;
    let probe = chain.transition_to(n + policy.identify_window, n)?;
    let mut keys: Vec<A> = Vec::new();
    let mut reps = Vec::new();
    for f in A::hom_set(&chain.level(n), d)? {
        let key = A::compose(&f, &probe)?;
        if !keys.contains(&key) {
            keys.push(key);
            reps.push(f);
        }
    }
    let base = match chain.info().constant_from {
        Some(c) if c <= n => Flag::Exact,
        _ => Flag::Truncated,
    };
    Ok(HomClasses { level: n, representatives: reps, flag: base.meet(norm_flag), chain, probe })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{FinMor, FinObj};

    fn zero_chain() -> ProChain<FinMor> {
        let z2 = FinObj::cyclic(2);
        let zero = FinMor::zero(&z2, &z2).unwrap();
        ProChain::new(
            move |_| z2.clone(),
            move |_| zero.clone(),
            ChainInfo { stabilization_bound: Some(1), constant_from: None, epic: false },
        )
    }

    #[test]
    fn zero_transitions_normalize_to_trivial_levels() {
        let n = normalize(&zero_chain(), 1);
        assert_eq!(n.flag, Flag::Exact);
        for j in 0..4 {
            assert_eq!(n.chain.level(j).order(), 1);
        }
        assert!(n.chain.transition(2).is_epi());
        assert_eq!(n.inclusion.check(3).unwrap(), None);
    }

    #[test]
    fn short_lookahead_is_heuristic() {
        let s = zero_chain().with_info(ChainInfo { stabilization_bound: Some(3), constant_from: None, epic: false });
        assert_eq!(normalize(&s, 1).flag, Flag::Heuristic);
    }

    #[test]
    fn cyclic_tower_homs_into_z4() {
        let tower = ProChain::new(
            |n| FinObj::cyclic(1 << n),
            |n| {
                let (m, k) = (1usize << (n + 1), 1usize << n);
                FinMor::new(FinObj::cyclic(m), FinObj::cyclic(k), (0..m).map(|x| x % k).collect()).unwrap()
            },
            ChainInfo { stabilization_bound: Some(0), constant_from: None, epic: true },
        );
        let classes = hom_to_finite(&tower, &FinObj::cyclic(4), HomPolicy::at(4)).unwrap();
        assert_eq!(classes.count(), 4);
        assert_eq!(classes.flag, Flag::Truncated);
        let one = FinMor::new(FinObj::cyclic(2), FinObj::cyclic(4), vec![0, 2]).unwrap();
        assert!(classes.classify(1, &one).unwrap().is_some());
    }

    #[test]
    fn constant_chain_homs_are_exact() {
        let c = ProChain::<FinMor>::constant(FinObj::set(2));
        let classes = hom_to_finite(&c, &FinObj::set(3), HomPolicy::at(0)).unwrap();
        assert_eq!(classes.count(), 9);
        assert_eq!(classes.flag, Flag::Exact);
    }
}
