//! Bundles over profinite spaces and group objects in the slice, with
//! conversions to and from cosheaves valued in sets and groups.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cosheaf::Cosheaf;
use crate::error::{Error, Result};
use crate::fam::{FamMor, FamObj};
use crate::fincat::{self, FinMor, FinObj, Kind};
use crate::prospace::ProSpace;
use crate::prosys::{ChainInfo, ChainMor, Lazy, ProChain};

/// `p : E → X` as levelwise set maps commuting with the transitions.
#[derive(Clone, Debug)]
pub struct ProBundle {
    pub total: ProSpace,
    pub base: ProSpace,
    pub projection: ChainMor<FinMor>,
}

impl ProBundle {
    pub fn new(
        total: ProSpace,
        base: ProSpace,
        projection: impl Fn(usize) -> Vec<usize> + Send + Sync + 'static,
    ) -> Self {
        let (e, x) = (total.chain().clone(), base.chain().clone());
        let maps = ChainMor::new(total.chain().clone(), base.chain().clone(), move |n| {
            FinMor::new(e.level(n), x.level(n), projection(n)).expect("projection tables are set maps")
        });
        Self { total, base, projection: maps }
    }

    /// `id : X → X`.
    pub fn identity(base: &ProSpace) -> Self {
        let s = base.clone();
        Self::new(base.clone(), base.clone(), move |n| (0..s.size(n)).collect())
    }

    pub fn projection_table(&self, n: usize) -> Vec<usize> {
        self.projection.at(n).table().expect("set map")
    }

    /// First level below `n` where a square fails to commute.
    pub fn check(&self, n: usize) -> Result<Option<usize>> {
        self.projection.check(n)
    }

    /// `p_n^{-1}(x)` in ascending order.
    pub fn fibre(&self, n: usize, x: usize) -> Vec<usize> {
        let p = self.projection_table(n);
        (0..p.len()).filter(|&e| p[e] == x).collect()
    }

    /// `E ×_X F`, levelwise pullback of the projections.
    pub fn fibre_product(&self, other: &ProBundle) -> Result<ProBundle> {
        if self.base.chain().id() != other.base.chain().id() {
            return Err(Error::Precondition("fibre product needs a common base".into()));
        }
        let (p1, q1, p2, q2) = (self.clone(), other.clone(), self.clone(), other.clone());
        let total = ProSpace::from_chain(ProChain::new(
            move |n| fincat::pullback(&p1.projection.at(n), &q1.projection.at(n)).unwrap().0,
            move |n| {
                let (_, a1, b1) = fincat::pullback(&p2.projection.at(n + 1), &q2.projection.at(n + 1)).unwrap();
                let (_, a0, b0) = fincat::pullback(&p2.projection.at(n), &q2.projection.at(n)).unwrap();
                let down = fincat::pair(
                    &fincat::compose(&p2.total.chain().transition(n), &a1).unwrap(),
                    &fincat::compose(&q2.total.chain().transition(n), &b1).unwrap(),
                )
                .unwrap();
                let into = fincat::pair(&a0, &b0).unwrap();
                fincat::factor_through_mono(&down, &into).expect("pullback squares commute")
            },
            ChainInfo { epic: false, ..self.total.chain().info() },
        ))?;
        let (p3, q3) = (self.clone(), other.clone());
        Ok(ProBundle::new(total, self.base.clone(), move |n| {
            let (_, a, _) = fincat::pullback(&p3.projection.at(n), &q3.projection.at(n)).unwrap();
            fincat::compose(&p3.projection.at(n), &a).unwrap().table().unwrap()
        }))
    }

    /// Layered DOT rendering of the squares at levels `0..=n`.
    pub fn to_dot(&self, n: usize) -> String {
        let mut s = String::from("digraph bundle {\n  rankdir=BT;\n");
        for k in 0..=n {
            let p = self.projection_table(k);
            for (e, x) in p.iter().enumerate() {
                let _ = writeln!(s, "  \"E{k}:{e}\" -> \"X{k}:{x}\" [style=dashed];");
            }
        }
        for k in 0..n {
            let (te, tx) = (self.total.chain().transition(k), self.base.chain().transition(k));
            for e in 0..self.total.size(k + 1) {
                let _ = writeln!(s, "  \"E{}:{e}\" -> \"E{k}:{}\";", k + 1, te.apply(e));
            }
            for x in 0..self.base.size(k + 1) {
                let _ = writeln!(s, "  \"X{}:{x}\" -> \"X{k}:{}\";", k + 1, tx.apply(x));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// `⊔_x A_x → X` for a set-valued cosheaf.
pub fn to_bundle(a: &Cosheaf) -> Result<ProBundle> {
    Kind::Set.expect(a.kind())?;
    let total = ProSpace::from_chain(a.global_cosections()?)?;
    let c = a.chain().clone();
    Ok(ProBundle::new(total, a.base().clone(), move |n| {
        let l = c.level(n);
        (0..l.len()).flat_map(|x| std::iter::repeat_n(x, l.fibre(x).size().unwrap())).collect()
    }))
}

/// `U ↦ p^{-1}(U)` as a chain of families of fibres.
pub fn from_bundle(p: &ProBundle) -> Result<Cosheaf> {
    let (p1, p2) = (p.clone(), p.clone());
    let fibres = move |b: &ProBundle, n: usize| -> FamObj {
        let sizes = fibre_sizes(&b.projection_table(n), b.base.size(n));
        FamObj::new(Kind::Set, sizes.into_iter().map(FinObj::set).collect()).unwrap()
    };
    let fibres2 = fibres;
    let info = ChainInfo { epic: p.total.is_surjective() && p.base.is_surjective(), ..p.total.chain().info() };
    let chain = ProChain::new(
        move |n| fibres(&p1, n),
        move |n| {
            let (hi, lo) = (p2.projection_table(n + 1), p2.projection_table(n));
            let te = p2.total.chain().transition(n);
            let base = p2.base.chain().transition(n).table().unwrap();
            let rank = ranks(&lo);
            let maps = (0..p2.base.size(n + 1))
                .map(|x| {
                    let table = (0..hi.len()).filter(|&e| hi[e] == x).map(|e| rank[te.apply(e)]).collect();
                    let tgt = base[x];
                    FinMor::new(FinObj::set(fibre_count(&hi, x)), FinObj::set(fibre_count(&lo, tgt)), table)
                        .expect("total transitions cover base transitions")
                })
                .collect();
            FamMor::new(fibres2(&p2, n + 1), fibres2(&p2, n), base, maps).unwrap()
        },
        info,
    );
    Cosheaf::with_base_surjectivity(chain, p.base.is_surjective())
}

fn fibre_sizes(p: &[usize], base: usize) -> Vec<usize> {
    let mut sizes = vec![0; base];
    for &x in p {
        sizes[x] += 1;
    }
    sizes
}

fn fibre_count(p: &[usize], x: usize) -> usize {
    p.iter().filter(|&&y| y == x).count()
}

/// Position of each total-space element within its fibre.
fn ranks(p: &[usize]) -> Vec<usize> {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    p.iter()
        .map(|&x| {
            let r = seen.entry(x).or_default();
            *r += 1;
            *r - 1
        })
        .collect()
}

/// The isomorphism `E_n → ⊔_x p_n^{-1}(x)` sorting the total space by
/// fibre.
pub fn fibre_sort(p: &ProBundle, n: usize) -> Vec<usize> {
    let t = p.projection_table(n);
    let sizes = fibre_sizes(&t, p.base.size(n));
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &s| Some(std::mem::replace(acc, *acc + s))).collect();
    let r = ranks(&t);
    (0..t.len()).map(|e| offsets[t[e]] + r[e]).collect()
}

/// Checks `to_bundle ∘ from_bundle ≅ id` through `fibre_sort` on levels
/// `0..=n`; returns the first failing level.
pub fn bundle_round_trip_failure(p: &ProBundle, n: usize) -> Result<Option<usize>> {
    let q = to_bundle(&from_bundle(p)?)?;
    for k in 0..=n {
        let sigma = fibre_sort(p, k);
        let (pt, qt) = (p.projection_table(k), q.projection_table(k));
        if q.total.size(k) != sigma.len() || (0..sigma.len()).any(|e| qt[sigma[e]] != pt[e]) {
            return Ok(Some(k));
        }
        let mut seen = vec![false; sigma.len()];
        if !sigma.iter().all(|&s| !std::mem::replace(&mut seen[s], true)) {
            return Ok(Some(k));
        }
        if k < n {
            let hi = fibre_sort(p, k + 1);
            let (tp, tq) = (p.total.chain().transition(k), q.total.chain().transition(k));
            if (0..hi.len()).any(|e| tq.apply(hi[e]) != sigma[tp.apply(e)]) {
                return Ok(Some(k));
            }
        }
    }
    Ok(None)
}

/// First level in `0..=n` where two cosheaves differ as chains.
pub fn chain_difference(a: &Cosheaf, b: &Cosheaf, n: usize) -> Option<usize> {
    (0..=n).find(|&k| a.level(k) != b.level(k) || (k < n && a.transition(k) != b.transition(k)))
}

/// Multiplication, unit and inverse at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLevel {
    /// Keyed by pairs in a common fibre.
    pub mult: BTreeMap<(usize, usize), usize>,
    pub unit: Vec<usize>,
    pub inv: Vec<usize>,
}

/// A group object in bundles over `X`.
#[derive(Clone)]
pub struct GroupObjectData {
    pub underlying: ProBundle,
    structure: Lazy<GroupLevel>,
}

impl std::fmt::Debug for GroupObjectData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupObjectData").field("underlying", &self.underlying).finish_non_exhaustive()
    }
}

impl GroupObjectData {
    pub fn new(underlying: ProBundle, structure: impl Fn(usize) -> GroupLevel + Send + Sync + 'static) -> Self {
        Self { underlying, structure: Lazy::new(structure) }
    }

    pub fn level(&self, n: usize) -> GroupLevel {
        self.structure.get(n)
    }

    /// The same data with one level's structure replaced.
    pub fn with_level(&self, n: usize, level: GroupLevel) -> Self {
        let s = self.structure.clone();
        Self::new(self.underlying.clone(), move |k| if k == n { level.clone() } else { s.get(k) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    MultFibrewise,
    UnitSection,
    InvFibrewise,
    Associativity,
    LeftUnit,
    RightUnit,
    LeftInverse,
    RightInverse,
    MultTransition,
    UnitTransition,
    InvTransition,
}

impl Axiom {
    pub const ALL: [Axiom; 11] = [
        Axiom::MultFibrewise,
        Axiom::UnitSection,
        Axiom::InvFibrewise,
        Axiom::Associativity,
        Axiom::LeftUnit,
        Axiom::RightUnit,
        Axiom::LeftInverse,
        Axiom::RightInverse,
        Axiom::MultTransition,
        Axiom::UnitTransition,
        Axiom::InvTransition,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub level: usize,
    pub axiom: Axiom,
    /// First failing element tuple.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupObjectReport {
    pub window: usize,
    pub checks: Vec<AxiomCheck>,
}

impl GroupObjectReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.witness.is_none())
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.witness.is_some())
    }
}

fn check_level(d: &GroupObjectData, n: usize) -> Vec<(Axiom, Option<Vec<usize>>)> {
    let p = d.underlying.projection_table(n);
    let g = d.level(n);
    let xs = d.underlying.base.size(n);
    let same: Vec<(usize, usize)> =
        (0..p.len()).flat_map(|a| (0..p.len()).map(move |b| (a, b))).filter(|&(a, b)| p[a] == p[b]).collect();
    let mul = |a: usize, b: usize| g.mult.get(&(a, b)).copied();
    let mut out = Vec::new();
    let fibrewise = same
        .iter()
        .find(|&&(a, b)| mul(a, b).is_none_or(|c| c >= p.len() || p[c] != p[a]))
        .map(|&(a, b)| vec![a, b])
        .or_else(|| {
            g.mult.keys().find(|&&(a, b)| a >= p.len() || b >= p.len() || p[a] != p[b]).map(|&(a, b)| vec![a, b])
        });
    out.push((Axiom::MultFibrewise, fibrewise.clone()));
    let unit_ok = g.unit.len() == xs;
    out.push((
        Axiom::UnitSection,
        if unit_ok {
            (0..xs).find(|&x| g.unit[x] >= p.len() || p[g.unit[x]] != x).map(|x| vec![x])
        } else {
            Some(vec![])
        },
    ));
    let inv_ok = g.inv.len() == p.len();
    out.push((
        Axiom::InvFibrewise,
        if inv_ok {
            (0..p.len()).find(|&e| g.inv[e] >= p.len() || p[g.inv[e]] != p[e]).map(|e| vec![e])
        } else {
            Some(vec![])
        },
    ));
    let structural = fibrewise.is_none() && out.iter().all(|(_, w)| w.is_none());
    if !structural {
        for axiom in [Axiom::Associativity, Axiom::LeftUnit, Axiom::RightUnit, Axiom::LeftInverse, Axiom::RightInverse]
        {
            out.push((axiom, Some(vec![])));
        }
        return out;
    }
    let m = |a: usize, b: usize| mul(a, b).unwrap();
    let mut assoc = None;
    'outer: for &(a, b) in &same {
        for c in (0..p.len()).filter(|&c| p[c] == p[a]) {
            if m(m(a, b), c) != m(a, m(b, c)) {
                assoc = Some(vec![a, b, c]);
                break 'outer;
            }
        }
    }
    out.push((Axiom::Associativity, assoc));
    let e = |a: usize| g.unit[p[a]];
    out.push((Axiom::LeftUnit, (0..p.len()).find(|&a| m(e(a), a) != a).map(|a| vec![a])));
    out.push((Axiom::RightUnit, (0..p.len()).find(|&a| m(a, e(a)) != a).map(|a| vec![a])));
    out.push((Axiom::LeftInverse, (0..p.len()).find(|&a| m(g.inv[a], a) != e(a)).map(|a| vec![a])));
    out.push((Axiom::RightInverse, (0..p.len()).find(|&a| m(a, g.inv[a]) != e(a)).map(|a| vec![a])));
    out
}

fn check_transition(d: &GroupObjectData, n: usize) -> Vec<(Axiom, Option<Vec<usize>>)> {
    let (hi, lo) = (d.level(n + 1), d.level(n));
    let te = d.underlying.total.chain().transition(n);
    let tx = d.underlying.base.chain().transition(n);
    let mult = hi
        .mult
        .iter()
        .find(|(&(a, b), &c)| lo.mult.get(&(te.apply(a), te.apply(b))) != Some(&te.apply(c)))
        .map(|(&(a, b), _)| vec![a, b]);
    let unit = (0..hi.unit.len()).find(|&x| lo.unit.get(tx.apply(x)) != Some(&te.apply(hi.unit[x]))).map(|x| vec![x]);
    let inv = (0..hi.inv.len()).find(|&a| lo.inv.get(te.apply(a)) != Some(&te.apply(hi.inv[a]))).map(|a| vec![a]);
    vec![(Axiom::MultTransition, mult), (Axiom::UnitTransition, unit), (Axiom::InvTransition, inv)]
}

/// Group-object axioms on levels `0..=window` and the transitions
/// between them.
pub fn check_group_object(d: &GroupObjectData, window: usize) -> GroupObjectReport {
    let mut checks = Vec::new();
    for n in 0..=window {
        let mut level = check_level(d, n);
        if n < window {
            level.extend(check_transition(d, n));
        }
        checks.extend(level.into_iter().map(|(axiom, witness)| AxiomCheck { level: n, axiom, witness }));
    }
    GroupObjectReport { window, checks }
}

/// The cosheaf of underlying sets.
pub fn underlying_sets(g: &Cosheaf) -> Result<Cosheaf> {
    let forget = |a: &FinObj| FinObj::set(a.size().expect("enumerable fibres"));
    let forget2 = forget;
    let chain = g.chain().map(
        move |_, a: &FamObj| FamObj::new(Kind::Set, a.fibres().iter().map(forget).collect()).unwrap(),
        move |_, t: &FamMor| {
            let maps = t
                .fibre_maps()
                .iter()
                .map(|f| FinMor::new(forget2(f.dom()), forget2(f.cod()), f.table().unwrap()).unwrap())
                .collect();
            let dom = FamObj::new(Kind::Set, t.dom().fibres().iter().map(forget2).collect()).unwrap();
            let cod = FamObj::new(Kind::Set, t.cod().fibres().iter().map(forget2).collect()).unwrap();
            FamMor::new(dom, cod, t.base().to_vec(), maps).unwrap()
        },
    );
    Cosheaf::with_base_surjectivity(chain, g.base().is_surjective())
}

/// Assembles the fibrewise group tables of a group-valued cosheaf into a
/// group object over its base.
pub fn to_group_object(g: &Cosheaf) -> Result<GroupObjectData> {
    Kind::Group.expect(g.kind())?;
    let underlying = to_bundle(&underlying_sets(g)?)?;
    let c = g.chain().clone();
    Ok(GroupObjectData::new(underlying, move |n| {
        let a = c.level(n);
        let mut mult = BTreeMap::new();
        let mut unit = Vec::new();
        let mut inv = Vec::new();
        let mut off = 0;
        for f in a.fibres() {
            let k = f.size().unwrap();
            unit.push(off);
            for x in 0..k {
                inv.push(off + f.inverse(x).unwrap());
                for y in 0..k {
                    mult.insert((off + x, off + y), off + f.op(x, y).unwrap());
                }
            }
            off += k;
        }
        GroupLevel { mult, unit, inv }
    }))
}

/// Fibre labelling for [`from_group_object`]: the unit first, then the
/// remaining fibre elements ascending.
pub fn group_labels(d: &GroupObjectData, n: usize, x: usize) -> Vec<usize> {
    let u = d.level(n).unit[x];
    std::iter::once(u).chain(d.underlying.fibre(n, x).into_iter().filter(|&e| e != u)).collect()
}

fn fibre_group(d: &GroupObjectData, n: usize, x: usize) -> Result<(FinObj, Vec<usize>)> {
    let labels = group_labels(d, n, x);
    let g = d.level(n);
    let pos: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let rows = labels.iter().map(|&a| labels.iter().map(|&b| pos[&g.mult[&(a, b)]]).collect()).collect::<Vec<_>>();
    Ok((FinObj::group_from_rows(&rows)?, labels))
}

fn group_family(d: &GroupObjectData, n: usize) -> Result<FamObj> {
    let fibres = (0..d.underlying.base.size(n)).map(|x| Ok(fibre_group(d, n, x)?.0)).collect::<Result<Vec<_>>>()?;
    FamObj::new(Kind::Group, fibres)
}

fn group_transition(d: &GroupObjectData, n: usize) -> Result<FamMor> {
    let te = d.underlying.total.chain().transition(n);
    let base = d.underlying.base.chain().transition(n).table()?;
    let (dom, cod) = (group_family(d, n + 1)?, group_family(d, n)?);
    let maps = (0..base.len())
        .map(|x| {
            let hi = group_labels(d, n + 1, x);
            let lo = group_labels(d, n, base[x]);
            let table = hi
                .iter()
                .map(|&e| {
                    lo.iter()
                        .position(|&f| f == te.apply(e))
                        .ok_or_else(|| Error::Precondition(format!("transition leaves the fibre at level {n}")))
                })
                .collect::<Result<Vec<_>>>()?;
            FinMor::new(dom.fibre(x).clone(), cod.fibre(base[x]).clone(), table)
        })
        .collect::<Result<Vec<_>>>()?;
    FamMor::new(dom, cod, base, maps)
}

/// The group-valued cosheaf of a group object. The axioms and the
/// fibre transitions are verified on levels `0..=window`; levels beyond
/// are built on demand and panic on inconsistent data.
pub fn from_group_object(d: &GroupObjectData, window: usize) -> Result<Cosheaf> {
    let report = check_group_object(d, window);
    if let Some(f) = report.first_failure() {
        return Err(Error::Precondition(format!("group-object axiom {:?} fails at level {}", f.axiom, f.level)));
    }
    for n in 0..window {
        group_transition(d, n)?;
    }
    let (d1, d2) = (d.clone(), d.clone());
    let info = ChainInfo {
        epic: d.underlying.total.is_surjective() && d.underlying.base.is_surjective(),
        ..d.underlying.total.chain().info()
    };
    let chain = ProChain::new(
        move |n| group_family(&d1, n).expect("group object levels"),
        move |n| group_transition(&d2, n).expect("group object transitions"),
        info,
    );
    Cosheaf::with_base_surjectivity(chain, d.underlying.base.is_surjective())
}

/// Checks `to_group_object ∘ from_group_object ≅ id` on levels
/// `0..=window` through the relabelling that lists each fibre unit first;
/// returns the first failing level.
pub fn group_round_trip_failure(d: &GroupObjectData, window: usize) -> Result<Option<usize>> {
    let e = to_group_object(&from_group_object(d, window)?)?;
    let relabel = |n: usize| -> Vec<usize> {
        let mut sigma = vec![usize::MAX; d.underlying.total.size(n)];
        let mut off = 0;
        for x in 0..d.underlying.base.size(n) {
            let labels = group_labels(d, n, x);
            for (i, &a) in labels.iter().enumerate() {
                sigma[a] = off + i;
            }
            off += labels.len();
        }
        sigma
    };
    for n in 0..=window {
        let sigma = relabel(n);
        if e.underlying.total.size(n) != sigma.len() || sigma.contains(&usize::MAX) {
            return Ok(Some(n));
        }
        let (pd, pe) = (d.underlying.projection_table(n), e.underlying.projection_table(n));
        let (gd, ge) = (d.level(n), e.level(n));
        let same = (0..sigma.len()).all(|a| pe[sigma[a]] == pd[a] && ge.inv[sigma[a]] == sigma[gd.inv[a]])
            && gd.mult.iter().all(|(&(a, b), &c)| ge.mult.get(&(sigma[a], sigma[b])) == Some(&sigma[c]))
            && gd.mult.len() == ge.mult.len()
            && (0..gd.unit.len()).all(|x| ge.unit[x] == sigma[gd.unit[x]]);
        if !same {
            return Ok(Some(n));
        }
        if n < window {
            let hi = relabel(n + 1);
            let (td, te) = (d.underlying.total.chain().transition(n), e.underlying.total.chain().transition(n));
            if (0..hi.len()).any(|a| te.apply(hi[a]) != sigma[td.apply(a)]) {
                return Ok(Some(n));
            }
        }
    }
    Ok(None)
}

/// A group object on a bundle over a finite base given by one level.
pub fn finite_group_object(total: usize, base: usize, projection: Vec<usize>, level: GroupLevel) -> GroupObjectData {
    let bundle = ProBundle::new(ProSpace::finite(total), ProSpace::finite(base), move |_| projection.clone());
    GroupObjectData::new(bundle, move |_| level.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_bundle_counts() {
        let a = Cosheaf::finite(FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap());
        let b = to_bundle(&a).unwrap();
        assert_eq!(b.total.size(0), 5);
        assert_eq!(b.projection_table(0), vec![0, 0, 1, 1, 1]);
        assert_eq!(chain_difference(&from_bundle(&b).unwrap(), &a, 3), None);
    }

    #[test]
    fn constant_cosheaf_over_cantor_gives_double_cantor() {
        let a = Cosheaf::constant(&FinObj::set(2), &ProSpace::cantor());
        let b = to_bundle(&a).unwrap();
        assert_eq!(b.check(4).unwrap(), None);
        for n in 0..5 {
            assert_eq!(b.total.size(n), 2 << n);
        }
        assert_eq!(bundle_round_trip_failure(&b, 4).unwrap(), None);
    }

    #[test]
    fn identity_bundle_is_terminal() {
        let x = ProSpace::one_point();
        let t = from_bundle(&ProBundle::identity(&x)).unwrap();
        assert_eq!(chain_difference(&t, &Cosheaf::terminal(Kind::Set, &x), 4), None);
    }

    #[test]
    fn group_round_trip_over_cantor() {
        let g = Cosheaf::constant(&FinObj::cyclic_group(2), &ProSpace::cantor());
        let d = to_group_object(&g).unwrap();
        assert!(check_group_object(&d, 3).passes());
        assert_eq!(d.underlying.total.size(3), 16);
        assert_eq!(d.level(1).mult[&(2, 3)], 3);
        let back = from_group_object(&d, 3).unwrap();
        assert_eq!(chain_difference(&back, &g, 3), None);
    }

    #[test]
    fn corrupted_multiplication_is_reported() {
        let a =
            Cosheaf::finite(FamObj::new(Kind::Group, vec![FinObj::cyclic_group(2), FinObj::cyclic_group(3)]).unwrap());
        let d = to_group_object(&a).unwrap();
        let mut l = d.level(0);
        l.mult.insert((3, 3), 2);
        let r = check_group_object(&d.with_level(0, l), 0);
        let f = r.first_failure().unwrap();
        assert_eq!(f.axiom, Axiom::Associativity);
        let mut l = d.level(0);
        l.unit[0] = 2;
        let r = check_group_object(&d.with_level(0, l), 0);
        assert_eq!(r.first_failure().unwrap().axiom, Axiom::UnitSection);
    }

    #[test]
    fn s3_read_off_a_single_fibre() {
        let s3 = FinObj::symmetric3();
        let a = Cosheaf::finite(FamObj::point(s3.clone()));
        let l = to_group_object(&a).unwrap().level(0);
        let d = finite_group_object(6, 1, vec![0; 6], l);
        let g = from_group_object(&d, 2).unwrap();
        assert_eq!(g.level(0).fibre(0), &s3);
    }

    #[test]
    fn relabelled_group_object_round_trips() {
        // Z/3 on a point with the unit stored at label 2.
        let perm = [1, 2, 0];
        let mut mult = BTreeMap::new();
        for a in 0..3 {
            for b in 0..3 {
                mult.insert((perm[a], perm[b]), perm[(a + b) % 3]);
            }
        }
        let inv = (0..3).map(|a| perm[(3 - a) % 3]).collect::<Vec<_>>();
        let mut inv_by_label = vec![0; 3];
        for a in 0..3 {
            inv_by_label[perm[a]] = inv[a];
        }
        let d = finite_group_object(3, 1, vec![0; 3], GroupLevel { mult, unit: vec![perm[0]], inv: inv_by_label });
        assert!(check_group_object(&d, 2).passes());
        assert_eq!(group_labels(&d, 0, 0)[0], 1);
        assert_eq!(group_round_trip_failure(&d, 2).unwrap(), None);
        let mut bad = d.level(1);
        bad.inv.swap(0, 2);
        assert!(group_round_trip_failure(&d.with_level(1, bad), 2).is_err());
    }

    #[test]
    fn fibre_products_multiply_fibres() {
        let a = Cosheaf::finite(FamObj::new(Kind::Set, vec![FinObj::set(2), FinObj::set(3)]).unwrap());
        let b = to_bundle(&a).unwrap();
        let pp = from_bundle(&b.fibre_product(&b).unwrap()).unwrap();
        let orders: Vec<u128> = pp.level(0).fibres().iter().map(FinObj::order).collect();
        assert_eq!(orders, vec![4, 9]);
    }
}
