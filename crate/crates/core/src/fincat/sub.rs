use std::collections::{BTreeSet, HashMap, HashSet};

use super::morphism::{FinMor, MorData};
use super::object::{decode, FinObj, Repr};
use super::table::{Factor, GroupTable, MAX_ENUMERATION};
use crate::error::{mismatch, Error, Result};

/// A subobject of `ambient`, given by a monic inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subobject {
    ambient: FinObj,
    inclusion: FinMor,
}

impl Subobject {
    pub fn new(inclusion: FinMor) -> Result<Self> {
        if !inclusion.try_is_mono()? {
            return Err(Error::Precondition("subobject inclusion is not monic".into()));
        }
        Ok(Self { ambient: inclusion.cod().clone(), inclusion })
    }

    pub(crate) fn new_unchecked(inclusion: FinMor) -> Self {
        Self { ambient: inclusion.cod().clone(), inclusion }
    }

    pub fn whole(obj: &FinObj) -> Self {
        Self::new_unchecked(FinMor::identity(obj))
    }

    pub fn ambient(&self) -> &FinObj {
        &self.ambient
    }

    pub fn inclusion(&self) -> &FinMor {
        &self.inclusion
    }

    pub fn object(&self) -> &FinObj {
        self.inclusion.dom()
    }

    pub fn order(&self) -> u128 {
        self.object().order()
    }

    pub fn is_whole(&self) -> bool {
        self.order() == self.ambient.order()
    }

    /// Ambient labels of the members, when the ambient is enumerable.
    pub fn elements(&self) -> Result<BTreeSet<usize>> {
        Ok(self.inclusion.table()?.into_iter().collect())
    }

    /// Whether `f` factors through this subobject.
    pub fn admits(&self, f: &FinMor) -> bool {
        factor_through_mono(f, &self.inclusion).is_ok()
    }
}

/// Builds the subobject on a set of ambient labels that is already known
/// to be closed (any subset for sets; a subgroup for table groups).
pub(crate) fn sub_from_elements(ambient: &FinObj, elems: &BTreeSet<usize>) -> Subobject {
    let elems: Vec<usize> = elems.iter().copied().collect();
    match &ambient.0 {
        Repr::Set(_) => {
            Subobject::new_unchecked(FinMor::from_table_unchecked(FinObj::set(elems.len()), ambient.clone(), elems))
        }
        Repr::Group(t) => {
            if elems.len() == t.order() {
                return Subobject::whole(ambient);
            }
            let index: HashMap<usize, usize> = elems.iter().enumerate().map(|(k, &e)| (e, k)).collect();
            let sub = GroupTable::from_fn_unchecked(elems.len(), |a, b| index[&t.mul(elems[a], elems[b])]);
            Subobject::new_unchecked(FinMor::from_table_unchecked(FinObj::group(sub), ambient.clone(), elems))
        }
        Repr::Abelian(fs) => {
            let coords: Vec<Vec<usize>> = elems.iter().map(|&e| decode(fs, e)).collect();
            abelian_sub(ambient, coords).expect("subgroup of an enumerable sum")
        }
    }
}

/// Closure of `gens` under the group operation of a table group.
fn group_closure(t: &GroupTable, gens: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut seen: BTreeSet<usize> = BTreeSet::from([0]);
    let mut frontier = vec![0];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = t.mul(x, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

fn add_coords(fs: &[&Factor], x: &[usize], y: &[usize]) -> Vec<usize> {
    fs.iter().zip(x.iter().zip(y)).map(|(f, (a, b))| f.add(*a, *b)).collect()
}

/// Subgroup of an abelian direct sum generated by coordinate vectors.
///
/// Codomain factors that the generators fill one summand at a time stay
/// structured; the part generated on the remaining columns is enumerated
/// into a single table factor. The whole ambient is returned with its
/// identity inclusion.
pub(crate) fn abelian_sub(ambient: &FinObj, gens: Vec<Vec<usize>>) -> Result<Subobject> {
    let fs = ambient.factors().expect("abelian ambient");
    let k = fs.len();
    let support: Vec<usize> = (0..k).filter(|&j| gens.iter().any(|g| g[j] != 0)).collect();
    let covered: Vec<bool> = (0..k)
        .map(|j| {
            let local: BTreeSet<usize> =
                gens.iter().filter(|g| g[j] != 0 && (0..k).all(|c| c == j || g[c] == 0)).map(|g| g[j]).collect();
            if local.is_empty() {
                return false;
            }
            let mut seen = BTreeSet::from([0]);
            let mut frontier = vec![0];
            while let Some(x) = frontier.pop() {
                for &g in &local {
                    let y = fs[j].add(x, g);
                    if seen.insert(y) {
                        frontier.push(y);
                    }
                }
            }
            seen.len() == fs[j].order()
        })
        .collect();
    let rest: Vec<usize> = support.iter().copied().filter(|&j| !covered[j]).collect();
    let rest_factors: Vec<&Factor> = rest.iter().map(|&j| &fs[j]).collect();

    let mut closure: HashSet<Vec<usize>> = HashSet::from([vec![0; rest.len()]]);
    if !rest.is_empty() {
        let rgens: BTreeSet<Vec<usize>> = gens
            .iter()
            .map(|g| rest.iter().map(|&j| g[j]).collect::<Vec<_>>())
            .filter(|g| g.iter().any(|&v| v != 0))
            .collect();
        let mut frontier = vec![vec![0; rest.len()]];
        while let Some(x) = frontier.pop() {
            for g in &rgens {
                let y = add_coords(&rest_factors, &x, g);
                if !closure.contains(&y) {
                    if closure.len() >= MAX_ENUMERATION {
                        return Err(Error::TooLarge("generated subgroup exceeds the enumeration limit".into()));
                    }
                    closure.insert(y.clone());
                    frontier.push(y);
                }
            }
        }
    }
    let rest_order = rest_factors.iter().fold(1usize, |acc, f| acc.saturating_mul(f.order()));
    let rest_full = closure.len() == rest_order;

    // structured columns, in ambient order
    let structured: Vec<usize> = (0..k).filter(|&j| covered[j] || (rest_full && rest.contains(&j))).collect();
    if structured.len() == k {
        return Ok(Subobject::whole(ambient));
    }
    let mut factors: Vec<Factor> = structured.iter().map(|&j| fs[j].clone()).collect();
    let mut blocks: Vec<Vec<Vec<usize>>> = structured
        .iter()
        .map(|&s| (0..k).map(|j| if j == s { (0..fs[j].order()).collect() } else { vec![0; fs[s].order()] }).collect())
        .collect();
    if !rest_full && closure.len() > 1 {
        let mut elems: Vec<Vec<usize>> = closure.into_iter().collect();
        elems.sort();
        let index: HashMap<&Vec<usize>, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let table =
            GroupTable::from_fn_unchecked(elems.len(), |a, b| index[&add_coords(&rest_factors, &elems[a], &elems[b])]);
        factors.push(Factor::table_unchecked(table));
        let row = (0..k)
            .map(|j| match rest.iter().position(|&r| r == j) {
                Some(p) => elems.iter().map(|e| e[p]).collect(),
                None => vec![0; elems.len()],
            })
            .collect();
        blocks.push(row);
    }
    let sub = FinObj::abelian(factors);
    Ok(Subobject::new_unchecked(FinMor::from_blocks_unchecked(sub, ambient.clone(), blocks)))
}

/// Coordinate generators of the image of an abelian map.
fn image_generators(f: &FinMor) -> Vec<Vec<usize>> {
    let df = f.dom().factors().unwrap();
    let mut out = Vec::new();
    for (i, fac) in df.iter().enumerate() {
        match fac.as_cyclic() {
            Some(n) if n > 1 => out.push(f.factor_image(i, 1)),
            Some(_) => {}
            None => out.extend((1..fac.order()).map(|a| f.factor_image(i, a))),
        }
    }
    out
}

/// Smallest subobject of the common codomain through which every map of
/// `fs` factors, with the factorizations.
pub fn joint_image(fs: &[FinMor]) -> Result<(Subobject, Vec<FinMor>)> {
    let first = fs.first().ok_or(Error::EmptyFamily("joint_image"))?;
    let cod = first.cod().clone();
    if let Some(bad) = fs.iter().find(|f| *f.cod() != cod) {
        return Err(mismatch(format!("joint image over {:?} and {:?}", cod, bad.cod())));
    }
    let sub = match &cod.0 {
        Repr::Set(_) => {
            let elems: BTreeSet<usize> = fs.iter().flat_map(|f| f.table_ref().unwrap().iter().copied()).collect();
            sub_from_elements(&cod, &elems)
        }
        Repr::Group(t) => {
            let gens: BTreeSet<usize> = fs.iter().flat_map(|f| f.table_ref().unwrap().iter().copied()).collect();
            sub_from_elements(&cod, &group_closure(t, &gens))
        }
        Repr::Abelian(_) => abelian_sub(&cod, fs.iter().flat_map(image_generators).collect())?,
    };
    let lifts = fs.iter().map(|f| factor_through_mono(f, sub.inclusion())).collect::<Result<Vec<_>>>()?;
    Ok((sub, lifts))
}

/// Regular epi / mono factorization `f = mono ∘ repi`.
pub fn image_factor(f: &FinMor) -> Result<(FinMor, FinMor)> {
    let (sub, mut lifts) = joint_image(std::slice::from_ref(f))?;
    Ok((lifts.pop().unwrap(), sub.inclusion))
}

/// The unique `h` with `m ∘ h = f`, for `m` monic.
pub fn factor_through_mono(f: &FinMor, m: &FinMor) -> Result<FinMor> {
    if f.cod() != m.cod() {
        return Err(mismatch("lift through a mono with a different codomain"));
    }
    match (&f.data, &m.data) {
        (MorData::Table(ft), MorData::Table(mt)) => {
            let mut inv = vec![usize::MAX; m.cod().size().unwrap()];
            for (s, &e) in mt.iter().enumerate() {
                inv[e] = s;
            }
            let table = ft
                .iter()
                .map(|&e| match inv[e] {
                    usize::MAX => Err(Error::Precondition(format!("label {e} is not in the subobject"))),
                    s => Ok(s),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FinMor::from_table_unchecked(f.dom().clone(), m.dom().clone(), table))
        }
        _ => lift_abelian(f, m),
    }
}

fn lift_abelian(f: &FinMor, m: &FinMor) -> Result<FinMor> {
    let sf = m.dom().factors().unwrap();
    let cf = m.cod().factors().unwrap();
    let mblocks = m.blocks().unwrap();
    let nz = |s: usize| -> Vec<usize> { (0..cf.len()).filter(|&j| !FinMor::is_zero_block(&mblocks[s][j])).collect() };
    // columns used by exactly one summand row
    let mut col_users = vec![0usize; cf.len()];
    for s in 0..sf.len() {
        for j in nz(s) {
            col_users[j] += 1;
        }
    }
    // summands embedded injectively into a private column, with inverses
    let mut monomial: Vec<Option<(usize, Vec<Option<usize>>)>> = vec![None; sf.len()];
    for (s, slot) in monomial.iter_mut().enumerate() {
        let cols = nz(s);
        if cols.len() == 1 && col_users[cols[0]] == 1 {
            let j = cols[0];
            let mut inv = vec![None; cf[j].order()];
            let injective = mblocks[s][j].iter().enumerate().all(|(a, &v)| inv[v].replace(a).is_none());
            if injective {
                *slot = Some((j, inv));
            }
        }
    }
    let rest: Vec<usize> = (0..sf.len()).filter(|&s| monomial[s].is_none()).collect();
    let rest_cols: Vec<usize> = {
        let mut c: Vec<usize> = rest.iter().flat_map(|&s| nz(s)).collect();
        c.sort_unstable();
        c.dedup();
        c
    };
    let owned: Vec<bool> =
        (0..cf.len()).map(|j| monomial.iter().flatten().any(|(c, _)| *c == j) || rest_cols.contains(&j)).collect();

    // enumerate the non-monomial part of the subobject
    let rest_factors: Vec<&Factor> = rest.iter().map(|&s| &sf[s]).collect();
    let rest_order = rest_factors.iter().fold(1u128, |acc, f| acc.saturating_mul(f.order() as u128));
    if rest_order > MAX_ENUMERATION as u128 {
        return Err(Error::TooLarge("subobject is too large to invert by enumeration".into()));
    }
    let mut lookup: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let rest_radix: Vec<usize> = rest_factors.iter().map(|f| f.order()).collect();
    for label in 0..rest_order as usize {
        let mut rc = vec![0; rest.len()];
        let mut l = label;
        for (slot, r) in rc.iter_mut().zip(&rest_radix).rev() {
            *slot = l % r;
            l /= r;
        }
        let mut img = vec![0; rest_cols.len()];
        for (p, &s) in rest.iter().enumerate() {
            for (q, &j) in rest_cols.iter().enumerate() {
                img[q] = cf[j].add(img[q], mblocks[s][j][rc[p]]);
            }
        }
        lookup.insert(img, rc);
    }

    let df = f.dom().factors().unwrap();
    let mut blocks = vec![vec![Vec::new(); sf.len()]; df.len()];
    for (i, fac) in df.iter().enumerate() {
        for row in blocks[i].iter_mut() {
            row.reserve(fac.order());
        }
        for a in 0..fac.order() {
            let v = f.factor_image(i, a);
            if let Some(j) = (0..cf.len()).find(|&j| !owned[j] && v[j] != 0) {
                return Err(Error::Precondition(format!("component in factor {j} is outside the subobject")));
            }
            let key: Vec<usize> = rest_cols.iter().map(|&j| v[j]).collect();
            let rc = lookup.get(&key).ok_or_else(|| Error::Precondition("value is outside the subobject".into()))?;
            let mut p = 0;
            for s in 0..sf.len() {
                let val = match &monomial[s] {
                    Some((j, inv)) => {
                        inv[v[*j]].ok_or_else(|| Error::Precondition("value is outside the subobject".into()))?
                    }
                    None => {
                        p += 1;
                        rc[p - 1]
                    }
                };
                blocks[i][s].push(val);
            }
        }
    }
    Ok(FinMor::from_blocks_unchecked(f.dom().clone(), m.dom().clone(), blocks))
}

impl FinMor {
    /// Injectivity. Errors only when an abelian domain is too large to
    /// decide by enumeration.
    pub fn try_is_mono(&self) -> Result<bool> {
        match &self.data {
            MorData::Table(t) => {
                let mut seen = HashSet::with_capacity(t.len());
                Ok(t.iter().all(|v| seen.insert(*v)))
            }
            MorData::Blocks(b) => {
                let df = self.dom().factors().unwrap();
                if let Some(cols) = self.monomial_columns() {
                    let ok = cols.iter().enumerate().all(|(i, c)| match c {
                        Some(j) => {
                            let blk = &b[i][*j];
                            let mut seen = HashSet::new();
                            blk.iter().all(|v| seen.insert(*v))
                        }
                        None => df[i].order() == 1,
                    });
                    return Ok(ok);
                }
                // injective iff the image is as large as the domain
                Ok(abelian_sub(self.cod(), image_generators(self))?.order() == self.dom().order())
            }
        }
    }

    /// Surjectivity.
    pub fn try_is_epi(&self) -> Result<bool> {
        match &self.data {
            MorData::Table(t) => {
                let n = self.cod().size().unwrap();
                let hit: HashSet<usize> = t.iter().copied().collect();
                Ok(hit.len() == n)
            }
            MorData::Blocks(_) => Ok(abelian_sub(self.cod(), image_generators(self))?.is_whole()),
        }
    }

    /// Panics if the question cannot be decided by enumeration; see
    /// [`FinMor::try_is_mono`].
    pub fn is_mono(&self) -> bool {
        self.try_is_mono().expect("mono test within enumeration limits")
    }

    pub fn is_epi(&self) -> bool {
        self.try_is_epi().expect("epi test within enumeration limits")
    }

    pub fn try_is_iso(&self) -> Result<bool> {
        Ok(self.try_is_mono()? && self.try_is_epi()?)
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<FinMor> {
        if !self.try_is_iso()? {
            return Err(Error::Precondition("map is not invertible".into()));
        }
        factor_through_mono(&FinMor::identity(self.cod()), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::compose;

    fn s3_elem_map(elems: &[usize]) -> FinMor {
        // a map from a set whose image is the given S_3 elements, modelled
        // as the inclusion of the generated subgroup
        let s3 = FinObj::symmetric3();
        let gens: BTreeSet<usize> = elems.iter().copied().collect();
        let sub = sub_from_elements(&s3, &group_closure(s3.group_table().unwrap(), &gens));
        sub.inclusion().clone()
    }

    #[test]
    fn joint_image_generates_s3() {
        let a = s3_elem_map(&[1]);
        let b = s3_elem_map(&[4]);
        assert_eq!(a.dom().order(), 2);
        assert_eq!(b.dom().order(), 3);
        let (sub, lifts) = joint_image(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(sub.order(), 6);
        assert_eq!(compose(sub.inclusion(), &lifts[0]).unwrap(), a);
        assert_eq!(compose(sub.inclusion(), &lifts[1]).unwrap(), b);
    }

    #[test]
    fn doubling_on_z4_has_image_of_order_two() {
        let z4 = FinObj::cyclic(4);
        let f = FinMor::new(z4.clone(), z4.clone(), vec![0, 2, 0, 2]).unwrap();
        let (e, m) = image_factor(&f).unwrap();
        assert_eq!(m.dom().order(), 2);
        assert!(m.is_mono() && e.is_epi());
        assert_eq!(compose(&m, &e).unwrap(), f);
        assert_eq!(m.table().unwrap(), vec![0, 2]);
    }

    #[test]
    fn structured_images_of_large_sums() {
        let z2 = Factor::cyclic(2).unwrap();
        let big = FinObj::abelian(vec![z2.clone(); 40]);
        let small = FinObj::abelian(vec![z2; 20]);
        // fold pairs of coordinates
        let blocks =
            (0..40).map(|i| (0..20).map(|j| if i / 2 == j { vec![0, 1] } else { vec![0, 0] }).collect()).collect();
        let fold = FinMor::from_blocks(big.clone(), small.clone(), blocks).unwrap();
        assert!(fold.is_epi());
        assert!(!fold.is_mono());
        let (_, m) = image_factor(&fold).unwrap();
        assert_eq!(m, FinMor::identity(&small));
    }

    #[test]
    fn lifting_through_mixed_subobjects() {
        let z2 = Factor::cyclic(2).unwrap();
        let z4 = Factor::cyclic(4).unwrap();
        let amb = FinObj::abelian(vec![z2.clone(), z4, z2]);
        // generated by (1,0,0) and (0,2,1)
        let sub = abelian_sub(&amb, vec![vec![1, 0, 0], vec![0, 2, 1]]).unwrap();
        assert_eq!(sub.order(), 4);
        let elems = sub.elements().unwrap();
        // labels: a*8 + b*2 + c
        assert_eq!(elems, BTreeSet::from([0, 5, 8, 13]));
        let f = FinMor::new(FinObj::cyclic(2), amb.clone(), vec![0, 13]).unwrap();
        let h = factor_through_mono(&f, sub.inclusion()).unwrap();
        assert_eq!(compose(sub.inclusion(), &h).unwrap(), f);
        let g = FinMor::new(FinObj::cyclic(2), amb, vec![0, 1]).unwrap();
        assert!(factor_through_mono(&g, sub.inclusion()).is_err());
    }

    #[test]
    fn inverse_of_a_permutation() {
        let x = FinObj::set(3);
        let p = FinMor::new(x.clone(), x.clone(), vec![2, 0, 1]).unwrap();
        let q = p.inverse().unwrap();
        assert_eq!(compose(&p, &q).unwrap(), FinMor::identity(&x));
    }
}
