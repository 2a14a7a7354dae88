use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use super::morphism::FinMor;
use super::object::{FinObj, Repr};
use super::table::Factor;
use crate::error::{Error, Result};

/// Largest Hom-set that is materialized.
pub const MAX_HOM: usize = 1 << 20;

/// Multiplication of a finite group on labels with identity 0.
trait Mul {
    fn order(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
}

impl Mul for super::table::GroupTable {
    fn order(&self) -> usize {
        self.order()
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul(a, b)
    }
}

impl Mul for Factor {
    fn order(&self) -> usize {
        self.order()
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.add(a, b)
    }
}

impl Mul for FinObj {
    fn order(&self) -> usize {
        self.size().unwrap()
    }
    fn mul(&self, a: usize, b: usize) -> usize {
        self.op(a, b).unwrap()
    }
}

fn element_order(g: &impl Mul, x: usize) -> usize {
    let mut k = 1;
    let mut y = x;
    while y != 0 {
        y = g.mul(y, x);
        k += 1;
    }
    k
}

fn generated(g: &impl Mul, gens: &[usize]) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([0]);
    let mut frontier = vec![0];
    while let Some(x) = frontier.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Greedy generating set: repeatedly add the least element not yet reached.
fn generators(g: &impl Mul) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut reached = BTreeSet::from([0]);
    while reached.len() < g.order() {
        let next = (0..g.order()).find(|x| !reached.contains(x)).unwrap();
        gens.push(next);
        reached = generated(g, &gens);
    }
    gens
}

/// Extends an assignment on generators along Cayley-graph edges
/// `x → x·s`; consistency on every edge makes the result a homomorphism.
fn extend(a: &impl Mul, b: &impl Mul, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut table = vec![usize::MAX; a.order()];
    table[0] = 0;
    let mut frontier = vec![0];
    while let Some(x) = frontier.pop() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = a.mul(x, s);
            let v = b.mul(table[x], t);
            if table[y] == usize::MAX {
                table[y] = v;
                frontier.push(y);
            } else if table[y] != v {
                return None;
            }
        }
    }
    Some(table)
}

fn group_homs(a: &impl Mul, b: &impl Mul) -> Result<Vec<Vec<usize>>> {
    let gens = generators(a);
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let k = element_order(a, s);
            (0..b.order()).filter(|&y| k % element_order(b, y) == 0).collect()
        })
        .collect();
    let bound = candidates.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if bound > MAX_HOM as u128 * 16 {
        return Err(Error::TooLarge(format!("{bound} candidate generator assignments")));
    }
    if gens.is_empty() {
        return Ok(vec![vec![0]]);
    }
    Ok(candidates
        .iter()
        .multi_cartesian_product()
        .filter_map(|imgs| {
            let imgs: Vec<usize> = imgs.into_iter().copied().collect();
            extend(a, b, &gens, &imgs)
        })
        .collect())
}

fn factor_homs(d: &Factor, c: &Factor) -> Result<Vec<Vec<usize>>> {
    match d.as_cyclic() {
        Some(n) => Ok((0..c.order())
            .filter(|&y| n % element_order(c, y) == 0)
            .map(|y| {
                let mut acc = 0;
                (0..n)
                    .map(|_| {
                        let v = acc;
                        acc = c.add(acc, y);
                        v
                    })
                    .collect()
            })
            .collect()),
        None => group_homs(d, c),
    }
}

/// All structure-preserving maps `a → b`, without repetition, in a fixed
/// deterministic order.
pub fn hom_set(a: &FinObj, b: &FinObj) -> Result<Vec<FinMor>> {
    a.same_kind(b)?;
    match (&a.0, &b.0) {
        (Repr::Set(n), Repr::Set(m)) => {
            let count = (*m as u128).checked_pow(*n as u32).unwrap_or(u128::MAX);
            if count > MAX_HOM as u128 {
                return Err(Error::TooLarge(format!("{m}^{n} set maps")));
            }
            if *n == 0 {
                return Ok(vec![FinMor::from_table_unchecked(a.clone(), b.clone(), Vec::new())]);
            }
            Ok((0..*n)
                .map(|_| 0..*m)
                .multi_cartesian_product()
                .map(|t| FinMor::from_table_unchecked(a.clone(), b.clone(), t))
                .collect())
        }
        (Repr::Group(s), Repr::Group(t)) => Ok(group_homs(&**s, &**t)?
            .into_iter()
            .map(|t| FinMor::from_table_unchecked(a.clone(), b.clone(), t))
            .collect()),
        (Repr::Abelian(df), Repr::Abelian(cf)) => {
            // Hom out of a direct sum into a direct sum is the product of
            // the componentwise Hom groups
            let comps: Vec<Vec<Vec<usize>>> = df
                .iter()
                .flat_map(|d| cf.iter().map(move |c| (d, c)))
                .map(|(d, c)| factor_homs(d, c))
                .collect::<Result<_>>()?;
            let count = comps.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
            if count > MAX_HOM as u128 {
                return Err(Error::TooLarge(format!("{count} homomorphisms")));
            }
            if comps.is_empty() {
                let blocks = df.iter().map(|_| Vec::new()).collect();
                return Ok(vec![FinMor::from_blocks_unchecked(a.clone(), b.clone(), blocks)]);
            }
            let k = cf.len();
            Ok(comps
                .iter()
                .multi_cartesian_product()
                .map(|choice| {
                    let blocks = choice.chunks(k).map(|row| row.iter().map(|b| (*b).clone()).collect()).collect();
                    FinMor::from_blocks_unchecked(a.clone(), b.clone(), blocks)
                })
                .collect())
        }
        _ => unreachable!(),
    }
}

/// Number of maps `a → b` without materializing them where a closed form
/// is available (sets), otherwise by enumeration.
pub fn hom_count(a: &FinObj, b: &FinObj) -> Result<u128> {
    a.same_kind(b)?;
    match (&a.0, &b.0) {
        (Repr::Set(n), Repr::Set(m)) => {
            (*m as u128).checked_pow(*n as u32).ok_or_else(|| Error::TooLarge(format!("{m}^{n} set maps")))
        }
        _ => Ok(hom_set(a, b)?.len() as u128),
    }
}

/// An isomorphism `a → b` if one exists.
pub fn find_iso(a: &FinObj, b: &FinObj) -> Result<Option<FinMor>> {
    a.same_kind(b)?;
    if a.order() != b.order() {
        return Ok(None);
    }
    if a == b {
        return Ok(Some(FinMor::identity(a)));
    }
    match (&a.0, &b.0) {
        (Repr::Set(_), Repr::Set(_)) => unreachable!("sets of equal size are equal"),
        (Repr::Abelian(df), Repr::Abelian(cf)) => {
            if let Some(perm) = factor_permutation(df, cf) {
                let blocks = df
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        (0..cf.len())
                            .map(|j| if perm[i] == j { (0..f.order()).collect() } else { vec![0; f.order()] })
                            .collect()
                    })
                    .collect();
                return Ok(Some(FinMor::from_blocks_unchecked(a.clone(), b.clone(), blocks)));
            }
            a.enumerable_size()?;
            Ok(abelian_iso_search(a, b)?)
        }
        (Repr::Group(s), Repr::Group(t)) => Ok(group_homs(&**s, &**t)?
            .into_iter()
            .find(|tab| is_bijection(tab))
            .map(|tab| FinMor::from_table_unchecked(a.clone(), b.clone(), tab))),
        _ => unreachable!(),
    }
}

fn abelian_iso_search(a: &FinObj, b: &FinObj) -> Result<Option<FinMor>> {
    Ok(group_homs(a, b)?
        .into_iter()
        .find(|tab| is_bijection(tab))
        .map(|tab| FinMor::from_table_unchecked(a.clone(), b.clone(), tab)))
}

fn is_bijection(table: &[usize]) -> bool {
    let mut seen = vec![false; table.len()];
    table.iter().all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true))
}

/// A bijection of factor positions matching equal factors, if the two
/// factor lists agree up to order.
fn factor_permutation(df: &[Factor], cf: &[Factor]) -> Option<Vec<usize>> {
    if df.len() != cf.len() {
        return None;
    }
    let mut pool: HashMap<&Factor, Vec<usize>> = HashMap::new();
    for (j, c) in cf.iter().enumerate().rev() {
        pool.entry(c).or_default().push(j);
    }
    df.iter().map(|d| pool.get_mut(d).and_then(Vec::pop)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn hom_counts_match_closed_forms() {
        assert_eq!(hom_set(&FinObj::set(2), &FinObj::set(3)).unwrap().len(), 9);
        assert_eq!(hom_set(&FinObj::set(0), &FinObj::set(3)).unwrap().len(), 1);
        assert_eq!(hom_set(&FinObj::set(2), &FinObj::set(0)).unwrap().len(), 0);
        for m in 1..9 {
            for n in 1..9 {
                let homs = hom_set(&FinObj::cyclic(m), &FinObj::cyclic(n)).unwrap();
                assert_eq!(homs.len(), gcd(m, n), "Z/{m} -> Z/{n}");
                let g = hom_set(&FinObj::cyclic_group(m), &FinObj::cyclic_group(n)).unwrap();
                assert_eq!(g.len(), gcd(m, n));
            }
        }
    }

    #[test]
    fn homs_into_s3() {
        let s3 = FinObj::symmetric3();
        assert_eq!(hom_set(&FinObj::cyclic_group(2), &s3).unwrap().len(), 4);
        assert_eq!(hom_set(&FinObj::cyclic_group(3), &s3).unwrap().len(), 3);
        // automorphisms of S_3 are inner, six of them, and Hom(S_3, S_3)
        // adds the sign-type maps onto each order-two subgroup and zero
        assert_eq!(hom_set(&s3, &s3).unwrap().len(), 10);
    }

    #[test]
    fn iso_search_distinguishes_groups_of_order_8() {
        let d8 = FinObj::group(super::super::GroupTable::dihedral8());
        let q8 = FinObj::group(super::super::GroupTable::quaternion8());
        assert!(find_iso(&d8, &q8).unwrap().is_none());
        assert!(find_iso(&d8, &d8).unwrap().is_some());
        let v = FinObj::abelian(vec![Factor::cyclic(2).unwrap(), Factor::cyclic(4).unwrap()]);
        let w = FinObj::abelian(vec![Factor::cyclic(4).unwrap(), Factor::cyclic(2).unwrap()]);
        let iso = find_iso(&v, &w).unwrap().unwrap();
        assert!(iso.is_iso());
        assert!(find_iso(&FinObj::cyclic(8), &v).unwrap().is_none());
    }
}
