use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest group order accepted from an explicit multiplication table.
pub const MAX_GROUP_ORDER: usize = 24;

/// Largest carrier that element-wise algorithms (images, equalizers, Hom
/// enumeration, isomorphism search) will materialize.
pub const MAX_ENUMERATION: usize = 1 << 10;

/// Multiplication table of a finite group with the identity at label 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupTable {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

impl GroupTable {
    /// Validates a row-major table: closure, identity at 0, inverses and
    /// associativity (exhaustive loop).
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("a group has at least one element".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::TooLarge(format!("group of order {n} exceeds {MAX_GROUP_ORDER}")));
        }
        let mut mul = Vec::with_capacity(n * n);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {a} has length {}", row.len())));
            }
            for &c in row {
                if c >= n {
                    return Err(Error::OutOfRange { label: c, size: n });
                }
                mul.push(c);
            }
        }
        let table = Self::from_mul(n, mul)?;
        table.check_associative()?;
        Ok(table)
    }

    /// Builds a table from a closed multiplication without checking
    /// associativity. Internal constructions (subgroups, products) of valid
    /// groups go through here.
    pub(crate) fn from_fn_unchecked(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut mul = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul.push(f(a, b));
            }
        }
        Self::from_mul(n, mul).expect("internal group construction is closed with identity 0")
    }

    fn from_mul(n: usize, mul: Vec<usize>) -> Result<Self> {
        for a in 0..n {
            if mul[a] != a || mul[a * n] != a {
                return Err(Error::InvalidTable(format!("label 0 is not an identity for {a}")));
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            if let Some(b) = (0..n).find(|&b| mul[a * n + b] == 0) {
                if mul[b * n + a] != 0 {
                    return Err(Error::InvalidTable(format!("{b} is a right but not a left inverse of {a}")));
                }
                inv[a] = b;
            } else {
                return Err(Error::InvalidTable(format!("{a} has no inverse")));
            }
        }
        Ok(Self { order: n, mul, inv })
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::InvalidTable(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group of order 0");
        Self::from_fn_unchecked(n, |a, b| (a + b) % n)
    }

    /// The symmetric group on three letters. Labels: 0 = id, 1 = (12),
    /// 2 = (13), 3 = (23), 4 = (123), 5 = (132).
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        Self::from_permutations(&perms)
    }

    /// Dihedral group of order 8 as permutations of the square's corners.
    pub fn dihedral8() -> Self {
        let r = [1usize, 2, 3, 0];
        let s = [0usize, 3, 2, 1];
        let mut elems: Vec<[usize; 4]> = vec![[0, 1, 2, 3]];
        let mut frontier = elems.clone();
        while let Some(p) = frontier.pop() {
            for g in [r, s] {
                let q = [g[p[0]], g[p[1]], g[p[2]], g[p[3]]];
                if !elems.contains(&q) {
                    elems.push(q);
                    frontier.push(q);
                }
            }
        }
        Self::from_permutations(&elems)
    }

    /// Quaternion group of order 8. Labels 0..8 stand for
    /// 1, -1, i, -i, j, -j, k, -k.
    pub fn quaternion8() -> Self {
        // unit index u in {1,i,j,k} and a sign bit, label = 2u + sign
        let unit_mul = |u: usize, v: usize| -> (usize, bool) {
            match (u, v) {
                (0, x) | (x, 0) => (x, false),
                (a, b) if a == b => (0, true),
                (1, 2) => (3, false),
                (2, 3) => (1, false),
                (3, 1) => (2, false),
                (2, 1) => (3, true),
                (3, 2) => (1, true),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        };
        Self::from_fn_unchecked(8, |a, b| {
            let (u, neg) = unit_mul(a / 2, b / 2);
            let sign = (a % 2) ^ (b % 2) ^ usize::from(neg);
            2 * u + sign
        })
    }

    fn from_permutations<const K: usize>(perms: &[[usize; K]]) -> Self {
        let n = perms.len();
        let index = |p: &[usize; K]| perms.iter().position(|q| q == p).expect("closed");
        // a*b means apply b first, then a
        Self::from_fn_unchecked(n, |a, b| {
            let mut c = [0; K];
            for (i, slot) in c.iter_mut().enumerate() {
                *slot = perms[a][perms[b][i]];
            }
            index(&c)
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(<[usize]>::to_vec).collect()
    }
}

/// One summand of an abelian-group object.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor(FactorRepr);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum FactorRepr {
    Cyclic(usize),
    Table(Arc<GroupTable>),
}

impl Factor {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ENUMERATION {
            return Err(Error::TooLarge(format!("cyclic factor of order {n}")));
        }
        Ok(Self(FactorRepr::Cyclic(n)))
    }

    pub fn table(table: GroupTable) -> Result<Self> {
        if !table.is_commutative() {
            return Err(Error::InvalidTable("abelian factor table is not commutative".into()));
        }
        Ok(Self(FactorRepr::Table(Arc::new(table))))
    }

    pub(crate) fn table_unchecked(table: GroupTable) -> Self {
        Self(FactorRepr::Table(Arc::new(table)))
    }

    pub fn order(&self) -> usize {
        match &self.0 {
            FactorRepr::Cyclic(n) => *n,
            FactorRepr::Table(t) => t.order(),
        }
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        match &self.0 {
            FactorRepr::Cyclic(n) => (a + b) % n,
            FactorRepr::Table(t) => t.mul(a, b),
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        match &self.0 {
            FactorRepr::Cyclic(n) => (n - a) % n,
            FactorRepr::Table(t) => t.inv(a),
        }
    }

    /// `Some(n)` when the factor is stored as the standard cyclic group.
    pub fn as_cyclic(&self) -> Option<usize> {
        match &self.0 {
            FactorRepr::Cyclic(n) => Some(*n),
            FactorRepr::Table(_) => None,
        }
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|a| (0..n).map(|b| self.add(a, b)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables_are_groups() {
        for t in [GroupTable::symmetric3(), GroupTable::dihedral8(), GroupTable::quaternion8(), GroupTable::cyclic(6)] {
            let rows = t.rows();
            let again = GroupTable::from_rows(&rows).unwrap();
            assert_eq!(again, t);
        }
    }

    #[test]
    fn orders_and_commutativity() {
        assert_eq!(GroupTable::symmetric3().order(), 6);
        assert!(!GroupTable::symmetric3().is_commutative());
        assert_eq!(GroupTable::dihedral8().order(), 8);
        assert!(!GroupTable::dihedral8().is_commutative());
        assert!(!GroupTable::quaternion8().is_commutative());
        assert!(GroupTable::cyclic(5).is_commutative());
    }

    #[test]
    fn rejects_broken_tables() {
        // not associative: a magma with identity and inverses on 3 elements
        let rows = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 0]];
        assert!(matches!(GroupTable::from_rows(&rows), Err(Error::InvalidTable(_))));
        let rows = vec![vec![1, 0], vec![0, 1]];
        assert!(GroupTable::from_rows(&rows).is_err());
        assert!(GroupTable::from_rows(&[vec![0, 5]]).is_err());
    }

    #[test]
    fn order_cap_applies_to_explicit_tables() {
        let t = GroupTable::cyclic(25);
        assert!(matches!(GroupTable::from_rows(&t.rows()), Err(Error::TooLarge(_))));
    }
}
