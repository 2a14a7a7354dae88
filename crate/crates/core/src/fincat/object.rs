use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::table::{Factor, GroupTable, MAX_ENUMERATION};
use crate::error::{Error, Result};

/// The shipped finite regular base categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Set,
    AbelianGroup,
    Group,
}

impl Kind {
    /// Whether the instance carries finite coproducts in `D`. Plain finite
    /// groups do not: free products of nontrivial groups are infinite.
    pub fn has_coproducts(self) -> bool {
        !matches!(self, Kind::Group)
    }

    pub fn is_group(self) -> bool {
        !matches!(self, Kind::Set)
    }

    pub(crate) fn expect(self, other: Kind) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::KindMismatch { expected: self, found: other })
        }
    }
}

/// An object of one of the finite base categories.
///
/// Sets are plain cardinalities. Groups carry a multiplication table with
/// the identity at label 0. Abelian groups are finite direct sums of small
/// factors; element labels are mixed-radix with the first factor most
/// significant, so a sum of one factor is exactly its table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinObj(pub(crate) Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum Repr {
    Set(usize),
    Group(Arc<GroupTable>),
    Abelian(Arc<Vec<Factor>>),
}

impl FinObj {
    pub fn set(n: usize) -> Self {
        Self(Repr::Set(n))
    }

    pub fn group(table: GroupTable) -> Self {
        Self(Repr::Group(Arc::new(table)))
    }

    /// Validating constructor for a plain group given by table rows.
    pub fn group_from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        Ok(Self::group(GroupTable::from_rows(rows)?))
    }

    /// `Z/n` in the plain-group instance.
    pub fn cyclic_group(n: usize) -> Self {
        Self::group(GroupTable::cyclic(n))
    }

    pub fn symmetric3() -> Self {
        Self::group(GroupTable::symmetric3())
    }

    /// `Z/n` in the abelian-group instance.
    pub fn cyclic(n: usize) -> Self {
        if n == 1 {
            return Self::abelian(Vec::new());
        }
        Self::abelian(vec![Factor::cyclic(n).expect("cyclic order within limits")])
    }

    pub fn abelian(factors: Vec<Factor>) -> Self {
        Self(Repr::Abelian(Arc::new(factors)))
    }

    pub fn abelian_from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        Ok(Self::abelian(vec![Factor::table(GroupTable::from_rows(rows)?)?]))
    }

    /// Initial object: the empty set, or the trivial group.
    pub fn initial(kind: Kind) -> Self {
        match kind {
            Kind::Set => Self::set(0),
            _ => Self::trivial(kind),
        }
    }

    /// Terminal object: a point, or the trivial group.
    pub fn terminal(kind: Kind) -> Self {
        match kind {
            Kind::Set => Self::set(1),
            _ => Self::trivial(kind),
        }
    }

    fn trivial(kind: Kind) -> Self {
        match kind {
            Kind::Set => Self::set(1),
            Kind::Group => Self::cyclic_group(1),
            Kind::AbelianGroup => Self::abelian(Vec::new()),
        }
    }

    pub fn kind(&self) -> Kind {
        match &self.0 {
            Repr::Set(_) => Kind::Set,
            Repr::Group(_) => Kind::Group,
            Repr::Abelian(_) => Kind::AbelianGroup,
        }
    }

    /// Carrier cardinality. Abelian direct sums may exceed `usize`; the
    /// value saturates at `u128::MAX`.
    pub fn order(&self) -> u128 {
        match &self.0 {
            Repr::Set(n) => *n as u128,
            Repr::Group(t) => t.order() as u128,
            Repr::Abelian(fs) => fs.iter().fold(1u128, |acc, f| acc.saturating_mul(f.order() as u128)),
        }
    }

    /// Carrier size if the object is small enough to enumerate. Sets and
    /// plain groups always are.
    pub fn size(&self) -> Option<usize> {
        match &self.0 {
            Repr::Set(n) => Some(*n),
            Repr::Group(t) => Some(t.order()),
            Repr::Abelian(_) => {
                let n = self.order();
                (n <= MAX_ENUMERATION as u128).then_some(n as usize)
            }
        }
    }

    pub(crate) fn enumerable_size(&self) -> Result<usize> {
        self.size()
            .ok_or_else(|| Error::TooLarge(format!("carrier of order {} exceeds {MAX_ENUMERATION}", self.order())))
    }

    pub fn factors(&self) -> Option<&[Factor]> {
        match &self.0 {
            Repr::Abelian(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn group_table(&self) -> Option<&GroupTable> {
        match &self.0 {
            Repr::Group(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.kind().is_group() && self.order() == 1
    }

    /// Group operation on labels; `None` for sets.
    pub fn op(&self, a: usize, b: usize) -> Option<usize> {
        match &self.0 {
            Repr::Set(_) => None,
            Repr::Group(t) => Some(t.mul(a, b)),
            Repr::Abelian(fs) => {
                let x = decode(fs, a);
                let y = decode(fs, b);
                let z: Vec<usize> = fs.iter().zip(x.iter().zip(&y)).map(|(f, (p, q))| f.add(*p, *q)).collect();
                Some(encode(fs, &z))
            }
        }
    }

    pub fn inverse(&self, a: usize) -> Option<usize> {
        match &self.0 {
            Repr::Set(_) => None,
            Repr::Group(t) => Some(t.inv(a)),
            Repr::Abelian(fs) => {
                let x: Vec<usize> = decode(fs, a).iter().zip(fs.iter()).map(|(p, f)| f.neg(*p)).collect();
                Some(encode(fs, &x))
            }
        }
    }

    /// Full row-major operation table for an enumerable group object.
    pub fn op_table(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.size()?;
        if !self.kind().is_group() {
            return None;
        }
        Some((0..n).map(|a| (0..n).map(|b| self.op(a, b).unwrap()).collect()).collect())
    }

    pub(crate) fn same_kind(&self, other: &FinObj) -> Result<()> {
        self.kind().expect(other.kind())
    }
}

/// Mixed-radix decode of an abelian label into factor coordinates.
pub(crate) fn decode(fs: &[Factor], mut label: usize) -> Vec<usize> {
    let mut out = vec![0; fs.len()];
    for (slot, f) in out.iter_mut().zip(fs).rev() {
        *slot = label % f.order();
        label /= f.order();
    }
    out
}

pub(crate) fn encode(fs: &[Factor], coords: &[usize]) -> usize {
    coords.iter().zip(fs).fold(0, |acc, (c, f)| acc * f.order() + c)
}

impl fmt::Debug for FinObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Set(n) => write!(f, "Set({n})"),
            Repr::Group(t) => write!(f, "Group(order {})", t.order()),
            Repr::Abelian(fs) => {
                write!(f, "Ab[")?;
                for (i, fac) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    match fac.as_cyclic() {
                        Some(n) => write!(f, "Z/{n}")?,
                        None => write!(f, "T{}", fac.order())?,
                    }
                }
                write!(f, "]")
            }
        }
    }
}

impl fmt::Display for FinObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_labels_are_mixed_radix() {
        let g = FinObj::abelian(vec![Factor::cyclic(2).unwrap(), Factor::cyclic(3).unwrap()]);
        assert_eq!(g.order(), 6);
        // (1,2) has label 1*3 + 2
        assert_eq!(g.op(3, 2), Some(5));
        assert_eq!(g.op(5, 5), Some(1)); // (0,1)
        assert_eq!(g.inverse(5), Some(4)); // -(1,2) = (1,1)
    }

    #[test]
    fn initial_and_terminal() {
        assert_eq!(FinObj::initial(Kind::Set).order(), 0);
        assert_eq!(FinObj::terminal(Kind::Set).order(), 1);
        assert!(FinObj::initial(Kind::Group).is_trivial());
        assert!(FinObj::terminal(Kind::AbelianGroup).is_trivial());
    }

    #[test]
    fn huge_sums_report_order_but_refuse_enumeration() {
        let z2 = Factor::cyclic(2).unwrap();
        let big = FinObj::abelian(vec![z2; 64]);
        assert_eq!(big.order(), 1u128 << 64);
        assert!(big.size().is_none());
        assert!(matches!(big.enumerable_size(), Err(Error::TooLarge(_))));
    }
}
