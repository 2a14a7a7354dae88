use std::fmt;
use std::sync::Arc;

use super::object::{decode, encode, FinObj, Kind, Repr};
use super::table::Factor;
use crate::error::{mismatch, Error, Result};

/// A morphism of one of the finite base categories.
///
/// Set and plain-group maps are label tables. Maps between abelian direct
/// sums are block matrices: `blocks[i][j]` is the component from domain
/// factor `i` to codomain factor `j`, so the value on a sum is the sum of
/// the components. Both encodings are unique, so structural equality is
/// equality of maps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinMor {
    pub(crate) dom: FinObj,
    pub(crate) cod: FinObj,
    pub(crate) data: MorData,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum MorData {
    Table(Arc<Vec<usize>>),
    Blocks(Arc<Vec<Vec<Vec<usize>>>>),
}

impl FinMor {
    /// Validating constructor from a label table of length `|dom|`.
    pub fn new(dom: FinObj, cod: FinObj, table: Vec<usize>) -> Result<Self> {
        dom.same_kind(&cod)?;
        let n = dom.enumerable_size()?;
        let m = cod.enumerable_size()?;
        if table.len() != n {
            return Err(mismatch(format!("table has length {}, domain has {n} elements", table.len())));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= m) {
            return Err(Error::OutOfRange { label: bad, size: m });
        }
        if dom.kind().is_group() {
            for a in 0..n {
                for b in 0..n {
                    let lhs = table[dom.op(a, b).unwrap()];
                    let rhs = cod.op(table[a], table[b]).unwrap();
                    if lhs != rhs {
                        return Err(Error::NotHomomorphism(vec![a, b]));
                    }
                }
            }
        }
        Ok(Self::from_table_unchecked(dom, cod, table))
    }

    /// Builds a map from a label table known to be structure preserving.
    pub(crate) fn from_table_unchecked(dom: FinObj, cod: FinObj, table: Vec<usize>) -> Self {
        match (&dom.0, &cod.0) {
            (Repr::Abelian(df), Repr::Abelian(cf)) => {
                let blocks = df
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let mut row = vec![Vec::with_capacity(f.order()); cf.len()];
                        for a in 0..f.order() {
                            let coords = decode(cf, table[embed_label(df, i, a)]);
                            for (j, c) in coords.into_iter().enumerate() {
                                row[j].push(c);
                            }
                        }
                        row
                    })
                    .collect();
                Self { dom, cod, data: MorData::Blocks(Arc::new(blocks)) }
            }
            _ => Self { dom, cod, data: MorData::Table(Arc::new(table)) },
        }
    }

    /// Validating constructor for maps between abelian direct sums.
    pub fn from_blocks(dom: FinObj, cod: FinObj, blocks: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let (df, cf) = match (dom.factors(), cod.factors()) {
            (Some(d), Some(c)) => (d, c),
            _ => return Err(mismatch("block matrices describe maps of abelian direct sums")),
        };
        if blocks.len() != df.len() || blocks.iter().any(|r| r.len() != cf.len()) {
            return Err(mismatch("block matrix shape does not match the factor lists"));
        }
        for (i, row) in blocks.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                check_factor_hom(&df[i], &cf[j], b)?;
            }
        }
        Ok(Self { dom: dom.clone(), cod: cod.clone(), data: MorData::Blocks(Arc::new(blocks)) })
    }

    pub(crate) fn from_blocks_unchecked(dom: FinObj, cod: FinObj, blocks: Vec<Vec<Vec<usize>>>) -> Self {
        Self { dom, cod, data: MorData::Blocks(Arc::new(blocks)) }
    }

    pub fn identity(obj: &FinObj) -> Self {
        match &obj.0 {
            Repr::Abelian(fs) => {
                let blocks = (0..fs.len())
                    .map(|i| {
                        (0..fs.len())
                            .map(|j| if i == j { (0..fs[i].order()).collect() } else { vec![0; fs[i].order()] })
                            .collect()
                    })
                    .collect();
                Self::from_blocks_unchecked(obj.clone(), obj.clone(), blocks)
            }
            _ => {
                let n = obj.size().expect("sets and table groups are enumerable");
                Self::from_table_unchecked(obj.clone(), obj.clone(), (0..n).collect())
            }
        }
    }

    /// The map into the terminal object.
    pub fn to_terminal(obj: &FinObj) -> Self {
        let t = FinObj::terminal(obj.kind());
        match (&obj.0, &t.0) {
            (Repr::Abelian(fs), _) => {
                Self::from_blocks_unchecked(obj.clone(), t, fs.iter().map(|_| Vec::new()).collect())
            }
            _ => {
                let n = obj.size().unwrap();
                Self::from_table_unchecked(obj.clone(), t, vec![0; n])
            }
        }
    }

    /// The map out of the initial object.
    pub fn from_initial(obj: &FinObj) -> Self {
        let i = FinObj::initial(obj.kind());
        match &obj.0 {
            Repr::Abelian(_) => Self::from_blocks_unchecked(i, obj.clone(), Vec::new()),
            Repr::Set(_) => Self::from_table_unchecked(i, obj.clone(), Vec::new()),
            Repr::Group(_) => Self::from_table_unchecked(i, obj.clone(), vec![0]),
        }
    }

    /// The zero homomorphism between group objects.
    pub fn zero(dom: &FinObj, cod: &FinObj) -> Result<Self> {
        dom.same_kind(cod)?;
        match (&dom.0, &cod.0) {
            (Repr::Abelian(df), Repr::Abelian(cf)) => {
                let blocks = df.iter().map(|f| vec![vec![0; f.order()]; cf.len()]).collect();
                Ok(Self::from_blocks_unchecked(dom.clone(), cod.clone(), blocks))
            }
            (Repr::Group(t), Repr::Group(_)) => {
                Ok(Self::from_table_unchecked(dom.clone(), cod.clone(), vec![0; t.order()]))
            }
            _ => Err(Error::Precondition("zero maps exist only between groups".into())),
        }
    }

    /// Constant map of sets.
    pub fn constant(dom: &FinObj, cod: &FinObj, value: usize) -> Result<Self> {
        if dom.kind() != Kind::Set || cod.kind() != Kind::Set {
            return Err(Error::Precondition("constant maps are set maps".into()));
        }
        let n = dom.size().unwrap();
        let m = cod.size().unwrap();
        if value >= m {
            return Err(Error::OutOfRange { label: value, size: m });
        }
        Ok(Self::from_table_unchecked(dom.clone(), cod.clone(), vec![value; n]))
    }

    pub fn dom(&self) -> &FinObj {
        &self.dom
    }

    pub fn cod(&self) -> &FinObj {
        &self.cod
    }

    pub fn kind(&self) -> Kind {
        self.dom.kind()
    }

    /// Label table, available whenever both ends are enumerable.
    pub fn table(&self) -> Result<Vec<usize>> {
        match &self.data {
            MorData::Table(t) => Ok(t.to_vec()),
            MorData::Blocks(_) => {
                let n = self.dom.enumerable_size()?;
                self.cod.enumerable_size()?;
                Ok((0..n).map(|x| self.apply(x)).collect())
            }
        }
    }

    pub(crate) fn table_ref(&self) -> Option<&[usize]> {
        match &self.data {
            MorData::Table(t) => Some(t),
            MorData::Blocks(_) => None,
        }
    }

    pub(crate) fn blocks(&self) -> Option<&[Vec<Vec<usize>>]> {
        match &self.data {
            MorData::Blocks(b) => Some(b),
            MorData::Table(_) => None,
        }
    }

    /// Value at a label. Panics if the label is out of range or an abelian
    /// end is too large to carry `usize` labels.
    pub fn apply(&self, x: usize) -> usize {
        match &self.data {
            MorData::Table(t) => t[x],
            MorData::Blocks(_) => {
                let df = self.dom.factors().unwrap();
                let cf = self.cod.factors().unwrap();
                encode(cf, &self.apply_coords(&decode(df, x)))
            }
        }
    }

    /// Value on factor coordinates of an abelian domain element.
    pub fn apply_coords(&self, coords: &[usize]) -> Vec<usize> {
        let blocks = self.blocks().expect("coordinate evaluation needs abelian ends");
        let cf = self.cod.factors().unwrap();
        let mut out = vec![0; cf.len()];
        for (row, &x) in blocks.iter().zip(coords) {
            for (j, b) in row.iter().enumerate() {
                out[j] = cf[j].add(out[j], b[x]);
            }
        }
        out
    }

    /// Image of the element `a` of domain factor `i`, as codomain coordinates.
    pub(crate) fn factor_image(&self, i: usize, a: usize) -> Vec<usize> {
        self.blocks().unwrap()[i].iter().map(|b| b[a]).collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FinMor) -> Result<FinMor> {
        compose(g, self)
    }

    pub(crate) fn is_zero_block(b: &[usize]) -> bool {
        b.iter().all(|&v| v == 0)
    }

    /// For a block matrix in which every domain factor has at most one
    /// nonzero component and distinct factors land in distinct codomain
    /// factors, the column of each domain factor (or `None` for a zero row).
    pub(crate) fn monomial_columns(&self) -> Option<Vec<Option<usize>>> {
        let blocks = self.blocks()?;
        let mut used = vec![false; self.cod.factors().unwrap().len()];
        let mut cols = Vec::with_capacity(blocks.len());
        for row in blocks {
            let mut nz = row.iter().enumerate().filter(|(_, b)| !Self::is_zero_block(b));
            let col = nz.next().map(|(j, _)| j);
            if nz.next().is_some() {
                return None;
            }
            if let Some(j) = col {
                if used[j] {
                    return None;
                }
                used[j] = true;
            }
            cols.push(col);
        }
        Some(cols)
    }
}

/// Label of the element `a` of factor `i` embedded in the direct sum.
pub(crate) fn embed_label(fs: &[Factor], i: usize, a: usize) -> usize {
    let mut coords = vec![0; fs.len()];
    coords[i] = a;
    encode(fs, &coords)
}

fn check_factor_hom(d: &Factor, c: &Factor, b: &[usize]) -> Result<()> {
    if b.len() != d.order() {
        return Err(mismatch(format!("component has length {}, factor has order {}", b.len(), d.order())));
    }
    if let Some(&v) = b.iter().find(|&&v| v >= c.order()) {
        return Err(Error::OutOfRange { label: v, size: c.order() });
    }
    match d.as_cyclic() {
        // a map out of a cyclic group is fixed by the image of 1
        Some(n) => {
            let g = if n > 1 { b[1] } else { 0 };
            let mut acc = 0;
            for (x, &v) in b.iter().enumerate() {
                if v != acc {
                    return Err(Error::NotHomomorphism(vec![x]));
                }
                acc = c.add(acc, g);
            }
            if acc != b[0] || b[0] != 0 {
                return Err(Error::NotHomomorphism(vec![0]));
            }
        }
        None => {
            for x in 0..d.order() {
                for y in 0..d.order() {
                    if b[d.add(x, y)] != c.add(b[x], b[y]) {
                        return Err(Error::NotHomomorphism(vec![x, y]));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `g ∘ f`.
pub fn compose(g: &FinMor, f: &FinMor) -> Result<FinMor> {
    if f.cod != g.dom {
        return Err(mismatch(format!("cannot compose {:?} -> {:?} after {:?} -> {:?}", g.dom, g.cod, f.dom, f.cod)));
    }
    let data = match (&f.data, &g.data) {
        (MorData::Table(ft), MorData::Table(gt)) => MorData::Table(Arc::new(ft.iter().map(|&x| gt[x]).collect())),
        (MorData::Blocks(fb), MorData::Blocks(gb)) => {
            let df = f.dom.factors().unwrap();
            let cf = g.cod.factors().unwrap();
            let blocks = fb
                .iter()
                .enumerate()
                .map(|(i, frow)| {
                    (0..cf.len())
                        .map(|k| {
                            (0..df[i].order())
                                .map(|a| {
                                    frow.iter().enumerate().fold(0, |acc, (j, fb)| cf[k].add(acc, gb[j][k][fb[a]]))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect();
            MorData::Blocks(Arc::new(blocks))
        }
        _ => unreachable!("maps with equal objects share an encoding"),
    };
    Ok(FinMor { dom: f.dom.clone(), cod: g.cod.clone(), data })
}

impl fmt::Debug for FinMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?} ", self.dom, self.cod)?;
        match &self.data {
            MorData::Table(t) => write!(f, "{:?}", t.as_slice()),
            MorData::Blocks(b) => write!(f, "blocks {:?}", b.as_slice()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_composition_matches_tables() {
        let z2 = FinObj::cyclic(2);
        let z4 = FinObj::cyclic(4);
        let f = FinMor::new(z2.clone(), z4.clone(), vec![0, 2]).unwrap();
        let g = FinMor::new(z4, z2, vec![0, 1, 0, 1]).unwrap();
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf.table().unwrap(), vec![0, 0]);
    }

    #[test]
    fn tables_of_sums_round_trip_through_blocks() {
        let v = FinObj::abelian(vec![Factor::cyclic(2).unwrap(), Factor::cyclic(2).unwrap()]);
        let swap = FinMor::new(v.clone(), v.clone(), vec![0, 2, 1, 3]).unwrap();
        assert_eq!(swap.blocks().unwrap()[0][1], vec![0, 1]);
        assert_eq!(compose(&swap, &swap).unwrap(), FinMor::identity(&v));
    }

    #[test]
    fn rejects_non_homomorphisms() {
        let z4 = FinObj::cyclic(4);
        assert!(matches!(FinMor::new(z4.clone(), z4.clone(), vec![0, 1, 1, 0]), Err(Error::NotHomomorphism(_))));
        let s3 = FinObj::symmetric3();
        let z2 = FinObj::cyclic_group(2);
        // sign map is a homomorphism, its negation is not
        assert!(FinMor::new(s3.clone(), z2.clone(), vec![0, 1, 1, 1, 0, 0]).is_ok());
        assert!(FinMor::new(s3, z2, vec![1, 0, 0, 0, 1, 1]).is_err());
        assert!(FinMor::from_blocks(FinObj::cyclic(3), FinObj::cyclic(3), vec![vec![vec![0, 1, 1]]]).is_err());
    }

    #[test]
    fn terminal_and_initial_maps() {
        let v = FinObj::abelian(vec![Factor::cyclic(3).unwrap()]);
        let t = FinMor::to_terminal(&v);
        assert_eq!(t.table().unwrap(), vec![0, 0, 0]);
        let i = FinMor::from_initial(&v);
        assert_eq!(i.table().unwrap(), vec![0]);
        assert_eq!(compose(&t, &i).unwrap(), FinMor::identity(&FinObj::initial(Kind::AbelianGroup)));
    }
}
