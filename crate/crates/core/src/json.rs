//! Serializable descriptors for the finite data: objects, maps, families,
//! truncated chains, cosheaves and bundles.

use serde::{Deserialize, Serialize};

use crate::bundle::ProBundle;
use crate::cosheaf::Cosheaf;
use crate::error::{mismatch, Result};
use crate::fam::{FamMor, FamObj};
use crate::fincat::{Factor, FinMor, FinObj, GroupTable, Kind};
use crate::prospace::ProSpace;
use crate::prosys::{ChainInfo, ProChain};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorDto {
    Cyclic(usize),
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FinObjDto {
    Set { size: usize },
    AbelianGroup { factors: Vec<FactorDto> },
    Group { table: Vec<Vec<usize>> },
}

impl From<&FinObj> for FinObjDto {
    fn from(a: &FinObj) -> Self {
        match a.kind() {
            Kind::Set => FinObjDto::Set { size: a.size().unwrap() },
            Kind::Group => FinObjDto::Group { table: a.group_table().unwrap().rows() },
            Kind::AbelianGroup => FinObjDto::AbelianGroup {
                factors: a
                    .factors()
                    .unwrap()
                    .iter()
                    .map(|f| match f.as_cyclic() {
                        Some(n) => FactorDto::Cyclic(n),
                        None => FactorDto::Table(f.rows()),
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<&FinObjDto> for FinObj {
    type Error = crate::Error;

    fn try_from(d: &FinObjDto) -> Result<Self> {
        Ok(match d {
            FinObjDto::Set { size } => FinObj::set(*size),
            FinObjDto::Group { table } => FinObj::group_from_rows(table)?,
            FinObjDto::AbelianGroup { factors } => FinObj::abelian(
                factors
                    .iter()
                    .map(|f| match f {
                        FactorDto::Cyclic(n) => Factor::cyclic(*n),
                        FactorDto::Table(rows) => Factor::table(GroupTable::from_rows(rows)?),
                    })
                    .collect::<Result<_>>()?,
            ),
        })
    }
}

/// Set and plain-group maps carry a label table, abelian maps a block
/// matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinMorDto {
    pub dom: FinObjDto,
    pub cod: FinObjDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<Vec<usize>>>>,
}

impl From<&FinMor> for FinMorDto {
    fn from(f: &FinMor) -> Self {
        Self {
            dom: f.dom().into(),
            cod: f.cod().into(),
            table: f.table_ref().map(<[usize]>::to_vec),
            blocks: f.blocks().map(<[Vec<Vec<usize>>]>::to_vec),
        }
    }
}

impl TryFrom<&FinMorDto> for FinMor {
    type Error = crate::Error;

    fn try_from(d: &FinMorDto) -> Result<Self> {
        let (dom, cod) = (FinObj::try_from(&d.dom)?, FinObj::try_from(&d.cod)?);
        match (&d.table, &d.blocks) {
            (Some(t), None) => FinMor::new(dom, cod, t.clone()),
            (None, Some(b)) => FinMor::from_blocks(dom, cod, b.clone()),
            _ => Err(mismatch("a map carries exactly one of table and blocks")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamObjDto {
    pub kind: Kind,
    pub fibres: Vec<FinObjDto>,
}

impl From<&FamObj> for FamObjDto {
    fn from(a: &FamObj) -> Self {
        Self { kind: a.kind(), fibres: a.fibres().iter().map(Into::into).collect() }
    }
}

impl TryFrom<&FamObjDto> for FamObj {
    type Error = crate::Error;

    fn try_from(d: &FamObjDto) -> Result<Self> {
        FamObj::new(d.kind, d.fibres.iter().map(FinObj::try_from).collect::<Result<_>>()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamMorDto {
    pub dom: FamObjDto,
    pub cod: FamObjDto,
    pub base: Vec<usize>,
    pub fibre_maps: Vec<FinMorDto>,
}

impl From<&FamMor> for FamMorDto {
    fn from(m: &FamMor) -> Self {
        Self {
            dom: m.dom().into(),
            cod: m.cod().into(),
            base: m.base().to_vec(),
            fibre_maps: m.fibre_maps().iter().map(Into::into).collect(),
        }
    }
}

impl TryFrom<&FamMorDto> for FamMor {
    type Error = crate::Error;

    fn try_from(d: &FamMorDto) -> Result<Self> {
        FamMor::new(
            FamObj::try_from(&d.dom)?,
            FamObj::try_from(&d.cod)?,
            d.base.clone(),
            d.fibre_maps.iter().map(FinMor::try_from).collect::<Result<_>>()?,
        )
    }
}

/// Levels `0..=truncation` of a space: sizes and transition tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDto {
    pub sizes: Vec<usize>,
    pub transitions: Vec<Vec<usize>>,
    pub info: ChainInfo,
}

impl SpaceDto {
    pub fn export(x: &ProSpace, truncation: usize) -> Result<Self> {
        Ok(Self {
            sizes: (0..=truncation).map(|n| x.size(n)).collect(),
            transitions: (0..truncation).map(|n| x.chain().transition(n).table()).collect::<Result<_>>()?,
            info: ChainInfo { epic: x.is_surjective(), ..x.chain().info() },
        })
    }

    /// The recorded levels with a constant tail.
    pub fn import(&self) -> Result<ProSpace> {
        let levels: Vec<FinObj> = self.sizes.iter().map(|&n| FinObj::set(n)).collect();
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .map(|(n, t)| FinMor::new(levels[n + 1].clone(), levels[n].clone(), t.clone()))
            .collect::<Result<_>>()?;
        ProSpace::from_chain(ProChain::from_levels(levels, transitions)?)
    }
}

/// Levels `0..=truncation` of a cosheaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosheafDto {
    pub kind: Kind,
    pub levels: Vec<FamObjDto>,
    pub transitions: Vec<FamMorDto>,
    pub info: ChainInfo,
    pub base_surjective: bool,
}

impl CosheafDto {
    pub fn export(a: &Cosheaf, truncation: usize) -> Self {
        Self {
            kind: a.kind(),
            levels: (0..=truncation).map(|n| (&a.level(n)).into()).collect(),
            transitions: (0..truncation).map(|n| (&a.transition(n)).into()).collect(),
            info: a.chain().info(),
            base_surjective: a.base().is_surjective(),
        }
    }

    /// The recorded levels with a constant tail.
    pub fn import(&self) -> Result<Cosheaf> {
        let levels = self.levels.iter().map(FamObj::try_from).collect::<Result<_>>()?;
        let transitions = self.transitions.iter().map(FamMor::try_from).collect::<Result<_>>()?;
        let chain = ProChain::from_levels(levels, transitions)?;
        Cosheaf::with_base_surjectivity(chain, self.base_surjective)
    }
}

/// Levels `0..=truncation` of a bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDto {
    pub total: SpaceDto,
    pub base: SpaceDto,
    pub projections: Vec<Vec<usize>>,
}

impl BundleDto {
    pub fn export(p: &ProBundle, truncation: usize) -> Result<Self> {
        Ok(Self {
            total: SpaceDto::export(&p.total, truncation)?,
            base: SpaceDto::export(&p.base, truncation)?,
            projections: (0..=truncation).map(|n| p.projection_table(n)).collect(),
        })
    }

    pub fn import(&self) -> Result<ProBundle> {
        let (total, base) = (self.total.import()?, self.base.import()?);
        let last = self.projections.len().checked_sub(1).ok_or_else(|| mismatch("bundle without levels"))?;
        let ps = self.projections.clone();
        let p = ProBundle::new(total, base, move |n| ps[n.min(last)].clone());
        for n in 0..=last {
            p.projection.at(n);
        }
        if let Some(k) = p.check(last)? {
            return Err(mismatch(format!("bundle square {k} does not commute")));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::Factor;

    #[test]
    fn objects_and_maps_round_trip() {
        let objs = [
            FinObj::set(3),
            FinObj::symmetric3(),
            FinObj::abelian(vec![Factor::cyclic(2).unwrap(), Factor::cyclic(4).unwrap()]),
        ];
        for a in &objs {
            let d = FinObjDto::from(a);
            let s = serde_json::to_string(&d).unwrap();
            let back: FinObjDto = serde_json::from_str(&s).unwrap();
            assert_eq!(&FinObj::try_from(&back).unwrap(), a);
            let id = FinMor::identity(a);
            assert_eq!(FinMor::try_from(&FinMorDto::from(&id)).unwrap(), id);
        }
    }

    #[test]
    fn cosheaf_round_trip() {
        let a = Cosheaf::constant(&FinObj::cyclic(2), &ProSpace::cantor());
        let d = CosheafDto::export(&a, 3);
        let s = serde_json::to_string(&d).unwrap();
        let b = serde_json::from_str::<CosheafDto>(&s).unwrap().import().unwrap();
        for n in 0..=3 {
            assert_eq!(a.level(n), b.level(n));
        }
        assert_eq!(a.transition(2), b.transition(2));
    }
}
