//! Export of fixtures as JSON or DOT, and import of exported JSON.

use anyhow::{bail, Result};
use procosheaf::bundle::ProBundle;
use procosheaf::cosheaf::Cosheaf;
use procosheaf::fam::FamMor;
use procosheaf::json::{BundleDto, CosheafDto, FamMorDto, SpaceDto};
use procosheaf::prospace::ProSpace;
use serde::{Deserialize, Serialize};

use crate::fixtures::{Loaded, Registry};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
}

/// The JSON envelope written by `export`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Exported {
    Space(SpaceDto),
    Cosheaf(CosheafDto),
    Bundle(BundleDto),
    Morphism(FamMorDto),
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone)]
pub enum Imported {
    Space(ProSpace),
    Cosheaf(Cosheaf),
    Bundle(ProBundle),
    Morphism(FamMor),
}

pub fn export_fixture(registry: &Registry, name: &str, format: ExportFormat, truncation: usize) -> Result<String> {
    let loaded = registry.load_fixture(name)?;
    match format {
        ExportFormat::Dot => Ok(match &loaded {
            Loaded::Space(x) => x.to_dot(truncation),
            Loaded::Thread { space, .. } => space.to_dot(truncation),
            Loaded::Cosheaf(a) => a.to_dot(truncation),
            Loaded::Bundle(p) => p.to_dot(truncation),
            Loaded::GroupObject(d) => d.underlying.to_dot(truncation),
            _ => bail!("fixture {name} has no DOT rendering"),
        }),
        ExportFormat::Json => {
            let e = match &loaded {
                Loaded::Space(x) => Exported::Space(SpaceDto::export(x, truncation)?),
                Loaded::Cosheaf(a) => Exported::Cosheaf(CosheafDto::export(a, truncation)),
                Loaded::Bundle(p) => Exported::Bundle(BundleDto::export(p, truncation)?),
                Loaded::GroupObject(d) => Exported::Bundle(BundleDto::export(&d.underlying, truncation)?),
                Loaded::Morphism { map, .. } => Exported::Morphism(map.into()),
                _ => bail!("fixture {name} has no JSON export"),
            };
            Ok(serde_json::to_string_pretty(&e)? + "\n")
        }
    }
}

pub fn import(text: &str) -> Result<Imported> {
    Ok(match serde_json::from_str::<Exported>(text)? {
        Exported::Space(d) => Imported::Space(d.import()?),
        Exported::Cosheaf(d) => Imported::Cosheaf(d.import()?),
        Exported::Bundle(d) => Imported::Bundle(d.import()?),
        Exported::Morphism(d) => Imported::Morphism(FamMor::try_from(&d)?),
    })
}

impl Imported {
    pub fn summary(&self, truncation: usize) -> String {
        match self {
            Imported::Space(x) => {
                let sizes: Vec<_> = (0..=truncation).map(|n| x.size(n)).collect();
                format!("space with level sizes {sizes:?}")
            }
            Imported::Cosheaf(a) => {
                let lens: Vec<_> = (0..=truncation).map(|n| a.level(n).len()).collect();
                format!("{:?} cosheaf with level index sizes {lens:?}", a.kind())
            }
            Imported::Bundle(p) => {
                let sizes: Vec<_> = (0..=truncation).map(|n| (p.total.size(n), p.base.size(n))).collect();
                format!("bundle with (total, base) level sizes {sizes:?}")
            }
            Imported::Morphism(m) => format!("family map with base {:?}", m.base()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_dot_has_seven_nodes() {
        let r = Registry::shipped().unwrap();
        let dot = export_fixture(&r, "cantor", ExportFormat::Dot, 2).unwrap();
        assert_eq!(dot.matches("\"2:").count(), 4 + 4);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 6);
    }

    #[test]
    fn cosheaf_export_is_stable() {
        let r = Registry::shipped().unwrap();
        let a = export_fixture(&r, "cantor-z2", ExportFormat::Json, 3).unwrap();
        let b = export_fixture(&r, "cantor-z2", ExportFormat::Json, 3).unwrap();
        assert_eq!(a, b);
        let Exported::Cosheaf(before) = serde_json::from_str(&a).unwrap() else { panic!("wrong kind") };
        let Imported::Cosheaf(c) = import(&a).unwrap() else { panic!("wrong kind") };
        let after = CosheafDto::export(&c, 3);
        assert_eq!((after.levels, after.transitions), (before.levels, before.transitions));
    }
}
