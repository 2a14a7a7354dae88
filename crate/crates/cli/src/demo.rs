//! Worked examples printed by `procosh demo`.

use std::fmt::Write;

use anyhow::{bail, Result};
use procosheaf::bundle::{check_group_object, to_group_object, GroupObjectReport};
use procosheaf::cosheaf::Cosheaf;
use procosheaf::fincat::FinObj;
use procosheaf::prospace::ProSpace;
use serde::{Deserialize, Serialize};

use crate::fixtures::{one_point_product, zp_tower};

pub const DEMOS: [&str; 4] = ["cantor-coproduct", "one-point-product", "zp-tower", "group-bundle"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoLevel {
    pub level: usize,
    pub fibres: Vec<String>,
    /// Base table and surjectivity of the map to the previous level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<String>,
    /// Order of the level's global cosections, when coproducts exist.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_order: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub demo: String,
    pub truncation: usize,
    pub levels: Vec<DemoLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_object: Option<GroupObjectReport>,
}

impl DemoReport {
    pub fn ok(&self) -> bool {
        self.group_object.as_ref().is_none_or(GroupObjectReport::passes)
    }

    pub fn global_orders(&self) -> Vec<Option<String>> {
        self.levels.iter().map(|l| l.global_order.clone()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("demo {} (levels 0..={})\n", self.demo, self.truncation);
        for l in &self.levels {
            let _ = write!(s, "  level {}: {} fibre(s)", l.level, l.fibres.len());
            if l.fibres.len() <= 8 {
                let _ = write!(s, " [{}]", l.fibres.join(", "));
            } else {
                let _ = write!(s, " [{}, ...]", l.fibres[..4].join(", "));
            }
            if let Some(o) = &l.global_order {
                let _ = write!(s, ", global cosections of order {o}");
            }
            s.push('\n');
            if let Some(t) = &l.transition {
                let _ = writeln!(s, "    to level {}: {t}", l.level - 1);
            }
        }
        if let Some(g) = &self.group_object {
            let failures: Vec<_> = g.checks.iter().filter(|c| c.witness.is_some()).collect();
            let _ = writeln!(s, "  group object axioms: {} checks, {} failing", g.checks.len(), failures.len());
            for c in failures {
                let _ = writeln!(s, "    level {} {:?}: {:?}", c.level, c.axiom, c.witness);
            }
        }
        s
    }
}

pub fn run_demo(name: &str, truncation: usize) -> Result<DemoReport> {
    let (a, group) = match name {
        "cantor-coproduct" => (Cosheaf::constant(&FinObj::cyclic(2), &ProSpace::cantor()), false),
        "one-point-product" => (one_point_product(&FinObj::cyclic(2))?, false),
        "zp-tower" => (zp_tower(2)?, false),
        "group-bundle" => (Cosheaf::constant(&FinObj::symmetric3(), &ProSpace::cantor()), true),
        other => bail!("unknown demo {other}; expected one of {}", DEMOS.join(", ")),
    };
    let levels = describe(&a, truncation)?;
    let group_object = if group { Some(check_group_object(&to_group_object(&a)?, truncation)) } else { None };
    Ok(DemoReport { demo: name.to_string(), truncation, levels, group_object })
}

fn describe(a: &Cosheaf, truncation: usize) -> Result<Vec<DemoLevel>> {
    let global = if a.kind().has_coproducts() { Some(a.global_cosections()?) } else { None };
    (0..=truncation)
        .map(|n| {
            let l = a.level(n);
            let transition = if n == 0 {
                None
            } else {
                let t = a.transition(n - 1);
                let epi = if t.try_is_epi()? { "epi" } else { "not epi" };
                Some(format!("base {:?}, {epi}", t.base()))
            };
            Ok(DemoLevel {
                level: n,
                fibres: l.fibres().iter().map(|f| f.to_string()).collect(),
                transition,
                global_order: global.as_ref().map(|g| g.level(n).order().to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_demo_is_an_error() {
        assert!(run_demo("nope", 2).is_err());
    }

    #[test]
    fn zp_tower_orders_double() {
        let r = run_demo("zp-tower", 3).unwrap();
        let orders: Vec<_> = r.global_orders().into_iter().map(Option::unwrap).collect();
        assert_eq!(orders, ["1", "2", "4", "8"]);
    }
}
