//! Fixture descriptors and the registry that loads them.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use procosheaf::bundle::{self, GroupObjectData, ProBundle};
use procosheaf::cosheaf::{
    ConstantPrecosheaf, CorruptInclusions, CosectionOracle, Cosheaf, CosheafOracle, PrecosheafFinite,
};
use procosheaf::fam::{FamMor, FamObj};
use procosheaf::fincat::{FinMor, FinObj, GroupTable, Kind};
use procosheaf::json::{CosheafDto, FamMorDto, FinObjDto};
use procosheaf::prospace::{PointThread, ProSpace};
use procosheaf::prosys::{ChainInfo, ProChain};
use procosheaf::random;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Environment variable naming a directory of fixture files that replaces
/// the shipped set.
pub const FIXTURE_DIR_ENV: &str = "PROCOSH_FIXTURE_DIR";

const SHIPPED: &[(&str, &str)] = &[
    ("spaces.json", include_str!("../fixtures/spaces.json")),
    ("threads.json", include_str!("../fixtures/threads.json")),
    ("cosheaves.json", include_str!("../fixtures/cosheaves.json")),
    ("oracles.json", include_str!("../fixtures/oracles.json")),
    ("bundles.json", include_str!("../fixtures/bundles.json")),
    ("morphisms.json", include_str!("../fixtures/morphisms.json")),
    ("precosheaves.json", include_str!("../fixtures/precosheaves.json")),
    ("hom-pairs.json", include_str!("../fixtures/hom-pairs.json")),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    Space,
    Thread,
    Cosheaf,
    Oracle,
    Bundle,
    GroupObject,
    Morphism,
    Precosheaf,
    HomPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureDescriptor {
    pub name: String,
    pub kind: FixtureKind,
    pub generator: String,
    #[serde(default)]
    pub params: Value,
    /// Declared facts replacing those of the generated chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilization_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_from: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epic: Option<bool>,
    /// Deliberately broken; only run when named.
    #[serde(default)]
    pub negative: bool,
    /// Suites the fixture is meant for; empty means every applicable one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<String>,
    /// Frozen expected values checked by the suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Value>,
}

impl FixtureDescriptor {
    pub fn is_for(&self, suite: &str) -> bool {
        self.suites.is_empty() || self.suites.iter().any(|s| s == suite)
    }

    pub fn expected(&self, key: &str) -> Option<&Value> {
        self.expect.as_ref()?.get(key)
    }

    fn declared_info(&self, info: ChainInfo) -> ChainInfo {
        ChainInfo {
            stabilization_bound: self.stabilization_bound.or(info.stabilization_bound),
            constant_from: self.constant_from.or(info.constant_from),
            epic: self.epic.unwrap_or(info.epic),
        }
    }
}

/// A loaded fixture.
#[derive(Clone)]
pub enum Loaded {
    Space(ProSpace),
    Thread { space: ProSpace, thread: PointThread },
    Cosheaf(Cosheaf),
    Oracle(Arc<dyn CosectionOracle>),
    Bundle(ProBundle),
    GroupObject(GroupObjectData),
    Morphism { map: FamMor, claimed_coequalizer: Option<FamMor> },
    Precosheaf(PrecosheafFinite),
    HomPair { source: Cosheaf, target: Cosheaf },
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    fixtures: BTreeMap<String, FixtureDescriptor>,
}

impl Registry {
    /// The shipped fixtures, or those in the override directory.
    pub fn load() -> Result<Self> {
        match std::env::var_os(FIXTURE_DIR_ENV) {
            Some(dir) => Self::from_dir(Path::new(&dir)),
            None => Self::shipped(),
        }
    }

    pub fn shipped() -> Result<Self> {
        let mut r = Registry::default();
        for (file, text) in SHIPPED {
            r.add_file(file, text)?;
        }
        Ok(r)
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut r = Registry::default();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .with_context(|| format!("reading fixture directory {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in paths {
            let text = std::fs::read_to_string(&p)?;
            r.add_file(&p.display().to_string(), &text)?;
        }
        Ok(r)
    }

    fn add_file(&mut self, file: &str, text: &str) -> Result<()> {
        let list: Vec<FixtureDescriptor> = serde_json::from_str(text).with_context(|| format!("parsing {file}"))?;
        for d in list {
            if self.fixtures.insert(d.name.clone(), d.clone()).is_some() {
                bail!("duplicate fixture name {}", d.name);
            }
        }
        Ok(())
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &FixtureDescriptor> {
        self.fixtures.values()
    }

    pub fn get(&self, name: &str) -> Result<&FixtureDescriptor> {
        self.fixtures.get(name).ok_or_else(|| anyhow!("unknown fixture {name}"))
    }

    /// Positive fixtures of a kind meant for a suite.
    pub fn positive(&self, kind: FixtureKind, suite: &str) -> Vec<&FixtureDescriptor> {
        self.descriptors().filter(|d| d.kind == kind && !d.negative && d.is_for(suite)).collect()
    }

    pub fn load_fixture(&self, name: &str) -> Result<Loaded> {
        let d = self.get(name)?;
        self.build(d).with_context(|| format!("loading fixture {name}"))
    }

    pub fn space(&self, name: &str) -> Result<ProSpace> {
        match self.load_fixture(name)? {
            Loaded::Space(x) => Ok(x),
            _ => bail!("fixture {name} is not a space"),
        }
    }

    pub fn cosheaf(&self, name: &str) -> Result<Cosheaf> {
        match self.load_fixture(name)? {
            Loaded::Cosheaf(a) => Ok(a),
            _ => bail!("fixture {name} is not a cosheaf"),
        }
    }

    fn build(&self, d: &FixtureDescriptor) -> Result<Loaded> {
        let p = &d.params;
        Ok(match (d.kind, d.generator.as_str()) {
            (FixtureKind::Space, "cantor") => Loaded::Space(ProSpace::cantor()),
            (FixtureKind::Space, "one-point") => Loaded::Space(ProSpace::one_point()),
            (FixtureKind::Space, "finite") => Loaded::Space(ProSpace::finite(usize_param(p, "points")?)),
            (FixtureKind::Space, "product") => {
                Loaded::Space(self.space(str_param(p, "left")?)?.product(&self.space(str_param(p, "right")?)?))
            }
            (FixtureKind::Thread, _) => {
                let space = self.space(str_param(p, "space")?)?;
                Loaded::Thread { thread: thread(&d.generator, p)?, space }
            }
            (FixtureKind::Cosheaf, _) => Loaded::Cosheaf(self.build_cosheaf(d)?),
            (FixtureKind::Oracle, "constant-precosheaf") => Loaded::Oracle(Arc::new(ConstantPrecosheaf {
                space: self.space(str_param(p, "space")?)?,
                value: obj_param(p, "value")?,
            })),
            (FixtureKind::Oracle, "corrupt-inclusions") => Loaded::Oracle(Arc::new(CorruptInclusions {
                inner: CosheafOracle::new(&self.cosheaf(str_param(p, "cosheaf")?)?),
            })),
            (FixtureKind::Oracle, "cosheaf") => {
                Loaded::Oracle(Arc::new(CosheafOracle::new(&self.cosheaf(str_param(p, "cosheaf")?)?)))
            }
            (FixtureKind::Bundle, "to-bundle") => {
                Loaded::Bundle(bundle::to_bundle(&self.cosheaf(str_param(p, "cosheaf")?)?)?)
            }
            (FixtureKind::Bundle, "identity") => {
                Loaded::Bundle(ProBundle::identity(&self.space(str_param(p, "space")?)?))
            }
            (FixtureKind::GroupObject, "to-group-object") => {
                let mut g = bundle::to_group_object(&self.cosheaf(str_param(p, "cosheaf")?)?)?;
                if let Some(c) = p.get("corrupt-mult") {
                    let [n, a, b, v]: [usize; 4] = serde_json::from_value(c.clone())?;
                    let mut level = g.level(n);
                    level.mult.insert((a, b), v);
                    g = g.with_level(n, level);
                }
                if let Some(c) = p.get("corrupt-unit") {
                    let [n, x, v]: [usize; 3] = serde_json::from_value(c.clone())?;
                    let mut level = g.level(n);
                    level.unit[x] = v;
                    g = g.with_level(n, level);
                }
                Loaded::GroupObject(g)
            }
            (FixtureKind::Morphism, "explicit") => {
                let map: FamMorDto = serde_json::from_value(field(p, "map")?.clone())?;
                let claimed = match p.get("claimed-coequalizer") {
                    Some(v) => Some(FamMor::try_from(&serde_json::from_value::<FamMorDto>(v.clone())?)?),
                    None => None,
                };
                Loaded::Morphism { map: FamMor::try_from(&map)?, claimed_coequalizer: claimed }
            }
            (FixtureKind::Precosheaf, "explicit") => Loaded::Precosheaf(explicit_precosheaf(p)?),
            (FixtureKind::Precosheaf, "constant") => {
                let n = usize_param(p, "points")?;
                let c = obj_param(p, "value")?;
                let full = (1u32 << n) - 1;
                let mut maps = BTreeMap::new();
                for u in 0..=full {
                    for v in (0..=full).filter(|&v| v & u == v && v != u) {
                        maps.insert((v, u), FinMor::identity(&c));
                    }
                }
                Loaded::Precosheaf(PrecosheafFinite::new(c.kind(), n, vec![c; 1 << n], maps)?)
            }
            (FixtureKind::HomPair, "pair") => Loaded::HomPair {
                source: self.cosheaf(str_param(p, "source")?)?,
                target: self.cosheaf(str_param(p, "target")?)?,
            },
            (k, g) => bail!("no generator {g} for {k:?} fixtures"),
        })
    }

    fn build_cosheaf(&self, d: &FixtureDescriptor) -> Result<Cosheaf> {
        let p = &d.params;
        let a = match d.generator.as_str() {
            "constant" => Cosheaf::constant(&obj_param(p, "value")?, &self.space(str_param(p, "space")?)?),
            "terminal" => Cosheaf::terminal(kind_param(p)?, &self.space(str_param(p, "space")?)?),
            "skyscraper" => {
                let space = self.space(str_param(p, "space")?)?;
                let t = match self.load_fixture(str_param(p, "thread")?)? {
                    Loaded::Thread { thread, .. } => thread,
                    _ => bail!("skyscraper needs a thread fixture"),
                };
                Cosheaf::skyscraper(&t, &obj_param(p, "value")?, &space)?
            }
            "random" => random::cosheaf_over(
                &self.space(str_param(p, "space")?)?,
                kind_param(p)?,
                field(p, "seed")?.as_u64().ok_or_else(|| anyhow!("seed must be an integer"))?,
                usize_param(p, "max-fibre")?,
                p.get("epic").and_then(Value::as_bool).unwrap_or(false),
            ),
            "family" => {
                let fibres = field(p, "fibres")?
                    .as_array()
                    .ok_or_else(|| anyhow!("fibres must be a list"))?
                    .iter()
                    .map(object)
                    .collect::<Result<Vec<_>>>()?;
                Cosheaf::finite(FamObj::new(kind_param(p)?, fibres)?)
            }
            "levels" => {
                let dto: CosheafDto = serde_json::from_value(field(p, "cosheaf")?.clone())?;
                dto.import()?
            }
            "one-point-product" => one_point_product(&obj_param(p, "value")?)?,
            "zp-tower" => zp_tower(usize_param(p, "p")?)?,
            g => bail!("no cosheaf generator {g}"),
        };
        let a = match p.get("drop-fibre") {
            Some(v) => {
                let [n, x]: [usize; 2] = serde_json::from_value(v.clone())?;
                drop_fibre(&a, n, x)?
            }
            None => a,
        };
        let info = d.declared_info(a.chain().info());
        if info == a.chain().info() {
            return Ok(a);
        }
        Ok(Cosheaf::with_base_surjectivity(a.chain().clone().with_info(info), a.base().is_surjective())?)
    }
}

fn field<'a>(p: &'a Value, key: &str) -> Result<&'a Value> {
    p.get(key).ok_or_else(|| anyhow!("missing parameter {key}"))
}

fn str_param<'a>(p: &'a Value, key: &str) -> Result<&'a str> {
    field(p, key)?.as_str().ok_or_else(|| anyhow!("parameter {key} must be a string"))
}

fn usize_param(p: &Value, key: &str) -> Result<usize> {
    Ok(field(p, key)?.as_u64().ok_or_else(|| anyhow!("parameter {key} must be an integer"))? as usize)
}

fn obj_param(p: &Value, key: &str) -> Result<FinObj> {
    object(field(p, key)?)
}

/// An object from a descriptor or a short name: `set<n>`, `Z<n>` (abelian
/// cyclic), `C<n>` (cyclic group), `S3`, `D8`, `Q8`.
pub fn object(v: &Value) -> Result<FinObj> {
    let Some(name) = v.as_str() else {
        return Ok(FinObj::try_from(&serde_json::from_value::<FinObjDto>(v.clone())?)?);
    };
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    Ok(match name {
        "S3" => FinObj::symmetric3(),
        "D8" => FinObj::group(GroupTable::dihedral8()),
        "Q8" => FinObj::group(GroupTable::quaternion8()),
        _ => {
            if let Some(n) = num("set") {
                FinObj::set(n)
            } else if let Some(n) = num("Z") {
                FinObj::cyclic(n)
            } else if let Some(n) = num("C") {
                FinObj::cyclic_group(n)
            } else {
                bail!("unknown object name {name}")
            }
        }
    })
}

fn kind_param(p: &Value) -> Result<Kind> {
    Ok(serde_json::from_value(field(p, "kind")?.clone())?)
}

fn thread(generator: &str, p: &Value) -> Result<PointThread> {
    let base: Arc<dyn Fn(usize) -> usize + Send + Sync> = match generator {
        "cantor-bits" => {
            let pattern = str_param(p, "pattern")?.to_string();
            let bit = move |k: usize| match pattern.as_str() {
                "ones" => true,
                "alternating" => k.is_multiple_of(2),
                _ => false,
            };
            Arc::new(move |n| (0..n).fold(0, |acc, k| acc << 1 | usize::from(bit(k))))
        }
        "one-point" => match p.get("index").and_then(Value::as_u64) {
            Some(k) => Arc::new(move |n| (k as usize).min(n)),
            None => Arc::new(|n| n),
        },
        "prefix" => {
            let values: Vec<usize> = serde_json::from_value(field(p, "values")?.clone())?;
            return Ok(PointThread::from_prefix(values));
        }
        g => bail!("no thread generator {g}"),
    };
    Ok(match p.get("tamper") {
        Some(v) => {
            let [level, value]: [usize; 2] = serde_json::from_value(v.clone())?;
            PointThread::generated(move |n| if n == level { value } else { base(n) })
        }
        None => PointThread::generated(move |n| base(n)),
    })
}

fn explicit_precosheaf(p: &Value) -> Result<PrecosheafFinite> {
    let kind = kind_param(p)?;
    let n = usize_param(p, "points")?;
    let values = field(p, "values")?
        .as_array()
        .ok_or_else(|| anyhow!("values must be a list"))?
        .iter()
        .map(object)
        .collect::<Result<Vec<_>>>()?;
    let maps: Vec<(u32, u32, Vec<usize>)> = serde_json::from_value(field(p, "maps")?.clone())?;
    let mut out = BTreeMap::new();
    for (v, u, table) in maps {
        let (dom, cod) = (values[v as usize].clone(), values[u as usize].clone());
        out.insert((v, u), FinMor::new(dom, cod, table)?);
    }
    Ok(PrecosheafFinite::new(kind, n, values, out)?)
}

/// Over the one-point compactification: `c` at each isolated point seen by
/// level `n`, the trivial object on the cell at infinity. Global cosections
/// are the finite partial products of copies of `c`.
pub fn one_point_product(c: &FinObj) -> Result<Cosheaf> {
    if c.kind() != Kind::AbelianGroup {
        bail!("the product cosheaf needs coproducts that agree with products");
    }
    let zero = FinObj::initial(Kind::AbelianGroup);
    let (c1, c2, z1, z2) = (c.clone(), c.clone(), zero.clone(), zero);
    let fibres = move |n: usize, c: &FinObj, z: &FinObj| {
        FamObj::new(Kind::AbelianGroup, (0..=n).map(|i| if i < n { c.clone() } else { z.clone() }).collect()).unwrap()
    };
    let fibres2 = fibres;
    let chain = ProChain::new(
        move |n| fibres(n, &c1, &z1),
        move |n| {
            let (dom, cod) = (fibres2(n + 1, &c2, &z2), fibres2(n, &c2, &z2));
            let base: Vec<usize> = (0..n + 2).map(|i| i.min(n)).collect();
            let maps = (0..n + 2)
                .map(|i| if i < n { FinMor::identity(&c2) } else { FinMor::zero(dom.fibre(i), cod.fibre(n)).unwrap() })
                .collect();
            FamMor::new(dom, cod, base, maps).unwrap()
        },
        ChainInfo { stabilization_bound: Some(0), constant_from: None, epic: true },
    );
    Ok(Cosheaf::with_base_surjectivity(chain, true)?)
}

/// The tower `Z/p^n` with reduction maps, over a point.
pub fn zp_tower(p: usize) -> Result<Cosheaf> {
    if p < 2 {
        bail!("zp-tower needs p ≥ 2");
    }
    let level = move |n: usize| FamObj::point(FinObj::cyclic(p.pow(n as u32)));
    let chain = ProChain::new(
        level,
        move |n| {
            let (m, k) = (p.pow(n as u32 + 1), p.pow(n as u32));
            let f = FinMor::new(FinObj::cyclic(m), FinObj::cyclic(k), (0..m).map(|x| x % k).collect()).unwrap();
            FamMor::new(level(n + 1), level(n), vec![0], vec![f]).unwrap()
        },
        ChainInfo { stabilization_bound: Some(0), constant_from: None, epic: true },
    );
    Ok(Cosheaf::with_base_surjectivity(chain, true)?)
}

/// Replaces the fibre at `(n, x)` of an abelian cosheaf by the trivial
/// group, with zero maps in and out.
fn drop_fibre(a: &Cosheaf, n: usize, x: usize) -> Result<Cosheaf> {
    if a.kind() != Kind::AbelianGroup {
        bail!("drop-fibre applies to abelian cosheaves");
    }
    let zero = FinObj::initial(Kind::AbelianGroup);
    let patch = move |k: usize, l: FamObj| -> FamObj {
        if k != n {
            return l;
        }
        let mut fibres = l.fibres().to_vec();
        fibres[x] = zero.clone();
        FamObj::new(Kind::AbelianGroup, fibres).unwrap()
    };
    let patch2 = patch.clone();
    let (c1, c2) = (a.chain().clone(), a.chain().clone());
    let chain = ProChain::new(
        move |k| patch(k, c1.level(k)),
        move |k| {
            let t = c2.transition(k);
            let (dom, cod) = (patch2(k + 1, t.dom().clone()), patch2(k, t.cod().clone()));
            let maps = (0..t.base().len())
                .map(|y| {
                    let (s, d) = (dom.fibre(y), cod.fibre(t.base()[y]));
                    if s == t.fibre_map(y).dom() && d == t.fibre_map(y).cod() {
                        t.fibre_map(y).clone()
                    } else {
                        FinMor::zero(s, d).unwrap()
                    }
                })
                .collect();
            FamMor::new(dom, cod, t.base().to_vec(), maps).unwrap()
        },
        a.chain().info(),
    );
    Ok(Cosheaf::with_base_surjectivity(chain, a.base().is_surjective())?)
}
