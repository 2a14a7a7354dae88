//! Verification suites. Each suite runs seeded random cases and the
//! fixtures meant for it; a named fixture replaces both.

use anyhow::{bail, Result};
use procosheaf::prospace::{ClopenSet, ProSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::fixtures::{FixtureDescriptor, FixtureKind, Registry};
use crate::report::VerificationReport;

mod bundle;
mod cosheafification;
mod costalk;
mod fam_regularity;
mod glil;
mod hom_formula;
mod inv_decompose;
mod key_lemma;

pub const SUITES: [&str; 8] =
    ["key-lemma", "fam-regularity", "glil", "hom-formula", "cosheafification", "costalk", "bundle", "inv-decompose"];

pub const DEFAULT_TRUNCATION: usize = 4;
pub const DEFAULT_WINDOW: usize = 3;

/// Settings shared by every suite.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub registry: Registry,
    pub seed: u64,
    pub truncation: usize,
    pub window: usize,
    pub fixture: Option<String>,
}

impl Ctx {
    pub fn new(registry: Registry) -> Self {
        Self { registry, seed: 0, truncation: DEFAULT_TRUNCATION, window: DEFAULT_WINDOW, fixture: None }
    }

    /// Fixtures of a kind the suite should run: the named one if it has
    /// that kind and is meant for the suite, otherwise every positive fixture meant for the suite.
    pub fn fixtures(&self, kind: FixtureKind, suite: &str) -> Vec<FixtureDescriptor> {
        match &self.fixture {
            Some(name) => self
                .registry
                .get(name)
                .ok()
                .filter(|d| d.kind == kind && d.is_for(suite))
                .cloned()
                .into_iter()
                .collect(),
            None => self.registry.positive(kind, suite).into_iter().cloned().collect(),
        }
    }

    /// Whether generated cases run alongside the fixtures.
    pub fn random_cases(&self) -> bool {
        self.fixture.is_none()
    }

    /// The seed of generated case `i`.
    pub fn case_seed(&self, i: usize) -> u64 {
        let mut z = self.seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn rng(&self, seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }
}

pub fn run_suite(name: &str, ctx: &Ctx) -> Result<VerificationReport> {
    Ok(match name {
        "key-lemma" => key_lemma::run(ctx),
        "fam-regularity" => fam_regularity::run(ctx),
        "glil" => glil::run(ctx),
        "hom-formula" => hom_formula::run(ctx),
        "cosheafification" => cosheafification::run(ctx),
        "costalk" => costalk::run(ctx),
        "bundle" => bundle::run(ctx),
        "inv-decompose" => inv_decompose::run(ctx),
        _ => bail!("unknown suite {name}; expected one of {} or all", SUITES.join(", ")),
    })
}

pub(crate) fn clopen_json(u: &ClopenSet) -> Value {
    json!({ "level": u.level, "subset": u.subset })
}

/// Two disjoint non-empty clopens at a random level in `1..=max_level`.
pub(crate) fn disjoint_pair(space: &ProSpace, rng: &mut impl Rng, max_level: usize) -> Result<(ClopenSet, ClopenSet)> {
    let level = rng.gen_range(1..=max_level.max(1));
    let n = space.size(level);
    if n < 2 {
        bail!("level {level} has fewer than two points");
    }
    let mut side: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    if !side.contains(&0) {
        side[0] = 0;
    }
    if !side.contains(&1) {
        let first = side.iter().position(|&s| s == 0).unwrap();
        let k = if first == n - 1 { 0 } else { n - 1 };
        side[k] = 1;
    }
    let pick = |s: u8| (0..n).filter(|&x| side[x] == s).collect::<Vec<_>>();
    Ok((space.clopen(level, pick(0))?, space.clopen(level, pick(1))?))
}

/// Whether two spaces have the same levels and transitions up to `n`.
pub(crate) fn same_space(a: &ProSpace, b: &ProSpace, n: usize) -> bool {
    (0..=n).all(|k| a.size(k) == b.size(k))
        && (0..n).all(|k| a.chain().transition(k).table().ok() == b.chain().transition(k).table().ok())
}
