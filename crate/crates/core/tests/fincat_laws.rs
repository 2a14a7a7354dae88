use std::collections::BTreeSet;

use procosheaf::fincat::{self, compose, FinMor, FinObj, GroupTable, Kind};
use procosheaf::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn kind_of(i: u8) -> Kind {
    [Kind::Set, Kind::AbelianGroup, Kind::Group][i as usize % 3]
}

fn random_map(seed: u64, kind: Kind, max: usize) -> FinMor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let (a, b) = (random::object(&mut rng, kind, max), random::object(&mut rng, kind, max));
        if let Some(f) = random::map(&mut rng, &a, &b).unwrap() {
            return f;
        }
    }
}

/// Closure of a set of labels under the operation of `g`; sets have none.
fn closure(g: &FinObj, seed: BTreeSet<usize>) -> BTreeSet<usize> {
    if g.kind() == Kind::Set {
        return seed;
    }
    let mut out = seed;
    out.insert(0);
    loop {
        let next: BTreeSet<usize> =
            out.iter().flat_map(|&a| out.iter().map(move |&b| (a, b))).map(|(a, b)| g.op(a, b).unwrap()).collect();
        let grown: BTreeSet<usize> = out.union(&next).copied().collect();
        if grown == out {
            return out;
        }
        out = grown;
    }
}

#[test]
fn named_group_hom_counts() {
    let s3 = FinObj::symmetric3();
    let z2 = FinObj::cyclic_group(2);
    let z3 = FinObj::cyclic_group(3);
    let q8 = FinObj::group(GroupTable::quaternion8());
    let d8 = FinObj::group(GroupTable::dihedral8());
    assert_eq!(fincat::hom_set(&s3, &z2).unwrap().len(), 2);
    assert_eq!(fincat::hom_set(&z2, &s3).unwrap().len(), 4);
    assert_eq!(fincat::hom_set(&z3, &s3).unwrap().len(), 3);
    assert_eq!(fincat::hom_set(&s3, &s3).unwrap().len(), 10);
    assert_eq!(fincat::hom_set(&q8, &z2).unwrap().len(), 4);
    assert_eq!(fincat::hom_set(&d8, &z2).unwrap().len(), 4);
    assert_eq!(fincat::hom_set(&z2, &q8).unwrap().len(), 2);
    assert_eq!(fincat::hom_set(&z2, &d8).unwrap().len(), 6);
}

proptest! {
    #[test]
    fn set_hom_count_is_power(n in 0usize..5, m in 0usize..5) {
        let homs = fincat::hom_set(&FinObj::set(n), &FinObj::set(m)).unwrap();
        prop_assert_eq!(homs.len() as u128, (m as u128).pow(n as u32));
    }

    #[test]
    fn cyclic_hom_count_is_gcd(m in 1usize..16, n in 1usize..16) {
        let (a, b) = (FinObj::cyclic(m), FinObj::cyclic(n));
        prop_assert_eq!(fincat::hom_count(&a, &b).unwrap(), gcd(m as u128, n as u128));
        prop_assert_eq!(fincat::hom_set(&a, &b).unwrap().len() as u128, gcd(m as u128, n as u128));
    }

    #[test]
    fn image_factorization_composes(seed in any::<u64>(), k in 0u8..3) {
        let f = random_map(seed, kind_of(k), 8);
        let (e, m) = fincat::image_factor(&f).unwrap();
        prop_assert!(e.is_epi());
        prop_assert!(m.is_mono());
        prop_assert_eq!(compose(&m, &e).unwrap(), f);
    }

    #[test]
    fn pullback_of_epi_is_epi(seed in any::<u64>(), k in 0u8..3) {
        let kind = kind_of(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = loop {
            let f = random_map(rand::Rng::gen(&mut rng), kind, 8);
            if f.is_epi() {
                break f;
            }
        };
        let c = random::object(&mut rng, kind, 8);
        let Some(g) = random::map(&mut rng, &c, e.cod()).unwrap() else { return Ok(()) };
        let (_, p1, p2) = fincat::pullback(&e, &g).unwrap();
        prop_assert_eq!(compose(&e, &p1).unwrap(), compose(&g, &p2).unwrap());
        prop_assert!(p2.is_epi());
    }

    #[test]
    fn joint_image_is_generated_subobject(seed in any::<u64>(), k in 0u8..3, count in 1usize..4) {
        let kind = kind_of(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = random::object(&mut rng, kind, 8);
        let mut fs = Vec::new();
        while fs.len() < count {
            let a = random::object(&mut rng, kind, 6);
            if let Some(f) = random::map(&mut rng, &a, &target).unwrap() {
                fs.push(f);
            }
        }
        let (sub, factors) = fincat::joint_image(&fs).unwrap();
        let hit: BTreeSet<usize> = fs.iter().flat_map(|f| f.table().unwrap()).collect();
        prop_assert_eq!(sub.elements().unwrap(), closure(&target, hit));
        for (f, g) in fs.iter().zip(&factors) {
            prop_assert_eq!(&compose(sub.inclusion(), g).unwrap(), f);
        }
    }

    #[test]
    fn coprojections_are_monic(seed in any::<u64>(), abelian in any::<bool>()) {
        let kind = if abelian { Kind::AbelianGroup } else { Kind::Set };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random::object(&mut rng, kind, 6), random::object(&mut rng, kind, 6));
        let c = fincat::coproduct(&a, &b).unwrap();
        prop_assert!(c.injections.iter().all(FinMor::is_mono));
        prop_assert_eq!(c.obj.order(), if abelian { a.order() * b.order() } else { a.order() + b.order() });
    }

    #[test]
    fn product_pairing_is_universal(seed in any::<u64>(), k in 0u8..3) {
        let kind = kind_of(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, t) = (random::object(&mut rng, kind, 4), random::object(&mut rng, kind, 4), random::object(&mut rng, kind, 4));
        let p = fincat::product(&a, &b).unwrap();
        prop_assert_eq!(p.obj.order(), a.order() * b.order());
        let (Some(f), Some(g)) = (random::map(&mut rng, &t, &a).unwrap(), random::map(&mut rng, &t, &b).unwrap()) else {
            return Ok(());
        };
        let h = fincat::pair(&f, &g).unwrap();
        prop_assert_eq!(compose(&p.p1, &h).unwrap(), f);
        prop_assert_eq!(compose(&p.p2, &h).unwrap(), g);
    }
}
