use procosheaf::bundle::{
    bundle_round_trip_failure, chain_difference, check_group_object, from_bundle, to_bundle, to_group_object,
};
use procosheaf::cosheaf::{cosheafify_finite, Cosheaf};
use procosheaf::fam;
use procosheaf::fincat::{self, FinObj, Kind};
use procosheaf::prospace::{PointThread, ProSpace};
use procosheaf::random;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(cantor: bool) -> ProSpace {
    if cantor {
        ProSpace::cantor()
    } else {
        ProSpace::one_point()
    }
}

fn kind(abelian: bool) -> Kind {
    if abelian {
        Kind::AbelianGroup
    } else {
        Kind::Set
    }
}

#[test]
fn empty_clopen_has_initial_cosections() {
    for (cantor, abelian) in [(true, false), (true, true), (false, false), (false, true)] {
        let a = random::cosheaf_over(&space(cantor), kind(abelian), 11, 3, false);
        let c = a.cosections(&a.base().empty()).unwrap();
        for n in 0..4 {
            assert_eq!(c.level(n), FinObj::initial(a.kind()));
        }
    }
}

#[test]
fn constant_z2_over_cantor_has_doubling_exponent() {
    let g = Cosheaf::constant(&FinObj::cyclic(2), &ProSpace::cantor()).global_cosections().unwrap();
    let orders: Vec<u128> = (0..5).map(|n| g.level(n).order()).collect();
    assert_eq!(orders, [2, 4, 16, 256, 65536]);
}

#[test]
fn skyscraper_costalks() {
    let x = ProSpace::cantor();
    let zeros = PointThread::cantor(|_| false);
    let ones = PointThread::cantor(|_| true);
    let sky = Cosheaf::skyscraper(&zeros, &FinObj::set(2), &x).unwrap();
    let here = sky.costalk(&zeros).unwrap();
    let there = sky.costalk(&ones).unwrap();
    for n in 0..5 {
        assert_eq!(here.level(n), FinObj::set(2));
        assert_eq!(there.level(n), if n == 0 { FinObj::set(2) } else { FinObj::set(0) });
    }
}

proptest! {
    #[test]
    fn key_lemma_on_random_cosheaves(seed in any::<u64>(), cantor in any::<bool>(), abelian in any::<bool>()) {
        let a = random::cosheaf_over(&space(cantor), kind(abelian), seed, 3, seed % 3 == 0);
        let x = a.base();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let level = rng.gen_range(1..=3);
        let n = x.size(level);
        let side: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let u = x.clopen(level, (0..n).filter(|&i| side[i] == 0)).unwrap();
        let v = x.clopen(level, (0..n).filter(|&i| side[i] == 1)).unwrap();
        for m in level..=4 {
            let w = a.disjoint_union_witness(&u, &v, m).unwrap();
            prop_assert!(w.holds(), "level {} of {} and {}", m, u, v);
        }
    }

    #[test]
    fn global_cosections_are_levelwise_coproducts(seed in any::<u64>(), cantor in any::<bool>(), abelian in any::<bool>()) {
        let a = random::cosheaf_over(&space(cantor), kind(abelian), seed, 3, false);
        let g = a.global_cosections().unwrap();
        let whole = a.cosections(&a.base().whole()).unwrap();
        for n in 0..5 {
            let l = a.level(n);
            let expected = fam::global_cosections(&l).unwrap().obj;
            prop_assert_eq!(g.level(n), expected.clone());
            prop_assert_eq!(whole.level(n).order(), expected.order());
            if n < 4 {
                prop_assert_eq!(g.transition(n), fam::global_map(&a.transition(n)).unwrap());
            }
        }
    }

    #[test]
    fn shifted_costalks_are_reindexed(seed in any::<u64>(), cantor in any::<bool>()) {
        let a = random::cosheaf_over(&space(cantor), Kind::Set, seed, 3, false);
        let t = if cantor {
            PointThread::cantor(move |n| (seed >> (n % 64)) & 1 == 1)
        } else {
            PointThread::one_point(if seed % 3 == 0 { None } else { Some(seed as usize % 5) })
        };
        let c = a.costalk(&t).unwrap();
        let shifted = a.shift(1);
        for n in 0..3 {
            prop_assert_eq!(shifted.level(n), a.level(n + 1));
            prop_assert_eq!(c.level(n + 1), a.level(n + 1).fibre(t.at(n + 1).unwrap()).clone());
        }
    }

    #[test]
    fn maps_to_a_constant_family_are_maps_out_of_global_cosections(seed in any::<u64>(), abelian in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = kind(abelian);
        let a = random::family(&mut rng, k, 3, 3);
        let c = random::object(&mut rng, k, 4);
        let tuples = fam::hom_out(&a, &c).unwrap().len() as u128;
        let global = fam::global_cosections(&a).unwrap().obj;
        prop_assert_eq!(tuples, fincat::hom_count(&global, &c).unwrap());
    }

    #[test]
    fn cosheafification_keeps_point_values(seed in any::<u64>(), points in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random::image_precosheaf(&mut rng, points, 3);
        let c = cosheafify_finite(&p).unwrap();
        for x in 0..points {
            prop_assert_eq!(c.family.fibre(x), p.value(1 << x));
        }
        prop_assert!(c.as_precosheaf.is_cosheaf().unwrap());
    }

    #[test]
    fn set_bundle_round_trips(seed in any::<u64>(), cantor in any::<bool>()) {
        let a = random::cosheaf_over(&space(cantor), Kind::Set, seed, 3, true);
        let p = to_bundle(&a).unwrap();
        prop_assert_eq!(chain_difference(&from_bundle(&p).unwrap(), &a, 4), None);
        prop_assert_eq!(bundle_round_trip_failure(&p, 4).unwrap(), None);
        let sq = p.fibre_product(&p).unwrap();
        for n in 0..3 {
            let expected: u128 = a.level(n).fibres().iter().map(|f| f.order() * f.order()).sum();
            prop_assert_eq!(sq.total.size(n) as u128, expected);
        }
    }

    #[test]
    fn group_objects_pass_their_axioms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fibres = random::family(&mut rng, Kind::Group, 3, 8);
        let g = Cosheaf::finite(fibres);
        let report = check_group_object(&to_group_object(&g).unwrap(), 2);
        prop_assert!(report.passes(), "{:?}", report.first_failure());
    }
}

#[test]
fn cosheaf_dot_annotates_fibres() {
    let a = Cosheaf::constant(&FinObj::cyclic(2), &ProSpace::cantor());
    let dot = a.to_dot(2);
    assert_eq!(dot.matches("[label=").count(), 7);
    assert_eq!(dot.matches("->").count(), 6);
    assert!(dot.contains("|2|"));
}
