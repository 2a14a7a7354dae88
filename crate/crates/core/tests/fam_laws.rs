use itertools::Itertools;
use procosheaf::fam::{self, compose, FamMor, FamObj};
use procosheaf::fincat::{FinObj, Kind};
use procosheaf::random;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Set families with at most two indices and fibres of size at most two.
fn small_set_families() -> Vec<FamObj> {
    (0..=2)
        .flat_map(|len| (0..len).map(|_| 0..=2usize).multi_cartesian_product().collect::<Vec<_>>())
        .chain(std::iter::once(Vec::new()))
        .unique()
        .map(|sizes| FamObj::new(Kind::Set, sizes.into_iter().map(FinObj::set).collect()).unwrap())
        .collect()
}

fn right_cancellable(e: &FamMor, tests: &[FamObj]) -> bool {
    tests.iter().all(|c| {
        let homs = fam::hom_set(e.cod(), c).unwrap();
        let keys: Vec<FamMor> = homs.iter().map(|g| compose(g, e).unwrap()).collect();
        keys.iter().all_unique()
    })
}

fn left_cancellable(m: &FamMor, tests: &[FamObj]) -> bool {
    tests.iter().all(|t| {
        let homs = fam::hom_set(t, m.dom()).unwrap();
        homs.iter().map(|g| compose(m, g).unwrap()).all_unique()
    })
}

#[test]
fn epi_and_mono_agree_with_cancellation() {
    let fams = small_set_families();
    assert_eq!(fams.len(), 13);
    let mut checked = 0;
    for a in &fams {
        for b in &fams {
            for e in fam::hom_set(a, b).unwrap() {
                assert_eq!(e.is_epi(), right_cancellable(&e, &fams), "epi test on {e:?}");
                assert_eq!(e.is_mono(), left_cancellable(&e, &fams), "mono test on {e:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn coprojections_are_disjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in [Kind::Set, Kind::AbelianGroup, Kind::Group] {
        for _ in 0..20 {
            let (a, b) = (random::family(&mut rng, kind, 3, 4), random::family(&mut rng, kind, 3, 4));
            let (_, i, j) = fam::coproduct(&a, &b).unwrap();
            assert!(i.is_mono() && j.is_mono());
            let (apex, _, _) = fam::pullback(&i, &j).unwrap();
            assert!(apex.is_empty());
        }
    }
}

fn kind_of(i: u8) -> Kind {
    [Kind::Set, Kind::AbelianGroup, Kind::Group][i as usize % 3]
}

proptest! {
    #[test]
    fn image_factorization_composes(seed in any::<u64>(), k in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random::any_fam_map(&mut rng, kind_of(k), 4, 6).unwrap();
        let (e, i) = fam::image_factor(&m).unwrap();
        prop_assert!(e.is_epi());
        prop_assert!(i.is_mono());
        prop_assert_eq!(compose(&i, &e).unwrap(), m.clone());
        prop_assert!(fam::factor_through_mono(&m, &i).is_ok());
    }

    #[test]
    fn set_pullback_of_epi_is_epi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = loop {
            let m = random::any_fam_map(&mut rng, Kind::Set, 4, 6).unwrap();
            if m.is_epi() {
                break m;
            }
        };
        let c = random::family(&mut rng, Kind::Set, 4, 6);
        let Some(g) = random::fam_map(&mut rng, &c, e.cod()).unwrap() else { return Ok(()) };
        let (_, p1, p2) = fam::pullback(&e, &g).unwrap();
        prop_assert_eq!(compose(&e, &p1).unwrap(), compose(&g, &p2).unwrap());
        prop_assert!(p2.is_epi());
    }

    #[test]
    fn kernel_pair_coequalizer_coequalizes(seed in any::<u64>(), k in 0u8..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random::any_fam_map(&mut rng, kind_of(k), 3, 6).unwrap();
        let (q, leg) = fam::coeq_kernel_pair(&m).unwrap();
        let (p1, p2) = fam::kernel_pair(&m).unwrap();
        prop_assert!(fam::coequalizes(&leg, &p1, &p2).unwrap());
        prop_assert!(leg.is_epi());
        let (_, i) = fam::image_factor(&m).unwrap();
        prop_assert_eq!(&q, i.dom());
    }

    #[test]
    fn hom_set_counts_fibrewise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random::family(&mut rng, Kind::Set, 3, 2), random::family(&mut rng, Kind::Set, 3, 2));
        let expected: u128 = a
            .fibres()
            .iter()
            .map(|f| b.fibres().iter().map(|g| g.order().pow(f.order() as u32)).sum::<u128>())
            .product();
        prop_assert_eq!(fam::hom_set(&a, &b).unwrap().len() as u128, expected);
    }
}
