use pfiber::braidword::{check_homogenization, BraidWord};
use pfiber::curves::{library, ParamBraid, LIBRARY_NAMES};
use pfiber::fibercheck::{check, twist_shift_verify, CheckOptions};
use pfiber::polyloop::{track, TrackOptions};
use pfiber::wordextract::{extract, extract_word, ExtractOptions};
use proptest::prelude::*;

fn lib(name: &str) -> ParamBraid {
    library(name).unwrap()
}

fn word_of(b: &ParamBraid) -> BraidWord {
    extract_word(b, &ExtractOptions::default()).unwrap()
}

fn any_library() -> impl Strategy<Value = &'static str> {
    prop::sample::select(LIBRARY_NAMES.to_vec())
}

fn nonzero_power() -> impl Strategy<Value = i64> {
    prop_oneof![-3i64..=-1, 1i64..=3]
}

fn any_word() -> impl Strategy<Value = BraidWord> {
    (2usize..=5).prop_flat_map(|n| {
        let letter = (1..n as i32).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]);
        prop::collection::vec(letter, 0..=12).prop_map(move |letters| BraidWord::new(n, letters).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_matches_writhe(name in any_library(), k in -3i64..=3, r in nonzero_power()) {
        let b = lib(name).power(r).unwrap().twist(k);
        let winding = track(&b, &TrackOptions::default()).unwrap().total_winding();
        prop_assert!((winding - word_of(&b).writhe() as f64).abs() < 1e-6);
    }

    #[test]
    fn powers_stay_fibered_with_powered_words(name in any_library(), r in nonzero_power()) {
        let b = lib(name);
        let p = b.power(r).unwrap();
        prop_assert!(check(&p, &CheckOptions::default()).unwrap().passed());
        prop_assert!(word_of(&p).cyclic_equal(&word_of(&b).power(r)));
    }

    #[test]
    fn verdict_survives_grid_doubling(name in any_library(), k in -2i64..=2, r in nonzero_power()) {
        let b = lib(name).power(r).unwrap().twist(k);
        let coarse = check(&b, &CheckOptions { grid: 2048, margin: 1e-4 }).unwrap();
        let fine = check(&b, &CheckOptions { grid: 4096, margin: 1e-4 }).unwrap();
        prop_assert_eq!(coarse.verdict, fine.verdict);
        prop_assert!((coarse.total_winding - fine.total_winding).abs() < 1e-6);
    }

    #[test]
    fn twisting_shifts_speeds_by_strand_count(name in any_library(), k in -3i64..=3) {
        prop_assert!(twist_shift_verify(&lib(name), k, 512).unwrap().max_deviation < 1e-6);
    }

    #[test]
    fn extracted_permutation_follows_components(name in any_library(), k in -2i64..=2, r in nonzero_power()) {
        let b = lib(name).power(r).unwrap().twist(k);
        let e = extract(&b, &ExtractOptions::default()).unwrap();
        let mut cycles: Vec<usize> = e.word.permutation().cycles().iter().map(|c| c.strand_count()).collect();
        let mut strands: Vec<usize> = b.components().iter().map(|c| c.strands()).collect();
        cycles.sort_unstable();
        strands.sort_unstable();
        prop_assert_eq!(cycles, strands);
    }

    #[test]
    fn homogenization_statements_hold(w in any_word()) {
        let c = check_homogenization(&w).unwrap();
        prop_assert!(c.passed(), "{:?}", c);
    }
}
