//! The reduced single-agent enumeration against the literal one, and the
//! oracle against the model checker.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stit_core::corpus::{atom_names, exhaustive, random_formula};
use stit_core::formula::{negate, AgentCount, Formula};
use stit_core::semantics::{
    all_models, check_frame, decide_by_brute_force, decide_by_enumeration, evaluate, Verdict,
};

fn small_corpus() -> Vec<Formula> {
    let atoms = atom_names(2);
    let mut out = exhaustive(&atoms, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    out.extend((0..200).map(|_| random_formula(&mut rng, 3, &atoms)));
    out
}

#[test]
fn reduced_enumeration_matches_brute_force() {
    let corpus = small_corpus();
    for n in 0..=2 {
        for bound in 1..=4 {
            let mismatches: Vec<String> = corpus
                .par_iter()
                .filter_map(|g| {
                    let fast = decide_by_enumeration(g, AgentCount::ONE, n, Some(bound)).unwrap();
                    let slow = decide_by_brute_force(g, AgentCount::ONE, n, Some(bound)).unwrap();
                    (fast.is_counter_model() != slow.is_counter_model()).then(|| format!("{g} n={n} k={bound}"))
                })
                .collect();
            assert!(mismatches.is_empty(), "{mismatches:?}");
        }
    }
}

#[test]
fn counter_models_are_frames_and_refute() {
    let m2 = AgentCount::new(2).unwrap();
    for g in small_corpus() {
        for n in 0..=2 {
            if let Verdict::CounterModel { model, world } = decide_by_enumeration(&g, AgentCount::ONE, n, None).unwrap() {
                assert!(check_frame(&model, AgentCount::ONE, n).is_ok());
                assert_eq!(evaluate(&model, world, &g), Ok(false));
            }
        }
    }
    let g: Formula = "[1] p | <2> ~p".parse().unwrap();
    let Verdict::CounterModel { model, world } = decide_by_enumeration(&g, m2, 2, None).unwrap() else { panic!() };
    assert!(check_frame(&model, m2, 2).is_ok());
    assert_eq!(evaluate(&model, world, &g), Ok(false));
}

#[test]
fn validity_is_unsatisfiability_of_the_negation() {
    let ms: Vec<_> = (1..=3).flat_map(|k| all_models(AgentCount::ONE, 0, &["p", "q"], k)).collect();
    for g in exhaustive(&atom_names(2), 2) {
        let valid = !decide_by_enumeration(&g, AgentCount::ONE, 0, Some(3)).unwrap().is_counter_model();
        let neg = negate(&g);
        let satisfiable = ms.iter().any(|m| m.worlds.iter().any(|&w| evaluate(m, w, &neg) == Ok(true)));
        assert_eq!(valid, !satisfiable, "{g}");
    }
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(|seed| random_formula(&mut ChaCha8Rng::seed_from_u64(seed), 4, &atom_names(2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn exactly_one_of_a_formula_and_its_negation_holds(g in arb_formula()) {
        for model in all_models(AgentCount::ONE, 0, &["p", "q"], 2) {
            for &w in &model.worlds {
                prop_assert_ne!(evaluate(&model, w, &g), evaluate(&model, w, &negate(&g)));
            }
        }
    }
}
