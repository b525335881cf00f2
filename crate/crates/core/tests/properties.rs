mod common;

use std::collections::{BTreeMap, BTreeSet};

use domino::coding::{
    compile_codings, decide_codings, rewrite_instance, CodingDomain, CodingInstance, LazyCore, PatternCoding,
};
use domino::freegroup::{ball, ball_size, concat, reduce, Generator};
use domino::io::{CodingFile, FormulaFile, InstanceFile};
use domino::ksat::{
    decide_ksat_free, sat_to_dp, truncation_sat_check, InputFormula, Literal, TruncationResult,
};
use domino::membership::build_stallings;
use domino::oracle::{ball_colorings_exist, validate_witness, BallQuery, OracleAnswer, Rules};
use domino::recurrence::{core_to_configuration, find_simple_balloon, is_balloon, Balloon};
use domino::tileset::{
    build_tileset_graph, completeness_core, decide_dp_free, decide_dp_z_windowed, pruning_levels, CompletenessCore,
    TilesetGraph,
};
use domino::{Caps, NNInstance, Triple, Word};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn generators(rank: usize) -> impl Strategy<Value = Vec<Generator>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..12).prop_map(|v| {
        v.into_iter()
            .map(|(i, neg)| if neg { Generator::negative(i) } else { Generator::positive(i) })
            .collect()
    })
}

fn word(rank: usize) -> impl Strategy<Value = Word> {
    generators(rank).prop_map(move |g| reduce(rank, &g).unwrap())
}

/// `(rank, letters, seed)` for a random standard instance.
fn instance_params(max_letters: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (1..=2usize, 1..=max_letters, any::<u64>())
}

fn instance((rank, letters, seed): (usize, usize, u64)) -> NNInstance {
    random_instance(&mut rng(seed), rank, letters)
}

/// Random codings of radius at most one over `F_rank`.
fn codings(rank: usize, letters: usize, seed: u64) -> CodingInstance {
    let mut r = rng(seed);
    let cells = ball(rank, 1, 64).unwrap();
    let list = (0..r.gen_range(0..=4))
        .map(|_| {
            let size = r.gen_range(1..=2);
            let mut chosen: Vec<Word> = cells.choose_multiple(&mut r, size).cloned().collect();
            chosen.sort();
            PatternCoding::new(chosen.into_iter().map(|w| (w, r.gen_range(0..letters)))).unwrap()
        })
        .collect();
    CodingInstance::new(rank, (0..letters).map(|a| a.to_string()).collect(), list).unwrap()
}

/// Every reduced closed walk at `a0` through core letters with distinct
/// letter/step pairs, tested against the balloon conditions.
fn exhaustive_balloon(graph: &TilesetGraph, core: &CompletenessCore, a0: usize) -> bool {
    fn go(
        graph: &TilesetGraph,
        core: &CompletenessCore,
        letters: &mut Vec<usize>,
        steps: &mut Vec<Generator>,
        used: &mut BTreeSet<(usize, Generator)>,
    ) -> bool {
        let current = *letters.last().unwrap();
        for g in Generator::all(graph.generators()) {
            if steps.last() == Some(&g.inverse()) || (!steps.is_empty() && used.contains(&(current, g))) {
                continue;
            }
            let track = !steps.is_empty();
            for b in 0..graph.letters() {
                if !core.contains(b) || !graph.allows_step(current, b, g) {
                    continue;
                }
                if track {
                    used.insert((current, g));
                }
                letters.push(b);
                steps.push(g);
                let closed = b == letters[0]
                    && is_balloon(&Balloon::new(letters.clone(), steps.clone()).unwrap(), graph, true).is_ok();
                if closed || go(graph, core, letters, steps, used) {
                    return true;
                }
                letters.pop();
                steps.pop();
                if track {
                    used.remove(&(current, g));
                }
            }
        }
        false
    }
    core.contains(a0) && go(graph, core, &mut vec![a0], &mut Vec::new(), &mut BTreeSet::new())
}

/// A free basis of `F_2` obtained by a few Nielsen moves.
fn nielsen_basis(seed: u64) -> Vec<Word> {
    let mut r = rng(seed);
    let mut basis = Word::free_generators(2);
    for _ in 0..r.gen_range(0..=2) {
        let i = r.gen_range(0..2);
        let j = 1 - i;
        let other = if r.gen() { basis[j].clone() } else { basis[j].inverse() };
        basis[i] = if r.gen() { &basis[i] * &other } else { &other * &basis[i] };
    }
    basis
}

fn random_formula(rank: usize, seed: u64) -> InputFormula {
    let mut r = rng(seed);
    let cells = ball(rank, 1, 64).unwrap();
    let k = r.gen_range(1..=2);
    let clauses = (0..r.gen_range(1..=3))
        .map(|_| {
            (0..k)
                .map(|_| {
                    let w = cells.choose(&mut r).unwrap().clone();
                    if r.gen() {
                        Literal::pos(w)
                    } else {
                        Literal::neg(w)
                    }
                })
                .collect()
        })
        .collect();
    InputFormula::new(rank, k, clauses).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_is_idempotent(rank in 1..=3usize, g in generators(3)) {
        let g: Vec<Generator> = g.into_iter().filter(|x| x.index() < rank).collect();
        let w = reduce(rank, &g).unwrap();
        prop_assert_eq!(reduce(rank, w.letters()).unwrap(), w.clone());
        prop_assert!(w.letters().windows(2).all(|p| p[1] != p[0].inverse()));
    }

    #[test]
    fn group_laws(u in word(2), v in word(2), w in word(2)) {
        let e = Word::identity(2);
        prop_assert_eq!(concat(&concat(&u, &v).unwrap(), &w).unwrap(), concat(&u, &concat(&v, &w).unwrap()).unwrap());
        prop_assert_eq!(concat(&u, &e).unwrap(), u.clone());
        prop_assert_eq!(concat(&e, &u).unwrap(), u.clone());
        prop_assert!(concat(&u, &u.inverse()).unwrap().is_identity());
    }

    #[test]
    fn balls_nest(rank in 1..=3usize, r in 0..4usize) {
        let small = ball(rank, r, 1 << 16).unwrap();
        let big: BTreeSet<Word> = ball(rank, r + 1, 1 << 16).unwrap().into_iter().collect();
        prop_assert_eq!(small.len() as u128, ball_size(rank, r));
        prop_assert!(small.iter().all(|w| big.contains(w) && w.len() <= r));
        prop_assert!(small.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn core_is_a_fixpoint(p in instance_params(4)) {
        let inst = instance(p);
        let graph = build_tileset_graph(&inst);
        let core = completeness_core(&inst).unwrap();
        for a in core.letters() {
            for g in Generator::all(inst.rank()) {
                let b = core.extend(a, g).unwrap();
                prop_assert!(core.contains(b) && graph.allows_step(a, b, g));
                prop_assert!(graph.step(a, g).iter().filter(|&&x| core.contains(x)).min() == Some(&b));
            }
        }
        let levels = pruning_levels(&inst).unwrap();
        let last = levels.last().unwrap();
        prop_assert_eq!((0..inst.letter_count()).filter(|&a| last[a]).collect::<Vec<_>>(), core.letters());
    }

    #[test]
    fn more_rules_shrink_the_core(p in instance_params(4), extra in any::<u64>()) {
        let inst = instance(p);
        let mut r = rng(extra);
        let t = Triple::new(r.gen_range(0..p.1), r.gen_range(0..p.1), r.gen_range(0..p.0));
        let bigger = NNInstance::numbered(p.0, p.1, inst.forbidden().iter().copied().chain([t])).unwrap();
        let small = completeness_core(&bigger).unwrap();
        let large = completeness_core(&inst).unwrap();
        prop_assert!(small.letters().iter().all(|&a| large.contains(a)));
    }

    #[test]
    fn free_and_windowed_agree_on_z(letters in 1..=5usize, seed in any::<u64>()) {
        let inst = random_instance(&mut rng(seed), 1, letters);
        let free = decide_dp_free(&inst).unwrap().nonempty;
        let z = decide_dp_z_windowed(&inst, &Caps::default()).unwrap().nonempty;
        prop_assert_eq!(free, z);
    }

    #[test]
    fn balloon_search_is_sound_and_complete(p in instance_params(3)) {
        let inst = instance(p);
        let graph = build_tileset_graph(&inst);
        let core = completeness_core(&inst).unwrap();
        for a in 0..inst.letter_count() {
            let found = find_simple_balloon(&graph, &core, a);
            if let Some(b) = &found {
                prop_assert_eq!(b.base(), a);
                prop_assert_eq!(is_balloon(b, &graph, true), Ok(()));
            }
            prop_assert_eq!(found.is_some(), exhaustive_balloon(&graph, &core, a));
        }
    }

    #[test]
    fn lazy_core_matches_eager(rank in 1..=2usize, letters in 1..=3usize, seed in any::<u64>()) {
        let inst = codings(rank, letters, seed);
        let caps = Caps::default();
        let eager = compile_codings(&inst, CodingDomain::Ball(1), &caps).unwrap();
        let core = completeness_core(&eager.instance).unwrap();
        let lazy = LazyCore::compute(&inst, CodingDomain::Ball(1), &caps).unwrap();
        for phi in 0..eager.instance.letter_count() {
            prop_assert_eq!(core.contains(phi), lazy.contains(phi));
        }
        let hull = decide_codings(&inst, None, &caps).unwrap().answer;
        prop_assert_eq!(hull, !core.is_empty());
    }

    #[test]
    fn rewriting_preserves_elements_and_answers(letters in 1..=2usize, seed in any::<u64>(), basis in any::<u64>()) {
        let inst = codings(2, letters, seed);
        let basis = nielsen_basis(basis);
        let caps = Caps::default();
        let rewritten = rewrite_instance(&inst, &basis).unwrap();
        for (c, d) in inst.codings().iter().zip(rewritten.codings()) {
            let expected: BTreeMap<Word, usize> =
                c.entries().iter().map(|(w, a)| (w.substitute(&basis).unwrap(), *a)).collect();
            let got: BTreeMap<Word, usize> = d.entries().iter().cloned().collect();
            prop_assert_eq!(got, expected);
        }
        let before = decide_codings(&inst, None, &caps).unwrap().answer;
        match decide_codings(&rewritten, None, &caps) {
            Ok(v) => prop_assert_eq!(v.answer, before),
            Err(e) => prop_assert!(e.is_cap()),
        }
    }

    #[test]
    fn folding_is_confluent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let mut gens: Vec<Word> = (0..k).map(|_| { let len = r.gen_range(1..=3); random_word(&mut r, 2, len) }).collect();
        let first = build_stallings(2, &gens).unwrap();
        gens.shuffle(&mut r);
        for g in gens.iter_mut() {
            if r.gen() {
                *g = g.inverse();
            }
        }
        let second = build_stallings(2, &gens).unwrap();
        prop_assert_eq!(first.transitions(), second.transitions());
        for u in ball(2, 4, 1 << 16).unwrap() {
            prop_assert_eq!(first.member(&u).unwrap(), second.member(&u).unwrap());
        }
    }

    #[test]
    fn matrices_are_exactly_the_local_solutions(rank in 1..=2usize, seed in any::<u64>()) {
        let f = random_formula(rank, seed);
        let c = sat_to_dp(&f, &[Word::free_generators(rank)[0].pow(2)], &Caps::default()).unwrap();
        let slots: Vec<Word> = f.cells();
        let distinct: Vec<Word> = slots.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut expected = BTreeSet::new();
        for mask in 0..1u32 << distinct.len() {
            let x = |w: &Word| mask >> distinct.iter().position(|d| d == w).unwrap() & 1 == 1;
            if f.satisfied_at(&Word::identity(rank), x) {
                expected.insert(slots.iter().map(x).collect::<Vec<bool>>());
            }
        }
        let got: BTreeSet<Vec<bool>> = c.matrices.iter().cloned().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn truncations_of_satisfiable_formulas_are_satisfiable(rank in 1..=2usize, seed in any::<u64>()) {
        let f = random_formula(rank, seed);
        let h = vec![Word::free_generators(rank)[0].pow(2)];
        let caps = Caps::default();
        let v = decide_ksat_free(&f, &h, &caps).unwrap();
        for r in 0..=4 {
            let t = truncation_sat_check(&f, &h, r, &caps).unwrap();
            if v.satisfiable {
                prop_assert!(matches!(t, TruncationResult::Satisfiable(_)));
            }
            if t == TruncationResult::Unsatisfiable {
                prop_assert!(!v.satisfiable);
            }
        }
    }

    #[test]
    fn oracle_is_monotone_in_radius(p in instance_params(3)) {
        let inst = instance(p);
        let caps = Caps::default();
        for a in 0..inst.letter_count() {
            let answers: Vec<Option<bool>> = (0..=3)
                .map(|r| ball_colorings_exist(Rules::Nearest(&inst), BallQuery::seeded(r, a), &caps).unwrap().decided())
                .collect();
            prop_assert!(answers.windows(2).all(|w| w[0] >= w[1]), "{:?}", answers);
        }
    }

    #[test]
    fn witnesses_revalidate(p in instance_params(3)) {
        let inst = instance(p);
        let caps = Caps::default();
        let core = completeness_core(&inst).unwrap();
        for a in core.letters() {
            let col = core_to_configuration(&inst, &core, a, 3, &caps).unwrap();
            prop_assert!(col.is_total());
            prop_assert!(validate_witness(&col, Rules::Nearest(&inst)).is_ok());
        }
        if let OracleAnswer::Exists(col) = ball_colorings_exist(Rules::Nearest(&inst), BallQuery::radius(3), &caps).unwrap() {
            prop_assert!(validate_witness(&col, Rules::Nearest(&inst)).is_ok());
        }
    }

    #[test]
    fn files_round_trip(p in instance_params(4), seed in any::<u64>()) {
        let inst = instance(p);
        let file = InstanceFile::from_instance(&inst);
        let text = serde_json::to_string(&file).unwrap();
        prop_assert_eq!(&serde_json::to_string(&file).unwrap(), &text);
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_instance().unwrap().0, inst);

        let c = codings(p.0, p.1, seed);
        let back: CodingFile = serde_json::from_str(&serde_json::to_string(&CodingFile::from_instance(&c)).unwrap()).unwrap();
        prop_assert_eq!(back.to_instance().unwrap().0, c);

        let f = random_formula(p.0, seed);
        let h = vec![Word::free_generators(p.0)[0].pow(3)];
        let file = FormulaFile::from_formula(&f, &h);
        let back: FormulaFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
        prop_assert_eq!(back.to_formula().unwrap(), (f, h));
    }
}
