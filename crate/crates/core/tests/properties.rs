//! Property-based invariants over randomly generated words and trees.

use proptest::collection::vec;
use proptest::prelude::*;

use rrt_core::functionals::{self, FunctionalRecord};
use rrt_core::gem::{inverse_stick, SimplexVec};
use rrt_core::harris::{grow_chain, HarrisTree};
use rrt_core::rng::Stream;
use rrt_core::words::Word;

fn arb_word() -> impl Strategy<Value = Word> {
    vec(1u32..=6, 0..8).prop_map(|letters| Word::new(letters).unwrap())
}

fn arb_tree() -> impl Strategy<Value = HarrisTree> {
    (1u64..60, any::<u64>()).prop_map(|(n, seed)| grow_chain(n, &mut Stream::new(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dual_is_involutive(word in arb_word()) {
        let d = word.dual();
        prop_assert_eq!(d.dual(), word.clone());
        prop_assert_eq!(d.weight(), word.weight());
        if !word.is_root() {
            prop_assert_eq!(d.horizontal(), word.depth() as u64 - 1);
        }
    }

    #[test]
    fn meet_is_the_lattice_meet(a in arb_word(), b in arb_word()) {
        let m = a.meet(&b);
        prop_assert!(m.is_prefix_of(&a) && m.is_prefix_of(&b));
        // maximality: one more letter of a is no longer a prefix of b
        if m.depth() < a.depth() {
            let next = Word::new(a.letters()[..m.depth() + 1].to_vec()).unwrap();
            prop_assert!(!next.is_prefix_of(&b));
        }
        prop_assert_eq!(a.meet(&b), b.meet(&a));
        prop_assert_eq!(a.meet(&a), a.clone());
        prop_assert_eq!(a.meet(&Word::root()), Word::root());
    }

    #[test]
    fn pred_chain_reaches_the_root_in_weight_steps(word in arb_word()) {
        let mut cur = word.clone();
        let mut steps = 0u64;
        while !cur.is_root() {
            cur = cur.pred().unwrap();
            steps += 1;
        }
        prop_assert_eq!(steps, word.weight());
    }

    #[test]
    fn flat_strip_and_sharp_are_inverse_moves(word in arb_word()) {
        prop_assert_eq!(word.flat().letters()[0], 1);
        prop_assert_eq!(word.flat().weight(), word.weight() + 1);
        if !word.is_root() {
            prop_assert_eq!(word.sharp().weight(), word.weight() + 1);
            prop_assert_eq!(word.sharp().depth(), word.depth());
        }
    }

    #[test]
    fn word_display_round_trips(word in arb_word()) {
        prop_assert_eq!(word.to_string().parse::<Word>().unwrap(), word);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subtree_sizes_satisfy_the_recursion(x in arb_tree()) {
        for u in x.words() {
            let children: u64 = (1..=x.child_count(u)).map(|i| x.subtree_size(&u.child(i))).sum();
            prop_assert_eq!(x.subtree_size(u), children + 1);
        }
        let total: u64 = x.words().map(|u| x.subtree_size(u)).sum();
        prop_assert_eq!(total, functionals::tpl(&x) + x.len());
    }

    #[test]
    fn wiener_routes_agree(x in arb_tree()) {
        prop_assert_eq!(functionals::wiener_pairwise(&x), functionals::wiener_subtree(&x));
    }

    #[test]
    fn dual_preserves_size_and_swaps_path_lengths(x in arb_tree()) {
        let d = x.dual();
        prop_assert_eq!(d.len(), x.len());
        prop_assert_eq!(d.dual(), x.clone());
        if x.len() >= 2 {
            prop_assert_eq!(functionals::hpl(&d), functionals::tpl(&x) - (x.len() - 1));
            prop_assert_eq!(functionals::tpl(&d), functionals::hpl(&x) + (x.len() - 1));
        }
    }

    #[test]
    fn tree_json_round_trips(x in arb_tree()) {
        let json = serde_json::to_string(&x).unwrap();
        let back: HarrisTree = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn successors_grow_by_one_everywhere(x in arb_tree()) {
        let succ = x.successors();
        prop_assert_eq!(succ.len() as u64, x.len());
        for s in succ {
            prop_assert_eq!(s.len(), x.len() + 1);
        }
    }

    #[test]
    fn record_sampler_matches_tree_functionals(n in 1u64..120, seed in any::<u64>()) {
        let x = grow_chain(n, &mut Stream::new(seed));
        let fast = functionals::sample_record(n, &mut Stream::new(seed));
        prop_assert_eq!(fast, FunctionalRecord::of_tree(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Stick recovery itself is well conditioned only while the remainder
    // stays healthy; each stick near 1 multiplies the drift by z/(1-z).
    #[test]
    fn stick_inversion_recovers_moderate_sticks(sticks in vec(0.001f64..0.9, 1..10)) {
        let point = SimplexVec::from_sticks(sticks.iter().copied());
        let recovered = inverse_stick(&point).unwrap();
        for (orig, rec) in sticks.iter().zip(&recovered) {
            prop_assert!((orig - rec).abs() < 1e-6, "stick {orig} became {rec}");
        }
    }

    // Recovering sticks close to 1 from rounded masses is ill-conditioned,
    // but replaying the recovered sticks must reproduce the masses.
    #[test]
    fn stick_inversion_replays_the_masses(sticks in vec(0.001f64..0.999, 1..24)) {
        let point = SimplexVec::from_sticks(sticks.iter().copied());
        if let Ok(recovered) = inverse_stick(&point) {
            let replay = SimplexVec::from_sticks(recovered);
            for i in 0..point.len() {
                let (a, b) = (point.mass(i), replay.mass(i));
                prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "mass {a} became {b}");
            }
        }
    }

    #[test]
    fn decompose_reassembles(seed in any::<u64>(), n in 2u64..40) {
        let x = grow_chain(n, &mut Stream::new(seed));
        let (k, flat, sharp) = x.decompose().unwrap();
        prop_assert_eq!(k, x.subtree_size(&Word::from_slice(&[1])));
        prop_assert_eq!(flat.len() + sharp.len(), x.len());
        let mut words: Vec<Word> = flat.words().map(Word::flat).collect();
        words.extend(sharp.words().filter(|u| !u.is_root()).map(Word::sharp));
        words.push(Word::root());
        prop_assert_eq!(HarrisTree::from_words(words).unwrap(), x);
    }
}
