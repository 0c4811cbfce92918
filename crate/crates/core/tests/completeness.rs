//! Finite-scale completeness of the automaton: the decoded prefixes of
//! valid paths must cover every overlap-free word that extends to an
//! infinite overlap-free word, and nothing else.

use std::collections::HashSet;

use ovlf_core::fife::{build_automaton, enumerate_paths, fbe_decode, FifePath};
use ovlf_core::powerfree::{find_overlap, overlap_free_extension};
use ovlf_core::words::FiniteWord;

const PREFIX_LEN: u64 = 32;
const VIABILITY_MARGIN: u64 = 64;

/// All overlap-free binary words of the given length, by backtracking.
fn all_overlap_free(len: u64) -> Vec<FiniteWord> {
    let mut out = Vec::new();
    let mut w = FiniteWord::new();
    fn go(w: &mut FiniteWord, len: u64, out: &mut Vec<FiniteWord>) {
        if w.len() == len {
            out.push(w.clone());
            return;
        }
        for bit in [0, 1] {
            w.push(bit);
            if !ovlf_core::powerfree::has_overlap_from(w, w.len() - 1) {
                go(w, len, out);
            }
            w.truncate(w.len() - 1);
        }
    }
    go(&mut w, len, &mut out);
    out
}

#[test]
fn decoded_prefixes_are_exactly_the_viable_overlap_free_words() {
    let aut = build_automaton();

    // Length-32 prefixes of every word some valid path encodes. Depth 7
    // suffices: even an all-ones path fills 2^7 - 1 > 32 symbols, and
    // shorter decodes are completed by their admissible Thue-Morse tails.
    let mut decoded: HashSet<String> = HashSet::new();
    for (letters, state) in enumerate_paths(&aut, 7).unwrap() {
        let len = ovlf_core::fife::decoded_length(&letters);
        if len >= PREFIX_LEN {
            let path = FifePath::new(letters.clone(), vec![1], None).unwrap();
            decoded.insert(fbe_decode(&path, PREFIX_LEN).unwrap().to_string());
        }
        // Tail completions, when the walk can settle into zeros here.
        let mut cycle_state = state;
        let mut on_cycle = aut.tail_letters(cycle_state);
        for _ in 0..aut.state_count() {
            if on_cycle.is_some() {
                break;
            }
            match aut.transition(cycle_state, 0) {
                Some(next) => {
                    cycle_state = next;
                    on_cycle = aut.tail_letters(cycle_state);
                }
                None => break,
            }
        }
        if let Some(set) = on_cycle {
            for bit in [0u8, 1u8] {
                if set.allows(bit) {
                    let path = FifePath::new(letters.clone(), vec![0], Some(bit)).unwrap();
                    decoded.insert(fbe_decode(&path, PREFIX_LEN).unwrap().to_string());
                }
            }
        }
    }

    // Forward: every decode is overlap-free.
    for w in &decoded {
        let word: FiniteWord = w.parse().unwrap();
        assert_eq!(find_overlap(&word), None, "decode {w} has an overlap");
    }

    // Completeness: every overlap-free word of the prefix length that stays
    // extendable appears among the decodes.
    let mut viable = 0u64;
    for word in all_overlap_free(PREFIX_LEN) {
        if overlap_free_extension(&word, VIABILITY_MARGIN).is_none() {
            continue; // dead end, no infinite word starts this way
        }
        viable += 1;
        assert!(
            decoded.contains(&word.to_string()),
            "viable overlap-free word {word} is not encoded by any path"
        );
    }
    // Sanity on the scale of the check.
    assert!(
        viable > 100,
        "only {viable} viable words at length {PREFIX_LEN}"
    );
    assert!(
        decoded.len() as u64 >= viable,
        "decode set smaller than viable set"
    );
}
