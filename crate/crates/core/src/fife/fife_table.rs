//! Transition table of the Fife automaton.
//!
//! Eleven states. `A` is the start. The automaton is symmetric under the
//! letter swap `1 <-> 3`, `2 <-> 4` (which complements the decoded word):
//! `B <-> D`, `C <-> E`, `F <-> I`, `G <-> J`, `H <-> K`.
//!
//! Paths may settle into `0^omega` on the self-loop at `A` or on one of the
//! three 0-labeled two-cycles; the admissible tail letters are both on `A`
//! and between `B` and `D`, only `1` between `G` and `H`, and only `0`
//! between `J` and `K`.
//!
//! `tests/derive_automaton.rs` recomputes every row of this table from the
//! overlap oracle.

use super::{FifeAutomaton, TailLetters, ALPHABET};

const BOTH: Option<TailLetters> = Some(TailLetters {
    zero: true,
    one: true,
});
const ONLY_ONE: Option<TailLetters> = Some(TailLetters {
    zero: false,
    one: true,
});
const ONLY_ZERO: Option<TailLetters> = Some(TailLetters {
    zero: true,
    one: false,
});
const NONE: Option<TailLetters> = None;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const E: usize = 4;
const F: usize = 5;
const G: usize = 6;
const H: usize = 7;
const I: usize = 8;
const J: usize = 9;
const K: usize = 10;

pub(super) fn build() -> FifeAutomaton {
    let names = vec!["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K"];
    let n = None;
    #[rustfmt::skip]
    let delta: Vec<[Option<usize>; ALPHABET]> = vec![
        //         0        1        2        3        4
        /* A */ [Some(A), Some(B), Some(C), Some(D), Some(E)],
        /* B */ [Some(D), Some(B), n,       Some(E), n      ],
        /* C */ [Some(F), n,       n,       Some(E), n      ],
        /* D */ [Some(B), Some(C), n,       Some(D), n      ],
        /* E */ [Some(I), Some(C), n,       n,       n      ],
        /* F */ [n,       n,       n,       Some(G), n      ],
        /* G */ [Some(H), n,       n,       Some(D), n      ],
        /* H */ [Some(G), n,       n,       Some(E), n      ],
        /* I */ [n,       Some(J), n,       n,       n      ],
        /* J */ [Some(K), Some(B), n,       n,       n      ],
        /* K */ [Some(J), Some(C), n,       n,       n      ],
    ];
    let tail_sets = vec![
        BOTH,      // A: self-loop on 0
        BOTH,      // B: cycles with D
        NONE,      // C
        BOTH,      // D: cycles with B
        NONE,      // E
        NONE,      // F
        ONLY_ONE,  // G: cycles with H
        ONLY_ONE,  // H: cycles with G
        NONE,      // I
        ONLY_ZERO, // J: cycles with K
        ONLY_ZERO, // K: cycles with J
    ];
    FifeAutomaton {
        names,
        start: A,
        delta,
        tail_sets,
    }
}
