//! The Fife automaton for overlap-free infinite binary words, eventually
//! periodic path specifications over `{0,1,2,3,4}`, and the path-to-binary
//! encoding.
//!
//! A path letter at level `k` contributes the block `mu^k(c(letter))` to the
//! decoded word, where `c` maps `0,1,2,3,4` to `ε,0,00,1,11`. Paths ending in
//! `0^omega` decode to a finite word followed by a Thue-Morse tail
//! `mu^omega(a)`, with the admissible tail letters determined by which
//! 0-labeled cycle of the automaton the path ends in.

use std::fmt;
use std::str::FromStr;

use crate::words::{thue_morse_prefix, FiniteWord};
use crate::{Error, Result, DEFAULT_ENUMERATION_CAP, DEFAULT_MEMORY_CAP};

/// Number of path letters.
pub const ALPHABET: usize = 5;

/// Binary word contributed by one path letter before scaling:
/// `c(0) = ε`, `c(1) = 0`, `c(2) = 00`, `c(3) = 1`, `c(4) = 11`.
pub fn c(letter: u8) -> FiniteWord {
    let bits: &[u8] = match letter {
        0 => &[],
        1 => &[0],
        2 => &[0, 0],
        3 => &[1],
        4 => &[1, 1],
        _ => panic!("letter {letter} outside {{0..4}}"),
    };
    FiniteWord::from_bits(bits)
}

/// An eventually periodic word over `{0,1,2,3,4}`: `prefix (period)^omega`,
/// plus a tail letter exactly when the period collapses to `0^omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FifePath {
    prefix: Vec<u8>,
    period: Vec<u8>,
    tail_letter: Option<u8>,
}

impl FifePath {
    /// Builds a path, normalizing an all-zero period to the single letter
    /// `0`. A tail letter must be present exactly for such periods.
    pub fn new(prefix: Vec<u8>, period: Vec<u8>, tail_letter: Option<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidPath("period must be nonempty".into()));
        }
        for &l in prefix.iter().chain(period.iter()) {
            if l > 4 {
                return Err(Error::InvalidPath(format!("letter {l} outside {{0..4}}")));
            }
        }
        if let Some(b) = tail_letter {
            if b > 1 {
                return Err(Error::InvalidPath(format!(
                    "tail letter {b} must be 0 or 1"
                )));
            }
        }
        let period = if period.iter().all(|&l| l == 0) {
            vec![0]
        } else {
            period
        };
        if period == [0] && tail_letter.is_none() {
            return Err(Error::MissingTailLetter);
        }
        if period != [0] && tail_letter.is_some() {
            return Err(Error::InvalidPath(
                "tail letter only applies to paths ending in 0^omega".into(),
            ));
        }
        Ok(Self {
            prefix,
            period,
            tail_letter,
        })
    }

    /// Preperiodic part.
    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    /// Repeating part.
    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Tail letter for `0^omega` paths.
    pub fn tail_letter(&self) -> Option<u8> {
        self.tail_letter
    }

    /// Whether the path ends in `0^omega`.
    pub fn ends_in_zeros(&self) -> bool {
        self.period == [0]
    }

    /// Letter at position `k` of the unrolled stream.
    pub fn letter_at(&self, k: u64) -> u8 {
        let plen = self.prefix.len() as u64;
        if k < plen {
            self.prefix[k as usize]
        } else {
            self.period[((k - plen) % self.period.len() as u64) as usize]
        }
    }

    /// First position from which every letter of the stream is `0`, if the
    /// stream ends in `0^omega`.
    pub fn zero_tail_start(&self) -> Option<u64> {
        if !self.ends_in_zeros() {
            return None;
        }
        let last_nonzero = self.prefix.iter().rposition(|&l| l != 0);
        Some(match last_nonzero {
            Some(i) => i as u64 + 1,
            None => 0,
        })
    }

    /// Canonical form: primitive period, with any prefix symbols that merely
    /// unroll the period absorbed into it. Two paths denote the same stream
    /// exactly when their canonical forms agree.
    pub fn canonical(&self) -> FifePath {
        let mut period = primitive_root(&self.period);
        let mut prefix = self.prefix.clone();
        // Absorb trailing prefix letters that match the rotated period.
        while let Some(&last) = prefix.last() {
            if last == *period.last().unwrap() {
                prefix.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        FifePath {
            prefix,
            period,
            tail_letter: self.tail_letter,
        }
    }

    /// Stream equality (representation-independent).
    pub fn same_stream(&self, other: &FifePath) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Smallest word whose repetition generates `w`.
fn primitive_root(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

impl fmt::Display for FifePath {
    /// Path text: `PREFIX(PERIOD)` with `@BIT` appended for `0^omega` paths.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.prefix {
            write!(f, "{l}")?;
        }
        write!(f, "(")?;
        for &l in &self.period {
            write!(f, "{l}")?;
        }
        write!(f, ")")?;
        if let Some(b) = self.tail_letter {
            write!(f, "@{b}")?;
        }
        Ok(())
    }
}

impl FromStr for FifePath {
    type Err = Error;

    /// Grammar: `PREFIX(PERIOD)[@BIT]` over `{0,1,2,3,4}`, with exponent
    /// sugar `0^n` accepted anywhere in PREFIX or PERIOD. A bare word with
    /// no parenthesized part is rejected: infinite paths need a period.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, tail) = match s.split_once('@') {
            Some((b, t)) => {
                let bit = match t.trim() {
                    "0" => 0u8,
                    "1" => 1u8,
                    other => return Err(Error::InvalidPath(format!("bad tail letter {other:?}"))),
                };
                (b.trim(), Some(bit))
            }
            None => (s, None),
        };
        let open = body
            .find('(')
            .ok_or_else(|| Error::InvalidPath(format!("missing (PERIOD) in {s:?}")))?;
        let close = body
            .rfind(')')
            .filter(|&i| i == body.len() - 1 && i > open)
            .ok_or_else(|| Error::InvalidPath(format!("malformed (PERIOD) in {s:?}")))?;
        let prefix = parse_letters(&body[..open])?;
        let period = parse_letters(&body[open + 1..close])?;
        FifePath::new(prefix, period, tail)
    }
}

/// Parses a `{0..4}` word with `L^n` exponent sugar.
fn parse_letters(text: &str) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(ch) = chars.next() {
        let letter = ch
            .to_digit(10)
            .filter(|&d| d <= 4)
            .ok_or_else(|| Error::InvalidPath(format!("bad path letter {ch:?}")))?
            as u8;
        if chars.peek() == Some(&'^') {
            chars.next();
            let mut digits = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                digits.push(chars.next().unwrap());
            }
            let n: usize = digits
                .parse()
                .map_err(|_| Error::InvalidPath(format!("bad exponent in {text:?}")))?;
            out.extend(std::iter::repeat_n(letter, n));
        } else {
            out.push(letter);
        }
    }
    Ok(out)
}

/// First `n` symbols of the word encoded by `path`, default cap.
pub fn fbe_decode(path: &FifePath, n: u64) -> Result<FiniteWord> {
    fbe_decode_with_cap(path, n, DEFAULT_MEMORY_CAP)
}

/// First `n` symbols of the word encoded by `path`.
///
/// The decode consumes path letters `x[0], x[1], ...`, appending
/// `mu^k(c(x[k]))` at step `k`; for letter `1` this block is the Thue-Morse
/// iterate `t_k`, for `3` its complement, and `2`/`4` contribute the block
/// twice. Paths ending in `0^omega` finish with the Thue-Morse word or its
/// complement per the tail letter.
pub fn fbe_decode_with_cap(path: &FifePath, n: u64, cap: u64) -> Result<FiniteWord> {
    if n > cap {
        return Err(Error::LimitExceeded { requested: n, cap });
    }
    let t = thue_morse_prefix(n);
    let tbar = t.complement();
    let mut out = FiniteWord::new();
    let zero_tail = path.zero_tail_start();
    let mut k = 0u64;
    while out.len() < n {
        if zero_tail.is_some_and(|z| k >= z) {
            let a = path.tail_letter.ok_or(Error::MissingTailLetter)?;
            let take = n - out.len();
            let block = if a == 0 { &t } else { &tbar };
            out.append(&block.slice(0..take));
            break;
        }
        let letter = path.letter_at(k);
        let block_len = 1u64.checked_shl(k as u32).unwrap_or(u64::MAX);
        let (source, copies): (&FiniteWord, usize) = match letter {
            0 => (&t, 0),
            1 => (&t, 1),
            2 => (&t, 2),
            3 => (&tbar, 1),
            4 => (&tbar, 2),
            _ => unreachable!("letters validated at construction"),
        };
        for _ in 0..copies {
            if out.len() >= n {
                break;
            }
            let take = block_len.min(n - out.len());
            out.append(&source.slice(0..take));
        }
        k += 1;
    }
    Ok(out)
}

/// Total decoded length contributed by the first `depth` letters of a
/// stream: `sum over k < depth of 2^k * |c(x[k])|`.
pub fn decoded_length(letters: &[u8]) -> u64 {
    letters
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let unit = match l {
                0 => 0u64,
                1 | 3 => 1,
                2 | 4 => 2,
                _ => panic!("letter {l} outside {{0..4}}"),
            };
            unit << k
        })
        .sum()
}

/// Admissible tail letters for a `0`-labeled cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailLetters {
    /// Whether tail letter `0` (Thue-Morse tail) is admissible.
    pub zero: bool,
    /// Whether tail letter `1` (complemented tail) is admissible.
    pub one: bool,
}

impl TailLetters {
    /// Whether `bit` belongs to the set.
    pub fn allows(&self, bit: u8) -> bool {
        (bit == 0 && self.zero) || (bit == 1 && self.one)
    }
}

/// The deterministic automaton over `{0,1,2,3,4}` whose infinite paths
/// encode exactly the overlap-free infinite binary words.
#[derive(Debug, Clone)]
pub struct FifeAutomaton {
    names: Vec<&'static str>,
    start: usize,
    delta: Vec<[Option<usize>; ALPHABET]>,
    tail_sets: Vec<Option<TailLetters>>,
}

impl FifeAutomaton {
    /// Number of states.
    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    /// Start state.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Display name of a state.
    pub fn name(&self, state: usize) -> &'static str {
        self.names[state]
    }

    /// State reached from `state` on `letter`, if the edge exists.
    pub fn transition(&self, state: usize, letter: u8) -> Option<usize> {
        self.delta[state][letter as usize]
    }

    /// Tail letters admissible when a path settles into `0^omega` at
    /// `state`; `None` for states not on a 0-labeled cycle.
    pub fn tail_letters(&self, state: usize) -> Option<TailLetters> {
        self.tail_sets[state]
    }

    /// Runs the letters from the start state; `None` if a transition is
    /// missing.
    pub fn run(&self, letters: impl IntoIterator<Item = u8>) -> Option<usize> {
        let mut state = self.start;
        for l in letters {
            state = self.transition(state, l)?;
        }
        Some(state)
    }

    /// Copy with one transition overridden, for cross-validation
    /// experiments against deliberately corrupted tables.
    pub fn with_transition(&self, state: usize, letter: u8, target: Option<usize>) -> Self {
        let mut out = self.clone();
        out.delta[state][letter as usize] = target;
        out
    }
}

/// Whether the unrolled stream follows defined transitions forever and, for
/// `0^omega` paths, ends with an admissible tail letter.
///
/// On eventually periodic input it suffices to walk until a
/// (state, position-within-period) pair repeats.
pub fn validate_path(aut: &FifeAutomaton, path: &FifePath) -> bool {
    let mut state = aut.start();
    for &l in path.prefix() {
        match aut.transition(state, l) {
            Some(next) => state = next,
            None => return false,
        }
    }
    let period = path.period();
    let mut seen = vec![false; aut.state_count() * period.len()];
    let mut pos = 0usize;
    loop {
        if seen[state * period.len() + pos] {
            break;
        }
        seen[state * period.len() + pos] = true;
        match aut.transition(state, period[pos]) {
            Some(next) => state = next,
            None => return false,
        }
        pos = (pos + 1) % period.len();
    }
    if path.ends_in_zeros() {
        let tail = path
            .tail_letter()
            .expect("0^omega path carries tail letter");
        match aut.tail_letters(state) {
            Some(set) => set.allows(tail),
            None => false,
        }
    } else {
        true
    }
}

/// All automaton-valid words of exactly `depth` letters with their end
/// states, in lexicographic order.
pub fn enumerate_paths(aut: &FifeAutomaton, depth: u32) -> Result<Vec<(Vec<u8>, usize)>> {
    enumerate_paths_with_cap(aut, depth, DEFAULT_ENUMERATION_CAP)
}

/// As [`enumerate_paths`] with an explicit depth cap.
pub fn enumerate_paths_with_cap(
    aut: &FifeAutomaton,
    depth: u32,
    cap: u32,
) -> Result<Vec<(Vec<u8>, usize)>> {
    if depth > cap {
        return Err(Error::LimitExceeded {
            requested: depth as u64,
            cap: cap as u64,
        });
    }
    let mut out = Vec::new();
    let mut letters = Vec::with_capacity(depth as usize);
    fn go(
        aut: &FifeAutomaton,
        state: usize,
        remaining: u32,
        letters: &mut Vec<u8>,
        out: &mut Vec<(Vec<u8>, usize)>,
    ) {
        if remaining == 0 {
            out.push((letters.clone(), state));
            return;
        }
        for l in 0..ALPHABET as u8 {
            if let Some(next) = aut.transition(state, l) {
                letters.push(l);
                go(aut, next, remaining - 1, letters, out);
                letters.pop();
            }
        }
    }
    go(aut, aut.start(), depth, &mut letters, &mut out);
    Ok(out)
}

/// The four path shapes used in the density analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Ends in `0^omega`: the word is a finite prefix followed by the
    /// Thue-Morse word or its complement.
    Case1,
    /// Begins `0^n{2,4}` and contains exactly `n` zeros.
    Case2,
    /// Begins `0^n{2,4}` and contains more than `n` zeros.
    Case3,
    /// Begins `0^n{1,3}` (and does not end in `0^omega`).
    Case4,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            CaseTag::Case1 => 1,
            CaseTag::Case2 => 2,
            CaseTag::Case3 => 3,
            CaseTag::Case4 => 4,
        };
        write!(f, "case{n}")
    }
}

/// Classifies a valid path into the four-case taxonomy.
pub fn classify_path(aut: &FifeAutomaton, path: &FifePath) -> Result<CaseTag> {
    if !validate_path(aut, path) {
        return Err(Error::InvalidPath(format!("{path} is not a valid path")));
    }
    Ok(classify_stream(path))
}

/// Case shape of the stream alone, without automaton validation.
pub(crate) fn classify_stream(path: &FifePath) -> CaseTag {
    if path.ends_in_zeros() {
        return CaseTag::Case1;
    }
    let prefix = path.prefix();
    let period = path.period();
    // Position of the first nonzero letter; one exists since the period is
    // not all zeros.
    let leading = prefix.iter().position(|&l| l != 0).unwrap_or(prefix.len());
    let first = if leading < prefix.len() {
        prefix[leading]
    } else {
        let nz = period.iter().position(|&l| l != 0).unwrap();
        // Leading zeros continue into the period only when the prefix is all
        // zeros and the period starts with some; fold them into `leading`
        // conceptually (only the letter identity matters below).
        period[nz]
    };
    if first == 1 || first == 3 {
        return CaseTag::Case4;
    }
    // Zeros after the leading run?
    let extra_zero_in_prefix = prefix.iter().skip(leading + 1).any(|&l| l == 0);
    let zero_in_period = period.contains(&0);
    if extra_zero_in_prefix || zero_in_period {
        CaseTag::Case3
    } else {
        CaseTag::Case2
    }
}

/// Whether the stream belongs to one of the four regular families for which
/// the density bounds hold regardless of path validity:
///
/// 1. `{1,2,3,4} Sigma5* 0^omega`
/// 2. `0* {2(31), 4(13)}^omega`
/// 3. `0* {2(31)*{ε,3}, 4(13)*{ε,1}} 0 {1,3} {0,1,3}^omega`
/// 4. `(0*{1,3})^2 {0,1,3}^omega`
pub fn in_generalized_family(path: &FifePath) -> bool {
    family_one(path) || family_two(path) || family_three(path) || family_four(path)
}

fn family_one(path: &FifePath) -> bool {
    path.ends_in_zeros() && {
        let first = path.letter_at(0);
        (1..=4).contains(&first)
    }
}

fn family_two(path: &FifePath) -> bool {
    if path.ends_in_zeros() {
        return false;
    }
    let n = leading_zeros(path);
    let head = path.letter_at(n);
    let target = match head {
        2 => FifePath::new(zeros_then(n, 2), vec![3, 1], None).unwrap(),
        4 => FifePath::new(zeros_then(n, 4), vec![1, 3], None).unwrap(),
        _ => return false,
    };
    path.same_stream(&target)
}

fn family_three(path: &FifePath) -> bool {
    if path.ends_in_zeros() {
        return false;
    }
    let mut i = leading_zeros(path);
    let (a, b) = match path.letter_at(i) {
        2 => (3u8, 1u8),
        4 => (1, 3),
        _ => return false,
    };
    i += 1;
    // (ab)* with an optional trailing `a`, then `0`, all inside the decided
    // part of the stream; bounded because a match must leave the cycle.
    let bound = (path.prefix().len() + 2 * path.period().len() + 4) as u64;
    while i + 1 < bound && path.letter_at(i) == a && path.letter_at(i + 1) == b {
        i += 2;
    }
    if i < bound && path.letter_at(i) == a {
        i += 1;
    }
    if i >= bound || path.letter_at(i) != 0 {
        return false;
    }
    i += 1;
    if i >= bound || !matches!(path.letter_at(i), 1 | 3) {
        return false;
    }
    rest_within(path, i + 1, &[0, 1, 3])
}

fn family_four(path: &FifePath) -> bool {
    if path.ends_in_zeros() {
        return false;
    }
    let mut i = leading_zeros(path);
    if !matches!(path.letter_at(i), 1 | 3) {
        return false;
    }
    i += 1;
    let bound = (path.prefix().len() + 2 * path.period().len() + 4) as u64;
    while i < bound && path.letter_at(i) == 0 {
        i += 1;
    }
    if i >= bound || !matches!(path.letter_at(i), 1 | 3) {
        return false;
    }
    rest_within(path, i + 1, &[0, 1, 3])
}

fn leading_zeros(path: &FifePath) -> u64 {
    let mut i = 0;
    let bound = (path.prefix().len() + path.period().len()) as u64;
    while i < bound && path.letter_at(i) == 0 {
        i += 1;
    }
    i
}

fn zeros_then(n: u64, letter: u8) -> Vec<u8> {
    let mut v = vec![0u8; n as usize];
    v.push(letter);
    v
}

/// Every stream letter from position `from` on lies in `allowed`.
fn rest_within(path: &FifePath, from: u64, allowed: &[u8]) -> bool {
    let plen = path.prefix().len() as u64;
    for k in from..plen {
        if !allowed.contains(&path.letter_at(k)) {
            return false;
        }
    }
    path.period().iter().all(|l| allowed.contains(l))
}

/// The automaton, with the transition table listed state by state.
///
/// States on 0-labeled cycles carry their admissible tail-letter sets: the
/// start state's self-loop and one two-cycle admit both tail letters, one
/// two-cycle admits only `1`, and one only `0`. The table is checked against
/// the overlap oracle by `tests/derive_automaton.rs` and the cross-validation
/// suite.
pub fn build_automaton() -> FifeAutomaton {
    fife_table::build()
}

mod fife_table;
