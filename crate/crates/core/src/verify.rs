//! Machine checks of the density statements at desk scale, and the
//! exhaustive path sweep over all overlap-free infinite binary words.
//!
//! Every verdict is decided with exact rational comparisons; elapsed times
//! and float columns are reporting only. A `Fail` report carries a concrete
//! counter-instance reproducible from the stated parameters.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::fife::{build_automaton, CaseTag, FifeAutomaton};
use crate::mahler::{empirical_sigma, shift_density, SigmaTable};
use crate::powerfree::find_overlap_from;
use crate::similarity::estimate_lsd_usd;
use crate::words::{h_prefix, matches_between, t_n, thue_morse_prefix, FiniteWord, WordSpec};
use crate::{Error, Rational, Result};

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every instance satisfied the stated property.
    Pass,
    /// A counter-instance was found; see the evidence.
    Fail,
    /// The check could not decide (e.g. a continuation survived a bounded
    /// search); see the evidence for the surviving instance.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Stable name, also the CLI subcommand token.
    pub check_name: &'static str,
    /// Parameters the check ran with.
    pub parameters: String,
    /// Outcome.
    pub verdict: Verdict,
    /// Worst-case instance and exact values, or the counter-instance.
    pub evidence: String,
    /// Wall-clock time.
    pub elapsed: Duration,
}

impl VerificationReport {
    /// Whether the check passed.
    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One-line rendering.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} [{}] {} ({:.2?})",
            self.check_name, self.verdict, self.parameters, self.evidence, self.elapsed
        )
    }
}

fn report(
    check_name: &'static str,
    parameters: String,
    started: Instant,
    failure: Option<(Verdict, String)>,
    pass_evidence: String,
) -> VerificationReport {
    let (verdict, evidence) = failure.unwrap_or((Verdict::Pass, pass_evidence));
    VerificationReport {
        check_name,
        parameters,
        verdict,
        evidence,
        elapsed: started.elapsed(),
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Checks the shifted-window density bounds for the Thue-Morse iterates:
/// for every `n <= n_max` and offset `i` in `[1, 2^n - 1]`, the density of
/// `x` against the length-`2^n` window of `y` at `i` lies in `[1/4, 3/4]`,
/// except at `i = 2^(n-1)` where it is exactly `1/2` when `y` spans
/// consecutive iterates and exactly `0` or `1` when `y` is a squared
/// iterate. Eight sign combinations per offset.
pub fn lemma_shift_windows(n_max: u32) -> VerificationReport {
    let started = Instant::now();
    let mut instances = 0u64;
    let mut failure = None;
    'outer: for n in 0..=n_max {
        let tn = t_n(n).expect("iterate within cap");
        let tbn = tn.complement();
        let tn1 = tn.concat(&tbn); // next iterate
        let tbn1 = tn1.complement();
        let tn_sq = tn.concat(&tn);
        let tbn_sq = tbn.concat(&tbn);
        let len = 1u64 << n;
        let half = 1u64 << n.saturating_sub(1);
        // (x, window source, value pinned at the midpoint offset)
        let cases: [(&FiniteWord, &FiniteWord, Rational, &str); 8] = [
            (&tn, &tn1, rat(1, 2), "a"),
            (&tbn, &tn1, rat(1, 2), "a-comp-left"),
            (&tn, &tbn1, rat(1, 2), "a-comp-right"),
            (&tbn, &tbn1, rat(1, 2), "a-comp-both"),
            (&tn, &tn_sq, rat(0, 1), "b"),
            (&tbn, &tn_sq, rat(1, 1), "b-comp-left"),
            (&tn, &tbn_sq, rat(1, 1), "b-comp-right"),
            (&tbn, &tbn_sq, rat(0, 1), "b-comp-both"),
        ];
        for i in 1..len {
            for (x, y, mid_value, tag) in &cases {
                let matches = matches_between(x, 0, y, i, len);
                let d = rat(matches as i64, len as i64);
                instances += 1;
                let ok = if n >= 1 && i == half {
                    d == *mid_value
                } else {
                    rat(1, 4) <= d && d <= rat(3, 4)
                };
                if !ok {
                    failure = Some((
                        Verdict::Fail,
                        format!("case {tag}, n = {n}, i = {i}: density {d}"),
                    ));
                    break 'outer;
                }
            }
        }
    }
    report(
        "lemma",
        format!("n_max = {n_max}"),
        started,
        failure,
        format!("{instances} instances, all within bounds"),
    )
}

/// Checks the aligned-window corollary: for `n <= n_max`, every offset `i`
/// in `[0, 2^n - 1]` whose gcd with `2^n` is at most `2^(n-2)`, and all
/// eight sign choices of `x, y0, y1` among the iterate and its complement,
/// the density of `x` against `(y0 y1)[i .. i + 2^n - 1]` is in
/// `[1/4, 3/4]`.
pub fn cor_window_bounds(n_max: u32) -> VerificationReport {
    let started = Instant::now();
    let mut instances = 0u64;
    let mut failure = None;
    'outer: for n in 2..=n_max {
        let tn = t_n(n).expect("iterate within cap");
        let tbn = tn.complement();
        let len = 1u64 << n;
        let words = [&tn, &tbn];
        for i in 0..len {
            // gcd(i, 2^n) = 2^(trailing zeros); i = 0 has gcd 2^n.
            let gcd_ok = i != 0 && i.trailing_zeros() <= n - 2;
            if !gcd_ok {
                continue;
            }
            for x in words {
                for y0 in words {
                    for y1 in words {
                        let window = y0.concat(y1);
                        let matches = matches_between(x, 0, &window, i, len);
                        let d = rat(matches as i64, len as i64);
                        instances += 1;
                        if !(rat(1, 4) <= d && d <= rat(3, 4)) {
                            failure =
                                Some((Verdict::Fail, format!("n = {n}, i = {i}: density {d}")));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    report(
        "cor",
        format!("n_max = {n_max}"),
        started,
        failure,
        format!("{instances} instances, all in [1/4, 3/4]"),
    )
}

/// Checks the exact density oscillation between `h` and the Thue-Morse
/// word: the dyadic block identities, the exact values 2/3 and 1/3 at the
/// stated prefix families, strict monotonicity between consecutive powers
/// of two, and the finite-horizon estimator landing near (1/3, 2/3).
pub fn prop_h_densities(
    k_max: u32,
    estimator_horizon: u64,
    tolerance: Rational,
) -> VerificationReport {
    let started = Instant::now();
    let top = 2 * k_max + 1; // largest dyadic block index used
    let total = 1u64 << (top + 1);
    let h = h_prefix(total);
    let t = thue_morse_prefix(total);
    let mut failure = None;

    // Dyadic block identities: h agrees with the iterate (even levels) or
    // its complement (odd levels) on [2^j, 2^(j+1)), while the Thue-Morse
    // word equals the complemented iterate there.
    'blocks: for j in 0..=top {
        let lo = 1u64 << j;
        let tj = t_n(j).expect("iterate within cap");
        let tbj = tj.complement();
        let h_block = h.slice(lo..2 * lo);
        let t_block = t.slice(lo..2 * lo);
        let want_h = if j % 2 == 0 { &tj } else { &tbj };
        if h_block != *want_h {
            failure = Some((Verdict::Fail, format!("h block at level {j} differs")));
            break 'blocks;
        }
        if t_block != tbj {
            failure = Some((Verdict::Fail, format!("t block at level {j} differs")));
            break 'blocks;
        }
    }

    // Exact densities on the two prefix families.
    if failure.is_none() {
        for n in 1..=k_max {
            let even_len = (1u64 << (2 * n)) - 1;
            let m = matches_between(&h, 1, &t, 1, even_len);
            if rat(m as i64, even_len as i64) != rat(2, 3) {
                failure = Some((
                    Verdict::Fail,
                    format!("offset-1 prefix of length {even_len}: {m}/{even_len} != 2/3"),
                ));
                break;
            }
            let odd_len = (1u64 << (2 * n + 1)) - 2;
            let m = matches_between(&h, 2, &t, 2, odd_len);
            if rat(m as i64, odd_len as i64) != rat(1, 3) {
                failure = Some((
                    Verdict::Fail,
                    format!("offset-2 prefix of length {odd_len}: {m}/{odd_len} != 1/3"),
                ));
                break;
            }
        }
    }

    // Strict monotonicity of the offset-1 densities between consecutive
    // powers of two: decreasing after an even power, increasing after an
    // odd one. Equivalent to the block identities, asserted directly on
    // the running densities.
    if failure.is_none() {
        let mut matches = 0u64;
        let mut prev: Option<Rational> = None;
        'mono: for k in 1..total {
            // Density over positions [1, k]; position k lands in the dyadic
            // block with index floor(log2 k), and the density falls while
            // the block index is even, rises while it is odd.
            matches += u64::from(h.get(k) == t.get(k));
            let d = rat(matches as i64, k as i64);
            if let Some(p) = prev {
                let decreasing = k.ilog2() % 2 == 0;
                let ok = if decreasing { d < p } else { d > p };
                if !ok {
                    failure = Some((
                        Verdict::Fail,
                        format!("monotonicity breaks at prefix [1, {k}]: {p} -> {d}"),
                    ));
                    break 'mono;
                }
            }
            prev = Some(d);
        }
    }

    // Finite-horizon estimator brackets the limits within 1/100.
    let mut est_note = String::new();
    if failure.is_none() {
        let tol = tolerance;
        let est = estimate_lsd_usd(
            &WordSpec::HWord,
            &WordSpec::ThueMorse,
            estimator_horizon,
            1,
            rat(1, 2),
        )
        .expect("estimator parameters are valid");
        let lsd_err = (est.lsd_lower - rat(1, 3)).reduced();
        let usd_err = (est.usd_upper - rat(2, 3)).reduced();
        let ok = lsd_err <= tol && -lsd_err <= tol && usd_err <= tol && -usd_err <= tol;
        est_note = format!(
            "estimator at 2^{}: ({}, {})",
            estimator_horizon.ilog2(),
            est.lsd_lower,
            est.usd_upper
        );
        if !ok {
            failure = Some((Verdict::Fail, est_note.clone()));
        }
    }

    report(
        "prop-h",
        format!("k_max = {k_max}, horizon = {estimator_horizon}"),
        started,
        failure,
        format!("blocks, exact 2/3 and 1/3 families, monotonicity; {est_note}"),
    )
}

/// Checks the edge family: the word encoded by `0^n 2 (31)^omega` agrees
/// with `h` (n even) or its complement (n odd) from position `2^n` on, and
/// its density estimates against the Thue-Morse word land near (1/3, 2/3).
/// The estimator horizon grows as `2^(n + 16)` so the junk prefix washes
/// out.
pub fn prop_edge_densities(n_max: u32, tolerance: Rational) -> VerificationReport {
    let started = Instant::now();
    let mut failure = None;
    let mut worst = String::new();
    'outer: for n in 0..=n_max {
        let mut prefix = vec![0u8; n as usize];
        prefix.push(2);
        let path = crate::fife::FifePath::new(prefix, vec![3, 1], None).expect("valid path");

        // Block identity at a fixed desk scale.
        let scale = 1u64 << 14;
        let w = crate::fife::fbe_decode(&path, scale).expect("decode within cap");
        let lo = 1u64 << n;
        let h = h_prefix(scale);
        let tail = w.slice(lo..scale);
        let want = if n % 2 == 0 {
            h.slice(lo..scale)
        } else {
            h.slice(lo..scale).complement()
        };
        if tail != want {
            failure = Some((Verdict::Fail, format!("block identity fails at n = {n}")));
            break 'outer;
        }

        let horizon = 1u64 << (n + 16);
        let est = estimate_lsd_usd(
            &WordSpec::Fife(path),
            &WordSpec::ThueMorse,
            horizon,
            1,
            rat(1, 2),
        )
        .expect("estimator parameters are valid");
        let tol = tolerance;
        let lsd_err = est.lsd_lower - rat(1, 3);
        let usd_err = est.usd_upper - rat(2, 3);
        worst = format!(
            "n = {n}: estimates ({}, {}) at horizon 2^{}",
            est.lsd_lower,
            est.usd_upper,
            horizon.ilog2()
        );
        if !(lsd_err <= tol && -lsd_err <= tol && usd_err <= tol && -usd_err <= tol) {
            failure = Some((Verdict::Fail, worst.clone()));
            break 'outer;
        }
    }
    report(
        "prop-edge",
        format!("n_max = {n_max}"),
        started,
        failure,
        worst,
    )
}

/// Checks the autocorrelation facts: the exact recurrence values stay in
/// `[-1/3, 1/3]`, shift densities stay in `[1/3, 2/3]` (hence within the
/// weaker `[1/4, 3/4]`), and the finite partial sums agree with the exact
/// values within 1/100 at the given horizon.
pub fn mahler_bounds(
    sigma_k_max: u64,
    shift_k_max: u64,
    empirical_k_max: u64,
    horizon: u64,
    tolerance: Rational,
) -> VerificationReport {
    let started = Instant::now();
    let mut table = SigmaTable::new();
    let mut failure = None;
    let third = rat(1, 3);
    for k in 1..=sigma_k_max {
        let v = table.sigma(k);
        if !(-third <= v && v <= third) {
            failure = Some((Verdict::Fail, format!("sigma({k}) = {v} out of bounds")));
            break;
        }
    }
    if failure.is_none() {
        for k in 1..=shift_k_max {
            let d = shift_density(k).expect("k >= 1");
            if !(third <= d && d <= rat(2, 3)) {
                failure = Some((
                    Verdict::Fail,
                    format!("shift density at {k} is {d}, outside [1/3, 2/3]"),
                ));
                break;
            }
        }
    }
    let mut worst = rat(0, 1);
    let mut worst_k = 0;
    if failure.is_none() {
        for k in 0..=empirical_k_max {
            let err = empirical_sigma(k, horizon) - table.sigma(k);
            let err = if err < rat(0, 1) { -err } else { err };
            if err > worst {
                worst = err;
                worst_k = k;
            }
        }
        if worst > tolerance {
            failure = Some((
                Verdict::Fail,
                format!("partial sum at k = {worst_k} off by {worst}"),
            ));
        }
    }
    report(
        "mahler",
        format!(
            "sigma to {sigma_k_max}, shifts to {shift_k_max}, partial sums to {empirical_k_max} at n = {horizon}"
        ),
        started,
        failure,
        format!("worst partial-sum error {worst} at k = {worst_k}"),
    )
}

/// Cross-validates the automaton against the overlap oracle.
///
/// Forward: every valid path of the given depth decodes (capped at
/// `decode_cap` symbols) to an overlap-free word, including the admissible
/// tail completions; inadmissible tail letters on 0-cycles must create an
/// overlap. Reverse: for every reachable state and letter with no
/// transition, the extended decode must die within `continuation` appended
/// binary symbols; a survivor downgrades the verdict to `Inconclusive`
/// rather than `Fail`, with the surviving instance reported.
pub fn automaton_cross_check(depth: u32, continuation: u64, decode_cap: u64) -> VerificationReport {
    automaton_cross_check_of(&build_automaton(), depth, continuation, decode_cap)
}

/// As [`automaton_cross_check`], against a caller-supplied automaton (so a
/// deliberately corrupted table can be shown to fail).
pub fn automaton_cross_check_of(
    aut: &FifeAutomaton,
    depth: u32,
    continuation: u64,
    decode_cap: u64,
) -> VerificationReport {
    let started = Instant::now();
    // Room for the longest tail-death window and the reverse continuations.
    let t = thue_morse_prefix(decode_cap + (1 << 15) + continuation);
    let tbar = t.complement();
    // Shared-decode DFS: child decode appends the scaled block of the new
    // letter to the parent's word, and only overlaps ending in the new
    // block need checking.
    struct Walk<'a> {
        aut: &'a FifeAutomaton,
        t: &'a FiniteWord,
        tbar: &'a FiniteWord,
        decode_cap: u64,
        letters: Vec<u8>,
        decoded: FiniteWord,
        failure: Option<(Verdict, String)>,
        paths: u64,
        tails_checked: std::collections::HashSet<(usize, u64)>,
    }
    impl Walk<'_> {
        fn push_block(&mut self, level: u32, letter: u8) -> u64 {
            let old = self.decoded.len();
            if old >= self.decode_cap {
                return old;
            }
            let block_len = 1u64.checked_shl(level).unwrap_or(u64::MAX);
            let (src, copies) = match letter {
                0 => (self.t, 0),
                1 => (self.t, 1),
                2 => (self.t, 2),
                3 => (self.tbar, 1),
                4 => (self.tbar, 2),
                _ => unreachable!(),
            };
            for _ in 0..copies {
                let room = self.decode_cap - self.decoded.len();
                if room == 0 {
                    break;
                }
                let take = block_len.min(room);
                self.decoded.append(&src.slice(0..take));
            }
            old
        }

        fn go(&mut self, state: usize, remaining: u32) {
            if self.failure.is_some() {
                return;
            }
            // Tail checks once per (state, decoded length) pair, on the
            // shallow part of the tree where the death margin stays cheap.
            if self.letters.len() <= 8 && self.tails_checked.insert((state, self.decoded.len())) {
                let reach = reachable_tail_set(self.aut, state);
                for bit in [0u8, 1u8] {
                    let allowed = reach.is_some_and(|s| s.allows(bit));
                    let src = if bit == 0 { self.t } else { self.tbar };
                    let mut w = self.decoded.clone();
                    // A dying tail can take a while to die: the killing
                    // overlap may be a scaled image of a short one, with a
                    // period close to three times the decoded length.
                    let extend = (8 * w.len()).clamp(1024, 1 << 15);
                    w.append(&src.slice(0..extend));
                    let dies =
                        find_overlap_from(&w, self.decoded.len().saturating_sub(1)).is_some();
                    if allowed && dies {
                        self.failure = Some((
                            Verdict::Fail,
                            format!(
                                "admissible tail {bit} after {:?} creates an overlap",
                                self.letters
                            ),
                        ));
                        return;
                    }
                    if !allowed && !dies {
                        // The automaton claims this tail is impossible; a
                        // bounded check cannot refute a survivor.
                        self.failure = Some((
                            Verdict::Inconclusive,
                            format!(
                                "tail {bit} after {:?} survives {extend} symbols",
                                self.letters
                            ),
                        ));
                        return;
                    }
                }
            }
            if remaining == 0 {
                self.paths += 1;
                return;
            }
            let level = self.letters.len() as u32;
            for letter in 0u8..5 {
                if let Some(next) = self.aut.transition(state, letter) {
                    let old = self.push_block(level, letter);
                    if let Some(w) = find_overlap_from(&self.decoded, old) {
                        self.failure = Some((
                            Verdict::Fail,
                            format!(
                                "path {:?} + {letter} decodes with overlap at {} (period {})",
                                self.letters, w.position, w.period_length
                            ),
                        ));
                        return;
                    }
                    self.letters.push(letter);
                    self.go(next, remaining - 1);
                    self.letters.pop();
                    self.decoded.truncate(old);
                    if self.failure.is_some() {
                        return;
                    }
                }
            }
        }
    }

    let mut walk = Walk {
        aut,
        t: &t,
        tbar: &tbar,
        decode_cap,
        letters: Vec::new(),
        decoded: FiniteWord::new(),
        failure: None,
        paths: 0,
        tails_checked: Default::default(),
    };
    walk.go(aut.start(), depth);
    let paths_checked = walk.paths;
    let mut failure = walk.failure;

    // Reverse direction: undefined transitions must be dead ends. The only
    // continuations a path can generate are scaled images of binary words,
    // so extension is by whole blocks at the next level; raw binary
    // continuations could survive even after genuinely dead edges.
    let mut dead_checked = 0u64;
    if failure.is_none() {
        let witnesses = state_witnesses(aut, depth);
        'outer: for (state, letters) in witnesses
            .iter()
            .enumerate()
            .filter_map(|(s, w)| w.as_ref().map(|w| (s, w)))
        {
            for letter in 0u8..5 {
                if aut.transition(state, letter).is_some() {
                    continue;
                }
                let mut w = decode_letters(letters, &t, &tbar, decode_cap);
                let old = w.len();
                let level = letters.len() as u32;
                let block_len = 1u64.checked_shl(level).unwrap_or(u64::MAX);
                let (src, copies): (&FiniteWord, usize) = match letter {
                    0 => (&t, 0),
                    1 => (&t, 1),
                    2 => (&t, 2),
                    3 => (&tbar, 1),
                    4 => (&tbar, 2),
                    _ => unreachable!(),
                };
                for _ in 0..copies {
                    let take = block_len.min(decode_cap.saturating_sub(w.len()));
                    w.append(&src.slice(0..take));
                }
                if copies == 0 {
                    // An undefined 0-edge appends nothing; the tail checks
                    // in the forward walk already cover those states.
                    continue;
                }
                dead_checked += 1;
                if find_overlap_from(&w, old).is_some() {
                    continue; // already dead
                }
                let next_block = 1u64.checked_shl(level + 1).unwrap_or(u64::MAX);
                let blocks = (continuation.div_ceil(next_block)).max(6);
                if let Some(z) = block_extension(&mut w, level + 1, blocks, &t, &tbar) {
                    failure = Some((
                        Verdict::Inconclusive,
                        format!(
                            "undefined transition {} --{letter}--> survives scaled continuation {z:?}",
                            aut.name(state),
                        ),
                    ));
                    break 'outer;
                }
            }
        }
    }

    report(
        "automaton",
        format!("depth = {depth}, continuation = {continuation}, cap = {decode_cap}"),
        started,
        failure,
        format!("{paths_checked} paths decode overlap-free; {dead_checked} undefined transitions all die"),
    )
}

/// Where following 0-edges from `state` ends up, if anywhere.
fn reachable_tail_set(aut: &FifeAutomaton, mut state: usize) -> Option<crate::fife::TailLetters> {
    let mut steps = 0;
    loop {
        if let Some(set) = aut.tail_letters(state) {
            return Some(set);
        }
        state = aut.transition(state, 0)?;
        steps += 1;
        if steps > aut.state_count() {
            return aut.tail_letters(state);
        }
    }
}

/// Shortest path to each state, by breadth-first search.
fn state_witnesses(aut: &FifeAutomaton, max_depth: u32) -> Vec<Option<Vec<u8>>> {
    let mut out: Vec<Option<Vec<u8>>> = vec![None; aut.state_count()];
    out[aut.start()] = Some(vec![]);
    let mut frontier = vec![aut.start()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for &s in &frontier {
            for l in 0..5u8 {
                if let Some(target) = aut.transition(s, l) {
                    if out[target].is_none() {
                        let mut w = out[s].clone().unwrap();
                        w.push(l);
                        out[target] = Some(w);
                        next.push(target);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

/// Searches for binary letters `z` such that appending the blocks
/// `mu^level(z[0]), mu^level(z[1]), ...` keeps `w` overlap-free; returns
/// the surviving choice if one exists. `w` is restored before returning.
fn block_extension(
    w: &mut FiniteWord,
    level: u32,
    blocks: u64,
    t: &FiniteWord,
    tbar: &FiniteWord,
) -> Option<Vec<u8>> {
    if blocks == 0 {
        return Some(vec![]);
    }
    let block_len = 1u64.checked_shl(level).unwrap_or(u64::MAX).min(t.len());
    for bit in [0u8, 1u8] {
        let old = w.len();
        let src = if bit == 0 { t } else { tbar };
        w.append(&src.slice(0..block_len));
        let ok = find_overlap_from(w, old).is_none();
        if ok {
            if let Some(mut rest) = block_extension(w, level, blocks - 1, t, tbar) {
                w.truncate(old);
                rest.insert(0, bit);
                return Some(rest);
            }
        }
        w.truncate(old);
    }
    None
}

fn decode_letters(letters: &[u8], t: &FiniteWord, tbar: &FiniteWord, cap: u64) -> FiniteWord {
    let mut w = FiniteWord::new();
    for (k, &l) in letters.iter().enumerate() {
        let block_len = 1u64.checked_shl(k as u32).unwrap_or(u64::MAX);
        let (src, copies): (&FiniteWord, usize) = match l {
            0 => (t, 0),
            1 => (t, 1),
            2 => (t, 2),
            3 => (tbar, 1),
            4 => (tbar, 2),
            _ => unreachable!(),
        };
        for _ in 0..copies {
            let take = block_len.min(cap.saturating_sub(w.len()));
            w.append(&src.slice(0..take));
        }
    }
    w
}

/// Parameters of the exhaustive path sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Path letters enumerated.
    pub depth: u32,
    /// Densities are computed on decoded prefixes of exactly this length.
    pub prefix_length: u64,
    /// Fraction of the prefix treated as the tail window.
    pub tail_fraction: Rational,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            depth: 20,
            prefix_length: 1 << 14,
            tail_fraction: rat(1, 2),
        }
    }
}

/// One sweep row: a depth-`depth` valid path (tail-completed when its
/// decode is shorter than the prefix length) with its exact densities.
#[derive(Debug, Clone)]
pub struct SweepRow<'a> {
    /// Path letters.
    pub letters: &'a [u8],
    /// Tail letter for completed rows.
    pub tail_letter: Option<u8>,
    /// Case shape of the (finite or completed) path.
    pub case_tag: CaseTag,
    /// Exact density against the Thue-Morse word at the full prefix length.
    pub sd: Rational,
    /// Minimum density over sampled tail prefixes.
    pub tail_min: Rational,
    /// Maximum density over sampled tail prefixes.
    pub tail_max: Rational,
    /// Whether the decoded prefix equals the Thue-Morse prefix or its
    /// complement (excluded from global extrema).
    pub excluded: bool,
}

impl SweepRow<'_> {
    /// `path` column text: bare letters, with `(0)@b` appended for
    /// tail-completed rows.
    pub fn path_text(&self) -> String {
        let mut s: String = self.letters.iter().map(|l| (b'0' + l) as char).collect();
        if let Some(b) = self.tail_letter {
            s.push_str(&format!("(0)@{b}"));
        }
        s
    }
}

/// Aggregate result of a sweep.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    /// Options the sweep ran with.
    pub depth: u32,
    /// Prefix length densities were computed at.
    pub prefix_length: u64,
    /// Rows emitted (including excluded ones).
    pub row_count: u64,
    /// Rows whose decode equals the Thue-Morse prefix or its complement.
    pub excluded_count: u64,
    /// Smallest full-prefix density over included rows. Tail extrema of
    /// individual rows can sit far outside these bounds at finite scale
    /// (a decode of exactly half the window length disagrees with the
    /// Thue-Morse word everywhere before the alignment flips), so the
    /// global figures quoted against the conjectured window are the
    /// densities at the full prefix length.
    pub global_min: Rational,
    /// Largest full-prefix density over included rows.
    pub global_max: Rational,
    /// Path attaining the global minimum (first in order).
    pub min_path: String,
    /// Path attaining the global maximum (first in order).
    pub max_path: String,
    /// Order-sensitive digest of all rows, for determinism checks.
    pub digest: u64,
}

/// Sampling stride for tail extrema inside a row.
const SWEEP_CHECKPOINT: u64 = 64;

/// Enumerates every valid path of `opts.depth` letters, decodes against the
/// Thue-Morse word to `opts.prefix_length` symbols, and reports exact
/// densities. Paths whose decode is shorter than the prefix length are
/// completed with each admissible tail letter (one row per completion);
/// their continuations all agree on the compared prefix, so no word is
/// missed. Rows stream to `on_row` in lexicographic path order.
/// The digest folds per-first-letter subtree digests in letter order, so
/// aggregates are identical whether subtrees run serially or in parallel.
pub fn sweep(opts: &SweepOptions, mut on_row: impl FnMut(&SweepRow<'_>)) -> Result<SweepSummary> {
    let aut = build_automaton();
    let t = thue_morse_prefix(opts.prefix_length);
    let parts = (0u8..5)
        .map(|letter| sweep_subtree(opts, &aut, &t, letter, &mut on_row))
        .collect();
    fold_sweep_parts(opts, parts)
}

/// As [`sweep`] without row streaming, fanning the five top-level subtrees
/// across up to `jobs` threads. Aggregates match the serial run exactly.
pub fn sweep_with_jobs(opts: &SweepOptions, jobs: usize) -> Result<SweepSummary> {
    if jobs <= 1 {
        return sweep(opts, |_| {});
    }
    let aut = build_automaton();
    let t = thue_morse_prefix(opts.prefix_length);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<SweepPart>>> =
        (0..5).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(5) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= 5 {
                    break;
                }
                let part = sweep_subtree(opts, &aut, &t, i as u8, &mut |_| {});
                *slots[i].lock().unwrap() = Some(part);
            });
        }
    });
    let parts = slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("subtree ran"))
        .collect();
    fold_sweep_parts(opts, parts)
}

/// Aggregates of one top-level subtree.
struct SweepPart {
    row_count: u64,
    excluded_count: u64,
    global_min: Rational,
    global_max: Rational,
    min_path: String,
    max_path: String,
    digest: u64,
}

impl SweepPart {
    fn empty() -> Self {
        SweepPart {
            row_count: 0,
            excluded_count: 0,
            global_min: rat(2, 1),
            global_max: rat(-1, 1),
            min_path: String::new(),
            max_path: String::new(),
            digest: FNV_BASIS,
        }
    }
}

const FNV_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x100_0000_01b3;

fn fold_sweep_parts(opts: &SweepOptions, parts: Vec<SweepPart>) -> Result<SweepSummary> {
    let mut summary = SweepSummary {
        depth: opts.depth,
        prefix_length: opts.prefix_length,
        row_count: 0,
        excluded_count: 0,
        global_min: rat(2, 1),
        global_max: rat(-1, 1),
        min_path: String::new(),
        max_path: String::new(),
        digest: FNV_BASIS,
    };
    for part in parts {
        summary.row_count += part.row_count;
        summary.excluded_count += part.excluded_count;
        if part.global_min < summary.global_min {
            summary.global_min = part.global_min;
            summary.min_path = part.min_path;
        }
        if part.global_max > summary.global_max {
            summary.global_max = part.global_max;
            summary.max_path = part.max_path;
        }
        summary.digest ^= part.digest;
        summary.digest = summary.digest.wrapping_mul(FNV_PRIME);
    }
    if summary.row_count == 0 || summary.row_count == summary.excluded_count {
        return Err(Error::Parse(
            "sweep produced no non-excluded rows; raise the depth".into(),
        ));
    }
    Ok(summary)
}

/// Walks the subtree under one first letter, streaming rows in order.
fn sweep_subtree(
    opts: &SweepOptions,
    aut: &FifeAutomaton,
    t: &FiniteWord,
    first_letter: u8,
    on_row: &mut dyn FnMut(&SweepRow<'_>),
) -> SweepPart {
    assert!(opts.depth >= 1, "sweep depth must be at least 1");
    let n = opts.prefix_length;
    let tail_start = {
        let keep = (n as i64 * opts.tail_fraction.numer()) / opts.tail_fraction.denom();
        (n - keep as u64).max(1)
    };
    let Some(state) = aut.transition(aut.start(), first_letter) else {
        return SweepPart::empty();
    };
    let mut sweeper = Sweeper {
        aut,
        t,
        n,
        tail_start,
        letters: Vec::new(),
        decoded_len: 0,
        matches: 0,
        checkpoints: Vec::new(),
        frozen: None,
        on_row,
        part: SweepPart::empty(),
        tail_grids: HashMap::new(),
    };
    sweeper.append(0, first_letter);
    sweeper.letters.push(first_letter);
    sweeper.go(state, opts.depth - 1);
    sweeper.part
}

/// Frozen row statistics shared by every path extending a prefix whose
/// decode already covers the compared window.
#[derive(Clone, Copy)]
struct Frozen {
    sd: Rational,
    tail_min: Rational,
    tail_max: Rational,
    excluded: bool,
}

struct Sweeper<'a> {
    aut: &'a FifeAutomaton,
    t: &'a FiniteWord,
    n: u64,
    tail_start: u64,
    letters: Vec<u8>,
    decoded_len: u64,
    matches: u64,
    checkpoints: Vec<u64>, // cumulative matches at multiples of the stride
    frozen: Option<Frozen>,
    on_row: &'a mut dyn FnMut(&SweepRow<'_>),
    part: SweepPart,
    // matches of the Thue-Morse tail against t[len..n), keyed by (len, bit)
    tail_grids: HashMap<(u64, u8), (u64, Vec<u64>)>,
}

impl Sweeper<'_> {
    /// Counts matches of the appended block (a slice of t or its
    /// complement) against t at the current offset, updating the
    /// checkpoint grid.
    fn append(&mut self, level: u32, letter: u8) -> (u64, u64, Option<Frozen>) {
        let saved = (self.decoded_len, self.matches, self.frozen);
        if self.frozen.is_some() {
            // Window already covered; deeper blocks cannot change it.
            return saved;
        }
        let block_len = 1u64.checked_shl(level).unwrap_or(u64::MAX);
        let (comp, copies) = match letter {
            0 => (false, 0u32),
            1 => (false, 1),
            2 => (false, 2),
            3 => (true, 1),
            4 => (true, 2),
            _ => unreachable!(),
        };
        for _ in 0..copies {
            if self.decoded_len >= self.n {
                break;
            }
            let take = block_len.min(self.n - self.decoded_len);
            // The block is t[0..take] (or its complement); compare to
            // t[decoded_len..decoded_len + take] chunk by chunk so the
            // checkpoint grid fills along the way.
            let mut done = 0u64;
            while done < take {
                let upto = (take - done).min(64);
                let a = self.t.chunk64(self.decoded_len + done);
                let b = self.t.chunk64(done);
                let agree = if comp { a ^ b } else { !(a ^ b) };
                let mask = if upto == 64 {
                    !0u64
                } else {
                    (1u64 << upto) - 1
                };
                // Record checkpoints crossing inside this chunk.
                let start = self.decoded_len + done;
                let mut next_cp = (self.checkpoints.len() as u64 + 1) * SWEEP_CHECKPOINT;
                while next_cp <= start + upto {
                    let inside = next_cp - start;
                    let m = if inside == 64 {
                        !0u64
                    } else {
                        (1u64 << inside) - 1
                    };
                    self.checkpoints
                        .push(self.matches + (agree & m).count_ones() as u64);
                    next_cp += SWEEP_CHECKPOINT;
                }
                self.matches += (agree & mask).count_ones() as u64;
                done += upto;
            }
            self.decoded_len += take;
        }
        if self.decoded_len >= self.n && self.frozen.is_none() {
            self.frozen = Some(self.freeze());
        }
        saved
    }

    /// Tail extrema and exclusion for the now-complete window.
    fn freeze(&self) -> Frozen {
        debug_assert_eq!(self.decoded_len, self.n);
        let sd = rat(self.matches as i64, self.n as i64);
        let mut min = sd;
        let mut max = sd;
        for (i, &m) in self.checkpoints.iter().enumerate() {
            let len = (i as u64 + 1) * SWEEP_CHECKPOINT;
            if len >= self.tail_start && len <= self.n {
                let d = rat(m as i64, len as i64);
                min = min.min(d);
                max = max.max(d);
            }
        }
        Frozen {
            sd,
            tail_min: min,
            tail_max: max,
            excluded: self.matches == self.n || self.matches == 0,
        }
    }

    /// Frozen stats for the current unfinished decode completed by the
    /// Thue-Morse tail with the given letter.
    fn freeze_with_tail(&mut self, bit: u8) -> Frozen {
        let len = self.decoded_len;
        let n = self.n;
        let t = self.t;
        let grid_cell = self.tail_grids.entry((len, bit)).or_insert_with(|| {
            // Cumulative matches of the tail against t[len..n), at
            // stride boundaries (relative to the whole prefix) plus the
            // final total.
            let mut grid = Vec::new();
            let mut m = 0u64;
            let mut done = 0u64;
            let total = n - len;
            while done < total {
                let upto = (total - done).min(64);
                let a = t.chunk64(len + done);
                let b = t.chunk64(done);
                let agree = if bit == 1 { a ^ b } else { !(a ^ b) };
                let start = len + done;
                let mut next_cp = start.next_multiple_of(SWEEP_CHECKPOINT);
                if next_cp == start {
                    next_cp += SWEEP_CHECKPOINT;
                }
                while next_cp <= start + upto {
                    let inside = next_cp - start;
                    let msk = if inside == 64 {
                        !0u64
                    } else {
                        (1u64 << inside) - 1
                    };
                    grid.push(m + (agree & msk).count_ones() as u64);
                    next_cp += SWEEP_CHECKPOINT;
                }
                let mask = if upto == 64 {
                    !0u64
                } else {
                    (1u64 << upto) - 1
                };
                m += (agree & mask).count_ones() as u64;
                done += upto;
            }
            (m, grid)
        });
        let (tail_total, grid) = (grid_cell.0, grid_cell.1.clone());
        let total_matches = self.matches + tail_total;
        let sd = rat(total_matches as i64, n as i64);
        let mut min = sd;
        let mut max = sd;
        // Checkpoints inside the decoded part.
        for (i, &m) in self.checkpoints.iter().enumerate() {
            let l = (i as u64 + 1) * SWEEP_CHECKPOINT;
            if l >= self.tail_start && l <= n {
                let d = rat(m as i64, l as i64);
                min = min.min(d);
                max = max.max(d);
            }
        }
        // Checkpoints inside the tail part.
        let first_cp = {
            let c = len.next_multiple_of(SWEEP_CHECKPOINT);
            if c == len {
                len + SWEEP_CHECKPOINT
            } else {
                c
            }
        };
        for (i, &m) in grid.iter().enumerate() {
            let l = first_cp + i as u64 * SWEEP_CHECKPOINT;
            if l >= self.tail_start && l <= n {
                let d = rat((self.matches + m) as i64, l as i64);
                min = min.min(d);
                max = max.max(d);
            }
        }
        Frozen {
            sd,
            tail_min: min,
            tail_max: max,
            excluded: total_matches == n || total_matches == 0,
        }
    }

    fn emit(&mut self, frozen: Frozen, tail_letter: Option<u8>) {
        let case_tag = match tail_letter {
            Some(_) => CaseTag::Case1,
            None => classify_finite_letters(&self.letters),
        };
        let row = SweepRow {
            letters: &self.letters,
            tail_letter,
            case_tag,
            sd: frozen.sd,
            tail_min: frozen.tail_min,
            tail_max: frozen.tail_max,
            excluded: frozen.excluded,
        };
        self.part.row_count += 1;
        if frozen.excluded {
            self.part.excluded_count += 1;
        } else {
            if frozen.sd < self.part.global_min {
                self.part.global_min = frozen.sd;
                self.part.min_path = row.path_text();
            }
            if frozen.sd > self.part.global_max {
                self.part.global_max = frozen.sd;
                self.part.max_path = row.path_text();
            }
        }
        // FNV-1a over the row's identifying fields.
        let mut h = self.part.digest;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(FNV_PRIME);
        };
        for &l in row.letters {
            mix(l as u64 + 1);
        }
        mix(row.tail_letter.map_or(0, |b| b as u64 + 1) + 7);
        mix(*row.sd.numer() as u64);
        mix(*row.sd.denom() as u64);
        mix(*row.tail_min.numer() as u64);
        mix(*row.tail_max.numer() as u64);
        self.part.digest = h;
        (self.on_row)(&row);
    }

    fn go(&mut self, state: usize, remaining: u32) {
        if remaining == 0 {
            match self.frozen {
                Some(f) => self.emit(f, None),
                None => {
                    // Decode shorter than the window: every infinite
                    // continuation agrees with a Thue-Morse tail on the
                    // compared prefix; one row per admissible letter.
                    if let Some(set) = reachable_tail_set(self.aut, state) {
                        for bit in [0u8, 1u8] {
                            if set.allows(bit) {
                                let f = self.freeze_with_tail(bit);
                                self.emit(f, Some(bit));
                            }
                        }
                    }
                }
            }
            return;
        }
        let level = self.letters.len() as u32;
        for letter in 0u8..5 {
            if let Some(next) = self.aut.transition(state, letter) {
                let (old_len, old_matches, old_frozen) = self.append(level, letter);
                let old_cps = self.checkpoints.len();
                self.letters.push(letter);
                self.go(next, remaining - 1);
                self.letters.pop();
                self.decoded_len = old_len;
                self.matches = old_matches;
                self.frozen = old_frozen;
                self.checkpoints.truncate(old_cps);
            }
        }
    }
}

/// Case shape of a finite enumerated path: tail-completed rows are tagged
/// by the caller; an all-zero path has no nonzero letter and is treated as
/// ending in zeros.
fn classify_finite_letters(letters: &[u8]) -> CaseTag {
    let Some(first_nz) = letters.iter().position(|&l| l != 0) else {
        return CaseTag::Case1;
    };
    match letters[first_nz] {
        1 | 3 => CaseTag::Case4,
        _ => {
            if letters[first_nz + 1..].contains(&0) {
                CaseTag::Case3
            } else {
                CaseTag::Case2
            }
        }
    }
}

/// Runs every check with its default desk-scale parameters, sequentially.
pub fn run_all() -> Vec<VerificationReport> {
    run_all_with_jobs(1)
}

/// Runs every check, fanning out across up to `jobs` threads; reports come
/// back in a fixed order regardless of parallelism.
pub fn run_all_with_jobs(jobs: usize) -> Vec<VerificationReport> {
    type Task = (&'static str, fn() -> VerificationReport);
    let tasks: Vec<Task> = vec![
        ("lemma", || lemma_shift_windows(12)),
        ("cor", || cor_window_bounds(12)),
        ("prop-h", || prop_h_densities(10, 1 << 20, rat(1, 100))),
        ("prop-edge", || prop_edge_densities(3, rat(1, 100))),
        ("mahler", || {
            mahler_bounds(100_000, 10_000, 64, 1 << 20, rat(1, 100))
        }),
        ("automaton", || automaton_cross_check(12, 64, 1 << 12)),
    ];
    if jobs <= 1 {
        return tasks.into_iter().map(|(_, f)| f()).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<VerificationReport>>> = (0..tasks.len())
        .map(|_| std::sync::Mutex::new(None))
        .collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let r = (tasks[i].1)();
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every task ran"))
        .collect()
}
