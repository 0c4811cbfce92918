//! Overlap and fractional-power detection, plus the fragility experiment.
//!
//! An overlap is a factor of the form `axaxa` where `a` is a single letter
//! and `x` is possibly empty: equivalently, a factor of length `2p + 1` with
//! period `p`. The detectors below run the direct quadratic scan a machine
//! word at a time; at the scales used by the verification suite this is fast
//! and easy to trust.

use crate::words::{thue_morse_prefix, FiniteWord};
use crate::{Error, Result};

/// Location of one overlap inside a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlapWitness {
    /// Start of the factor `axaxa`.
    pub position: u64,
    /// Length of the repeating unit `ax`.
    pub period_length: u64,
    /// Total factor length, always `2 * period_length + 1`.
    pub total_length: u64,
}

impl OverlapWitness {
    fn new(position: u64, period_length: u64) -> Self {
        Self {
            position,
            period_length,
            total_length: 2 * period_length + 1,
        }
    }

    /// Checks the witness against the word it was found in.
    pub fn holds_in(&self, w: &FiniteWord) -> bool {
        let p = self.period_length;
        self.position + 2 * p < w.len()
            && (0..=p).all(|j| w.get(self.position + j) == w.get(self.position + j + p))
    }
}

/// Earliest start position of a length-`p + 1` run of agreements between
/// `w` and `w` shifted by `p`, scanning only run starts `>= min_start`.
/// A run starting at `i` means `w[i + j] = w[i + j + p]` for `j = 0 ..= p`,
/// i.e. an overlap of period `p` at `i`.
fn earliest_overlap_with_period(w: &FiniteWord, p: u64, min_start: u64) -> Option<u64> {
    let n = w.len();
    if n < 2 * p + 1 || min_start + 2 * p + 1 > n {
        return None;
    }
    let needed = p + 1;
    let limit = n - p; // positions j with w[j], w[j+p] both in range
    let mut carry = 0u64; // length of the agreement run ending just before j
    let mut j = min_start;
    while j < limit {
        let take = (limit - j).min(64);
        let mask = if take == 64 {
            !0u64
        } else {
            (1u64 << take) - 1
        };
        let agree = !(word_at(w, j) ^ word_at(w, j + p)) & mask;
        if agree == mask {
            carry += take;
            if carry >= needed {
                return Some(j + take - carry);
            }
        } else {
            // Does the carried run, extended by the chunk's low bits, reach?
            if carry > 0 {
                let low_ones = agree.trailing_ones() as u64;
                if carry + low_ones >= needed {
                    return Some(j - carry);
                }
            }
            // Runs fully inside the chunk, in parallel. A set bit at
            // position b after the shift-AND cascade marks ones at
            // [b - needed + 1, b].
            if needed <= take {
                let mut y = agree;
                let mut have = 1u64;
                while have < needed && y != 0 {
                    let s = (needed - have).min(have);
                    y &= y << s;
                    have += s;
                }
                if have >= needed && y != 0 {
                    let end = y.trailing_zeros() as u64;
                    return Some(j + end + 1 - needed);
                }
            }
            carry = if take == 64 {
                agree.leading_ones() as u64
            } else {
                (agree << (64 - take)).leading_ones() as u64
            };
        }
        j += take;
    }
    None
}

#[inline]
fn word_at(w: &FiniteWord, off: u64) -> u64 {
    w.chunk64(off)
}

/// Finds an overlap in `w`, choosing the leftmost and then shortest witness.
pub fn find_overlap(w: &FiniteWord) -> Option<OverlapWitness> {
    find_overlap_from(w, 0)
}

/// Finds the leftmost-then-shortest overlap ending at position
/// `>= min_end`. With `min_end = 0` this is a full scan; after appending to
/// a word already known overlap-free, passing the old length skips the
/// prefix.
pub fn find_overlap_from(w: &FiniteWord, min_end: u64) -> Option<OverlapWitness> {
    let n = w.len();
    let mut best: Option<(u64, u64)> = None;
    let mut p = 1;
    while 2 * p < n {
        let min_start = min_end.saturating_sub(2 * p);
        if let Some(i) = earliest_overlap_with_period(w, p, min_start) {
            match best {
                Some((bi, bp)) if (bi, bp) <= (i, p) => {}
                _ => best = Some((i, p)),
            }
            // No later period can beat a witness that starts at 0.
            if i == 0 && min_end == 0 {
                let (bi, bp) = best.unwrap();
                if bi == 0 && bp == 1 {
                    break;
                }
            }
        }
        p += 1;
    }
    best.map(|(i, p)| OverlapWitness::new(i, p))
}

/// Whether `w` contains any overlap ending at position `>= min_end`.
pub fn has_overlap_from(w: &FiniteWord, min_end: u64) -> bool {
    let n = w.len();
    let mut p = 1;
    while 2 * p < n {
        let min_start = min_end.saturating_sub(2 * p);
        if earliest_overlap_with_period(w, p, min_start).is_some() {
            return true;
        }
        p += 1;
    }
    false
}

/// Whether `w` is overlap-free.
pub fn is_overlap_free(w: &FiniteWord) -> bool {
    !has_overlap_from(w, 0)
}

/// Tries to extend `w` by `extra` symbols keeping every prefix overlap-free.
/// Returns a surviving extension if one exists.
///
/// Depth-first with incremental overlap checks; the overlap-free extension
/// tree is narrow, so dead prefixes die quickly in practice.
pub fn overlap_free_extension(w: &FiniteWord, extra: u64) -> Option<FiniteWord> {
    if has_overlap_from(w, 0) {
        return None;
    }
    let mut cur = w.clone();
    fn go(cur: &mut FiniteWord, remaining: u64) -> bool {
        if remaining == 0 {
            return true;
        }
        for bit in [0u8, 1u8] {
            cur.push(bit);
            // Only overlaps ending at the new last symbol can be new.
            if !has_overlap_from(cur, cur.len() - 1) && go(cur, remaining - 1) {
                return true;
            }
            cur.truncate(cur.len() - 1);
        }
        false
    }
    if go(&mut cur, extra) {
        Some(cur)
    } else {
        None
    }
}

/// Strictness convention for fractional powers.
///
/// The literature writes "x-power-free" both for avoiding exponents
/// strictly greater than x and for avoiding x itself; both are provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Reject factors with exponent `> p/q`; exact `p/q`-powers are allowed.
    /// Overlap-free equals this mode at `p/q = 2`.
    #[default]
    RejectAbove,
    /// Reject factors with exponent `>= p/q` (squares count at `p/q = 2`).
    RejectAtOrAbove,
}

/// Whether no factor of `w` is a repetition with exponent beyond `p/q`.
///
/// A factor of length `l` with period `pi` has exponent `l / pi`; the scan
/// considers every period and the maximal run of agreements for it, which
/// covers the smallest-period formulation.
pub fn is_pq_power_free(w: &FiniteWord, p: u64, q: u64, mode: Strictness) -> Result<bool> {
    if q == 0 || p <= q {
        return Err(Error::InvalidExponent { p, q });
    }
    let n = w.len();
    let mut pi = 1u64;
    while pi < n {
        // Longest run of agreements between w and w shifted by pi.
        let limit = n - pi;
        let mut run = 0u64;
        let mut best = 0u64;
        let mut j = 0u64;
        while j < limit {
            let take = (limit - j).min(64);
            let mask = if take == 64 {
                !0u64
            } else {
                (1u64 << take) - 1
            };
            let agree = !(word_at(w, j) ^ word_at(w, j + pi)) & mask;
            if agree == mask {
                run += take;
            } else {
                let mut base = 0u64;
                while base < take {
                    let rest = agree >> base;
                    if rest & 1 == 0 {
                        run = 0;
                        base += (rest.trailing_zeros() as u64).min(take - base);
                    } else {
                        let ones = (rest.trailing_ones() as u64).min(take - base);
                        run += ones;
                        best = best.max(run);
                        base += ones;
                        if base < take {
                            run = 0;
                        }
                    }
                }
            }
            best = best.max(run);
            j += take;
        }
        // A run of length r yields a factor of length r + pi with period pi.
        let len = best + pi;
        let reject = match mode {
            Strictness::RejectAbove => q * len > p * pi,
            Strictness::RejectAtOrAbove => q * len >= p * pi,
        };
        if best > 0 && reject {
            return Ok(false);
        }
        pi += 1;
    }
    Ok(true)
}

/// Flips the listed positions in the Thue-Morse prefix of length `window`
/// and reports the first overlap of the flipped word.
///
/// `None` means the window was too small to exhibit one, never that the
/// flipped infinite word is overlap-free.
pub fn fragility_probe(flip_positions: &[u64], window: u64) -> Result<Option<OverlapWitness>> {
    if flip_positions.is_empty() {
        return Err(Error::Parse(
            "fragility probe needs at least one flip".into(),
        ));
    }
    let max = *flip_positions.iter().max().unwrap();
    if window < 2 * max + 4 {
        return Err(Error::LimitExceeded {
            requested: 2 * max + 4,
            cap: window,
        });
    }
    let mut w = thue_morse_prefix(window);
    let mut flipped = vec![false; window as usize];
    for &i in flip_positions {
        if !flipped[i as usize] {
            flipped[i as usize] = true;
        }
    }
    w = FiniteWord::from_fn(window, |i| {
        let b = w.get(i);
        if flipped[i as usize] {
            1 - b
        } else {
            b
        }
    });
    Ok(find_overlap(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;
    use crate::words::{complement, mu, t_n};

    fn word(s: &str) -> FiniteWord {
        s.parse().unwrap()
    }

    /// Try every (position, period) pair directly.
    fn brute_force_overlap(w: &FiniteWord) -> Option<OverlapWitness> {
        let n = w.len();
        for i in 0..n {
            for p in 1..=n / 2 {
                if i + 2 * p >= n {
                    break;
                }
                if (0..=p).all(|j| w.get(i + j) == w.get(i + j + p)) {
                    return Some(OverlapWitness::new(i, p));
                }
            }
        }
        None
    }

    #[test]
    fn overlap_examples() {
        let w = word("01010");
        let witness = find_overlap(&w).unwrap();
        assert_eq!((witness.position, witness.period_length), (0, 2));
        assert_eq!(witness.total_length, 5);
        assert!(witness.holds_in(&w));

        assert_eq!(find_overlap(&word("0110100110010110")), None);

        let aaa = find_overlap(&word("000")).unwrap();
        assert_eq!((aaa.position, aaa.period_length), (0, 1));
    }

    #[test]
    fn overlap_agrees_with_brute_force_on_random_words() {
        let mut rng = SplitMix64::new(0xd1ce);
        for _ in 0..300 {
            let len = rng.range(1, 512);
            let w = FiniteWord::from_fn(len, |_| rng.bit());
            let fast = find_overlap(&w);
            let brute = brute_force_overlap(&w);
            assert_eq!(
                fast.map(|x| (x.position, x.period_length)),
                brute.map(|x| (x.position, x.period_length)),
                "word {w}"
            );
        }
    }

    #[test]
    fn iterates_are_overlap_free() {
        for n in 0..=16 {
            assert_eq!(find_overlap(&t_n(n).unwrap()), None, "t_{n}");
        }
    }

    #[test]
    fn overlap_freeness_survives_complement_and_morphism() {
        let mut rng = SplitMix64::new(77);
        let mut checked = 0;
        while checked < 40 {
            let base = FiniteWord::from_fn(rng.range(1, 64), |_| rng.bit());
            if let Some(w) = overlap_free_extension(&base.slice(0..1), rng.range(1, 1 << 10)) {
                assert_eq!(find_overlap(&complement(&w)), None, "complement of {w:?}");
                assert_eq!(find_overlap(&mu(&w)), None, "mu of {w:?}");
                checked += 1;
            }
        }
    }

    #[test]
    fn square_mode_matches_direct_square_finder() {
        fn contains_square(w: &FiniteWord) -> bool {
            let n = w.len();
            (0..n).any(|i| {
                (1..=(n - i) / 2).any(|p| (0..p).all(|j| w.get(i + j) == w.get(i + j + p)))
            })
        }
        let mut rng = SplitMix64::new(3);
        for _ in 0..200 {
            let w = FiniteWord::from_fn(rng.range(1, 256), |_| rng.bit());
            assert_eq!(
                is_pq_power_free(&w, 2, 1, Strictness::RejectAtOrAbove).unwrap(),
                !contains_square(&w),
                "word {w}"
            );
        }
    }

    #[test]
    fn default_mode_at_two_matches_overlap_freeness() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..200 {
            let w = FiniteWord::from_fn(rng.range(1, 200), |_| rng.bit());
            assert_eq!(
                is_pq_power_free(&w, 2, 1, Strictness::RejectAbove).unwrap(),
                find_overlap(&w).is_none(),
                "word {w}"
            );
        }
    }

    #[test]
    fn power_free_examples() {
        assert!(!is_pq_power_free(&word("0101"), 2, 1, Strictness::RejectAtOrAbove).unwrap());
        assert!(is_pq_power_free(&t_n(8).unwrap(), 7, 3, Strictness::RejectAbove).unwrap());
        assert!(is_pq_power_free(&word("00100110"), 7, 3, Strictness::RejectAbove).unwrap());
        assert!(matches!(
            is_pq_power_free(&word("01"), 1, 1, Strictness::RejectAbove),
            Err(Error::InvalidExponent { .. })
        ));
    }

    #[test]
    fn fragility_examples() {
        let w = fragility_probe(&[0], 64).unwrap().unwrap();
        assert_eq!(
            (w.position, w.period_length),
            (0, 1),
            "flipped word starts 111"
        );
        assert!(fragility_probe(&[5], 256).unwrap().is_some());
        assert!(fragility_probe(&[], 64).is_err());
        assert!(fragility_probe(&[100], 64).is_err());
    }
}
