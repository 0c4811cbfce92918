//! Finite binary words, the Thue-Morse morphism, and random-access
//! generators for the named infinite words.
//!
//! Words are bit-packed (64 symbols per machine word, least significant bit
//! first) so that prefixes up to `2^28` symbols fit in modest memory and
//! match counting runs a word at a time. Slicing copies; everything here is
//! an immutable value once built.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::fife::FifePath;
use crate::{Error, Result, DEFAULT_ITERATE_CAP, DEFAULT_MEMORY_CAP};

const WORD_BITS: u64 = 64;

/// An immutable binary word over `{0,1}`, bit-packed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteWord {
    bits: Vec<u64>,
    len: u64,
}

impl FiniteWord {
    /// The empty word.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a word of `len` symbols from an index function returning 0 or 1.
    pub fn from_fn(len: u64, mut f: impl FnMut(u64) -> u8) -> Self {
        let mut bits = vec![0u64; len.div_ceil(WORD_BITS) as usize];
        for i in 0..len {
            if f(i) & 1 == 1 {
                bits[(i / WORD_BITS) as usize] |= 1 << (i % WORD_BITS);
            }
        }
        Self { bits, len }
    }

    /// Builds a word from explicit symbols.
    pub fn from_bits(symbols: &[u8]) -> Self {
        Self::from_fn(symbols.len() as u64, |i| symbols[i as usize])
    }

    /// Number of symbols.
    pub fn len(&self) -> u64 {
        self.len
    }

    /// Whether the word is empty.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at position `i` (0-indexed). Panics if out of range.
    pub fn get(&self, i: u64) -> u8 {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        ((self.bits[(i / WORD_BITS) as usize] >> (i % WORD_BITS)) & 1) as u8
    }

    /// Appends one symbol in place.
    pub fn push(&mut self, symbol: u8) {
        let i = self.len;
        if i.is_multiple_of(WORD_BITS) {
            self.bits.push(0);
        }
        if symbol & 1 == 1 {
            *self.bits.last_mut().unwrap() |= 1 << (i % WORD_BITS);
        }
        self.len += 1;
    }

    /// 64 packed symbols starting at position `off`, least significant bit
    /// first, zero-padded past the end of the word.
    #[inline]
    pub fn chunk64(&self, off: u64) -> u64 {
        self.word_at(off)
    }

    /// 64 bits starting at bit offset `off` (zero-padded past the end).
    #[inline]
    fn word_at(&self, off: u64) -> u64 {
        let w = (off / WORD_BITS) as usize;
        let r = off % WORD_BITS;
        let lo = self.bits.get(w).copied().unwrap_or(0);
        if r == 0 {
            lo
        } else {
            let hi = self.bits.get(w + 1).copied().unwrap_or(0);
            (lo >> r) | (hi << (WORD_BITS - r))
        }
    }

    /// Appends all of `other` in place.
    pub fn append(&mut self, other: &FiniteWord) {
        let shift = self.len % WORD_BITS;
        if shift == 0 {
            self.bits.extend_from_slice(&other.bits);
        } else {
            // Last word of self is partially filled; stitch other across it.
            let base = self.bits.len() - 1;
            self.bits
                .resize(((self.len + other.len).div_ceil(WORD_BITS)) as usize, 0);
            for (k, &w) in other.bits.iter().enumerate() {
                self.bits[base + k] |= w << shift;
                if base + k + 1 < self.bits.len() {
                    self.bits[base + k + 1] = w >> (WORD_BITS - shift);
                }
            }
        }
        self.len += other.len;
        self.bits.truncate((self.len.div_ceil(WORD_BITS)) as usize);
        self.mask_tail();
    }

    /// Truncates in place to the first `len` symbols.
    pub fn truncate(&mut self, len: u64) {
        if len < self.len {
            self.len = len;
            self.bits.truncate((len.div_ceil(WORD_BITS)) as usize);
            self.mask_tail();
        }
    }

    fn mask_tail(&mut self) {
        let r = self.len % WORD_BITS;
        if r != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Concatenation.
    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut out = self.clone();
        out.append(other);
        out
    }

    /// Copy of the symbols in `range` (half-open).
    pub fn slice(&self, range: std::ops::Range<u64>) -> FiniteWord {
        assert!(range.start <= range.end && range.end <= self.len);
        let len = range.end - range.start;
        let mut bits = Vec::with_capacity(len.div_ceil(WORD_BITS) as usize);
        let mut off = range.start;
        let mut remaining = len;
        while remaining > 0 {
            bits.push(self.word_at(off));
            off += WORD_BITS;
            remaining = remaining.saturating_sub(WORD_BITS);
        }
        let mut out = FiniteWord { bits, len };
        out.mask_tail();
        out
    }

    /// Bitwise complement (0 <-> 1).
    pub fn complement(&self) -> FiniteWord {
        let mut out = FiniteWord {
            bits: self.bits.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.mask_tail();
        out
    }

    /// Number of positions where `self` and `other` agree.
    ///
    /// Both words must have equal length.
    pub fn count_matches(&self, other: &FiniteWord) -> u64 {
        assert_eq!(self.len, other.len, "count_matches needs equal lengths");
        matches_between(self, 0, other, 0, self.len)
    }

    /// Iterator over symbols.
    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Number of positions `j < len` with `x[xs + j] == y[ys + j]`.
///
/// Runs a machine word at a time regardless of the alignment of the two
/// ranges.
pub fn matches_between(x: &FiniteWord, xs: u64, y: &FiniteWord, ys: u64, len: u64) -> u64 {
    assert!(
        xs + len <= x.len && ys + len <= y.len,
        "range out of bounds"
    );
    let mut matches = 0u64;
    let mut done = 0u64;
    while done < len {
        let chunk = (len - done).min(WORD_BITS);
        let a = x.word_at(xs + done);
        let b = y.word_at(ys + done);
        let same = !(a ^ b);
        let mask = if chunk == WORD_BITS {
            !0u64
        } else {
            (1u64 << chunk) - 1
        };
        matches += (same & mask).count_ones() as u64;
        done += chunk;
    }
    matches
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 96 {
            write!(f, "\"{self}\"")
        } else {
            let head = self.slice(0..64);
            write!(f, "\"{head}...\" ({} symbols)", self.len)
        }
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = FiniteWord::new();
        for c in s.chars() {
            match c {
                '0' => w.push(0),
                '1' => w.push(1),
                _ => return Err(Error::Parse(format!("invalid word symbol {c:?}"))),
            }
        }
        Ok(w)
    }
}

/// Image under the Thue-Morse morphism: `0 -> 01`, `1 -> 10`.
pub fn mu(w: &FiniteWord) -> FiniteWord {
    // Each input machine word expands to two output words; spreading the
    // input bits to even positions and placing their complements at odd
    // positions is exactly the morphism on a packed block.
    let mut bits = Vec::with_capacity(w.bits.len() * 2);
    for &word in &w.bits {
        bits.push(interleave_with_complement(word as u32));
        bits.push(interleave_with_complement((word >> 32) as u32));
    }
    let mut out = FiniteWord {
        bits,
        len: w.len * 2,
    };
    out.bits.truncate((out.len.div_ceil(WORD_BITS)) as usize);
    out.mask_tail();
    out
}

/// Places bit `i` of `x` at position `2i` and its complement at `2i + 1`.
fn interleave_with_complement(x: u32) -> u64 {
    let mut s = x as u64;
    s = (s | (s << 16)) & 0x0000_ffff_0000_ffff;
    s = (s | (s << 8)) & 0x00ff_00ff_00ff_00ff;
    s = (s | (s << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    s = (s | (s << 2)) & 0x3333_3333_3333_3333;
    s = (s | (s << 1)) & 0x5555_5555_5555_5555;
    s | ((s << 1) ^ 0xaaaa_aaaa_aaaa_aaaa)
}

/// Bitwise complement of a word.
pub fn complement(w: &FiniteWord) -> FiniteWord {
    w.complement()
}

/// Symbol `i` of the Thue-Morse word: parity of the number of 1s in the
/// binary representation of `i`.
#[inline]
pub fn thue_morse_bit(i: u64) -> u8 {
    (i.count_ones() & 1) as u8
}

/// Symbol `i` of the word `h`: parity of the number of 0s in the binary
/// representation of `i` (the representation of 0 is empty, so `h[0] = 0`).
#[inline]
pub fn h_bit(i: u64) -> u8 {
    if i == 0 {
        return 0;
    }
    let bit_len = 64 - i.leading_zeros();
    ((bit_len - i.count_ones()) & 1) as u8
}

/// First `n` symbols of the Thue-Morse word, via the bit-parity formula.
pub fn thue_morse_prefix(n: u64) -> FiniteWord {
    FiniteWord::from_fn(n, thue_morse_bit)
}

/// First `n` symbols of `h`, via the zero-parity formula.
pub fn h_prefix(n: u64) -> FiniteWord {
    FiniteWord::from_fn(n, h_bit)
}

/// `mu^n(0)`, the length-`2^n` Thue-Morse iterate, with the default cap.
pub fn t_n(n: u32) -> Result<FiniteWord> {
    t_n_with_cap(n, DEFAULT_ITERATE_CAP)
}

/// `mu^n(0)` with an explicit iteration cap.
pub fn t_n_with_cap(n: u32, cap: u32) -> Result<FiniteWord> {
    if n > cap {
        return Err(Error::LimitExceeded {
            requested: 1u64.checked_shl(n).unwrap_or(u64::MAX),
            cap: 1u64.checked_shl(cap).unwrap_or(u64::MAX),
        });
    }
    let mut w = FiniteWord::from_bits(&[0]);
    for _ in 0..n {
        w = mu(&w);
    }
    Ok(w)
}

/// Membership predicate over indices, for characteristic sequences.
#[derive(Clone)]
pub struct SetOracle(Arc<dyn Fn(u64) -> bool + Send + Sync>);

impl SetOracle {
    /// Wraps a membership predicate.
    pub fn new(f: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    /// Whether `i` belongs to the set.
    pub fn contains(&self, i: u64) -> bool {
        (self.0)(i)
    }
}

impl fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SetOracle(..)")
    }
}

/// Symbolic description of an infinite binary word with random-access
/// evaluation.
#[derive(Debug, Clone)]
pub enum WordSpec {
    /// The Thue-Morse word `t`.
    ThueMorse,
    /// The word `h` (zero-count parity).
    HWord,
    /// The word encoded by a path through the Fife automaton.
    Fife(FifePath),
    /// Suffix starting at position `k` of the inner word.
    Shift(Box<WordSpec>, u64),
    /// Bitwise complement of the inner word.
    Complement(Box<WordSpec>),
    /// Characteristic sequence of a set of natural numbers.
    Characteristic(SetOracle),
}

impl WordSpec {
    /// Complement of this spec.
    pub fn complemented(self) -> WordSpec {
        WordSpec::Complement(Box::new(self))
    }

    /// This spec shifted left by `k` symbols.
    pub fn shifted(self, k: u64) -> WordSpec {
        WordSpec::Shift(Box::new(self), k)
    }

    /// Materializes symbols at positions `from .. from + count`, with the
    /// default memory cap.
    pub fn eval(&self, from: u64, count: u64) -> Result<FiniteWord> {
        self.eval_with_cap(from, count, DEFAULT_MEMORY_CAP)
    }

    /// Materializes symbols at positions `from .. from + count`.
    pub fn eval_with_cap(&self, from: u64, count: u64, cap: u64) -> Result<FiniteWord> {
        if from + count > cap {
            return Err(Error::LimitExceeded {
                requested: from + count,
                cap,
            });
        }
        match self {
            WordSpec::ThueMorse => Ok(FiniteWord::from_fn(count, |i| thue_morse_bit(from + i))),
            WordSpec::HWord => Ok(FiniteWord::from_fn(count, |i| h_bit(from + i))),
            WordSpec::Fife(path) => {
                let full = crate::fife::fbe_decode_with_cap(path, from + count, cap)?;
                Ok(full.slice(from..from + count))
            }
            WordSpec::Shift(inner, k) => inner.eval_with_cap(from + k, count, cap),
            WordSpec::Complement(inner) => Ok(inner.eval_with_cap(from, count, cap)?.complement()),
            WordSpec::Characteristic(oracle) => Ok(FiniteWord::from_fn(count, |i| {
                u8::from(oracle.contains(from + i))
            })),
        }
    }

    /// Prefix of length `n`.
    pub fn prefix(&self, n: u64) -> Result<FiniteWord> {
        self.eval(0, n)
    }
}

impl fmt::Display for WordSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordSpec::ThueMorse => write!(f, "t"),
            WordSpec::HWord => write!(f, "h"),
            WordSpec::Fife(p) => write!(f, "fife:{p}"),
            WordSpec::Shift(inner, k) => write!(f, "{inner}>>{k}"),
            WordSpec::Complement(inner) => write!(f, "~{inner}"),
            WordSpec::Characteristic(_) => write!(f, "chi:<oracle>"),
        }
    }
}

impl FromStr for WordSpec {
    type Err = Error;

    /// Textual form: `t`, `~t`, `h`, `~h`, `t>>k`, `fife:<path>`, with `~`
    /// binding outermost (`~t>>2` is the complement of `t>>2`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('~') {
            return Ok(rest.parse::<WordSpec>()?.complemented());
        }
        let (base, shift) = match s.rsplit_once(">>") {
            Some((b, k)) => {
                let k: u64 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad shift amount in {s:?}")))?;
                (b.trim(), Some(k))
            }
            None => (s, None),
        };
        let spec = match base {
            "t" => WordSpec::ThueMorse,
            "h" => WordSpec::HWord,
            _ => {
                if let Some(path) = base.strip_prefix("fife:") {
                    WordSpec::Fife(path.parse()?)
                } else {
                    return Err(Error::Parse(format!(
                        "unknown word spec {base:?} (expected t, h, or fife:<path>)"
                    )));
                }
            }
        };
        Ok(match shift {
            Some(k) => spec.shifted(k),
            None => spec,
        })
    }
}
