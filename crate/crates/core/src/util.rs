//! Small shared helpers: a seedable deterministic generator for the
//! randomized spot checks, and rational parsing/formatting for the CLI.

use crate::Rational;

/// SplitMix64. Deterministic, seedable, good enough for picking random
/// test instances reproducibly.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Creates a generator from a seed.
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, bound)`; `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Uniform value in `[lo, hi]`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// A random bit.
    pub fn bit(&mut self) -> u8 {
        (self.next_u64() & 1) as u8
    }
}

/// Parses `"num/den"` or a bare integer into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: i64 = num
        .parse()
        .map_err(|_| format!("bad rational numerator in {text:?}"))?;
    let d: i64 = den
        .parse()
        .map_err(|_| format!("bad rational denominator in {text:?}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(n, d))
}

/// `num/den` display form used everywhere a density is printed.
pub fn format_rational(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Float rendering for plot columns. Not used in any verdict.
pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        assert_eq!(parse_rational("1/100").unwrap(), Rational::new(1, 100));
        assert_eq!(parse_rational("3").unwrap(), Rational::new(3, 1));
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(Rational::new(2, 6)), "1/3");
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
