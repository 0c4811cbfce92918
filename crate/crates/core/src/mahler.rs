//! Autocorrelation of the Thue-Morse word.
//!
//! The correlation `sigma(k)` is the limit of the averages
//! `(1/n) * sum of (-1)^(t[i] + t[i+k])`. It satisfies `sigma(0) = 1`,
//! `sigma(1) = -1/3`, `sigma(2n) = sigma(n)`, and
//! `sigma(2n+1) = -(sigma(n) + sigma(n+1)) / 2`, which pins every value as
//! an exact rational. The shift similarity of the Thue-Morse word with its
//! own suffixes is `(sigma(k) + 1) / 2`.

use std::collections::HashMap;

use crate::words::{thue_morse_bit, thue_morse_prefix};
use crate::{Error, Rational, Result};

/// Memoized table of exact correlation values.
#[derive(Debug, Clone, Default)]
pub struct SigmaTable {
    values: HashMap<u64, Rational>,
}

impl SigmaTable {
    /// Empty table; values are filled on demand.
    pub fn new() -> Self {
        Self::default()
    }

    /// Exact `sigma(k)` by the memoized recurrence.
    pub fn sigma(&mut self, k: u64) -> Rational {
        if let Some(&v) = self.values.get(&k) {
            return v;
        }
        // The recurrence halves its argument, so recursion depth stays
        // logarithmic.
        let v = match k {
            0 => Rational::new(1, 1),
            1 => Rational::new(-1, 3),
            k if k % 2 == 0 => self.sigma(k / 2),
            k => {
                let n = k / 2;
                let a = self.sigma(n);
                let b = self.sigma(n + 1);
                -(a + b) / 2
            }
        };
        self.values.insert(k, v);
        v
    }

    /// Values computed so far, for post-hoc consistency checks.
    pub fn known(&self) -> impl Iterator<Item = (u64, Rational)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

/// Exact `sigma(k)`, standalone.
pub fn sigma(k: u64) -> Rational {
    SigmaTable::new().sigma(k)
}

/// Exact partial-sum correlation `(1/n) * sum over i < n of
/// (-1)^(t[i] + t[i+k])`.
pub fn empirical_sigma(k: u64, n: u64) -> Rational {
    assert!(n > 0, "empirical correlation needs n >= 1");
    // (-1)^(t[i] + t[i+k]) = 2*delta(t[i], t[i+k]) - 1, so the sum is
    // 2 * matches - n.
    let w = thue_morse_prefix(n + k);
    let matches = crate::words::matches_between(&w, 0, &w, k, n);
    Rational::new(2 * matches as i64 - n as i64, n as i64)
}

/// Exact limit density of agreements between the Thue-Morse word and its
/// shift by `k >= 1`: `(sigma(k) + 1) / 2`. The liminf and limsup agree for
/// shifts, so this is the one number both equal.
pub fn shift_density(k: u64) -> Result<Rational> {
    if k == 0 {
        return Err(Error::ZeroShift);
    }
    Ok((sigma(k) + 1) / 2)
}

/// Direct-definition correlation over an explicit window, for cross-checks:
/// the same partial sum computed symbol by symbol.
pub fn empirical_sigma_naive(k: u64, n: u64) -> Rational {
    let mut sum = 0i64;
    for i in 0..n {
        let same = thue_morse_bit(i) == thue_morse_bit(i + k);
        sum += if same { 1 } else { -1 };
    }
    Rational::new(sum, n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::sd;
    use crate::util::SplitMix64;
    use num_traits::Signed;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn base_values_and_small_cases() {
        assert_eq!(sigma(0), rat(1, 1));
        assert_eq!(sigma(1), rat(-1, 3));
        assert_eq!(sigma(2), rat(-1, 3));
        // sigma(3) = -(sigma(1) + sigma(2)) / 2 = 1/3.
        assert_eq!(sigma(3), rat(1, 3));
        assert_eq!(sigma(4), rat(-1, 3));
        assert_eq!(sigma(6), rat(1, 3));
    }

    #[test]
    fn bounded_by_one_third_up_to_hundred_thousand() {
        let mut table = SigmaTable::new();
        let third = rat(1, 3);
        for k in 1..=100_000u64 {
            let v = table.sigma(k);
            assert!(v.abs() <= third, "sigma({k}) = {v}");
        }
        // Post hoc, the memo table satisfies the recurrence everywhere.
        let snapshot: Vec<(u64, Rational)> = table.known().collect();
        for (k, v) in snapshot {
            if k >= 2 && k % 2 == 0 {
                assert_eq!(v, table.sigma(k / 2));
            } else if k >= 3 {
                let n = k / 2;
                assert_eq!(v, -(table.sigma(n) + table.sigma(n + 1)) / 2);
            }
        }
    }

    #[test]
    fn empirical_matches_exact_for_small_shifts() {
        for k in 0..=64u64 {
            let emp = empirical_sigma(k, 1 << 20);
            let exact = sigma(k);
            assert!(
                (emp - exact).abs() <= rat(1, 100),
                "k = {k}: empirical {emp} vs exact {exact}"
            );
        }
    }

    #[test]
    fn empirical_is_exactly_the_packed_sum() {
        let mut rng = SplitMix64::new(0x51f);
        for _ in 0..20 {
            let k = rng.range(0, 100);
            let n = rng.range(1, 2000);
            assert_eq!(empirical_sigma(k, n), empirical_sigma_naive(k, n));
        }
    }

    #[test]
    fn correlation_is_shift_similarity_in_disguise() {
        // 2 * SD(t[0..n), t[k..k+n)) - 1 equals the partial sum exactly.
        let mut rng = SplitMix64::new(777);
        for _ in 0..40 {
            let k = rng.range(0, 1 << 12);
            let n = rng.range(1, 1 << 12);
            let w = thue_morse_prefix(n + k);
            let d = sd(&w.slice(0..n), &w.slice(k..k + n)).unwrap();
            assert_eq!(empirical_sigma(k, n), d * 2 - 1);
        }
    }

    #[test]
    fn zero_correlation_of_word_with_itself() {
        for n in [1u64, 10, 1000] {
            assert_eq!(empirical_sigma(0, n), rat(1, 1));
        }
    }

    #[test]
    fn shift_densities() {
        assert_eq!(shift_density(1).unwrap(), rat(1, 3));
        assert_eq!(shift_density(2).unwrap(), rat(1, 3));
        assert_eq!(shift_density(3).unwrap(), rat(2, 3));
        assert!(matches!(shift_density(0), Err(Error::ZeroShift)));
        // Every nontrivial shift density lies in [1/3, 2/3].
        for k in 1..=10_000u64 {
            let d = shift_density(k).unwrap();
            assert!(rat(1, 3) <= d && d <= rat(2, 3), "k = {k}: {d}");
        }
    }
}
