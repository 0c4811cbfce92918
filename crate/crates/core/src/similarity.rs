//! Exact similarity density of equal-length finite words, and liminf/limsup
//! estimators for infinite words, including the Weyl (all-blocks) variants.
//!
//! The similarity density of two length-`n` words is the number of agreeing
//! positions over `n`, always an exact rational. The liminf/limsup of prefix
//! densities of infinite words are limits and not computable at a finite
//! horizon; the estimators report tail extrema of the prefix-density curve,
//! which is sound for sampling at fixed multiples because intermediate
//! prefix lengths perturb the density by a vanishing amount.

use crate::words::{FiniteWord, SetOracle, WordSpec};
use crate::{Error, Rational, Result};

/// Kronecker delta on symbols: 1 when equal, else 0.
pub fn kronecker(a: u8, b: u8) -> u8 {
    u8::from(a == b)
}

/// Exact similarity density of two equal-length nonempty words.
pub fn sd(x: &FiniteWord, y: &FiniteWord) -> Result<Rational> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(Rational::new(x.count_matches(y) as i64, x.len() as i64))
}

/// Prefix-density samples of a pair of infinite words.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    /// `(prefix length, exact density)` samples, lengths strictly
    /// increasing.
    pub samples: Vec<(u64, Rational)>,
    /// Largest prefix length sampled.
    pub horizon: u64,
    /// Minimum over all samples.
    pub running_min: Rational,
    /// Maximum over all samples.
    pub running_max: Rational,
    /// Minimum over the tail window.
    pub tail_min: Rational,
    /// Maximum over the tail window.
    pub tail_max: Rational,
}

impl DensityCurve {
    /// Sample at exactly the given prefix length, if present.
    pub fn sample_at(&self, len: u64) -> Option<Rational> {
        self.samples
            .binary_search_by_key(&len, |&(l, _)| l)
            .ok()
            .map(|i| self.samples[i].1)
    }

    /// Serializes as CSV with header `prefix_length,sd_num,sd_den,sd_float`.
    /// The float column is for plotting; the rationals are authoritative.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("prefix_length,sd_num,sd_den,sd_float\n");
        for &(len, r) in &self.samples {
            out.push_str(&format!(
                "{},{},{},{}\n",
                len,
                r.numer(),
                r.denom(),
                crate::util::rational_to_f64(r)
            ));
        }
        out
    }
}

/// Finite-horizon bracket for the lower and upper similarity densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityEstimate {
    /// Tail minimum of the prefix-density curve (estimates the liminf).
    pub lsd_lower: Rational,
    /// Tail maximum of the prefix-density curve (estimates the limsup).
    pub usd_upper: Rational,
    /// Largest prefix length examined.
    pub horizon: u64,
    /// Densities were sampled at prefix lengths that are multiples of this.
    pub block_size: u64,
}

/// Default fraction of the horizon treated as the tail.
pub fn default_tail_fraction() -> Rational {
    Rational::new(1, 2)
}

/// Streams cumulative match counts of two materialized prefixes, invoking
/// `visit(prefix_len, matches)` at every multiple of `stride`.
fn stream_matches(
    x: &FiniteWord,
    y: &FiniteWord,
    horizon: u64,
    stride: u64,
    mut visit: impl FnMut(u64, u64),
) {
    debug_assert!(x.len() >= horizon && y.len() >= horizon);
    let mut matches = 0u64;
    let mut done = 0u64;
    let mut next_sample = stride;
    while done < horizon {
        let chunk = (horizon - done).min(64);
        let agree = !(x.chunk64(done) ^ y.chunk64(done));
        if done + chunk < next_sample {
            // No sample point inside this chunk; count it wholesale.
            let mask = if chunk == 64 {
                !0u64
            } else {
                (1u64 << chunk) - 1
            };
            matches += (agree & mask).count_ones() as u64;
            done += chunk;
        } else {
            for b in 0..chunk {
                matches += (agree >> b) & 1;
                done += 1;
                if done == next_sample {
                    visit(done, matches);
                    next_sample += stride;
                }
            }
        }
    }
}

/// Prefix-density curve of two infinite words, sampled at multiples of
/// `stride` up to `horizon`, each density exact. Uses the default tail
/// fraction of one half.
pub fn sd_curve(x: &WordSpec, y: &WordSpec, horizon: u64, stride: u64) -> Result<DensityCurve> {
    sd_curve_with(x, y, horizon, stride, default_tail_fraction())
}

/// As [`sd_curve`] with an explicit tail fraction in `(0, 1)`.
pub fn sd_curve_with(
    x: &WordSpec,
    y: &WordSpec,
    horizon: u64,
    stride: u64,
    tail_fraction: Rational,
) -> Result<DensityCurve> {
    if stride == 0 || horizon < stride {
        return Err(Error::Parse("curve needs horizon >= stride >= 1".into()));
    }
    let xs = x.eval(0, horizon)?;
    let ys = y.eval(0, horizon)?;
    let mut samples = Vec::with_capacity((horizon / stride) as usize);
    stream_matches(&xs, &ys, horizon, stride, |len, matches| {
        samples.push((len, Rational::new(matches as i64, len as i64)));
    });
    let tail_start = tail_threshold(horizon, tail_fraction);
    let mut running = Extrema::new();
    let mut tail = Extrema::new();
    for &(len, r) in &samples {
        running.add(r);
        if len >= tail_start {
            tail.add(r);
        }
    }
    let (running_min, running_max) = running.get().expect("at least one sample");
    let (tail_min, tail_max) = tail.get().unwrap_or((running_min, running_max));
    Ok(DensityCurve {
        samples,
        horizon,
        running_min,
        running_max,
        tail_min,
        tail_max,
    })
}

/// Smallest prefix length inside the tail window.
fn tail_threshold(horizon: u64, tail_fraction: Rational) -> u64 {
    // Window covers the last `tail_fraction` of the horizon.
    let keep = (horizon as i64 * tail_fraction.numer()) / tail_fraction.denom();
    (horizon - keep as u64).max(1)
}

struct Extrema {
    min: Option<Rational>,
    max: Option<Rational>,
}

impl Extrema {
    fn new() -> Self {
        Extrema {
            min: None,
            max: None,
        }
    }

    fn add(&mut self, r: Rational) {
        self.min = Some(self.min.map_or(r, |m| m.min(r)));
        self.max = Some(self.max.map_or(r, |m| m.max(r)));
    }

    fn get(&self) -> Option<(Rational, Rational)> {
        Some((self.min?, self.max?))
    }
}

/// Tail extrema of the prefix-density curve sampled at multiples of
/// `block_size`, bracketing the lower and upper similarity densities.
///
/// Sampling only at multiples of a fixed block size does not change the
/// liminf or limsup, so the tail extrema converge to the true values as the
/// horizon grows.
pub fn estimate_lsd_usd(
    x: &WordSpec,
    y: &WordSpec,
    horizon: u64,
    block_size: u64,
    tail_fraction: Rational,
) -> Result<DensityEstimate> {
    if block_size == 0 || horizon < block_size {
        return Err(Error::Parse(
            "estimator needs horizon >= blockSize >= 1".into(),
        ));
    }
    let xs = x.eval(0, horizon)?;
    let ys = y.eval(0, horizon)?;
    let tail_start = tail_threshold(horizon, tail_fraction);
    // Track extrema as raw (matches, length) pairs; comparisons via
    // cross-multiplication in 128 bits.
    let mut min: Option<(u64, u64)> = None;
    let mut max: Option<(u64, u64)> = None;
    stream_matches(&xs, &ys, horizon, block_size, |len, matches| {
        if len < tail_start {
            return;
        }
        let frac = (matches, len);
        let less = |a: (u64, u64), b: (u64, u64)| {
            (a.0 as u128) * (b.1 as u128) < (b.0 as u128) * (a.1 as u128)
        };
        min = Some(match min {
            Some(m) if less(m, frac) => m,
            _ => frac,
        });
        max = Some(match max {
            Some(m) if less(frac, m) => m,
            _ => frac,
        });
    });
    let min = min.ok_or(Error::EmptyWord)?;
    let max = max.ok_or(Error::EmptyWord)?;
    Ok(DensityEstimate {
        lsd_lower: Rational::new(min.0 as i64, min.1 as i64),
        usd_upper: Rational::new(max.0 as i64, max.1 as i64),
        horizon,
        block_size,
    })
}

/// Extreme block densities at one fixed block length: the inf and sup over
/// all positions `k <= horizon - block_length` of the similarity density of
/// the length-`block_length` windows at `k`.
///
/// These are the inner inf/sup of the Weyl densities; the outer limit over
/// block lengths is reported as a table by the caller.
pub fn weyl_estimate(
    x: &WordSpec,
    y: &WordSpec,
    block_length: u64,
    horizon: u64,
) -> Result<(Rational, Rational)> {
    if block_length == 0 || block_length > horizon {
        return Err(Error::Parse(
            "weyl window needs horizon >= blockLength >= 1".into(),
        ));
    }
    let xs = x.eval(0, horizon)?;
    let ys = y.eval(0, horizon)?;
    let mut count = 0u64;
    for i in 0..block_length {
        count += u64::from(xs.get(i) == ys.get(i));
    }
    let mut min = count;
    let mut max = count;
    for k in 0..horizon - block_length {
        count -= u64::from(xs.get(k) == ys.get(k));
        count += u64::from(xs.get(k + block_length) == ys.get(k + block_length));
        min = min.min(count);
        max = max.max(count);
    }
    Ok((
        Rational::new(min as i64, block_length as i64),
        Rational::new(max as i64, block_length as i64),
    ))
}

/// Tail extrema of `|A intersect [0, n)| / n`: the asymptotic-density
/// bracket of a set of naturals, computed as the similarity density of its
/// characteristic sequence against the all-ones word.
pub fn asymptotic_density(oracle: &SetOracle, horizon: u64) -> Result<(Rational, Rational)> {
    let chi = WordSpec::Characteristic(oracle.clone());
    let ones = WordSpec::Characteristic(SetOracle::new(|_| true));
    let est = estimate_lsd_usd(&chi, &ones, horizon, 1, default_tail_fraction())?;
    Ok((est.lsd_lower, est.usd_upper))
}
