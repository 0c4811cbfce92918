//! Overlap-free infinite binary words and their similarity to the Thue-Morse
//! word.
//!
//! The library has three layers:
//!
//! - [`words`] and [`powerfree`]: finite binary words (bit-packed), the
//!   Thue-Morse morphism, random-access generators for the named infinite
//!   words, and overlap / fractional-power detection.
//! - [`fife`] and [`mahler`]: the Fife automaton whose infinite paths encode
//!   exactly the overlap-free infinite binary words, the path-to-word
//!   encoding, and Mahler's autocorrelation recurrence for shifts of the
//!   Thue-Morse word.
//! - [`similarity`] and [`verify`]: exact similarity densities of equal-length
//!   prefixes, liminf/limsup estimators, and machine checks of the density
//!   bounds at desk scale, including the exhaustive path sweep.
//!
//! All densities are exact rationals; floating point appears only in output
//! formatting, never in a verdict.

pub mod fife;
pub mod mahler;
pub mod powerfree;
pub mod similarity;
pub mod util;
pub mod verify;
pub mod words;

pub use fife::{CaseTag, FifeAutomaton, FifePath};
pub use powerfree::OverlapWitness;
pub use words::{FiniteWord, WordSpec};

/// Exact fraction type used for every density value.
///
/// `num_rational::Ratio` keeps values in lowest terms with a positive
/// denominator. Prefix lengths are capped at [`DEFAULT_MEMORY_CAP`] symbols,
/// so numerators and denominators stay far below `i64` overflow.
pub type Rational = num_rational::Rational64;

/// Default cap on materialized word length (symbols).
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 28;

/// Default `t_n` iteration cap: `mu^n(0)` has `2^n` symbols.
pub const DEFAULT_ITERATE_CAP: u32 = 30;

/// Default horizon for liminf/limsup estimation.
pub const DEFAULT_HORIZON: u64 = 1 << 20;

/// Default depth cap for exhaustive path enumeration.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Similarity density is defined for equal-length words only.
    #[error("length mismatch: left word has {left} symbols, right has {right}")]
    LengthMismatch {
        /// Length of the left operand.
        left: u64,
        /// Length of the right operand.
        right: u64,
    },

    /// Similarity density of empty words is undefined.
    #[error("similarity density of empty words is undefined")]
    EmptyWord,

    /// A request would materialize more symbols than the configured cap.
    #[error("requested {requested} symbols exceeds cap of {cap}")]
    LimitExceeded {
        /// Symbols requested.
        requested: u64,
        /// Configured cap.
        cap: u64,
    },

    /// A path ending in `0^omega` decodes to a finite word plus a Thue-Morse
    /// tail and needs a tail letter.
    #[error("path ends in 0^omega but carries no tail letter")]
    MissingTailLetter,

    /// Path text or structure is not valid.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// Word or spec text failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// Power-freeness needs an exponent p/q > 1.
    #[error("invalid exponent {p}/{q}: must exceed 1")]
    InvalidExponent {
        /// Exponent numerator.
        p: u64,
        /// Exponent denominator.
        q: u64,
    },

    /// The shift-density limit is only nontrivial for k >= 1.
    #[error("shift density requires a nonzero shift")]
    ZeroShift,
}

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
