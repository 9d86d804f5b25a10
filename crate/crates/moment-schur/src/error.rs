//! Error type shared by all modules of the crate.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Errors produced by the moment-problem machinery.
///
/// All arithmetic is exact, so every failure is structural: bad input
/// shape, data that is too short for the requested operation, or a
/// pivot/denominator that vanishes where the algorithm needs it nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The moment sequence is empty.
    #[error("empty moment sequence")]
    EmptySequence,

    /// No normal index is decidable from the available moments.
    #[error("no normal index decidable from {available} moment(s)")]
    NoNormalIndex { available: usize },

    /// The sequence is too short for the requested step.
    #[error("sequence truncated: {required} moment(s) required, {available} available")]
    Truncated { required: usize, available: usize },

    /// A level pivot vanished where the recursion requires it nonzero.
    #[error("singular Schur step at level {level}: pivot is zero")]
    SingularStep { level: usize },

    /// A determinant-formula shortcut does not apply to this input.
    #[error("determinant formula inapplicable: {reason}")]
    FormulaInapplicable { reason: String },

    /// Division by a series that is zero to its trusted order.
    #[error("division by a series that is zero to trusted order {order}")]
    DivisionByZeroSeries { order: usize },

    /// An operation would contaminate coefficients above z^{-1}.
    #[error("insufficient trusted order: result would be trusted only above z^{exponent}")]
    InsufficientOrder { exponent: i64 },

    /// Lower-triangular Toeplitz system with a zero diagonal.
    #[error("singular triangular Toeplitz system: leading entry is zero")]
    SingularToeplitz,

    /// Multinomial coefficient with parts that do not sum to the total.
    #[error("multinomial parts sum to {parts_sum}, expected {total}")]
    MultinomialMismatch { total: u64, parts_sum: u64 },

    /// Hankel determinant request beyond the available moments.
    #[error("hankel determinant of size {size} needs {required} moment(s), {available} available")]
    InsufficientMoments {
        size: usize,
        required: usize,
        available: usize,
    },

    /// Diagonal key whose minimum offset is not zero.
    #[error("invalid diagonal key {key:?}: at least one offset must be zero")]
    InvalidDiagonalKey { key: Vec<u32> },

    /// Moment tensor with malformed indices.
    #[error("invalid moment tensor: {reason}")]
    InvalidTensor { reason: String },

    /// Failure inside one diagonal sub-problem.
    #[error("diagonal {key:?}: {source}")]
    Diagonal {
        key: Vec<u32>,
        #[source]
        source: Box<Error>,
    },

    /// Continued fraction with a structurally invalid atom list.
    #[error("malformed continued fraction: {reason}")]
    MalformedContinuedFraction { reason: String },

    /// Division blow-up while expanding a nested fraction.
    #[error("zero denominator while expanding continued fraction at nesting depth {depth}")]
    ExpansionBlowUp { depth: usize },

    /// Request past the atoms actually present.
    #[error("index {index} out of range: only {available} level(s) available")]
    LevelOutOfRange { index: usize, available: usize },

    /// Measure construction violating the support/weight invariants.
    #[error("invalid discrete measure: {reason}")]
    InvalidMeasure { reason: String },

    /// Regular-case operation applied to a non-regular decomposition.
    #[error("regular-case criterion inapplicable: l atom at level {level} has degree {degree}")]
    NonConstantAtom { level: usize, degree: usize },

    /// Malformed rational literal.
    #[error("cannot parse rational from {input:?}")]
    RationalParse { input: String },
}

impl Error {
    /// Stable machine-readable tag for serialized errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySequence => "empty_sequence",
            Error::NoNormalIndex { .. } => "no_normal_index",
            Error::Truncated { .. } => "truncated",
            Error::SingularStep { .. } => "singular_step",
            Error::FormulaInapplicable { .. } => "formula_inapplicable",
            Error::DivisionByZeroSeries { .. } => "division_by_zero_series",
            Error::InsufficientOrder { .. } => "insufficient_order",
            Error::SingularToeplitz => "singular_toeplitz",
            Error::MultinomialMismatch { .. } => "multinomial_mismatch",
            Error::InsufficientMoments { .. } => "insufficient_moments",
            Error::InvalidDiagonalKey { .. } => "invalid_diagonal_key",
            Error::InvalidTensor { .. } => "invalid_tensor",
            Error::Diagonal { .. } => "diagonal",
            Error::MalformedContinuedFraction { .. } => "malformed_continued_fraction",
            Error::ExpansionBlowUp { .. } => "expansion_blow_up",
            Error::LevelOutOfRange { .. } => "level_out_of_range",
            Error::InvalidMeasure { .. } => "invalid_measure",
            Error::NonConstantAtom { .. } => "non_constant_atom",
            Error::RationalParse { .. } => "rational_parse",
        }
    }
}

impl Serialize for Error {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Error", 2)?;
        s.serialize_field("kind", self.kind())?;
        s.serialize_field("message", &self.to_string())?;
        s.end()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
