//! Exact-arithmetic diagonal Schur algorithm for Stieltjes-type moment
//! problems, in one and several variables.
//!
//! The pipeline: a moment sequence (or a sparse moment tensor, sliced
//! into weighted diagonal sequences) is classified by its Hankel
//! determinants, peeled into continued-fraction atoms by formal series
//! division, and reassembled through Stieltjes polynomials and 2x2
//! resolvent matrices whose linear-fractional action sweeps the solution
//! set. Every quantity is an exact rational; discrete measures supply
//! brute-force ground truth for the whole chain.

pub mod algebra;
pub mod error;
pub mod hankel;
pub mod indeterminacy;
pub mod measure;
pub mod multidiag;
pub mod resolvent;
pub mod schur;

pub use algebra::{
    multinomial, toeplitz_solve, LowerToeplitz, Polynomial, Rational, SeriesOrder,
    TruncatedLaurentSeries,
};
pub use error::{Error, Result};
pub use hankel::{
    hankel_det, is_regular, normal_indices, shifted_hankel_det, MomentSequence, NormalIndexSet,
    RegularityReport,
};
pub use indeterminacy::{
    ab_polynomial_pairs, indeterminacy_sums_ab, indeterminacy_sums_ml, IndeterminacyReport, Verdict,
};
pub use measure::{roundtrip_verify, DiscreteMeasure, MeasureAtom, VerificationReport};
pub use multidiag::{
    assemble_full, diagonal_extract, diagonal_support_check, multivariate_expansion,
    solve_diagonal, DiagonalKey, DiagonalSequence, DiagonalSolution, FullSolution, MomentTensor,
};
pub use resolvent::{
    cf_expand, factorization_check_against, moebius_apply, resolvent_factorization_check,
    resolvent_matrix, stieltjes_polynomials, ContinuedFraction, FactorizationCheck,
    ResolventMatrix, StieltjesPolynomialPair, Tail,
};
pub use schur::{
    ab_cascade, recursive_sequence_via_determinant, recursive_sequence_via_series_ab,
    recursive_sequence_via_series_l, recursive_sequence_via_series_m, schur_decompose_ml,
    schur_step_ab, AtomAB, MlDecomposition, MlLevel, Parity, ShiftedSequence, TailContract,
};
