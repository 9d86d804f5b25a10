//! Lower-triangular Toeplitz matrices and their inversion.
//!
//! A lower-triangular Toeplitz matrix is determined by its first column;
//! inverting it is the same computation as taking the reciprocal of the
//! power series whose coefficients are that column. The recurrence
//! relations of the Schur algorithm are stated as identities
//! T(a) * T(b) = I between such matrices, so this module is the bridge
//! between the matrix form and the series form.

use super::rational::Rational;
use crate::error::{Error, Result};

/// Square lower-triangular Toeplitz matrix: entry (i, j) = column[i - j]
/// for i >= j, zero above the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerToeplitz {
    column: Vec<Rational>,
}

impl LowerToeplitz {
    pub fn new(column: Vec<Rational>) -> Self {
        assert!(
            !column.is_empty(),
            "Toeplitz matrix needs at least one entry"
        );
        LowerToeplitz { column }
    }

    pub fn size(&self) -> usize {
        self.column.len()
    }

    pub fn first_column(&self) -> &[Rational] {
        &self.column
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        if i >= j {
            self.column[i - j].clone()
        } else {
            Rational::zero()
        }
    }

    pub fn is_invertible(&self) -> bool {
        !self.column[0].is_zero()
    }

    /// Matrix product with another lower-triangular Toeplitz matrix of the
    /// same size. The product is again lower-triangular Toeplitz; its first
    /// column is the truncated convolution of the two columns.
    pub fn mul(&self, rhs: &LowerToeplitz) -> LowerToeplitz {
        assert_eq!(self.size(), rhs.size(), "size mismatch");
        let n = self.size();
        let mut column = vec![Rational::zero(); n];
        for i in 0..n {
            for k in 0..=i {
                column[i] += &self.column[k] * &rhs.column[i - k];
            }
        }
        LowerToeplitz { column }
    }

    /// First column of the inverse matrix.
    pub fn inverse_first_column(&self) -> Result<Vec<Rational>> {
        power_series_reciprocal(&self.column, self.size())
    }
}

/// Reciprocal of the power series `sum coeffs[k] x^k`, truncated to `len`
/// coefficients. Coefficients of the input beyond its stored length are
/// treated as zero.
pub fn power_series_reciprocal(coeffs: &[Rational], len: usize) -> Result<Vec<Rational>> {
    let a0 = coeffs.first().cloned().unwrap_or_else(Rational::zero);
    let inv0 = a0.recip().ok_or(Error::SingularToeplitz)?;
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        if k == 0 {
            out.push(inv0.clone());
            continue;
        }
        // b_k = -(sum_{i=1..=k} a_i b_{k-i}) / a_0
        let mut acc = Rational::zero();
        for i in 1..=k.min(coeffs.len().saturating_sub(1)) {
            acc += &coeffs[i] * &out[k - i];
        }
        out.push(-acc * inv0.clone());
    }
    Ok(out)
}

/// First column of the inverse of the lower-triangular Toeplitz matrix with
/// the given first column; equivalently the reciprocal of the power series
/// `sum known[k] x^k` truncated to the same length.
pub fn toeplitz_solve(known: &[Rational]) -> Result<Vec<Rational>> {
    if known.is_empty() {
        return Err(Error::SingularToeplitz);
    }
    power_series_reciprocal(known, known.len())
}
