//! Hankel determinants, normal indices, and the regularity test.
//!
//! For a moment sequence s the determinants D_n = det(s_{i+k}) and
//! D_n^+ = det(s_{i+k+1}) classify the normal indices (those n with
//! D_n != 0) into two interlacing families, which in turn drive the gap
//! structure of the Schur recursion. Indices whose classifying
//! determinant would need moments beyond the truncation are reported as
//! undecidable, never guessed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::Rational;
use crate::error::{Error, Result};

/// Finite real moment sequence s_0 ... s_l.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MomentSequence {
    values: Vec<Rational>,
}

impl MomentSequence {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(MomentSequence { values })
    }

    pub fn from_integers(values: &[i64]) -> Self {
        MomentSequence {
            values: values.iter().map(|&v| Rational::from_integer(v)).collect(),
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, j: usize) -> Rational {
        self.values.get(j).cloned().unwrap_or_else(Rational::zero)
    }
}

/// One normal index with its type flags. `mu` is `None` when D_n^+ would
/// need moments beyond the truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalIndex {
    pub n: usize,
    pub nu: bool,
    pub mu: Option<bool>,
}

/// The set of normal indices of a sequence, with the nu/mu classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalIndexSet {
    pub indices: Vec<NormalIndex>,
}

impl NormalIndexSet {
    /// Indices n with D_n != 0 (in increasing order).
    pub fn index_values(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i.n).collect()
    }

    /// The nu-type subfamily: D_n != 0 and D_{n-1}^+ != 0.
    pub fn nu_list(&self) -> Vec<usize> {
        self.indices.iter().filter(|i| i.nu).map(|i| i.n).collect()
    }

    /// The mu-type subfamily: D_n != 0 and D_n^+ != 0.
    pub fn mu_list(&self) -> Vec<usize> {
        self.indices
            .iter()
            .filter(|i| i.mu == Some(true))
            .map(|i| i.n)
            .collect()
    }

    /// Indices whose mu classification is undecidable at this truncation.
    pub fn mu_undecidable(&self) -> Vec<usize> {
        self.indices
            .iter()
            .filter(|i| i.mu.is_none())
            .map(|i| i.n)
            .collect()
    }

    /// Checks the interlacing 0 < nu_1 <= mu_1 < nu_2 <= mu_2 < ...
    pub fn interlacing_holds(&self) -> bool {
        let nu = self.nu_list();
        let mu = self.mu_list();
        for j in 0..nu.len().min(mu.len()) {
            if nu[j] > mu[j] {
                return false;
            }
            if j + 1 < nu.len() && mu[j] >= nu[j + 1] {
                return false;
            }
        }
        // Every decided index must carry at least one of the two types.
        self.indices.iter().all(|i| i.nu || i.mu != Some(false))
    }
}

/// Outcome of the regularity test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// No decided normal index violates D_n^+ != 0.
    pub regular: bool,
    /// First normal index with D_n^+ = 0, when not regular.
    pub witness: Option<usize>,
    /// Normal indices whose D_n^+ needs moments beyond the truncation.
    pub undecidable: Vec<usize>,
}

/// Exact determinant of the n x n Hankel matrix (s_{i+k}), i,k = 0..n-1.
/// D_0 = 1 by the empty-determinant convention.
pub fn hankel_det(s: &MomentSequence, n: usize) -> Result<Rational> {
    hankel_det_shifted(s, n, 0)
}

/// Exact determinant of (s_{i+k+1}), i,k = 0..n-1; D_0^+ = 1.
pub fn shifted_hankel_det(s: &MomentSequence, n: usize) -> Result<Rational> {
    hankel_det_shifted(s, n, 1)
}

fn hankel_det_shifted(s: &MomentSequence, n: usize, shift: usize) -> Result<Rational> {
    if n == 0 {
        return Ok(Rational::one());
    }
    let required = 2 * n - 1 + shift;
    if required > s.len() {
        return Err(Error::InsufficientMoments {
            size: n,
            required,
            available: s.len(),
        });
    }
    let matrix: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|k| s.get(i + k + shift)).collect())
        .collect();
    Ok(exact_determinant(&matrix))
}

/// Exact determinant of a square rational matrix: denominators are cleared
/// row by row, the integer core goes through fraction-free (Bareiss)
/// elimination, and the row scaling is divided back out.
pub fn exact_determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    if n == 0 {
        return Rational::one();
    }
    debug_assert!(matrix.iter().all(|row| row.len() == n));

    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in matrix {
        let mut lcm = BigInt::one();
        for entry in row {
            lcm = lcm.lcm(entry.denominator());
        }
        scale *= &lcm;
        m.push(
            row.iter()
                .map(|entry| entry.numerator() * (&lcm / entry.denominator()))
                .collect(),
        );
    }

    let det = bareiss_determinant(&mut m);
    Rational::new(det, scale)
}

fn bareiss_determinant(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            // Pivot search below row k.
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                // Bareiss: exact division by the previous pivot.
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Cofactor-expansion determinant; exponential, retained as a test oracle
/// for small matrices.
pub fn cofactor_determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    if n == 0 {
        return Rational::one();
    }
    if n == 1 {
        return matrix[0][0].clone();
    }
    let mut acc = Rational::zero();
    for j in 0..n {
        if matrix[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| matrix[i][c].clone())
                    .collect()
            })
            .collect();
        let term = &matrix[0][j] * &cofactor_determinant(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// All normal indices decidable from the available moments, classified.
///
/// D_n is computable when 2n-1 <= len(s); the mu test additionally needs
/// D_n^+, i.e. 2n <= len(s).
pub fn normal_indices(s: &MomentSequence) -> NormalIndexSet {
    let mut indices = Vec::new();
    let mut n = 1;
    while 2 * n - 1 <= s.len() {
        let d = hankel_det(s, n).expect("length checked");
        if !d.is_zero() {
            let d_prev_plus = shifted_hankel_det(s, n - 1).expect("needs fewer moments");
            let nu = !d_prev_plus.is_zero();
            let mu = if 2 * n <= s.len() {
                Some(!shifted_hankel_det(s, n).expect("length checked").is_zero())
            } else {
                None
            };
            indices.push(NormalIndex { n, nu, mu });
        }
        n += 1;
    }
    NormalIndexSet { indices }
}

/// Regularity: D_n^+ != 0 at every normal index (equivalently nu_j = mu_j
/// throughout). Returns the first violating index as witness.
pub fn is_regular(s: &MomentSequence) -> RegularityReport {
    let set = normal_indices(s);
    let mut witness = None;
    let mut undecidable = Vec::new();
    for idx in &set.indices {
        match idx.mu {
            Some(true) => {}
            Some(false) => {
                if witness.is_none() {
                    witness = Some(idx.n);
                }
            }
            None => undecidable.push(idx.n),
        }
    }
    RegularityReport {
        regular: witness.is_none(),
        witness,
        undecidable,
    }
}
