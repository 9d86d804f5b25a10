//! Dense univariate polynomials over `Rational`.
//!
//! The formal variable is `z`. In the multidimensional modules `z` stands
//! for the product z_1 * ... * z_n; nothing here depends on that reading.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::rational::Rational;

/// Polynomial with coefficients in ascending degree order.
///
/// Invariant: the last stored coefficient is nonzero, so the zero
/// polynomial is the empty coefficient list and `degree()` is `None`.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial c * z^k.
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Polynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of z^k (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Evaluation at the origin; for the product variable this is the
    /// value at (0, ..., 0).
    pub fn eval_at_zero(&self) -> Rational {
        self.constant_term()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by z^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Exact division by z; `None` if the constant term is nonzero.
    pub fn shift_down(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if !self.coeffs[0].is_zero() {
            return None;
        }
        Some(Polynomial {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Euclidean division: self = q * den + r with deg r < deg den.
    /// `None` when den is zero.
    pub fn div_rem(&self, den: &Polynomial) -> Option<(Polynomial, Polynomial)> {
        let dd = den.degree()?;
        let lead = den.leading_coeff().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        let mut quot: Vec<Rational> = Vec::new();
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().expect("nonempty") / &lead;
            if quot.len() <= k {
                quot.resize(k + 1, Rational::zero());
            }
            quot[k] = c.clone();
            for (i, dc) in den.coeffs.iter().enumerate() {
                let idx = k + i;
                rem[idx] = rem[idx].clone() - &c * dc;
            }
            rem.pop();
            while rem.last().is_some_and(Rational::is_zero) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        Some((Polynomial::new(quot), Polynomial::new(rem)))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Polynomial::new(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        Polynomial::new(coeffs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})z", c)?,
                _ => write!(f, "({})z^{}", c, k)?,
            }
        }
        Ok(())
    }
}
