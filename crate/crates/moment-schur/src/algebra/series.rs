//! Formal Laurent series in 1/z, truncated at a trusted order.
//!
//! A series here is a polynomial part (exactly known) plus a tail of
//! coefficients of z^{-1}, z^{-2}, .... The `order` records how many tail
//! coefficients are trusted: everything deeper is unknown. Every
//! arithmetic operation computes the worst-case number of still-valid
//! coefficients of its result and records it, so downstream consumers
//! always know which coefficients are exact.
//!
//! Series built from complete data (polynomials, a literal zero tail)
//! carry `SeriesOrder::Exact` instead: all coefficients beyond the stored
//! tail are exactly zero, and the object behaves as if its trusted order
//! were infinite.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use super::polynomial::Polynomial;
use super::rational::Rational;
use super::toeplitz::power_series_reciprocal;
use crate::error::{Error, Result};

/// Trust marker for the tail of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOrder {
    /// All coefficients beyond the stored tail are exactly zero.
    Exact,
    /// Exactly this many tail coefficients are trusted.
    Trusted(usize),
}

/// Tail depth used when dividing two exact series, whose quotient has no
/// intrinsic trust bound. Callers that need more use [`TruncatedLaurentSeries::div_to`].
pub const EXACT_DIV_DEPTH: usize = 16;

/// Formal expansion c_d z^d + ... + c_0 + c_{-1}/z + c_{-2}/z^2 + ...
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedLaurentSeries {
    poly: Polynomial,
    /// tail[i] is the coefficient of z^{-(i+1)}.
    tail: Vec<Rational>,
    order: SeriesOrder,
}

impl TruncatedLaurentSeries {
    /// Series with the given parts and a finite trusted order equal to the
    /// tail length.
    pub fn new(poly: Polynomial, tail: Vec<Rational>) -> Self {
        let order = SeriesOrder::Trusted(tail.len());
        TruncatedLaurentSeries { poly, tail, order }
    }

    /// Exact series: the stored coefficients are the whole object.
    pub fn exact(poly: Polynomial, mut tail: Vec<Rational>) -> Self {
        while tail.last().is_some_and(Rational::is_zero) {
            tail.pop();
        }
        TruncatedLaurentSeries {
            poly,
            tail,
            order: SeriesOrder::Exact,
        }
    }

    pub fn from_polynomial(poly: Polynomial) -> Self {
        TruncatedLaurentSeries::exact(poly, Vec::new())
    }

    pub fn exact_zero() -> Self {
        TruncatedLaurentSeries::exact(Polynomial::zero(), Vec::new())
    }

    /// Zero to the given trusted order: coefficients of z^{-1}..z^{-n} are
    /// known to vanish, deeper ones are unknown.
    pub fn zero_to_order(n: usize) -> Self {
        TruncatedLaurentSeries::new(Polynomial::zero(), vec![Rational::zero(); n])
    }

    /// The formal expansion -s_0/z - s_1/z^2 - ... - s_{l}/z^{l+1} of a
    /// moment sequence, with trusted order equal to the sequence length.
    pub fn from_moments(moments: &[Rational]) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::EmptySequence);
        }
        let tail = moments.iter().map(|s| -s).collect();
        Ok(TruncatedLaurentSeries::new(Polynomial::zero(), tail))
    }

    pub fn order(&self) -> SeriesOrder {
        self.order
    }

    /// Number of trusted tail coefficients; `None` means exact.
    pub fn trusted_order(&self) -> Option<usize> {
        match self.order {
            SeriesOrder::Exact => None,
            SeriesOrder::Trusted(n) => Some(n),
        }
    }

    pub fn polynomial_part(&self) -> &Polynomial {
        &self.poly
    }

    /// Trusted tail coefficients (coefficient of z^{-1} first).
    pub fn tail(&self) -> &[Rational] {
        &self.tail
    }

    /// Coefficient of z^e, or `None` when e lies beyond the trusted order.
    pub fn coefficient(&self, e: i64) -> Option<Rational> {
        if e >= 0 {
            return Some(self.poly.coeff(e as usize));
        }
        let i = (-e - 1) as usize;
        match self.order {
            SeriesOrder::Exact => Some(self.tail.get(i).cloned().unwrap_or_else(Rational::zero)),
            SeriesOrder::Trusted(n) if i < n => Some(self.tail[i].clone()),
            SeriesOrder::Trusted(_) => None,
        }
    }

    fn known_coeff(&self, e: i64) -> Rational {
        self.coefficient(e)
            .expect("coefficient access beyond trusted order")
    }

    /// Highest exponent with a nonzero known coefficient; `None` when the
    /// known part is identically zero.
    fn known_top(&self) -> Option<i64> {
        if let Some(d) = self.poly.degree() {
            return Some(d as i64);
        }
        self.tail
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| -(i as i64) - 1)
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero_to_trusted_order(&self) -> bool {
        self.known_top().is_none()
    }

    /// Highest exponent carrying a nonzero known coefficient.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.known_top()
    }

    /// Drops information: caps the trusted order at `n`. An exact series
    /// becomes a trusted one with zero-padded tail.
    pub fn truncated(&self, n: usize) -> Self {
        match self.order {
            SeriesOrder::Exact => {
                let mut tail = self.tail.clone();
                tail.resize(n, Rational::zero());
                tail.truncate(n);
                TruncatedLaurentSeries::new(self.poly.clone(), tail)
            }
            SeriesOrder::Trusted(m) => {
                if m <= n {
                    self.clone()
                } else {
                    let mut tail = self.tail.clone();
                    tail.truncate(n);
                    TruncatedLaurentSeries::new(self.poly.clone(), tail)
                }
            }
        }
    }

    /// The series minus its polynomial part.
    pub fn proper_part(&self) -> Self {
        TruncatedLaurentSeries {
            poly: Polynomial::zero(),
            tail: self.tail.clone(),
            order: self.order,
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedLaurentSeries {
            poly: -&self.poly,
            tail: self.tail.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return match self.order {
                SeriesOrder::Exact => TruncatedLaurentSeries::exact_zero(),
                SeriesOrder::Trusted(n) => TruncatedLaurentSeries::zero_to_order(n),
            };
        }
        TruncatedLaurentSeries {
            poly: self.poly.scale(c),
            tail: self.tail.iter().map(|a| a * c).collect(),
            order: self.order,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, true)
    }

    fn combine(&self, rhs: &Self, subtract: bool) -> Self {
        let poly = if subtract {
            &self.poly - &rhs.poly
        } else {
            &self.poly + &rhs.poly
        };
        let (order, len) = match (self.order, rhs.order) {
            (SeriesOrder::Exact, SeriesOrder::Exact) => {
                (SeriesOrder::Exact, self.tail.len().max(rhs.tail.len()))
            }
            (SeriesOrder::Exact, SeriesOrder::Trusted(n))
            | (SeriesOrder::Trusted(n), SeriesOrder::Exact) => (SeriesOrder::Trusted(n), n),
            (SeriesOrder::Trusted(a), SeriesOrder::Trusted(b)) => {
                let n = a.min(b);
                (SeriesOrder::Trusted(n), n)
            }
        };
        let mut tail = Vec::with_capacity(len);
        for i in 0..len {
            let e = -(i as i64) - 1;
            let a = self.known_coeff(e);
            let b = rhs.known_coeff(e);
            tail.push(if subtract { a - b } else { a + b });
        }
        if order == SeriesOrder::Exact {
            TruncatedLaurentSeries::exact(poly, tail)
        } else {
            TruncatedLaurentSeries { poly, tail, order }
        }
    }

    pub fn add_polynomial(&self, p: &Polynomial) -> Self {
        self.add(&TruncatedLaurentSeries::from_polynomial(p.clone()))
    }

    /// Effective top exponent for worst-case order propagation: for a
    /// series that is zero to trusted order n, an unknown coefficient may
    /// first appear at z^{-(n+1)}.
    fn effective_top(&self) -> Option<i64> {
        match (self.known_top(), self.order) {
            (Some(t), _) => Some(t),
            (None, SeriesOrder::Trusted(n)) => Some(-(n as i64) - 1),
            (None, SeriesOrder::Exact) => None, // exact zero
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        // Exact zero annihilates regardless of the other factor's trust.
        if self.order == SeriesOrder::Exact && self.known_top().is_none() {
            return Ok(TruncatedLaurentSeries::exact_zero());
        }
        if rhs.order == SeriesOrder::Exact && rhs.known_top().is_none() {
            return Ok(TruncatedLaurentSeries::exact_zero());
        }

        if self.order == SeriesOrder::Exact && rhs.order == SeriesOrder::Exact {
            return Ok(self.mul_exact(rhs));
        }

        let top_f = self.effective_top().expect("nonzero by the checks above");
        let top_g = rhs.effective_top().expect("nonzero by the checks above");
        let mut order = i64::MAX;
        if let SeriesOrder::Trusted(mf) = self.order {
            order = order.min(mf as i64 - top_g);
        }
        if let SeriesOrder::Trusted(mg) = rhs.order {
            order = order.min(mg as i64 - top_f);
        }
        if order < 0 {
            return Err(Error::InsufficientOrder { exponent: -order });
        }

        let top = top_f + top_g;
        let mut out = CoeffAccum::new(order as usize);
        let lo_f = self.lowest_known_exponent();
        let lo_g = rhs.lowest_known_exponent();
        for ef in lo_f..=top_f {
            let a = self.known_coeff(ef);
            if a.is_zero() {
                continue;
            }
            for eg in lo_g..=top_g {
                let e = ef + eg;
                if e < -order || e > top {
                    continue;
                }
                let b = rhs.known_coeff(eg);
                if b.is_zero() {
                    continue;
                }
                out.add(e, &a * &b);
            }
        }
        Ok(out.into_series(SeriesOrder::Trusted(order as usize)))
    }

    fn lowest_known_exponent(&self) -> i64 {
        match self.order {
            SeriesOrder::Exact => -(self.tail.len() as i64),
            SeriesOrder::Trusted(n) => -(n as i64),
        }
    }

    fn mul_exact(&self, rhs: &Self) -> Self {
        let top_f = self.known_top().unwrap();
        let top_g = rhs.known_top().unwrap();
        let lo = self.lowest_known_exponent() + rhs.lowest_known_exponent();
        let order = if lo < 0 { (-lo) as usize } else { 0 };
        let mut out = CoeffAccum::new(order);
        for ef in self.lowest_known_exponent()..=top_f {
            let a = self.known_coeff(ef);
            if a.is_zero() {
                continue;
            }
            for eg in rhs.lowest_known_exponent()..=top_g {
                let b = rhs.known_coeff(eg);
                if b.is_zero() {
                    continue;
                }
                out.add(ef + eg, &a * &b);
            }
        }
        out.into_series(SeriesOrder::Exact)
    }

    pub fn mul_polynomial(&self, p: &Polynomial) -> Result<Self> {
        self.mul(&TruncatedLaurentSeries::from_polynomial(p.clone()))
    }

    /// Formal quotient, including a polynomial part when the numerator's
    /// leading exponent exceeds the denominator's. The trusted order of
    /// the result is the worst case derivable from the operands; when both
    /// operands are exact it defaults to [`EXACT_DIV_DEPTH`].
    pub fn div(&self, den: &Self) -> Result<Self> {
        self.div_impl(den, None)
    }

    /// Quotient with an explicit cap on the tail depth. For exact
    /// operands this selects the materialized depth.
    pub fn div_to(&self, den: &Self, depth: usize) -> Result<Self> {
        self.div_impl(den, Some(depth))
    }

    /// Reciprocal as a special case of division.
    pub fn reciprocal(&self) -> Result<Self> {
        TruncatedLaurentSeries::from_polynomial(Polynomial::one()).div(self)
    }

    fn div_impl(&self, den: &Self, requested: Option<usize>) -> Result<Self> {
        let top_d = match den.known_top() {
            Some(t) => t,
            None => {
                let order = den.trusted_order().unwrap_or(0);
                return Err(Error::DivisionByZeroSeries { order });
            }
        };

        // Numerator identically zero: the quotient is zero, trusted as far
        // as the numerator's own trust allows.
        if self.known_top().is_none() {
            return match self.order {
                SeriesOrder::Exact => Ok(TruncatedLaurentSeries::exact_zero()),
                SeriesOrder::Trusted(mn) => {
                    let order = mn as i64 + top_d;
                    if order < 0 {
                        return Err(Error::InsufficientOrder { exponent: -order });
                    }
                    let order = requested.map_or(order as usize, |r| r.min(order as usize));
                    Ok(TruncatedLaurentSeries::zero_to_order(order))
                }
            };
        }
        let top_n = self.known_top().unwrap();

        let mut order: Option<i64> = None;
        let mut tighten = |bound: i64| {
            order = Some(order.map_or(bound, |o| o.min(bound)));
        };
        if let SeriesOrder::Trusted(mn) = self.order {
            tighten(mn as i64 + top_d);
        }
        if let SeriesOrder::Trusted(md) = den.order {
            tighten(md as i64 + 2 * top_d - top_n);
        }
        if let Some(r) = requested {
            tighten(r as i64);
        }
        let order = order.unwrap_or(EXACT_DIV_DEPTH as i64);
        if order < 0 {
            return Err(Error::InsufficientOrder { exponent: -order });
        }

        let top_q = top_n - top_d;
        // Highest exponent of the quotient down to z^{-order}.
        let count = top_q + order;
        if count < 0 {
            return Ok(TruncatedLaurentSeries::zero_to_order(order as usize));
        }
        let count = count as usize + 1;

        let num_window: Vec<Rational> = (0..count)
            .map(|k| {
                self.coefficient(top_n - k as i64)
                    .unwrap_or_else(Rational::zero)
            })
            .collect();
        let den_window: Vec<Rational> = (0..count)
            .map(|k| {
                den.coefficient(top_d - k as i64)
                    .unwrap_or_else(Rational::zero)
            })
            .collect();
        let recip = power_series_reciprocal(&den_window, count).map_err(|_| {
            Error::DivisionByZeroSeries {
                order: den.trusted_order().unwrap_or(den.tail.len()),
            }
        })?;

        let mut out = CoeffAccum::new(order as usize);
        for k in 0..count {
            let mut q = Rational::zero();
            for i in 0..=k {
                if !num_window[i].is_zero() && !recip[k - i].is_zero() {
                    q += &num_window[i] * &recip[k - i];
                }
            }
            out.add(top_q - k as i64, q);
        }
        Ok(out.into_series(SeriesOrder::Trusted(order as usize)))
    }
}

/// Accumulates coefficients by exponent and assembles a series.
struct CoeffAccum {
    poly: Vec<Rational>,
    tail: Vec<Rational>,
}

impl CoeffAccum {
    fn new(tail_len: usize) -> Self {
        CoeffAccum {
            poly: Vec::new(),
            tail: vec![Rational::zero(); tail_len],
        }
    }

    fn add(&mut self, e: i64, v: Rational) {
        if v.is_zero() {
            return;
        }
        if e >= 0 {
            let k = e as usize;
            if self.poly.len() <= k {
                self.poly.resize(k + 1, Rational::zero());
            }
            self.poly[k] += v;
        } else {
            let i = (-e - 1) as usize;
            if i < self.tail.len() {
                self.tail[i] += v;
            } else {
                debug_assert!(false, "coefficient at z^{} outside accumulator window", e);
            }
        }
    }

    fn into_series(self, order: SeriesOrder) -> TruncatedLaurentSeries {
        let poly = Polynomial::new(self.poly);
        match order {
            SeriesOrder::Exact => TruncatedLaurentSeries::exact(poly, self.tail),
            SeriesOrder::Trusted(_) => TruncatedLaurentSeries::new(poly, self.tail),
        }
    }
}

impl fmt::Debug for TruncatedLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.poly)?;
        for (i, c) in self.tail.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " + ({})/z^{}", c, i + 1)?;
            }
        }
        match self.order {
            SeriesOrder::Exact => write!(f, " [exact]"),
            SeriesOrder::Trusted(n) => write!(f, " + o(1/z^{})", n),
        }
    }
}

impl Serialize for TruncatedLaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let has_poly = !self.poly.is_zero();
        let exact = self.order == SeriesOrder::Exact;
        let mut n = 2;
        if has_poly {
            n += 1;
        }
        if exact {
            n += 1;
        }
        let mut s = serializer.serialize_struct("TruncatedLaurentSeries", n)?;
        s.serialize_field("coeffs", &self.tail)?;
        s.serialize_field(
            "order",
            &match self.order {
                SeriesOrder::Exact => self.tail.len(),
                SeriesOrder::Trusted(k) => k,
            },
        )?;
        if exact {
            s.serialize_field("exact", &true)?;
        }
        if has_poly {
            s.serialize_field("poly", self.poly.coefficients())?;
        }
        s.end()
    }
}

impl<'de> Deserialize<'de> for TruncatedLaurentSeries {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: Vec<Rational>,
            order: usize,
            #[serde(default)]
            exact: bool,
            #[serde(default)]
            poly: Vec<Rational>,
        }
        let r = Repr::deserialize(deserializer)?;
        let poly = Polynomial::new(r.poly);
        if r.exact {
            Ok(TruncatedLaurentSeries::exact(poly, r.coeffs))
        } else {
            let mut tail = r.coeffs;
            tail.resize(r.order, Rational::zero());
            Ok(TruncatedLaurentSeries::new(poly, tail))
        }
    }
}
