//! Finite atomic measures on the positive axis (or positive orthant):
//! the brute-force ground truth for everything else in the crate.
//!
//! Moments of a discrete measure are finite rational sums, so every
//! identity the Schur machinery claims can be checked bit for bit
//! against these.

use serde::{Deserialize, Serialize};

use crate::algebra::{Rational, TruncatedLaurentSeries};
use crate::error::{Error, Result};
use crate::hankel::MomentSequence;
use crate::multidiag::{assemble_full, multivariate_expansion, MomentTensor};
use crate::resolvent::{cf_expand, ContinuedFraction, Tail};
use crate::schur::{schur_decompose_ml, Parity};

/// One weighted node of a discrete measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureAtom {
    pub node: Vec<Rational>,
    pub weight: Rational,
}

/// Finite atomic measure with distinct nodes in the open positive orthant
/// and strictly positive weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMeasure {
    dimension: usize,
    atoms: Vec<MeasureAtom>,
}

impl DiscreteMeasure {
    pub fn new(dimension: usize, atoms: Vec<MeasureAtom>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidMeasure {
                reason: "dimension must be at least 1".to_string(),
            });
        }
        for atom in &atoms {
            if atom.node.len() != dimension {
                return Err(Error::InvalidMeasure {
                    reason: format!("node {:?} has arity {}", atom.node, atom.node.len()),
                });
            }
            if atom.node.iter().any(|c| !(c > &Rational::zero())) {
                return Err(Error::InvalidMeasure {
                    reason: format!("node {:?} must have positive coordinates", atom.node),
                });
            }
            if !(atom.weight > Rational::zero()) {
                return Err(Error::InvalidMeasure {
                    reason: format!("weight {} must be positive", atom.weight),
                });
            }
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].node == atoms[j].node {
                    return Err(Error::InvalidMeasure {
                        reason: format!("repeated node {:?}", atoms[i].node),
                    });
                }
            }
        }
        Ok(DiscreteMeasure { dimension, atoms })
    }

    /// Convenience for one-dimensional measures given as (node, weight)
    /// integer pairs.
    pub fn line_measure(pairs: &[(i64, i64)]) -> Result<Self> {
        DiscreteMeasure::new(
            1,
            pairs
                .iter()
                .map(|&(t, w)| MeasureAtom {
                    node: vec![Rational::from_integer(t)],
                    weight: Rational::from_integer(w),
                })
                .collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[MeasureAtom] {
        &self.atoms
    }

    /// Exact one-dimensional moments s_0 .. s_{max_degree}.
    pub fn moments(&self, max_degree: usize) -> Result<MomentSequence> {
        if self.dimension != 1 {
            return Err(Error::InvalidMeasure {
                reason: "moment sequence needs a one-dimensional measure".to_string(),
            });
        }
        let values: Vec<Rational> = (0..=max_degree)
            .map(|j| {
                self.atoms
                    .iter()
                    .map(|a| a.weight.clone() * a.node[0].pow(j as u32))
                    .fold(Rational::zero(), |acc, v| acc + v)
            })
            .collect();
        MomentSequence::new(values)
    }

    /// Exact multivariate moments s_alpha for all alpha with every
    /// component at most `max_degree`.
    pub fn moment_tensor(&self, max_degree: u32) -> Result<MomentTensor> {
        let mut entries = Vec::new();
        let mut index = vec![0u32; self.dimension];
        loop {
            let value = self
                .atoms
                .iter()
                .map(|a| {
                    let mut v = a.weight.clone();
                    for (c, e) in a.node.iter().zip(&index) {
                        v *= c.pow(*e);
                    }
                    v
                })
                .fold(Rational::zero(), |acc, v| acc + v);
            entries.push((index.clone(), value));
            // Odometer over the index hypercube.
            let mut k = 0;
            loop {
                if k == self.dimension {
                    return MomentTensor::new(self.dimension, max_degree, entries);
                }
                if index[k] < max_degree {
                    index[k] += 1;
                    break;
                }
                index[k] = 0;
                k += 1;
            }
        }
    }

    /// Stieltjes-transform expansion computed per atom (geometric series
    /// in 1/z, then summed) — deliberately not routed through `moments`.
    pub fn stieltjes_series(&self, order: usize) -> Result<TruncatedLaurentSeries> {
        if self.dimension != 1 {
            return Err(Error::InvalidMeasure {
                reason: "stieltjes series needs a one-dimensional measure".to_string(),
            });
        }
        let mut acc = TruncatedLaurentSeries::zero_to_order(order);
        for atom in &self.atoms {
            let mut tail = Vec::with_capacity(order);
            let mut power = atom.weight.clone();
            for _ in 0..order {
                tail.push(-power.clone());
                power *= atom.node[0].clone();
            }
            let series = TruncatedLaurentSeries::new(crate::algebra::Polynomial::zero(), tail);
            acc = acc.add(&series);
        }
        Ok(acc)
    }
}

/// One coefficient disagreement found by a round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// 1-D: the moment index. n-D: the monomial exponent vector.
    pub location: Vec<u32>,
    pub expected: Rational,
    pub got: Rational,
}

/// Outcome of moments -> Schur decomposition -> expansion -> comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub dimension: usize,
    pub parity: Parity,
    /// Continued-fraction levels (1-D) or solved diagonals (n-D).
    pub levels: usize,
    pub coefficients_checked: usize,
    pub agreement: bool,
    pub first_mismatch: Option<Mismatch>,
    /// Decomposition failures are reported, not thrown.
    pub failures: Vec<Error>,
}

/// Round-trip verification. For a one-dimensional k-atom measure the
/// moments s_0..s_{2k-1} (even) or s_0..s_{2k-2} (odd) are decomposed and
/// the fraction re-expanded with the distinguished tail; every
/// interpolated coefficient must match exactly. For n >= 2 the tensor is
/// decomposed by diagonals and compared against the direct expansion on
/// each diagonal's guaranteed monomials.
pub fn roundtrip_verify(measure: &DiscreteMeasure, parity: Parity) -> Result<VerificationReport> {
    if measure.dimension() == 1 {
        roundtrip_1d(measure, parity)
    } else {
        roundtrip_nd(measure, parity)
    }
}

fn roundtrip_1d(measure: &DiscreteMeasure, parity: Parity) -> Result<VerificationReport> {
    let k = measure.atoms().len();
    let count = match parity {
        Parity::Even => 2 * k,
        Parity::Odd => 2 * k - 1,
    };
    let moments = measure.moments(count - 1)?;
    let mut report = VerificationReport {
        dimension: 1,
        parity,
        levels: 0,
        coefficients_checked: 0,
        agreement: true,
        first_mismatch: None,
        failures: Vec::new(),
    };
    let dec = match schur_decompose_ml(&moments, parity) {
        Ok(d) => d,
        Err(e) => {
            report.agreement = false;
            report.failures.push(e);
            return Ok(report);
        }
    };
    report.levels = dec.level_count();
    let cf = ContinuedFraction::from_decomposition(&dec)?;
    let expansion = match cf_expand(&cf, &Tail::Zero, dec.interpolated) {
        Ok(s) => s,
        Err(e) => {
            report.agreement = false;
            report.failures.push(e);
            return Ok(report);
        }
    };
    for (j, s_j) in moments.values().iter().take(dec.interpolated).enumerate() {
        let expected = -s_j.clone();
        let got = expansion
            .coefficient(-(j as i64) - 1)
            .unwrap_or_else(Rational::zero);
        report.coefficients_checked += 1;
        if expected != got {
            report.agreement = false;
            report.first_mismatch = Some(Mismatch {
                location: vec![j as u32],
                expected,
                got,
            });
            break;
        }
    }
    Ok(report)
}

fn roundtrip_nd(measure: &DiscreteMeasure, parity: Parity) -> Result<VerificationReport> {
    let k = measure.atoms().len().max(1) as u32;
    let max_degree = 2 * k;
    let tensor = measure.moment_tensor(max_degree)?;
    let direct = multivariate_expansion(&tensor, max_degree)?;
    let full = assemble_full(&tensor, parity);
    let mut report = VerificationReport {
        dimension: measure.dimension(),
        parity,
        levels: full.solutions.len(),
        coefficients_checked: 0,
        agreement: true,
        first_mismatch: None,
        failures: full.failures.iter().map(|(_, e)| e.clone()).collect(),
    };
    let reassembled = full.expansion(max_degree)?;
    for (monomial, coeff) in &reassembled {
        let expected = direct.get(monomial).cloned().unwrap_or_else(Rational::zero);
        report.coefficients_checked += 1;
        if &expected != coeff {
            report.agreement = false;
            report.first_mismatch = Some(Mismatch {
                location: monomial.clone(),
                expected,
                got: coeff.clone(),
            });
            break;
        }
    }
    Ok(report)
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            atoms: &'a [MeasureAtom],
        }
        Repr {
            n: self.dimension,
            atoms: &self.atoms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            atoms: Vec<MeasureAtom>,
        }
        let repr = Repr::deserialize(deserializer)?;
        DiscreteMeasure::new(repr.n, repr.atoms).map_err(serde::de::Error::custom)
    }
}
