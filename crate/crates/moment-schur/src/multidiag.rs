//! Multivariate moment tensors and their diagonal decomposition.
//!
//! A tensor entry s_{i_1..i_n} belongs to exactly one shifted diagonal
//! {(j_1 + j, ..., j_n + j) : j >= 0} where the key (j_1..j_n) has at
//! least one zero offset. Each diagonal carries a one-dimensional
//! sequence weighted by multinomial coefficients; solving the tensor
//! means solving every nonempty diagonal in the product variable
//! z = z_1 ... z_n and keeping the monomial prefactor 1/(z_1^{j_1} ...)
//! symbolic as the key.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{multinomial_rational, Rational};
use crate::error::{Error, Result};
use crate::hankel::MomentSequence;
use crate::resolvent::{cf_expand, ContinuedFraction, Tail};
use crate::schur::{schur_decompose_ml, MlDecomposition, Parity};

/// Sparse multivariate moment tensor; absent entries are zero moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTensor {
    dimension: usize,
    max_degree: u32,
    entries: BTreeMap<Vec<u32>, Rational>,
}

impl MomentTensor {
    pub fn new(
        dimension: usize,
        max_degree: u32,
        entries: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidTensor {
                reason: "dimension must be at least 1".to_string(),
            });
        }
        let mut map = BTreeMap::new();
        for (idx, val) in entries {
            if idx.len() != dimension {
                return Err(Error::InvalidTensor {
                    reason: format!(
                        "index {:?} has arity {}, expected {}",
                        idx,
                        idx.len(),
                        dimension
                    ),
                });
            }
            if idx.iter().any(|&i| i > max_degree) {
                return Err(Error::InvalidTensor {
                    reason: format!("index {:?} exceeds max degree {}", idx, max_degree),
                });
            }
            if !val.is_zero() {
                map.insert(idx, val);
            }
        }
        Ok(MomentTensor {
            dimension,
            max_degree,
            entries: map,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.entries
    }

    pub fn get(&self, idx: &[u32]) -> Rational {
        self.entries
            .get(idx)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorEntryRepr {
    idx: Vec<u32>,
    val: Rational,
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    n: usize,
    entries: Vec<TensorEntryRepr>,
    max_degree: u32,
}

impl Serialize for MomentTensor {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let repr = TensorRepr {
            n: self.dimension,
            entries: self
                .entries
                .iter()
                .map(|(idx, val)| TensorEntryRepr {
                    idx: idx.clone(),
                    val: val.clone(),
                })
                .collect(),
            max_degree: self.max_degree,
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MomentTensor {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = TensorRepr::deserialize(deserializer)?;
        MomentTensor::new(
            repr.n,
            repr.max_degree,
            repr.entries.into_iter().map(|e| (e.idx, e.val)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Offsets (j_1, ..., j_n) of a shifted diagonal; at least one is zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiagonalKey {
    offsets: Vec<u32>,
}

impl DiagonalKey {
    pub fn new(offsets: Vec<u32>) -> Result<Self> {
        if offsets.is_empty() || offsets.iter().min() != Some(&0) {
            return Err(Error::InvalidDiagonalKey { key: offsets });
        }
        Ok(DiagonalKey { offsets })
    }

    /// The key owning a lattice point: subtract the minimum coordinate.
    pub fn containing(index: &[u32]) -> Self {
        let min = index.iter().min().copied().unwrap_or(0);
        DiagonalKey {
            offsets: index.iter().map(|&i| i - min).collect(),
        }
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn offset_sum(&self) -> u64 {
        self.offsets.iter().map(|&o| o as u64).sum()
    }

    pub fn is_main(&self) -> bool {
        self.offsets.iter().all(|&o| o == 0)
    }

    /// The lattice point at position j along this diagonal.
    pub fn point(&self, j: u32) -> Vec<u32> {
        self.offsets.iter().map(|&o| o + j).collect()
    }
}

/// The weighted one-dimensional sequence living on one diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalSequence {
    pub key: DiagonalKey,
    pub values: Vec<Rational>,
}

impl DiagonalSequence {
    pub fn as_moment_sequence(&self) -> Result<MomentSequence> {
        MomentSequence::new(self.values.clone())
    }
}

/// s_j = multinomial(j n + sum j_k; j_1 + j, ..., j_n + j) s_{j_1+j,...}
/// for every j that stays within the truncation.
pub fn diagonal_extract(t: &MomentTensor, key: &DiagonalKey) -> Result<DiagonalSequence> {
    if key.offsets().len() != t.dimension() || key.offsets().iter().min() != Some(&0) {
        return Err(Error::InvalidDiagonalKey {
            key: key.offsets().to_vec(),
        });
    }
    let max_offset = *key.offsets().iter().max().expect("nonempty");
    let mut values = Vec::new();
    for j in 0..=(t.max_degree().saturating_sub(max_offset)) {
        let point = key.point(j);
        let total = (j as u64) * (t.dimension() as u64) + key.offset_sum();
        let parts: Vec<u64> = point.iter().map(|&p| p as u64).collect();
        let weight = multinomial_rational(total, &parts)?;
        values.push(weight * t.get(&point));
    }
    Ok(DiagonalSequence {
        key: key.clone(),
        values,
    })
}

/// True iff every nonzero entry of the tensor lies on the key's diagonal.
pub fn diagonal_support_check(t: &MomentTensor, key: &DiagonalKey) -> bool {
    t.entries
        .keys()
        .all(|idx| DiagonalKey::containing(idx) == *key)
}

/// Coefficient map of the full expansion: the monomial
/// 1/(z_1^{a_1+1} ... z_n^{a_n+1}) carries -multinomial(|a|; a) s_a.
/// Keys are the exponent vectors (a_1+1, ..., a_n+1); zero coefficients
/// are omitted.
pub fn multivariate_expansion(
    t: &MomentTensor,
    order: u32,
) -> Result<BTreeMap<Vec<u32>, Rational>> {
    if order > t.max_degree() {
        return Err(Error::InvalidTensor {
            reason: format!(
                "expansion order {} exceeds tensor degree {}",
                order,
                t.max_degree()
            ),
        });
    }
    let mut map = BTreeMap::new();
    for (idx, val) in &t.entries {
        let total: u64 = idx.iter().map(|&i| i as u64).sum();
        if total > order as u64 {
            continue;
        }
        let parts: Vec<u64> = idx.iter().map(|&i| i as u64).collect();
        let weight = multinomial_rational(total, &parts)?;
        let coeff = -(weight * val.clone());
        if !coeff.is_zero() {
            map.insert(idx.iter().map(|&i| i + 1).collect(), coeff);
        }
    }
    Ok(map)
}

/// A solved diagonal: its weighted sequence, the Schur decomposition in
/// the product variable, and the symbolic prefactor key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalSolution {
    pub key: DiagonalKey,
    pub sequence: Vec<Rational>,
    pub decomposition: MlDecomposition,
}

impl DiagonalSolution {
    pub fn continued_fraction(&self) -> Result<ContinuedFraction> {
        Ok(ContinuedFraction::from_decomposition(&self.decomposition)?
            .with_diagonal_key(self.key.clone()))
    }

    /// Multivariate coefficients this solution reproduces: the fraction
    /// is expanded with the distinguished tail and the prefactor key
    /// shifts every exponent vector. Only the interpolation-guaranteed
    /// coefficients are emitted.
    pub fn expansion(&self) -> Result<BTreeMap<Vec<u32>, Rational>> {
        let guaranteed = self.decomposition.interpolated;
        let cf = ContinuedFraction::from_decomposition(&self.decomposition)?;
        let series = cf_expand(&cf, &Tail::Zero, guaranteed)?;
        let mut map = BTreeMap::new();
        for (i, coeff) in series.tail().iter().take(guaranteed).enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let exponents: Vec<u32> = self
                .key
                .offsets()
                .iter()
                .map(|&o| o + i as u32 + 1)
                .collect();
            map.insert(exponents, coeff.clone());
        }
        Ok(map)
    }
}

/// Everything `assemble_full` produced: solved diagonals plus the
/// failures that did not stop their siblings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullSolution {
    pub solutions: Vec<DiagonalSolution>,
    pub failures: Vec<(DiagonalKey, Error)>,
}

impl FullSolution {
    /// Union of the per-diagonal expansions on their guaranteed
    /// coefficient sets, restricted to total degree `order`.
    pub fn expansion(&self, order: u32) -> Result<BTreeMap<Vec<u32>, Rational>> {
        let mut map = BTreeMap::new();
        for sol in &self.solutions {
            for (exponents, coeff) in sol.expansion()? {
                let total: u64 = exponents.iter().map(|&e| (e - 1) as u64).sum();
                if total <= order as u64 {
                    map.insert(exponents, coeff);
                }
            }
        }
        Ok(map)
    }
}

/// Runs the Schur decomposition on one diagonal of the tensor.
pub fn solve_diagonal(
    t: &MomentTensor,
    key: &DiagonalKey,
    parity: Parity,
) -> Result<DiagonalSolution> {
    let seq = diagonal_extract(t, key)?;
    let attach = |e: Error| Error::Diagonal {
        key: key.offsets().to_vec(),
        source: Box::new(e),
    };
    let moments = seq.as_moment_sequence().map_err(attach)?;
    let decomposition = schur_decompose_ml(&moments, parity).map_err(attach)?;
    Ok(DiagonalSolution {
        key: key.clone(),
        sequence: seq.values,
        decomposition,
    })
}

/// The diagonal keys that carry at least one nonzero entry, in canonical
/// order. The keys partition the support.
pub fn support_keys(t: &MomentTensor) -> Vec<DiagonalKey> {
    let mut keys: Vec<DiagonalKey> = t
        .entries
        .keys()
        .map(|idx| DiagonalKey::containing(idx))
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

/// Partitions the support by diagonal key and solves every nonempty
/// diagonal. Per-diagonal failures are collected, not fatal.
pub fn assemble_full(t: &MomentTensor, parity: Parity) -> FullSolution {
    let mut solutions = Vec::new();
    let mut failures = Vec::new();
    for key in support_keys(t) {
        match solve_diagonal(t, &key, parity) {
            Ok(sol) => solutions.push(sol),
            Err(e) => failures.push((key, e)),
        }
    }
    FullSolution {
        solutions,
        failures,
    }
}
