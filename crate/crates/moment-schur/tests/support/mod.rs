//! Seeded random generators shared by the integration suites.
//!
//! Seeds are fixed so every run sees the same instances.
#![allow(dead_code)] // each test binary uses a different subset

use moment_schur::{
    ContinuedFraction, DiagonalKey, DiscreteMeasure, MeasureAtom, MomentSequence, MomentTensor,
    Polynomial, Rational,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MEASURE_SEED: u64 = 0x5eed_0001;
pub const SEQUENCE_SEED: u64 = 0x5eed_0002;
pub const CF_SEED: u64 = 0x5eed_0003;
pub const TENSOR_SEED: u64 = 0x5eed_0004;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct positive rational nodes p/q with p, q <= 20 and value in
/// (0, 10]; weights in (0, 5].
pub fn random_measure(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteMeasure {
    let k = rng.gen_range(1..=max_atoms);
    let mut nodes: Vec<Rational> = Vec::new();
    while nodes.len() < k {
        let p = rng.gen_range(1..=20i64);
        let q = rng.gen_range(1..=20i64);
        let node = Rational::new(p, q);
        if node <= Rational::from_integer(10) && !nodes.contains(&node) {
            nodes.push(node);
        }
    }
    let atoms = nodes
        .into_iter()
        .map(|node| MeasureAtom {
            node: vec![node],
            weight: Rational::new(rng.gen_range(1..=20i64), rng.gen_range(4..=20i64)),
        })
        .collect();
    DiscreteMeasure::new(1, atoms).expect("construction is valid by generation")
}

/// Random small-integer moment sequence; zero entries are common so the
/// degenerate index patterns get exercised.
pub fn random_sequence(rng: &mut ChaCha8Rng, max_len: usize) -> MomentSequence {
    let len = rng.gen_range(1..=max_len);
    let values: Vec<Rational> = (0..len)
        .map(|_| Rational::from_integer(rng.gen_range(-3..=3i64)))
        .collect();
    MomentSequence::new(values).expect("nonempty")
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Polynomial {
    let deg = rng.gen_range(0..=max_deg);
    let mut coeffs: Vec<Rational> = (0..deg)
        .map(|_| Rational::from_integer(rng.gen_range(-2..=2i64)))
        .collect();
    let mut lead = 0;
    while lead == 0 {
        lead = rng.gen_range(-3..=3i64);
    }
    coeffs.push(Rational::from_integer(lead));
    Polynomial::new(coeffs)
}

/// Random fraction with up to `max_levels` levels, random parity, random
/// small-degree atoms, and an optional diagonal key.
pub fn random_cf(rng: &mut ChaCha8Rng, max_levels: usize) -> ContinuedFraction {
    let n = rng.gen_range(1..=max_levels);
    let m_atoms: Vec<Polynomial> = (0..n).map(|_| random_poly(rng, 2)).collect();
    let even = rng.gen_bool(0.5);
    let l_count = if even { n } else { n - 1 };
    let l_atoms: Vec<Polynomial> = (0..l_count).map(|_| random_poly(rng, 1)).collect();
    let cf = if even {
        ContinuedFraction::even(m_atoms, l_atoms).expect("valid by construction")
    } else {
        ContinuedFraction::odd(m_atoms, l_atoms).expect("valid by construction")
    };
    if rng.gen_bool(0.4) {
        let mut offsets = vec![rng.gen_range(0..=2u32), rng.gen_range(0..=2u32)];
        let zero_at = rng.gen_range(0..2usize);
        offsets[zero_at] = 0;
        cf.with_diagonal_key(DiagonalKey::new(offsets).expect("one zero offset"))
    } else {
        cf
    }
}

/// Sparse random tensor: dimension in 1..=3, per-coordinate degree bound
/// 4, a handful of nonzero entries with total degree <= 4.
pub fn random_tensor(rng: &mut ChaCha8Rng) -> MomentTensor {
    let n = rng.gen_range(1..=3usize);
    let max_degree = 4u32;
    let count = rng.gen_range(1..=6usize);
    let mut entries = Vec::new();
    for _ in 0..count {
        let mut idx = vec![0u32; n];
        let mut budget = 4u32;
        for coord in idx.iter_mut() {
            let v = rng.gen_range(0..=budget.min(4));
            *coord = v;
            budget -= v;
        }
        let val = Rational::from_integer(rng.gen_range(-5..=5i64));
        entries.push((idx, val));
    }
    MomentTensor::new(n, max_degree, entries).expect("indices within bounds")
}
