//! Indeterminacy diagnostics: exact partial sums of the two series
//! criteria, reported to a requested depth.
//!
//! The criteria are statements about infinite data; a truncated sequence
//! can only exhibit partial sums, so the verdict vocabulary never claims
//! (in)determinacy of the untruncated problem.

use serde::Serialize;

use crate::algebra::{Polynomial, Rational};
use crate::error::{Error, Result};
use crate::schur::AtomAB;

/// What the partial sums looked like up to the requested depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Summands were not increasing over the inspected range.
    BoundedSoFar,
    /// The last summand exceeded the first.
    Growing,
    /// The fraction is finite and fully consumed; nothing remains.
    Exhausted,
}

/// Partial sums of the indeterminacy criteria. The (a, b) route fills
/// `sum_p`/`sum_q`, the (m, l) route fills `sum_m`/`sum_l`; a merged
/// report carries all four.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndeterminacyReport {
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_p: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_q: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_m: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_l: Option<Rational>,
    pub verdict: Verdict,
    /// True when every recorded summand was nonnegative, so the partial
    /// sums are monotone in depth.
    pub summands_nonnegative: bool,
}

impl IndeterminacyReport {
    /// Combines the two half-reports into one (CLI convenience).
    pub fn merge(ab: IndeterminacyReport, ml: IndeterminacyReport) -> IndeterminacyReport {
        IndeterminacyReport {
            depth: ab.depth.max(ml.depth),
            sum_p: ab.sum_p,
            sum_q: ab.sum_q,
            sum_m: ml.sum_m,
            sum_l: ml.sum_l,
            verdict: if ab.verdict == ml.verdict {
                ab.verdict
            } else {
                Verdict::BoundedSoFar
            },
            summands_nonnegative: ab.summands_nonnegative && ml.summands_nonnegative,
        }
    }
}

/// First- and second-kind polynomials of the (a, b) fraction
/// -b_0/(a_0 - b_1/(a_1 - ...)): P_0 = 1, P_1 = a_0, Q_0 = 0, Q_1 = -b_0,
/// then y_{i+1} = a_i y_i - b_i y_{i-1}.
pub fn ab_polynomial_pairs(atoms: &[AtomAB]) -> Vec<(Polynomial, Polynomial)> {
    let mut pairs: Vec<(Polynomial, Polynomial)> = Vec::with_capacity(atoms.len() + 1);
    pairs.push((Polynomial::one(), Polynomial::zero()));
    if atoms.is_empty() {
        return pairs;
    }
    pairs.push((
        atoms[0].a.clone(),
        Polynomial::constant(-atoms[0].b.clone()),
    ));
    for i in 1..atoms.len() {
        let (p1, q1) = &pairs[i];
        let (p0, q0) = &pairs[i - 1];
        let p = &(&atoms[i].a * p1) - &p0.scale(&atoms[i].b);
        let q = &(&atoms[i].a * q1) - &q0.scale(&atoms[i].b);
        pairs.push((p, q));
    }
    pairs
}

fn verdict_for(summands: &[Rational], exhausted: bool) -> Verdict {
    if exhausted {
        return Verdict::Exhausted;
    }
    match (summands.first(), summands.last()) {
        (Some(first), Some(last)) if last > first => Verdict::Growing,
        _ => Verdict::BoundedSoFar,
    }
}

/// Partial sums sum_{i<depth} P_i(0)^2 / (b_0 ... b_i) and the same with
/// Q. The polynomial pairs are passed in so an independent recomputation
/// can be cross-checked against [`ab_polynomial_pairs`].
pub fn indeterminacy_sums_ab(
    atoms: &[AtomAB],
    pairs: &[(Polynomial, Polynomial)],
    depth: usize,
) -> Result<IndeterminacyReport> {
    if depth > atoms.len() {
        return Err(Error::LevelOutOfRange {
            index: depth,
            available: atoms.len(),
        });
    }
    if let Some(i) = atoms.iter().position(|a| a.b.is_zero()) {
        return Err(Error::SingularStep { level: i });
    }
    if pairs.len() < depth {
        return Err(Error::LevelOutOfRange {
            index: depth,
            available: pairs.len(),
        });
    }
    let mut sum_p = Rational::zero();
    let mut sum_q = Rational::zero();
    let mut summands = Vec::with_capacity(depth);
    let mut nonneg = true;
    let mut b_product = Rational::one();
    for i in 0..depth {
        b_product *= atoms[i].b.clone();
        let p0 = pairs[i].0.eval_at_zero();
        let q0 = pairs[i].1.eval_at_zero();
        let term_p = &(&p0 * &p0) / &b_product;
        let term_q = &(&q0 * &q0) / &b_product;
        if term_p.is_negative() || term_q.is_negative() {
            nonneg = false;
        }
        sum_p += term_p.clone();
        sum_q += term_q;
        summands.push(term_p);
    }
    Ok(IndeterminacyReport {
        depth,
        sum_p: Some(sum_p),
        sum_q: Some(sum_q),
        sum_m: None,
        sum_l: None,
        verdict: verdict_for(&summands, depth == atoms.len()),
        summands_nonnegative: nonneg,
    })
}

/// Partial sums sum m_i(0,...,0) and sum l_i for the regular case. Any
/// non-constant l within the requested depth makes the regular-case
/// criterion inapplicable.
pub fn indeterminacy_sums_ml(
    m_atoms: &[Polynomial],
    l_atoms: &[Polynomial],
    depth: usize,
) -> Result<IndeterminacyReport> {
    if depth > m_atoms.len() {
        return Err(Error::LevelOutOfRange {
            index: depth,
            available: m_atoms.len(),
        });
    }
    for (i, l) in l_atoms.iter().take(depth).enumerate() {
        if let Some(d) = l.degree() {
            if d > 0 {
                return Err(Error::NonConstantAtom {
                    level: i + 1,
                    degree: d,
                });
            }
        }
    }
    let mut sum_m = Rational::zero();
    let mut sum_l = Rational::zero();
    let mut summands = Vec::new();
    let mut nonneg = true;
    for (i, m) in m_atoms.iter().take(depth).enumerate() {
        let m0 = m.eval_at_zero();
        if m0.is_negative() {
            nonneg = false;
        }
        sum_m += m0.clone();
        summands.push(m0);
        if i < l_atoms.len() {
            let l0 = l_atoms[i].eval_at_zero();
            if l0.is_negative() {
                nonneg = false;
            }
            sum_l += l0.clone();
            summands.push(l0);
        }
    }
    Ok(IndeterminacyReport {
        depth,
        sum_p: None,
        sum_q: None,
        sum_m: Some(sum_m),
        sum_l: Some(sum_l),
        verdict: verdict_for(&summands, depth == m_atoms.len()),
        summands_nonnegative: nonneg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::hankel::MomentSequence;
    use crate::schur::{ab_cascade, schur_decompose_ml, Parity};

    fn poly_q(cs: &[(i64, i64)]) -> Polynomial {
        Polynomial::new(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn ab_sums_delta1() {
        let atoms = ab_cascade(&MomentSequence::from_integers(&[1, 1])).unwrap();
        assert_eq!(atoms.len(), 1);
        let pairs = ab_polynomial_pairs(&atoms);
        let report = indeterminacy_sums_ab(&atoms, &pairs, 1).unwrap();
        assert_eq!(report.sum_p, Some(rat(1, 1)));
        assert_eq!(report.sum_q, Some(rat(0, 1)));
        assert_eq!(report.verdict, Verdict::Exhausted);
    }

    #[test]
    fn depth_zero_sums_are_zero() {
        let atoms = ab_cascade(&MomentSequence::from_integers(&[2, 3, 5, 9])).unwrap();
        let pairs = ab_polynomial_pairs(&atoms);
        let report = indeterminacy_sums_ab(&atoms, &pairs, 0).unwrap();
        assert_eq!(report.sum_p, Some(Rational::zero()));
        assert_eq!(report.sum_q, Some(Rational::zero()));

        let report = indeterminacy_sums_ml(&[], &[], 0).unwrap();
        assert_eq!(report.sum_m, Some(Rational::zero()));
        assert_eq!(report.sum_l, Some(Rational::zero()));
    }

    #[test]
    fn ml_sums_delta1_and_two_atoms() {
        let dec =
            schur_decompose_ml(&MomentSequence::from_integers(&[1, 1]), Parity::Even).unwrap();
        let m: Vec<Polynomial> = dec.levels.iter().map(|l| l.m.clone()).collect();
        let l: Vec<Polynomial> = dec.levels.iter().filter_map(|l| l.l.clone()).collect();
        let report = indeterminacy_sums_ml(&m, &l, 1).unwrap();
        assert_eq!(report.sum_m, Some(rat(1, 1)));
        assert_eq!(report.sum_l, Some(rat(1, 1)));
        assert_eq!(report.verdict, Verdict::Exhausted);
        assert!(report.summands_nonnegative);

        let dec = schur_decompose_ml(&MomentSequence::from_integers(&[2, 3, 5, 9]), Parity::Even)
            .unwrap();
        let m: Vec<Polynomial> = dec.levels.iter().map(|l| l.m.clone()).collect();
        let l: Vec<Polynomial> = dec.levels.iter().filter_map(|l| l.l.clone()).collect();
        let report = indeterminacy_sums_ml(&m, &l, 2).unwrap();
        assert_eq!(report.sum_m, Some(rat(5, 1))); // 1/2 + 9/2
        assert_eq!(report.sum_l, Some(rat(3, 2))); // 4/3 + 1/6
    }

    #[test]
    fn non_constant_l_reports_inapplicability() {
        let m = vec![poly_q(&[(1, 1)])];
        let l = vec![poly_q(&[(0, 1), (1, 1)])];
        assert_eq!(
            indeterminacy_sums_ml(&m, &l, 1).unwrap_err(),
            Error::NonConstantAtom {
                level: 1,
                degree: 1
            }
        );
    }

    #[test]
    fn zero_b_rejected() {
        let atoms = vec![AtomAB {
            b: Rational::zero(),
            a: Polynomial::one(),
        }];
        let pairs = ab_polynomial_pairs(&atoms);
        assert!(matches!(
            indeterminacy_sums_ab(&atoms, &pairs, 1),
            Err(Error::SingularStep { level: 0 })
        ));
    }

    #[test]
    fn sums_match_independent_single_pass_fold() {
        let s = MomentSequence::from_integers(&[2, 3, 5, 9]);
        let atoms = ab_cascade(&s).unwrap();
        let pairs = ab_polynomial_pairs(&atoms);
        let report = indeterminacy_sums_ab(&atoms, &pairs, 2).unwrap();
        // Independent fold over the raw atoms.
        let mut bp = Rational::one();
        let mut expect_p = Rational::zero();
        let mut expect_q = Rational::zero();
        for (i, atom) in atoms.iter().enumerate() {
            bp *= atom.b.clone();
            let p0 = pairs[i].0.eval_at_zero();
            let q0 = pairs[i].1.eval_at_zero();
            expect_p += &(&p0 * &p0) / &bp;
            expect_q += &(&q0 * &q0) / &bp;
        }
        assert_eq!(report.sum_p, Some(expect_p));
        assert_eq!(report.sum_q, Some(expect_q));
    }
}
