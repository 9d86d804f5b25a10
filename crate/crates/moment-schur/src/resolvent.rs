//! Continued-fraction assembly: Stieltjes polynomials of the first and
//! second kind, resolvent matrices with their M/L/A factorization, and
//! the linear-fractional action on the free tail parameter.
//!
//! Everything is polynomial in the single product variable z; subdiagonal
//! problems carry their monomial prefactor symbolically as a diagonal key
//! and never expand it here.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{Polynomial, TruncatedLaurentSeries};
use crate::error::{Error, Result};
use crate::multidiag::DiagonalKey;
use crate::schur::{MlDecomposition, Parity, TailContract};

/// Alternating (m, l) continued fraction
/// 1/(-z m_1 + 1/(l_1 + 1/(-z m_2 + ... ))).
///
/// An even fraction has as many l atoms as m atoms and ends at l_N + tau;
/// an odd fraction has one fewer l atom and ends at -z m_N + 1/tau.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    m_atoms: Vec<Polynomial>,
    l_atoms: Vec<Polynomial>,
    parity: Parity,
    diagonal_key: Option<DiagonalKey>,
    tail_contract: TailContract,
}

impl ContinuedFraction {
    pub fn even(m_atoms: Vec<Polynomial>, l_atoms: Vec<Polynomial>) -> Result<Self> {
        if m_atoms.len() != l_atoms.len() {
            return Err(Error::MalformedContinuedFraction {
                reason: format!(
                    "even fraction needs equal atom counts, got {} m and {} l",
                    m_atoms.len(),
                    l_atoms.len()
                ),
            });
        }
        Self::validate_atoms(&m_atoms, &l_atoms)?;
        Ok(ContinuedFraction {
            m_atoms,
            l_atoms,
            parity: Parity::Even,
            diagonal_key: None,
            tail_contract: TailContract::SmallTau,
        })
    }

    pub fn odd(m_atoms: Vec<Polynomial>, l_atoms: Vec<Polynomial>) -> Result<Self> {
        if m_atoms.is_empty() || m_atoms.len() != l_atoms.len() + 1 {
            return Err(Error::MalformedContinuedFraction {
                reason: format!(
                    "odd fraction needs one more m than l, got {} m and {} l",
                    m_atoms.len(),
                    l_atoms.len()
                ),
            });
        }
        Self::validate_atoms(&m_atoms, &l_atoms)?;
        Ok(ContinuedFraction {
            m_atoms,
            l_atoms,
            parity: Parity::Odd,
            diagonal_key: None,
            tail_contract: TailContract::ReciprocalBelowZ,
        })
    }

    /// The fraction with no atoms at all; its value is the tail itself.
    pub fn empty() -> Self {
        ContinuedFraction {
            m_atoms: Vec::new(),
            l_atoms: Vec::new(),
            parity: Parity::Even,
            diagonal_key: None,
            tail_contract: TailContract::SmallTau,
        }
    }

    fn validate_atoms(m_atoms: &[Polynomial], l_atoms: &[Polynomial]) -> Result<()> {
        if let Some(i) = m_atoms.iter().position(Polynomial::is_zero) {
            return Err(Error::MalformedContinuedFraction {
                reason: format!("m atom {} is the zero polynomial", i + 1),
            });
        }
        if let Some(i) = l_atoms.iter().position(Polynomial::is_zero) {
            return Err(Error::MalformedContinuedFraction {
                reason: format!("l atom {} is the zero polynomial", i + 1),
            });
        }
        Ok(())
    }

    pub fn from_decomposition(dec: &MlDecomposition) -> Result<Self> {
        let m: Vec<Polynomial> = dec.levels.iter().map(|l| l.m.clone()).collect();
        let l: Vec<Polynomial> = dec.levels.iter().filter_map(|l| l.l.clone()).collect();
        match dec.parity {
            Parity::Even => Self::even(m, l),
            Parity::Odd => Self::odd(m, l),
        }
    }

    pub fn with_diagonal_key(mut self, key: DiagonalKey) -> Self {
        self.diagonal_key = Some(key);
        self
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn levels(&self) -> usize {
        self.m_atoms.len()
    }

    pub fn m_atoms(&self) -> &[Polynomial] {
        &self.m_atoms
    }

    pub fn l_atoms(&self) -> &[Polynomial] {
        &self.l_atoms
    }

    pub fn diagonal_key(&self) -> Option<&DiagonalKey> {
        self.diagonal_key.as_ref()
    }

    pub fn tail_contract(&self) -> TailContract {
        self.tail_contract
    }
}

/// Pair (P_k, Q_k) of Stieltjes polynomials of the first and second kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StieltjesPolynomialPair {
    pub index: i64,
    pub p: Polynomial,
    pub q: Polynomial,
}

/// Solutions of the two-term system
///   y_{2j}   - y_{2j-2} =  l_j y_{2j-1}
///   y_{2j+1} - y_{2j-1} = -m_{j+1} z y_{2j}
/// with P_{-1} = 0, P_0 = 1, Q_{-1} = 1, Q_0 = 0, for k = -1 ..= up_to.
pub fn stieltjes_polynomials(
    cf: &ContinuedFraction,
    up_to: usize,
) -> Result<Vec<StieltjesPolynomialPair>> {
    let max_index = match cf.parity {
        Parity::Even => 2 * cf.levels(),
        Parity::Odd => 2 * cf.levels() - 1,
    };
    if up_to > max_index {
        return Err(Error::LevelOutOfRange {
            index: up_to,
            available: max_index,
        });
    }
    let mut pairs = Vec::with_capacity(up_to + 2);
    pairs.push(StieltjesPolynomialPair {
        index: -1,
        p: Polynomial::zero(),
        q: Polynomial::one(),
    });
    pairs.push(StieltjesPolynomialPair {
        index: 0,
        p: Polynomial::one(),
        q: Polynomial::zero(),
    });
    for k in 1..=up_to {
        let prev = &pairs[k]; // index k-1
        let prev2 = &pairs[k - 1]; // index k-2
        let (p, q) = if k % 2 == 1 {
            // y_{2j+1} = y_{2j-1} - m_{j+1} z y_{2j} with 2j+1 = k.
            let m = &cf.m_atoms[(k - 1) / 2];
            let mz = m.shift_up(1);
            (&prev2.p - &(&mz * &prev.p), &prev2.q - &(&mz * &prev.q))
        } else {
            // y_{2j} = y_{2j-2} + l_j y_{2j-1} with 2j = k.
            let l = &cf.l_atoms[k / 2 - 1];
            (&prev2.p + &(l * &prev.p), &prev2.q + &(l * &prev.q))
        };
        pairs.push(StieltjesPolynomialPair {
            index: k as i64,
            p,
            q,
        });
    }
    Ok(pairs)
}

/// 2x2 polynomial resolvent matrix in the product variable, with an
/// optional diagonal prefactor marker for subdiagonal problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolventMatrix {
    entries: [[Polynomial; 2]; 2],
    parity: Parity,
    levels: usize,
    prefactor: Option<DiagonalKey>,
}

impl ResolventMatrix {
    pub fn identity() -> Self {
        ResolventMatrix {
            entries: [
                [Polynomial::one(), Polynomial::zero()],
                [Polynomial::zero(), Polynomial::one()],
            ],
            parity: Parity::Even,
            levels: 0,
            prefactor: None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Diagonal key whose monomial multiplies the P row, when present.
    pub fn prefactor(&self) -> Option<&DiagonalKey> {
        self.prefactor.as_ref()
    }

    /// Determinant of the polynomial core (the prefactor contributes its
    /// monomial separately and is checked symbolically).
    pub fn core_determinant(&self) -> Polynomial {
        let ad = &self.entries[0][0] * &self.entries[1][1];
        let bc = &self.entries[0][1] * &self.entries[1][0];
        &ad - &bc
    }

    fn matmul(a: &[[Polynomial; 2]; 2], b: &[[Polynomial; 2]; 2]) -> [[Polynomial; 2]; 2] {
        let mut out = [
            [Polynomial::zero(), Polynomial::zero()],
            [Polynomial::zero(), Polynomial::zero()],
        ];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
            }
        }
        out
    }
}

impl Serialize for ResolventMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ResolventMatrix", 6)?;
        s.serialize_field("w11", self.entries[0][0].coefficients())?;
        s.serialize_field("w12", self.entries[0][1].coefficients())?;
        s.serialize_field("w21", self.entries[1][0].coefficients())?;
        s.serialize_field("w22", self.entries[1][1].coefficients())?;
        s.serialize_field(
            "kind",
            match self.parity {
                Parity::Even => "even",
                Parity::Odd => "odd",
            },
        )?;
        let det = self.core_determinant();
        let det_str = if det.degree().is_none() {
            "0".to_string()
        } else {
            format!("{}", det.constant_term())
        };
        s.serialize_field("det", &det_str)?;
        s.end()
    }
}

/// Resolvent matrix from the Stieltjes polynomials: the odd matrix takes
/// columns (2N-1, 2N-2), the even one (2N-1, 2N), rows Q over P.
pub fn resolvent_matrix(cf: &ContinuedFraction) -> Result<ResolventMatrix> {
    if cf.levels() == 0 {
        return Ok(ResolventMatrix::identity());
    }
    let n = cf.levels();
    let (left, right) = match cf.parity {
        Parity::Odd => (2 * n - 1, 2 * n - 2),
        Parity::Even => (2 * n - 1, 2 * n),
    };
    let pairs = stieltjes_polynomials(cf, left.max(right))?;
    let at = |k: usize| &pairs[k + 1]; // pairs[0] has index -1
    let entries = [
        [at(left).q.clone(), at(right).q.clone()],
        [at(left).p.clone(), at(right).p.clone()],
    ];
    Ok(ResolventMatrix {
        entries,
        parity: cf.parity,
        levels: n,
        prefactor: cf.diagonal_key.clone(),
    })
}

fn m_factor(m: &Polynomial) -> [[Polynomial; 2]; 2] {
    [
        [Polynomial::one(), Polynomial::zero()],
        [-&m.shift_up(1), Polynomial::one()],
    ]
}

fn l_factor(l: &Polynomial) -> [[Polynomial; 2]; 2] {
    [
        [Polynomial::one(), l.clone()],
        [Polynomial::zero(), Polynomial::one()],
    ]
}

/// Ordered product of the elementary factors: even M_1 L_1 ... M_N L_N,
/// odd M_1 L_1 ... L_{N-1} M_N. The A prefactor stays symbolic.
pub fn elementary_product(cf: &ContinuedFraction) -> ResolventMatrix {
    let mut acc = ResolventMatrix::identity().entries;
    for j in 0..cf.levels() {
        acc = ResolventMatrix::matmul(&acc, &m_factor(&cf.m_atoms[j]));
        if j < cf.l_atoms.len() {
            acc = ResolventMatrix::matmul(&acc, &l_factor(&cf.l_atoms[j]));
        }
    }
    ResolventMatrix {
        entries: acc,
        parity: cf.parity,
        levels: cf.levels(),
        prefactor: cf.diagonal_key.clone(),
    }
}

/// Outcome of comparing a resolvent matrix against the elementary M/L
/// product of a fraction's atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationCheck {
    pub holds: bool,
    /// First level whose factors already fail to divide the matrix.
    pub witness: Option<usize>,
}

/// Checks W = M_1 L_1 ... (parity pattern) for a given matrix.
///
/// When the product mismatches, the atoms actually encoded in `w` are
/// recovered level by level (the polynomial part of the appropriate
/// column ratio yields each factor) and the witness is the first level
/// where a claimed atom differs from the recovered one.
pub fn factorization_check_against(
    w: &ResolventMatrix,
    cf: &ContinuedFraction,
) -> FactorizationCheck {
    if w.prefactor.as_ref() != cf.diagonal_key.as_ref() {
        return FactorizationCheck {
            holds: false,
            witness: None,
        };
    }
    if w.entries == elementary_product(cf).entries {
        return FactorizationCheck {
            holds: true,
            witness: None,
        };
    }
    let witness = locate_mismatch(w, cf);
    FactorizationCheck {
        holds: false,
        witness,
    }
}

/// Factorization self-check: the resolvent assembled from the Stieltjes
/// recurrences must equal the ordered product of elementary factors built
/// from the same atoms. The two routes are computed independently.
pub fn resolvent_factorization_check(cf: &ContinuedFraction) -> Result<FactorizationCheck> {
    let w = resolvent_matrix(cf)?;
    Ok(factorization_check_against(&w, cf))
}

/// First level at which the claimed atoms diverge from the atoms encoded
/// in the matrix. Peels recovered factors so later levels stay readable.
fn locate_mismatch(w: &ResolventMatrix, cf: &ContinuedFraction) -> Option<usize> {
    let col = match w.parity {
        Parity::Even => 1,
        Parity::Odd => 0,
    };
    let mut rest = w.entries.clone();
    for j in 0..cf.levels() {
        // 1/F = -z m + (const + proper): recover m from the polynomial
        // quotient of the column ratio flipped upside down.
        let (quot, _) = match rest[1][col].div_rem(&rest[0][col]) {
            Some(qr) => qr,
            None => return Some(j + 1),
        };
        let constant = quot.constant_term();
        let m = match (-&(&quot - &Polynomial::constant(constant))).shift_down() {
            Some(m) if !m.is_zero() => m,
            _ => return Some(j + 1),
        };
        if m != cf.m_atoms[j] {
            return Some(j + 1);
        }
        rest = ResolventMatrix::matmul(&unimodular_inverse(&m_factor(&m)), &rest);
        if j < cf.l_atoms.len() {
            // F = l + proper: the l atom is the polynomial part of the
            // column ratio itself.
            let (l, _) = match rest[0][col].div_rem(&rest[1][col]) {
                Some(qr) => qr,
                None => return Some(j + 1),
            };
            if l != cf.l_atoms[j] {
                return Some(j + 1);
            }
            rest = ResolventMatrix::matmul(&unimodular_inverse(&l_factor(&l)), &rest);
        }
    }
    Some(cf.levels())
}

/// Adjugate inverse of a determinant-one 2x2 polynomial matrix.
fn unimodular_inverse(m: &[[Polynomial; 2]; 2]) -> [[Polynomial; 2]; 2] {
    [[m[1][1].clone(), -&m[0][1]], [-&m[1][0], m[0][0].clone()]]
}

/// Value substituted for the free tail parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// The distinguished truncation tail: tau = 0 for even fractions,
    /// 1/tau = 0 for odd ones.
    Zero,
    Series(TruncatedLaurentSeries),
}

/// Linear-fractional action (w11 tau + w12)/(w21 tau + w22) expanded as a
/// series in 1/z to (at most) the requested tail depth.
///
/// For `Tail::Zero` the action degenerates to the ratio of one column:
/// the right column for even matrices (tau = 0), the left column for odd
/// ones (the 1/tau = 0 limit).
pub fn moebius_apply(
    w: &ResolventMatrix,
    tail: &Tail,
    order: usize,
) -> Result<TruncatedLaurentSeries> {
    let (num, den) = match tail {
        Tail::Zero => match w.parity {
            Parity::Even => (
                TruncatedLaurentSeries::from_polynomial(w.entries[0][1].clone()),
                TruncatedLaurentSeries::from_polynomial(w.entries[1][1].clone()),
            ),
            Parity::Odd => (
                TruncatedLaurentSeries::from_polynomial(w.entries[0][0].clone()),
                TruncatedLaurentSeries::from_polynomial(w.entries[1][0].clone()),
            ),
        },
        Tail::Series(tau) => {
            let w11 = TruncatedLaurentSeries::from_polynomial(w.entries[0][0].clone());
            let w12 = TruncatedLaurentSeries::from_polynomial(w.entries[0][1].clone());
            let w21 = TruncatedLaurentSeries::from_polynomial(w.entries[1][0].clone());
            let w22 = TruncatedLaurentSeries::from_polynomial(w.entries[1][1].clone());
            let num = w11.mul(tau)?.add(&w12);
            let den = w21.mul(tau)?.add(&w22);
            (num, den)
        }
    };
    num.div_to(&den, order)
}

/// Expands the nested fraction bottom-up. Equals
/// `moebius_apply(resolvent_matrix(cf), tail, order)` to the shared
/// trusted order; the two routes are kept separate so they can check each
/// other.
pub fn cf_expand(
    cf: &ContinuedFraction,
    tail: &Tail,
    order: usize,
) -> Result<TruncatedLaurentSeries> {
    if order == 0 {
        return Err(Error::MalformedContinuedFraction {
            reason: "expansion order must be at least 1".to_string(),
        });
    }
    validate_tail(cf, tail)?;
    let n = cf.levels();
    if n == 0 {
        return Ok(match tail {
            Tail::Zero => TruncatedLaurentSeries::exact_zero(),
            Tail::Series(t) => t.truncated(order),
        });
    }

    // Innermost value of the nest.
    let mut current = match (cf.parity, tail) {
        (Parity::Even, Tail::Zero) => {
            TruncatedLaurentSeries::from_polynomial(cf.l_atoms[n - 1].clone())
        }
        (Parity::Even, Tail::Series(tau)) => tau.add_polynomial(&cf.l_atoms[n - 1]),
        (Parity::Odd, Tail::Zero) => {
            TruncatedLaurentSeries::from_polynomial(-&cf.m_atoms[n - 1].shift_up(1))
        }
        (Parity::Odd, Tail::Series(tau)) => {
            let inv_tau = recip_at(tau, order, n)?;
            inv_tau.add_polynomial(&(-&cf.m_atoms[n - 1].shift_up(1)))
        }
    };
    // For even parity the innermost m level still has to be applied; for
    // odd parity it already was.
    let mut next_l = match cf.parity {
        Parity::Even => {
            current =
                recip_at(&current, order, n)?.add_polynomial(&(-&cf.m_atoms[n - 1].shift_up(1)));
            n - 1
        }
        Parity::Odd => n - 1,
    };
    // Remaining levels outward: ... l_j + 1/( -z m_j+1 + ... ).
    while next_l > 0 {
        let j = next_l - 1;
        current = recip_at(&current, order, j + 1)?.add_polynomial(&cf.l_atoms[j]);
        current = recip_at(&current, order, j + 1)?.add_polynomial(&(-&cf.m_atoms[j].shift_up(1)));
        next_l -= 1;
    }
    recip_at(&current, order, 0)
}

fn recip_at(
    s: &TruncatedLaurentSeries,
    order: usize,
    depth: usize,
) -> Result<TruncatedLaurentSeries> {
    TruncatedLaurentSeries::from_polynomial(Polynomial::one())
        .div_to(s, order)
        .map_err(|e| match e {
            Error::DivisionByZeroSeries { .. } => Error::ExpansionBlowUp { depth },
            other => other,
        })
}

fn validate_tail(cf: &ContinuedFraction, tail: &Tail) -> Result<()> {
    let tau = match tail {
        Tail::Zero => return Ok(()),
        Tail::Series(t) => t,
    };
    match cf.tail_contract {
        TailContract::SmallTau => {
            if !tau.polynomial_part().is_zero() {
                return Err(Error::MalformedContinuedFraction {
                    reason: "tail contract o(1) requires a series with only negative powers"
                        .to_string(),
                });
            }
        }
        TailContract::ReciprocalBelowZ => {
            // 1/tau = o(z) needs 1/tau with no power of z above z^0, i.e.
            // the leading exponent of tau must be at least 0.
            match tau.leading_exponent() {
                Some(e) if e >= 0 => {}
                Some(_) => {
                    return Err(Error::MalformedContinuedFraction {
                        reason: "odd tail contract 1/tau = o(z) needs a tail with a \
                                 nonvanishing polynomial part"
                            .to_string(),
                    })
                }
                None => {
                    return Err(Error::MalformedContinuedFraction {
                        reason: "odd tail must be invertible".to_string(),
                    })
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::algebra::Rational;
    use crate::hankel::MomentSequence;
    use crate::schur::schur_decompose_ml;

    fn poly(cs: &[i64]) -> Polynomial {
        Polynomial::new(cs.iter().map(|&c| Rational::from_integer(c)).collect())
    }

    fn delta1_cf() -> ContinuedFraction {
        ContinuedFraction::even(vec![poly(&[1])], vec![poly(&[1])]).unwrap()
    }

    #[test]
    fn stieltjes_initial_conditions_and_first_pairs() {
        let cf = delta1_cf();
        let pairs = stieltjes_polynomials(&cf, 2).unwrap();
        assert_eq!(pairs[0].p, Polynomial::zero());
        assert_eq!(pairs[0].q, Polynomial::one());
        assert_eq!(pairs[1].p, Polynomial::one());
        assert_eq!(pairs[1].q, Polynomial::zero());
        // P_1 = -z, Q_1 = 1.
        assert_eq!(pairs[2].p, poly(&[0, -1]));
        assert_eq!(pairs[2].q, poly(&[1]));
        // P_2 = 1 - z, Q_2 = 1.
        assert_eq!(pairs[3].p, poly(&[1, -1]));
        assert_eq!(pairs[3].q, poly(&[1]));
    }

    #[test]
    fn stieltjes_pairs_satisfy_the_two_term_system() {
        let s = MomentSequence::from_integers(&[2, 3, 5, 9]);
        let dec = schur_decompose_ml(&s, Parity::Even).unwrap();
        let cf = ContinuedFraction::from_decomposition(&dec).unwrap();
        let pairs = stieltjes_polynomials(&cf, 4).unwrap();
        let at = |k: i64| &pairs[(k + 1) as usize];
        // Re-evaluate both defining relations from the stored pairs.
        for j in 1..=2i64 {
            let l = &cf.l_atoms()[(j - 1) as usize];
            let lhs_p = &at(2 * j).p - &at(2 * j - 2).p;
            assert_eq!(lhs_p, l * &at(2 * j - 1).p, "P relation at 2j={}", 2 * j);
            let lhs_q = &at(2 * j).q - &at(2 * j - 2).q;
            assert_eq!(lhs_q, l * &at(2 * j - 1).q, "Q relation at 2j={}", 2 * j);
        }
        for j in 0..=1i64 {
            let mz = cf.m_atoms()[j as usize].shift_up(1);
            let lhs_p = &at(2 * j + 1).p - &at(2 * j - 1).p;
            assert_eq!(
                lhs_p,
                -&(&mz * &at(2 * j).p),
                "P relation at 2j+1={}",
                2 * j + 1
            );
            let lhs_q = &at(2 * j + 1).q - &at(2 * j - 1).q;
            assert_eq!(
                lhs_q,
                -&(&mz * &at(2 * j).q),
                "Q relation at 2j+1={}",
                2 * j + 1
            );
        }
    }

    #[test]
    fn stieltjes_rejects_indices_beyond_atoms() {
        assert!(matches!(
            stieltjes_polynomials(&delta1_cf(), 3),
            Err(Error::LevelOutOfRange {
                index: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn delta1_resolvent_matrix() {
        let w = resolvent_matrix(&delta1_cf()).unwrap();
        assert_eq!(w.entry(0, 0), &poly(&[1]));
        assert_eq!(w.entry(0, 1), &poly(&[1]));
        assert_eq!(w.entry(1, 0), &poly(&[0, -1]));
        assert_eq!(w.entry(1, 1), &poly(&[1, -1]));
        assert_eq!(w.core_determinant(), Polynomial::one());
    }

    #[test]
    fn empty_fraction_gives_identity() {
        let w = resolvent_matrix(&ContinuedFraction::empty()).unwrap();
        assert_eq!(w, ResolventMatrix::identity());
    }

    #[test]
    fn factorization_holds_for_own_atoms() {
        assert!(resolvent_factorization_check(&delta1_cf()).unwrap().holds);

        // Single odd factor: W = M_1.
        let cf = ContinuedFraction::odd(vec![poly(&[2])], vec![]).unwrap();
        let w = resolvent_matrix(&cf).unwrap();
        assert_eq!(w.entry(1, 0), &poly(&[0, -2]));
        assert!(resolvent_factorization_check(&cf).unwrap().holds);
    }

    #[test]
    fn factorization_mismatch_names_perturbed_level() {
        let w = resolvent_matrix(&delta1_cf()).unwrap();
        let perturbed = ContinuedFraction::even(vec![poly(&[1])], vec![poly(&[2])]).unwrap();
        let check = factorization_check_against(&w, &perturbed);
        assert!(!check.holds);
        assert_eq!(check.witness, Some(1));

        // Two-level fraction with the second m perturbed.
        let good =
            ContinuedFraction::even(vec![poly(&[1]), poly(&[3])], vec![poly(&[1]), poly(&[2])])
                .unwrap();
        let w = resolvent_matrix(&good).unwrap();
        let bad =
            ContinuedFraction::even(vec![poly(&[1]), poly(&[4])], vec![poly(&[1]), poly(&[2])])
                .unwrap();
        let check = factorization_check_against(&w, &bad);
        assert!(!check.holds);
        assert_eq!(check.witness, Some(2));
    }

    #[test]
    fn moebius_delta1_with_zero_tail() {
        let w = resolvent_matrix(&delta1_cf()).unwrap();
        let f = moebius_apply(&w, &Tail::Zero, 4).unwrap();
        // Q_2/P_2 = 1/(1-z) = -1/z - 1/z^2 - ...
        assert!(f.polynomial_part().is_zero());
        assert_eq!(f.tail(), &[rat(-1, 1), rat(-1, 1), rat(-1, 1), rat(-1, 1)]);
    }

    #[test]
    fn moebius_identity_action() {
        let w = ResolventMatrix::identity();
        let tau = TruncatedLaurentSeries::from_moments(&[rat(5, 2), rat(-1, 3)]).unwrap();
        let out = moebius_apply(&w, &Tail::Series(tau.clone()), 2).unwrap();
        assert_eq!(out.tail(), tau.tail());
    }

    #[test]
    fn expand_delta1() {
        let f = cf_expand(&delta1_cf(), &Tail::Zero, 4).unwrap();
        assert_eq!(f.tail(), &[rat(-1, 1), rat(-1, 1), rat(-1, 1), rat(-1, 1)]);
    }

    #[test]
    fn expand_two_atom_even() {
        let s = MomentSequence::from_integers(&[2, 3, 5, 9]);
        let dec = schur_decompose_ml(&s, Parity::Even).unwrap();
        let cf = ContinuedFraction::from_decomposition(&dec).unwrap();
        let f = cf_expand(&cf, &Tail::Zero, 4).unwrap();
        assert_eq!(f.tail(), &[rat(-2, 1), rat(-3, 1), rat(-5, 1), rat(-9, 1)]);
    }

    #[test]
    fn expand_two_atom_odd_pattern() {
        let s = MomentSequence::from_integers(&[2, 3, 5]);
        let dec = schur_decompose_ml(&s, Parity::Odd).unwrap();
        let cf = ContinuedFraction::from_decomposition(&dec).unwrap();
        let f = cf_expand(&cf, &Tail::Zero, 3).unwrap();
        assert_eq!(f.tail(), &[rat(-2, 1), rat(-3, 1), rat(-5, 1)]);
    }

    #[test]
    fn odd_expansion_with_explicit_tail() {
        let s = MomentSequence::from_integers(&[2, 3, 5]);
        let dec = schur_decompose_ml(&s, Parity::Odd).unwrap();
        let cf = ContinuedFraction::from_decomposition(&dec).unwrap();
        // tau = 1 exactly: 1/tau = 1 meets the o(z) contract, and the
        // expansion must still interpolate all three moments.
        let tau = TruncatedLaurentSeries::from_polynomial(Polynomial::one());
        let f = cf_expand(&cf, &Tail::Series(tau.clone()), 3).unwrap();
        assert_eq!(&f.tail()[..3], &[rat(-2, 1), rat(-3, 1), rat(-5, 1)]);

        // The resolvent route with the same tail agrees.
        let w = resolvent_matrix(&cf).unwrap();
        let g = moebius_apply(&w, &Tail::Series(tau), 3).unwrap();
        assert_eq!(f.polynomial_part(), g.polynomial_part());
        for e in 1..=3i64 {
            assert_eq!(f.coefficient(-e), g.coefficient(-e), "z^-{}", e);
        }

        // A proper tail makes 1/tau grow like z: contract violated.
        let bad = TruncatedLaurentSeries::exact(Polynomial::zero(), vec![rat(1, 1)]);
        assert!(matches!(
            cf_expand(&cf, &Tail::Series(bad), 3),
            Err(Error::MalformedContinuedFraction { .. })
        ));
    }

    #[test]
    fn expand_empty_fraction_returns_tail() {
        let tau = TruncatedLaurentSeries::from_moments(&[rat(1, 1), rat(2, 1)]).unwrap();
        let out = cf_expand(&ContinuedFraction::empty(), &Tail::Series(tau.clone()), 2).unwrap();
        assert_eq!(out, tau);
    }

    #[test]
    fn expand_matches_moebius() {
        let s = MomentSequence::from_integers(&[2, 3, 5, 9]);
        let dec = schur_decompose_ml(&s, Parity::Even).unwrap();
        let cf = ContinuedFraction::from_decomposition(&dec).unwrap();
        let w = resolvent_matrix(&cf).unwrap();
        let via_moebius = moebius_apply(&w, &Tail::Zero, 4).unwrap();
        let via_expand = cf_expand(&cf, &Tail::Zero, 4).unwrap();
        assert_eq!(via_moebius.tail(), via_expand.tail());
    }

    #[test]
    fn tail_beyond_guarantee_does_not_change_interpolated_coefficients() {
        let s = MomentSequence::from_integers(&[2, 3, 5, 9]);
        let dec = schur_decompose_ml(&s, Parity::Even).unwrap();
        let cf = ContinuedFraction::from_decomposition(&dec).unwrap();
        let w = resolvent_matrix(&cf).unwrap();
        // Two distinct exact tails meeting the o(1) contract.
        let tau1 = TruncatedLaurentSeries::exact(Polynomial::zero(), vec![rat(-5, 1)]);
        let tau2 = TruncatedLaurentSeries::exact(Polynomial::zero(), vec![rat(1, 1), rat(3, 1)]);
        let with_tau1 = moebius_apply(&w, &Tail::Series(tau1), 4).unwrap();
        let with_tau2 = moebius_apply(&w, &Tail::Series(tau2), 4).unwrap();
        let with_zero = moebius_apply(&w, &Tail::Zero, 4).unwrap();
        for e in 1..=4i64 {
            assert_eq!(
                with_tau1.coefficient(-e),
                with_zero.coefficient(-e),
                "tau1 coefficient of z^-{}",
                e
            );
            assert_eq!(
                with_tau2.coefficient(-e),
                with_zero.coefficient(-e),
                "tau2 coefficient of z^-{}",
                e
            );
        }
    }
}
