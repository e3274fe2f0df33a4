//! Reference evaluators: majority-voting grading and the agreement-equation
//! independent solution.
//!
//! The agreement-equation solver is implemented faithfully, flaw included,
//! because its unresolved square root on independently-generated data is a
//! useful diagnostic: the pair error rate of independent classifiers is
//! `prva (1-psa_i)(1-psa_j) + prvb (1-psb_i)(1-psb_j)`, which does not
//! factor into the product of the individual error rates, so the `c` factor
//! generally comes out irrational on exactly the data the method assumes.
//!
//! Note the agreement identity is `a_ij = 1 - e_i - e_j + 2 e_ij`; it
//! follows from completeness of the four pair postulates.

use serde::Serialize;
use thiserror::Error;

use crate::exact::{sqrt_exact, AlgebraicValue, NumberClass, Rational};
use crate::pair::{PairCorrelation, PairGroundTruth};
use crate::sketch::{Label, LabelStream};
use thiserror::Error as _;

/// Grades of the three classifiers against the majority-vote answer key.
#[derive(Debug, Clone, Serialize)]
pub struct MvReport {
    /// Items the majority labelled `a`.
    pub qa_mv: u64,
    /// Per-classifier correct counts against the key: `(raa, rbb)`.
    pub correct: [(u64, u64); 3],
    /// Per-classifier accuracies vs the key; `None` on an empty side.
    pub psa: [Option<Rational>; 3],
    pub psb: [Option<Rational>; 3],
    /// Pair error correlations vs the key, order (1,2), (1,3), (2,3).
    pub gamma: [PairCorrelation; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("majority voting needs exactly 3 classifiers, stream has {0}")]
    NotATrio(usize),
    #[error("agreement rate a_{i}{j} = 1/2 makes the solution degenerate")]
    DegenerateAgreement { i: usize, j: usize },
}

/// Grades a trio stream against its own majority vote.
pub fn mv_grade(stream: &LabelStream) -> Result<MvReport, BaselineError> {
    if stream.n() != 3 {
        return Err(BaselineError::NotATrio(stream.n()));
    }
    let q = stream.len() as u64;
    let mut qa_mv = 0u64;
    let mut raa = [0u64; 3];
    let mut rbb = [0u64; 3];
    let mut raaa = [0u64; 3];
    let mut rbbb = [0u64; 3];
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    for row in stream.rows() {
        let a_votes = row.votes.iter().filter(|&&v| v == Label::A).count();
        let key = if a_votes >= 2 { Label::A } else { Label::B };
        let correct: Vec<bool> = row.votes.iter().map(|&v| v == key).collect();
        match key {
            Label::A => {
                qa_mv += 1;
                for i in 0..3 {
                    raa[i] += u64::from(correct[i]);
                }
                for (slot, (i, j)) in pairs.iter().enumerate() {
                    raaa[slot] += u64::from(correct[*i] && correct[*j]);
                }
            }
            Label::B => {
                for i in 0..3 {
                    rbb[i] += u64::from(correct[i]);
                }
                for (slot, (i, j)) in pairs.iter().enumerate() {
                    rbbb[slot] += u64::from(correct[*i] && correct[*j]);
                }
            }
        }
    }
    let qb_mv = q - qa_mv;
    let gamma = std::array::from_fn(|slot| {
        let (i, j) = pairs[slot];
        let gt = PairGroundTruth {
            q,
            qa: qa_mv,
            raa: [raa[i], raa[j]],
            rbb: [rbb[i], rbb[j]],
            raaa: raaa[slot],
            rbbb: rbbb[slot],
        };
        gt.correlation()
    });
    Ok(MvReport {
        qa_mv,
        correct: std::array::from_fn(|i| (raa[i], rbb[i])),
        psa: std::array::from_fn(|i| (qa_mv > 0).then(|| Rational::new(raa[i], qa_mv))),
        psb: std::array::from_fn(|i| (qb_mv > 0).then(|| Rational::new(rbb[i], qb_mv))),
        gamma,
    })
}

/// The agreement-equation independent solution for three classifiers.
#[derive(Debug, Clone, Serialize)]
pub struct PlataniosReport {
    /// `c = sqrt((1-a12)(1-a13)(1-a23))`, whose classification is the
    /// method's own diagnostic.
    pub c: AlgebraicValue,
    pub c_squared: Rational,
    pub resolution: NumberClass,
    /// Error rates `e_i = 1/2 +- c / (2 (1 - 2 a_jk))`, both sign branches
    /// per classifier.
    pub error_rates: [[AlgebraicValue; 2]; 3],
}

/// Solves the agreement equations from the three pair agreement rates
/// (a12, a13, a23).
pub fn platanios_solve(
    a12: &Rational,
    a13: &Rational,
    a23: &Rational,
) -> Result<PlataniosReport, BaselineError> {
    let one = Rational::one();
    let half = Rational::ratio(1, 2);
    let rates = [a12, a13, a23];
    // e_i uses the agreement of the other two classifiers
    let opposite = [a23, a13, a12];
    for (slot, a) in opposite.iter().enumerate() {
        if **a == half {
            let (i, j) = match slot {
                0 => (2, 3),
                1 => (1, 3),
                _ => (1, 2),
            };
            return Err(BaselineError::DegenerateAgreement { i, j });
        }
    }
    let c_squared = rates
        .iter()
        .map(|a| &one - *a)
        .fold(Rational::one(), |acc, f| acc * f);
    let c = sqrt_exact(&c_squared);
    let error_rates = std::array::from_fn(|i| {
        let denom = Rational::int(2) * (&one - Rational::int(2) * opposite[i]);
        let offset = c
            .checked_div(&AlgebraicValue::from_rational(denom))
            .expect("screened nonzero");
        [
            AlgebraicValue::from_rational(half.clone())
                .checked_add(&offset)
                .expect("same extension"),
            AlgebraicValue::from_rational(half.clone())
                .checked_sub(&offset)
                .expect("same extension"),
        ]
    });
    Ok(PlataniosReport {
        resolution: c.classification(),
        c,
        c_squared,
        error_rates,
    })
}

/// Single-classifier error rate `prva (1 - psa) + prvb (1 - psb)`.
pub fn single_error_rate(prevalence: &Rational, psa: &Rational, psb: &Rational) -> Rational {
    let one = Rational::one();
    prevalence * (&one - psa) + (&one - prevalence) * (&one - psb)
}

/// Pair error rate of error-independent classifiers:
/// `prva (1-psa_i)(1-psa_j) + prvb (1-psb_i)(1-psb_j)`.
pub fn pair_error_rate(
    prevalence: &Rational,
    i: (&Rational, &Rational),
    j: (&Rational, &Rational),
) -> Rational {
    let one = Rational::one();
    let (psa_i, psb_i) = i;
    let (psa_j, psb_j) = j;
    prevalence * (&one - psa_i) * (&one - psa_j)
        + (&one - prevalence) * (&one - psb_i) * (&one - psb_j)
}
