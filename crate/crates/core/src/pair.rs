//! Complete postulates for pairs of possibly error-correlated classifiers,
//! and the solver for the error correlations consistent with observations
//! given the two individual evaluations.
//!
//! The per-label error correlations are
//! `gamma_a = Raaa/Qa - (Raa_i/Qa)(Raa_j/Qa)` and the analogue on `b`
//! questions. Given the individual evaluations, the disentangled basis
//! reduces to a single linear relation
//! `prva*gamma_a + prvb*gamma_b = delta - (psa_i - fa_i)(psb_j - fb_j)`,
//! so the solution set is a line segment once intersected with the count
//! bounds, not the single point the uniqueness claim would suggest: elements
//! five and six of the basis are the products of element four with the
//! Youden indices of the two classifiers, so the system has rank one. The
//! segment is discretized by integer realizability of the joint counts; the
//! exhaustive oracle in the tests confirms that several distinct integer
//! correlations can explain the same observations.

use serde::Serialize;
use thiserror::Error;

use crate::exact::Rational;
use crate::single::SingleEvaluation;
use crate::sketch::PairSketch;

/// Per-label error correlations of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCorrelation {
    pub gamma_a: Rational,
    pub gamma_b: Rational,
}

/// Fully specified joint grade of two classifiers on one test: individual
/// correct counts plus the joint correct counts per question type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairGroundTruth {
    pub q: u64,
    pub qa: u64,
    /// Correct answers on `a` questions, per classifier.
    pub raa: [u64; 2],
    /// Correct answers on `b` questions, per classifier.
    pub rbb: [u64; 2],
    /// Questions of type `a` both classifiers answered correctly.
    pub raaa: u64,
    /// Questions of type `b` both classifiers answered correctly.
    pub rbbb: u64,
}

impl PairGroundTruth {
    pub fn qb(&self) -> u64 {
        self.q - self.qa
    }

    /// Count-range (Frechet) feasibility of the joint counts.
    pub fn is_valid(&self) -> bool {
        let qb = self.q.checked_sub(self.qa);
        let Some(qb) = qb else { return false };
        if self.raa.iter().any(|&r| r > self.qa) || self.rbb.iter().any(|&r| r > qb) {
            return false;
        }
        let a_lo = (self.raa[0] + self.raa[1]).saturating_sub(self.qa);
        let a_hi = self.raa[0].min(self.raa[1]);
        let b_lo = (self.rbb[0] + self.rbb[1]).saturating_sub(qb);
        let b_hi = self.rbb[0].min(self.rbb[1]);
        (a_lo..=a_hi).contains(&self.raaa) && (b_lo..=b_hi).contains(&self.rbbb)
    }

    pub fn individual(&self, side: usize) -> SingleEvaluation {
        SingleEvaluation::new(self.q, self.qa, self.raa[side], self.rbb[side])
    }

    /// `gamma_a`, zero by convention when the test has no `a` questions.
    pub fn gamma_a(&self) -> Rational {
        if self.qa == 0 {
            return Rational::zero();
        }
        Rational::new(self.raaa, self.qa)
            - Rational::new(self.raa[0], self.qa) * Rational::new(self.raa[1], self.qa)
    }

    pub fn gamma_b(&self) -> Rational {
        let qb = self.qb();
        if qb == 0 {
            return Rational::zero();
        }
        Rational::new(self.rbbb, qb)
            - Rational::new(self.rbb[0], qb) * Rational::new(self.rbb[1], qb)
    }

    pub fn correlation(&self) -> PairCorrelation {
        PairCorrelation {
            gamma_a: self.gamma_a(),
            gamma_b: self.gamma_b(),
        }
    }

    /// The vote-pattern counts this ground truth produces: a correct answer
    /// votes the question's own label, a wrong one votes the other.
    pub fn vote_pattern_counts(&self) -> [u64; 4] {
        let qb = self.qb();
        // on a questions, correct -> vote a; sums ordered so the count-range
        // bounds keep every intermediate nonnegative
        let aa = self.raaa;
        let ab = self.raa[0] - self.raaa;
        let ba = self.raa[1] - self.raaa;
        let bb = (self.qa + self.raaa) - self.raa[0] - self.raa[1];
        // on b questions, correct -> vote b
        let kbb = self.rbbb;
        let kba = self.rbb[0] - self.rbbb;
        let kab = self.rbb[1] - self.rbbb;
        let kaa = (qb + self.rbbb) - self.rbb[0] - self.rbb[1];
        [aa + kaa, ab + kab, ba + kba, bb + kbb]
    }

    pub fn sketch(&self) -> PairSketch {
        PairSketch::from_counts(self.vote_pattern_counts())
    }
}

/// Evaluates the four pair postulates: the aligned-vote frequencies implied
/// by prevalence, individual accuracies and the error correlations. For a
/// degenerate question type the accuracy factors are moot (weight zero), so
/// the output is still exact.
pub fn pair_frequencies(gt: &PairGroundTruth) -> [Rational; 4] {
    let q = Rational::from(gt.q);
    let prva = Rational::new(gt.qa, 1) / &q;
    let prvb = Rational::one() - &prva;
    let acc = |r: u64, total: u64| {
        if total == 0 {
            Rational::zero()
        } else {
            Rational::new(r, total)
        }
    };
    let pi = acc(gt.raa[0], gt.qa);
    let pj = acc(gt.raa[1], gt.qa);
    let qi = acc(gt.rbb[0], gt.qb());
    let qj = acc(gt.rbb[1], gt.qb());
    let ga = gt.gamma_a();
    let gb = gt.gamma_b();
    let one = Rational::one();
    let faa = &prva * (&pi * &pj + &ga) + &prvb * ((&one - &qi) * (&one - &qj) + &gb);
    let fab = &prva * (&pi * (&one - &pj) - &ga) + &prvb * ((&one - &qi) * &qj - &gb);
    let fba = &prva * ((&one - &pi) * &pj - &ga) + &prvb * (&qi * (&one - &qj) - &gb);
    let fbb = &prva * ((&one - &pi) * (&one - &pj) + &ga) + &prvb * (&qi * &qj + &gb);
    [faa, fab, fba, fbb]
}

/// A candidate full pair evaluation: prevalence, individual accuracies, and
/// the error correlations.
#[derive(Debug, Clone)]
pub struct PairCandidate {
    pub prevalence: Rational,
    pub psa: [Rational; 2],
    pub psb: [Rational; 2],
    pub correlation: PairCorrelation,
}

impl PairCandidate {
    pub fn from_ground_truth(gt: &PairGroundTruth) -> Option<Self> {
        if gt.qa == 0 || gt.qb() == 0 {
            return None;
        }
        Some(PairCandidate {
            prevalence: Rational::new(gt.qa, gt.q),
            psa: [
                Rational::new(gt.raa[0], gt.qa),
                Rational::new(gt.raa[1], gt.qa),
            ],
            psb: [
                Rational::new(gt.rbb[0], gt.qb()),
                Rational::new(gt.rbb[1], gt.qb()),
            ],
            correlation: gt.correlation(),
        })
    }
}

/// The six disentangled basis polynomials, evaluated at a candidate against
/// observed frequencies. All six vanish exactly when the candidate lies on
/// the solution variety of the pair postulates.
pub fn gb_residuals(candidate: &PairCandidate, observed: &PairSketch) -> [Rational; 6] {
    let prva = &candidate.prevalence;
    let prvb = Rational::one() - prva;
    let fa_i = observed.fa(0);
    let fb_i = observed.fb(0);
    let fa_j = observed.fa(1);
    let fb_j = observed.fb(1);
    let delta = observed.delta();
    let ai = &candidate.psa[0] - &fa_i;
    let bi = &candidate.psb[0] - &fb_i;
    let aj = &candidate.psa[1] - &fa_j;
    let bj = &candidate.psb[1] - &fb_j;
    let da = &candidate.correlation.gamma_a - &delta;
    let db = &candidate.correlation.gamma_b - &delta;

    let g1 = prva * &ai - &prvb * &bi;
    let g2 = prva * &aj - &prvb * &bj;
    let g3 = &ai * &bj - &bi * &aj;
    let g4 = &ai * &bj + prva * &da + &prvb * &db;
    let g5 = &ai * &bj * (&ai + &bi) + &bi * &da + &ai * &db;
    let g6 = &ai * &bj * (&aj + &bj) + &bj * &da + &aj * &db;
    [g1, g2, g3, g4, g5, g6]
}

/// Why a correlation solve can fail.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairError {
    #[error("individual evaluations disagree on Qa or Q")]
    MismatchedIndividuals,
    #[error(
        "logically inconsistent individuals: classifier {side} implies {implied} a-votes, observed {observed}"
    )]
    InconsistentVotes { side: usize, implied: u64, observed: u64 },
    #[error("logically inconsistent individuals: no correlation within count bounds")]
    NoSolution,
}

/// The error correlations logically consistent with a pair of individual
/// evaluations and the observed pair sketch.
#[derive(Debug, Clone, Serialize)]
pub struct GammaSolution {
    /// Endpoints of the consistent segment in the `(gamma_a, gamma_b)`
    /// plane; equal when the solution is a single point.
    pub segment: (PairCorrelation, PairCorrelation),
    /// Points on the segment whose implied joint counts are integers in
    /// range.
    pub realizable: RealizableSet,
    /// Deterministic representative: the segment point of minimum norm.
    pub representative: PairCorrelation,
    /// Residuals of the six basis polynomials at the representative.
    pub residuals: [Rational; 6],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizablePoint {
    pub correlation: PairCorrelation,
    pub raaa: u64,
    pub rbbb: u64,
}

/// The integer-realizable subset of a correlation segment.
///
/// Every vote-pattern count depends on the joint counts only through
/// `raaa + rbbb`, so the line pins that sum and the realizable points form a
/// contiguous `raaa` interval. Holding the interval instead of materialized
/// points keeps million-question solves cheap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizableSet {
    q: u64,
    qa: u64,
    raa: [u64; 2],
    rbb: [u64; 2],
    /// `raaa + rbbb`, `None` when no integer point exists on the segment.
    pub joint_sum: Option<u64>,
    pub raaa_min: u64,
    pub raaa_max: u64,
}

impl RealizableSet {
    fn empty(q: u64, qa: u64, raa: [u64; 2], rbb: [u64; 2]) -> Self {
        RealizableSet {
            q,
            qa,
            raa,
            rbb,
            joint_sum: None,
            raaa_min: 1,
            raaa_max: 0,
        }
    }

    pub fn len(&self) -> u64 {
        match self.joint_sum {
            Some(_) => self.raaa_max + 1 - self.raaa_min,
            None => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.joint_sum.is_none()
    }

    pub fn contains_counts(&self, raaa: u64, rbbb: u64) -> bool {
        self.joint_sum == Some(raaa + rbbb) && (self.raaa_min..=self.raaa_max).contains(&raaa)
    }

    fn point(&self, raaa: u64) -> RealizablePoint {
        let rbbb = self.joint_sum.expect("non-empty") - raaa;
        let gt = PairGroundTruth {
            q: self.q,
            qa: self.qa,
            raa: self.raa,
            rbb: self.rbb,
            raaa,
            rbbb,
        };
        RealizablePoint {
            correlation: gt.correlation(),
            raaa,
            rbbb,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = RealizablePoint> + '_ {
        let range = match self.joint_sum {
            Some(_) => self.raaa_min..=self.raaa_max,
            None => 1..=0,
        };
        range.map(|raaa| self.point(raaa))
    }
}

impl GammaSolution {
    pub fn contains(&self, c: &PairCorrelation) -> bool {
        // on the segment line and within its bounding box
        let (lo, hi) = &self.segment;
        let in_box = |x: &Rational, a: &Rational, b: &Rational| {
            let (min, max) = if a <= b { (a, b) } else { (b, a) };
            min <= x && x <= max
        };
        if !in_box(&c.gamma_a, &lo.gamma_a, &hi.gamma_a)
            || !in_box(&c.gamma_b, &lo.gamma_b, &hi.gamma_b)
        {
            return false;
        }
        // collinearity with the endpoints
        let dx = &hi.gamma_a - &lo.gamma_a;
        let dy = &hi.gamma_b - &lo.gamma_b;
        let ex = &c.gamma_a - &lo.gamma_a;
        let ey = &c.gamma_b - &lo.gamma_b;
        dx * ey == dy * ex
    }
}

/// Solves for all error correlations consistent with the observations given
/// the two individual evaluations.
///
/// The two individuals must share `(Q, Qa)` and each must reproduce its own
/// observed vote tally. The remaining freedom is the line
/// `prva*gamma_a + prvb*gamma_b = delta - (psa_i - fa_i)(psb_j - fb_j)`
/// intersected with the count bounds on the joint statistics.
pub fn solve_gamma(
    ind_i: &SingleEvaluation,
    ind_j: &SingleEvaluation,
    observed: &PairSketch,
) -> Result<GammaSolution, PairError> {
    let q = observed.q();
    if ind_i.q != q || ind_j.q != q || ind_i.qa != ind_j.qa {
        return Err(PairError::MismatchedIndividuals);
    }
    let qa = ind_i.qa;
    let qb = q - qa;
    for (side, ind) in [ind_i, ind_j].iter().enumerate() {
        let observed_ra = observed.marginal_single(side).ra();
        if ind.implied_ra() != observed_ra {
            return Err(PairError::InconsistentVotes {
                side,
                implied: ind.implied_ra(),
                observed: observed_ra,
            });
        }
    }

    // gamma bounds from the joint count ranges
    let (a_lo, a_hi) = joint_bounds(qa, ind_i.raa, ind_j.raa);
    let (b_lo, b_hi) = joint_bounds(qb, ind_i.rbb, ind_j.rbb);
    let gamma_a_range = gamma_range(qa, ind_i.raa, ind_j.raa, a_lo, a_hi);
    let gamma_b_range = gamma_range(qb, ind_i.rbb, ind_j.rbb, b_lo, b_hi);

    let prva = Rational::new(qa, q);
    let prvb = Rational::new(qb, q);
    let delta = observed.delta();
    // psa_i - fa_i and psb_j - fb_j; on a degenerate question type the
    // accuracy is undefined but its weight is zero, so the substituted value
    // is irrelevant to the line: use 0.
    let acc = |r: u64, total: u64| {
        if total == 0 {
            Rational::zero()
        } else {
            Rational::new(r, total)
        }
    };
    let ai = acc(ind_i.raa, qa) - observed.fa(0);
    let bj = acc(ind_j.rbb, qb) - observed.fb(1);
    // prva*ga + prvb*gb = k
    let k = if qa == 0 || qb == 0 {
        // single-sided: the nondegenerate side is pinned directly by the
        // observed joint frequency
        if qa == 0 {
            observed.fbb() - acc(ind_i.rbb, qb) * acc(ind_j.rbb, qb)
        } else {
            observed.faa() - acc(ind_i.raa, qa) * acc(ind_j.raa, qa)
        }
    } else {
        delta - ai * bj
    };

    let segment = intersect_line_box(&prva, &prvb, &k, &gamma_a_range, &gamma_b_range)
        .ok_or(PairError::NoSolution)?;

    // integer realizability: the line pins raaa + rbbb, so the realizable
    // points are a contiguous raaa interval
    let raa = [ind_i.raa, ind_j.raa];
    let rbb = [ind_i.rbb, ind_j.rbb];
    let mut realizable = RealizableSet::empty(q, qa, raa, rbb);
    {
        let pp_a = if qa == 0 {
            Rational::zero()
        } else {
            Rational::new(raa[0] * raa[1], 1) / Rational::from(qa)
        };
        let pp_b = if qb == 0 {
            Rational::zero()
        } else {
            Rational::new(rbb[0] * rbb[1], 1) / Rational::from(qb)
        };
        let total = Rational::from(q) * &k + &pp_a + &pp_b;
        if total.is_integer() && !total.is_negative() {
            let total: u64 = total.numer().try_into().unwrap_or(u64::MAX);
            let lo = a_lo.max(total.saturating_sub(b_hi));
            let hi = a_hi.min(total.saturating_sub(b_lo)).min(total);
            if lo <= hi {
                // one witness confirms the sketch; the counts only depend on
                // the joint sum, so the rest of the interval matches too
                let witness = PairGroundTruth {
                    q,
                    qa,
                    raa,
                    rbb,
                    raaa: lo,
                    rbbb: total - lo,
                };
                if witness.is_valid() && witness.sketch() == *observed {
                    realizable.joint_sum = Some(total);
                    realizable.raaa_min = lo;
                    realizable.raaa_max = hi;
                }
            }
        }
    }

    let representative = min_norm_point(&segment);
    let candidate = PairCandidate {
        prevalence: prva,
        psa: [acc(ind_i.raa, qa), acc(ind_j.raa, qa)],
        psb: [acc(ind_i.rbb, qb), acc(ind_j.rbb, qb)],
        correlation: representative.clone(),
    };
    let residuals = gb_residuals(&candidate, observed);
    Ok(GammaSolution {
        segment,
        realizable,
        representative,
        residuals,
    })
}

fn joint_bounds(total: u64, r_i: u64, r_j: u64) -> (u64, u64) {
    ((r_i + r_j).saturating_sub(total), r_i.min(r_j))
}

fn gamma_range(total: u64, r_i: u64, r_j: u64, lo: u64, hi: u64) -> (Rational, Rational) {
    if total == 0 {
        return (Rational::zero(), Rational::zero());
    }
    let pp = Rational::new(r_i, total) * Rational::new(r_j, total);
    (
        Rational::new(lo, total) - &pp,
        Rational::new(hi, total) - pp,
    )
}

/// Intersects `wa*x + wb*y = k` with a box, returning segment endpoints
/// ordered by `gamma_a`.
fn intersect_line_box(
    wa: &Rational,
    wb: &Rational,
    k: &Rational,
    x_range: &(Rational, Rational),
    y_range: &(Rational, Rational),
) -> Option<(PairCorrelation, PairCorrelation)> {
    let (xmin, xmax) = x_range;
    let (ymin, ymax) = y_range;
    if wa.is_zero() && wb.is_zero() {
        return if k.is_zero() {
            Some((
                PairCorrelation { gamma_a: xmin.clone(), gamma_b: ymin.clone() },
                PairCorrelation { gamma_a: xmin.clone(), gamma_b: ymin.clone() },
            ))
        } else {
            None
        };
    }
    if wa.is_zero() {
        // y fixed
        let y = k.checked_div(wb).expect("wb nonzero");
        if &y < ymin || &y > ymax {
            return None;
        }
        return Some((
            PairCorrelation { gamma_a: xmin.clone(), gamma_b: y.clone() },
            PairCorrelation { gamma_a: xmax.clone(), gamma_b: y },
        ));
    }
    if wb.is_zero() {
        let x = k.checked_div(wa).expect("wa nonzero");
        if &x < xmin || &x > xmax {
            return None;
        }
        return Some((
            PairCorrelation { gamma_a: x.clone(), gamma_b: ymin.clone() },
            PairCorrelation { gamma_a: x, gamma_b: ymax.clone() },
        ));
    }
    // x range induced by the y bounds: y = (k - wa x)/wb decreasing in x
    // for positive weights
    let x_at = |y: &Rational| (k - wb * y).checked_div(wa).expect("wa nonzero");
    let (x_from_y_lo, x_from_y_hi) = (x_at(ymax), x_at(ymin));
    let lo = if &x_from_y_lo > xmin { x_from_y_lo } else { xmin.clone() };
    let hi = if &x_from_y_hi < xmax { x_from_y_hi } else { xmax.clone() };
    if lo > hi {
        return None;
    }
    let y_of = |x: &Rational| (k - wa * x).checked_div(wb).expect("wb nonzero");
    Some((
        PairCorrelation { gamma_b: y_of(&lo), gamma_a: lo },
        PairCorrelation { gamma_b: y_of(&hi), gamma_a: hi },
    ))
}

/// The point of minimum `gamma_a^2 + gamma_b^2` on a segment, the reporting
/// convention when the consistent set is not a single point.
fn min_norm_point(segment: &(PairCorrelation, PairCorrelation)) -> PairCorrelation {
    let (p0, p1) = segment;
    let dx = &p1.gamma_a - &p0.gamma_a;
    let dy = &p1.gamma_b - &p0.gamma_b;
    let len2 = dx.square() + dy.square();
    if len2.is_zero() {
        return p0.clone();
    }
    // projection of the origin onto the segment, clamped to [0, 1]
    let t = -(
        &p0.gamma_a * &dx + &p0.gamma_b * &dy
    ).checked_div(&len2)
        .expect("nonzero length");
    let t = if t.is_negative() {
        Rational::zero()
    } else if t > Rational::one() {
        Rational::one()
    } else {
        t
    };
    PairCorrelation {
        gamma_a: &p0.gamma_a + &dx * &t,
        gamma_b: &p0.gamma_b + &dy * &t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    /// All pair ground truths for a test of `q` questions.
    fn all_ground_truths(q: u64) -> Vec<PairGroundTruth> {
        let mut out = Vec::new();
        for qa in 0..=q {
            let qb = q - qa;
            for raa_i in 0..=qa {
                for raa_j in 0..=qa {
                    for rbb_i in 0..=qb {
                        for rbb_j in 0..=qb {
                            let (alo, ahi) = joint_bounds(qa, raa_i, raa_j);
                            let (blo, bhi) = joint_bounds(qb, rbb_i, rbb_j);
                            for raaa in alo..=ahi {
                                for rbbb in blo..=bhi {
                                    out.push(PairGroundTruth {
                                        q,
                                        qa,
                                        raa: [raa_i, raa_j],
                                        rbb: [rbb_i, rbb_j],
                                        raaa,
                                        rbbb,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn postulate_route_matches_count_route() {
        for gt in all_ground_truths(5) {
            assert!(gt.is_valid());
            let from_postulates = pair_frequencies(&gt);
            let from_counts = gt.sketch();
            let q = Rational::from(gt.q);
            for (idx, freq) in from_postulates.iter().enumerate() {
                assert_eq!(
                    freq,
                    &(Rational::from(gt.vote_pattern_counts()[idx]) / &q),
                    "{gt:?}"
                );
            }
            let total: Rational = from_postulates.iter().sum();
            assert_eq!(total, Rational::one(), "completeness for {gt:?}");
            let _ = from_counts;
        }
    }

    #[test]
    fn independent_synthetic_pair_frequency() {
        // classifiers 1 and 2 of the synthetic trio at prevalence 19/20;
        // independence makes the postulates reduce to products. Scaled to
        // integers with q = 100000.
        let q = 100_000;
        let qa = 95_000;
        let qb = 5_000;
        let gt = PairGroundTruth {
            q,
            qa,
            raa: [qa * 18 / 25, qa * 41 / 50],
            rbb: [qb * 11 / 100, qb * 19 / 50],
            raaa: (qa * 18 / 25) * 41 / 50,
            rbbb: (qb * 11 / 100) * 19 / 50,
        };
        assert_eq!(gt.gamma_a(), Rational::zero());
        assert_eq!(gt.gamma_b(), Rational::zero());
        let [faa, ..] = pair_frequencies(&gt);
        assert_eq!(faa, rat(58_847, 100_000));
    }

    #[test]
    fn identical_classifiers_never_disagree() {
        let gt = PairGroundTruth {
            q: 10,
            qa: 4,
            raa: [3, 3],
            rbb: [5, 5],
            raaa: 3,
            rbbb: 5,
        };
        let [_, fab, fba, _] = pair_frequencies(&gt);
        assert_eq!(fab, Rational::zero());
        assert_eq!(fba, Rational::zero());
    }

    #[test]
    fn residuals_vanish_on_ground_truth() {
        for gt in all_ground_truths(5) {
            if gt.qa == 0 || gt.qb() == 0 {
                continue;
            }
            let candidate = PairCandidate::from_ground_truth(&gt).unwrap();
            let observed = gt.sketch();
            let residuals = gb_residuals(&candidate, &observed);
            for (i, r) in residuals.iter().enumerate() {
                assert!(r.is_zero(), "g{} = {r} nonzero for {gt:?}", i + 1);
            }
        }
    }

    #[test]
    fn gamma_perturbation_breaks_residuals() {
        let gt = PairGroundTruth {
            q: 8,
            qa: 4,
            raa: [3, 2],
            rbb: [2, 3],
            raaa: 2,
            rbbb: 2,
        };
        let mut candidate = PairCandidate::from_ground_truth(&gt).unwrap();
        candidate.correlation.gamma_a = candidate.correlation.gamma_a + rat(1, 8);
        let residuals = gb_residuals(&candidate, &gt.sketch());
        assert!(
            residuals[3..].iter().any(|r| !r.is_zero()),
            "perturbed gamma must violate a correlation basis element"
        );
        // the single-classifier postulates are untouched
        assert!(residuals[0].is_zero() && residuals[1].is_zero());
    }

    #[test]
    fn violating_single_postulate_shows_in_first_residuals() {
        let gt = PairGroundTruth {
            q: 8,
            qa: 4,
            raa: [3, 2],
            rbb: [2, 3],
            raaa: 2,
            rbbb: 2,
        };
        let mut candidate = PairCandidate::from_ground_truth(&gt).unwrap();
        candidate.psa[0] = rat(1, 4);
        let residuals = gb_residuals(&candidate, &gt.sketch());
        assert!(!residuals[0].is_zero());
    }

    #[test]
    fn round_trip_exhaustive_small_q() {
        for q in [4u64, 5, 6] {
            for gt in all_ground_truths(q) {
                let observed = gt.sketch();
                let solution =
                    solve_gamma(&gt.individual(0), &gt.individual(1), &observed).unwrap();
                let truth = gt.correlation();
                assert!(
                    solution.contains(&truth),
                    "truth {truth:?} outside solution {solution:?} for {gt:?}"
                );
                assert!(
                    solution.realizable.contains_counts(gt.raaa, gt.rbbb),
                    "true joint counts not among realizable points for {gt:?}"
                );
            }
        }
    }

    #[test]
    fn q4_solution_set_equals_brute_force() {
        // exhaustive cross-check of the solver against enumeration of every
        // joint assignment matching the observed sketch and individuals
        for gt in all_ground_truths(4) {
            let observed = gt.sketch();
            let solution = solve_gamma(&gt.individual(0), &gt.individual(1), &observed).unwrap();
            let brute: Vec<PairGroundTruth> = all_ground_truths(4)
                .into_iter()
                .filter(|cand| {
                    cand.qa == gt.qa
                        && cand.raa == gt.raa
                        && cand.rbb == gt.rbb
                        && cand.sketch() == observed
                })
                .collect();
            let mut expected: Vec<(u64, u64)> =
                brute.iter().map(|c| (c.raaa, c.rbbb)).collect();
            expected.sort_unstable();
            let mut got: Vec<(u64, u64)> =
                solution.realizable.iter().map(|p| (p.raaa, p.rbbb)).collect();
            for p in solution.realizable.iter() {
                let gt_point = PairGroundTruth {
                    q: gt.q, qa: gt.qa, raa: gt.raa, rbb: gt.rbb,
                    raaa: p.raaa, rbbb: p.rbbb,
                };
                assert_eq!(p.correlation, gt_point.correlation());
            }
            got.sort_unstable();
            assert_eq!(got, expected, "for {gt:?}");
        }
    }

    #[test]
    fn duplicated_classifier_recovers_variance_point() {
        // j is a copy of i: the consistent set must contain
        // (psa(1-psa), psb(1-psb))
        let gt = PairGroundTruth {
            q: 10,
            qa: 4,
            raa: [3, 3],
            rbb: [4, 4],
            raaa: 3,
            rbbb: 4,
        };
        let observed = gt.sketch();
        let solution = solve_gamma(&gt.individual(0), &gt.individual(1), &observed).unwrap();
        let psa = rat(3, 4);
        let psb = rat(4, 6);
        let expected = PairCorrelation {
            gamma_a: &psa * (Rational::one() - &psa),
            gamma_b: &psb * (Rational::one() - &psb),
        };
        assert!(solution.contains(&expected));
        assert!(solution.realizable.iter().any(|p| p.correlation == expected));
    }

    #[test]
    fn independent_pair_contains_origin() {
        let q = 200;
        let qa = 40;
        // accuracies 3/4 and 1/2 on a; 1/2 and 3/4 on b over qb = 160
        let gt = PairGroundTruth {
            q,
            qa,
            raa: [30, 20],
            rbb: [80, 120],
            raaa: 30 * 20 / 40,
            rbbb: 80 * 120 / 160,
        };
        assert_eq!(gt.gamma_a(), Rational::zero());
        assert_eq!(gt.gamma_b(), Rational::zero());
        let solution = solve_gamma(&gt.individual(0), &gt.individual(1), &gt.sketch()).unwrap();
        let origin = PairCorrelation {
            gamma_a: Rational::zero(),
            gamma_b: Rational::zero(),
        };
        assert!(solution.contains(&origin));
        // min-norm representative of a segment through the origin is the
        // origin itself
        assert_eq!(solution.representative, origin);
    }

    #[test]
    fn inconsistent_individuals_error() {
        let gt = PairGroundTruth {
            q: 8,
            qa: 4,
            raa: [3, 2],
            rbb: [2, 3],
            raaa: 2,
            rbbb: 2,
        };
        let observed = gt.sketch();
        let bad = SingleEvaluation::new(8, 4, 0, 0);
        assert!(matches!(
            solve_gamma(&bad, &gt.individual(1), &observed),
            Err(PairError::InconsistentVotes { side: 0, .. })
        ));
        let other_qa = SingleEvaluation::new(8, 5, 3, 2);
        assert!(matches!(
            solve_gamma(&other_qa, &gt.individual(1), &observed),
            Err(PairError::MismatchedIndividuals)
        ));
    }

    proptest! {
        #[test]
        fn frequencies_complete_and_consistent(
            q in 1u64..40,
            qa_frac in 0.0f64..=1.0,
            seed in 0u64..10_000,
        ) {
            let qa = ((q as f64) * qa_frac) as u64;
            let qb = q - qa;
            let mut s = seed;
            let mut next = |m: u64| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if m == 0 { 0 } else { (s >> 33) % (m + 1) }
            };
            let raa = [next(qa), next(qa)];
            let rbb = [next(qb), next(qb)];
            let (alo, ahi) = joint_bounds(qa, raa[0], raa[1]);
            let (blo, bhi) = joint_bounds(qb, rbb[0], rbb[1]);
            let raaa = alo + next(ahi - alo);
            let rbbb = blo + next(bhi - blo);
            let gt = PairGroundTruth { q, qa, raa, rbb, raaa, rbbb };
            prop_assert!(gt.is_valid());
            let freqs = pair_frequencies(&gt);
            let total: Rational = freqs.iter().sum();
            prop_assert_eq!(total, Rational::one());
            // postulate route equals count route
            let counts = gt.vote_pattern_counts();
            for idx in 0..4 {
                prop_assert_eq!(
                    freqs[idx].clone(),
                    Rational::new(counts[idx], q),
                );
            }
        }
    }
}
