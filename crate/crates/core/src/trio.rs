//! The exact algebraic evaluator for three error-independent binary
//! classifiers.
//!
//! From the eight voting-pattern frequencies the evaluator forms the vote
//! rates `fb_i`, the pair covariances `delta_ij`, and the triple moment `T`,
//! then solves the prevalence quadratic whose square-root term is
//! `4*delta_12*delta_13*delta_23 + T^2`. When the classifiers really are
//! error independent on the test that term is a perfect square and every
//! output is rational; an irrational or imaginary term is a proof that the
//! independence assumption fails, which is the self-alarm this whole crate
//! exists to compute.
//!
//! The accuracy ladder recovers the Youden indices `psi_i` up to signs. The
//! pair covariances pin the relative signs, and the triple moment pins the
//! global one whenever it carries information (`T != 0` and the root is not
//! one half); the residual two-fold ambiguity between a root `p` and its
//! mirror `1 - p` is intrinsic, because relabelling question types maps an
//! evaluation `(p, psa_i, psb_i)` to `(1-p, 1-psb_i, 1-psa_i)` with
//! identical observables.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{sqrt_exact, AlgebraicValue, NumberClass, Rational};
use crate::pair::{solve_gamma, GammaSolution, PairError};
use crate::single::SingleEvaluation;
use crate::sketch::TrioSketch;

/// The observables the independent evaluator consumes: per-classifier
/// `b`-vote rates, pair covariances, and the centered triple moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrioMoments {
    pub q: u64,
    /// `fb_i` for classifiers 1..3.
    pub fb: [Rational; 3],
    /// `delta_ij` for the pairs (1,2), (1,3), (2,3).
    pub delta: [Rational; 3],
    /// Frequency of the all-`b` voting pattern.
    pub fbbb: Rational,
    /// `T = fbbb - fb1 fb2 fb3 - fb1 d23 - fb2 d13 - fb3 d12`.
    pub triple: Rational,
}

/// Indices of the pair `(i, j)` in the `delta` array order (1,2), (1,3), (2,3).
const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn pair_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => panic!("bad pair"),
    }
}

/// Exact moments of a trio sketch.
pub fn moments(sketch: &TrioSketch) -> TrioMoments {
    assert!(sketch.q() > 0, "moments need a non-empty test");
    let fb: [Rational; 3] = std::array::from_fn(|i| sketch.marginal_single(i).fb());
    let delta: [Rational; 3] =
        std::array::from_fn(|k| sketch.marginal_pair(PAIRS[k].0, PAIRS[k].1).delta());
    let fbbb = sketch.frequency("bbb").expect("bbb is a valid pattern");
    let triple = &fbbb
        - &fb[0] * &fb[1] * &fb[2]
        - &fb[0] * &delta[2]
        - &fb[1] * &delta[1]
        - &fb[2] * &delta[0];
    TrioMoments {
        q: sketch.q(),
        fb,
        delta,
        fbbb,
        triple,
    }
}

/// What the evaluator's output type says about its own assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Alarm {
    /// Square root resolves; outputs are rational.
    None,
    /// Unresolved square root: provably not error independent.
    Irrational,
    /// Negative square-root argument: provably not error independent.
    Imaginary,
    /// The moment ladder is uninformative (zero square-root term or a
    /// vanishing pair covariance).
    Degenerate,
}

/// The prevalence quadratic in standard coefficients, plus the square-root
/// term that drives the alarm.
#[derive(Debug, Clone, Serialize)]
pub struct PrevalenceQuadratic {
    /// `a p^2 + b p + c = 0` with `a = 4 d12 d13 d23 + T^2`, `b = -a`,
    /// `c = d12 d13 d23`.
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    /// Argument of the square root: `4 d12 d13 d23 + T^2`.
    pub sqrt_term_arg: Rational,
    /// Its exact square root, whose classification is the alarm.
    pub sqrt_term: AlgebraicValue,
    /// The same quadratic as `k * p(1-p) = m`: `(k, m)` with `k` the
    /// square-root argument and `m` the product of the pair covariances.
    pub normal_form: (Rational, Rational),
}

/// Outcome of the prevalence solve.
#[derive(Debug, Clone, Serialize)]
pub struct PrevalenceOutcome {
    pub quadratic: PrevalenceQuadratic,
    pub alarm: Alarm,
    /// Roots `1/2 -+ T / (2 sqrt)` ordered low/high; absent when the alarm
    /// is imaginary or degenerate.
    pub roots: Option<(AlgebraicValue, AlgebraicValue)>,
}

/// Solves the prevalence quadratic and classifies its square-root term.
pub fn prevalence_quadratic(m: &TrioMoments) -> PrevalenceOutcome {
    let ddd = &m.delta[0] * &m.delta[1] * &m.delta[2];
    let arg = Rational::int(4) * &ddd + m.triple.square();
    let sqrt_term = sqrt_exact(&arg);
    let quadratic = PrevalenceQuadratic {
        a: arg.clone(),
        b: -&arg,
        c: ddd.clone(),
        sqrt_term_arg: arg.clone(),
        sqrt_term: sqrt_term.clone(),
        normal_form: (arg.clone(), ddd),
    };
    let (alarm, roots) = match sqrt_term.classification() {
        NumberClass::Imaginary => (Alarm::Imaginary, None),
        _ if arg.is_zero() => (Alarm::Degenerate, None),
        class => {
            let half = AlgebraicValue::from_rational(Rational::ratio(1, 2));
            // T / (2 sqrt(arg)) = (T / (2 arg)) * sqrt(arg)
            let offset = AlgebraicValue::new(
                Rational::zero(),
                (&m.triple / (Rational::int(2) * &arg)).clone(),
                arg.clone(),
            );
            let lo = &half - &offset.abs_real();
            let hi = &half + &offset.abs_real();
            let alarm = if class == NumberClass::Irrational {
                Alarm::Irrational
            } else {
                Alarm::None
            };
            (alarm, Some((lo, hi)))
        }
    };
    PrevalenceOutcome {
        quadratic,
        alarm,
        roots,
    }
}

/// Exact accuracies of one classifier under a chosen prevalence root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifierAccuracy {
    pub psa: AlgebraicValue,
    pub psb: AlgebraicValue,
    /// Youden index `psa + psb - 1`, the ladder variable.
    pub psi: AlgebraicValue,
}

/// Failures of the accuracy ladder.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrioError {
    #[error("accuracy ladder undefined: {0}")]
    Degenerate(String),
    #[error("pair covariances have inconsistent signs: provably not error independent")]
    NotIndependent,
    #[error("prevalence root is imaginary")]
    ImaginaryRoot,
    #[error("pair solver: {0}")]
    Pair(#[from] PairError),
}

/// Recovers per-classifier accuracies from the moments and one prevalence
/// root.
///
/// `psi_i = s_i * sqrt(d_ij d_ik / d_jk) / sqrt(p(1-p))` with the relative
/// signs fixed by `sign(psi_i psi_j) = sign(d_ij)` and the global sign by
/// the triple moment when it is informative, by majority nonnegative psi
/// otherwise. Then `psa_i = 1 + (1-p) psi_i - fb_i` and
/// `psb_i = psi_i + 1 - psa_i`.
pub fn accuracies(
    m: &TrioMoments,
    root: &AlgebraicValue,
) -> Result<[ClassifierAccuracy; 3], TrioError> {
    if !root.is_real() {
        return Err(TrioError::ImaginaryRoot);
    }
    for (slot, (i, j)) in PAIRS.iter().enumerate() {
        if m.delta[slot].is_zero() {
            return Err(TrioError::Degenerate(format!(
                "delta_{}{} is zero",
                i + 1,
                j + 1
            )));
        }
    }
    let ddd = &m.delta[0] * &m.delta[1] * &m.delta[2];
    if ddd.is_negative() {
        return Err(TrioError::NotIndependent);
    }
    let one = AlgebraicValue::from_rational(Rational::one());
    // p(1-p) is rational for any root of the quadratic (it is the product
    // of the two roots); reject roots that do not satisfy that.
    let u = root
        .checked_mul(&(&one - root))
        .ok()
        .and_then(|v| v.as_rational().cloned())
        .ok_or_else(|| TrioError::Degenerate("p(1-p) is not rational".to_string()))?;
    if u.is_zero() {
        return Err(TrioError::Degenerate("prevalence root is 0 or 1".to_string()));
    }
    if u.is_negative() {
        return Err(TrioError::NotIndependent);
    }

    // psi magnitudes
    let mags: [AlgebraicValue; 3] = std::array::from_fn(|i| {
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let num = &m.delta[pair_slot(i, j)] * &m.delta[pair_slot(i, k)];
        let arg = num
            .checked_div(&(&m.delta[pair_slot(j, k)] * &u))
            .expect("nonzero delta and u");
        debug_assert!(!arg.is_negative(), "sign screened by the ddd test");
        sqrt_exact(&arg)
    });

    let sign_of = |r: &Rational| if r.is_negative() { -1i32 } else { 1 };
    let candidates = [1i32, -1].map(|s1| {
        [
            s1,
            s1 * sign_of(&m.delta[0]),
            s1 * sign_of(&m.delta[1]),
        ]
    });

    // The triple moment satisfies T = u (2p - 1) psi1 psi2 psi3, pinning the
    // global sign when T != 0 and p != 1/2.
    let two_p_minus_one = root * AlgebraicValue::from_rational(Rational::int(2)) - &one;
    let pinned = !m.triple.is_zero() && !two_p_minus_one.is_zero();
    let chosen = candidates
        .iter()
        .find(|signs| {
            if pinned {
                let w = signed(&mags[0], signs[0])
                    * signed(&mags[1], signs[1])
                    * signed(&mags[2], signs[2]);
                let expected = AlgebraicValue::from_rational(m.triple.clone())
                    .checked_div(
                        &(AlgebraicValue::from_rational(u.clone()) * &two_p_minus_one),
                    )
                    .expect("nonzero u and 2p-1");
                w == expected
            } else {
                signs.iter().filter(|&&s| s > 0).count() >= 2
            }
        })
        .ok_or_else(|| {
            TrioError::Degenerate("no sign assignment reproduces the triple moment".to_string())
        })?;

    let one_minus_p = &one - root;
    Ok(std::array::from_fn(|i| {
        let psi = signed(&mags[i], chosen[i]);
        let psa = &one + &one_minus_p * &psi - AlgebraicValue::from_rational(m.fb[i].clone());
        let psb = &psi + &one - &psa;
        ClassifierAccuracy { psa, psb, psi }
    }))
}

fn signed(v: &AlgebraicValue, sign: i32) -> AlgebraicValue {
    if sign < 0 {
        -v
    } else {
        v.clone()
    }
}

/// Integer evaluation for the whole trio: a shared `Qa` plus per-classifier
/// correct counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProjectedEvaluation {
    pub qa: u64,
    /// `(Raa_i, Rbb_i)` per classifier.
    pub correct: [(u64, u64); 3],
}

impl ProjectedEvaluation {
    pub fn individual(&self, q: u64, i: usize) -> SingleEvaluation {
        SingleEvaluation::new(q, self.qa, self.correct[i].0, self.correct[i].1)
    }
}

/// Projects exact (possibly irrational) targets to the nearest logically
/// consistent integer evaluation, nearest by total L1 distance over
/// `(Qa, Raa_i, Rbb_i)`, ties broken toward the smallest `Qa` then the
/// smallest `Raa`.
pub fn project_integer(
    q: u64,
    root: &AlgebraicValue,
    acc: &[ClassifierAccuracy; 3],
    observed_ra: &[u64; 3],
) -> ProjectedEvaluation {
    let qa_target = root * AlgebraicValue::from_rational(Rational::from(q));
    let one = AlgebraicValue::from_rational(Rational::one());
    let qb_target = &AlgebraicValue::from_rational(Rational::from(q)) - &qa_target;
    let raa_targets: [AlgebraicValue; 3] = std::array::from_fn(|i| &acc[i].psa * &qa_target);
    let rbb_targets: [AlgebraicValue; 3] = std::array::from_fn(|i| &acc[i].psb * &qb_target);
    let _ = one;

    // exact targets that are already integral and consistent project to
    // themselves
    if let Some(exact) = exact_integer_projection(q, &qa_target, &raa_targets, &rbb_targets, observed_ra)
    {
        return exact;
    }

    let evaluate_qa = |qa: u64| -> (AlgebraicValue, [(u64, u64); 3]) {
        let qb = q - qa;
        let mut cost = AlgebraicValue::from_rational(Rational::from(qa))
            .checked_sub(&qa_target)
            .expect("shared extension")
            .abs_real();
        let mut correct = [(0u64, 0u64); 3];
        for i in 0..3 {
            let k = observed_ra[i] as i128 - qb as i128;
            let lo = k.max(0);
            let hi = (qa as i128).min(qb as i128 + k);
            // minimize |x - u| + |x - t| over integers x in [lo, hi], where
            // t = k + rbb_target so that rbb = x - k tracks its own target
            let u = &raa_targets[i];
            let t = AlgebraicValue::from_rational(Rational::int(k as i64)) + &rbb_targets[i];
            let mut best: Option<(AlgebraicValue, i128)> = None;
            for cand in inner_candidates(u, &t, lo, hi) {
                let x = AlgebraicValue::from_rational(Rational::int(cand as i64));
                let c = (x.checked_sub(u).expect("ext").abs_real())
                    + (AlgebraicValue::from_rational(Rational::int(cand as i64))
                        .checked_sub(&t)
                        .expect("ext")
                        .abs_real());
                let better = match &best {
                    None => true,
                    Some((bc, bx)) => match c.compare(bc) {
                        Some(std::cmp::Ordering::Less) => true,
                        Some(std::cmp::Ordering::Equal) => cand < *bx,
                        _ => false,
                    },
                };
                if better {
                    best = Some((c, cand));
                }
            }
            let (c, x) = best.expect("candidate set is never empty");
            cost = cost + c;
            correct[i] = (x as u64, (x - k) as u64);
        }
        (cost, correct)
    };

    // the per-Qa cost is bounded below by |qa - qa_target|, so once a full
    // cost B is known only qa within B of the target can compete
    let qa_seed = clamp_to_range(qa_target.floor_int(), q);
    let (seed_cost, seed_correct) = evaluate_qa(qa_seed);
    let mut best = (seed_cost.clone(), qa_seed, seed_correct);
    let radius_lo = (&qa_target - &best.0).floor_int();
    let radius_hi = (&qa_target + &best.0).floor_int() + 1i32;
    let lo = clamp_to_range(radius_lo, q);
    let hi = clamp_to_range(radius_hi, q);
    for qa in lo..=hi {
        if qa == qa_seed {
            continue;
        }
        let (cost, correct) = evaluate_qa(qa);
        let better = match cost.compare(&best.0) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Equal) => qa < best.1,
            _ => false,
        };
        if better {
            best = (cost, qa, correct);
        }
    }
    ProjectedEvaluation {
        qa: best.1,
        correct: best.2,
    }
}

fn clamp_to_range(v: BigInt, q: u64) -> u64 {
    if v < BigInt::from(0) {
        0
    } else if v > BigInt::from(q) {
        q
    } else {
        u64::try_from(v).expect("clamped")
    }
}

/// Candidate integer minimizers of `|x - u| + |x - t|` within `[lo, hi]`:
/// the clamped floors and ceilings of both targets cover every breakpoint
/// of the piecewise-linear objective.
fn inner_candidates(u: &AlgebraicValue, t: &AlgebraicValue, lo: i128, hi: i128) -> Vec<i128> {
    let mut cands = vec![lo, hi];
    for target in [u, t] {
        let f = target.floor_int();
        let f: i128 = (&f).try_into().unwrap_or(0);
        for x in [f, f + 1] {
            cands.push(x.clamp(lo, hi));
        }
    }
    cands.sort_unstable();
    cands.dedup();
    cands
}

fn exact_integer_projection(
    q: u64,
    qa_target: &AlgebraicValue,
    raa_targets: &[AlgebraicValue; 3],
    rbb_targets: &[AlgebraicValue; 3],
    observed_ra: &[u64; 3],
) -> Option<ProjectedEvaluation> {
    let as_count = |v: &AlgebraicValue, max: u64| -> Option<u64> {
        let r = v.as_rational()?;
        if !r.is_integer() || r.is_negative() {
            return None;
        }
        let n = u64::try_from(r.numer()).ok()?;
        (n <= max).then_some(n)
    };
    let qa = as_count(qa_target, q)?;
    let qb = q - qa;
    let mut correct = [(0u64, 0u64); 3];
    for i in 0..3 {
        let raa = as_count(&raa_targets[i], qa)?;
        let rbb = as_count(&rbb_targets[i], qb)?;
        if raa + qb - rbb != observed_ra[i] {
            return None;
        }
        correct[i] = (raa, rbb);
    }
    Some(ProjectedEvaluation { qa, correct })
}

/// Everything the independent evaluator reports for one root.
#[derive(Debug, Clone, Serialize)]
pub struct RootEvaluation {
    pub prevalence: AlgebraicValue,
    pub accuracies: Option<[ClassifierAccuracy; 3]>,
    /// Set when the accuracy ladder fails.
    pub ladder_error: Option<String>,
    pub projection: Option<ProjectedEvaluation>,
    /// Per-pair correlation solution from the projected individuals, in the
    /// order (1,2), (1,3), (2,3).
    pub implied_gammas: Option<[Result<GammaSolution, PairError>; 3]>,
}

/// Full output of the independent evaluator on one trio sketch.
#[derive(Debug, Clone, Serialize)]
pub struct IaeReport {
    pub q: u64,
    pub moments: TrioMoments,
    pub quadratic: PrevalenceQuadratic,
    pub alarm: Alarm,
    pub roots: Option<Box<(RootEvaluation, RootEvaluation)>>,
    /// Index (0 = low root, 1 = high root) selected by the
    /// better-than-chance convention, when requested and decidable.
    pub selected_root: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IaeOptions {
    /// Select the root whose implied mean accuracy exceeds one half.
    pub assume_better_than_chance: bool,
}

/// Runs the full independent evaluation: moments, prevalence quadratic,
/// accuracy ladder, integer projection and implied pair correlations.
pub fn evaluate_trio(sketch: &TrioSketch, options: IaeOptions) -> IaeReport {
    let m = moments(sketch);
    let outcome = prevalence_quadratic(&m);
    let observed_ra: [u64; 3] = std::array::from_fn(|i| sketch.marginal_single(i).ra());
    let evaluate_root = |root: &AlgebraicValue| -> RootEvaluation {
        match accuracies(&m, root) {
            Ok(acc) => {
                let projection = project_integer(sketch.q(), root, &acc, &observed_ra);
                let individuals: [SingleEvaluation; 3] =
                    std::array::from_fn(|i| projection.individual(sketch.q(), i));
                let implied = PAIRS.map(|(i, j)| {
                    solve_gamma(
                        &individuals[i],
                        &individuals[j],
                        &sketch.marginal_pair(i, j),
                    )
                });
                RootEvaluation {
                    prevalence: root.clone(),
                    accuracies: Some(acc),
                    ladder_error: None,
                    projection: Some(projection),
                    implied_gammas: Some(implied),
                }
            }
            Err(err) => RootEvaluation {
                prevalence: root.clone(),
                accuracies: None,
                ladder_error: Some(err.to_string()),
                projection: None,
                implied_gammas: None,
            },
        }
    };
    let roots = outcome
        .roots
        .as_ref()
        .map(|(lo, hi)| Box::new((evaluate_root(lo), evaluate_root(hi))));
    let selected_root = if options.assume_better_than_chance {
        roots.as_ref().and_then(|pair| {
            let mean_above_half = |ev: &RootEvaluation| -> Option<bool> {
                let acc = ev.accuracies.as_ref()?;
                let sum = acc.iter().fold(AlgebraicValue::zero(), |s, a| {
                    s + &a.psa + &a.psb
                });
                let three = AlgebraicValue::from_rational(Rational::int(3));
                Some(matches!(
                    sum.compare(&three),
                    Some(std::cmp::Ordering::Greater)
                ))
            };
            match (mean_above_half(&pair.0), mean_above_half(&pair.1)) {
                (Some(true), Some(false)) => Some(0),
                (Some(false), Some(true)) => Some(1),
                (Some(true), Some(true)) | (Some(false), Some(false)) => Some(1),
                _ => None,
            }
        })
    } else {
        None
    };
    IaeReport {
        q: sketch.q(),
        moments: m,
        quadratic: outcome.quadratic,
        alarm: outcome.alarm,
        roots,
        selected_root,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::synthetic_trio_sketch;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn synthetic_moments() -> TrioMoments {
        moments(&synthetic_trio_sketch())
    }

    #[test]
    fn moments_reproduce_expansion_values() {
        let m = synthetic_moments();
        assert_eq!(m.fb, [rat(543, 2000), rat(19, 100), rat(637, 2000)]);
        assert_eq!(
            m.delta,
            [
                rat(-323, 200_000),
                rat(-18_411, 4_000_000),
                rat(1_083, 200_000)
            ]
        );
        assert_eq!(m.fbbb, rat(78_413, 5_000_000));
        assert_eq!(m.triple, rat(-165_699, 200_000_000));
    }

    #[test]
    fn synthetic_sqrt_term_and_roots() {
        let outcome = prevalence_quadratic(&synthetic_moments());
        assert_eq!(outcome.alarm, Alarm::None);
        assert_eq!(
            outcome.quadratic.sqrt_term_arg,
            "338964921/400000000000000".parse().unwrap()
        );
        assert_eq!(
            outcome.quadratic.sqrt_term.as_rational(),
            Some(&rat(18_411, 20_000_000))
        );
        let (lo, hi) = outcome.roots.unwrap();
        assert_eq!(lo.as_rational(), Some(&rat(1, 20)));
        assert_eq!(hi.as_rational(), Some(&rat(19, 20)));
        // normal form: k p(1-p) = m with m/k = 19/400
        let (k, m) = outcome.quadratic.normal_form;
        assert_eq!(m / k, rat(19, 400));
    }

    #[test]
    fn roots_satisfy_quadratic_exactly() {
        let outcome = prevalence_quadratic(&synthetic_moments());
        let (lo, hi) = outcome.roots.unwrap();
        for root in [lo, hi] {
            let value = AlgebraicValue::from_rational(outcome.quadratic.a.clone()) * &root * &root
                + AlgebraicValue::from_rational(outcome.quadratic.b.clone()) * &root
                + AlgebraicValue::from_rational(outcome.quadratic.c.clone());
            assert!(value.is_zero());
        }
    }

    #[test]
    fn accuracy_ladder_recovers_synthetic_truth() {
        let m = synthetic_moments();
        let root = AlgebraicValue::from_rational(rat(19, 20));
        let acc = accuracies(&m, &root).unwrap();
        let expected = [
            (rat(18, 25), rat(11, 100)),
            (rat(41, 50), rat(19, 50)),
            (rat(71, 100), rat(43, 50)),
        ];
        for (got, (psa, psb)) in acc.iter().zip(expected) {
            assert_eq!(got.psa.as_rational(), Some(&psa));
            assert_eq!(got.psb.as_rational(), Some(&psb));
        }
    }

    #[test]
    fn mirror_root_complements_accuracies() {
        let m = synthetic_moments();
        let acc = accuracies(&m, &AlgebraicValue::from_rational(rat(19, 20))).unwrap();
        let mirrored = accuracies(&m, &AlgebraicValue::from_rational(rat(1, 20))).unwrap();
        let one = Rational::one();
        for (a, b) in acc.iter().zip(mirrored.iter()) {
            assert_eq!(
                b.psa.as_rational().unwrap(),
                &(&one - a.psb.as_rational().unwrap())
            );
            assert_eq!(
                b.psb.as_rational().unwrap(),
                &(&one - a.psa.as_rational().unwrap())
            );
        }
    }

    #[test]
    fn symmetric_moments_give_half_roots() {
        // T = 0 with positive delta product: both roots are 1/2
        let m = TrioMoments {
            q: 16,
            fb: [rat(1, 2), rat(1, 2), rat(1, 2)],
            delta: [rat(1, 16), rat(1, 16), rat(1, 16)],
            fbbb: rat(1, 8) + rat(3, 32), // fb1 fb2 fb3 + sum fb_k d_ij
            triple: Rational::zero(),
        };
        let outcome = prevalence_quadratic(&m);
        assert_eq!(outcome.alarm, Alarm::None);
        let (lo, hi) = outcome.roots.unwrap();
        assert_eq!(lo.as_rational(), Some(&rat(1, 2)));
        assert_eq!(hi.as_rational(), Some(&rat(1, 2)));
    }

    #[test]
    fn negative_sqrt_arg_raises_imaginary_alarm() {
        // deltas all equal -1/9 with T small enough: arg < 0
        let m = TrioMoments {
            q: 27,
            fb: [rat(2, 3), rat(2, 3), rat(2, 3)],
            delta: [rat(-1, 9), rat(-1, 9), rat(-1, 9)],
            fbbb: rat(1, 27),
            triple: rat(1, 100),
        };
        let arg = Rational::int(4) * rat(-1, 9).square() * rat(-1, 9) + rat(1, 100).square();
        assert!(arg.is_negative());
        let outcome = prevalence_quadratic(&m);
        assert_eq!(outcome.alarm, Alarm::Imaginary);
        assert!(outcome.roots.is_none());
    }

    #[test]
    fn degenerate_when_everything_vanishes() {
        let m = TrioMoments {
            q: 4,
            fb: [rat(1, 2), rat(1, 2), rat(1, 2)],
            delta: [Rational::zero(), Rational::zero(), Rational::zero()],
            fbbb: rat(1, 8),
            triple: Rational::zero(),
        };
        let outcome = prevalence_quadratic(&m);
        assert_eq!(outcome.alarm, Alarm::Degenerate);
        // zero delta also break the accuracy ladder
        let err = accuracies(&m, &AlgebraicValue::from_rational(rat(1, 2))).unwrap_err();
        assert!(matches!(err, TrioError::Degenerate(_)));
    }

    #[test]
    fn unanimous_sketch_is_degenerate() {
        // identical classifiers that always vote a: every moment vanishes
        let sketch = TrioSketch::from_counts([6, 0, 0, 0, 0, 0, 0, 0]);
        let m = moments(&sketch);
        assert_eq!(m.triple, Rational::zero());
        assert!(m.delta.iter().all(|d| d.is_zero()));
        let outcome = prevalence_quadratic(&m);
        assert_eq!(outcome.alarm, Alarm::Degenerate);
        assert!(outcome.roots.is_none());
    }

    #[test]
    fn split_unanimous_sketch_resolves_to_perfect_classifiers() {
        // identical classifiers splitting between all-a and all-b items are
        // logically explainable as three perfect, trivially independent
        // classifiers; the ladder resolves instead of alarming
        let sketch = TrioSketch::from_counts([3, 0, 0, 0, 0, 0, 0, 3]);
        let m = moments(&sketch);
        assert_eq!(m.triple, Rational::zero());
        let outcome = prevalence_quadratic(&m);
        assert_eq!(outcome.alarm, Alarm::None);
        let (_, hi) = outcome.roots.unwrap();
        let acc = accuracies(&m, &hi).unwrap();
        for a in &acc {
            assert_eq!(a.psa.as_rational(), Some(&Rational::one()));
            assert_eq!(a.psb.as_rational(), Some(&Rational::one()));
        }
    }

    #[test]
    fn exact_projection_short_circuits() {
        let sketch = synthetic_trio_sketch();
        let report = evaluate_trio(&sketch, IaeOptions::default());
        let roots = report.roots.as_ref().unwrap();
        let hi = &roots.1;
        let proj = hi.projection.as_ref().unwrap();
        assert_eq!(proj.qa, 4_750_000);
        assert_eq!(
            proj.correct,
            [
                (3_420_000, 27_500),
                (3_895_000, 95_000),
                (3_372_500, 215_000)
            ]
        );
    }

    #[test]
    fn implied_gammas_on_exact_synthetic_are_zero() {
        let sketch = synthetic_trio_sketch();
        let report = evaluate_trio(&sketch, IaeOptions::default());
        let hi = &report.roots.as_ref().unwrap().1;
        for solution in hi.implied_gammas.as_ref().unwrap() {
            let s = solution.as_ref().unwrap();
            assert_eq!(s.representative.gamma_a, Rational::zero());
            assert_eq!(s.representative.gamma_b, Rational::zero());
            // the exactly-independent joint counts are realizable
            assert!(!s.realizable.is_empty());
        }
    }

    #[test]
    fn better_than_chance_selects_truth_root() {
        let sketch = synthetic_trio_sketch();
        let report = evaluate_trio(
            &sketch,
            IaeOptions {
                assume_better_than_chance: true,
            },
        );
        // the high root 19/20 carries the above-chance accuracies
        assert_eq!(report.selected_root, Some(1));
    }

    #[test]
    fn projection_tie_breaks_deterministically() {
        // q = 2, observed ra = 1 for each classifier; target halfway between
        // consistent integer evaluations
        let m = TrioMoments {
            q: 2,
            fb: [rat(1, 2), rat(1, 2), rat(1, 2)],
            delta: [rat(1, 4), rat(1, 4), rat(1, 4)],
            fbbb: rat(1, 2),
            triple: Rational::zero(),
        };
        let root = AlgebraicValue::from_rational(rat(1, 2));
        let acc = accuracies(&m, &root).unwrap();
        let proj = project_integer(2, &root, &acc, &[1, 1, 1]);
        let rerun = project_integer(2, &root, &acc, &[1, 1, 1]);
        assert_eq!(proj, rerun);
        assert_eq!(proj.qa, 1, "smallest Qa wins ties");
    }

    #[test]
    fn projection_handles_irrational_targets() {
        // a sketch that is not error independent: alarm irrational, targets
        // in a real quadratic extension
        let sketch = TrioSketch::from_counts([5, 1, 2, 1, 1, 2, 1, 7]);
        let m = moments(&sketch);
        let outcome = prevalence_quadratic(&m);
        if let Some((_, hi)) = outcome.roots {
            if let Ok(acc) = accuracies(&m, &hi) {
                let observed: [u64; 3] =
                    std::array::from_fn(|i| sketch.marginal_single(i).ra());
                let proj = project_integer(sketch.q(), &hi, &acc, &observed);
                // projection must be consistent with every observed tally
                for i in 0..3 {
                    let ev = proj.individual(sketch.q(), i);
                    assert_eq!(ev.implied_ra(), observed[i]);
                }
            }
        }
    }
}
