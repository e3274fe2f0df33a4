//! The space of single-classifier evaluations.
//!
//! Before any responses are observed, a test with `Q` questions admits
//! `(Q+1)(Q+2)(Q+3)/6` evaluations `(Qa, Raa, Rbb)`. Observing the vote
//! tally cuts that down by the response decomposition `Ra = Raa + (Qb -
//! Rbb)`: the consistent set is a plane in the integer coordinates, which we
//! generate directly in `O(Q^2)` instead of scanning the cube.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

use crate::exact::Rational;
use crate::sketch::{IngestError, SingleSketch};

/// One possible grade of a binary test: `Qa` questions whose correct answer
/// is `a`, of which `Raa` were answered correctly, and `Rbb` correct answers
/// among the `Q - Qa` remaining questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SingleEvaluation {
    pub q: u64,
    pub qa: u64,
    pub raa: u64,
    pub rbb: u64,
}

impl SingleEvaluation {
    pub fn new(q: u64, qa: u64, raa: u64, rbb: u64) -> Self {
        debug_assert!(qa <= q && raa <= qa && rbb <= q - qa);
        SingleEvaluation { q, qa, raa, rbb }
    }

    pub fn qb(&self) -> u64 {
        self.q - self.qa
    }

    pub fn prevalence(&self) -> Rational {
        Rational::new(self.qa, self.q.max(1))
    }

    /// Accuracy on `a` questions; undefined when the test has none.
    pub fn accuracy_a(&self) -> Option<Rational> {
        (self.qa > 0).then(|| Rational::new(self.raa, self.qa))
    }

    /// Accuracy on `b` questions; undefined when the test has none.
    pub fn accuracy_b(&self) -> Option<Rational> {
        (self.qb() > 0).then(|| Rational::new(self.rbb, self.qb()))
    }

    pub fn correct_total(&self) -> u64 {
        self.raa + self.rbb
    }

    /// Number of `a` votes this evaluation implies: correct `a` answers plus
    /// missed `b` questions.
    pub fn implied_ra(&self) -> u64 {
        self.raa + self.qb() - self.rbb
    }

    /// Response decomposition constraint against an observed tally.
    pub fn consistent_with_sketch(&self, sketch: &SingleSketch) -> bool {
        self.q == sketch.q() && self.implied_ra() == sketch.ra()
    }
}

/// Every evaluation of a `Q`-question test, in `(Qa, Raa, Rbb)` loop order.
pub fn enumerate_all(q: u64) -> impl Iterator<Item = SingleEvaluation> {
    (0..=q).flat_map(move |qa| {
        (0..=qa).flat_map(move |raa| {
            (0..=q - qa).map(move |rbb| SingleEvaluation { q, qa, raa, rbb })
        })
    })
}

/// Closed-form size of the full evaluation space: `(Q+1)(Q+2)(Q+3)/6`.
pub fn count_all(q: u64) -> u128 {
    let q = q as u128;
    (q + 1) * (q + 2) * (q + 3) / 6
}

/// The evaluations logically consistent with an observed tally, generated
/// per `Qa` with `Rbb` forced by `Raa - Rbb = Ra - Qb`.
pub fn consistent_with(sketch: &SingleSketch) -> impl Iterator<Item = SingleEvaluation> + '_ {
    let q = sketch.q();
    let ra = sketch.ra();
    (0..=q).flat_map(move |qa| {
        let qb = q - qa;
        // Raa - Rbb = Ra - Qb =: k, with 0 <= Raa <= Qa and 0 <= Rbb <= Qb.
        let k = ra as i128 - qb as i128;
        let lo = k.max(0);
        let hi = (qa as i128).min(qb as i128 + k);
        (lo..=hi).map(move |raa| SingleEvaluation {
            q,
            qa,
            raa: raa as u64,
            rbb: (raa - k) as u64,
        })
    })
}

/// Count of consistent evaluations for each possible `Qa`.
pub fn posterior_counts(sketch: &SingleSketch) -> BTreeMap<u64, u64> {
    let q = sketch.q();
    let ra = sketch.ra();
    let mut out = BTreeMap::new();
    for qa in 0..=q {
        let qb = q - qa;
        let k = ra as i128 - qb as i128;
        let lo = k.max(0);
        let hi = (qa as i128).min(qb as i128 + k);
        if hi >= lo {
            out.insert(qa, (hi - lo + 1) as u64);
        }
    }
    out
}

/// Writes the consistent set as plot-ready CSV rows `Qa,Raa,Rbb`.
pub fn export_plane<W: Write>(sketch: &SingleSketch, writer: W) -> Result<(), IngestError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["Qa", "Raa", "Rbb"])
        .map_err(|e| IngestError::Csv(e.to_string()))?;
    for ev in consistent_with(sketch) {
        csv.write_record([ev.qa.to_string(), ev.raa.to_string(), ev.rbb.to_string()])
            .map_err(|e| IngestError::Csv(e.to_string()))?;
    }
    csv.flush().map_err(|e| IngestError::Csv(e.to_string()))?;
    Ok(())
}
