//! Label streams and voting-pattern sketches.
//!
//! A sketch is the vector of exact counts of aligned voting patterns over
//! the items of a test. Counts are the stored truth; frequencies are derived
//! lazily as rationals over `Q`. Sketches merge by count addition, so shards
//! of a stream may be tallied independently and combined.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::exact::Rational;
use thiserror::Error;

/// One of the two response symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    A,
    B,
}

impl Label {
    pub fn as_char(self) -> char {
        match self {
            Label::A => 'a',
            Label::B => 'b',
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::A => Label::B,
            Label::B => Label::A,
        }
    }

    fn bit(self) -> usize {
        match self {
            Label::A => 0,
            Label::B => 1,
        }
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "a" => Ok(Label::A),
            "b" => Ok(Label::B),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Aligned decisions of one item: one vote per classifier, plus the answer
/// key entry when the stream carries one. The truth column is only ever read
/// by graders and tests, never by the evaluators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamRow {
    pub item_id: String,
    pub votes: Vec<Label>,
    pub truth: Option<Label>,
}

/// A non-empty sequence of aligned decisions with a consistent classifier
/// count `n` between 1 and 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelStream {
    rows: Vec<StreamRow>,
    n: usize,
}

impl LabelStream {
    pub fn new(rows: Vec<StreamRow>) -> Result<Self, IngestError> {
        let first = rows.first().ok_or(IngestError::Empty)?;
        let n = first.votes.len();
        if !(1..=3).contains(&n) {
            return Err(IngestError::UnsupportedArity { n });
        }
        for (idx, row) in rows.iter().enumerate() {
            if row.votes.len() != n {
                return Err(IngestError::InconsistentArity {
                    row: idx,
                    expected: n,
                    got: row.votes.len(),
                });
            }
        }
        Ok(LabelStream { rows, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[StreamRow] {
        &self.rows
    }

    pub fn has_truth(&self) -> bool {
        self.rows.iter().all(|r| r.truth.is_some())
    }

    /// Reads the CSV wire format `item_id,c1[,c2][,c3][,truth]`, labels
    /// literally `a`/`b`. The `truth` column is recognized by header name.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, IngestError> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = csv.headers().map_err(|e| IngestError::Csv(e.to_string()))?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols.first() != Some(&"item_id") {
            return Err(IngestError::MissingItemId);
        }
        let has_truth = cols.last() == Some(&"truth");
        let vote_cols = cols.len() - 1 - usize::from(has_truth);
        let mut rows = Vec::new();
        for (idx, record) in csv.records().enumerate() {
            let record = record.map_err(|e| IngestError::Csv(e.to_string()))?;
            if record.len() != cols.len() {
                return Err(IngestError::InconsistentArity {
                    row: idx,
                    expected: cols.len() - 1,
                    got: record.len().saturating_sub(1),
                });
            }
            let parse = |field: &str| -> Result<Label, IngestError> {
                field.parse().map_err(|_| IngestError::UnknownLabel {
                    row: idx,
                    value: field.to_string(),
                })
            };
            let votes = (1..=vote_cols)
                .map(|c| parse(&record[c]))
                .collect::<Result<Vec<_>, _>>()?;
            let truth = if has_truth {
                Some(parse(&record[cols.len() - 1])?)
            } else {
                None
            };
            rows.push(StreamRow {
                item_id: record[0].to_string(),
                votes,
                truth,
            });
        }
        LabelStream::new(rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut csv = csv::Writer::from_writer(writer);
        let truth = self.has_truth();
        let mut header = vec!["item_id".to_string()];
        header.extend((1..=self.n).map(|i| format!("c{i}")));
        if truth {
            header.push("truth".to_string());
        }
        csv.write_record(&header).map_err(|e| IngestError::Csv(e.to_string()))?;
        for row in &self.rows {
            let mut rec = vec![row.item_id.clone()];
            rec.extend(row.votes.iter().map(|v| v.to_string()));
            if truth {
                rec.push(row.truth.expect("checked").to_string());
            }
            csv.write_record(&rec).map_err(|e| IngestError::Csv(e.to_string()))?;
        }
        csv.flush().map_err(|e| IngestError::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Tally error with the offending row index where applicable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("empty stream")]
    Empty,
    #[error("first column must be item_id")]
    MissingItemId,
    #[error("{n} classifiers per row is outside the supported 1..=3")]
    UnsupportedArity { n: usize },
    #[error("row {row}: expected {expected} decisions, got {got}")]
    InconsistentArity { row: usize, expected: usize, got: usize },
    #[error("row {row}: unknown label {value:?}")]
    UnknownLabel { row: usize, value: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("subset must name 1 or 2 distinct classifiers in 1..={expected}, got {got}")]
    BadSubset { expected: usize, got: usize },
}

/// Sketch of a stream, by classifier count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sketch {
    Trio(TrioSketch),
    Pair(PairSketch),
    Single(SingleSketch),
}

/// Tallies the aligned voting patterns of a stream in one pass.
pub fn ingest(stream: &LabelStream) -> Sketch {
    match stream.n() {
        1 => {
            let ra = stream
                .rows()
                .iter()
                .filter(|r| r.votes[0] == Label::A)
                .count() as u64;
            Sketch::Single(SingleSketch::new(stream.len() as u64, ra))
        }
        2 => {
            let mut counts = [0u64; 4];
            for row in stream.rows() {
                counts[row.votes[0].bit() * 2 + row.votes[1].bit()] += 1;
            }
            Sketch::Pair(PairSketch::from_counts(counts))
        }
        3 => {
            let mut counts = [0u64; 8];
            for row in stream.rows() {
                counts[row.votes[0].bit() * 4 + row.votes[1].bit() * 2 + row.votes[2].bit()] += 1;
            }
            Sketch::Trio(TrioSketch::from_counts(counts))
        }
        _ => unreachable!("LabelStream enforces 1..=3"),
    }
}

pub(crate) fn pattern_string(idx: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if idx >> b & 1 == 0 { 'a' } else { 'b' })
        .collect()
}

pub(crate) fn pattern_index(s: &str, width: usize) -> Option<usize> {
    if s.len() != width {
        return None;
    }
    let mut idx = 0;
    for ch in s.chars() {
        idx = idx * 2
            + match ch {
                'a' => 0,
                'b' => 1,
                _ => return None,
            };
    }
    Some(idx)
}

macro_rules! sketch_counts_serde {
    ($ty:ident, $width:expr, $len:expr) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                use serde::ser::SerializeStruct;
                let mut map = BTreeMap::new();
                for (idx, count) in self.counts.iter().enumerate() {
                    map.insert(pattern_string(idx, $width), *count);
                }
                let mut st = serializer.serialize_struct(stringify!($ty), 2)?;
                st.serialize_field("Q", &self.q)?;
                st.serialize_field("counts", &map)?;
                st.end()
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                #[derive(Deserialize)]
                struct Raw {
                    #[serde(rename = "Q")]
                    q: u64,
                    counts: BTreeMap<String, u64>,
                }
                let raw = Raw::deserialize(deserializer)?;
                let mut counts = [0u64; $len];
                for (pat, count) in raw.counts {
                    let idx = pattern_index(&pat, $width).ok_or_else(|| {
                        serde::de::Error::custom(format!("bad pattern {pat:?}"))
                    })?;
                    counts[idx] = count;
                }
                let total: u64 = counts.iter().sum();
                if total != raw.q {
                    return Err(serde::de::Error::custom(format!(
                        "counts sum to {total}, Q is {}",
                        raw.q
                    )));
                }
                Ok($ty { q: raw.q, counts })
            }
        }
    };
}

/// Voting-pattern counts of three classifiers over `Q` items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrioSketch {
    q: u64,
    counts: [u64; 8],
}

sketch_counts_serde!(TrioSketch, 3, 8);

impl TrioSketch {
    /// Pattern order `aaa, aab, aba, abb, baa, bab, bba, bbb`.
    pub fn from_counts(counts: [u64; 8]) -> Self {
        TrioSketch {
            q: counts.iter().sum(),
            counts,
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn counts(&self) -> &[u64; 8] {
        &self.counts
    }

    pub fn count(&self, pattern: &str) -> Option<u64> {
        pattern_index(pattern, 3).map(|i| self.counts[i])
    }

    pub fn frequency(&self, pattern: &str) -> Option<Rational> {
        self.count(pattern).map(|c| Rational::new(c, self.q.max(1)))
    }

    pub fn frequencies(&self) -> [Rational; 8] {
        std::array::from_fn(|i| Rational::new(self.counts[i], self.q.max(1)))
    }

    pub fn merge(&self, other: &TrioSketch) -> TrioSketch {
        let mut counts = self.counts;
        for (c, o) in counts.iter_mut().zip(other.counts.iter()) {
            *c += o;
        }
        TrioSketch::from_counts(counts)
    }

    /// Sums counts over the dropped coordinate; `i`, `j` are zero-based and
    /// need not be ordered.
    pub fn marginal_pair(&self, i: usize, j: usize) -> PairSketch {
        assert!(i < 3 && j < 3 && i != j, "pair subset out of range");
        let mut counts = [0u64; 4];
        for (idx, c) in self.counts.iter().enumerate() {
            let vi = idx >> (2 - i) & 1;
            let vj = idx >> (2 - j) & 1;
            counts[vi * 2 + vj] += c;
        }
        PairSketch::from_counts(counts)
    }

    pub fn marginal_single(&self, i: usize) -> SingleSketch {
        assert!(i < 3, "classifier index out of range");
        let ra = self
            .counts
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx >> (2 - i) & 1 == 0)
            .map(|(_, c)| c)
            .sum();
        SingleSketch::new(self.q, ra)
    }

    /// Spec-shaped marginalization over a one- or two-element subset of
    /// one-based classifier indices.
    pub fn marginalize(&self, subset: &[usize]) -> Result<Sketch, IngestError> {
        let checked = |i: usize| -> Result<usize, IngestError> {
            if (1..=3).contains(&i) {
                Ok(i - 1)
            } else {
                Err(IngestError::BadSubset { expected: 3, got: i })
            }
        };
        match subset {
            [i] => Ok(Sketch::Single(self.marginal_single(checked(*i)?))),
            [i, j] if i != j => Ok(Sketch::Pair(self.marginal_pair(checked(*i)?, checked(*j)?))),
            _ => Err(IngestError::BadSubset {
                expected: 3,
                got: subset.len(),
            }),
        }
    }
}

/// Voting-pattern counts of two classifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSketch {
    q: u64,
    counts: [u64; 4],
}

sketch_counts_serde!(PairSketch, 2, 4);

impl PairSketch {
    /// Pattern order `aa, ab, ba, bb`.
    pub fn from_counts(counts: [u64; 4]) -> Self {
        PairSketch {
            q: counts.iter().sum(),
            counts,
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn counts(&self) -> &[u64; 4] {
        &self.counts
    }

    fn freq(&self, idx: usize) -> Rational {
        Rational::new(self.counts[idx], self.q.max(1))
    }

    pub fn faa(&self) -> Rational {
        self.freq(0)
    }

    pub fn fab(&self) -> Rational {
        self.freq(1)
    }

    pub fn fba(&self) -> Rational {
        self.freq(2)
    }

    pub fn fbb(&self) -> Rational {
        self.freq(3)
    }

    /// Vote-`a` rate of the first (0) or second (1) classifier.
    pub fn fa(&self, side: usize) -> Rational {
        match side {
            0 => self.freq(0) + self.freq(1),
            1 => self.freq(0) + self.freq(2),
            _ => panic!("side out of range"),
        }
    }

    pub fn fb(&self, side: usize) -> Rational {
        Rational::one() - self.fa(side)
    }

    pub fn marginal_single(&self, side: usize) -> SingleSketch {
        let ra = match side {
            0 => self.counts[0] + self.counts[1],
            1 => self.counts[0] + self.counts[2],
            _ => panic!("side out of range"),
        };
        SingleSketch::new(self.q, ra)
    }

    pub fn merge(&self, other: &PairSketch) -> PairSketch {
        let mut counts = self.counts;
        for (c, o) in counts.iter_mut().zip(other.counts.iter()) {
            *c += o;
        }
        PairSketch::from_counts(counts)
    }

    /// `faa + fbb`, the rate at which the two classifiers agree.
    pub fn agreement_rate(&self) -> Rational {
        self.freq(0) + self.freq(3)
    }

    /// `fbb - fb_i * fb_j`, the one pair-level observable needed at two
    /// labels; equal by completeness to `faa - fa_i * fa_j`.
    pub fn delta(&self) -> Rational {
        self.fbb() - self.fb(0) * self.fb(1)
    }
}

/// Vote tallies of a single classifier: `Ra + Rb = Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleSketch {
    #[serde(rename = "Q")]
    q: u64,
    ra: u64,
}

impl SingleSketch {
    pub fn new(q: u64, ra: u64) -> Self {
        assert!(ra <= q, "more a-votes than items");
        SingleSketch { q, ra }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ra(&self) -> u64 {
        self.ra
    }

    pub fn rb(&self) -> u64 {
        self.q - self.ra
    }

    pub fn fa(&self) -> Rational {
        Rational::new(self.ra, self.q.max(1))
    }

    pub fn fb(&self) -> Rational {
        Rational::new(self.rb(), self.q.max(1))
    }

    pub fn merge(&self, other: &SingleSketch) -> SingleSketch {
        SingleSketch::new(self.q + other.q, self.ra + other.ra)
    }
}

/// The synthetic independent trio sketch used across unit tests: exact
/// pattern frequencies times their common denominator of five million.
#[cfg(test)]
pub(crate) fn synthetic_trio_sketch() -> TrioSketch {
    let mut counts = [0u64; 8];
    for (pat, n) in [
        ("aaa", 2_010_437u64),
        ("aab", 931_913),
        ("aba", 448_913),
        ("baa", 776_713),
        ("abb", 251_237),
        ("bab", 330_937),
        ("bba", 171_437),
        ("bbb", 78_413),
    ] {
        counts[pattern_index(pat, 3).unwrap()] = n;
    }
    TrioSketch::from_counts(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stream_of(patterns: &[&str]) -> LabelStream {
        let rows = patterns
            .iter()
            .enumerate()
            .map(|(i, p)| StreamRow {
                item_id: format!("q{i}"),
                votes: p.chars().map(|c| if c == 'a' { Label::A } else { Label::B }).collect(),
                truth: None,
            })
            .collect();
        LabelStream::new(rows).unwrap()
    }

    #[test]
    fn tally_examples() {
        let sk = ingest(&stream_of(&["aaa", "aaa", "bbb", "aba"]));
        let Sketch::Trio(trio) = sk else { panic!() };
        assert_eq!(trio.count("aaa"), Some(2));
        assert_eq!(trio.count("bbb"), Some(1));
        assert_eq!(trio.count("aba"), Some(1));
        assert_eq!(trio.count("aab"), Some(0));
        assert_eq!(trio.q(), 4);

        let Sketch::Single(single) = ingest(&stream_of(&["a", "a", "b"])) else {
            panic!()
        };
        assert_eq!((single.q(), single.ra(), single.rb()), (3, 2, 1));
    }

    #[test]
    fn marginalize_examples() {
        let trio = TrioSketch::from_counts({
            let mut c = [0u64; 8];
            c[pattern_index("aaa", 3).unwrap()] = 2;
            c[pattern_index("bbb", 3).unwrap()] = 1;
            c[pattern_index("aba", 3).unwrap()] = 1;
            c
        });
        let Sketch::Pair(pair) = trio.marginalize(&[1, 3]).unwrap() else {
            panic!()
        };
        assert_eq!(pair.counts(), &[3, 0, 0, 1]);

        let Sketch::Single(single) = trio.marginalize(&[2]).unwrap() else {
            panic!()
        };
        assert_eq!((single.ra(), single.rb()), (2, 2));

        assert!(trio.marginalize(&[1, 2, 3]).is_err());
        assert!(trio.marginalize(&[0]).is_err());
        assert!(trio.marginalize(&[2, 2]).is_err());
    }

    #[test]
    fn synthetic_marginals_and_agreement() {
        let trio = synthetic_trio_sketch();
        assert_eq!(trio.q(), 5_000_000);
        let p12 = trio.marginal_pair(0, 1);
        assert_eq!(p12.faa(), Rational::ratio(58_847, 100_000));
        assert_eq!(p12.fbb(), Rational::ratio(4_997, 100_000));
        assert_eq!(p12.agreement_rate(), Rational::ratio(15_961, 25_000));
        assert_eq!(p12.delta(), Rational::ratio(-323, 200_000));

        let p23 = trio.marginal_pair(1, 2);
        assert_eq!(p23.agreement_rate(), Rational::ratio(1_948, 3_125));
        assert_eq!(p23.delta(), Rational::ratio(1_083, 200_000));

        let p13 = trio.marginal_pair(0, 2);
        assert_eq!(p13.agreement_rate(), Rational::ratio(28_687, 50_000));
        assert_eq!(p13.delta(), Rational::ratio(-18_411, 4_000_000));

        assert_eq!(trio.marginal_single(0).fb(), Rational::ratio(543, 2_000));
        assert_eq!(trio.marginal_single(1).fb(), Rational::ratio(19, 100));
        assert_eq!(trio.marginal_single(2).fb(), Rational::ratio(637, 2_000));
    }

    #[test]
    fn all_agree_pair() {
        let pair = PairSketch::from_counts([5, 0, 0, 3]);
        assert_eq!(pair.agreement_rate(), Rational::one());
    }

    #[test]
    fn independent_votes_have_zero_delta() {
        // fb1 = fb2 = 1/2, fbb = 1/4 over Q = 4
        let pair = PairSketch::from_counts([1, 1, 1, 1]);
        assert_eq!(pair.delta(), Rational::zero());
    }

    #[test]
    fn csv_round_trip_with_truth() {
        let csv = "item_id,c1,c2,c3,truth\nq0,a,b,a,a\nq1,b,b,b,b\n";
        let stream = LabelStream::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(stream.n(), 3);
        assert!(stream.has_truth());
        let mut out = Vec::new();
        stream.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), csv);
    }

    #[test]
    fn ingest_errors_carry_row_numbers() {
        let err = LabelStream::read_csv("item_id,c1,c2\nq0,a,x\n".as_bytes()).unwrap_err();
        assert_eq!(
            err,
            IngestError::UnknownLabel {
                row: 0,
                value: "x".to_string()
            }
        );
        let err = LabelStream::read_csv("item_id,c1\n".as_bytes()).unwrap_err();
        assert_eq!(err, IngestError::Empty);
        let err = LabelStream::read_csv("c1,c2\nq0,a\n".as_bytes()).unwrap_err();
        assert_eq!(err, IngestError::MissingItemId);
    }

    #[test]
    fn sketch_json_round_trip() {
        let trio = synthetic_trio_sketch();
        let json = serde_json::to_string(&trio).unwrap();
        assert!(json.contains("\"aaa\":2010437"));
        let back: TrioSketch = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trio);
    }

    proptest! {
        #[test]
        fn delta_identity(counts in proptest::array::uniform4(0u64..200)) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let pair = PairSketch::from_counts(counts);
            let via_b = pair.fbb() - pair.fb(0) * pair.fb(1);
            let via_a = pair.faa() - pair.fa(0) * pair.fa(1);
            prop_assert_eq!(via_b, via_a);
        }

        #[test]
        fn marginals_commute(counts in proptest::array::uniform8(0u64..50)) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let trio = TrioSketch::from_counts(counts);
            for i in 0..3 {
                for j in 0..3 {
                    if i == j { continue; }
                    let direct = trio.marginal_single(i);
                    let via_pair = trio.marginal_pair(i, j).marginal_single(0);
                    prop_assert_eq!(direct, via_pair);
                }
            }
        }

        #[test]
        fn merge_matches_concatenated_tally(
            c1 in proptest::array::uniform8(0u64..30),
            c2 in proptest::array::uniform8(0u64..30),
        ) {
            let merged = TrioSketch::from_counts(c1).merge(&TrioSketch::from_counts(c2));
            let mut sum = [0u64; 8];
            for i in 0..8 { sum[i] = c1[i] + c2[i]; }
            prop_assert_eq!(merged, TrioSketch::from_counts(sum));
        }
    }
}
