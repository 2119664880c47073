//! Corpus construction: rank documents by negation density, keep the top
//! ones, and assign document-level train/test/validation splits.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::corpus::{Corpus, Split};
use crate::error::{Error, Result};
use crate::lexicon::{detect_cues, Lexicon};

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentScore {
    pub doc_id: String,
    /// Tokens covered by cue matches.
    pub cue_count: usize,
    pub token_count: usize,
    pub density: f64,
}

/// Ranking order: density descending, then cue count descending, then
/// doc_id ascending. Densities are compared as exact fractions.
pub fn score_order(a: &DocumentScore, b: &DocumentScore) -> Ordering {
    let lhs = a.cue_count as u128 * b.token_count as u128;
    let rhs = b.cue_count as u128 * a.token_count as u128;
    rhs.cmp(&lhs)
        .then_with(|| b.cue_count.cmp(&a.cue_count))
        .then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// Count cue tokens per document. Each distinct sentence counts once,
/// however many records it has.
pub fn score_documents(corpus: &Corpus, lexicon: &Lexicon) -> Result<Vec<DocumentScore>> {
    let mut totals: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for s in corpus.sentences() {
        let cues: usize = detect_cues(s.tokens, lexicon)
            .iter()
            .map(|m| m.indices.len())
            .sum();
        let entry = totals.entry(s.doc_id).or_default();
        entry.0 += cues;
        entry.1 += s.tokens.len();
    }
    let mut scores = totals
        .into_iter()
        .map(|(doc_id, (cue_count, token_count))| {
            if token_count == 0 {
                return Err(Error::validation(doc_id, "document has no tokens"));
            }
            Ok(DocumentScore {
                doc_id: doc_id.to_string(),
                cue_count,
                token_count,
                density: cue_count as f64 / token_count as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(score_order);
    Ok(scores)
}

/// Tab-separated report: doc_id, cue_count, token_count, density.
pub fn score_report(scores: &[DocumentScore]) -> String {
    let mut out = String::from("doc_id\tcue_count\ttoken_count\tdensity\n");
    for s in scores {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}",
            s.doc_id, s.cue_count, s.token_count, s.density
        );
    }
    out
}

/// The `k` best documents, in rank order.
pub fn select_top(scores: &[DocumentScore], k: usize) -> Result<Vec<String>> {
    if k > scores.len() {
        return Err(Error::argument(format!(
            "cannot select {k} documents from {}",
            scores.len()
        )));
    }
    let mut ranked: Vec<&DocumentScore> = scores.iter().collect();
    ranked.sort_by(|a, b| score_order(a, b));
    Ok(ranked[..k].iter().map(|s| s.doc_id.clone()).collect())
}

/// Percentages for train, test and validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitRatios {
    pub train: u32,
    pub test: u32,
    pub validation: u32,
}

impl SplitRatios {
    pub const DEFAULT: SplitRatios = SplitRatios {
        train: 70,
        test: 20,
        validation: 10,
    };

    pub fn new(train: u32, test: u32, validation: u32) -> Result<Self> {
        if train + test + validation != 100 {
            return Err(Error::argument("ratios must sum to 100"));
        }
        Ok(SplitRatios {
            train,
            test,
            validation,
        })
    }

    /// Parse `70,20,10`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(Error::argument(
                "ratios must be three comma-separated integers",
            ));
        };
        let num = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::argument(format!("invalid ratio `{s}`")))
        };
        SplitRatios::new(num(a)?, num(b)?, num(c)?)
    }

    fn get(&self, split: Split) -> u32 {
        match split {
            Split::Train => self.train,
            Split::Test => self.test,
            Split::Validation => self.validation,
        }
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios::DEFAULT
    }
}

/// 64-bit linear congruential generator with Knuth's MMIX constants:
/// `state = state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform-ish integer in `0..bound` from the high 32 bits
    /// (multiply-shift, no rejection).
    pub fn below(&mut self, bound: usize) -> usize {
        let high = self.next_u64() >> 32;
        ((high * bound as u64) >> 32) as usize
    }

    /// Fisher–Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

pub type SplitAssignment = BTreeMap<String, Split>;

/// Assign every document of `corpus` to a split.
///
/// Documents are listed in corpus order, shuffled with [`Lcg64`] seeded
/// by `seed`, and then handed out one at a time to the split whose
/// sentence count lags furthest behind its target (ties go to train,
/// then test, then validation). Once the remaining documents are just
/// enough to fill the still-empty splits with a non-zero ratio, they go
/// to those splits.
pub fn assign_splits(corpus: &Corpus, ratios: SplitRatios, seed: u64) -> Result<SplitAssignment> {
    let mut docs: Vec<(&str, usize)> = corpus
        .documents()
        .iter()
        .map(|d| (d.doc_id.as_str(), d.sent_ids.len()))
        .collect();
    if docs.len() < 3 {
        return Err(Error::argument(format!(
            "need at least 3 documents to split, found {}",
            docs.len()
        )));
    }
    Lcg64::new(seed).shuffle(&mut docs);

    let total: usize = docs.iter().map(|d| d.1).sum();
    // Targets scaled by 100 to stay in integers.
    let target: Vec<i128> = Split::ALL
        .iter()
        .map(|&s| ratios.get(s) as i128 * total as i128)
        .collect();
    let mut filled = [0i128; 3];
    let mut counts = [0usize; 3];
    let mut assignment = SplitAssignment::new();

    for (n, &(doc_id, sentences)) in docs.iter().enumerate() {
        let remaining = docs.len() - n;
        let starving: Vec<usize> = (0..3)
            .filter(|&i| ratios.get(Split::ALL[i]) > 0 && counts[i] == 0)
            .collect();
        let candidates: Vec<usize> = if remaining <= starving.len() {
            starving
        } else {
            (0..3).filter(|&i| ratios.get(Split::ALL[i]) > 0).collect()
        };
        let pick = candidates
            .iter()
            .copied()
            .max_by(|&a, &b| {
                (target[a] - filled[a])
                    .cmp(&(target[b] - filled[b]))
                    .then_with(|| b.cmp(&a))
            })
            .expect("ratios sum to 100, so some split is open");
        filled[pick] += 100 * sentences as i128;
        counts[pick] += 1;
        assignment.insert(doc_id.to_string(), Split::ALL[pick]);
    }
    Ok(assignment)
}

/// Write the assigned split onto every record.
pub fn apply_splits(corpus: Corpus, assignment: &SplitAssignment) -> Result<Corpus> {
    corpus.try_map_records(|mut r| {
        let split = assignment.get(&r.doc_id).ok_or_else(|| {
            Error::argument(format!("document `{}` has no split assignment", r.doc_id))
        })?;
        r.split = Some(*split);
        Ok(r)
    })
}
