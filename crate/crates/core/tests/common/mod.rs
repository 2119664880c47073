#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use negscope::{Lang, NegationRecord, Split};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Sentence before index sets are cut from the bit masks.
#[derive(Debug, Clone)]
pub struct RawSentence {
    pub tokens: Vec<String>,
    pub lang: Lang,
    pub source: String,
    /// `(cue mask, scope mask, pred mask, split)` per instance.
    pub instances: Vec<(u32, u32, Option<u32>, Option<Split>)>,
}

pub type RawCorpus = BTreeMap<u16, Vec<RawSentence>>;

/// Tokens that stress JSON escaping.
pub fn any_token() -> BoxedStrategy<String> {
    prop_oneof![
        "[a-zA-Z]{1,6}",
        "[äöüßéèàçÄ«»„“€]{1,3}",
        r#"[\\"'\t\n{}\[\]:,/ ]{1,3}"#,
        Just("_".to_string()),
        Just("nicht".to_string()),
    ]
    .boxed()
}

/// Tokens that fit in a *SEM cell.
pub fn column_token() -> BoxedStrategy<String> {
    prop_oneof![
        "[a-zA-Z0-9äöüé]{1,6}",
        "[.,;:()«»]{1,2}",
        Just("nicht".to_string())
    ]
    .boxed()
}

pub fn lang() -> impl Strategy<Value = Lang> {
    prop::sample::select(Lang::ALL.to_vec())
}

pub fn split() -> impl Strategy<Value = Option<Split>> {
    prop::option::of(prop::sample::select(vec![
        Split::Train,
        Split::Test,
        Split::Validation,
    ]))
}

pub fn raw_sentence(
    token: BoxedStrategy<String>,
    max_tokens: usize,
    max_instances: usize,
) -> impl Strategy<Value = RawSentence> {
    assert!(max_tokens <= 32);
    (
        prop::collection::vec(token, 1..=max_tokens),
        lang(),
        prop::sample::select(vec!["legal".to_string(), "sfu".to_string()]),
        prop::collection::vec(
            (
                any::<u32>(),
                any::<u32>(),
                prop::option::of(any::<u32>()),
                split(),
            ),
            0..=max_instances,
        ),
    )
        .prop_map(|(tokens, lang, source, instances)| RawSentence {
            tokens,
            lang,
            source,
            instances,
        })
}

pub fn raw_corpus(token: BoxedStrategy<String>) -> impl Strategy<Value = RawCorpus> {
    prop::collection::btree_map(
        0u16..500,
        prop::collection::vec(raw_sentence(token, 12, 3), 1..4),
        0..6,
    )
}

pub fn mask(m: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| m >> i & 1 == 1).collect()
}

/// Valid records for one sentence: distinct non-empty cue sets, scopes
/// disjoint from cues, and a single cue-less record when nothing is left.
pub fn sentence_records(doc_id: &str, sent_id: &str, raw: &RawSentence) -> Vec<NegationRecord> {
    let n = raw.tokens.len();
    let base = NegationRecord::sentence(
        doc_id,
        sent_id,
        raw.lang,
        raw.source.clone(),
        raw.tokens.clone(),
    );
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &(cue, scope, pred, split) in &raw.instances {
        let cues = mask(cue, n);
        if cues.is_empty() || !seen.insert(cues.clone()) {
            continue;
        }
        let mut r = base.clone();
        r.cue_indices = cues;
        r.scope_indices = mask(scope & !cue, n);
        r.pred_scope_indices = pred.map(|p| mask(p & !cue, n));
        r.split = split;
        out.push(r);
    }
    if out.is_empty() {
        let mut r = base;
        r.split = raw.instances.first().and_then(|i| i.3);
        out.push(r);
    }
    out
}

pub fn materialize(raw: &RawCorpus) -> Vec<NegationRecord> {
    let mut out = Vec::new();
    for (d, sentences) in raw {
        let doc_id = format!("d{d}");
        for (s, sentence) in sentences.iter().enumerate() {
            // Steps of 5 make "10" sort after "5".
            out.extend(sentence_records(&doc_id, &(5 * s).to_string(), sentence));
        }
    }
    out
}

/// Deterministic samples from a strategy, for fixed-size acceptance runs.
pub fn sample<S: Strategy>(strategy: S, count: usize, seed: u8) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]),
    );
    (0..count)
        .map(|_| {
            strategy
                .new_tree(&mut runner)
                .expect("strategy generates")
                .current()
        })
        .collect()
}

/// Per-token comparison of gold and predicted scopes, written without
/// the library's set walk.
pub fn brute_force_counts(n: usize, gold: &[usize], pred: &[usize]) -> (u64, u64, u64) {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for i in 0..n {
        match (gold.contains(&i), pred.contains(&i)) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    (tp, fp, fn_)
}

pub fn oracle_prf(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let p = if tp + fp == 0 {
        if fn_ == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let r = if tp + fn_ == 0 {
        if fp == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f)
}

/// Gold records as a prediction file: every negation gets a predicted
/// scope, empty when the generator left it out.
pub fn as_predictions(records: &[NegationRecord]) -> Vec<NegationRecord> {
    records
        .iter()
        .cloned()
        .map(|mut r| {
            if r.is_negation() {
                r.pred_scope_indices = Some(r.pred_scope_indices.unwrap_or_default());
            }
            r
        })
        .collect()
}

const FILLER: &[&str] = &[
    "Der",
    "Kläger",
    "hat",
    "die",
    "Klage",
    "rechtzeitig",
    "erhoben",
    ",",
    "und",
    "zwar",
    "heute",
];

/// Cues to plant. Each inner vector is inserted as one unbroken run;
/// a second run is the tail of a discontinuous cue.
pub fn planted_cue() -> impl Strategy<Value = Vec<Vec<&'static str>>> {
    prop::sample::select(vec![
        vec![vec!["nicht"]],
        vec![vec!["kein"]],
        vec![vec!["keine"]],
        vec![vec!["niemals"]],
        vec![vec!["nichts"]],
        vec![vec!["nicht", "mehr"]],
        vec![vec!["weder"], vec!["noch"]],
    ])
}

/// Tokens, the indices of every planted cue token, and the cue count.
pub fn planted_sentence() -> impl Strategy<Value = (Vec<String>, BTreeSet<usize>, usize)> {
    (
        prop::collection::vec(prop::sample::select(FILLER), 0..12),
        prop::collection::vec(
            (
                planted_cue(),
                any::<prop::sample::Index>(),
                any::<prop::sample::Index>(),
            ),
            0..=4,
        ),
    )
        .prop_map(|(filler, cues)| {
            let mut units: Vec<Vec<(String, bool)>> = filler
                .into_iter()
                .map(|w| vec![(w.to_string(), false)])
                .collect();
            let count = cues.len();
            for (runs, a, b) in cues {
                let run = |words: &Vec<&str>| {
                    words
                        .iter()
                        .map(|w| (w.to_string(), true))
                        .collect::<Vec<_>>()
                };
                let pos = a.index(units.len() + 1);
                units.insert(pos, run(&runs[0]));
                if let Some(tail) = runs.get(1) {
                    let after = pos + 1 + b.index(units.len() - pos);
                    units.insert(after, run(tail));
                }
            }
            units.push(vec![(".".to_string(), false)]);
            let slots: Vec<(String, bool)> = units.into_iter().flatten().collect();
            let planted = slots
                .iter()
                .enumerate()
                .filter(|(_, s)| s.1)
                .map(|(i, _)| i)
                .collect();
            (slots.into_iter().map(|s| s.0).collect(), planted, count)
        })
}
