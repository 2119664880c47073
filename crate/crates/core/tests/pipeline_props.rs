use std::collections::BTreeSet;

use negscope::pipeline::{apply_splits, score_order};
use negscope::{
    assign_splits, score_documents, Corpus, Lang, Lexicon, NegationRecord, Split, SplitRatios,
};
use proptest::prelude::*;

fn sentence(doc: &str, sent: usize, words: &[&str]) -> NegationRecord {
    NegationRecord::sentence(
        doc,
        sent.to_string(),
        Lang::De,
        "legal",
        words.iter().map(|w| w.to_string()).collect(),
    )
}

/// Documents with the given sentence counts.
fn corpus(sizes: &[usize]) -> Corpus {
    let mut records = Vec::new();
    for (d, &n) in sizes.iter().enumerate() {
        for s in 0..n {
            records.push(sentence(&format!("doc{d}"), s, &["Das", "gilt", "."]));
        }
    }
    Corpus::new(records).unwrap()
}

fn ratios() -> impl Strategy<Value = SplitRatios> {
    (1u32..=98)
        .prop_flat_map(|a| (Just(a), 1u32..=(99 - a)))
        .prop_map(|(a, b)| SplitRatios::new(a, b, 100 - a - b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn splits_partition_documents(
        sizes in prop::collection::vec(1usize..8, 3..25),
        ratios in ratios(),
        seed in any::<u64>(),
    ) {
        let c = corpus(&sizes);
        let a = assign_splits(&c, ratios, seed).unwrap();
        let docs: BTreeSet<&str> = c.documents().iter().map(|d| d.doc_id.as_str()).collect();
        let assigned: BTreeSet<&str> = a.keys().map(String::as_str).collect();
        prop_assert_eq!(docs, assigned);
        for split in [Split::Train, Split::Test, Split::Validation] {
            prop_assert!(a.values().any(|&s| s == split), "{:?} empty", split);
        }
        prop_assert_eq!(&assign_splits(&c, ratios, seed).unwrap(), &a);

        let labelled = apply_splits(c, &a).unwrap();
        for r in labelled.records() {
            prop_assert_eq!(r.split, Some(a[&r.doc_id]));
        }
    }

    #[test]
    fn appending_a_cue_sentence_ranks_above_cue_free_document(
        a_sentences in prop::collection::vec(prop::sample::select(vec!["nicht", "Recht", "kein", "Gericht"]), 1..6),
        b_len in 1usize..20,
    ) {
        let lexicon = Lexicon::builtin(Lang::De);
        let mut records: Vec<NegationRecord> = a_sentences
            .iter()
            .enumerate()
            .map(|(i, w)| sentence("a", i, &["Das", w, "."]))
            .collect();
        let b_words = vec!["Recht"; b_len];
        records.push(sentence("b", 0, &b_words));
        let before = score_documents(&Corpus::new(records.clone()).unwrap(), &lexicon).unwrap();
        records.push(sentence("a", 99, &["Das", "ist", "nicht", "so", "."]));
        let after = score_documents(&Corpus::new(records).unwrap(), &lexicon).unwrap();

        let find = |v: &[negscope::pipeline::DocumentScore], id: &str| v.iter().find(|s| s.doc_id == id).unwrap().clone();
        let (a0, b0) = (find(&before, "a"), find(&before, "b"));
        let (a1, b1) = (find(&after, "a"), find(&after, "b"));
        prop_assert_eq!(&b0, &b1);
        prop_assert!(score_order(&a1, &b1) <= score_order(&a0, &b0));
        prop_assert_eq!(score_order(&a1, &b1), std::cmp::Ordering::Less);
        prop_assert!(a1.cue_count > a0.cue_count);
    }
}
