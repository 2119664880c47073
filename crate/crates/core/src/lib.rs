//! Negation cue and scope corpora: canonical storage, *SEM conversion,
//! cue detection, corpus construction, a rule-based scope baseline and
//! token-level evaluation.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod pipeline;
pub mod report;
pub mod resolver;
pub mod starsem;
pub mod tokenize;

pub use corpus::{
    natural_cmp, read_canonical, read_canonical_str, read_sentence_table, write_canonical,
    write_canonical_string, Corpus, Lang, NegationRecord, RecordKey, Split,
};
pub use error::{Error, Result};
pub use eval::{
    aggregate_runs, corpus_stats, evaluate_run, scope_length_report, EvalMode, EvalReport,
    ScopeRatio,
};
pub use lexicon::{detect_cues, explode_corpus, load_lexicon, CuePattern, Lexicon};
pub use pipeline::{assign_splits, score_documents, select_top, SplitRatios};
pub use report::OutputFormat;
pub use resolver::{resolve_corpus, resolve_scope};
pub use starsem::{parse_starsem, write_starsem, StarSemOptions};
pub use tokenize::{tokenize, Token};
