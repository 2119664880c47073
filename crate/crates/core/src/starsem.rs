//! *SEM 2012 column format (ConanDoyle-neg layout).
//!
//! Columns, tab separated:
//!
//! ```text
//! 0 chapter  1 sentence  2 token  3 word  4 lemma  5 pos  6 syntax
//! 7.. either "***" (no negation) or one (cue, scope, event) triple per negation
//! ```
//!
//! `_` marks an empty cell and a blank line ends a sentence. Every negation
//! triple becomes one canonical record; the event column is read and
//! dropped. Affixal cues (a cue cell holding only part of the word, as
//! `im` in `impossible`) are not mapped to token indices.

use std::io::{BufRead, Write};

use crate::corpus::{Corpus, Lang, NegationRecord};
use crate::error::{Error, Result};

pub const NO_NEGATION: &str = "***";
pub const EMPTY_CELL: &str = "_";
const FIXED_COLUMNS: usize = 7;

#[derive(Debug, Clone)]
pub struct StarSemOptions {
    pub lang: Lang,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSemParse {
    pub corpus: Corpus,
    /// Dropped affixal cues and negations, one line each.
    pub warnings: Vec<String>,
}

/// One row of a sentence block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSemRow {
    pub token_num: usize,
    pub word: String,
    pub lemma: String,
    pub pos: String,
    pub syntax: String,
    /// `(cue, scope, event)` cells, one triple per negation.
    pub negations: Vec<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSemSentence {
    pub chapter: String,
    pub sentence_num: String,
    pub rows: Vec<StarSemRow>,
    /// Line number of the first row.
    pub line: usize,
}

impl StarSemSentence {
    pub fn negation_count(&self) -> usize {
        self.rows.first().map_or(0, |r| r.negations.len())
    }
}

/// Split a stream into sentence blocks, checking the column layout.
pub fn read_blocks<R: BufRead>(reader: R) -> Result<Vec<StarSemSentence>> {
    let mut blocks = Vec::new();
    let mut pending: Vec<(usize, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            if !pending.is_empty() {
                blocks.push(parse_block(&pending)?);
                pending.clear();
            }
        } else {
            pending.push((i + 1, text.to_string()));
        }
    }
    if !pending.is_empty() {
        blocks.push(parse_block(&pending)?);
    }
    Ok(blocks)
}

fn parse_block(lines: &[(usize, String)]) -> Result<StarSemSentence> {
    let first_line = lines[0].0;
    let width = lines[0].1.split('\t').count();
    let negation_slots = match width {
        FIXED_COLUMNS => 0,
        8 => 0,
        w if w > 8 && (w - FIXED_COLUMNS).is_multiple_of(3) => (w - FIXED_COLUMNS) / 3,
        w => {
            return Err(Error::format(
                first_line,
                "columns",
                format!("{w} columns; expected 7, 8 (\"***\") or 7 + 3k"),
            ))
        }
    };

    let mut chapter = String::new();
    let mut sentence_num = String::new();
    let mut rows = Vec::with_capacity(lines.len());
    for (expected, (line, text)) in lines.iter().enumerate() {
        let cols: Vec<&str> = text.split('\t').collect();
        if cols.len() != width {
            return Err(Error::format(
                *line,
                "columns",
                format!(
                    "ragged column count: expected {width}, found {}",
                    cols.len()
                ),
            ));
        }
        if width == 8 && cols[7] != NO_NEGATION {
            return Err(Error::format(
                *line,
                "negation",
                format!("8-column row must end in \"{NO_NEGATION}\""),
            ));
        }
        if expected == 0 {
            chapter = cols[0].to_string();
            sentence_num = cols[1].to_string();
        } else if cols[0] != chapter || cols[1] != sentence_num {
            return Err(Error::format(
                *line,
                "sentence",
                "chapter/sentence number changes inside a block (missing blank line?)",
            ));
        }
        let token_num: usize = cols[2].parse().map_err(|_| {
            Error::format(*line, "token_num", format!("not an integer: `{}`", cols[2]))
        })?;
        if token_num != expected {
            return Err(Error::format(
                *line,
                "token_num",
                format!("expected {expected}, found {token_num}"),
            ));
        }
        if cols[3].is_empty() {
            return Err(Error::format(*line, "word", "empty word"));
        }
        let negations = (0..negation_slots)
            .map(|k| {
                let at = FIXED_COLUMNS + 3 * k;
                [
                    cols[at].to_string(),
                    cols[at + 1].to_string(),
                    cols[at + 2].to_string(),
                ]
            })
            .collect();
        rows.push(StarSemRow {
            token_num,
            word: cols[3].to_string(),
            lemma: cols[4].to_string(),
            pos: cols[5].to_string(),
            syntax: cols[6].to_string(),
            negations,
        });
    }
    Ok(StarSemSentence {
        chapter,
        sentence_num,
        rows,
        line: first_line,
    })
}

fn block_records(
    block: &StarSemSentence,
    options: &StarSemOptions,
    warnings: &mut Vec<String>,
) -> Result<Vec<NegationRecord>> {
    let tokens: Vec<String> = block.rows.iter().map(|r| r.word.clone()).collect();
    let base = NegationRecord::sentence(
        block.chapter.clone(),
        block.sentence_num.clone(),
        options.lang,
        options.source.clone(),
        tokens,
    );

    let mut records = Vec::new();
    for k in 0..block.negation_count() {
        let mut cues = Vec::new();
        let mut scope = Vec::new();
        let mut any_cue = false;
        for (i, row) in block.rows.iter().enumerate() {
            let [cue, sc, _event] = &row.negations[k];
            if cue != EMPTY_CELL {
                any_cue = true;
                if *cue == row.word {
                    cues.push(i);
                } else {
                    warnings.push(format!(
                        "line {}: affixal cue `{cue}` in `{}` dropped",
                        block.line + i,
                        row.word
                    ));
                }
            }
            if sc != EMPTY_CELL {
                scope.push(i);
            }
        }
        let key = format!("{}/{}", block.chapter, block.sentence_num);
        if !any_cue {
            return Err(Error::validation(key, format!("negation {k} has no cue")));
        }
        if cues.is_empty() {
            warnings.push(format!(
                "line {}: negation {k} of sentence {key} has only affixal cues; skipped",
                block.line
            ));
            continue;
        }
        let mut r = base.clone();
        r.cue_indices = cues;
        r.scope_indices = scope;
        records.push(r);
    }
    if records.is_empty() {
        records.push(base);
    }
    Ok(records)
}

pub fn parse_starsem<R: BufRead>(reader: R, options: &StarSemOptions) -> Result<StarSemParse> {
    let mut warnings = Vec::new();
    let mut records = Vec::new();
    for block in read_blocks(reader)? {
        records.extend(block_records(&block, options, &mut warnings)?);
    }
    Ok(StarSemParse {
        corpus: Corpus::new(records)?,
        warnings,
    })
}

fn check_cell(value: &str, what: &str, key: &str) -> Result<()> {
    if value.is_empty() || value == EMPTY_CELL || value.contains(['\t', '\n', '\r']) {
        return Err(Error::consistency(
            key,
            format!("{what} `{value}` cannot be written as a *SEM cell"),
        ));
    }
    Ok(())
}

/// Write one block per sentence. Records of the same sentence merge into
/// one block with a triple per negation; lemma, POS, syntax and event
/// cells are written as `_`.
pub fn write_starsem<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for s in corpus.sentences() {
        let key = format!("{}/{}", s.doc_id, s.sent_id);
        check_cell(s.doc_id, "doc_id", &key)?;
        check_cell(s.sent_id, "sent_id", &key)?;
        if s.tokens.is_empty() {
            return Err(Error::consistency(key, "sentence has no tokens"));
        }
        let negations: Vec<&NegationRecord> =
            s.records.iter().filter(|r| r.is_negation()).collect();
        for (i, word) in s.tokens.iter().enumerate() {
            check_cell(word, "token", &key)?;
            let mut row = format!("{}\t{}\t{i}\t{word}\t_\t_\t_", s.doc_id, s.sent_id);
            if negations.is_empty() {
                row.push('\t');
                row.push_str(NO_NEGATION);
            }
            for r in &negations {
                let cue = if r.cue_indices.binary_search(&i).is_ok() {
                    word.as_str()
                } else {
                    EMPTY_CELL
                };
                let scope = if r.scope_indices.binary_search(&i).is_ok() {
                    word.as_str()
                } else {
                    EMPTY_CELL
                };
                row.push_str(&format!("\t{cue}\t{scope}\t{EMPTY_CELL}"));
            }
            writeln!(out, "{row}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_starsem_string(corpus: &Corpus) -> Result<String> {
    let mut buf = Vec::new();
    write_starsem(corpus, &mut buf)?;
    Ok(String::from_utf8(buf).expect("cells are UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> StarSemOptions {
        StarSemOptions {
            lang: Lang::En,
            source: "conandoyle".into(),
        }
    }

    fn parse(text: &str) -> Result<StarSemParse> {
        parse_starsem(text.as_bytes(), &opts())
    }

    fn block(chapter: &str, sent: &str, rows: &[&[&str]]) -> String {
        let mut s = String::new();
        for (i, cells) in rows.iter().enumerate() {
            s.push_str(&format!("{chapter}\t{sent}\t{i}\t"));
            s.push_str(&cells.join("\t"));
            s.push('\n');
        }
        s.push('\n');
        s
    }

    #[test]
    fn no_negation_block() {
        let text = block(
            "c1",
            "0",
            &[
                &["He", "he", "PRP", "(S(NP*)", "***"],
                &["left", "leave", "VBD", "(VP*)", "***"],
                &[".", ".", ".", "*)", "***"],
            ],
        );
        let p = parse(&text).unwrap();
        assert_eq!(p.corpus.len(), 1);
        assert!(!p.corpus.records()[0].is_negation());
        assert_eq!(p.corpus.sentences().count(), 1);
    }

    #[test]
    fn single_negation_column_walk() {
        let text = block(
            "c1",
            "3",
            &[
                &["He", "_", "_", "_", "_", "He", "_"],
                &["was", "_", "_", "_", "_", "was", "_"],
                &["not", "_", "_", "_", "not", "_", "_"],
                &["there", "_", "_", "_", "_", "there", "there"],
                &["at", "_", "_", "_", "_", "_", "_"],
                &["all", "_", "_", "_", "_", "_", "_"],
            ],
        );
        let p = parse(&text).unwrap();
        let r = &p.corpus.records()[0];
        assert_eq!(p.corpus.len(), 1);
        assert_eq!(r.doc_id, "c1");
        assert_eq!(r.sent_id, "3");
        assert_eq!(r.cue_indices, [2]);
        assert_eq!(r.scope_indices, [0, 1, 3]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn two_negations_become_two_records() {
        let text = block(
            "c",
            "1",
            &[
                &["I", "_", "_", "_", "_", "I", "_", "_", "_", "_"],
                &["never", "_", "_", "_", "never", "_", "_", "_", "_", "_"],
                &["said", "_", "_", "_", "_", "said", "said", "_", "_", "_"],
                &[
                    "nothing", "_", "_", "_", "_", "nothing", "_", "nothing", "_", "_",
                ],
            ],
        );
        let p = parse(&text).unwrap();
        assert_eq!(p.corpus.len(), 2);
        let recs = p.corpus.records();
        assert_eq!(
            (recs[0].doc_id.as_str(), recs[0].sent_id.as_str()),
            ("c", "1")
        );
        assert_eq!(recs[0].cue_indices, [1]);
        assert_eq!(recs[0].scope_indices, [0, 2, 3]);
        assert_eq!(recs[1].cue_indices, [3]);
        assert!(recs[1].scope_indices.is_empty());
    }

    #[test]
    fn affixal_cue_dropped_with_warning() {
        let text = block(
            "c",
            "1",
            &[
                &["It", "_", "_", "_", "_", "It", "_"],
                &["is", "_", "_", "_", "_", "is", "_"],
                &["impossible", "_", "_", "_", "im", "possible", "_"],
            ],
        );
        let p = parse(&text).unwrap();
        assert_eq!(p.corpus.len(), 1);
        assert!(!p.corpus.records()[0].is_negation());
        assert_eq!(p.warnings.len(), 2);
        assert!(p.warnings[0].contains("affixal"));
    }

    #[test]
    fn ragged_columns() {
        let mut text = block("c", "1", &[&["a", "_", "_", "_", "***"]]);
        text.pop();
        text.push_str("c\t1\t1\tb\t_\t_\t_\n");
        match parse(&text).unwrap_err() {
            Error::Format { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("c\t1\t0\ta\t_\t_\t_\tx\ty\n"),
            Err(Error::Format { line: 1, .. })
        ));
    }

    #[test]
    fn empty_cue_slot_is_validation_error() {
        let text = block("c", "1", &[&["a", "_", "_", "_", "_", "a", "_"]]);
        assert!(matches!(parse(&text), Err(Error::Validation { .. })));
    }

    #[test]
    fn token_numbers_must_be_contiguous() {
        let text = "c\t1\t0\ta\t_\t_\t_\t***\nc\t1\t2\tb\t_\t_\t_\t***\n";
        assert!(matches!(parse(text), Err(Error::Format { line: 2, .. })));
    }

    #[test]
    fn write_merges_records() {
        let toks: Vec<String> = ["I", "never", "said", "nothing"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut a = NegationRecord::sentence("c", "1", Lang::En, "x", toks);
        a.cue_indices = vec![1];
        a.scope_indices = vec![0, 2, 3];
        let mut b = a.clone();
        b.cue_indices = vec![3];
        b.scope_indices = vec![2];
        let corpus = Corpus::new(vec![a, b]).unwrap();
        let text = write_starsem_string(&corpus).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first.split('\t').count(), 7 + 6);
        assert_eq!(text.lines().filter(|l| l.is_empty()).count(), 1);
        let back = parse(&text).unwrap().corpus;
        assert_eq!(back.records().len(), 2);
        assert_eq!(back.records()[0].cue_indices, [1]);
        assert_eq!(back.records()[1].scope_indices, [2]);
    }

    #[test]
    fn write_one_record_and_empty() {
        assert_eq!(write_starsem_string(&Corpus::empty()).unwrap(), "");
        let toks: Vec<String> = ["not", "here"].iter().map(|s| s.to_string()).collect();
        let mut a = NegationRecord::sentence("c", "1", Lang::En, "x", toks);
        a.cue_indices = vec![0];
        a.scope_indices = vec![1];
        let text = write_starsem_string(&Corpus::new(vec![a]).unwrap()).unwrap();
        assert_eq!(
            text,
            "c\t1\t0\tnot\t_\t_\t_\tnot\t_\t_\nc\t1\t1\there\t_\t_\t_\t_\there\t_\n\n"
        );
    }

    #[test]
    fn write_rejects_unwritable_tokens() {
        let toks: Vec<String> = ["_", "x"].iter().map(|s| s.to_string()).collect();
        let c = Corpus::new(vec![NegationRecord::sentence(
            "c",
            "1",
            Lang::En,
            "x",
            toks,
        )])
        .unwrap();
        assert!(matches!(
            write_starsem_string(&c),
            Err(Error::Consistency { .. })
        ));
    }
}
