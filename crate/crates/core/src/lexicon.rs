//! Cue lexicons, cue detection and per-cue instance duplication.
//!
//! Lexicon files hold one pattern per line. Tokens are separated by single
//! spaces and the literal token `...` separates the parts of a
//! discontinuous cue (`ne ... pas`). Lines starting with `#` and blank
//! lines are ignored.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use caseless::Caseless;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{Corpus, Lang, NegationRecord};
use crate::error::{Error, Result};

/// Separator token between the parts of a discontinuous cue.
pub const GAP: &str = "...";

/// Tokens that a discontinuous cue may not span.
pub const CUE_HARD_BOUNDARIES: &[&str] = &[";", ".", "!", "?"];

/// Canonical caseless form used for every comparison against the lexicon.
pub fn fold(s: &str) -> String {
    s.chars().nfd().default_case_fold().nfd().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuePattern {
    parts: Vec<Vec<String>>,
    folded: Vec<Vec<String>>,
    lang: Lang,
}

impl CuePattern {
    pub fn new(parts: Vec<Vec<String>>, lang: Lang) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(Vec::is_empty) {
            return Err(Error::argument("cue pattern parts must be non-empty"));
        }
        if parts
            .iter()
            .flatten()
            .any(|t| t.is_empty() || t.chars().any(char::is_whitespace) || t == GAP)
        {
            return Err(Error::argument(
                "cue pattern tokens must be non-empty and contain no whitespace",
            ));
        }
        let folded = parts
            .iter()
            .map(|p| p.iter().map(|t| fold(t)).collect())
            .collect();
        Ok(CuePattern {
            parts,
            folded,
            lang,
        })
    }

    /// Parse the textual form, e.g. `nicht mehr` or `ne ... pas`.
    pub fn parse(text: &str, lang: Lang) -> Result<Self> {
        let mut parts = vec![Vec::new()];
        for tok in text.split(' ') {
            if tok.is_empty() {
                return Err(Error::argument(
                    "empty token (tokens are separated by single spaces)",
                ));
            }
            if tok == GAP {
                parts.push(Vec::new());
            } else {
                parts.last_mut().unwrap().push(tok.to_string());
            }
        }
        if parts.iter().any(Vec::is_empty) {
            return Err(Error::argument("empty pattern part"));
        }
        CuePattern::new(parts, lang)
    }

    pub fn parts(&self) -> &[Vec<String>] {
        &self.parts
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    pub fn token_count(&self) -> usize {
        self.parts.iter().map(Vec::len).sum()
    }

    pub fn is_discontinuous(&self) -> bool {
        self.parts.len() > 1
    }
}

impl fmt::Display for CuePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.join(" ")).collect();
        f.write_str(&parts.join(" ... "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueMatch {
    pub pattern: CuePattern,
    pub indices: Vec<usize>,
}

/// Patterns of one language, longest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    lang: Lang,
    patterns: Vec<CuePattern>,
}

const BUILTIN_DE: &str = include_str!("../data/lexicons/de.txt");
const BUILTIN_FR: &str = include_str!("../data/lexicons/fr.txt");
const BUILTIN_IT: &str = include_str!("../data/lexicons/it.txt");
const BUILTIN_EN: &str = include_str!("../data/lexicons/en.txt");

impl Lexicon {
    /// Build from patterns; orders by total token count, longest first,
    /// keeping input order among equals.
    pub fn from_patterns(lang: Lang, mut patterns: Vec<CuePattern>) -> Self {
        patterns.sort_by_key(|p| std::cmp::Reverse(p.token_count()));
        Lexicon { lang, patterns }
    }

    /// The lexicon shipped for `lang`.
    pub fn builtin(lang: Lang) -> Self {
        let text = match lang {
            Lang::De => BUILTIN_DE,
            Lang::Fr => BUILTIN_FR,
            Lang::It => BUILTIN_IT,
            Lang::En => BUILTIN_EN,
        };
        let (lexicon, warnings) =
            load_lexicon(text.as_bytes(), lang).expect("builtin lexicon parses");
        debug_assert!(warnings.is_empty());
        lexicon
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    pub fn patterns(&self) -> &[CuePattern] {
        &self.patterns
    }
}

/// Load a lexicon file. Duplicate patterns (after case folding) are
/// dropped and reported in the returned warnings.
pub fn load_lexicon<R: BufRead>(reader: R, lang: Lang) -> Result<(Lexicon, Vec<String>)> {
    let mut patterns = Vec::new();
    let mut seen = HashSet::new();
    let mut warnings = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() || text.starts_with('#') {
            continue;
        }
        let pattern = CuePattern::parse(text, lang)
            .map_err(|e| Error::format(i + 1, "pattern", e.to_string()))?;
        if !seen.insert(pattern.folded.clone()) {
            warnings.push(format!(
                "line {}: duplicate pattern `{text}` ignored",
                i + 1
            ));
            continue;
        }
        patterns.push(pattern);
    }
    Ok((Lexicon::from_patterns(lang, patterns), warnings))
}

fn part_matches_at(folded: &[String], used: &[bool], at: usize, part: &[String]) -> bool {
    at + part.len() <= folded.len()
        && part
            .iter()
            .enumerate()
            .all(|(k, t)| !used[at + k] && folded[at + k] == *t)
}

fn match_at(
    tokens: &[String],
    folded: &[String],
    used: &[bool],
    start: usize,
    pattern: &CuePattern,
) -> Option<Vec<usize>> {
    let first = &pattern.folded[0];
    if !part_matches_at(folded, used, start, first) {
        return None;
    }
    let mut indices: Vec<usize> = (start..start + first.len()).collect();
    let mut pos = start + first.len();
    for part in &pattern.folded[1..] {
        let mut found = None;
        for (j, token) in tokens.iter().enumerate().skip(pos) {
            if CUE_HARD_BOUNDARIES.contains(&token.as_str()) {
                return None;
            }
            if part_matches_at(folded, used, j, part) {
                found = Some(j);
                break;
            }
        }
        let j = found?;
        indices.extend(j..j + part.len());
        pos = j + part.len();
    }
    Some(indices)
}

/// Find cues greedily from left to right, trying longer patterns first.
/// Each token belongs to at most one match; matches come out ordered by
/// their first index.
pub fn detect_cues<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Vec<CueMatch> {
    let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
    let folded: Vec<String> = tokens.iter().map(|t| fold(t)).collect();
    let mut used = vec![false; tokens.len()];
    let mut matches = Vec::new();
    for start in 0..tokens.len() {
        if used[start] {
            continue;
        }
        for pattern in &lexicon.patterns {
            if let Some(indices) = match_at(&tokens, &folded, &used, start, pattern) {
                for &i in &indices {
                    used[i] = true;
                }
                matches.push(CueMatch {
                    pattern: pattern.clone(),
                    indices,
                });
                break;
            }
        }
    }
    matches
}

/// Identity shared by all records cut from one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceKey {
    pub doc_id: String,
    pub sent_id: String,
    pub lang: Lang,
    pub source: String,
}

/// One record per cue match, with an empty scope waiting to be annotated.
pub fn explode_instances(
    tokens: &[String],
    matches: &[CueMatch],
    key: &SentenceKey,
) -> Vec<NegationRecord> {
    matches
        .iter()
        .map(|m| {
            let mut r = NegationRecord::sentence(
                key.doc_id.clone(),
                key.sent_id.clone(),
                key.lang,
                key.source.clone(),
                tokens.to_vec(),
            );
            r.cue_indices = m.indices.clone();
            r
        })
        .collect()
}

/// Re-detect cues in every sentence of `corpus` and rebuild it with one
/// record per cue. Negation-free sentences are kept as cue-less records
/// when `keep_negation_free` is set. Existing annotations are discarded;
/// split labels are carried over.
pub fn explode_corpus(
    corpus: &Corpus,
    lexicon: &Lexicon,
    keep_negation_free: bool,
) -> Result<Corpus> {
    let mut out = Vec::new();
    for s in corpus.sentences() {
        let key = SentenceKey {
            doc_id: s.doc_id.to_string(),
            sent_id: s.sent_id.to_string(),
            lang: s.lang,
            source: s.source.to_string(),
        };
        let split = s.records[0].split;
        let matches = detect_cues(s.tokens, lexicon);
        let mut records = explode_instances(s.tokens, &matches, &key);
        if records.is_empty() && keep_negation_free {
            records.push(NegationRecord::sentence(
                key.doc_id,
                key.sent_id,
                key.lang,
                key.source,
                s.tokens.to_vec(),
            ));
        }
        for mut r in records {
            r.split = split;
            out.push(r);
        }
    }
    Corpus::new(out)
}
